//! Radial wavefunctions of quantized states.
//!
//! `R(ρ) = exp(−ξ²/2) exp(−αξ/2) ξ^{|l|} H(ξ)` with `ξ = √(mω) ρ`, normalized
//! over the two-dimensional radial measure `ρ dρ`. The axial plane wave is
//! delta-normalized and left out.

use crate::error::{Error, Result};
use crate::poly;
use crate::quantize::SpectralSolution;
use crate::scalar::Real;
use crate::series::{self, CoefficientSequence};

/// `ln(1e16)`: the integrand must drop this many e-folds below its peak.
const SUPPRESSION_EFOLDS: f64 = 36.841_361_487_904_734;
const QUADRATURE_REL_TOL: f64 = 1e-13;
const QUADRATURE_MAX_LEVELS: usize = 22;
const INITIAL_PANELS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialWavefunction<T> {
    pub solution: SpectralSolution<T>,
    pub norm_constant: T,
    /// Upper integration limit used for the norm.
    pub rho_max: T,
    pub samples: Option<Vec<(T, T)>>,
}

impl<T: Real> RadialWavefunction<T> {
    /// Normalized `R(ρ)`.
    pub fn value(&self, rho: T) -> T {
        self.norm_constant * evaluate_r(&self.solution, rho)
    }

    /// `count` uniform samples of the normalized amplitude on `[0, rho_max]`.
    pub fn sample(&self, count: usize, rho_max: T) -> Vec<(T, T)> {
        match count {
            0 => Vec::new(),
            1 => vec![(T::zero(), self.value(T::zero()))],
            _ => {
                let step = rho_max / T::from_usize_lossy(count - 1);
                (0..count)
                    .map(|i| {
                        let rho = if i == count - 1 { rho_max } else { step * T::from_usize_lossy(i) };
                        (rho, self.value(rho))
                    })
                    .collect()
            }
        }
    }

    pub fn with_samples(mut self, count: usize, rho_max: T) -> Self {
        self.samples = Some(self.sample(count, rho_max));
        self
    }
}

fn sequence<T: Real>(solution: &SpectralSolution<T>) -> CoefficientSequence<T> {
    CoefficientSequence::from_coeffs(solution.coefficients.clone(), solution.heun)
}

fn xi_scale<T: Real>(solution: &SpectralSolution<T>) -> T {
    (solution.physical.mass * solution.omega).sqrt()
}

/// `(1, c₁)` of the degree-one polynomial, with
/// `c₁ = mη/(mω)^{3/2} + Mλl/(θ (mω)^{1/2})`.
pub fn ground_state_polynomial<T: Real>(solution: &SpectralSolution<T>) -> Result<[T; 2]> {
    if solution.n != 1 {
        return Err(Error::WrongDegree {
            expected: 1,
            found: solution.n,
        });
    }
    let p = &solution.physical;
    let s = (p.mass * solution.omega).sqrt();
    let theta = T::lit((2 * solution.abs_l() + 1) as f64);
    // Grouped like α/2 + δ/θ so the two routes agree bit for bit.
    let c1 = p.mass * p.eta / (s * s * s) + p.coulomb_strength() / s / theta;
    Ok([T::one(), c1])
}

/// Unnormalized `R(ρ)`.
pub fn evaluate_r<T: Real>(solution: &SpectralSolution<T>, rho: T) -> T {
    let xi = xi_scale(solution) * rho;
    series::radial_ansatz(&sequence(solution), &solution.heun, solution.abs_l(), xi)
}

/// Strictly positive roots of `H`, by critical-point splitting and bisection.
pub fn count_nodes<T: Real>(solution: &SpectralSolution<T>) -> usize {
    poly::positive_roots(&solution.coefficients).len()
}

/// Sign changes of `R` over `points` uniform samples on `(0, rho_max)`.
pub fn sampled_sign_changes<T: Real>(solution: &SpectralSolution<T>, rho_max: T, points: usize) -> usize {
    let step = rho_max / T::from_usize_lossy(points + 1);
    let mut changes = 0;
    let mut last_sign: Option<bool> = None;
    for i in 1..=points {
        let v = evaluate_r(solution, step * T::from_usize_lossy(i));
        if v == T::zero() {
            continue;
        }
        let sign = v > T::zero();
        if last_sign.is_some_and(|s| s != sign) {
            changes += 1;
        }
        last_sign = Some(sign);
    }
    changes
}

/// Upper limit for the norm integral: 1.5 times the radius at which the
/// Gaussian envelope has suppressed the integrand peak by 1e-16.
pub fn quadrature_cutoff<T: Real>(solution: &SpectralSolution<T>) -> T {
    let peak = T::lit((solution.abs_l() as usize + solution.n) as f64).sqrt();
    // exp(−ξ² − αξ) peaks further out when α < 0.
    let drift = (-solution.heun.alpha / T::lit(2.0)).max(T::zero());
    let xi_cut = (peak * peak + T::lit(SUPPRESSION_EFOLDS)).sqrt() + drift;
    let mut rho_max = T::lit(1.5) * xi_cut / xi_scale(solution);

    // Confirm the suppression on samples; widen if a slowly decaying
    // polynomial tail outlasts the estimate.
    let integrand = |rho: T| {
        let r = evaluate_r(solution, rho);
        r * r * rho
    };
    for _ in 0..8 {
        let samples = 400;
        let step = rho_max / T::from_usize_lossy(samples);
        let peak_value = (1..=samples)
            .map(|i| integrand(step * T::from_usize_lossy(i)))
            .fold(T::zero(), T::max);
        if integrand(rho_max) <= T::lit(1e-16) * peak_value {
            break;
        }
        rho_max = rho_max * T::lit(1.5);
    }
    rho_max
}

/// Composite Simpson on `[0, upper]` with panel doubling until the relative
/// change drops below the tolerance.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, upper: T) -> Result<T> {
    let tol = T::tolerance(QUADRATURE_REL_TOL);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let mut panels = INITIAL_PANELS;
    let mut h = upper / T::from_usize_lossy(panels);
    // Simpson sums split into endpoints, even interior and odd interior nodes.
    let ends = f(T::zero()) + f(upper);
    let mut even = T::zero();
    let mut odd = (0..panels / 2)
        .map(|i| f(h * T::from_usize_lossy(2 * i + 1)))
        .fold(T::zero(), |a, b| a + b);
    for i in 1..panels / 2 {
        even = even + f(h * T::from_usize_lossy(2 * i));
    }
    let mut estimate = h / T::lit(3.0) * (ends + four * odd + two * even);
    for _ in 0..QUADRATURE_MAX_LEVELS {
        panels *= 2;
        h = h / two;
        even = even + odd;
        odd = (0..panels / 2)
            .map(|i| f(h * T::from_usize_lossy(2 * i + 1)))
            .fold(T::zero(), |a, b| a + b);
        let refined = h / T::lit(3.0) * (ends + four * odd + two * even);
        if (refined - estimate).abs() <= tol * refined.abs() {
            return Ok(refined);
        }
        estimate = refined;
    }
    Err(Error::QuadratureFailure {
        levels: QUADRATURE_MAX_LEVELS,
    })
}

/// Normalizes `R` so that `∫ |R|² ρ dρ = 1`.
pub fn normalize<T: Real>(solution: &SpectralSolution<T>) -> Result<RadialWavefunction<T>> {
    let rho_max = quadrature_cutoff(solution);
    let integral = integrate(
        |rho| {
            let r = evaluate_r(solution, rho);
            r * r * rho
        },
        rho_max,
    )?;
    if !(integral > T::zero()) || !integral.is_finite() {
        return Err(Error::QuadratureFailure { levels: 0 });
    }
    Ok(RadialWavefunction {
        solution: solution.clone(),
        norm_constant: integral.sqrt().recip(),
        rho_max,
        samples: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhysicalParams;
    use crate::quantize::{self, ReducedProblem, Residuals};
    use crate::series::{first_coefficient, HeunParams};

    fn reference(n: usize, l: i32) -> Vec<SpectralSolution<f64>> {
        let p = PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 0.0, l);
        quantize::solve(&ReducedProblem::new(p, n).unwrap()).unwrap()
    }

    /// Pure 2D oscillator `n_ρ = 0` state, outside the quantized family.
    fn oscillator(mass: f64, omega: f64, abs_l: u32) -> SpectralSolution<f64> {
        SpectralSolution {
            n: 0,
            l: abs_l as i32,
            omega,
            energy: omega * (abs_l as f64 + 1.0),
            zeta_sq: 2.0 * mass * omega * (abs_l as f64 + 1.0),
            coefficients: vec![1.0],
            node_count: 0,
            residuals: Residuals {
                truncation: 0.0,
                tail: 0.0,
                cubic: None,
            },
            physical: PhysicalParams::new(mass, 0.0, 0.0, 0.0, 0.0, abs_l as i32),
            heun: HeunParams::for_channel(0.0, 0.0, abs_l, 0.0),
        }
    }

    #[test]
    fn ground_state_polynomial_reference() {
        let s = &reference(1, 1)[0];
        let [c0, c1] = ground_state_polynomial(s).unwrap();
        assert_eq!(c0, 1.0);
        assert!((c1 - 0.6849).abs() < 1e-4);
        assert!((s.heun.alpha - 0.8656).abs() < 1e-4);
        assert!((s.heun.delta - 0.7564).abs() < 1e-4);
        assert_eq!(c1.to_bits(), first_coefficient(&s.heun).to_bits());
        assert_eq!(c1.to_bits(), s.coefficients[1].to_bits());
    }

    #[test]
    fn ground_state_polynomial_without_linear_term() {
        let p = PhysicalParams::new(1.0, 6f64.sqrt(), 1.0, 0.0, 0.0, 1);
        let s = &quantize::solve(&ReducedProblem::new(p, 1).unwrap()).unwrap()[0];
        let [_, c1] = ground_state_polynomial(s).unwrap();
        assert!((c1 - 6f64.sqrt() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn ground_state_polynomial_rejects_other_degrees() {
        let s = &reference(2, 1)[0];
        assert_eq!(
            ground_state_polynomial(s),
            Err(Error::WrongDegree { expected: 1, found: 2 })
        );
        let mut free = oscillator(1.0, 1.0, 1);
        free.n = 1;
        assert_eq!(ground_state_polynomial(&free).unwrap(), [1.0, 0.0]);
    }

    #[test]
    fn r_vanishes_at_origin_and_decays() {
        let s = &reference(1, 1)[0];
        assert_eq!(evaluate_r(s, 0.0), 0.0);
        let xi_to_rho = 1.0 / (s.omega).sqrt();
        let peak = (1..200)
            .map(|i| evaluate_r(s, i as f64 * 0.02).abs())
            .fold(0.0, f64::max);
        assert!(evaluate_r(s, 10.0 * xi_to_rho).abs() < 1e-20 * peak);
        for i in 1..500 {
            assert!(evaluate_r(s, i as f64 * 0.01) > 0.0);
        }
    }

    #[test]
    fn node_count_examples() {
        let mut s = oscillator(1.0, 1.0, 1);
        s.coefficients = vec![1.0, 0.685];
        assert_eq!(count_nodes(&s), 0);
        s.coefficients = vec![1.0, 0.0, -0.5];
        assert_eq!(count_nodes(&s), 1);
        s.coefficients = vec![1.0];
        assert_eq!(count_nodes(&s), 0);
    }

    #[test]
    fn oscillator_norm_matches_gaussian_moment() {
        // ∫ ρ^{2|l|+1} e^{−mωρ²} dρ = |l|! / (2 (mω)^{|l|+1}) for ξ^{|l|} e^{−ξ²/2},
        // after converting ξ^{2|l|} = (mω)^{|l|} ρ^{2|l|}.
        for (mass, omega, abs_l) in [(1.0, 1.0, 1u32), (2.0, 0.7, 2), (0.5, 3.0, 3)] {
            let mw: f64 = mass * omega;
            let factorial: f64 = (1..=abs_l).map(|k| k as f64).product();
            let integral = mw.powi(abs_l as i32) * factorial / (2.0 * mw.powi(abs_l as i32 + 1));
            let expected = integral.sqrt().recip();
            let wf = normalize(&oscillator(mass, omega, abs_l)).unwrap();
            assert!(
                ((wf.norm_constant - expected) / expected).abs() < 1e-8,
                "{} vs {}",
                wf.norm_constant,
                expected
            );
        }
        assert!((normalize(&oscillator(1.0, 1.0, 1)).unwrap().norm_constant - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn norm_converges_under_grid_doubling() {
        for s in reference(1, 1).iter().chain(&reference(3, 2)) {
            let wf = normalize(s).unwrap();
            let f = |rho: f64| {
                let r = wf.value(rho);
                r * r * rho
            };
            // Fixed-panel Simpson at two resolutions, independent of the adaptive loop.
            let simpson = |panels: usize| {
                let h = wf.rho_max / panels as f64;
                let mut acc = f(0.0) + f(wf.rho_max);
                for i in 1..panels {
                    acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc * h / 3.0
            };
            let coarse = simpson(4096);
            let fine = simpson(8192);
            assert!((coarse - 1.0).abs() < 1e-8);
            assert!((fine - 1.0).abs() < 1e-8);
            assert!((coarse - fine).abs() < 1e-8);
        }
    }

    #[test]
    fn normalization_is_projective() {
        let s = reference(2, 1)[0].clone();
        let wf = normalize(&s).unwrap();
        let mut scaled = s.clone();
        scaled.coefficients.iter_mut().for_each(|c| *c *= 7.0);
        let wf7 = normalize(&scaled).unwrap();
        for rho in [0.1, 0.5, 1.0, 2.0] {
            assert!((wf.value(rho) - wf7.value(rho)).abs() < 1e-12);
        }
    }

    #[test]
    fn node_count_matches_sampling() {
        for (n, l) in [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (3, 2), (3, -2), (4, 1)] {
            for s in reference(n, l) {
                let wf = normalize(&s).unwrap();
                assert_eq!(count_nodes(&s), s.node_count);
                assert_eq!(sampled_sign_changes(&s, wf.rho_max, 10_000), s.node_count, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn r_is_continuous() {
        let s = &reference(3, 1)[1];
        let wf = normalize(s).unwrap();
        let max_jump = |h: f64| {
            let steps = (wf.rho_max / h) as usize;
            (0..steps)
                .map(|i| (wf.value((i + 1) as f64 * h) - wf.value(i as f64 * h)).abs())
                .fold(0.0, f64::max)
        };
        let coarse = max_jump(1e-2);
        let fine = max_jump(5e-3);
        assert!(fine < 0.6 * coarse && fine > 0.4 * coarse, "{coarse} {fine}");
    }

    #[test]
    fn samples_are_uniform_and_start_at_zero() {
        let wf = normalize(&reference(1, 1)[0]).unwrap().with_samples(11, 5.0);
        let samples = wf.samples.unwrap();
        assert_eq!(samples.len(), 11);
        assert_eq!(samples[0], (0.0, 0.0));
        assert_eq!(samples[10].0, 5.0);
        assert!((samples[3].0 - 1.5).abs() < 1e-15);
    }

    #[test]
    fn single_precision_normalization() {
        let p = PhysicalParams::new(1.0f32, 1.0, 1.0, 1.0, 0.0, 1);
        let s = &quantize::solve(&ReducedProblem::new(p, 1).unwrap()).unwrap()[0];
        let wf = normalize(s).unwrap();
        assert!(wf.norm_constant.is_finite() && wf.norm_constant > 0.0);
    }
}
