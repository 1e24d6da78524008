//! Brute-force check of quantized states.
//!
//! The radial equation is put in self-adjoint form with `u = √ρ R`:
//!
//! ```text
//! −u'' + [(l² − 1/4)/ρ² + Mλl/ρ + m²ω²ρ² + 2mηρ] u = ζ² u
//! ```
//!
//! discretized by central differences on a uniform grid with Dirichlet ends,
//! and diagonalized by Sturm-sequence bisection. Nothing here calls into the
//! series or quantization code; a [`SpectralSolution`] only supplies the
//! channel and the comparison target.

use crate::error::{Error, Result};
use crate::quantize::SpectralSolution;
use crate::scalar::Real;

pub const DEFAULT_POINTS: usize = 4000;
pub const MIN_POINTS: usize = 100;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
const EIGEN_REL_TOL: f64 = 1e-12;
const BISECTION_LIMIT: usize = 400;
/// Gaussian padding beyond the turning point, in units of `1/√(mω)`.
const DECAY_PADDING: f64 = 6.0;

/// One `(l, ω)` channel of the radial operator plus its grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOperatorSpec<T> {
    pub mass: T,
    pub omega: T,
    pub eta: T,
    /// Signed `Mλl`.
    pub coulomb_strength: T,
    pub abs_l: u32,
    pub rho_max: T,
    pub points: usize,
}

impl<T: Real> RadialOperatorSpec<T> {
    pub fn check(&self) -> Result<()> {
        if !(self.mass > T::zero()) {
            return Err(Error::NonPositiveMass(self.mass.as_f64()));
        }
        if !(self.omega > T::zero()) || !self.omega.is_finite() {
            return Err(Error::NonPositiveFrequency(self.omega.as_f64()));
        }
        if !self.eta.is_finite() || !self.coulomb_strength.is_finite() {
            return Err(Error::NonFinite("potential"));
        }
        if self.points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {}",
                self.points
            )));
        }
        if !(self.rho_max > T::zero()) || !self.rho_max.is_finite() {
            return Err(Error::InvalidGrid(format!("rho_max must be positive, got {}", self.rho_max)));
        }
        Ok(())
    }

    /// Effective potential of the self-adjoint form.
    pub fn potential(&self, rho: T) -> T {
        let l = T::lit(self.abs_l as f64);
        let mw = self.mass * self.omega;
        (l * l - T::lit(0.25)) / (rho * rho)
            + self.coulomb_strength / rho
            + mw * mw * rho * rho
            + T::lit(2.0) * self.mass * self.eta * rho
    }

    /// Interior grid spacing; nodes sit at `h, 2h, …, N h` with `(N+1) h = rho_max`.
    pub fn step(&self) -> T {
        self.rho_max / T::from_usize_lossy(self.points + 1)
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }
}

/// Outer classical turning point of the confining part, `m²ω²ρ² + 2mηρ = ζ²`,
/// padded by six Gaussian widths (and at least 1.5× the turning point).
pub fn default_rho_max<T: Real>(mass: T, omega: T, eta: T, zeta_sq_target: T) -> T {
    let width = (mass * omega).sqrt().recip();
    let a = mass * mass * omega * omega;
    let b = T::lit(2.0) * mass * eta;
    let disc = b * b + T::lit(4.0) * a * zeta_sq_target;
    let turning = if zeta_sq_target > T::zero() && disc >= T::zero() {
        // Stable form of (−b + √disc) / 2a.
        let root = T::lit(2.0) * zeta_sq_target / (b + disc.sqrt());
        if root.is_finite() && root > T::zero() { root } else { width }
    } else {
        width
    };
    let turning = turning.max(width);
    (T::lit(1.5) * turning).max(turning + T::lit(DECAY_PADDING) * width)
}

/// Symmetric tridiagonal matrix of the discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator<T> {
    pub diagonal: Vec<T>,
    /// Sub- and super-diagonal (identical).
    pub off_diagonal: Vec<T>,
    pub step: T,
}

impl<T: Real> TridiagonalOperator<T> {
    /// Number of eigenvalues strictly below `x` (count of negative LDLᵀ pivots).
    pub fn sturm_count(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        if q < T::zero() {
            count += 1;
        }
        for i in 1..self.diagonal.len() {
            if q.abs() < tiny {
                q = tiny.copysign(q);
            }
            let e = self.off_diagonal[i - 1];
            q = self.diagonal[i] - x - e * e / q;
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (T, T) {
        let n = self.diagonal.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { T::zero() };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { T::zero() };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }

    pub fn max_asymmetry(&self) -> T {
        // Stored once for both triangles, so the matrix is symmetric by construction.
        T::zero()
    }

    /// Lowest `count` eigenvalues, ascending, by bisection on the Sturm count.
    pub fn lowest_eigenvalues(&self, count: usize) -> Result<Vec<T>> {
        let tol = T::tolerance(EIGEN_REL_TOL);
        let (g_lo, g_hi) = self.gershgorin();
        let mut out: Vec<T> = Vec::with_capacity(count);
        let two = T::lit(2.0);
        for k in 0..count {
            let mut lo = out.last().copied().unwrap_or(g_lo);
            let mut hi = g_hi;
            let mut converged = false;
            for _ in 0..BISECTION_LIMIT {
                let mid = (lo + hi) / two;
                let width = hi - lo;
                if width <= tol * lo.abs().max(hi.abs()) || mid <= lo || mid >= hi {
                    converged = true;
                    break;
                }
                if self.sturm_count(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if !converged {
                return Err(Error::ConvergenceFailure(format!("eigenvalue {k} did not converge")));
            }
            let value = (lo + hi) / two;
            if let Some(&prev) = out.last() {
                if value <= prev {
                    return Err(Error::ConvergenceFailure(format!(
                        "eigenvalues {} and {k} not separated",
                        k - 1
                    )));
                }
            }
            out.push(value);
        }
        Ok(out)
    }
}

pub fn build_operator<T: Real>(spec: &RadialOperatorSpec<T>) -> Result<TridiagonalOperator<T>> {
    spec.check()?;
    let h = spec.step();
    let inv_h2 = (h * h).recip();
    let diagonal = (1..=spec.points)
        .map(|i| T::lit(2.0) * inv_h2 + spec.potential(h * T::from_usize_lossy(i)))
        .collect();
    let off_diagonal = vec![-inv_h2; spec.points - 1];
    Ok(TridiagonalOperator {
        diagonal,
        off_diagonal,
        step: h,
    })
}

/// Numeric `ζ²_k` for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectrum<T> {
    pub eigenvalues: Vec<T>,
    pub rho_max: T,
    pub points: usize,
    pub step: T,
    /// `|ζ²_k(N) − ζ²_k(2N)|`, when requested.
    pub convergence: Option<Vec<T>>,
}

pub fn eigenvalues<T: Real>(spec: &RadialOperatorSpec<T>, count: usize) -> Result<OracleSpectrum<T>> {
    if count == 0 {
        return Err(Error::ConvergenceFailure("requested zero eigenvalues".into()));
    }
    let op = build_operator(spec)?;
    if count > spec.points {
        return Err(Error::InvalidGrid(format!(
            "{count} eigenvalues requested from a {}-point grid",
            spec.points
        )));
    }
    Ok(OracleSpectrum {
        eigenvalues: op.lowest_eigenvalues(count)?,
        rho_max: spec.rho_max,
        points: spec.points,
        step: op.step,
        convergence: None,
    })
}

/// Like [`eigenvalues`], with a grid-doubling drift estimate attached.
pub fn eigenvalues_with_convergence<T: Real>(spec: &RadialOperatorSpec<T>, count: usize) -> Result<OracleSpectrum<T>> {
    let mut coarse = eigenvalues(spec, count)?;
    let fine = eigenvalues(&spec.with_points(2 * spec.points), count)?;
    coarse.convergence = Some(
        coarse
            .eigenvalues
            .iter()
            .zip(&fine.eigenvalues)
            .map(|(a, b)| (*a - *b).abs())
            .collect(),
    );
    Ok(coarse)
}

/// Overrides for [`verify_solution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions<T> {
    pub points: usize,
    /// Second grid for the convergence check; `2 * points` when `None`.
    pub refined_points: Option<usize>,
    pub rho_max: Option<T>,
    /// Multiplies the frequency handed to the oracle, keeping the analytic
    /// `ζ²` of the solved state as the target.
    pub perturb_omega: Option<T>,
    pub tolerance: T,
}

impl<T: Real> Default for VerifyOptions<T> {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS,
            refined_points: None,
            rho_max: None,
            perturb_omega: None,
            tolerance: T::lit(DEFAULT_TOLERANCE),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    pub n: usize,
    pub l: i32,
    /// Frequency handed to the oracle (perturbed, if requested).
    pub omega: T,
    /// Eigenvalue index compared against, equal to the node count.
    pub node_index: usize,
    pub analytic_zeta_sq: T,
    pub numeric_zeta_sq: T,
    pub refined_zeta_sq: T,
    pub points: usize,
    pub refined_points: usize,
    pub rho_max: T,
    /// `|numeric − analytic| / |analytic|` on the first grid.
    pub deviation: T,
    /// Same on the refined grid.
    pub refined_deviation: T,
    pub tolerance: T,
    pub pass: bool,
}

impl<T: Real> VerificationReport<T> {
    /// `deviation / refined_deviation`; about 4 for a second-order stencil
    /// when the grid doubles.
    pub fn convergence_ratio(&self) -> T {
        self.deviation / self.refined_deviation
    }
}

/// Compares a solved state's `ζ²` with the oracle eigenvalue whose index
/// equals the state's node count. Passes when the deviation is within
/// tolerance and shrinks on the refined grid.
pub fn verify_solution<T: Real>(solution: &SpectralSolution<T>, options: &VerifyOptions<T>) -> Result<VerificationReport<T>> {
    let p = &solution.physical;
    let omega = solution.omega * options.perturb_omega.unwrap_or_else(T::one);
    let rho_max = options
        .rho_max
        .unwrap_or_else(|| default_rho_max(p.mass, omega, p.eta, solution.zeta_sq));
    let spec = RadialOperatorSpec {
        mass: p.mass,
        omega,
        eta: p.eta,
        coulomb_strength: p.coulomb_strength(),
        abs_l: solution.abs_l(),
        rho_max,
        points: options.points,
    };
    let refined_points = options.refined_points.unwrap_or(2 * options.points);
    let index = solution.node_count;
    let coarse = eigenvalues(&spec, index + 1)?.eigenvalues[index];
    let fine = eigenvalues(&spec.with_points(refined_points), index + 1)?.eigenvalues[index];
    let target = solution.zeta_sq;
    let deviation = ((coarse - target) / target).abs();
    let refined_deviation = ((fine - target) / target).abs();
    Ok(VerificationReport {
        n: solution.n,
        l: solution.l,
        omega,
        node_index: index,
        analytic_zeta_sq: target,
        numeric_zeta_sq: coarse,
        refined_zeta_sq: fine,
        points: options.points,
        refined_points,
        rho_max,
        deviation,
        refined_deviation,
        tolerance: options.tolerance,
        pass: deviation < options.tolerance && refined_deviation < deviation,
    })
}
