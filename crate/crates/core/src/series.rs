//! Frobenius series for the biconfluent Heun equation
//!
//! ```text
//! H'' + [θ/ξ − α − 2ξ] H' + [g − (θα + 2δ)/(2ξ)] H = 0
//! ```
//!
//! with `H(ξ) = Σ c_j ξ^j`, `c₀ = 1`. The series truncates to a degree-`n`
//! polynomial when `g = 2n` and `c_{n+1} = 0`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest polynomial degree the root finder is documented to handle in
/// double precision.
pub const MAX_DEGREE: usize = 50;

/// Dimensionless parameters of the Heun equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunParams<T> {
    pub alpha: T,
    pub delta: T,
    /// `2|l| + 1`; always odd and positive.
    pub theta: u32,
    pub g: T,
}

impl<T: Real> HeunParams<T> {
    /// Parameters for the angular channel `|l|`.
    pub fn for_channel(alpha: T, delta: T, abs_l: u32, g: T) -> Self {
        Self {
            alpha,
            delta,
            theta: 2 * abs_l + 1,
            g,
        }
    }

    /// Parameters with an explicit `θ`, which must be odd and positive.
    pub fn with_theta(alpha: T, delta: T, theta: u32, g: T) -> Result<Self> {
        let p = Self {
            alpha,
            delta,
            theta,
            g,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        if self.theta == 0 || self.theta % 2 == 0 {
            return Err(Error::InvalidTheta(self.theta));
        }
        for (name, v) in [("alpha", self.alpha), ("delta", self.delta), ("g", self.g)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(())
    }

    pub fn abs_l(&self) -> u32 {
        (self.theta - 1) / 2
    }

    pub fn theta_real(&self) -> T {
        T::lit(self.theta as f64)
    }
}

/// Series coefficients `c₀ ..= c_J` for fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence<T> {
    pub coeffs: Vec<T>,
    pub params: HeunParams<T>,
}

impl<T: Real> CoefficientSequence<T> {
    /// Wraps externally supplied coefficients (for example a truncated polynomial).
    pub fn from_coeffs(coeffs: Vec<T>, params: HeunParams<T>) -> Self {
        Self { coeffs, params }
    }

    pub fn max_index(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `max_{j ≤ upto} |c_j|`.
    pub fn max_abs(&self, upto: usize) -> T {
        self.coeffs
            .iter()
            .take(upto + 1)
            .fold(T::zero(), |acc, c| acc.max(c.abs()))
    }

    /// `(H, H', H'')` at `ξ` from term-wise differentiation of the stored series.
    pub fn evaluate_with_derivatives(&self, xi: T) -> (T, T, T) {
        let mut h = T::zero();
        let mut dh = T::zero();
        let mut d2h = T::zero();
        for (j, &c) in self.coeffs.iter().enumerate().rev() {
            let jf = T::from_usize_lossy(j);
            d2h = d2h * xi + c * jf * (jf - T::one());
            dh = dh * xi + c * jf;
            h = h * xi + c;
        }
        // Horner above produced Σ j c_j ξ^j and Σ j(j-1) c_j ξ^j; shift the powers.
        if xi == T::zero() {
            let c1 = self.coeffs.get(1).copied().unwrap_or_else(T::zero);
            let c2 = self.coeffs.get(2).copied().unwrap_or_else(T::zero);
            return (h, c1, T::lit(2.0) * c2);
        }
        (h, dh / xi, d2h / (xi * xi))
    }
}

/// `c₁ = α/2 + δ/θ`.
pub fn first_coefficient<T: Real>(p: &HeunParams<T>) -> T {
    p.alpha / T::lit(2.0) + p.delta / p.theta_real()
}

/// Runs the three-term recurrence up to `c_{max_index}`.
///
/// ```text
/// c_{j+2} = [2α(j+1) + θα + 2δ] c_{j+1} / [2(j+2)(j+1+θ)] − (g − 2j) c_j / [(j+2)(j+1+θ)]
/// ```
pub fn generate_coefficients<T: Real>(p: &HeunParams<T>, max_index: usize) -> Result<CoefficientSequence<T>> {
    if max_index < 1 {
        return Err(Error::InvalidDegree { n: max_index, max: usize::MAX });
    }
    let guard = T::overflow_threshold();
    let two = T::lit(2.0);
    let theta = p.theta_real();
    let mut coeffs = Vec::with_capacity(max_index + 1);
    coeffs.push(T::one());
    coeffs.push(first_coefficient(p));
    if !(coeffs[1].abs() <= guard) {
        return Err(Error::OverflowGuard { index: 1 });
    }
    for j in 0..max_index - 1 {
        let jf = T::from_usize_lossy(j);
        let denom = (jf + two) * (jf + T::one() + theta);
        let lead = two * p.alpha * (jf + T::one()) + theta * p.alpha + two * p.delta;
        let next = lead * coeffs[j + 1] / (two * denom) - (p.g - two * jf) * coeffs[j] / denom;
        if !(next.abs() <= guard) {
            return Err(Error::OverflowGuard { index: j + 2 });
        }
        coeffs.push(next);
    }
    Ok(CoefficientSequence { coeffs, params: *p })
}

/// `c_{n+1}`, which vanishes exactly when the series truncates at degree `n`.
/// The caller is responsible for `p.g = 2n`.
pub fn truncation_residual<T: Real>(p: &HeunParams<T>, n: usize) -> Result<T> {
    if n < 1 {
        return Err(Error::InvalidDegree { n, max: MAX_DEGREE });
    }
    Ok(generate_coefficients(p, n + 1)?.coeffs[n + 1])
}

/// `c_{n+1} / max_{j≤n} |c_j|`, computed with running rescaling so that it
/// stays finite where the raw coefficients would overflow. Same sign as
/// `c_{n+1}` and continuous in the parameters.
pub fn relative_truncation_residual<T: Real>(p: &HeunParams<T>, n: usize) -> Result<T> {
    if n < 1 {
        return Err(Error::InvalidDegree { n, max: MAX_DEGREE });
    }
    let two = T::lit(2.0);
    let theta = p.theta_real();
    let rescale_at = T::lit(1e100).min(T::max_value().sqrt());
    let (mut prev, mut cur) = (T::one(), first_coefficient(p));
    let mut peak = T::one().max(cur.abs());
    for j in 0..n {
        let jf = T::from_usize_lossy(j);
        let denom = (jf + two) * (jf + T::one() + theta);
        let lead = two * p.alpha * (jf + T::one()) + theta * p.alpha + two * p.delta;
        let next = lead * cur / (two * denom) - (p.g - two * jf) * prev / denom;
        // `next` is c_{j+2}; it only enters the peak while j + 2 ≤ n.
        if j + 2 <= n {
            peak = peak.max(next.abs());
        }
        prev = cur;
        cur = next;
        let big = prev.abs().max(cur.abs()).max(peak);
        if big > rescale_at {
            prev = prev / big;
            cur = cur / big;
            peak = peak / big;
        }
    }
    let r = cur / peak;
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::OverflowGuard { index: n + 1 })
    }
}

/// `H(ξ) = Σ c_j ξ^j` by Horner's rule.
pub fn evaluate_h<T: Real>(seq: &CoefficientSequence<T>, xi: T) -> T {
    seq.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * xi + c)
}

/// `R(ξ) = exp(−ξ²/2) exp(−αξ/2) ξ^{|l|} H(ξ)`.
pub fn radial_ansatz<T: Real>(seq: &CoefficientSequence<T>, p: &HeunParams<T>, abs_l: u32, xi: T) -> T {
    let half = T::lit(0.5);
    let envelope = (-(half * xi * xi) - half * p.alpha * xi).exp();
    envelope * xi.powi(abs_l as i32) * evaluate_h(seq, xi)
}
