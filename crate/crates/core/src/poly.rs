//! Real polynomial helpers: positive root isolation and the closed-form cubic.
//!
//! Coefficients are stored in ascending order, `p(x) = Σ c_j x^j`.

use crate::scalar::Real;

const BISECTION_LIMIT: usize = 300;

pub fn eval<T: Real>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
}

pub fn derivative<T: Real>(coeffs: &[T]) -> Vec<T> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| c * T::from_usize_lossy(j))
        .collect()
}

fn trimmed<T: Real>(coeffs: &[T]) -> &[T] {
    let len = coeffs.iter().rposition(|c| *c != T::zero()).map_or(0, |i| i + 1);
    &coeffs[..len]
}

/// Cauchy bound: every root satisfies `|x| ≤ 1 + max_{j<d} |c_j / c_d|`.
pub fn root_bound<T: Real>(coeffs: &[T]) -> T {
    let c = trimmed(coeffs);
    match c.split_last() {
        None | Some((_, [])) => T::zero(),
        Some((&lead, rest)) => {
            T::one() + rest.iter().fold(T::zero(), |acc, &v| acc.max((v / lead).abs()))
        }
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to relative width `rel_tol`.
pub fn bisect<T: Real, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, rel_tol: T) -> T {
    let mut f_lo = f(lo);
    let two = T::lit(2.0);
    for _ in 0..BISECTION_LIMIT {
        let mid = (lo + hi) / two;
        if hi - lo <= rel_tol * mid.abs() || mid <= lo || mid >= hi {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return mid;
        }
        if (f_mid < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

/// Roots of odd multiplicity (sign changes) of `p` inside `(lo, hi]`, ascending.
///
/// The derivative's roots split the interval into monotone pieces, each holding
/// at most one root; those pieces are then bisected.
pub fn sign_change_roots<T: Real>(coeffs: &[T], lo: T, hi: T) -> Vec<T> {
    let c = trimmed(coeffs);
    if c.len() <= 1 || hi <= lo {
        return Vec::new();
    }
    let tol = T::epsilon() * T::lit(4.0);
    if c.len() == 2 {
        let x = -c[0] / c[1];
        return if x > lo && x <= hi { vec![x] } else { Vec::new() };
    }
    let critical = sign_change_roots(&derivative(c), lo, hi);
    let mut breakpoints = Vec::with_capacity(critical.len() + 2);
    breakpoints.push(lo);
    breakpoints.extend(critical);
    breakpoints.push(hi);

    let mut roots = Vec::new();
    let mut prev: Option<(T, T)> = None;
    for &x in &breakpoints {
        let v = eval(c, x);
        if v == T::zero() {
            continue;
        }
        if let Some((px, pv)) = prev {
            if (pv < T::zero()) != (v < T::zero()) {
                roots.push(bisect(|t| eval(c, t), px, x, tol));
            }
        }
        prev = Some((x, v));
    }
    roots
}

/// Strictly positive roots of odd multiplicity.
pub fn positive_roots<T: Real>(coeffs: &[T]) -> Vec<T> {
    let bound = root_bound(coeffs);
    sign_change_roots(coeffs, T::zero(), bound * T::lit(1.01) + T::epsilon())
}

/// Real roots of the monic cubic `x³ + a₂x² + a₁x + a₀`, ascending and
/// distinct, each polished by one Newton step.
pub fn monic_cubic_real_roots<T: Real>(a2: T, a1: T, a0: T) -> Vec<T> {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let mut roots: Vec<T> = if a0 == T::zero() {
        // x (x² + a₂x + a₁)
        let mut r = vec![T::zero()];
        let disc = a2 * a2 - T::lit(4.0) * a1;
        if disc >= T::zero() {
            let s = disc.sqrt();
            let q = -(a2 + s.copysign(a2)) / two;
            if q != T::zero() {
                r.push(q);
                r.push(a1 / q);
            } else {
                r.push(T::zero());
            }
        }
        r
    } else {
        let shift = a2 / three;
        let p = a1 - a2 * a2 / three;
        let q = two * a2 * a2 * a2 / T::lit(27.0) - a2 * a1 / three + a0;
        let disc = (q / two).powi(2) + (p / three).powi(3);
        if disc > T::zero() {
            let u = (-(q / two) - disc.sqrt().copysign(q)).cbrt();
            let t = if u == T::zero() { T::zero() } else { u - p / (three * u) };
            vec![t - shift]
        } else if p == T::zero() {
            vec![-shift]
        } else {
            let r = two * (-p / three).sqrt();
            let arg = (three * q / (two * p) * (-three / p).sqrt()).max(-T::one()).min(T::one());
            let phi = arg.acos() / three;
            let third = two * T::PI() / three;
            (0..3)
                .map(|k| r * (phi - third * T::from_usize_lossy(k)).cos() - shift)
                .collect()
        }
    };
    let f = |x: T| ((x + a2) * x + a1) * x + a0;
    let df = |x: T| (three * x + two * a2) * x + a1;
    for x in roots.iter_mut() {
        let d = df(*x);
        if d != T::zero() {
            let polished = *x - f(*x) / d;
            if polished.is_finite() && f(polished).abs() <= f(*x).abs() {
                *x = polished;
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * T::lit(8.0) * a.abs().max(b.abs()));
    roots
}
