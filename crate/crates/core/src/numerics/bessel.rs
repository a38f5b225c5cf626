//! Bessel functions of the first kind for real order in `[0, 10]`.

use super::roots::bracketed_root;
use crate::{Error, Result};

pub const MAX_ORDER: f64 = 10.0;
pub const MAX_ARG: f64 = 100.0;
pub const MAX_ZERO_INDEX: usize = 10;

// Below this argument the ascending series loses at most a few digits.
const SERIES_LIMIT: f64 = 12.0;

/// `J_ν(x)` for `ν ∈ [0, 10]` and `x ∈ [0, 100]`.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    check_args(order, x)?;
    Ok(j_unchecked(order, x))
}

/// `J_ν'(x)` on the same domain as [`bessel_j`]; `x = 0` is allowed only
/// where the derivative is finite.
pub fn bessel_j_prime(order: f64, x: f64) -> Result<f64> {
    check_args(order, x)?;
    if x == 0.0 && order > 0.0 && order < 1.0 {
        return Err(Error::Domain(format!("J'_{order}(0) is unbounded")));
    }
    Ok(j_prime_unchecked(order, x))
}

/// The `n`-th positive zero `j_{ν,n}` for `ν ∈ [0, 10]` and `n ∈ 1..=10`.
pub fn bessel_zero(order: f64, n: usize) -> Result<f64> {
    if !(0.0..=MAX_ORDER).contains(&order) {
        return Err(Error::Domain(format!("order {order} outside [0, {MAX_ORDER}]")));
    }
    if n == 0 || n > MAX_ZERO_INDEX {
        return Err(Error::Domain(format!("zero index {n} outside 1..={MAX_ZERO_INDEX}")));
    }
    zero_unchecked(order, n)
}

fn check_args(order: f64, x: f64) -> Result<()> {
    if !(0.0..=MAX_ORDER).contains(&order) {
        return Err(Error::Domain(format!("order {order} outside [0, {MAX_ORDER}]")));
    }
    if !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::Domain(format!("argument {x} outside [0, {MAX_ARG}]")));
    }
    Ok(())
}

pub(crate) fn zero_unchecked(order: f64, n: usize) -> Result<f64> {
    let step = 0.05;
    // J_ν has no zero in (0, ν], and is positive just to the right of 0.
    let mut lo = order.max(step);
    let mut flo = j_unchecked(order, lo);
    let mut found = 0;
    while lo < 4.0 * MAX_ARG {
        let hi = lo + step;
        let fhi = j_unchecked(order, hi);
        if fhi == 0.0 || flo.signum() != fhi.signum() {
            found += 1;
            if found == n {
                return bracketed_root(|x| j_unchecked(order, x), lo, hi, 1e-14);
            }
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::Numerical(format!("zero {n} of J_{order} not found")))
}

/// `J_ν(x)` without argument checks; valid for `ν ≥ 0`, `x ≥ 0`.
pub(crate) fn j_unchecked(order: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if order == 0.0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_LIMIT {
        series(order, x)
    } else {
        miller(order, x)
    }
}

pub(crate) fn j_prime_unchecked(order: f64, x: f64) -> f64 {
    if order == 0.0 {
        return -j_unchecked(1.0, x);
    }
    if x == 0.0 {
        return if order == 1.0 { 0.5 } else if order > 1.0 { 0.0 } else { f64::INFINITY };
    }
    order / x * j_unchecked(order, x) - j_unchecked(order + 1.0, x)
}

fn series(order: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = h.powf(order) / libm::tgamma(order + 1.0);
    let mut sum = term;
    let mut largest = term.abs();
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * (kf + order));
        sum += term;
        largest = largest.max(term.abs());
        if kf > h && term.abs() <= 1e-18 * largest {
            break;
        }
    }
    sum
}

// Backward recurrence normalized by
//   Γ(μ+1) J_μ + Σ_{k≥1} (μ+2k) Γ(μ+k)/k! J_{μ+2k} = (x/2)^μ.
fn miller(order: f64, x: f64) -> f64 {
    let m = order.floor() as usize;
    let mu = order - m as f64;
    let start = ((x + 30.0 + 8.0 * x.cbrt()) as usize).max(m + 30);
    let mut f = vec![0.0f64; start + 2];
    f[start] = 1e-280;
    for k in (1..=start).rev() {
        let v = 2.0 * (mu + k as f64) / x * f[k] - f[k + 1];
        f[k - 1] = v;
        if v.abs() > 1e250 {
            for w in f.iter_mut().skip(k - 1) {
                *w *= 1e-250;
            }
        }
    }
    let mut norm = libm::tgamma(mu + 1.0) * f[0];
    let mut g = libm::tgamma(mu + 1.0);
    let mut k = 1;
    while 2 * k <= start {
        norm += (mu + 2.0 * k as f64) * g * f[2 * k];
        g *= (mu + k as f64) / (k as f64 + 1.0);
        k += 1;
    }
    f[m] * (0.5 * x).powf(mu) / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    // J_n(x) = (1/π) ∫_0^π cos(nτ − x sin τ) dτ, trapezoid rule on a periodic integrand.
    fn integral_rep(n: u32, x: f64) -> f64 {
        let m = 4000;
        let h = std::f64::consts::PI / m as f64;
        let mut s = 0.5 * (1.0 + (n as f64 * std::f64::consts::PI).cos());
        for i in 1..m {
            let t = i as f64 * h;
            s += (n as f64 * t - x * t.sin()).cos();
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn integer_orders_match_integral_representation() {
        for n in 0..=10u32 {
            for &x in &[0.3, 1.0, 4.7, 9.9, 11.99, 12.01, 25.0, 60.0, 99.5] {
                let a = bessel_j(n as f64, x).unwrap();
                let b = integral_rep(n, x);
                assert!((a - b).abs() < 1e-12, "J_{n}({x}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn half_integer_orders_match_spherical_forms() {
        for &x in &[0.5, 2.0, 7.3, 13.0, 40.0, 95.0] {
            let c = (2.0 / (std::f64::consts::PI * x)).sqrt();
            let j12 = c * x.sin();
            let j32 = c * (x.sin() / x - x.cos());
            let j52 = c * ((3.0 / (x * x) - 1.0) * x.sin() - 3.0 * x.cos() / x);
            assert!((bessel_j(0.5, x).unwrap() - j12).abs() < 1e-13);
            assert!((bessel_j(1.5, x).unwrap() - j32).abs() < 1e-13);
            assert!((bessel_j(2.5, x).unwrap() - j52).abs() < 1e-12);
        }
    }

    #[test]
    fn zeros_match_reference_values() {
        let cases = [
            (0.0, 1, 2.404825557695773),
            (1.0, 1, 3.831705970207512),
            (3.0, 1, 6.380161895923984),
            (0.0, 10, 30.63460646843198),
            (10.0, 1, 14.47550068655454),
            (1.5, 1, 4.493409457909064),
            (0.5, 7, 7.0 * std::f64::consts::PI),
        ];
        for (nu, n, want) in cases {
            let z = bessel_zero(nu, n).unwrap();
            assert!((z - want).abs() < 1e-11, "j_{nu},{n} = {z}");
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for &nu in &[0.0, 0.5, 1.0, 3.0, 7.5] {
            for &x in &[0.7, 5.0, 18.0] {
                let h = 1e-5;
                let fd = (j_unchecked(nu, x + h) - j_unchecked(nu, x - h)) / (2.0 * h);
                assert!((bessel_j_prime(nu, x).unwrap() - fd).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn domain_is_enforced() {
        assert!(matches!(bessel_j(10.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(1.0, 101.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_zero(1.0, 11), Err(Error::Domain(_))));
        assert!(matches!(bessel_zero(-1.0, 1), Err(Error::Domain(_))));
    }
}
