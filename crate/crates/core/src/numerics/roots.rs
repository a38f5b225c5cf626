use crate::{Error, Result};

/// Root of `f` inside `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
///
/// Illinois regula falsi with a bisection step every third iteration, so the
/// bracket at least halves every three evaluations. Returns the midpoint of a
/// final bracket narrower than `tol` (or an exact zero if one is hit).
pub fn bracketed_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    let mut side = 0i8;
    for iter in 0..400 {
        if b - a <= tol {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if iter % 3 == 2 || !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        if c <= a || c >= b {
            break;
        }
        let fc = f(c);
        if fc == 0.0 {
            return Ok(c);
        }
        if !fc.is_finite() {
            return Err(Error::Numerical(format!("non-finite function value at {c}")));
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = bracketed_root(|x| x * x - 2.0, 0.0, 3.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = bracketed_root(|x| x.cos() - x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.7390851332151607).abs() < 1e-13);
    }

    #[test]
    fn handles_flat_functions() {
        let r = bracketed_root(|x| (x - 1.0).powi(9), 0.0, 3.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-3);
        let r = bracketed_root(|x| (x - 0.3).powi(3) * 1e-30, 0.0, 1.0, 1e-13).unwrap();
        assert!((r - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(matches!(bracketed_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::Bracket { .. })));
    }
}
