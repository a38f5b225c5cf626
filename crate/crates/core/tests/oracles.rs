//! Computed values checked against oracles that share no code with the library.

use std::f64::consts::PI;

use faer::Mat;
use rand::{Rng, SeedableRng};

use spectral_partitions::disk::{radial_deficiency, radial_energy, solve_alpha_match, weighted_bessel_integral};
use spectral_partitions::numerics::linalg::sym_generalized_eigs;
use spectral_partitions::numerics::{bessel_j, bessel_zero};
use spectral_partitions::rect::solve_gamma_pair;
use spectral_partitions::variation::oracle::{hadamard_check, Family};

/// Power series of `J_ν(x)`; fine for `x` below about 20.
fn series_j(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powf(nu) / libm::tgamma(nu + 1.0);
    let mut sum = term;
    for m in 1..80 {
        let m = m as f64;
        term *= -h * h / (m * (m + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First positive zero of `J_ν` by scanning for a sign change.
fn first_zero(nu: f64) -> f64 {
    let mut x = 0.5 + nu;
    while series_j(nu, x) * series_j(nu, x + 0.05) > 0.0 {
        x += 0.05;
    }
    bisect(|t| series_j(nu, t), x, x + 0.05)
}

#[test]
fn bessel_zeros_match_the_series() {
    for (nu, reference) in [(0.0, 2.404826), (3.0, 6.380162)] {
        let z = bessel_zero(nu, 1).unwrap();
        assert!((z - first_zero(nu)).abs() < 1e-10, "ν = {nu}");
        assert!((z - reference).abs() < 1e-6);
    }
    assert!(bessel_j(3.0, 6.3801619).unwrap().abs() < 1e-6);
    for nu in [0.5, 1.5, 2.25, 4.0] {
        for x in [0.3, 2.0, 7.5] {
            assert!((bessel_j(nu, x).unwrap() - series_j(nu, x)).abs() < 1e-12, "J_{nu}({x})");
        }
    }
}

#[test]
fn radial_energies_from_bessel_zeros() {
    let j11 = first_zero(1.0);
    assert!((radial_energy(2).unwrap() - j11 * j11).abs() < 1e-9);
    assert!((radial_energy(2).unwrap() - 14.6820).abs() < 1e-4);
    // J_{3/2} vanishes where tan x = x.
    let x = bisect(|t| t.tan() - t, PI + 0.1, 1.5 * PI - 1e-6);
    assert!((radial_energy(3).unwrap() - x * x).abs() < 1e-9);
    assert!((radial_energy(3).unwrap() - 20.1907).abs() < 1e-4);
    let j31 = first_zero(3.0);
    assert!((radial_energy(6).unwrap() - j31 * j31).abs() < 1e-9);
}

/// Position and deficiency of `j_{k/2,1}²` for even `k`, by counting the
/// disk spectrum `{j_{m,i}²}` with multiplicity two for `m ≥ 1`.
fn enumerated_deficiency(k: usize) -> (usize, usize) {
    let target = first_zero(k as f64 / 2.0).powi(2);
    let mut below = 0;
    for m in 0..=k {
        let mut x = 0.5 + m as f64;
        let f = |t: f64| series_j(m as f64, t);
        while x * x < target {
            if f(x) * f(x + 0.01) < 0.0 && bisect(f, x, x + 0.01).powi(2) < target * (1.0 - 1e-9) {
                below += if m == 0 { 1 } else { 2 };
            }
            x += 0.01;
        }
    }
    (below + 1, below + 1 - k)
}

#[test]
fn even_radial_deficiency_by_enumeration() {
    for k in [2, 4, 6, 8] {
        assert_eq!(radial_deficiency(k).unwrap(), enumerated_deficiency(k), "k = {k}");
    }
}

#[test]
fn alpha_match_increases_with_k() {
    let a6 = solve_alpha_match(6).unwrap();
    let a7 = solve_alpha_match(7).unwrap();
    assert!(a7 > a6 && a7 < 3.5, "{a6} {a7}");
}

#[test]
fn weighted_integral_matches_richardson_midpoint() {
    let (alpha, j) = (0.5657, bessel_zero(3.0, 1).unwrap());
    // Substituting r = s² removes the r^{2α−1} endpoint behaviour.
    let midpoint = |n: usize| {
        let h = 1.0 / n as f64;
        (0..n)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                2.0 * series_j(alpha, j * s * s).powi(2) / s
            })
            .sum::<f64>()
            * h
    };
    let (coarse, fine) = (midpoint(20_000), midpoint(40_000));
    let oracle = fine + (fine - coarse) / 3.0;
    let v = weighted_bessel_integral(alpha, j).unwrap();
    assert!(v > 0.0 && (v - oracle).abs() < 1e-7, "{v} vs {oracle}");
}

/// Cyclic Jacobi rotations on a dense symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    d.sort_by(f64::total_cmp);
    d
}

#[test]
fn dense_spectrum_matches_jacobi() {
    let n = 50;
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[i][j]);
    let id = Mat::<f64>::identity(n, n);
    let ours = sym_generalized_eigs(m.as_ref(), id.as_ref(), n).unwrap();
    for (x, y) in ours.iter().zip(jacobi_eigenvalues(a)) {
        assert!((x.value - y).abs() < 1e-9, "{} vs {y}", x.value);
    }
}

#[test]
fn gamma_pair_matches_a_grid_scan() {
    let alpha: f64 = 1.9;
    let lambda = 4.0 / (alpha * alpha) + 4.0;
    let cot = |x: f64| x.cos() / x.sin();
    // Scan γ1 in steps of 1e-4 with γ2 on the constraint circle.
    let residual = |g1: f64| {
        let g2 = (lambda - g1 * g1).sqrt();
        g1 * cot(g1 * alpha * PI / 2.0) - g2 * cot(g2 * PI / 2.0)
    };
    let (lo, hi) = (3.0 / alpha, (lambda - 1.0).sqrt());
    let steps = ((hi - lo) / 1e-4) as usize;
    let crossing = (1..steps)
        .map(|i| lo + i as f64 * 1e-4)
        .find(|&g| residual(g).is_finite() && residual(g + 1e-4).is_finite() && residual(g) * residual(g + 1e-4) <= 0.0)
        .expect("sign change");
    let g = solve_gamma_pair(alpha).unwrap();
    assert!((g.gamma1 - crossing).abs() < 1e-3);
    assert!((g.gamma2 - (lambda - crossing * crossing).sqrt()).abs() < 1e-3);
}

#[test]
fn disk_dilation_second_order_scaling() {
    let rep = hadamard_check(Family::DiskDilation, 2, 12).unwrap();
    for c in &rep.checks {
        assert!(c.formula_vs_reference().unwrap() < 1e-4, "{c:?}");
        assert!(c.formula_vs_fd() < 1e-4, "{c:?}");
    }
}
