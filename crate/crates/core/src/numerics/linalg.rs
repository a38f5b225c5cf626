//! Dense symmetric generalized eigenproblems `A v = λ B v` with `B` positive
//! definite, plus a few helpers built on the same factorizations.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use serde::Serialize;

use crate::{Error, Result};

/// One eigenpair with `vᵀ B v = 1` and residual `‖A v − λ B v‖₂ / ‖v‖₂`.
#[derive(Clone, Debug, Serialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Lowest `count` eigenpairs of `A v = λ B v`. Fails with
/// [`Error::NotPositiveDefinite`] when `B` has no Cholesky factor.
pub fn sym_generalized_eigs(a: MatRef<'_, f64>, b: MatRef<'_, f64>, count: usize) -> Result<Vec<EigenPair>> {
    check_square(a, b.nrows())?;
    let n = a.nrows();
    let llt = b.llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?;
    let l = llt.L();
    // C = L⁻¹ A L⁻ᵀ, formed from two triangular solves.
    let mut x = a.to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(l, x.as_mut(), faer::Par::Seq);
    let mut c = x.transpose().to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(l, c.as_mut(), faer::Par::Seq);
    symmetrize(&mut c);
    let evd = c.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
    let count = count.min(n);
    let mut y = evd.U().subcols(0, count).to_owned();
    faer::linalg::triangular_solve::solve_upper_triangular_in_place(l.transpose(), y.as_mut(), faer::Par::Seq);
    let values: Vec<f64> = (0..count).map(|i| evd.S().column_vector()[i]).collect();
    Ok(finish(a, |v: &[f64], out: &mut [f64]| matvec(b, v, out), &values, &y))
}

/// Same as [`sym_generalized_eigs`] for a diagonal `B` given by its entries.
pub fn sym_diag_generalized_eigs(a: MatRef<'_, f64>, b: &[f64], count: usize) -> Result<Vec<EigenPair>> {
    let (c, s) = scaled(a, b)?;
    let evd = c.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
    let count = count.min(b.len());
    let y = Mat::<f64>::from_fn(b.len(), count, |i, j| evd.U()[(i, j)] * s[i]);
    let values: Vec<f64> = (0..count).map(|i| evd.S().column_vector()[i]).collect();
    Ok(finish(
        a,
        |v: &[f64], out: &mut [f64]| {
            for ((o, v), b) in out.iter_mut().zip(v).zip(b) {
                *o = v * b;
            }
        },
        &values,
        &y,
    ))
}

/// All eigenvalues of `A v = λ B v` for diagonal `B`, ascending.
pub fn sym_diag_generalized_eigvals(a: MatRef<'_, f64>, b: &[f64]) -> Result<Vec<f64>> {
    let (c, _) = scaled(a, b)?;
    c.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))
}

/// Number of eigenvalues of `A v = λ B v` strictly below `sigma`, from the
/// inertia of `A − σB` (Sylvester's law).
pub fn count_below(a: MatRef<'_, f64>, b: &[f64], sigma: f64) -> Result<usize> {
    check_square(a, b.len())?;
    let mut m = a.to_owned();
    for (i, bi) in b.iter().enumerate() {
        m[(i, i)] -= sigma * bi;
    }
    Ok(negative_inertia(m.as_ref()))
}

/// Number of negative eigenvalues of a symmetric matrix via `LBLᵀ`.
pub fn negative_inertia(m: MatRef<'_, f64>) -> usize {
    let f = m.lblt(Side::Lower);
    let d = f.B_diag();
    let s = f.B_subdiag();
    let n = m.nrows();
    let mut neg = 0;
    let mut i = 0;
    while i < n {
        if i + 1 < n && s[i] != 0.0 {
            let (a, b, c) = (d[i], s[i], d[i + 1]);
            let det = a * c - b * b;
            if det < 0.0 {
                neg += 1;
            } else if a + c < 0.0 {
                neg += 2;
            }
            i += 2;
        } else {
            if d[i] < 0.0 {
                neg += 1;
            }
            i += 1;
        }
    }
    neg
}

/// Eigenvalues and orthonormal eigenvectors of a small symmetric matrix,
/// ascending.
pub fn sym_eigen(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let mut c = m.to_owned();
    symmetrize(&mut c);
    let evd = c.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
    let vals = (0..c.nrows()).map(|i| evd.S().column_vector()[i]).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Solves `A x = rhs` by partial-pivot LU.
pub fn lu_solve(a: MatRef<'_, f64>, rhs: &[f64]) -> Vec<f64> {
    let lu = a.partial_piv_lu();
    let r = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    let x = lu.solve(&r);
    (0..rhs.len()).map(|i| x[(i, 0)]).collect()
}

/// Lowest `count` eigenpairs of `A v = λ B v` (diagonal `B`) by block
/// inverse iteration on `A − σB` with Rayleigh–Ritz. One `LBLᵀ`
/// factorization serves both the solves and an inertia check that no
/// eigenvalue below `σ` was missed. Convergence is fastest with `σ` at or
/// just below the bottom of the spectrum.
pub fn shift_invert_lowest(a: MatRef<'_, f64>, b: &[f64], count: usize, sigma: f64) -> Result<Vec<EigenPair>> {
    check_square(a, b.len())?;
    let n = b.len();
    if b.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    let count = count.min(n);
    let mut shifted = a.to_owned();
    for (i, bi) in b.iter().enumerate() {
        shifted[(i, i)] -= sigma * bi;
    }
    let below = negative_inertia(shifted.as_ref());
    let block = (count.max(below) + 6).min(n);
    let f = shifted.lblt(Side::Lower);
    let mut v = Mat::<f64>::from_fn(n, block, |i, j| (((i + 1) * (j + 3) * 7919) % 1013) as f64 / 1013.0 - 0.5);
    let mut values = vec![0.0; block];
    for iter in 0..300 {
        let rhs = Mat::<f64>::from_fn(n, block, |i, j| v[(i, j)] * b[i]);
        let w = f.solve(&rhs);
        // Rayleigh-Ritz on span(w), B-orthonormalized through the small Gram matrix.
        let av = a * &w;
        let kk = w.transpose() * &av;
        let mm = Mat::<f64>::from_fn(block, block, |p, q| (0..n).map(|i| w[(i, p)] * w[(i, q)] * b[i]).sum());
        let (mv, mu) = sym_eigen(mm.as_ref())?;
        let floor = mv.last().copied().unwrap_or(1.0) * 1e-14;
        let keep: Vec<usize> = (0..block).filter(|&i| mv[i] > floor).collect();
        let t = Mat::<f64>::from_fn(block, keep.len(), |i, j| mu[(i, keep[j])] / mv[keep[j]].sqrt());
        let kr = t.transpose() * &kk * &t;
        let (rv, ru) = sym_eigen(kr.as_ref())?;
        let coeff = &t * &ru;
        let next = &w * &coeff;
        let watch = count.max(below).min(rv.len());
        let change = rv.iter().zip(&values).take(watch).map(|(x, y)| (x - y).abs() / (1.0 + x.abs())).fold(0.0, f64::max);
        // Eigenvalues settle long before the vectors do, so also watch residuals.
        let anext = &av * &coeff;
        let residual = (0..watch)
            .map(|j| {
                let r2: f64 = (0..n).map(|i| (anext[(i, j)] - rv[j] * b[i] * next[(i, j)]).powi(2)).sum();
                let v2: f64 = (0..n).map(|i| next[(i, j)].powi(2)).sum();
                (r2 / v2).sqrt() / (1.0 + rv[j].abs())
            })
            .fold(0.0, f64::max);
        values = rv;
        v = Mat::<f64>::from_fn(n, block, |i, j| if j < next.ncols() { next[(i, j)] } else { 0.0 });
        if iter > 2 && change < 1e-12 && residual < 1e-10 {
            break;
        }
    }
    let computed_below = values.iter().filter(|&&x| x < sigma).count();
    if computed_below != below {
        return Err(Error::Numerical(format!("shift-invert found {computed_below} eigenvalues below σ = {sigma}, inertia says {below}")));
    }
    let y = v.subcols(0, count).to_owned();
    let vals = values[..count].to_vec();
    Ok(finish(
        a,
        |x: &[f64], out: &mut [f64]| {
            for ((o, x), b) in out.iter_mut().zip(x).zip(b) {
                *o = x * b;
            }
        },
        &vals,
        &y,
    ))
}

pub(crate) fn matvec(a: MatRef<'_, f64>, v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for j in 0..a.ncols() {
        let vj = v[j];
        if vj == 0.0 {
            continue;
        }
        let col = a.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * vj;
        }
    }
}

fn check_square(a: MatRef<'_, f64>, n: usize) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() != n {
        return Err(Error::Domain(format!("matrix shapes {}x{} and {n}", a.nrows(), a.ncols())));
    }
    Ok(())
}

fn symmetrize(c: &mut Mat<f64>) {
    let n = c.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
}

fn scaled(a: MatRef<'_, f64>, b: &[f64]) -> Result<(Mat<f64>, Vec<f64>)> {
    check_square(a, b.len())?;
    if b.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    let s: Vec<f64> = b.iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut c = Mat::<f64>::from_fn(b.len(), b.len(), |i, j| a[(i, j)] * s[i] * s[j]);
    symmetrize(&mut c);
    Ok((c, s))
}

fn finish<F: Fn(&[f64], &mut [f64])>(a: MatRef<'_, f64>, bmul: F, values: &[f64], y: &Mat<f64>) -> Vec<EigenPair> {
    let n = y.nrows();
    let mut av = vec![0.0; n];
    let mut bv = vec![0.0; n];
    values
        .iter()
        .enumerate()
        .map(|(k, &value)| {
            let mut v: Vec<f64> = (0..n).map(|i| y[(i, k)]).collect();
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-6) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            matvec(a, &v, &mut av);
            bmul(&v, &mut bv);
            let r: f64 = av.iter().zip(&bv).map(|(p, q)| (p - value * q).powi(2)).sum::<f64>().sqrt();
            let vn: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            EigenPair { value, vector: v, residual: r / vn }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> Mat<f64> {
        Mat::from_fn(n, n, |i, j| if i == j { 2.0 } else if i.abs_diff(j) == 1 { -1.0 } else { 0.0 })
    }

    #[test]
    fn diagonal_b_matches_closed_form() {
        let n = 40;
        let a = laplacian_1d(n);
        let b = vec![2.0; n];
        let pairs = sym_diag_generalized_eigs(a.as_ref(), &b, 5).unwrap();
        for (k, p) in pairs.iter().enumerate() {
            let exact = (2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos()) / 2.0;
            assert!((p.value - exact).abs() < 1e-12);
            assert!(p.residual < 1e-12);
            let bn: f64 = p.vector.iter().map(|x| 2.0 * x * x).sum();
            assert!((bn - 1.0).abs() < 1e-12);
            assert!(p.vector.iter().find(|x| x.abs() > 1e-6).unwrap() > &0.0);
        }
    }

    #[test]
    fn general_b_agrees_with_diagonal_path() {
        let n = 25;
        let a = laplacian_1d(n);
        let bd: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let b = Mat::<f64>::from_fn(n, n, |i, j| if i == j { bd[i] } else { 0.0 });
        let p1 = sym_generalized_eigs(a.as_ref(), b.as_ref(), 4).unwrap();
        let p2 = sym_diag_generalized_eigs(a.as_ref(), &bd, 4).unwrap();
        for (x, y) in p1.iter().zip(&p2) {
            assert!((x.value - y.value).abs() < 1e-12);
            assert!(x.residual < 1e-12);
        }
        assert_eq!(count_below(a.as_ref(), &bd, p2[2].value + 1e-9).unwrap(), 3);
        let p3 = shift_invert_lowest(a.as_ref(), &bd, 4, p2[3].value * 1.5).unwrap();
        for (x, y) in p3.iter().zip(&p2) {
            assert!((x.value - y.value).abs() < 1e-10, "{} {}", x.value, y.value);
            assert!(x.residual < 1e-8, "residual {}", x.residual);
        }
    }

    #[test]
    fn indefinite_b_is_rejected() {
        let a = laplacian_1d(3);
        let b = Mat::<f64>::from_fn(3, 3, |i, j| if i == j { if i == 1 { -1.0 } else { 1.0 } } else { 0.0 });
        assert!(matches!(sym_generalized_eigs(a.as_ref(), b.as_ref(), 2), Err(Error::NotPositiveDefinite)));
    }
}
