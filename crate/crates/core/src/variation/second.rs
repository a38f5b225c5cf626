//! Second shape derivative on the unit disk and a finite-difference oracle
//! for eigenvalues of deformed domains.

use std::f64::consts::TAU;

use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::Serialize;

use super::field::AnalyticField;
use super::groundstate::{GroundState, GroundStateForm};
use crate::numerics::linalg::shift_invert_lowest;
use crate::plap::assemble::{BoundaryMode, DiscreteOperator};
use crate::plap::mesh::Mesh;
use crate::tolerances::FD_STEPS;
use crate::{Error, Result};

/// `X'` in the second-variation formula.
#[derive(Clone, Debug)]
pub enum Acceleration {
    /// Straight-line family `id + tX`: `X' = −(DX) X`.
    LineFamily,
    Zero,
    Field(AnalyticField),
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondVariation {
    pub value: f64,
    /// `2 ∫ (|∇w|² − λ w²)`.
    pub volume_term: f64,
    pub boundary_term: f64,
    pub lambda: f64,
}

/// Trapezoid points on the unit circle.
pub const CIRCLE_POINTS: usize = 256;

/// `λ''` of a simple disk eigenvalue along the deformation `X`.
///
/// `w` solves `Δw + λw = −λ'ψ`, `w = −(X·ν) ∂ψ/∂ν` on the circle, `∫wψ = 0`
/// (spectral elements with `n` nodes per block direction); the remaining
/// terms are boundary integrals of closed-form data.
pub fn second_variation_c3(state: &GroundState, x: &AnalyticField, accel: &Acceleration, n: usize) -> Result<SecondVariation> {
    let GroundStateForm::DiskBessel { m, .. } = state.form else {
        return Err(Error::Domain("second variation needs a disk eigenfunction".into()));
    };
    if m != 0 {
        return Err(Error::Domain("second variation needs a simple eigenvalue (m = 0)".into()));
    }
    let lambda = state.lambda;
    let dpsi = |p: [f64; 2]| state.normal_derivative(p, p, [0.999 * p[0], 0.999 * p[1]]);
    let xn = |p: [f64; 2]| {
        let v = x.value(p);
        v[0] * p[0] + v[1] * p[1]
    };

    let op = DiscreteOperator::assemble(&Mesh::disk(n, &[0.5])?, BoundaryMode::Helmholtz)?;
    let (nf, nb) = (op.n_free, op.n_bound);
    // Discrete eigenvector closest to λ.
    let pairs = shift_invert_lowest(op.free_stiffness().as_ref(), op.free_mass(), 6, 0.0)?;
    let pair = pairs
        .iter()
        .min_by(|a, b| (a.value - lambda).abs().total_cmp(&(b.value - lambda).abs()))
        .ok_or_else(|| Error::Numerical("no eigenpairs".into()))?;
    let (lh, psi) = (pair.value, &pair.vector);
    let g = op.bound_values(|p| {
        let r = p[0].hypot(p[1]);
        let q = [p[0] / r, p[1] / r];
        -xn(q) * dpsi(q)
    });
    let mut b = Mat::<f64>::zeros(nf + 1, nf + 1);
    for j in 0..nf {
        for i in 0..nf {
            b[(i, j)] = op.stiffness[(i, j)];
        }
        b[(j, j)] -= lh * op.mass[j];
        b[(j, nf)] = op.mass[j] * psi[j];
        b[(nf, j)] = op.mass[j] * psi[j];
    }
    let rhs = Mat::<f64>::from_fn(nf + 1, 1, |i, _| {
        if i == nf {
            0.0
        } else {
            -(0..nb).map(|k| op.stiffness[(i, nf + k)] * g[k]).sum::<f64>()
        }
    });
    let sol = b.partial_piv_lu().solve(&rhs);
    let mut w: Vec<f64> = (0..nf).map(|i| sol[(i, 0)]).collect();
    w.extend(&g);
    // The multiplier row carries the −λ'ψ source; it does not enter the
    // energy because w ⟂ ψ.
    let volume_term = 2.0 * op.energy(&w, &w, lh);

    let mut boundary_term = 0.0;
    for k in 0..CIRCLE_POINTS {
        let th = TAU * k as f64 / CIRCLE_POINTS as f64;
        let (s, c) = th.sin_cos();
        let p = [c, s];
        let nu = p;
        let tan = [-s, c];
        let xv = x.value(p);
        let dx = x.jacobian(p);
        let xdotn = xv[0] * nu[0] + xv[1] * nu[1];
        let xdott = xv[0] * tan[0] + xv[1] * tan[1];
        let acc = match accel {
            Acceleration::LineFamily => x.line_family_acceleration(p),
            Acceleration::Zero => [0.0, 0.0],
            Acceleration::Field(f) => f.value(p),
        };
        // (∇_ν X)·ν and the tangential derivative of X·ν.
        let dnu = [dx[0][0] * nu[0] + dx[0][1] * nu[1], dx[1][0] * nu[0] + dx[1][1] * nu[1]];
        let dtan = [dx[0][0] * tan[0] + dx[0][1] * tan[1], dx[1][0] * tan[0] + dx[1][1] * tan[1]];
        let nu_dx_nu = dnu[0] * nu[0] + dnu[1] * nu[1];
        let dt_xn = dtan[0] * nu[0] + dtan[1] * nu[1] + xv[0] * tan[0] + xv[1] * tan[1];
        let d = dpsi(p);
        let integrand = d * d
            * (-(acc[0] * nu[0] + acc[1] * nu[1]) - nu_dx_nu * xdotn + xdott * dt_xn + xdotn * xdotn);
        boundary_term += integrand * TAU / CIRCLE_POINTS as f64;
    }
    Ok(SecondVariation { value: volume_term + boundary_term, volume_term, boundary_term, lambda })
}

#[derive(Clone, Debug, Serialize)]
pub struct FdEstimate {
    pub value: f64,
    /// `|D(h/2) − D(h)| / 3`.
    pub error: f64,
    pub steps: [f64; 2],
    pub coarse: f64,
    pub fine: f64,
    /// Smallest eigenvector overlap seen in the window.
    pub min_overlap: f64,
}

/// Central finite differences of eigenvalue `index` of the operators
/// `family(t)` at `t = 0`, Richardson-extrapolated over [`FD_STEPS`].
/// All operators must share one unknown layout (mapped meshes do).
pub fn fd_oracle(family: impl Fn(f64) -> Result<DiscreteOperator>, order: u8, index: usize) -> Result<FdEstimate> {
    if !(1..=2).contains(&order) {
        return Err(Error::Domain(format!("finite-difference order must be 1 or 2, got {order}")));
    }
    let base = family(0.0)?;
    let base_pair = shift_invert_lowest(base.free_stiffness().as_ref(), base.free_mass(), index + 1, 0.0)?.remove(index);
    let mut min_overlap = 1.0f64;
    let mut eig = |t: f64| -> Result<f64> {
        let op = family(t)?;
        let pairs = shift_invert_lowest(op.free_stiffness().as_ref(), op.free_mass(), index + 3, 0.0)?;
        // Follow the branch with the largest overlap with the base vector.
        let (best, ov) = pairs
            .iter()
            .map(|pp| (pp, op.mass_inner(&pp.vector, &base_pair.vector).abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::Numerical("no eigenpairs".into()))?;
        min_overlap = min_overlap.min(ov);
        if ov < 0.9 {
            return Err(Error::CrossingDetected { t, overlap: ov });
        }
        Ok(best.value)
    };
    let l0 = base_pair.value;
    let mut d = [0.0; 2];
    for (k, &h) in FD_STEPS.iter().enumerate() {
        let (lp, lm) = (eig(h)?, eig(-h)?);
        d[k] = if order == 1 { (lp - lm) / (2.0 * h) } else { (lp - 2.0 * l0 + lm) / (h * h) };
    }
    Ok(FdEstimate {
        value: (4.0 * d[1] - d[0]) / 3.0,
        error: (d[1] - d[0]).abs() / 3.0,
        steps: FD_STEPS,
        coarse: d[0],
        fine: d[1],
        min_overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_second_variation() {
        let st = GroundState::disk_bessel(0, 1).unwrap();
        let x = AnalyticField::dilation([0.0, 0.0]);
        let v = second_variation_c3(&st, &x, &Acceleration::LineFamily, 14).unwrap();
        assert!((v.value - 6.0 * st.lambda).abs() < 1e-6 * st.lambda, "{v:?}");
    }
}
