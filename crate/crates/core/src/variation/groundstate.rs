//! Dirichlet ground states of the subdomains and their normal derivatives
//! on the interface arcs.

use std::f64::consts::PI;

use serde::Serialize;

use super::boundary::BoundaryField;
use crate::numerics::linalg::shift_invert_lowest;
use crate::numerics::{bessel_j, bessel_j_prime, bessel_zero};
use crate::partition::{unwrap_angle, AnalyticTag, ArcSide, Partition};
use crate::plap::assemble::{BoundaryMode, DiscreteOperator};
use crate::plap::mesh::Mesh;
use crate::tolerances::MULTIPLICITY;
use crate::{Error, Result};

/// How a ground state is represented.
#[derive(Clone, Debug)]
pub enum GroundStateForm {
    /// `c sin(π(x−x0)/w) sin(π(y−y0)/h)`.
    RectCell { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// `c J_ν(j r) sin(ν(θ−θ0))` with `ν = π/(θ1−θ0)`, `j = j_{ν,1}`.
    Sector { theta0: f64, theta1: f64, order: f64, j: f64 },
    /// Disk eigenfunction `c J_m(j_{m,n} r) cos(mθ)`.
    DiskBessel { m: u32, j: f64 },
    /// Spectral-element ground state of the subdomain.
    Discrete { op: Box<DiscreteOperator>, nodal: Vec<f64> },
}

/// L²-normalized, positive eigenfunction with its eigenvalue.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub subdomain: usize,
    pub lambda: f64,
    /// Normalization constant of the closed forms.
    pub scale: f64,
    pub form: GroundStateForm,
}

impl GroundState {
    pub fn rect_cell(subdomain: usize, x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let (w, h) = (x1 - x0, y1 - y0);
        GroundState {
            subdomain,
            lambda: (PI / w).powi(2) + (PI / h).powi(2),
            scale: 2.0 / (w * h).sqrt(),
            form: GroundStateForm::RectCell { x0, x1, y0, y1 },
        }
    }

    pub fn sector(subdomain: usize, theta0: f64, theta1: f64) -> Result<Self> {
        let beta = theta1 - theta0;
        let order = PI / beta;
        let j = bessel_zero(order, 1)?;
        let jn = bessel_j(order + 1.0, j)?;
        Ok(GroundState {
            subdomain,
            lambda: j * j,
            scale: 2.0 / (jn.abs() * beta.sqrt()),
            form: GroundStateForm::Sector { theta0, theta1, order, j },
        })
    }

    /// `J_m(j_{m,n} r) cos(mθ)` on the unit disk, normalized.
    pub fn disk_bessel(m: u32, n: usize) -> Result<Self> {
        let j = bessel_zero(m as f64, n)?;
        let jn = bessel_j(m as f64 + 1.0, j)?;
        let angular = if m == 0 { 2.0 * PI } else { PI };
        Ok(GroundState {
            subdomain: 0,
            lambda: j * j,
            scale: 1.0 / (angular * 0.5 * jn * jn).sqrt(),
            form: GroundStateForm::DiskBessel { m, j },
        })
    }

    /// Ground state of subdomain `sub` computed on its own mesh.
    pub fn discrete(p: &Partition, sub: usize, n: usize) -> Result<Self> {
        let op = DiscreteOperator::assemble(&Mesh::for_subdomain(p, sub, n)?, BoundaryMode::Eigen)?;
        let pairs = shift_invert_lowest(op.free_stiffness().as_ref(), op.free_mass(), 2, 0.0)?;
        if pairs.len() > 1 && pairs[1].value - pairs[0].value <= MULTIPLICITY * (1.0 + pairs[0].value) {
            return Err(Error::DegenerateGroundState(sub));
        }
        let mut v = pairs[0].vector.clone();
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let nodal = op.expand(&v);
        Ok(GroundState { subdomain: sub, lambda: pairs[0].value, scale: 1.0, form: GroundStateForm::Discrete { op: Box::new(op), nodal } })
    }

    /// Value and gradient at `p`. Discrete states interpolate in the block
    /// containing `probe`.
    pub fn eval(&self, p: [f64; 2], probe: [f64; 2]) -> (f64, [f64; 2]) {
        let c = self.scale;
        match &self.form {
            GroundStateForm::RectCell { x0, x1, y0, y1 } => {
                let (kx, ky) = (PI / (x1 - x0), PI / (y1 - y0));
                let (sx, cx) = (kx * (p[0] - x0)).sin_cos();
                let (sy, cy) = (ky * (p[1] - y0)).sin_cos();
                (c * sx * sy, [c * kx * cx * sy, c * ky * sx * cy])
            }
            GroundStateForm::Sector { theta0, order, j, .. } => {
                let r = p[0].hypot(p[1]);
                if r == 0.0 {
                    return (0.0, [0.0, 0.0]);
                }
                let th = unwrap_angle(p[1].atan2(p[0]), *theta0 - 1e-12) - theta0;
                let (s, co) = (order * th).sin_cos();
                let jv = bessel_j(*order, j * r).unwrap_or(0.0);
                let jp = bessel_j_prime(*order, j * r).unwrap_or(0.0);
                let dr = c * j * jp * s;
                let dt = c * jv * order * co / r;
                polar_to_cartesian(p, r, c * jv * s, dr, dt)
            }
            GroundStateForm::DiskBessel { m, j } => {
                let r = p[0].hypot(p[1]);
                let th = p[1].atan2(p[0]);
                let mf = *m as f64;
                let (s, co) = (mf * th).sin_cos();
                let jv = bessel_j(mf, j * r).unwrap_or(0.0);
                if r == 0.0 {
                    let g = if *m == 1 { c * j * 0.5 } else { 0.0 };
                    return (c * jv, [g, 0.0]);
                }
                let jp = bessel_j_prime(mf, j * r).unwrap_or(0.0);
                polar_to_cartesian(p, r, c * jv * co, c * j * jp * co, -c * jv * mf * s / r)
            }
            GroundStateForm::Discrete { op, nodal } => op.eval_grad_at(nodal, p, probe).unwrap_or((0.0, [0.0, 0.0])),
        }
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        self.eval(p, p).0
    }

    /// `∂ψ/∂n` for the unit vector `n`, evaluated from the side `probe`.
    pub fn normal_derivative(&self, p: [f64; 2], n: [f64; 2], probe: [f64; 2]) -> f64 {
        let g = self.eval(p, probe).1;
        g[0] * n[0] + g[1] * n[1]
    }
}

fn polar_to_cartesian(p: [f64; 2], r: f64, v: f64, dr: f64, dt: f64) -> (f64, [f64; 2]) {
    let (c, s) = (p[0] / r, p[1] / r);
    (v, [dr * c - dt * s, dr * s + dt * c])
}

/// Ground states of every subdomain with `∂ψ/∂ν` (outward for the subdomain
/// on that side) sampled on each interface arc.
#[derive(Clone, Debug)]
pub struct GroundStateData {
    pub states: Vec<GroundState>,
    /// `∂ψ_L/∂ν_L` for the subdomain on the left of each arc.
    pub left: BoundaryField,
    /// `∂ψ_R/∂ν_R` for the subdomain on the right.
    pub right: BoundaryField,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundStateSummary {
    pub subdomain: usize,
    pub lambda: f64,
    pub analytic: bool,
}

impl GroundStateData {
    pub fn side(&self, side: ArcSide) -> &BoundaryField {
        match side {
            ArcSide::Left => &self.left,
            ArcSide::Right => &self.right,
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.lambda).collect()
    }

    /// `max λ₁ − min λ₁`.
    pub fn equipartition_defect(&self) -> f64 {
        let l = self.lambdas();
        l.iter().cloned().fold(f64::MIN, f64::max) - l.iter().cloned().fold(f64::MAX, f64::min)
    }

    pub fn summary(&self) -> Vec<GroundStateSummary> {
        self.states
            .iter()
            .map(|s| GroundStateSummary {
                subdomain: s.subdomain,
                lambda: s.lambda,
                analytic: !matches!(s.form, GroundStateForm::Discrete { .. }),
            })
            .collect()
    }
}

/// Samples per arc used for `∂ψ/∂ν` and the fields derived from it.
pub const ARC_SAMPLES: usize = 48;

/// Ground-state data with closed forms where the subdomain carries an
/// analytic tag and a spectral-element solve with `n` nodes per block
/// direction otherwise.
pub fn groundstate_data(p: &Partition, n: usize) -> Result<GroundStateData> {
    let states = p
        .subdomains
        .iter()
        .map(|s| match s.analytic_tag {
            Some(AnalyticTag::RectCell { x0, x1, y0, y1 }) => Ok(GroundState::rect_cell(s.id, x0, x1, y0, y1)),
            Some(AnalyticTag::Sector { theta0, theta1 }) => GroundState::sector(s.id, theta0, theta1),
            None => GroundState::discrete(p, s.id, n),
        })
        .collect::<Result<Vec<_>>>()?;
    let eps = 1e-7 * p.domain.diameter();
    let sample_side = |side: ArcSide| {
        BoundaryField::sample(p, ARC_SAMPLES, |arc, t, point| {
            let a = &p.interfaces[arc];
            let nl = a.geometry.left_normal();
            let (sub, sgn) = match side {
                ArcSide::Left => (a.left, 1.0),
                ArcSide::Right => (a.right, -1.0),
            };
            // Inward normal of this side is sgn·nl; outward is its negative.
            let inner = a.geometry.point(t * (1.0 - 1e-6));
            let probe = [inner[0] + sgn * eps * nl[0], inner[1] + sgn * eps * nl[1]];
            states[sub].normal_derivative(point, [-sgn * nl[0], -sgn * nl[1]], probe)
        })
    };
    let left = sample_side(ArcSide::Left)?;
    let right = sample_side(ArcSide::Right)?;
    Ok(GroundStateData { states, left, right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_radial_partition, rect_cross};

    #[test]
    fn closed_forms_are_normalized() {
        let g = GroundState::sector(0, 0.3, 0.3 + PI / 3.0).unwrap();
        let d = GroundState::disk_bessel(2, 1).unwrap();
        // Polar midpoint rule.
        let (nr, nt) = (400, 400);
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            for k in 0..nt {
                let th = (k as f64 + 0.5) / nt as f64;
                let p1 = [r * (0.3 + th * PI / 3.0).cos(), r * (0.3 + th * PI / 3.0).sin()];
                s1 += g.value(p1).powi(2) * r * (PI / 3.0) / (nr * nt) as f64;
                let p2 = [r * (th * 2.0 * PI).cos(), r * (th * 2.0 * PI).sin()];
                s2 += d.value(p2).powi(2) * r * 2.0 * PI / (nr * nt) as f64;
            }
        }
        assert!((s1 - 1.0).abs() < 1e-3, "{s1}");
        assert!((s2 - 1.0).abs() < 1e-3, "{s2}");
    }

    #[test]
    fn normal_derivatives_vanish_at_corners() {
        for p in [rect_cross(1.0).unwrap(), build_radial_partition(5).unwrap()] {
            let d = groundstate_data(&p, 12).unwrap();
            for f in [&d.left, &d.right] {
                for a in &f.arcs {
                    let n = a.values.len();
                    let scale = a.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    assert!(a.values[0].abs() < 1e-9 * scale.max(1.0));
                    assert!(a.values[n - 1].abs() < 1e-9 * scale.max(1.0));
                }
            }
        }
    }
}
