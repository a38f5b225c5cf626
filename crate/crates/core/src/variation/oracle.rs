//! Shape-derivative formulas checked against finite differences of the
//! discrete eigenvalue on mapped meshes.

use std::f64::consts::PI;

use serde::Serialize;

use super::criticality::criticality;
use super::field::{AnalyticField, DeformationField, FieldTerm};
use super::groundstate::{groundstate_data, GroundState};
use super::hadamard::{hadamard_first, hadamard_on_pieces, width_stretch_derivative, BoundaryPiece};
use super::second::{fd_oracle, second_variation_c3, Acceleration};
use super::tangent::project_equipartition_tangent;
use crate::partition::{build_rect_partition, cross_rule, orient_interfaces, rect_cross, OrientationRule};
use crate::plap::assemble::{BoundaryMode, DiscreteOperator};
use crate::plap::mesh::Mesh;
use crate::{Error, Result};

/// Deformation families with a closed-form or structural reference value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `(0, aπ) × (0, π)` stretched in `x`: `λ' = −2/a³`.
    RectWidth { a: f64 },
    /// The unit disk under `X = p`: `λ' = −2λ`, `λ'' = 6λ`.
    DiskDilation,
    /// A shear of the square cross partition projected onto equipartition
    /// tangents: every subdomain has `λ' = 0` at the critical partition.
    CrossShear,
}

impl Family {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "rect-width" => Ok(Family::RectWidth { a: 1.3 }),
            "disk-dilation" => Ok(Family::DiskDilation),
            "cross-shear" => Ok(Family::CrossShear),
            _ => Err(Error::Domain(format!("unknown family '{name}' (rect-width, disk-dilation, cross-shear)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::RectWidth { .. } => "rect-width",
            Family::DiskDilation => "disk-dilation",
            Family::CrossShear => "cross-shear",
        }
    }
}

/// One derivative compared three ways.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeCheck {
    pub label: String,
    /// Boundary formula (Hadamard or second-variation).
    pub formula: f64,
    pub finite_difference: f64,
    /// Richardson error estimate of the finite difference.
    pub fd_error: f64,
    pub reference: Option<f64>,
}

impl DerivativeCheck {
    /// `|formula − fd| / max(|fd|, 1)`.
    pub fn formula_vs_fd(&self) -> f64 {
        (self.formula - self.finite_difference).abs() / self.finite_difference.abs().max(1.0)
    }

    /// Relative deviation from the reference, or the absolute one when it is zero.
    pub fn formula_vs_reference(&self) -> Option<f64> {
        self.reference.map(|r| (self.formula - r).abs() / if r == 0.0 { 1.0 } else { r.abs() })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HadamardCheckReport {
    pub family: Family,
    pub order: u8,
    pub n: usize,
    pub checks: Vec<DerivativeCheck>,
}

/// Derivative of order `order` along `family`, from the boundary formula and
/// from finite differences with `n` nodes per block.
pub fn hadamard_check(family: Family, order: u8, n: usize) -> Result<HadamardCheckReport> {
    if !(1..=2).contains(&order) {
        return Err(Error::Domain(format!("order must be 1 or 2, got {order}")));
    }
    let checks = match (family, order) {
        (Family::RectWidth { a }, 1) => vec![rect_width(a, n)?],
        (Family::DiskDilation, _) => vec![disk_dilation(order, n)?],
        (Family::CrossShear, 1) => cross_shear(n)?,
        _ => return Err(Error::Domain(format!("family {} supports order 1 only", family.name()))),
    };
    Ok(HadamardCheckReport { family, order, n, checks })
}

fn rect_width(a: f64, n: usize) -> Result<DerivativeCheck> {
    let p = build_rect_partition(a, &[])?;
    let frame = orient_interfaces(&p, &OrientationRule::LeftNormal)?;
    let gs = groundstate_data(&p, n)?;
    let field = AnalyticField::new(vec![FieldTerm::Affine { b: [0.0, 0.0], a: [[1.0 / a, 0.0], [0.0, 0.0]] }]);
    let formula = hadamard_first(&p, &gs, &frame, &DeformationField::analytic(field.clone()))?[0];
    let base = Mesh::rectangle(a * PI, PI, 1, 1, n);
    let fd = fd_oracle(|t| DiscreteOperator::assemble(&base.mapped(&field, t), BoundaryMode::Eigen), 1, 0)?;
    Ok(DerivativeCheck {
        label: format!("width a = {a}"),
        formula,
        finite_difference: fd.value,
        fd_error: fd.error,
        reference: Some(width_stretch_derivative(a)),
    })
}

fn disk_dilation(order: u8, n: usize) -> Result<DerivativeCheck> {
    let st = GroundState::disk_bessel(0, 1)?;
    let field = AnalyticField::dilation([0.0, 0.0]);
    let (formula, reference) = if order == 1 {
        let circle = [BoundaryPiece::Arc { r: 1.0, t0: 0.0, t1: 2.0 * PI, sign: 1.0 }];
        let d = hadamard_on_pieces(&st, &circle, 1e-9, |pt, nu| pt[0] * nu[0] + pt[1] * nu[1])?;
        (d, -2.0 * st.lambda)
    } else {
        (second_variation_c3(&st, &field, &Acceleration::LineFamily, n)?.value, 6.0 * st.lambda)
    };
    let base = Mesh::disk(n, &[0.5])?;
    let fd = fd_oracle(|t| DiscreteOperator::assemble(&base.mapped(&field, t), BoundaryMode::Eigen), order, 0)?;
    Ok(DerivativeCheck {
        label: format!("dilation, order {order}"),
        formula,
        finite_difference: fd.value,
        fd_error: fd.error,
        reference: Some(reference),
    })
}

/// The shear `X = 0.3 (sin x sin 2y, 0)` on the square cross partition.
pub fn cross_shear_field() -> AnalyticField {
    AnalyticField::new(vec![FieldTerm::TrigProduct { coeff: [0.3, 0.0], freq: [[1.0, 2.0], [0.0, 0.0]], phase: [[0.0; 2]; 2] }])
}

fn cross_shear(n: usize) -> Result<Vec<DerivativeCheck>> {
    let p = rect_cross(1.0)?;
    let frame = orient_interfaces(&p, &cross_rule(1.0))?;
    let gs = groundstate_data(&p, n)?;
    let crit = criticality(&p, &gs)?;
    crit.require_critical()?;
    let proj = project_equipartition_tangent(&DeformationField::analytic(cross_shear_field()), &p, &frame, &gs, &crit)?;
    let formula = hadamard_first(&p, &gs, &frame, &proj.field)?;
    let mut out = Vec::with_capacity(formula.len());
    for (sub, &f) in formula.iter().enumerate() {
        let base = Mesh::for_subdomain(&p, sub, n)?;
        let fd = fd_oracle(|t| DiscreteOperator::assemble(&base.mapped(&proj.field.field, t), BoundaryMode::Eigen), 1, 0)?;
        out.push(DerivativeCheck {
            label: format!("subdomain {sub}"),
            formula: f,
            finite_difference: fd.value,
            fd_error: fd.error,
            reference: Some(0.0),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_family_agrees() {
        let r = hadamard_check(Family::RectWidth { a: 1.3 }, 1, 12).unwrap();
        let c = &r.checks[0];
        assert!(c.formula_vs_reference().unwrap() < 1e-8, "{c:?}");
        assert!(c.formula_vs_fd() < 1e-6, "{c:?}");
    }
}
