//! Projection of deformations onto the tangent space of equipartitions.

use serde::Serialize;

use super::criticality::CriticalityData;
use super::field::{poly_profile, DeformationField, FieldTerm};
use super::groundstate::{GroundStateData, ARC_SAMPLES};
use super::hadamard::{interface_integrals, normal_trace};
use crate::numerics::linalg::lu_solve;
use crate::partition::{NormalFrame, Partition};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct TangentProjection {
    pub field: DeformationField,
    /// Amplitudes of the correcting bumps, one per spanning-tree arc.
    pub coefficients: Vec<f64>,
    pub integrals_before: Vec<f64>,
    pub integrals_after: Vec<f64>,
}

/// Power of the polynomial profile of the correcting pushes.
pub const BUMP_POWER: u32 = 4;

/// Normal push of arc `arc` with trace `(1 − t²)⁴` along it, unit amplitude.
/// The trace is polynomial, so the boundary quadratures integrate it exactly.
pub fn arc_bump(p: &Partition, arc: usize) -> FieldTerm {
    let g = &p.interfaces[arc].geometry;
    let len = g.length();
    FieldTerm::ArcNormalPolynomial {
        center: g.midpoint(),
        tangent: g.tangent(),
        half_length: 0.5 * len,
        width: len,
        amplitude: 1.0,
        power: BUMP_POWER,
    }
}

fn with_term(x: &DeformationField, p: &Partition, frame: &NormalFrame, arc: usize, c: f64) -> Result<DeformationField> {
    let mut out = x.clone();
    let FieldTerm::ArcNormalPolynomial { center, tangent, half_length, width, power, .. } = arc_bump(p, arc) else {
        unreachable!()
    };
    out.field.terms.push(FieldTerm::ArcNormalPolynomial { center, tangent, half_length, width, amplitude: c, power });
    if let Some(trace) = &x.normal_trace {
        // Keep a sampled trace consistent with the added analytic bump.
        let len = p.interfaces[arc].geometry.length();
        let sign = frame.signs[arc];
        out.normal_trace = Some(trace.map(|a, t, v| {
            if a == arc {
                v + c * sign * poly_profile(0.5 * t * len / half_length, power)
            } else {
                v
            }
        }));
    }
    Ok(out)
}

/// Adds `k − 1` arc bumps to `x` so that the `k` interface integrals
/// `∫ χ_i (X·ν)(∂ψ_i/∂ν_i)²` all agree.
pub fn project_equipartition_tangent(
    x: &DeformationField,
    p: &Partition,
    frame: &NormalFrame,
    gs: &GroundStateData,
    crit: &CriticalityData,
) -> Result<TangentProjection> {
    let k = p.subdomains.len();
    let integrals = |f: &DeformationField| -> Result<Vec<f64>> {
        Ok(interface_integrals(p, frame, gs, &normal_trace(f, p, frame, ARC_SAMPLES)?))
    };
    let before = integrals(x)?;
    if k < 2 {
        return Ok(TangentProjection { field: x.clone(), coefficients: vec![], integrals_before: before.clone(), integrals_after: before });
    }
    let defect = |v: &[f64]| (0..k - 1).map(|i| v[i] - v[k - 1]).collect::<Vec<_>>();
    let rhs: Vec<f64> = defect(&before).iter().map(|v| -v).collect();
    let arcs = &crit.tree_arcs;
    let zero = DeformationField { corner_radius: x.corner_radius, ..DeformationField::default() };
    let mut cols = Vec::with_capacity(arcs.len());
    for &arc in arcs {
        cols.push(defect(&integrals(&with_term(&zero, p, frame, arc, 1.0)?)?));
    }
    let m = faer::Mat::<f64>::from_fn(k - 1, arcs.len(), |i, j| cols[j][i]);
    let scale = cols.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    let c = lu_solve(m.as_ref(), &rhs);
    if scale == 0.0 || c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("singular equipartition correction system".into()));
    }
    let mut field = x.clone();
    for (&arc, &cj) in arcs.iter().zip(&c) {
        field = with_term(&field, p, frame, arc, cj)?;
    }
    let after = integrals(&field)?;
    Ok(TangentProjection { field, coefficients: c, integrals_before: before, integrals_after: after })
}
