//! First variation of Dirichlet ground states under domain deformations.

use serde::Serialize;

use super::boundary::BoundaryField;
use super::field::{bump_profile, DeformationField};
use super::groundstate::{GroundState, GroundStateData, ARC_SAMPLES};
use crate::numerics::gll::LobattoRule;
use crate::partition::{ArcSide, CellGeometry, EdgeSide, NormalFrame, Partition};
use crate::Result;

/// Straight or circular piece of a subdomain boundary with its outward normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryPiece {
    Segment { start: [f64; 2], end: [f64; 2], normal: [f64; 2] },
    /// Arc of the circle of radius `r` about the origin, outward normal `sign · e_r`.
    Arc { r: f64, t0: f64, t1: f64, sign: f64 },
}

/// Quadrature node on a boundary piece.
#[derive(Clone, Copy, Debug)]
pub struct PieceNode {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub weight: f64,
}

impl BoundaryPiece {
    /// Gauss–Lobatto nodes mapped onto the piece.
    pub fn nodes(&self, rule: &LobattoRule) -> Vec<PieceNode> {
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| match *self {
                BoundaryPiece::Segment { start, end, normal } => {
                    let s = 0.5 * (1.0 + x);
                    let len = (end[0] - start[0]).hypot(end[1] - start[1]);
                    PieceNode {
                        point: [start[0] + s * (end[0] - start[0]), start[1] + s * (end[1] - start[1])],
                        normal,
                        weight: 0.5 * len * w,
                    }
                }
                BoundaryPiece::Arc { r, t0, t1, sign } => {
                    let th = t0 + 0.5 * (1.0 + x) * (t1 - t0);
                    let (s, c) = th.sin_cos();
                    PieceNode { point: [r * c, r * s], normal: [sign * c, sign * s], weight: 0.5 * r * (t1 - t0) * w }
                }
            })
            .collect()
    }

    fn midpoint(&self) -> [f64; 2] {
        match *self {
            BoundaryPiece::Segment { start, end, .. } => [0.5 * (start[0] + end[0]), 0.5 * (start[1] + end[1])],
            BoundaryPiece::Arc { r, t0, t1, .. } => {
                let th = 0.5 * (t0 + t1);
                [r * th.cos(), r * th.sin()]
            }
        }
    }
}

fn cell_edge(g: &CellGeometry, side: EdgeSide) -> Option<BoundaryPiece> {
    Some(match (*g, side) {
        (CellGeometry::Rect { x0, y0, y1, .. }, EdgeSide::XMin) => {
            BoundaryPiece::Segment { start: [x0, y0], end: [x0, y1], normal: [-1.0, 0.0] }
        }
        (CellGeometry::Rect { x1, y0, y1, .. }, EdgeSide::XMax) => {
            BoundaryPiece::Segment { start: [x1, y0], end: [x1, y1], normal: [1.0, 0.0] }
        }
        (CellGeometry::Rect { x0, x1, y0, .. }, EdgeSide::YMin) => {
            BoundaryPiece::Segment { start: [x0, y0], end: [x1, y0], normal: [0.0, -1.0] }
        }
        (CellGeometry::Rect { x0, x1, y1, .. }, EdgeSide::YMax) => {
            BoundaryPiece::Segment { start: [x0, y1], end: [x1, y1], normal: [0.0, 1.0] }
        }
        (CellGeometry::Polar { r0, t0, t1, .. }, EdgeSide::XMin) => {
            if r0 == 0.0 {
                return None;
            }
            BoundaryPiece::Arc { r: r0, t0, t1, sign: -1.0 }
        }
        (CellGeometry::Polar { r1, t0, t1, .. }, EdgeSide::XMax) => BoundaryPiece::Arc { r: r1, t0, t1, sign: 1.0 },
        (CellGeometry::Polar { r0, r1, t0, .. }, EdgeSide::YMin) => {
            let (s, c) = t0.sin_cos();
            BoundaryPiece::Segment { start: [r0 * c, r0 * s], end: [r1 * c, r1 * s], normal: [s, -c] }
        }
        (CellGeometry::Polar { r0, r1, t1, .. }, EdgeSide::YMax) => {
            let (s, c) = t1.sin_cos();
            BoundaryPiece::Segment { start: [r0 * c, r0 * s], end: [r1 * c, r1 * s], normal: [-s, c] }
        }
    })
}

/// Pieces of `∂Ω_sub`: cell edges that are not glued to another cell of the
/// same subdomain. Slits contribute both of their sides.
pub fn subdomain_boundary(p: &Partition, sub: usize) -> Vec<BoundaryPiece> {
    let mut out = Vec::new();
    for (ci, cell) in p.layout.cells.iter().enumerate().filter(|(_, c)| c.subdomain == sub) {
        for side in EdgeSide::ALL {
            let internal = p
                .layout
                .links
                .iter()
                .any(|l| !l.cut && ((l.a == ci && l.a_side == side) || (l.b == ci && l.b_side == side)));
            if internal {
                continue;
            }
            out.extend(cell_edge(&cell.geometry, side));
        }
    }
    out
}

/// Corner cutoff `1 − φ(d/R)`, `d` the distance to the nearest interior corner.
pub fn corner_cutoff(x: &DeformationField, p: &Partition, point: [f64; 2]) -> f64 {
    let Some(r) = x.corner_radius else { return 1.0 };
    let d = p
        .interior_corners()
        .map(|c| (point[0] - c.position[0]).hypot(point[1] - c.position[1]))
        .fold(f64::INFINITY, f64::min);
    if d.is_finite() {
        1.0 - bump_profile(d / r)
    } else {
        1.0
    }
}

/// `X · n` at a boundary point with unit normal `n`. On interface arcs a
/// sampled normal trace (relative to the frame) takes precedence.
pub fn normal_velocity(x: &DeformationField, p: &Partition, frame: &NormalFrame, point: [f64; 2], n: [f64; 2]) -> f64 {
    let raw = match (&x.normal_trace, p.arc_at(point)) {
        (Some(trace), Some((arc, t))) => {
            let nu = frame.normals[arc];
            trace.eval(arc, t) * (nu[0] * n[0] + nu[1] * n[1])
        }
        _ => {
            let v = x.field.value(point);
            v[0] * n[0] + v[1] * n[1]
        }
    };
    raw * corner_cutoff(x, p, point)
}

/// `X · ν` sampled on every interface arc.
pub fn normal_trace(x: &DeformationField, p: &Partition, frame: &NormalFrame, samples: usize) -> Result<BoundaryField> {
    BoundaryField::sample(p, samples, |arc, t, point| {
        let raw = match &x.normal_trace {
            Some(trace) => trace.eval(arc, t),
            None => {
                let v = x.field.value(point);
                let nu = frame.normals[arc];
                v[0] * nu[0] + v[1] * nu[1]
            }
        };
        raw * corner_cutoff(x, p, point)
    })
}

/// Quadrature nodes per boundary piece.
pub const PIECE_NODES: usize = 40;

/// `λ' = −∮ (∂ψ/∂n)² v` over the given pieces, `v(point, n)` the normal velocity.
pub fn hadamard_on_pieces(
    state: &GroundState,
    pieces: &[BoundaryPiece],
    eps: f64,
    mut velocity: impl FnMut([f64; 2], [f64; 2]) -> f64,
) -> Result<f64> {
    let rule = LobattoRule::legendre(PIECE_NODES)?;
    let mut total = 0.0;
    for piece in pieces {
        let mid = piece.midpoint();
        for q in piece.nodes(&rule) {
            // Step inwards and slightly towards the piece centre so the probe
            // lies inside the right block.
            let probe = [
                q.point[0] - eps * q.normal[0] + 1e-6 * (mid[0] - q.point[0]),
                q.point[1] - eps * q.normal[1] + 1e-6 * (mid[1] - q.point[1]),
            ];
            let dn = state.normal_derivative(q.point, q.normal, probe);
            total -= q.weight * dn * dn * velocity(q.point, q.normal);
        }
    }
    Ok(total)
}

/// `λ'_i = −∮_{∂Ω_i} (∂ψ_i/∂n)² (X·n)` for every subdomain.
pub fn hadamard_first(p: &Partition, gs: &GroundStateData, frame: &NormalFrame, x: &DeformationField) -> Result<Vec<f64>> {
    let eps = 1e-7 * p.domain.diameter();
    gs.states
        .iter()
        .map(|st| {
            hadamard_on_pieces(st, &subdomain_boundary(p, st.subdomain), eps, |pt, n| normal_velocity(x, p, frame, pt, n))
        })
        .collect()
}

/// `I_i = Σ_{arcs of Ω_i} ∫ χ_i (X·ν) (∂ψ_i/∂ν_i)²` from a sampled trace
/// `X·ν`. For fields tangent to the outer boundary, `λ'_i = −I_i`.
pub fn interface_integrals(p: &Partition, frame: &NormalFrame, gs: &GroundStateData, trace: &BoundaryField) -> Vec<f64> {
    let mut out = vec![0.0; p.subdomains.len()];
    for a in &p.interfaces {
        for (side, sub) in [(ArcSide::Left, a.left), (ArcSide::Right, a.right)] {
            let chi = frame.chi(a.id, side);
            let d = gs.side(side);
            out[sub] += chi * d.integrate_arc_with(a.id, |t, v| v * v * trace.eval(a.id, t));
        }
    }
    out
}

/// Same as [`interface_integrals`] for a deformation field.
pub fn equipartition_integrals(
    p: &Partition,
    frame: &NormalFrame,
    gs: &GroundStateData,
    x: &DeformationField,
) -> Result<Vec<f64>> {
    Ok(interface_integrals(p, frame, gs, &normal_trace(x, p, frame, ARC_SAMPLES)?))
}

/// Exact derivative of the ground state of `(0, aπ) × (0, π)` under the
/// width stretch `X = (x/a, 0)`.
pub fn width_stretch_derivative(a: f64) -> f64 {
    -2.0 / (a * a * a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_rect_partition, orient_interfaces, rect_cross, OrientationRule};
    use crate::variation::field::AnalyticField;
    use crate::variation::groundstate::groundstate_data;

    #[test]
    fn width_stretch_matches_closed_form() {
        let a = 1.3;
        let p = build_rect_partition(a, &[]).unwrap();
        let f = orient_interfaces(&p, &OrientationRule::LeftNormal).unwrap();
        let gs = groundstate_data(&p, 12).unwrap();
        let x = DeformationField::analytic(AnalyticField::new(vec![crate::variation::field::FieldTerm::Affine {
            b: [0.0, 0.0],
            a: [[1.0 / a, 0.0], [0.0, 0.0]],
        }]));
        let d = hadamard_first(&p, &gs, &f, &x).unwrap()[0];
        assert!((d - width_stretch_derivative(a)).abs() < 1e-10 * d.abs(), "{d}");
    }

    #[test]
    fn disk_dilation_scales_eigenvalue() {
        for (m, n) in [(0, 1), (2, 1), (1, 2)] {
            let st = GroundState::disk_bessel(m, n).unwrap();
            let circle = [BoundaryPiece::Arc { r: 1.0, t0: 0.0, t1: std::f64::consts::TAU, sign: 1.0 }];
            let d = hadamard_on_pieces(&st, &circle, 1e-9, |pt, n| pt[0] * n[0] + pt[1] * n[1]).unwrap();
            assert!((d + 2.0 * st.lambda).abs() < 1e-8 * st.lambda, "{m} {n} {d}");
        }
    }

    #[test]
    fn translation_leaves_cells_fixed() {
        let p = rect_cross(1.0).unwrap();
        let f = orient_interfaces(&p, &OrientationRule::LeftNormal).unwrap();
        let gs = groundstate_data(&p, 12).unwrap();
        let x = DeformationField::analytic(AnalyticField::translation([0.3, -0.7]));
        for d in hadamard_first(&p, &gs, &f, &x).unwrap() {
            assert!(d.abs() < 1e-9, "{d}");
        }
    }
}
