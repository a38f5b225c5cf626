//! Matching of normal derivatives across interfaces and the weight `ρ`.

use std::collections::VecDeque;

use serde::Serialize;

use super::boundary::BoundaryField;
use super::groundstate::GroundStateData;
use crate::partition::Partition;
use crate::tolerances::NOT_CRITICAL;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct CriticalityData {
    /// Positive coefficients with `Σ a_i² = 1`.
    pub coefficients: Vec<f64>,
    /// Larger of `matching_residual` and `equipartition_defect`.
    pub residual: f64,
    /// `max | |a_l ∂ψ_l| − |a_r ∂ψ_r| |` over arc samples, relative to `max |a ∂ψ|`.
    pub matching_residual: f64,
    /// `(max λ_i − min λ_i) / mean λ_i`.
    pub equipartition_defect: f64,
    pub critical: bool,
    /// `ρ = (a_l |∂ψ_l| + a_r |∂ψ_r|) / 2`, zero at arc endpoints.
    pub rho: BoundaryField,
    /// Arcs of the spanning tree used to propagate the coefficients.
    pub tree_arcs: Vec<usize>,
    pub lambdas: Vec<f64>,
}

impl CriticalityData {
    pub fn require_critical(&self) -> Result<()> {
        if self.critical {
            Ok(())
        } else {
            Err(Error::NotCritical(self.residual))
        }
    }
}

fn arc_norm(f: &BoundaryField, arc: usize) -> f64 {
    f.integrate_arc_with(arc, |_, v| v * v).sqrt()
}

/// Breadth-first spanning tree of the adjacency graph from subdomain 0.
/// Returns, for every reached subdomain, the arc it was reached through.
pub(crate) fn spanning_tree(p: &Partition) -> Vec<Option<usize>> {
    let k = p.subdomains.len();
    let mut via = vec![None; k];
    let mut seen = vec![false; k];
    if k == 0 {
        return via;
    }
    seen[0] = true;
    let mut q = VecDeque::from([0usize]);
    while let Some(v) = q.pop_front() {
        for a in p.interfaces.iter().filter(|a| !a.is_self_bordering()) {
            let w = if a.left == v {
                a.right
            } else if a.right == v {
                a.left
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                via[w] = Some(a.id);
                q.push_back(w);
            }
        }
    }
    via
}

/// Coefficients `a_i`, the matching residual and `ρ`.
pub fn criticality(p: &Partition, gs: &GroundStateData) -> Result<CriticalityData> {
    let k = p.subdomains.len();
    let via = spanning_tree(p);
    if via.iter().skip(1).any(|v| v.is_none()) {
        return Err(Error::InvalidGeometry("adjacency graph is not connected".into()));
    }
    // Propagate a_w / a_v along tree arcs in BFS order.
    let mut a = vec![0.0; k];
    a[0] = 1.0;
    let mut order: Vec<usize> = (1..k).collect();
    let depth = |mut s: usize| {
        let mut d = 0;
        while let Some(arc) = via[s] {
            let e = &p.interfaces[arc];
            s = if e.left == s { e.right } else { e.left };
            d += 1;
        }
        d
    };
    order.sort_by_key(|&s| depth(s));
    for s in order {
        let arc = via[s].unwrap_or_default();
        let e = &p.interfaces[arc];
        let (nl, nr) = (arc_norm(&gs.left, arc), arc_norm(&gs.right, arc));
        if nl == 0.0 || nr == 0.0 {
            return Err(Error::Numerical(format!("normal derivative vanishes on arc {arc}")));
        }
        a[s] = if e.right == s { a[e.left] * nl / nr } else { a[e.right] * nr / nl };
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    a.iter_mut().for_each(|x| *x /= norm);

    let mut scale = 0.0f64;
    let mut worst = 0.0f64;
    for e in &p.interfaces {
        let (l, r) = (&gs.left.arcs[e.id].values, &gs.right.arcs[e.id].values);
        for (vl, vr) in l.iter().zip(r) {
            let (x, y) = (a[e.left] * vl.abs(), a[e.right] * vr.abs());
            scale = scale.max(x).max(y);
            if !e.is_self_bordering() {
                worst = worst.max((x - y).abs());
            }
        }
    }
    let matching_residual = if scale > 0.0 { worst / scale } else { 0.0 };
    let lambdas = gs.lambdas();
    let mean = lambdas.iter().sum::<f64>() / k as f64;
    let equipartition_defect = gs.equipartition_defect() / mean;
    let residual = matching_residual.max(equipartition_defect);
    let mut rho = gs.left.map(|arc, t, vl| {
        let e = &p.interfaces[arc];
        0.5 * (a[e.left] * vl.abs() + a[e.right] * gs.right.eval(arc, t).abs())
    });
    rho.zero_at_endpoints();
    Ok(CriticalityData {
        coefficients: a,
        residual,
        matching_residual,
        equipartition_defect,
        critical: residual <= NOT_CRITICAL,
        rho,
        tree_arcs: via.iter().flatten().copied().collect(),
        lambdas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_radial_partition, rect_cross, rect_shifted_cross};
    use crate::variation::groundstate::groundstate_data;
    use std::f64::consts::PI;

    #[test]
    fn symmetric_partitions_are_critical() {
        let c = criticality(&rect_cross(1.0).unwrap(), &groundstate_data(&rect_cross(1.0).unwrap(), 8).unwrap()).unwrap();
        assert!(c.coefficients.iter().all(|a| (a - 0.5).abs() < 1e-12));
        assert!(c.residual < 1e-8);
        let p = build_radial_partition(6).unwrap();
        let c = criticality(&p, &groundstate_data(&p, 8).unwrap()).unwrap();
        let a0 = 1.0 / 6f64.sqrt();
        assert!(c.coefficients.iter().all(|a| (a - a0).abs() < 1e-10));
        assert!(c.residual < 1e-8);
    }

    #[test]
    fn shifted_cross_is_flagged() {
        let p = rect_shifted_cross(1.0, [0.48 * PI, 0.5 * PI]).unwrap();
        let c = criticality(&p, &groundstate_data(&p, 8).unwrap()).unwrap();
        assert!(c.residual > 1e-2, "{}", c.residual);
    }
}
