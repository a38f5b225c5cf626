//! Transition-point search on the unit disk.
//!
//! A six-fold symmetric candidate is described by one wedge of angle `π/3`:
//! Dirichlet on the arc and on `θ = 0, r < a`, Neumann on the rest of the
//! two rays. The second eigenfunction of that mixed problem has a nodal line
//! leaving the ray `θ = 0`. The transition point `a` is accepted when that
//! line ends exactly at the Zaremba point `(a, 0)`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::{LandscapePoint, RefinementData, SearchReport};
use crate::numerics::linalg::shift_invert_lowest;
use crate::numerics::roots::bracketed_root;
use crate::partition::{build_disk_partition, Cut};
use crate::plap::eig::{assemble_plap, position_in};
use crate::plap::nodal::extract_nodal_partition;
use crate::plap::sector::{sector_mixed_solve_with, sector_neumann_solve, SectorGrid, SectorSolution};
use crate::{Error, Result};

/// Value quoted in the literature for a better 6-partition of the disk. It
/// is carried as metadata only.
pub const GLOBAL_REFERENCE_ENERGY: f64 = 39.02;

/// Footer line for disk reports.
pub fn global_reference_note() -> String {
    format!("reference energy {GLOBAL_REFERENCE_ENERGY} for a non-symmetric 6-partition: external, not reproduced")
}

/// Eigenpair of the mixed wedge problem carrying the candidate.
pub const WEDGE_INDEX: usize = 1;

/// Scan interval and step for the transition point.
pub const SCAN_RANGE: (f64, f64) = (0.02, 0.5);
pub const SCAN_STEP: f64 = 0.02;

#[derive(Clone, Debug, Serialize)]
pub struct DiskSearchOptions {
    pub wedge: f64,
    /// Spectral-element nodes per block direction of the wedge mesh.
    pub n: usize,
    /// Width of the final bracket on `a`.
    pub tol: f64,
    /// Nodes per block of the full-disk partition Laplacian used for the position.
    pub plap_n: usize,
    /// Repeat the root search with `n + 2` nodes and report the shift.
    pub refine: bool,
}

impl Default for DiskSearchOptions {
    fn default() -> Self {
        DiskSearchOptions { wedge: PI / 3.0, n: 14, tol: 1e-6, plap_n: 12, refine: false }
    }
}

/// Smallest bracket width the wedge discretization can resolve.
pub const TOL_FLOOR: f64 = 1e-9;

/// Signed mismatch between the nodal line and the transition point.
///
/// When the nodal line meets the Neumann part at radius `r_n > a` the value
/// is `r_n − a > 0`. When it meets the Dirichlet part instead it ends at the
/// radius `r_d < a` where `∂u/∂θ` changes sign, and the value is `r_d − a`.
/// If neither side shows a sign change the line ends at the transition
/// point itself, closer than the sampling resolves, and the value is 0.
pub fn matching_function(s: &SectorSolution) -> f64 {
    let a = s.a;
    let nodal = s.op.expand(&s.pair.vector);
    let u = |r: f64, th: f64| s.op.eval_at(&nodal, [r * th.cos(), r * th.sin()]).unwrap_or(0.0);
    // Uniform samples plus a geometric cluster towards `a`: near the root the
    // nodal line ends within a tiny distance of the transition point.
    let samples = |lo: f64, hi: f64, towards_hi: bool| -> Vec<f64> {
        let mut r: Vec<f64> = (1..400).map(|k| lo + (hi - lo) * k as f64 / 400.0).collect();
        r.extend((0..=100).map(|j| {
            let d = (hi - lo) * 10f64.powf(-0.1 * j as f64);
            if towards_hi {
                hi - d
            } else {
                lo + d
            }
        }));
        r.retain(|&x| x > lo && x < hi);
        r.sort_by(f64::total_cmp);
        r
    };
    let first_change = |radii: &[f64], f: &dyn Fn(f64) -> f64| -> Option<f64> {
        let mut prev = (radii[0], f(radii[0]));
        for &r in &radii[1..] {
            let v = f(r);
            if prev.1 != 0.0 && v != 0.0 && (v < 0.0) != (prev.1 < 0.0) {
                return Some(bracketed_root(f, prev.0, r, 1e-13).unwrap_or(0.5 * (prev.0 + r)));
            }
            prev = (r, v);
        }
        None
    };
    let neumann = samples(a, 1.0, false);
    if let Some(rn) = first_change(&neumann, &|r| u(r, 0.0)) {
        return rn - a;
    }
    // Just above the Dirichlet ray u ≈ δ r ∂u/∂θ; scan from `a` inwards.
    let delta = 1e-9;
    let mut dirichlet = samples(1e-3 * a, a, true);
    dirichlet.reverse();
    if let Some(rd) = first_change(&dirichlet, &|r| u(r, delta)) {
        return rd - a;
    }
    0.0
}

/// Result of the transition-point root search on one grid.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionPoint {
    pub a: f64,
    pub energy: f64,
    pub residual: f64,
    pub bracket: [f64; 2],
    pub evaluations: usize,
    pub dof: usize,
}

fn solve(a: f64, wedge: f64, g: &SectorGrid) -> Result<(f64, f64, usize)> {
    let s = sector_mixed_solve_with(a, wedge, g, WEDGE_INDEX)?;
    Ok((matching_function(&s), s.pair.value, s.op.n_free))
}

fn root_in(lo: f64, hi: f64, opts: &DiskSearchOptions, g: &SectorGrid) -> Result<TransitionPoint> {
    let mut evaluations = 0;
    let mut failure = None;
    let a = bracketed_root(
        |a| {
            evaluations += 1;
            match solve(a, opts.wedge, g) {
                Ok((m, ..)) => m,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        lo,
        hi,
        opts.tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let a = a?;
    let (residual, energy, dof) = solve(a, opts.wedge, g)?;
    Ok(TransitionPoint { a, energy, residual: residual.abs(), bracket: [lo, hi], evaluations: evaluations + 1, dof })
}

/// Full-disk data at an accepted transition point: the partition Laplacian
/// with three cuts `θ = 2πj/3, r < a` carries the reflected eigenfunction.
#[derive(Clone, Debug, Serialize)]
pub struct ReflectedCheck {
    pub lambda: f64,
    pub position: usize,
    pub multiplicity: usize,
    pub domains: usize,
    pub domain_lambdas: Vec<f64>,
    pub lowest: Vec<f64>,
    pub nodal_lines: Vec<Vec<[f64; 2]>>,
    pub cuts: Vec<[[f64; 2]; 2]>,
}

pub fn reflected_check(a: f64, energy: f64, n: usize) -> Result<ReflectedCheck> {
    let cuts: Vec<Cut> = (0..3).map(|j| Cut::Radial { theta: TAU * j as f64 / 3.0, r0: 0.0, r1: a }).collect();
    let p = build_disk_partition(&cuts)?;
    let op = assemble_plap(&p, n)?;
    let pairs = shift_invert_lowest(op.free_stiffness().as_ref(), op.free_mass(), 9, 0.0)?;
    let lowest: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let best = pairs
        .iter()
        .min_by(|x, y| (x.value - energy).abs().total_cmp(&(y.value - energy).abs()))
        .ok_or_else(|| Error::Numerical("no eigenpairs".into()))?;
    if (best.value - energy).abs() > 1e-3 * energy {
        return Err(Error::Numerical(format!("reflected partition Laplacian has no eigenvalue near {energy} (closest {})", best.value)));
    }
    let (position, multiplicity) = position_in(&lowest, best.value);
    let nodal = extract_nodal_partition(&best.vector, &op)?;
    Ok(ReflectedCheck {
        lambda: best.value,
        position,
        multiplicity,
        domains: nodal.domain_count,
        domain_lambdas: nodal.domain_lambdas,
        lowest,
        nodal_lines: nodal.polylines,
        cuts: cuts
            .iter()
            .map(|c| {
                let s = c.segment();
                [s.start, s.end]
            })
            .collect(),
    })
}

/// Grid scan of the matching function, then a bracketed root search.
pub fn disk_cut_search(opts: &DiskSearchOptions) -> Result<SearchReport> {
    if !(opts.tol >= TOL_FLOOR) {
        return Err(Error::Domain(format!("tolerance {} below the resolution floor {TOL_FLOOR}", opts.tol)));
    }
    if !(opts.wedge > 0.0 && opts.wedge < PI) {
        return Err(Error::Domain(format!("wedge angle {} outside (0, π)", opts.wedge)));
    }
    let g = SectorGrid::new(opts.n);
    let (lo, hi) = SCAN_RANGE;
    let steps = ((hi - lo) / SCAN_STEP).round() as usize;
    let mut landscape = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let a = lo + SCAN_STEP * k as f64;
        let (m, energy, _) = solve(a, opts.wedge, &g)?;
        landscape.push(LandscapePoint { parameters: vec![a], residual: m, energy });
    }
    let changes: Vec<usize> = (1..landscape.len())
        .filter(|&i| (landscape[i - 1].residual < 0.0) != (landscape[i].residual < 0.0))
        .collect();
    let Some(&first) = changes.first() else {
        return Err(Error::SearchFailed(format!(
            "matching function has no sign change on ({lo}, {hi}); landscape: {}",
            serde_json::to_string(&landscape).unwrap_or_default()
        )));
    };
    let bracket = (landscape[first - 1].parameters[0], landscape[first].parameters[0]);
    let tp = root_in(bracket.0, bracket.1, opts, &g)?;

    // Same-grid radial reference: the whole ray θ = 0 Neumann.
    let radial = sector_neumann_solve(opts.wedge, &g, 2)?.pair.value;
    let check = reflected_check(tp.a, tp.energy, opts.plap_n)?;

    let mut parameters = BTreeMap::from([("a".to_string(), tp.a)]);
    let mut notes = vec![
        format!("sign changes of the matching function on the scan: {}", changes.len()),
        format!("reflected partition Laplacian eigenvalue {:.8} (n = {})", check.lambda, opts.plap_n),
    ];
    let mut refined = None;
    if opts.refine {
        let g2 = SectorGrid::new(opts.n + 2);
        let r = root_in(bracket.0, bracket.1, opts, &g2)?;
        parameters.insert("a_refined".into(), r.a);
        notes.push(format!("refined grid n = {}: a = {:.8}, energy = {:.8}", opts.n + 2, r.a, r.energy));
        refined = Some(RefinementData { n: opts.n + 2, parameters: vec![r.a], energy: r.energy, residual: r.residual });
    }
    notes.push(global_reference_note());
    let mean = check.domain_lambdas.iter().sum::<f64>() / check.domain_lambdas.len().max(1) as f64;
    let spread = check.domain_lambdas.iter().fold(f64::MIN, |m, &v| m.max(v)) - check.domain_lambdas.iter().fold(f64::MAX, |m, &v| m.min(v));
    Ok(SearchReport {
        geometry: "disk".into(),
        parameters,
        residual: tp.residual,
        tolerance: opts.tol,
        energy: tp.energy,
        reference_energy: radial,
        reference_label: "radial 6-partition, same wedge grid".into(),
        position: check.position,
        multiplicity: check.multiplicity,
        domains: check.domains,
        deficiency: check.position as i64 - check.domains as i64,
        equipartition_defect: if mean > 0.0 { spread / mean } else { 0.0 },
        domain_lambdas: check.domain_lambdas,
        grid: opts.n,
        dof: tp.dof,
        evaluations: landscape.len() + tp.evaluations,
        refined,
        notes,
        landscape,
        cuts: check.cuts,
        nodal_lines: check.nodal_lines,
    })
}
