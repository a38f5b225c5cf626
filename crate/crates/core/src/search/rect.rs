//! Two-cut search on the rectangle `(0, απ) × (0, π)`.
//!
//! The bottom cut runs up from `(x₁, 0)` to the tip `(x₁, y₁)`; the top cut is
//! its image under the point reflection through the centre. Across both cuts
//! the partition Laplacian imposes `u ↦ −u`, so near a tip every eigenfunction
//! expands in half-integer Bessel modes
//!
//! `u = Σ_{k odd} J_{k/2}(√λ r) (c_k cos(kθ/2) + s_k sin(kθ/2))`,
//!
//! with `θ` measured from the cut. A generic tip carries one nodal line
//! (`k = 1` dominates). The tip is a triple point of the nodal set exactly
//! when `c₁ = s₁ = 0`, which is the acceptance condition here: two equations
//! in the two unknowns `(x₁, y₁)`, the second tip following by symmetry.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::{LandscapePoint, RefinementData, SearchReport};
use crate::numerics::bessel::bessel_j;
use crate::numerics::linalg::{shift_invert_lowest, EigenPair};
use crate::partition::EdgeSide;
use crate::plap::assemble::{BoundaryMode, DiscreteOperator};
use crate::plap::eig::discrete_position;
use crate::plap::mesh::{Block, BlockGeometry, BlockLink, EdgeCondition, Mesh};
use crate::plap::nodal::extract_nodal_partition;
use crate::{Error, Result};

/// Resolution of the slit mesh.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SlitGrid {
    /// Nodes per direction in ordinary blocks.
    pub n: usize,
    /// Nodes per direction in the graded layers around a tip.
    pub n_layer: usize,
    /// Number of geometric layers on each side of a tip.
    pub levels: usize,
    pub ratio: f64,
    /// Longest block side outside the layers.
    pub max_block: f64,
}

impl SlitGrid {
    pub fn new(n: usize) -> Self {
        SlitGrid { n, n_layer: (n / 2 + 1).max(5), levels: 1, ratio: 0.3, max_block: 2.5 }
    }
}

/// Point reflection of the tip `(x₁, y₁)` through the centre.
pub fn mirror_tip(alpha: f64, tip: [f64; 2]) -> [f64; 2] {
    [alpha * PI - tip[0], PI - tip[1]]
}

fn check_tip(alpha: f64, tip: [f64; 2]) -> Result<()> {
    let w = alpha * PI;
    let [x, y] = tip;
    if !(x > 0.0 && x < 0.5 * w && y > 0.0 && y < 0.5 * PI) {
        return Err(Error::InvalidGeometry(format!(
            "cut tip ({x}, {y}) must lie in the lower-left quarter (0, {}) × (0, {})",
            0.5 * w,
            0.5 * PI
        )));
    }
    Ok(())
}

/// Grid lines on `[0, len]`: the tips, geometric layers around them and
/// uniform filling of the remaining gaps. The flag marks layer intervals.
fn lines(len: f64, tips: [f64; 2], g: &SlitGrid) -> (Vec<f64>, Vec<bool>) {
    let gap = (tips[1] - tips[0]).abs();
    let edge = tips[0].min(len - tips[1]);
    let d0 = (0.3 * gap).min(0.5 * edge).min(0.25);
    let mut pts: Vec<(f64, bool)> = vec![(0.0, false), (len, false)];
    for &t in &tips {
        pts.push((t, true));
        for k in 0..g.levels {
            let d = d0 * g.ratio.powi(k as i32);
            pts.push((t - d, true));
            pts.push((t + d, true));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
    let mut xs = vec![pts[0].0];
    let mut layer = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        // An interval belongs to a layer when it touches a tip or an inner layer line.
        let is_layer = (b - a) <= 1.5 * d0 && (w[0].1 || w[1].1 || (b - a) <= d0 + 1e-12);
        let pieces = if is_layer { 1 } else { ((b - a) / g.max_block).ceil().max(1.0) as usize };
        for k in 1..=pieces {
            xs.push(a + (b - a) * k as f64 / pieces as f64);
            layer.push(is_layer);
        }
    }
    (xs, layer)
}

/// Spectral-element mesh of the rectangle with the two sign-flipping cuts.
pub fn slit_mesh(alpha: f64, tip: [f64; 2], g: &SlitGrid) -> Result<Mesh> {
    check_tip(alpha, tip)?;
    let w = alpha * PI;
    let top = mirror_tip(alpha, tip);
    let (xs, xl) = lines(w, [tip[0], top[0]], g);
    let (ys, yl) = lines(PI, [tip[1], top[1]], g);
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let on = |v: f64, t: f64| (v - t).abs() < 1e-12;
    let mut blocks = Vec::with_capacity(nx * ny);
    let mut links = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let mut edges = [EdgeCondition::Linked; 4];
            if i == 0 {
                edges[EdgeSide::XMin.index()] = EdgeCondition::Dirichlet;
            }
            if i + 1 == nx {
                edges[EdgeSide::XMax.index()] = EdgeCondition::Dirichlet;
            }
            if j == 0 {
                edges[EdgeSide::YMin.index()] = EdgeCondition::Dirichlet;
            }
            if j + 1 == ny {
                edges[EdgeSide::YMax.index()] = EdgeCondition::Dirichlet;
            }
            let id = j * nx + i;
            if i + 1 < nx {
                let x = xs[i + 1];
                let ym = 0.5 * (ys[j] + ys[j + 1]);
                let cut = (on(x, tip[0]) && ym < tip[1]) || (on(x, top[0]) && ym > top[1]);
                links.push(BlockLink { a: id, a_side: EdgeSide::XMax, b: id + 1, b_side: EdgeSide::XMin, sign: if cut { -1.0 } else { 1.0 } });
            }
            if j + 1 < ny {
                links.push(BlockLink { a: id, a_side: EdgeSide::YMax, b: id + nx, b_side: EdgeSide::YMin, sign: 1.0 });
            }
            let n = [if xl[i] { g.n_layer } else { g.n }, if yl[j] { g.n_layer } else { g.n }];
            blocks.push(Block { geometry: BlockGeometry::Rect { x0: xs[i], x1: xs[i + 1], y0: ys[j], y1: ys[j + 1] }, n, edges, subdomain: 0 });
        }
    }
    Ok(Mesh { blocks, links })
}

/// Half-integer Bessel coefficients `(c_k, s_k)`, `k = 1, 3, …, 2·count − 1`,
/// of `nodal` around the tip of a cut pointing in direction `down` from
/// the tip (`θ = 0` along the cut, counterclockwise).
pub fn tip_coefficients(op: &DiscreteOperator, nodal: &[f64], tip: [f64; 2], down: [f64; 2], lambda: f64, radius: f64, count: usize) -> Result<Vec<[f64; 2]>> {
    const POINTS: usize = 256;
    let mut samples = Vec::with_capacity(POINTS);
    for j in 0..POINTS {
        // Midpoint offsets keep samples off the cut itself.
        let th = TAU * (j as f64 + 0.5) / POINTS as f64;
        let (s, c) = th.sin_cos();
        let d = [c * down[0] - s * down[1], s * down[0] + c * down[1]];
        let p = [tip[0] + radius * d[0], tip[1] + radius * d[1]];
        let v = op.eval_at(nodal, p).ok_or_else(|| Error::Numerical(format!("tip sample ({}, {}) outside the mesh", p[0], p[1])))?;
        samples.push((th, v));
    }
    let kr = lambda.sqrt() * radius;
    (0..count)
        .map(|m| {
            let k = (2 * m + 1) as f64;
            let jk = bessel_j(0.5 * k, kr)?;
            let (mut ck, mut sk) = (0.0, 0.0);
            for &(th, v) in &samples {
                let (s, c) = (0.5 * k * th).sin_cos();
                ck += v * c;
                sk += v * s;
            }
            let scale = TAU / POINTS as f64 / PI / jk;
            Ok([ck * scale, sk * scale])
        })
        .collect()
}

/// One solve at a trial tip.
#[derive(Clone, Debug, Serialize)]
pub struct TipEvaluation {
    pub tip: [f64; 2],
    pub lambda: f64,
    /// `(c₁, s₁) / |(c₃, s₃)|` at the bottom tip, sign fixed by `s₃ > 0`.
    pub defect: [f64; 2],
    pub residual: f64,
    /// Same quantity at the mirrored tip (equal by symmetry up to discretization).
    pub mirror_residual: f64,
    pub coefficients: Vec<[f64; 2]>,
    pub lowest: Vec<f64>,
    pub dof: usize,
    #[serde(skip)]
    pub op: Option<DiscreteOperator>,
    #[serde(skip)]
    pub pair: Option<EigenPair>,
}

/// Eigenfunction index used by the search (0-based: the fourth).
pub const EIGEN_INDEX: usize = 3;

/// Sampling radius around a tip, as a fraction of the inner layer size.
fn tip_radius(alpha: f64, tip: [f64; 2]) -> f64 {
    let top = mirror_tip(alpha, tip);
    let room = (top[0] - tip[0]).min(top[1] - tip[1]).min(tip[0]).min(PI - tip[1]);
    (0.15 * room).min(0.05)
}

pub fn evaluate_tip(alpha: f64, tip: [f64; 2], g: &SlitGrid) -> Result<TipEvaluation> {
    let op = DiscreteOperator::assemble(&slit_mesh(alpha, tip, g)?, BoundaryMode::Eigen)?;
    let pairs = shift_invert_lowest(op.free_stiffness().as_ref(), op.free_mass(), EIGEN_INDEX + 3, 0.0)?;
    let pair = pairs[EIGEN_INDEX].clone();
    let lambda = pair.value;
    let nodal = op.expand(&pair.vector);
    let r = tip_radius(alpha, tip);
    let c = tip_coefficients(&op, &nodal, tip, [0.0, -1.0], lambda, r, 3)?;
    let cm = tip_coefficients(&op, &nodal, mirror_tip(alpha, tip), [0.0, 1.0], lambda, r, 3)?;
    let sign = if c[1][1] < 0.0 { -1.0 } else { 1.0 };
    let norm = c[1][0].hypot(c[1][1]);
    let defect = [sign * c[0][0] / norm, sign * c[0][1] / norm];
    Ok(TipEvaluation {
        tip,
        lambda,
        defect,
        residual: defect[0].hypot(defect[1]),
        mirror_residual: cm[0][0].hypot(cm[0][1]) / cm[1][0].hypot(cm[1][1]),
        coefficients: c,
        lowest: pairs.iter().map(|p| p.value).collect(),
        dof: op.n_free,
        op: Some(op),
        pair: Some(pair),
    })
}

/// Options of [`rect_cut_search`].
#[derive(Clone, Debug, Serialize)]
pub struct RectSearchOptions {
    pub alpha: f64,
    pub grid: SlitGrid,
    /// Starting tip.
    pub seed: [f64; 2],
    /// Half-widths of the scan box around the seed.
    pub span: [f64; 2],
    /// Scan points per direction.
    pub scan: usize,
    /// Accepted tip defect `|(c₁, s₁)| / |(c₃, s₃)|`.
    pub tol: f64,
    pub max_newton: usize,
    /// Re-evaluate the accepted tip with two more nodes per block.
    pub refine: bool,
}

impl Default for RectSearchOptions {
    fn default() -> Self {
        // Starting tip near the expected configuration (axis unit π/4).
        let q = PI / 4.0;
        RectSearchOptions {
            alpha: 1.5,
            grid: SlitGrid::new(12),
            seed: [2.725 * q, 1.775 * q],
            span: [0.1, 0.1],
            scan: 3,
            tol: 1e-6,
            max_newton: 12,
            refine: false,
        }
    }
}

/// Forward-difference step of the Newton Jacobian.
const JACOBIAN_STEP: f64 = 1e-4;
/// Longest Newton step in the tip plane.
const MAX_STEP: f64 = 0.1;

fn landscape_dump(points: &[LandscapePoint]) -> String {
    serde_json::to_string(points).unwrap_or_default()
}

/// Scan around the seed, then damped Newton on `(c₁, s₁) = 0`.
pub fn rect_cut_search(opts: &RectSearchOptions) -> Result<SearchReport> {
    if !(opts.tol > 0.0) || opts.scan == 0 || opts.grid.n < 5 || opts.grid.n_layer < 4 {
        return Err(Error::Domain("search needs tol > 0, scan ≥ 1 and at least 5 (layer: 4) nodes per block".into()));
    }
    if !(opts.alpha > 0.0) {
        return Err(Error::InvalidGeometry(format!("aspect ratio {} must be positive", opts.alpha)));
    }
    let g = &opts.grid;
    let mut landscape = Vec::new();
    let mut best: Option<TipEvaluation> = None;
    let mut evaluations = 0;
    for j in 0..opts.scan {
        for i in 0..opts.scan {
            let f = |k: usize| if opts.scan == 1 { 0.0 } else { 2.0 * k as f64 / (opts.scan - 1) as f64 - 1.0 };
            let tip = [opts.seed[0] + opts.span[0] * f(i), opts.seed[1] + opts.span[1] * f(j)];
            evaluations += 1;
            match evaluate_tip(opts.alpha, tip, g) {
                Ok(e) => {
                    landscape.push(LandscapePoint { parameters: tip.to_vec(), residual: e.residual, energy: e.lambda });
                    if best.as_ref().is_none_or(|b| e.residual < b.residual) {
                        best = Some(e);
                    }
                }
                Err(Error::InvalidGeometry(_)) => {
                    landscape.push(LandscapePoint { parameters: tip.to_vec(), residual: f64::NAN, energy: f64::NAN });
                }
                Err(e) => return Err(e),
            }
        }
    }
    let Some(mut cur) = best else {
        return Err(Error::SearchFailed(format!("no admissible tip in the scan box; landscape: {}", landscape_dump(&landscape))));
    };
    let mut iterations = 0;
    while cur.residual > opts.tol {
        if iterations == opts.max_newton {
            return Err(Error::SearchFailed(format!(
                "Newton stalled at residual {:.3e} after {iterations} steps; landscape: {}",
                cur.residual,
                landscape_dump(&landscape)
            )));
        }
        iterations += 1;
        let mut jac = [[0.0; 2]; 2];
        for c in 0..2 {
            let mut tip = cur.tip;
            tip[c] += JACOBIAN_STEP;
            evaluations += 1;
            let e = evaluate_tip(opts.alpha, tip, g)?;
            for r in 0..2 {
                jac[r][c] = (e.defect[r] - cur.defect[r]) / JACOBIAN_STEP;
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-14 {
            return Err(Error::SearchFailed(format!("singular Jacobian at tip {:?}; landscape: {}", cur.tip, landscape_dump(&landscape))));
        }
        let f = cur.defect;
        let mut step = [-(jac[1][1] * f[0] - jac[0][1] * f[1]) / det, -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det];
        let len = step[0].hypot(step[1]);
        if len > MAX_STEP {
            step = [step[0] * MAX_STEP / len, step[1] * MAX_STEP / len];
        }
        let mut accepted = None;
        let mut t = 1.0;
        for _ in 0..6 {
            let tip = [cur.tip[0] + t * step[0], cur.tip[1] + t * step[1]];
            evaluations += 1;
            if let Ok(e) = evaluate_tip(opts.alpha, tip, g) {
                landscape.push(LandscapePoint { parameters: tip.to_vec(), residual: e.residual, energy: e.lambda });
                if e.residual < cur.residual {
                    accepted = Some(e);
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some(e) => cur = e,
            None => {
                return Err(Error::SearchFailed(format!(
                    "line search failed at residual {:.3e}; landscape: {}",
                    cur.residual,
                    landscape_dump(&landscape)
                )))
            }
        }
    }

    let (Some(op), Some(pair)) = (cur.op.take(), cur.pair.take()) else {
        return Err(Error::Numerical("accepted evaluation lost its operator".into()));
    };
    let (position, multiplicity) = discrete_position(&op, cur.lambda)?;
    let nodal = extract_nodal_partition(&pair.vector, &op)?;
    let reference = cross_energy(opts.alpha, g.n)?;
    let refined = if opts.refine {
        let mut g2 = *g;
        g2.n += 2;
        g2.n_layer += 1;
        let e = evaluate_tip(opts.alpha, cur.tip, &g2)?;
        Some(RefinementData { n: g2.n, parameters: cur.tip.to_vec(), energy: e.lambda, residual: e.residual })
    } else {
        None
    };
    let finite: Vec<f64> = nodal.domain_lambdas.iter().copied().filter(|v| v.is_finite()).collect();
    let mean = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
    let top = mirror_tip(opts.alpha, cur.tip);
    Ok(SearchReport {
        geometry: "rect".into(),
        parameters: BTreeMap::from([("alpha".into(), opts.alpha), ("x1".into(), cur.tip[0]), ("y1".into(), cur.tip[1])]),
        residual: cur.residual,
        tolerance: opts.tol,
        energy: cur.lambda,
        reference_energy: reference,
        reference_label: "cross partition, same grid".into(),
        position,
        multiplicity,
        domains: nodal.domain_count,
        deficiency: position as i64 - nodal.domain_count as i64,
        equipartition_defect: if mean > 0.0 { nodal.equipartition_defect / mean } else { 0.0 },
        domain_lambdas: nodal.domain_lambdas,
        grid: g.n,
        dof: cur.dof,
        evaluations,
        refined,
        notes: vec![
            format!("Newton steps: {iterations}"),
            format!("mirrored tip residual {:.3e}", cur.mirror_residual),
        ],
        landscape,
        cuts: vec![[[cur.tip[0], 0.0], cur.tip], [top, [top[0], PI]]],
        nodal_lines: nodal.polylines,
    })
}

/// Energy of the cross partition: ground state of one `απ/2 × π/2` cell on
/// blocks with `n` nodes.
pub fn cross_energy(alpha: f64, n: usize) -> Result<f64> {
    let op = DiscreteOperator::assemble(&Mesh::rectangle(0.5 * alpha * PI, 0.5 * PI, 1, 1, n), BoundaryMode::Eigen)?;
    Ok(shift_invert_lowest(op.free_stiffness().as_ref(), op.free_mass(), 1, 0.0)?[0].value)
}
