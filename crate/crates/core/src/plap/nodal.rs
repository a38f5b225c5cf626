//! Nodal domains of discrete eigenfunctions: sign flood fill and marching
//! squares on a sampling grid, aware of sign-flipping cuts.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::assemble::DiscreteOperator;
use crate::partition::Segment;
use crate::tolerances::DEGENERATE_FRACTION;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct NodalPartitionResult {
    pub domain_count: usize,
    /// Zero-level polylines of the interpolant (in the continuous gauge).
    pub polylines: Vec<Vec<[f64; 2]>>,
    /// Rayleigh quotient of the eigenfunction restricted to each domain.
    pub domain_lambdas: Vec<f64>,
    pub equipartition_defect: f64,
    /// Number of sampled points in each domain.
    pub domain_sizes: Vec<usize>,
    pub grid: [usize; 2],
}

/// Sampling resolution along the longer side of the bounding box.
pub const DEFAULT_RESOLUTION: usize = 240;

struct SampleGrid {
    origin: [f64; 2],
    h: f64,
    nx: usize,
    ny: usize,
    values: Vec<Option<f64>>,
}

impl SampleGrid {
    fn point(&self, i: usize, j: usize) -> [f64; 2] {
        // A small offset keeps samples off axis-aligned cuts at round positions.
        [self.origin[0] + (i as f64 + 0.5137) * self.h, self.origin[1] + (j as f64 + 0.5071) * self.h]
    }
}

fn crossings(cuts: &[Segment], p: [f64; 2], q: [f64; 2]) -> usize {
    cuts.iter().filter(|c| segments_cross(p, q, c.start, c.end)).count()
}

fn segments_cross(p: [f64; 2], q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    let orient = |u: [f64; 2], v: [f64; 2], w: [f64; 2]| (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0]);
    let d1 = orient(a, b, p);
    let d2 = orient(a, b, q);
    let d3 = orient(p, q, a);
    let d4 = orient(p, q, b);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

/// Nodal domains of the eigenvector `vec` (free unknowns of `op`).
pub fn extract_nodal_partition(vec: &[f64], op: &DiscreteOperator) -> Result<NodalPartitionResult> {
    extract_with_resolution(vec, op, DEFAULT_RESOLUTION)
}

pub fn extract_with_resolution(vec: &[f64], op: &DiscreteOperator, resolution: usize) -> Result<NodalPartitionResult> {
    let nodal = op.expand(vec);
    let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
    for p in &op.positions {
        for c in 0..2 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let h = span / resolution as f64;
    let nx = ((hi[0] - lo[0]) / h).floor() as usize;
    let ny = ((hi[1] - lo[1]) / h).floor() as usize;
    let mut grid = SampleGrid { origin: lo, h, nx, ny, values: Vec::with_capacity(nx * ny) };
    let mut grads = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let p = grid.point(i, j);
            let vg = op.eval_grad_at(&nodal, p, p);
            grid.values.push(vg.map(|x| x.0));
            grads.push(vg.map_or([0.0; 2], |x| x.1));
        }
    }
    let inside: Vec<f64> = grid.values.iter().flatten().copied().collect();
    let vmax = inside.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tiny = inside.iter().filter(|v| v.abs() <= 1e-12 * vmax).count();
    if inside.is_empty() || vmax == 0.0 || tiny as f64 > DEGENERATE_FRACTION * inside.len() as f64 {
        return Err(Error::DegenerateVector { fraction: if inside.is_empty() { 1.0 } else { tiny as f64 / inside.len() as f64 } });
    }
    let cuts = op.cut_segments();
    let idx = |i: usize, j: usize| j * nx + i;
    let sgn = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };

    // Gauge-aware connectivity between neighbouring samples.
    let connected = |a: (usize, usize), b: (usize, usize)| -> Option<bool> {
        let (va, vb) = (grid.values[idx(a.0, a.1)]?, grid.values[idx(b.0, b.1)]?);
        let flips = crossings(&cuts, grid.point(a.0, a.1), grid.point(b.0, b.1));
        let rel = sgn(va) * sgn(vb) * if flips % 2 == 1 { -1.0 } else { 1.0 };
        Some(rel > 0.0)
    };

    let mut label = vec![usize::MAX; nx * ny];
    let mut sizes = Vec::new();
    for j0 in 0..ny {
        for i0 in 0..nx {
            if grid.values[idx(i0, j0)].is_none() || label[idx(i0, j0)] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            sizes.push(0usize);
            label[idx(i0, j0)] = id;
            let mut q = VecDeque::from([(i0, j0)]);
            while let Some((i, j)) = q.pop_front() {
                sizes[id] += 1;
                let mut nb = Vec::with_capacity(4);
                if i > 0 {
                    nb.push((i - 1, j));
                }
                if i + 1 < nx {
                    nb.push((i + 1, j));
                }
                if j > 0 {
                    nb.push((i, j - 1));
                }
                if j + 1 < ny {
                    nb.push((i, j + 1));
                }
                for b in nb {
                    if label[idx(b.0, b.1)] == usize::MAX && connected((i, j), b) == Some(true) {
                        label[idx(b.0, b.1)] = id;
                        q.push_back(b);
                    }
                }
            }
        }
    }
    let polylines = marching_squares(&grid, &cuts);

    // Rayleigh quotients per domain by the midpoint rule on the sample grid,
    // whose labels resolve the nodal set far better than the element nodes.
    let k = sizes.len();
    let (mut num, mut den) = (vec![0.0; k], vec![0.0; k]);
    for (s, (&l, v)) in label.iter().zip(&grid.values).enumerate() {
        let (Some(v), true) = (v, l != usize::MAX) else { continue };
        let g = grads[s];
        num[l] += g[0] * g[0] + g[1] * g[1];
        den[l] += v * v;
    }
    let domain_lambdas: Vec<f64> = num.iter().zip(&den).map(|(n, d)| if *d > 0.0 { n / d } else { f64::NAN }).collect();
    let finite: Vec<f64> = domain_lambdas.iter().copied().filter(|v| v.is_finite()).collect();
    let defect = if finite.is_empty() {
        0.0
    } else {
        finite.iter().cloned().fold(f64::MIN, f64::max) - finite.iter().cloned().fold(f64::MAX, f64::min)
    };
    Ok(NodalPartitionResult {
        domain_count: k,
        polylines,
        domain_lambdas,
        equipartition_defect: defect,
        domain_sizes: sizes,
        grid: [nx, ny],
    })
}

fn marching_squares(grid: &SampleGrid, cuts: &[Segment]) -> Vec<Vec<[f64; 2]>> {
    let (nx, ny) = (grid.nx, grid.ny);
    let idx = |i: usize, j: usize| j * nx + i;
    // Edge ids: 2·idx for (i,j)-(i+1,j), 2·idx+1 for (i,j)-(i,j+1).
    let mut points: HashMap<usize, [f64; 2]> = HashMap::new();
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let raw: Option<Vec<f64>> = corners.iter().map(|&(a, b)| grid.values[idx(a, b)]).collect();
            let Some(raw) = raw else { continue };
            let p0 = grid.point(i, j);
            let mut v = [0.0; 4];
            for (k, &(a, b)) in corners.iter().enumerate() {
                let flips = crossings(cuts, p0, grid.point(a, b));
                v[k] = if flips % 2 == 1 { -raw[k] } else { raw[k] };
            }
            // Skip cells around a cut end, where the gauge is multivalued.
            let loop_flips: usize =
                (0..4).map(|k| crossings(cuts, grid.point(corners[k].0, corners[k].1), grid.point(corners[(k + 1) % 4].0, corners[(k + 1) % 4].1))).sum();
            if loop_flips % 2 == 1 {
                continue;
            }
            let edge_ids = [2 * idx(i, j), 2 * idx(i + 1, j) + 1, 2 * idx(i, j + 1), 2 * idx(i, j) + 1];
            let mut hits = Vec::new();
            for k in 0..4 {
                let (a, b) = (v[k], v[(k + 1) % 4]);
                if (a < 0.0) != (b < 0.0) {
                    let t = a / (a - b);
                    let pa = grid.point(corners[k].0, corners[k].1);
                    let pb = grid.point(corners[(k + 1) % 4].0, corners[(k + 1) % 4].1);
                    points.insert(edge_ids[k], [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
                    hits.push(edge_ids[k]);
                }
            }
            match hits.len() {
                2 => segs.push((hits[0], hits[1])),
                4 => {
                    let center = 0.25 * v.iter().sum::<f64>();
                    if (center < 0.0) == (v[0] < 0.0) {
                        segs.push((hits[0], hits[3]));
                        segs.push((hits[1], hits[2]));
                    } else {
                        segs.push((hits[0], hits[1]));
                        segs.push((hits[2], hits[3]));
                    }
                }
                _ => {}
            }
        }
    }
    chain_segments(&segs, &points)
}

fn chain_segments(segs: &[(usize, usize)], points: &HashMap<usize, [f64; 2]>) -> Vec<Vec<[f64; 2]>> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segs.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segs.len()];
    let mut lines = Vec::new();
    // Open chains start at edges touched once; closed loops afterwards.
    let mut starts: Vec<usize> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(&e, _)| e).collect();
    starts.sort_unstable();
    let mut order: Vec<usize> = starts;
    let mut rest: Vec<usize> = adj.keys().copied().collect();
    rest.sort_unstable();
    order.extend(rest);
    for start in order {
        let Some(&first) = adj[&start].iter().find(|&&s| !used[s]) else { continue };
        let mut line = vec![points[&start]];
        let mut cur = start;
        let mut seg = Some(first);
        while let Some(s) = seg {
            used[s] = true;
            let (a, b) = segs[s];
            let next = if a == cur { b } else { a };
            line.push(points[&next]);
            cur = next;
            seg = adj[&cur].iter().copied().find(|&t| !used[t]);
        }
        lines.push(line);
    }
    lines
}
