//! Mixed Dirichlet/Neumann eigenproblem on a disk sector: Dirichlet on the
//! arc and on the segment `0 ≤ r ≤ a` of the ray `θ = 0`, Neumann elsewhere.
//! The mesh is graded geometrically towards the transition point `(a, 0)`.

use serde::Serialize;

use super::assemble::{BoundaryMode, DiscreteOperator};
use super::mesh::{Block, BlockGeometry, BlockLink, EdgeCondition, Mesh};
use crate::numerics::linalg::{shift_invert_lowest, EigenPair};
use crate::partition::EdgeSide;
use crate::{Error, Result};

/// Resolution of the graded sector mesh.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorGrid {
    /// Polynomial nodes per direction in the large blocks.
    pub n: usize,
    /// Nodes per direction in the refinement layers.
    pub n_layer: usize,
    /// Number of geometric layers on each side of the transition point.
    pub levels: usize,
    pub ratio: f64,
}

impl SectorGrid {
    pub fn new(n: usize) -> Self {
        SectorGrid { n, n_layer: (n / 3).max(6), levels: 6, ratio: 0.25 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorSolution {
    pub a: f64,
    pub wedge: f64,
    /// Lowest few eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Eigenpair of the selected branch.
    pub selected: usize,
    pub pair: EigenPair,
    /// First sign change of the selected eigenfunction on the Neumann part
    /// of the ray `θ = 0`, if any.
    pub nodal_radius: Option<f64>,
    /// Sign of the eigenfunction just beyond the transition point, relative
    /// to its value at the reference point `(0.7, wedge/2)` in polar
    /// coordinates.
    pub transition_sign: f64,
    #[serde(skip)]
    pub op: DiscreteOperator,
}

/// Graded polar mesh of the sector `{0 < r < 1, 0 < θ < wedge}`.
/// `a = 0` gives the fully Neumann ray.
pub fn sector_mesh(a: f64, wedge: f64, g: &SectorGrid) -> Result<Mesh> {
    if !(0.0..1.0).contains(&a) || !(wedge > 0.0 && wedge < std::f64::consts::TAU) {
        return Err(Error::InvalidGeometry(format!("sector with a = {a}, wedge = {wedge}")));
    }
    let mut rs = vec![0.0];
    let mut r_is_layer = Vec::new();
    let mut ts = vec![0.0];
    let mut t_is_layer = Vec::new();
    if a > 0.0 {
        let d0 = 0.5 * a.min(1.0 - a);
        let d: Vec<f64> = (0..g.levels).map(|k| d0 * g.ratio.powi(k as i32)).collect();
        rs.push(a - d0);
        r_is_layer.push(false);
        for k in 1..g.levels {
            rs.push(a - d[k]);
            r_is_layer.push(true);
        }
        rs.push(a);
        r_is_layer.push(true);
        for k in (1..g.levels).rev() {
            rs.push(a + d[k]);
            r_is_layer.push(true);
        }
        rs.push(a + d0);
        r_is_layer.push(true);
        rs.push(1.0);
        r_is_layer.push(false);
        for k in (0..g.levels).rev() {
            let t = d[k] / a;
            if t < 0.6 * wedge {
                ts.push(t);
                t_is_layer.push(true);
            }
        }
        ts.push(wedge);
        t_is_layer.push(false);
    } else {
        rs.push(1.0);
        r_is_layer.push(false);
        ts.push(wedge);
        t_is_layer.push(false);
    }
    let nr = rs.len() - 1;
    let nt = ts.len() - 1;
    let mut blocks = Vec::with_capacity(nr * nt);
    let mut links = Vec::new();
    for it in 0..nt {
        for ir in 0..nr {
            let geometry = BlockGeometry::Polar { r0: rs[ir], r1: rs[ir + 1], t0: ts[it], t1: ts[it + 1] };
            let mut edges = [EdgeCondition::Linked; 4];
            edges[EdgeSide::XMin.index()] = if ir == 0 { EdgeCondition::Degenerate } else { EdgeCondition::Linked };
            edges[EdgeSide::XMax.index()] = if ir + 1 == nr { EdgeCondition::Dirichlet } else { EdgeCondition::Linked };
            edges[EdgeSide::YMin.index()] = if it > 0 {
                EdgeCondition::Linked
            } else if rs[ir + 1] <= a + 1e-14 {
                EdgeCondition::Dirichlet
            } else {
                EdgeCondition::Natural
            };
            edges[EdgeSide::YMax.index()] = if it + 1 == nt { EdgeCondition::Natural } else { EdgeCondition::Linked };
            let n_r = if r_is_layer[ir] { g.n_layer } else { g.n };
            let n_t = if t_is_layer[it] { g.n_layer } else { g.n };
            let id = blocks.len();
            if ir > 0 {
                links.push(BlockLink { a: id - 1, a_side: EdgeSide::XMax, b: id, b_side: EdgeSide::XMin, sign: 1.0 });
            }
            if it > 0 {
                links.push(BlockLink { a: id - nr, a_side: EdgeSide::YMax, b: id, b_side: EdgeSide::YMin, sign: 1.0 });
            }
            blocks.push(Block { geometry, n: [n_r, n_t], edges, subdomain: 0 });
        }
    }
    Ok(Mesh { blocks, links })
}

/// Eigenpair number `index` (0-based) of the mixed sector problem, with the
/// nodal radius on the Neumann part of the ray `θ = 0`.
pub fn sector_mixed_solve(a: f64, wedge: f64, n: usize) -> Result<SectorSolution> {
    sector_mixed_solve_with(a, wedge, &SectorGrid::new(n), 1)
}

pub fn sector_mixed_solve_with(a: f64, wedge: f64, grid: &SectorGrid, index: usize) -> Result<SectorSolution> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidGeometry(format!("transition point a = {a} must lie in (0, 1)")));
    }
    solve_on_mesh(a, wedge, sector_mesh(a, wedge, grid)?, index)
}

/// The same problem with the whole ray `θ = 0` Neumann (`a → 0`).
pub fn sector_neumann_solve(wedge: f64, grid: &SectorGrid, index: usize) -> Result<SectorSolution> {
    solve_on_mesh(0.0, wedge, sector_mesh(0.0, wedge, grid)?, index)
}

fn solve_on_mesh(a: f64, wedge: f64, mesh: Mesh, index: usize) -> Result<SectorSolution> {
    let count = index + 4;
    let op = DiscreteOperator::assemble(&mesh, BoundaryMode::Eigen)?;
    let pairs = shift_invert_lowest(op.free_stiffness().as_ref(), op.free_mass(), count, 0.0)?;
    if index >= pairs.len() {
        return Err(Error::Numerical("not enough eigenvalues".into()));
    }
    let values: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let pair = pairs[index].clone();
    let nodal = op.expand(&pair.vector);
    let along = |r: f64| op.eval_at(&nodal, [r, 0.0]).unwrap_or(0.0);
    let reference = op.eval_at(&nodal, [0.7 * (0.5 * wedge).cos(), 0.7 * (0.5 * wedge).sin()]).unwrap_or(1.0);
    let ref_sign = if reference < 0.0 { -1.0 } else { 1.0 };
    let start = a + 1e-9;
    let samples = 4000;
    let mut nodal_radius = None;
    let mut prev = along(start.max(1e-9));
    let first = prev;
    for s in 1..samples {
        let r = start + (1.0 - start) * s as f64 / samples as f64;
        let v = along(r);
        if v != 0.0 && prev != 0.0 && (v < 0.0) != (prev < 0.0) {
            let r0 = start + (1.0 - start) * (s - 1) as f64 / samples as f64;
            nodal_radius = crate::numerics::bracketed_root(along, r0, r, 1e-12).ok();
            break;
        }
        prev = v;
    }
    let transition_sign = ref_sign * if first < 0.0 { -1.0 } else { 1.0 };
    Ok(SectorSolution { a, wedge, values, selected: index, pair, nodal_radius, transition_sign, op })
}
