//! Conforming spectral-element meshes built from rectangle and polar blocks.

use std::f64::consts::PI;

use serde::Serialize;

use crate::numerics::gll::LobattoRule;
use crate::partition::{CellGeometry, EdgeSide, Partition};
use crate::variation::field::AnalyticField;
use crate::{Error, Result};

/// Block shape. Polar blocks are centred at the origin; a polar block with
/// `r0 = 0` has a degenerate `XMin` edge and uses the Jacobi rule in `ξ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BlockGeometry {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Polar { r0: f64, r1: f64, t0: f64, t1: f64 },
    /// The image of `base` under `p ↦ p + t X(p)`.
    Mapped { base: Box<BlockGeometry>, field: AnalyticField, t: f64 },
}

impl From<CellGeometry> for BlockGeometry {
    fn from(c: CellGeometry) -> Self {
        match c {
            CellGeometry::Rect { x0, x1, y0, y1 } => BlockGeometry::Rect { x0, x1, y0, y1 },
            CellGeometry::Polar { r0, r1, t0, t1 } => BlockGeometry::Polar { r0, r1, t0, t1 },
        }
    }
}

/// Per-node geometric data: position, the two physical vectors multiplying
/// `∂_ξ u` and `∂_η u / s`, the area density and the scale `s`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NodeFrame {
    pub pos: [f64; 2],
    pub cols: [[f64; 2]; 2],
    pub dens: f64,
    /// `s` in `∂_η u / s`; zero at the polar origin, where the quotient is
    /// replaced by `∂_ξ ∂_η u / s'(ξ)`.
    pub s: f64,
    pub ds: f64,
}

impl BlockGeometry {
    pub fn is_origin_block(&self) -> bool {
        match self {
            BlockGeometry::Polar { r0, .. } => *r0 == 0.0,
            BlockGeometry::Mapped { base, .. } => base.is_origin_block(),
            BlockGeometry::Rect { .. } => false,
        }
    }

    pub(crate) fn frame(&self, xi: f64, eta: f64) -> NodeFrame {
        match self {
            BlockGeometry::Rect { x0, x1, y0, y1 } => NodeFrame {
                pos: [x0 + 0.5 * (x1 - x0) * (1.0 + xi), y0 + 0.5 * (y1 - y0) * (1.0 + eta)],
                cols: [[2.0 / (x1 - x0), 0.0], [0.0, 2.0 / (y1 - y0)]],
                dens: 0.25 * (x1 - x0) * (y1 - y0),
                s: 1.0,
                ds: 0.0,
            },
            BlockGeometry::Polar { r0, r1, t0, t1 } => {
                let rho = r0 + 0.5 * (r1 - r0) * (1.0 + xi);
                let th = t0 + 0.5 * (t1 - t0) * (1.0 + eta);
                let (s, c) = th.sin_cos();
                let hr = 0.5 * (r1 - r0);
                let ht = 0.5 * (t1 - t0);
                // The origin block's Jacobi weight carries the factor (1 + ξ).
                let dens = if *r0 == 0.0 { hr * hr * ht } else { rho * hr * ht };
                NodeFrame {
                    pos: [rho * c, rho * s],
                    cols: [[c / hr, s / hr], [-s / ht, c / ht]],
                    dens,
                    s: rho,
                    ds: hr,
                }
            }
            BlockGeometry::Mapped { base, field, t } => {
                let f = base.frame(xi, eta);
                let x = field.value(f.pos);
                let j = field.jacobian(f.pos);
                let a = [[1.0 + t * j[0][0], t * j[0][1]], [t * j[1][0], 1.0 + t * j[1][1]]];
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                // F^{-T}
                let inv_t = [[a[1][1] / det, -a[1][0] / det], [-a[0][1] / det, a[0][0] / det]];
                let map = |v: [f64; 2]| [inv_t[0][0] * v[0] + inv_t[0][1] * v[1], inv_t[1][0] * v[0] + inv_t[1][1] * v[1]];
                NodeFrame {
                    pos: [f.pos[0] + t * x[0], f.pos[1] + t * x[1]],
                    cols: [map(f.cols[0]), map(f.cols[1])],
                    dens: f.dens * det,
                    s: f.s,
                    ds: f.ds,
                }
            }
        }
    }

    /// Reference coordinates of a physical point (unmapped blocks only).
    pub fn locate(&self, p: [f64; 2], tol: f64) -> Option<[f64; 2]> {
        match *self {
            BlockGeometry::Rect { x0, x1, y0, y1 } => CellGeometry::Rect { x0, x1, y0, y1 }.reference_coords(p, tol),
            BlockGeometry::Polar { r0, r1, t0, t1 } => CellGeometry::Polar { r0, r1, t0, t1 }.reference_coords(p, tol),
            BlockGeometry::Mapped { .. } => None,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            BlockGeometry::Rect { x0, x1, y0, y1 } => (x1 - x0).hypot(y1 - y0),
            BlockGeometry::Polar { r1, .. } => 2.0 * r1,
            BlockGeometry::Mapped { base, .. } => base.diameter(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeCondition {
    /// Homogeneous Dirichlet, or prescribed data in a Helmholtz solve.
    Dirichlet,
    /// Natural (Neumann) condition.
    Natural,
    /// Glued to another block through a [`BlockLink`].
    Linked,
    /// Collapsed to a single point (polar origin).
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Block {
    pub geometry: BlockGeometry,
    pub n: [usize; 2],
    pub edges: [EdgeCondition; 4],
    /// Subdomain of the originating partition, if any.
    pub subdomain: usize,
}

/// Glues edge `a_side` of block `a` to edge `b_side` of block `b`:
/// `u_b = sign · u_a` at coincident nodes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockLink {
    pub a: usize,
    pub a_side: EdgeSide,
    pub b: usize,
    pub b_side: EdgeSide,
    pub sign: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mesh {
    pub blocks: Vec<Block>,
    pub links: Vec<BlockLink>,
}

/// Quadrature rules of one block.
#[derive(Clone, Debug)]
pub(crate) struct BlockRules {
    pub xi: LobattoRule,
    pub eta: LobattoRule,
}

impl Block {
    pub(crate) fn rules(&self) -> Result<BlockRules> {
        let xi = if self.geometry.is_origin_block() {
            LobattoRule::jacobi01(self.n[0])?
        } else {
            LobattoRule::legendre(self.n[0])?
        };
        Ok(BlockRules { xi, eta: LobattoRule::legendre(self.n[1])? })
    }

    pub fn node_count(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// Local node indices along an edge, in increasing parameter order.
    pub fn edge_nodes(&self, side: EdgeSide) -> Vec<usize> {
        let [nx, ny] = self.n;
        match side {
            EdgeSide::XMin => (0..ny).map(|j| j * nx).collect(),
            EdgeSide::XMax => (0..ny).map(|j| j * nx + nx - 1).collect(),
            EdgeSide::YMin => (0..nx).collect(),
            EdgeSide::YMax => (0..nx).map(|i| (ny - 1) * nx + i).collect(),
        }
    }
}

/// Mesh options: nodes per direction in every block and optional extra
/// subdivisions (`split` cells per cell in each direction).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeshOptions {
    pub n: usize,
}

impl Mesh {
    /// Blocks from the partition's cell layout; cut edges get sign −1.
    pub fn from_partition(p: &Partition, n: usize) -> Result<Self> {
        Self::from_cells(p, n, None)
    }

    /// Blocks of one subdomain; its whole boundary is of Dirichlet type.
    pub fn for_subdomain(p: &Partition, sub: usize, n: usize) -> Result<Self> {
        Self::from_cells(p, n, Some(sub))
    }

    fn from_cells(p: &Partition, n: usize, only: Option<usize>) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidGeometry(format!("grid size {n} too small")));
        }
        let keep: Vec<usize> =
            (0..p.layout.cells.len()).filter(|&c| only.is_none_or(|s| p.layout.cells[c].subdomain == s)).collect();
        let mut index = vec![usize::MAX; p.layout.cells.len()];
        for (k, &c) in keep.iter().enumerate() {
            index[c] = k;
        }
        let mut blocks: Vec<Block> = keep
            .iter()
            .map(|&c| {
                let cell = &p.layout.cells[c];
                let geometry = BlockGeometry::from(cell.geometry);
                let mut edges = [EdgeCondition::Dirichlet; 4];
                if geometry.is_origin_block() {
                    edges[EdgeSide::XMin.index()] = EdgeCondition::Degenerate;
                }
                Block { geometry, n: [n, n], edges, subdomain: cell.subdomain }
            })
            .collect();
        let mut links = Vec::new();
        for l in &p.layout.links {
            let (a, b) = (index[l.a], index[l.b]);
            if a == usize::MAX || b == usize::MAX {
                continue;
            }
            if only.is_some() && l.cut {
                continue;
            }
            blocks[a].edges[l.a_side.index()] = EdgeCondition::Linked;
            blocks[b].edges[l.b_side.index()] = EdgeCondition::Linked;
            links.push(BlockLink { a, a_side: l.a_side, b, b_side: l.b_side, sign: if l.cut { -1.0 } else { 1.0 } });
        }
        Ok(Mesh { blocks, links })
    }

    /// Uniform polar mesh of the unit disk with the given radial breaks.
    pub fn disk(n: usize, radial_breaks: &[f64]) -> Result<Self> {
        let p = crate::partition::build_disk_partition(&[])?;
        let mut m = Self::from_partition(&p, n)?;
        if radial_breaks.is_empty() {
            return Ok(m);
        }
        m = m.refined_radially(radial_breaks);
        Ok(m)
    }

    /// Splits every polar block at the given radii.
    pub fn refined_radially(&self, breaks: &[f64]) -> Self {
        let mut blocks = Vec::new();
        let mut links = Vec::new();
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        for b in &self.blocks {
            let BlockGeometry::Polar { r0, r1, t0, t1 } = b.geometry else {
                pieces.push(vec![blocks.len()]);
                blocks.push(b.clone());
                continue;
            };
            let mut rs = vec![r0];
            rs.extend(breaks.iter().copied().filter(|&r| r > r0 + 1e-12 && r < r1 - 1e-12));
            rs.push(r1);
            let mut ids = Vec::new();
            for k in 0..rs.len() - 1 {
                let mut nb = b.clone();
                nb.geometry = BlockGeometry::Polar { r0: rs[k], r1: rs[k + 1], t0, t1 };
                if k > 0 {
                    nb.edges[EdgeSide::XMin.index()] = EdgeCondition::Linked;
                }
                if k + 2 < rs.len() {
                    nb.edges[EdgeSide::XMax.index()] = EdgeCondition::Linked;
                }
                if k > 0 {
                    links.push(BlockLink {
                        a: blocks.len() - 1,
                        a_side: EdgeSide::XMax,
                        b: blocks.len(),
                        b_side: EdgeSide::XMin,
                        sign: 1.0,
                    });
                }
                ids.push(blocks.len());
                blocks.push(nb);
            }
            pieces.push(ids);
        }
        // Angular links connect matching radial pieces.
        for l in &self.links {
            let (pa, pb) = (&pieces[l.a], &pieces[l.b]);
            if matches!(l.a_side, EdgeSide::YMin | EdgeSide::YMax) && pa.len() == pb.len() {
                for (&a, &b) in pa.iter().zip(pb) {
                    links.push(BlockLink { a, a_side: l.a_side, b, b_side: l.b_side, sign: l.sign });
                }
            } else {
                links.push(BlockLink { a: pa[pa.len() - 1], a_side: l.a_side, b: pb[0], b_side: l.b_side, sign: l.sign });
            }
        }
        Mesh { blocks, links }
    }

    /// Every block mapped by `p ↦ p + t X(p)`.
    pub fn mapped(&self, field: &AnalyticField, t: f64) -> Self {
        let mut m = self.clone();
        for b in m.blocks.iter_mut() {
            b.geometry = BlockGeometry::Mapped { base: Box::new(b.geometry.clone()), field: field.clone(), t };
        }
        m
    }

    pub fn node_count(&self) -> usize {
        self.blocks.iter().map(|b| b.node_count()).sum()
    }

    /// Single rectangle `(0, w) × (0, h)` split into `nx × ny` equal blocks.
    pub fn rectangle(w: f64, h: f64, nx: usize, ny: usize, n: usize) -> Self {
        let mut blocks = Vec::new();
        let mut links = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let geometry = BlockGeometry::Rect {
                    x0: w * i as f64 / nx as f64,
                    x1: w * (i + 1) as f64 / nx as f64,
                    y0: h * j as f64 / ny as f64,
                    y1: h * (j + 1) as f64 / ny as f64,
                };
                let mut edges = [EdgeCondition::Dirichlet; 4];
                if i > 0 {
                    edges[0] = EdgeCondition::Linked;
                }
                if i + 1 < nx {
                    edges[1] = EdgeCondition::Linked;
                }
                if j > 0 {
                    edges[2] = EdgeCondition::Linked;
                }
                if j + 1 < ny {
                    edges[3] = EdgeCondition::Linked;
                }
                let id = j * nx + i;
                if i + 1 < nx {
                    links.push(BlockLink { a: id, a_side: EdgeSide::XMax, b: id + 1, b_side: EdgeSide::XMin, sign: 1.0 });
                }
                if j + 1 < ny {
                    links.push(BlockLink { a: id, a_side: EdgeSide::YMax, b: id + nx, b_side: EdgeSide::YMin, sign: 1.0 });
                }
                blocks.push(Block { geometry, n: [n, n], edges, subdomain: 0 });
            }
        }
        Mesh { blocks, links }
    }

    /// Square `(0, π)²` as one block; used by tests and examples.
    pub fn square(n: usize) -> Self {
        Self::rectangle(PI, PI, 1, 1, n)
    }
}
