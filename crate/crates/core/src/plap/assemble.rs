//! Galerkin assembly on a block mesh with signed gluing of interface nodes.

use faer::Mat;
use serde::Serialize;

use super::mesh::{BlockRules, EdgeCondition, Mesh};
use crate::numerics::gll::lagrange_basis;
use crate::numerics::linalg::matvec;
use crate::partition::EdgeSide;
use crate::tolerances::POINT_MATCH;
use crate::{Error, Result};

/// Treatment of Dirichlet nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryMode {
    /// Homogeneous Dirichlet: the nodes are removed.
    Eigen,
    /// Prescribed data: the nodes are kept as bound unknowns after the free ones.
    Helmholtz,
}

/// Role of a mesh node in the reduced system: `u_node = sign · x[index]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Slot {
    Free { index: usize, sign: f64 },
    Bound { index: usize, sign: f64 },
    Zero,
}

/// Assembled stiffness/mass pair. Free unknowns come first, bound ones after.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub mesh: Mesh,
    pub mode: BoundaryMode,
    pub offsets: Vec<usize>,
    pub positions: Vec<[f64; 2]>,
    pub slots: Vec<Slot>,
    pub n_free: usize,
    pub n_bound: usize,
    /// Representative node of each unknown.
    pub representatives: Vec<usize>,
    pub stiffness: Mat<f64>,
    pub mass: Vec<f64>,
    pub(crate) rules: Vec<BlockRules>,
}

struct SignedUnionFind {
    parent: Vec<usize>,
    /// `u_i = parity[i] · u_parent[i]`.
    parity: Vec<f64>,
    odd: Vec<bool>,
    dirichlet: Vec<bool>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), parity: vec![1.0; n], odd: vec![false; n], dirichlet: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, f64) {
        let mut path = Vec::new();
        let mut r = x;
        while self.parent[r] != r {
            path.push(r);
            r = self.parent[r];
        }
        // Compress: accumulate parity from the root downwards.
        for &v in path.iter().rev() {
            let p = self.parent[v];
            if p != r {
                self.parity[v] *= self.parity[p];
            }
            self.parent[v] = r;
        }
        (r, if x == r { 1.0 } else { self.parity[x] })
    }

    /// Imposes `u_b = sign · u_a`.
    fn union(&mut self, a: usize, b: usize, sign: f64) {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            if sa * sign != sb {
                self.odd[ra] = true;
            }
            return;
        }
        // u_rb = sb·u_b = sb·sign·sa·u_ra
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[gone] = keep;
        self.parity[gone] = sb * sign * sa;
        self.odd[keep] |= self.odd[gone];
        self.dirichlet[keep] |= self.dirichlet[gone];
    }
}

impl DiscreteOperator {
    pub fn assemble(mesh: &Mesh, mode: BoundaryMode) -> Result<Self> {
        let rules: Vec<BlockRules> = mesh.blocks.iter().map(|b| b.rules()).collect::<Result<_>>()?;
        let mut offsets = Vec::with_capacity(mesh.blocks.len());
        let mut total = 0;
        for b in &mesh.blocks {
            offsets.push(total);
            total += b.node_count();
        }
        let mut positions = vec![[0.0; 2]; total];
        for (bi, b) in mesh.blocks.iter().enumerate() {
            let r = &rules[bi];
            for j in 0..b.n[1] {
                for i in 0..b.n[0] {
                    positions[offsets[bi] + j * b.n[0] + i] = b.geometry.frame(r.xi.nodes[i], r.eta.nodes[j]).pos;
                }
            }
        }
        let mut uf = SignedUnionFind::new(total);
        for (bi, b) in mesh.blocks.iter().enumerate() {
            for side in EdgeSide::ALL {
                let nodes = b.edge_nodes(side);
                match b.edges[side.index()] {
                    EdgeCondition::Degenerate => {
                        for w in nodes.windows(2) {
                            uf.union(offsets[bi] + w[0], offsets[bi] + w[1], 1.0);
                        }
                    }
                    EdgeCondition::Dirichlet => {
                        for &n in &nodes {
                            let (r, _) = uf.find(offsets[bi] + n);
                            uf.dirichlet[r] = true;
                        }
                    }
                    _ => {}
                }
            }
        }
        for l in &mesh.links {
            let (ba, bb) = (&mesh.blocks[l.a], &mesh.blocks[l.b]);
            let scale = ba.geometry.diameter().max(bb.geometry.diameter());
            let na = ba.edge_nodes(l.a_side);
            let nb = bb.edge_nodes(l.b_side);
            if na.len() != nb.len() {
                return Err(Error::InvalidGeometry(format!("blocks {} and {} do not conform", l.a, l.b)));
            }
            for &ia in &na {
                let ga = offsets[l.a] + ia;
                let pa = positions[ga];
                let m = nb.iter().map(|&ib| offsets[l.b] + ib).find(|&gb| {
                    let pb = positions[gb];
                    (pa[0] - pb[0]).hypot(pa[1] - pb[1]) < POINT_MATCH * scale.max(1.0) * 10.0
                });
                let Some(gb) = m else {
                    return Err(Error::InvalidGeometry(format!("no matching node across link {} - {}", l.a, l.b)));
                };
                uf.union(ga, gb, l.sign);
            }
        }

        let mut slots = vec![Slot::Zero; total];
        let mut root_slot: Vec<Option<(bool, usize)>> = vec![None; total];
        let (mut n_free, mut n_bound) = (0, 0);
        let mut free_reps = Vec::new();
        let mut bound_reps = Vec::new();
        for g in 0..total {
            let (r, s) = uf.find(g);
            if uf.odd[r] || (uf.dirichlet[r] && mode == BoundaryMode::Eigen) {
                continue;
            }
            let (bound, idx) = *root_slot[r].get_or_insert_with(|| {
                if uf.dirichlet[r] {
                    n_bound += 1;
                    bound_reps.push(g);
                    (true, n_bound - 1)
                } else {
                    n_free += 1;
                    free_reps.push(g);
                    (false, n_free - 1)
                }
            });
            slots[g] = if bound { Slot::Bound { index: idx, sign: s } } else { Slot::Free { index: idx, sign: s } };
        }
        // Relative sign to the representative so that x[index] = u(rep).
        let mut rep_sign = vec![1.0; n_free + n_bound];
        for (k, &g) in free_reps.iter().chain(bound_reps.iter()).enumerate() {
            rep_sign[k] = match slots[g] {
                Slot::Free { sign, .. } | Slot::Bound { sign, .. } => sign,
                Slot::Zero => 1.0,
            };
        }
        let dim = n_free + n_bound;
        for s in slots.iter_mut() {
            match s {
                Slot::Free { index, sign } => *sign *= rep_sign[*index],
                Slot::Bound { index, sign } => {
                    *index += n_free;
                    *sign *= rep_sign[*index];
                }
                Slot::Zero => {}
            }
        }
        let mut representatives = free_reps;
        representatives.extend(bound_reps);

        let mut stiffness = Mat::<f64>::zeros(dim, dim);
        let mut mass = vec![0.0; dim];
        let slot_of = |g: usize| match slots[g] {
            Slot::Free { index, sign } | Slot::Bound { index, sign } => Some((index, sign)),
            Slot::Zero => None,
        };
        for (bi, b) in mesh.blocks.iter().enumerate() {
            let r = &rules[bi];
            let [nx, ny] = b.n;
            let off = offsets[bi];
            let mut row: Vec<(usize, [f64; 2])> = Vec::new();
            for j in 0..ny {
                for i in 0..nx {
                    let f = b.geometry.frame(r.xi.nodes[i], r.eta.nodes[j]);
                    let w = r.xi.weights[i] * r.eta.weights[j] * f.dens;
                    if let Some((k, _)) = slot_of(off + j * nx + i) {
                        mass[k] += w;
                    }
                    row.clear();
                    for m in 0..nx {
                        let d = r.xi.d[(i, m)];
                        row.push((j * nx + m, [f.cols[0][0] * d, f.cols[0][1] * d]));
                    }
                    if f.s > 0.0 {
                        for l in 0..ny {
                            let d = r.eta.d[(j, l)] / f.s;
                            row.push((l * nx + i, [f.cols[1][0] * d, f.cols[1][1] * d]));
                        }
                    } else {
                        for l in 0..ny {
                            for m in 0..nx {
                                let d = r.eta.d[(j, l)] * r.xi.d[(i, m)] / f.ds;
                                row.push((l * nx + m, [f.cols[1][0] * d, f.cols[1][1] * d]));
                            }
                        }
                    }
                    let mapped: Vec<(usize, [f64; 2])> = row
                        .iter()
                        .filter_map(|&(loc, g)| slot_of(off + loc).map(|(k, s)| (k, [s * g[0], s * g[1]])))
                        .collect();
                    for &(ka, ga) in &mapped {
                        for &(kb, gb) in &mapped {
                            stiffness[(ka, kb)] += w * (ga[0] * gb[0] + ga[1] * gb[1]);
                        }
                    }
                }
            }
        }
        Ok(DiscreteOperator {
            mesh: mesh.clone(),
            mode,
            offsets,
            positions,
            slots,
            n_free,
            n_bound,
            representatives,
            stiffness,
            mass,
            rules,
        })
    }

    pub fn dim(&self) -> usize {
        self.n_free + self.n_bound
    }

    /// Free-free block of the stiffness matrix.
    pub fn free_stiffness(&self) -> Mat<f64> {
        self.stiffness.submatrix(0, 0, self.n_free, self.n_free).to_owned()
    }

    pub fn free_mass(&self) -> &[f64] {
        &self.mass[..self.n_free]
    }

    /// Nodal values of a reduced vector (free part, optionally followed by
    /// the bound part).
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        self.slots
            .iter()
            .map(|s| match *s {
                Slot::Free { index, sign } | Slot::Bound { index, sign } => x.get(index).map_or(0.0, |v| sign * v),
                Slot::Zero => 0.0,
            })
            .collect()
    }

    /// Values of `f` at the representative of each bound unknown.
    pub fn bound_values(&self, mut f: impl FnMut([f64; 2]) -> f64) -> Vec<f64> {
        (self.n_free..self.dim()).map(|k| f(self.positions[self.representatives[k]])).collect()
    }

    /// Reduced free vector sampling `f` at the representatives.
    pub fn free_values(&self, mut f: impl FnMut([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.n_free).map(|k| f(self.positions[self.representatives[k]])).collect()
    }

    /// `xᵀ (K − λM) y` over all unknowns.
    pub fn energy(&self, x: &[f64], y: &[f64], lambda: f64) -> f64 {
        let mut ky = vec![0.0; self.dim()];
        matvec(self.stiffness.as_ref(), y, &mut ky);
        x.iter().zip(&ky).zip(y).zip(&self.mass).map(|(((a, k), b), m)| a * (k - lambda * m * b)).sum()
    }

    /// `∫ u v` with the lumped mass.
    pub fn mass_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).zip(&self.mass).map(|((a, b), m)| a * b * m).sum()
    }

    /// Interpolated value at a physical point, from nodal values.
    /// Mapped blocks are not searched.
    pub fn eval_at(&self, nodal: &[f64], p: [f64; 2]) -> Option<f64> {
        for (bi, b) in self.mesh.blocks.iter().enumerate() {
            let Some([xi, eta]) = b.geometry.locate(p, 1e-12) else { continue };
            let r = &self.rules[bi];
            let (bx, _) = lagrange_basis(&r.xi.nodes, xi);
            let (by, _) = lagrange_basis(&r.eta.nodes, eta);
            let off = self.offsets[bi];
            let mut v = 0.0;
            for j in 0..b.n[1] {
                for i in 0..b.n[0] {
                    v += by[j] * bx[i] * nodal[off + j * b.n[0] + i];
                }
            }
            return Some(v);
        }
        None
    }
}

impl DiscreteOperator {
    /// Interpolated value and gradient at `p`, using the block that contains
    /// `probe` (a point near `p` on the wanted side of an interface).
    pub fn eval_grad_at(&self, nodal: &[f64], p: [f64; 2], probe: [f64; 2]) -> Option<(f64, [f64; 2])> {
        let bi = self.mesh.blocks.iter().position(|b| b.geometry.locate(probe, 1e-12).is_some())?;
        let b = &self.mesh.blocks[bi];
        let [xi, eta] = b.geometry.locate(p, 1e-7 * b.geometry.diameter())?;
        let (xi, eta) = (xi.clamp(-1.0, 1.0), eta.clamp(-1.0, 1.0));
        let r = &self.rules[bi];
        let (bx, dx) = lagrange_basis(&r.xi.nodes, xi);
        let (by, dy) = lagrange_basis(&r.eta.nodes, eta);
        let off = self.offsets[bi];
        let (mut v, mut gx, mut ge) = (0.0, 0.0, 0.0);
        for j in 0..b.n[1] {
            for i in 0..b.n[0] {
                let u = nodal[off + j * b.n[0] + i];
                v += by[j] * bx[i] * u;
                gx += by[j] * dx[i] * u;
                ge += dy[j] * bx[i] * u;
            }
        }
        let f = b.geometry.frame(xi, eta);
        if f.s <= 0.0 {
            return None;
        }
        let ge = ge / f.s;
        Some((v, [f.cols[0][0] * gx + f.cols[1][0] * ge, f.cols[0][1] * gx + f.cols[1][1] * ge]))
    }
}

/// Quadrature data at one mesh node.
#[derive(Clone, Copy, Debug)]
pub struct QuadPoint {
    pub pos: [f64; 2],
    pub weight: f64,
    pub value: f64,
    pub grad: [f64; 2],
}

impl DiscreteOperator {
    /// Values, gradients and quadrature weights at every block node.
    pub fn quadrature(&self, nodal: &[f64]) -> Vec<QuadPoint> {
        let mut out = Vec::with_capacity(nodal.len());
        for (bi, b) in self.mesh.blocks.iter().enumerate() {
            let r = &self.rules[bi];
            let [nx, ny] = b.n;
            let off = self.offsets[bi];
            let u = |i: usize, j: usize| nodal[off + j * nx + i];
            for j in 0..ny {
                for i in 0..nx {
                    let f = b.geometry.frame(r.xi.nodes[i], r.eta.nodes[j]);
                    let du_xi: f64 = (0..nx).map(|m| r.xi.d[(i, m)] * u(m, j)).sum();
                    let du_eta = if f.s > 0.0 {
                        (0..ny).map(|l| r.eta.d[(j, l)] * u(i, l)).sum::<f64>() / f.s
                    } else {
                        let mut s = 0.0;
                        for l in 0..ny {
                            for m in 0..nx {
                                s += r.eta.d[(j, l)] * r.xi.d[(i, m)] * u(m, l);
                            }
                        }
                        s / f.ds
                    };
                    out.push(QuadPoint {
                        pos: f.pos,
                        weight: r.xi.weights[i] * r.eta.weights[j] * f.dens,
                        value: u(i, j),
                        grad: [
                            f.cols[0][0] * du_xi + f.cols[1][0] * du_eta,
                            f.cols[0][1] * du_xi + f.cols[1][1] * du_eta,
                        ],
                    });
                }
            }
        }
        out
    }

    /// Segments across which linked nodes change sign (the cuts).
    pub fn cut_segments(&self) -> Vec<crate::partition::Segment> {
        let mut out = Vec::new();
        for l in self.mesh.links.iter().filter(|l| l.sign < 0.0) {
            let b = &self.mesh.blocks[l.a];
            let nodes = b.edge_nodes(l.a_side);
            let off = self.offsets[l.a];
            let (p, q) = (self.positions[off + nodes[0]], self.positions[off + nodes[nodes.len() - 1]]);
            out.push(crate::partition::Segment::new(p, q));
        }
        out
    }
}
