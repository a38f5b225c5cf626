//! Constrained Helmholtz solves on the subdomains, the two-sided
//! Dirichlet-to-Neumann form and the Hessian of the partition energy.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use serde::Serialize;

use super::boundary::BoundaryField;
use super::criticality::CriticalityData;
use super::field::DeformationField;
use super::groundstate::{GroundStateData, ARC_SAMPLES};
use super::hadamard::normal_trace;
use crate::numerics::linalg::{shift_invert_lowest, sym_eigen};
use crate::partition::{ArcSide, NormalFrame, Partition};
use crate::plap::assemble::{BoundaryMode, DiscreteOperator};
use crate::plap::mesh::Mesh;
use crate::tolerances::FORM_ZERO;
use crate::Result;

/// Where a bound unknown sits on Σ: arc, parameter and the sign `χ_i`.
#[derive(Clone, Copy, Debug)]
struct BoundSlot {
    arc: usize,
    t: f64,
    chi: f64,
}

/// Solver for `Δu + λu = 0` in `Ω_i`, `u = g` on `∂Ω_i`, `∫ u ψ = 0`.
#[derive(Debug)]
pub struct SubdomainSolver {
    pub subdomain: usize,
    pub op: DiscreteOperator,
    /// Discrete ground-state eigenvalue of the subdomain.
    pub lambda: f64,
    psi: Vec<f64>,
    lu: PartialPivLu<f64>,
    slots: Vec<Option<BoundSlot>>,
    /// `K_bf ψ`: pairing with bound data gives the discrete flux moment.
    flux_psi: Vec<f64>,
}

impl SubdomainSolver {
    pub fn new(p: &Partition, frame: &NormalFrame, sub: usize, n: usize) -> Result<Self> {
        let op = DiscreteOperator::assemble(&Mesh::for_subdomain(p, sub, n)?, BoundaryMode::Helmholtz)?;
        let (nf, nb) = (op.n_free, op.n_bound);
        let pair = shift_invert_lowest(op.free_stiffness().as_ref(), op.free_mass(), 1, 0.0)?.remove(0);
        let (lambda, psi) = (pair.value, pair.vector);
        let mut b = Mat::<f64>::zeros(nf + 1, nf + 1);
        for j in 0..nf {
            for i in 0..nf {
                b[(i, j)] = op.stiffness[(i, j)];
            }
            b[(j, j)] -= lambda * op.mass[j];
            b[(j, nf)] = op.mass[j] * psi[j];
            b[(nf, j)] = op.mass[j] * psi[j];
        }
        let lu = b.partial_piv_lu();
        let slots = (nf..nf + nb)
            .map(|k| {
                let node = op.representatives[k];
                let pos = op.positions[node];
                let (arc, t) = p.arc_at(pos)?;
                let a = &p.interfaces[arc];
                let side = if a.left == sub && a.right == sub {
                    // Slit: pick the side from the block the node belongs to.
                    let bi = op.offsets.iter().rposition(|&o| o <= node).unwrap_or(0);
                    let c = op.mesh.blocks[bi].geometry.frame(0.0, 0.0).pos;
                    let nl = a.geometry.left_normal();
                    if (c[0] - pos[0]) * nl[0] + (c[1] - pos[1]) * nl[1] > 0.0 {
                        ArcSide::Left
                    } else {
                        ArcSide::Right
                    }
                } else if a.left == sub {
                    ArcSide::Left
                } else if a.right == sub {
                    ArcSide::Right
                } else {
                    return None;
                };
                Some(BoundSlot { arc, t, chi: frame.chi(arc, side) })
            })
            .collect();
        let flux_psi = (nf..nf + nb).map(|r| (0..nf).map(|j| op.stiffness[(r, j)] * psi[j]).sum()).collect();
        Ok(SubdomainSolver { subdomain: sub, op, lambda, psi, lu, slots, flux_psi })
    }

    /// Bound data `χ_i f` at the bound unknowns.
    pub fn boundary_data(&self, f: &BoundaryField) -> Vec<f64> {
        self.slots.iter().map(|s| s.map_or(0.0, |s| s.chi * f.eval(s.arc, s.t))).collect()
    }

    /// Full solution vectors (free part followed by the data) for several
    /// boundary fields at once.
    pub fn solve_many(&self, fields: &[&BoundaryField]) -> Vec<Vec<f64>> {
        let (nf, nb) = (self.op.n_free, self.op.n_bound);
        let data: Vec<Vec<f64>> = fields.iter().map(|f| self.boundary_data(f)).collect();
        let rhs = Mat::<f64>::from_fn(nf + 1, fields.len(), |i, c| {
            if i == nf {
                return 0.0;
            }
            -(0..nb).map(|b| self.op.stiffness[(i, nf + b)] * data[c][b]).sum::<f64>()
        });
        let x = self.lu.solve(&rhs);
        data.into_iter()
            .enumerate()
            .map(|(c, g)| {
                let mut u: Vec<f64> = (0..nf).map(|i| x[(i, c)]).collect();
                u.extend(g);
                u
            })
            .collect()
    }

    /// `∫_{∂Ω_i} χ_i f ∂ψ/∂n` in its discrete (variationally consistent) form.
    pub fn discrete_moment(&self, f: &BoundaryField) -> f64 {
        self.boundary_data(f).iter().zip(&self.flux_psi).map(|(g, r)| g * r).sum()
    }

    /// `g · ((K − λM) u)_b`: the Dirichlet data of one solution paired with
    /// the discrete normal flux of another.
    fn flux_pairing(&self, g: &[f64], u: &[f64]) -> f64 {
        let nf = self.op.n_free;
        let mut ku = vec![0.0; u.len()];
        crate::numerics::linalg::matvec(self.op.stiffness.as_ref(), u, &mut ku);
        g.iter().enumerate().map(|(b, gb)| gb * (ku[nf + b] - self.lambda * self.op.mass[nf + b] * u[nf + b])).sum()
    }

    pub fn ground_state(&self) -> &[f64] {
        &self.psi
    }
}

/// Helmholtz solvers for all subdomains of a partition.
#[derive(Debug)]
pub struct DtnContext {
    pub solvers: Vec<SubdomainSolver>,
    pub frame: NormalFrame,
    pub n: usize,
}

impl DtnContext {
    pub fn new(p: &Partition, frame: &NormalFrame, n: usize) -> Result<Self> {
        let solvers = (0..p.subdomains.len()).map(|s| SubdomainSolver::new(p, frame, s, n)).collect::<Result<Vec<_>>>()?;
        Ok(DtnContext { solvers, frame: frame.clone(), n })
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.solvers.iter().map(|s| s.lambda).collect()
    }

    /// Gram matrix `Σ_i ∫ (∇u_a·∇u_b − λ u_a u_b)` in the energy form.
    pub fn form_matrix(&self, basis: &[BoundaryField]) -> Vec<Vec<f64>> {
        let m = basis.len();
        let refs: Vec<&BoundaryField> = basis.iter().collect();
        let mut g = vec![vec![0.0; m]; m];
        for s in &self.solvers {
            let u = s.solve_many(&refs);
            for a in 0..m {
                for b in a..m {
                    let v = s.op.energy(&u[a], &u[b], s.lambda);
                    g[a][b] += v;
                    if a != b {
                        g[b][a] += v;
                    }
                }
            }
        }
        g
    }

    /// `a_{P,ν}(f, g)` in the energy form.
    pub fn form(&self, f: &BoundaryField, g: &BoundaryField) -> f64 {
        self.form_matrix(&[f.clone(), g.clone()])[0][1]
    }

    /// `a_{P,ν}(f, g)` through the boundary pairing `Σ_i ∫ g ∂u_f/∂n`.
    pub fn flux_form(&self, f: &BoundaryField, g: &BoundaryField) -> f64 {
        self.solvers
            .iter()
            .map(|s| {
                let u = s.solve_many(&[f]).remove(0);
                s.flux_pairing(&s.boundary_data(g), &u)
            })
            .sum()
    }

    /// Second derivative of the partition energy along `X₁, X₂`:
    /// `2 a(ρ X₁·ν, ρ X₂·ν)` by the boundary pairing.
    pub fn hessian(&self, p: &Partition, crit: &CriticalityData, x1: &DeformationField, x2: &DeformationField) -> Result<f64> {
        let h1 = weighted_trace(p, &self.frame, crit, x1)?;
        let h2 = weighted_trace(p, &self.frame, crit, x2)?;
        Ok(2.0 * self.flux_form(&h1, &h2))
    }
}

/// `ρ (X·ν)`, zero at the arc endpoints.
pub fn weighted_trace(p: &Partition, frame: &NormalFrame, crit: &CriticalityData, x: &DeformationField) -> Result<BoundaryField> {
    let mut h = crit.rho.times(&normal_trace(x, p, frame, ARC_SAMPLES)?);
    h.zero_at_endpoints();
    Ok(h)
}

/// Hessian of the partition energy at a critical partition.
pub fn hessian_form(
    p: &Partition,
    frame: &NormalFrame,
    crit: &CriticalityData,
    x1: &DeformationField,
    x2: &DeformationField,
    n: usize,
) -> Result<f64> {
    crit.require_critical()?;
    DtnContext::new(p, frame, n)?.hessian(p, crit, x1, x2)
}

/// `(1 − t²) T_m(t)` on each arc for `m < per_arc`, zero elsewhere.
pub fn arc_polynomial_basis(p: &Partition, per_arc: usize, samples: usize) -> Result<Vec<BoundaryField>> {
    let mut out = Vec::with_capacity(per_arc * p.interfaces.len());
    for arc in 0..p.interfaces.len() {
        for m in 0..per_arc {
            let mut f = BoundaryField::sample(p, samples, |a, t, _| {
                if a == arc {
                    (1.0 - t * t) * (m as f64 * t.clamp(-1.0, 1.0).acos()).cos()
                } else {
                    0.0
                }
            })?;
            f.zero_at_endpoints();
            out.push(f);
        }
    }
    Ok(out)
}

/// `∫ χ_i f ∂ψ_i/∂ν_i` for every subdomain, by quadrature on the sampled
/// normal derivatives.
pub fn moments(p: &Partition, frame: &NormalFrame, gs: &GroundStateData, f: &BoundaryField) -> Vec<f64> {
    let mut out = vec![0.0; p.subdomains.len()];
    for a in &p.interfaces {
        for (side, sub) in [(ArcSide::Left, a.left), (ArcSide::Right, a.right)] {
            let chi = frame.chi(a.id, side);
            out[sub] += chi * gs.side(side).integrate_arc_with(a.id, |t, v| v * f.eval(a.id, t));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DtnFormReport {
    pub basis_size: usize,
    /// Dimension of the moment-constrained subspace.
    pub constrained_size: usize,
    /// Form on an orthonormal basis of the constrained subspace.
    pub matrix: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub n_minus: usize,
    pub n_zero: usize,
    /// Largest `|∫ χ_i f ∂ψ_i/∂ν_i|` over the constrained basis.
    pub moment_residual: f64,
    pub lambdas: Vec<f64>,
}

/// Gram matrix of the DtN form on the moment-constrained span of `basis`
/// and its inertia.
pub fn dtn_form_matrix(
    p: &Partition,
    frame: &NormalFrame,
    gs: &GroundStateData,
    basis: &[BoundaryField],
    n: usize,
) -> Result<DtnFormReport> {
    let ctx = DtnContext::new(p, frame, n)?;
    dtn_form_matrix_with(&ctx, p, gs, basis)
}

/// As [`dtn_form_matrix`] with prebuilt solvers.
pub fn dtn_form_matrix_with(ctx: &DtnContext, p: &Partition, gs: &GroundStateData, basis: &[BoundaryField]) -> Result<DtnFormReport> {
    let k = p.subdomains.len();
    let nb = basis.len();
    let c: Vec<Vec<f64>> = basis.iter().map(|f| moments(p, &ctx.frame, gs, f)).collect();
    // Null space of the nb × k moment matrix from the eigenvectors of CᵀC.
    let ctc = Mat::<f64>::from_fn(nb, nb, |a, b| (0..k).map(|i| c[a][i] * c[b][i]).sum());
    let (vals, vecs) = sym_eigen(ctc.as_ref())?;
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rank = vals.iter().filter(|&&v| v > 1e-16 * top).count().min(k);
    let z: Vec<usize> = (0..nb - rank).collect();
    let fields: Vec<BoundaryField> = z
        .iter()
        .map(|&j| basis.iter().enumerate().fold(basis[0].scaled(0.0), |f, (a, b)| f.axpy(vecs[(a, j)], b)))
        .collect();
    let moment_residual = fields
        .iter()
        .flat_map(|f| moments(p, &ctx.frame, gs, f))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let g = ctx.form_matrix(&fields);
    let m = fields.len();
    let gm = Mat::<f64>::from_fn(m, m, |a, b| 0.5 * (g[a][b] + g[b][a]));
    let (eig, _) = sym_eigen(gm.as_ref())?;
    let norm = eig.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let thr = FORM_ZERO * norm;
    Ok(DtnFormReport {
        basis_size: nb,
        constrained_size: m,
        matrix: g,
        n_minus: eig.iter().filter(|&&v| v < -thr).count(),
        n_zero: eig.iter().filter(|&&v| v.abs() <= thr).count(),
        eigenvalues: eig,
        moment_residual,
        lambdas: ctx.lambdas(),
    })
}
