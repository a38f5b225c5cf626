//! Eigenpairs of an assembled operator with spectral-position bookkeeping.

use serde::Serialize;

use super::assemble::{BoundaryMode, DiscreteOperator};
use super::mesh::Mesh;
use crate::numerics::linalg::{count_below, sym_diag_generalized_eigs, EigenPair};
use crate::partition::Partition;
use crate::tolerances::{EIGEN_RESIDUAL, MULTIPLICITY};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct EigenResult {
    /// Ascending; vectors live on the free unknowns.
    pub pairs: Vec<EigenPair>,
    /// 1-based spectral position of each value (first index of its cluster).
    pub positions: Vec<usize>,
    pub multiplicities: Vec<usize>,
}

impl EigenResult {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    /// Position and multiplicity of `lambda` within the computed values.
    pub fn position_of(&self, lambda: f64) -> (usize, usize) {
        position_in(&self.values(), lambda)
    }
}

/// `(1 + #{μ < λ − tol}, #{|μ − λ| ≤ tol})` with `tol = 10⁻⁶ (1 + λ)`.
pub fn position_in(values: &[f64], lambda: f64) -> (usize, usize) {
    let tol = MULTIPLICITY * (1.0 + lambda.abs());
    let below = values.iter().filter(|&&v| v < lambda - tol).count();
    let mult = values.iter().filter(|&&v| (v - lambda).abs() <= tol).count();
    (below + 1, mult)
}

/// Assembles the partition Laplacian: outer Dirichlet conditions and
/// `u_i = −u_j` across every cut.
pub fn assemble_plap(p: &Partition, n: usize) -> Result<DiscreteOperator> {
    if n < 8 {
        return Err(Error::InvalidGeometry(format!("grid size {n} below the supported minimum 8")));
    }
    DiscreteOperator::assemble(&Mesh::from_partition(p, n)?, BoundaryMode::Eigen)
}

/// As [`assemble_plap`], with every subdomain multiplied by `gauge[i] = ±1`:
/// the link between subdomains `i` and `j` gets the extra sign `gauge[i]·gauge[j]`.
pub fn assemble_plap_gauged(p: &Partition, n: usize, gauge: &[f64]) -> Result<DiscreteOperator> {
    let mut mesh = Mesh::from_partition(p, n)?;
    for l in mesh.links.iter_mut() {
        l.sign *= gauge[mesh.blocks[l.a].subdomain] * gauge[mesh.blocks[l.b].subdomain];
    }
    DiscreteOperator::assemble(&mesh, BoundaryMode::Eigen)
}

/// Lowest `count` eigenpairs with positions among themselves.
pub fn solve_eigs(op: &DiscreteOperator, count: usize) -> Result<EigenResult> {
    if op.n_free == 0 {
        return Err(Error::InvalidGeometry("operator has no free unknowns".into()));
    }
    let k = op.free_stiffness();
    let pairs = sym_diag_generalized_eigs(k.as_ref(), op.free_mass(), count)?;
    for p in &pairs {
        let scale = k.norm_max().max(1.0);
        if p.residual > EIGEN_RESIDUAL * (1.0 + p.value.abs()) * scale {
            return Err(Error::Numerical(format!("eigenpair {} residual {:.3e}", p.value, p.residual)));
        }
    }
    let values: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let (positions, multiplicities) = values.iter().map(|&v| position_in(&values, v)).unzip();
    Ok(EigenResult { pairs, positions, multiplicities })
}

/// Spectral position of `lambda` in the full discrete spectrum, by inertia
/// counts (no eigenvectors needed).
pub fn discrete_position(op: &DiscreteOperator, lambda: f64) -> Result<(usize, usize)> {
    let tol = MULTIPLICITY * (1.0 + lambda.abs());
    let k = op.free_stiffness();
    let below = count_below(k.as_ref(), op.free_mass(), lambda - tol)?;
    let upto = count_below(k.as_ref(), op.free_mass(), lambda + tol)?;
    Ok((below + 1, upto - below))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_radial_partition, build_rect_partition, rect_cross};

    #[test]
    fn uncut_square_spectrum() {
        let p = build_rect_partition(1.0, &[]).unwrap();
        let op = assemble_plap(&p, 24).unwrap();
        let r = solve_eigs(&op, 6).unwrap();
        let v = r.values();
        for (got, want) in v.iter().zip([2.0, 5.0, 5.0, 8.0, 10.0, 10.0]) {
            assert!((got - want).abs() < 1e-8, "{v:?}");
        }
        assert_eq!(r.positions[3], 4);
        assert_eq!(r.multiplicities[1], 2);
    }

    #[test]
    fn bipartite_cross_matches_uncut_square() {
        let p = rect_cross(1.0).unwrap();
        let op = assemble_plap(&p, 16).unwrap();
        let v = solve_eigs(&op, 6).unwrap().values();
        for (got, want) in v.iter().zip([2.0, 5.0, 5.0, 8.0, 10.0, 10.0]) {
            assert!((got - want).abs() < 1e-6, "{v:?}");
        }
    }

    #[test]
    fn radial_three_partition_ground_state() {
        let p = build_radial_partition(3).unwrap();
        let op = assemble_plap(&p, 16).unwrap();
        let r = solve_eigs(&op, 4).unwrap();
        let v = r.values();
        // Half-integer orders: π² twice, then j_{3/2,1}².
        let j = crate::numerics::bessel_zero(1.5, 1).unwrap();
        assert!((v[0] - v[1]).abs() < 1e-8 && (v[0] - 9.8696).abs() < 0.05, "{v:?}");
        assert!((v[2] - j * j).abs() < 1e-4, "{v:?}");
        assert_eq!(r.positions[2], 3);
    }
}
