//! Lobatto-type quadrature rules on `[-1, 1]` and their nodal differentiation
//! matrices, used by the spectral-element discretization.

use faer::Mat;

use super::linalg::sym_eigen;
use crate::{Error, Result};

/// Nodes in increasing order (including both endpoints), quadrature weights
/// for the rule's weight function, and the nodal differentiation matrix.
#[derive(Clone, Debug)]
pub struct LobattoRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub d: Mat<f64>,
}

impl LobattoRule {
    /// Gauss-Lobatto-Legendre rule with `n` points, weight 1.
    pub fn legendre(n: usize) -> Result<Self> {
        Self::build(n, 1.0, 1.0, [2.0, 0.0])
    }

    /// Gauss-Lobatto-Jacobi rule with `n` points for the weight `1 + x`;
    /// used where the polar area element vanishes at `x = -1`.
    pub fn jacobi01(n: usize) -> Result<Self> {
        Self::build(n, 1.0, 2.0, [2.0, 2.0 / 3.0])
    }

    // Interior nodes are the Gauss nodes of (1-x)^a (1+x)^b, which is the
    // rule weight times (1 - x²); moments fix the endpoint weights.
    fn build(n: usize, a: f64, b: f64, moments: [f64; 2]) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("Lobatto rule needs at least 3 points, got {n}")));
        }
        let m = n - 2;
        let mut t = Mat::<f64>::zeros(m, m);
        for k in 0..m {
            let s = 2.0 * k as f64 + a + b;
            t[(k, k)] = (b * b - a * a) / (s * (s + 2.0));
            if k > 0 {
                let kf = k as f64;
                let v = 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0));
                t[(k, k - 1)] = v.sqrt();
                t[(k - 1, k)] = v.sqrt();
            }
        }
        let mu0 = 2f64.powf(a + b + 1.0) * libm::tgamma(a + 1.0) * libm::tgamma(b + 1.0) / libm::tgamma(a + b + 2.0);
        let (vals, vecs) = sym_eigen(t.as_ref())?;
        let mut nodes = vec![-1.0];
        let mut weights = vec![0.0];
        for (j, &x) in vals.iter().enumerate() {
            nodes.push(x);
            weights.push(mu0 * vecs[(0, j)].powi(2) / (1.0 - x * x));
        }
        nodes.push(1.0);
        weights.push(0.0);
        let s0: f64 = weights.iter().sum();
        let s1: f64 = weights.iter().zip(&nodes).map(|(w, x)| w * x).sum();
        // w_L + w_R = m0 - s0, w_R - w_L = m1 - s1
        weights[n - 1] = 0.5 * ((moments[0] - s0) + (moments[1] - s1));
        weights[0] = 0.5 * ((moments[0] - s0) - (moments[1] - s1));
        let d = differentiation_matrix(&nodes);
        Ok(Self { nodes, weights, d })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lagrange basis values and derivatives at `x`.
    pub fn basis_at(&self, x: f64) -> (Vec<f64>, Vec<f64>) {
        lagrange_basis(&self.nodes, x)
    }
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            1.0 / nodes.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &xj)| xi - xj).product::<f64>()
        })
        .collect()
}

/// Nodal differentiation matrix with the negative-sum diagonal.
pub fn differentiation_matrix(nodes: &[f64]) -> Mat<f64> {
    let n = nodes.len();
    let w = barycentric_weights(nodes);
    let mut d = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if i != j {
                let v = w[j] / w[i] / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                s += v;
            }
        }
        d[(i, i)] = -s;
    }
    d
}

/// Values `ℓ_j(x)` and derivatives `ℓ_j'(x)` of the Lagrange basis on `nodes`.
pub fn lagrange_basis(nodes: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let mut val = vec![0.0; n];
    let mut der = vec![0.0; n];
    if let Some(k) = nodes.iter().position(|&xj| (x - xj).abs() < 1e-14) {
        val[k] = 1.0;
        let d = differentiation_matrix(nodes);
        for j in 0..n {
            der[j] = d[(k, j)];
        }
        return (val, der);
    }
    let w = barycentric_weights(nodes);
    let mut s = 0.0;
    let mut s1 = 0.0;
    for j in 0..n {
        let t = w[j] / (x - nodes[j]);
        val[j] = t;
        s += t;
        s1 += t / (x - nodes[j]);
    }
    for j in 0..n {
        let lj = val[j] / s;
        // ℓ_j' = ℓ_j (Σ_k t_k/(x-x_k) / s - 1/(x - x_j))
        der[j] = lj * (s1 / s - 1.0 / (x - nodes[j]));
        val[j] = lj;
    }
    (val, der)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_to_degree_2n_minus_3() {
        for n in [3, 6, 11, 24] {
            let r = LobattoRule::legendre(n).unwrap();
            for p in 0..=(2 * n - 3) {
                let q: f64 = r.weights.iter().zip(&r.nodes).map(|(w, x)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} p={p}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn jacobi_rule_integrates_against_one_plus_x() {
        for n in [4, 9, 20] {
            let r = LobattoRule::jacobi01(n).unwrap();
            for p in 0..=(2 * n - 3) {
                let q: f64 = r.weights.iter().zip(&r.nodes).map(|(w, x)| w * x.powi(p as i32)).sum();
                // ∫ x^p (1 + x) dx over [-1, 1]
                let mono = |k: usize| if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let exact = mono(p) + mono(p + 1);
                assert!((q - exact).abs() < 1e-13, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn basis_derivative_matches_matrix() {
        let r = LobattoRule::legendre(15).unwrap();
        let f: Vec<f64> = r.nodes.iter().map(|x| (1.3 * x).sin()).collect();
        let x = 0.123;
        let (v, d) = r.basis_at(x);
        let fv: f64 = v.iter().zip(&f).map(|(a, b)| a * b).sum();
        let fd: f64 = d.iter().zip(&f).map(|(a, b)| a * b).sum();
        assert!((fv - (1.3 * x).sin()).abs() < 1e-8);
        assert!((fd - 1.3 * (1.3 * x).cos()).abs() < 1e-7);
    }
}
