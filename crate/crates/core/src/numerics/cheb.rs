use faer::Mat;

use crate::{Error, Result};

/// Chebyshev-Gauss-Lobatto grid `x_j = cos(jπ/(n-1))` on `[-1, 1]` with
/// first and second differentiation matrices.
#[derive(Clone, Debug)]
pub struct ChebGrid {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub d: Mat<f64>,
    pub d2: Mat<f64>,
}

impl ChebGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("Chebyshev grid needs at least 2 points, got {n}")));
        }
        let big_n = (n - 1) as f64;
        let pi = std::f64::consts::PI;
        let nodes: Vec<f64> = (0..n).map(|j| (j as f64 * pi / big_n).cos()).collect();
        let c = |j: usize| if j == 0 || j == n - 1 { 2.0 } else { 1.0 };
        let mut d = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                // x_i - x_j via a product of sines avoids cancellation.
                let diff = -2.0 * ((i + j) as f64 * pi / (2.0 * big_n)).sin() * ((i as f64 - j as f64) * pi / (2.0 * big_n)).sin();
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let v = c(i) / c(j) * sign / diff;
                d[(i, j)] = v;
                row_sum += v;
            }
            d[(i, i)] = -row_sum;
        }
        let d2 = &d * &d;
        Ok(Self { n, nodes, d, d2 })
    }

    /// Clenshaw-Curtis weights on the grid nodes.
    pub fn clenshaw_curtis_weights(&self) -> Vec<f64> {
        let n = self.n - 1;
        let nf = n as f64;
        let pi = std::f64::consts::PI;
        let mut w = vec![0.0; self.n];
        if n == 1 {
            return vec![1.0, 1.0];
        }
        let mut v = vec![1.0; n - 1];
        if n.is_multiple_of(2) {
            w[0] = 1.0 / (nf * nf - 1.0);
            w[n] = w[0];
            for k in 1..n / 2 {
                for (j, vj) in v.iter_mut().enumerate() {
                    let th = (j + 1) as f64 * pi / nf;
                    *vj -= 2.0 * (2.0 * k as f64 * th).cos() / (4.0 * (k * k) as f64 - 1.0);
                }
            }
            for (j, vj) in v.iter_mut().enumerate() {
                let th = (j + 1) as f64 * pi / nf;
                *vj -= (nf * th).cos() / (nf * nf - 1.0);
            }
        } else {
            w[0] = 1.0 / (nf * nf);
            w[n] = w[0];
            for k in 1..=(n - 1) / 2 {
                for (j, vj) in v.iter_mut().enumerate() {
                    let th = (j + 1) as f64 * pi / nf;
                    *vj -= 2.0 * (2.0 * k as f64 * th).cos() / (4.0 * (k * k) as f64 - 1.0);
                }
            }
        }
        for j in 1..n {
            w[j] = 2.0 * v[j - 1] / nf;
        }
        w
    }

    /// Barycentric interpolation of nodal `values` at `x ∈ [-1, 1]`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&xj, &fj)) in self.nodes.iter().zip(values).enumerate() {
            let diff = x - xj;
            if diff == 0.0 {
                return fj;
            }
            let mut wj = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == self.n - 1 {
                wj *= 0.5;
            }
            num += wj / diff * fj;
            den += wj / diff;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differentiates_polynomials_exactly() {
        let g = ChebGrid::new(12).unwrap();
        let f: Vec<f64> = g.nodes.iter().map(|x| x.powi(5) - 2.0 * x * x).collect();
        for i in 0..g.n {
            let x = g.nodes[i];
            let d1: f64 = (0..g.n).map(|j| g.d[(i, j)] * f[j]).sum();
            let d2: f64 = (0..g.n).map(|j| g.d2[(i, j)] * f[j]).sum();
            assert!((d1 - (5.0 * x.powi(4) - 4.0 * x)).abs() < 1e-11);
            assert!((d2 - (20.0 * x.powi(3) - 4.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn clenshaw_curtis_integrates() {
        for n in [5, 8, 17, 33] {
            let g = ChebGrid::new(n).unwrap();
            let w = g.clenshaw_curtis_weights();
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
            let e: f64 = w.iter().zip(&g.nodes).map(|(w, x)| w * x.exp()).sum();
            if n >= 17 {
                assert!((e - (1f64.exp() - (-1f64).exp())).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn interpolation_is_spectral() {
        let g = ChebGrid::new(25).unwrap();
        let f: Vec<f64> = g.nodes.iter().map(|x| (2.0 * x).sin()).collect();
        for &x in &[-0.93, -0.1, 0.37, 0.999] {
            assert!((g.interpolate(&f, x) - (2.0 * x).sin()).abs() < 1e-13);
        }
    }
}
