//! Scalar data on the interface set, sampled per arc at Chebyshev points.

use serde::Serialize;

use crate::numerics::ChebGrid;
use crate::partition::Partition;
use crate::{Error, Result};

/// Samples of a function on one arc. `t[0] = +1` is the arc end,
/// `t[n-1] = -1` the start.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSamples {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub length: f64,
}

/// A scalar function on Σ with per-arc Chebyshev interpolation and values at
/// the corner points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryField {
    pub arcs: Vec<ArcSamples>,
    pub corner_values: Vec<f64>,
}

impl BoundaryField {
    /// Samples `f(arc, t, point)` at `n ≥ 8` Chebyshev points per arc.
    pub fn sample(p: &Partition, n: usize, mut f: impl FnMut(usize, f64, [f64; 2]) -> f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::Domain(format!("boundary fields need at least 8 samples per arc, got {n}")));
        }
        let grid = ChebGrid::new(n)?;
        let mut arcs = Vec::with_capacity(p.interfaces.len());
        for a in &p.interfaces {
            let values: Vec<f64> = grid.nodes.iter().map(|&t| f(a.id, t, a.geometry.point(t))).collect();
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!("non-finite boundary sample on arc {}", a.id)));
            }
            arcs.push(ArcSamples { t: grid.nodes.clone(), values, length: a.geometry.length() });
        }
        let mut field = BoundaryField { arcs, corner_values: vec![0.0; p.corners.len()] };
        field.refresh_corners(p);
        Ok(field)
    }

    pub fn zeros(p: &Partition, n: usize) -> Result<Self> {
        Self::sample(p, n, |_, _, _| 0.0)
    }

    /// Corner values as the mean of the adjacent arc end values.
    fn refresh_corners(&mut self, p: &Partition) {
        let mut sum = vec![0.0; p.corners.len()];
        let mut cnt = vec![0usize; p.corners.len()];
        for (a, s) in p.interfaces.iter().zip(&self.arcs) {
            let n = s.values.len();
            sum[a.endpoints[0]] += s.values[n - 1];
            sum[a.endpoints[1]] += s.values[0];
            cnt[a.endpoints[0]] += 1;
            cnt[a.endpoints[1]] += 1;
        }
        self.corner_values = sum.iter().zip(&cnt).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect();
    }

    /// Sets the field to exactly zero at both ends of every arc.
    pub fn zero_at_endpoints(&mut self) {
        for s in self.arcs.iter_mut() {
            let n = s.values.len();
            s.values[0] = 0.0;
            s.values[n - 1] = 0.0;
        }
        self.corner_values.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn samples_per_arc(&self) -> usize {
        self.arcs.first().map_or(0, |a| a.t.len())
    }

    /// Barycentric interpolation on arc `arc` at `t ∈ [-1, 1]`.
    pub fn eval(&self, arc: usize, t: f64) -> f64 {
        let s = &self.arcs[arc];
        cheb_interpolate(&s.t, &s.values, t)
    }

    pub fn map(&self, mut g: impl FnMut(usize, f64, f64) -> f64) -> Self {
        let mut out = self.clone();
        for (i, s) in out.arcs.iter_mut().enumerate() {
            for (v, &t) in s.values.iter_mut().zip(&self.arcs[i].t) {
                *v = g(i, t, *v);
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.map(|_, _, v| c * v);
        out.corner_values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self + c · other` (same sampling required).
    pub fn axpy(&self, c: f64, other: &BoundaryField) -> Self {
        let mut out = self.clone();
        for (s, o) in out.arcs.iter_mut().zip(&other.arcs) {
            for (v, w) in s.values.iter_mut().zip(&o.values) {
                *v += c * w;
            }
        }
        for (v, w) in out.corner_values.iter_mut().zip(&other.corner_values) {
            *v += c * w;
        }
        out
    }

    /// Pointwise product; `other` is evaluated at this field's sample points.
    pub fn times(&self, other: &BoundaryField) -> Self {
        let mut out = self.map(|a, t, v| v * other.eval(a, t));
        for (v, w) in out.corner_values.iter_mut().zip(&other.corner_values) {
            *v *= w;
        }
        out
    }

    /// `∫_arc g(t, f(t)) dμ` by Clenshaw–Curtis quadrature on the samples.
    pub fn integrate_arc_with(&self, arc: usize, mut g: impl FnMut(f64, f64) -> f64) -> f64 {
        let s = &self.arcs[arc];
        let w = cc_weights(s.t.len());
        0.5 * s.length * s.t.iter().zip(&s.values).zip(&w).map(|((&t, &v), &w)| w * g(t, v)).sum::<f64>()
    }

    pub fn integrate_arc(&self, arc: usize) -> f64 {
        self.integrate_arc_with(arc, |_, v| v)
    }

    /// `⟨f, h⟩_{L²(Σ)}`.
    pub fn inner(&self, other: &BoundaryField) -> f64 {
        (0..self.arcs.len()).map(|a| self.integrate_arc_with(a, |t, v| v * other.eval(a, t))).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.arcs.iter().flat_map(|s| s.values.iter()).fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Clenshaw–Curtis weights for `n` Chebyshev–Lobatto points on `[-1, 1]`.
pub(crate) fn cc_weights(n: usize) -> Vec<f64> {
    ChebGrid::new(n).map(|g| g.clenshaw_curtis_weights()).unwrap_or_default()
}

/// Barycentric interpolation through Chebyshev–Lobatto points.
pub(crate) fn cheb_interpolate(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let n = nodes.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let d = x - nodes[j];
        if d.abs() < 1e-15 {
            return values[j];
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n - 1 {
            w *= 0.5;
        }
        let c = w / d;
        num += c * values[j];
        den += c;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::rect_cross;

    #[test]
    fn integrates_and_interpolates_smooth_data() {
        let p = rect_cross(1.0).unwrap();
        let f = BoundaryField::sample(&p, 16, |_, _, q| (q[0] + q[1]).sin()).unwrap();
        for a in &p.interfaces {
            let t = 0.3;
            let q = a.geometry.point(t);
            assert!((f.eval(a.id, t) - (q[0] + q[1]).sin()).abs() < 1e-9);
        }
        let one = BoundaryField::sample(&p, 8, |_, _, _| 1.0).unwrap();
        let total: f64 = (0..4).map(|a| one.integrate_arc(a)).sum();
        assert!((total - p.interface_length()).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_sampling() {
        let p = rect_cross(1.0).unwrap();
        assert!(BoundaryField::sample(&p, 4, |_, _, _| 0.0).is_err());
    }
}
