//! Radial partitions of the unit disk into `k` equal sectors: energies,
//! spectral positions, the matched Bessel order and the negative directions
//! of the two-sided Dirichlet-to-Neumann form.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::numerics::{adaptive_quad, bessel_j, bessel_zero, bracketed_root, EndpointHint};
use crate::tolerances::{MULTIPLICITY, ROOT_WIDTH};
use crate::{Error, Result};

/// Energy `j_{k/2,1}²` of the radial `k`-partition.
pub fn radial_energy(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("radial partition needs k >= 2, got {k}")));
    }
    Ok(bessel_zero(k as f64 / 2.0, 1)?.powi(2))
}

/// Summary of the radial `k`-partition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialPartitionData {
    pub k: usize,
    pub energy: f64,
    pub position: usize,
    pub multiplicity: usize,
    pub deficiency: usize,
    /// `α` with `j_{α,2} = j_{k/2,1}`; present for `k ≥ 6`.
    pub matched_order: Option<f64>,
}

/// Position of `j_{k/2,1}²` in the spectrum of the radial partition
/// Laplacian and the deficiency `ℓ − k`.
///
/// For even `k` the partition is bipartite and the spectrum is the Dirichlet
/// spectrum `{j_{m,n}²}` (double for `m ≥ 1`); for odd `k` it is
/// `{j_{m+1/2,n}²}`, every value double.
pub fn radial_deficiency(k: usize) -> Result<(usize, usize)> {
    let d = radial_partition_data(k)?;
    Ok((d.position, d.deficiency))
}

pub fn radial_partition_data(k: usize) -> Result<RadialPartitionData> {
    if !(2..=12).contains(&k) {
        return Err(Error::Domain(format!("radial deficiency is tabulated for 2 <= k <= 12, got {k}")));
    }
    let energy = radial_energy(k)?;
    let values = radial_spectrum(k % 2 == 1, energy * (1.0 + 1e-3))?;
    let tol = MULTIPLICITY * (1.0 + energy);
    let below = values.iter().filter(|&&v| v < energy - tol).count();
    let multiplicity = values.iter().filter(|&&v| (v - energy).abs() <= tol).count();
    let position = below + 1;
    Ok(RadialPartitionData {
        k,
        energy,
        position,
        multiplicity,
        deficiency: position.saturating_sub(k),
        matched_order: if k >= 6 { Some(solve_alpha_match(k)?) } else { None },
    })
}

/// Sorted eigenvalues up to `limit` of the radial partition Laplacian:
/// integer Bessel orders (`half = false`) or half-integer ones.
pub fn radial_spectrum(half: bool, limit: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for m in 0.. {
        let order = m as f64 + if half { 0.5 } else { 0.0 };
        let mult = if half || m > 0 { 2 } else { 1 };
        let mut n = 1;
        loop {
            let v = bessel_zero(order, n)?.powi(2);
            if v > limit {
                break;
            }
            out.extend(std::iter::repeat_n(v, mult));
            n += 1;
        }
        if n == 1 {
            break;
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// The order `α ∈ (1/2, k/2)` with `j_{α,2} = j_{k/2,1}`. It exists only for
/// `k ≥ 6`; smaller `k` gives [`Error::Bracket`].
pub fn solve_alpha_match(k: usize) -> Result<f64> {
    let target = bessel_zero(k as f64 / 2.0, 1)?;
    let lo = 0.5;
    let hi = k as f64 / 2.0;
    let g = |a: f64| bessel_zero(a, 2).map(|z| z - target).unwrap_or(f64::NAN);
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    bracketed_root(g, lo, hi, ROOT_WIDTH)
}

/// `∫₀¹ r⁻¹ J_α(j r)² dr` for `α > 1/2`.
pub fn weighted_bessel_integral(alpha: f64, j: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(Error::Domain(format!("weighted Bessel integral needs α > 1/2, got {alpha}")));
    }
    adaptive_quad(
        |r| {
            if r == 0.0 {
                return 0.0;
            }
            let v = bessel_j(alpha, j * r).unwrap_or(0.0);
            v * v / r
        },
        0.0,
        1.0,
        1e-11,
        EndpointHint::left(2.0 * alpha - 1.0),
    )
}

/// `a_{P,ν}(f, f)` for even `k ≥ 6` along the direction built from
/// `J_α(j_{k/2,1} r)`: `−2kα tan(απ/k) ∫₀¹ r⁻¹ J_α² dr`.
pub fn negative_form_even(k: usize) -> Result<f64> {
    if k < 6 || k % 2 == 1 {
        return Err(Error::Domain(format!("even-case form needs even k >= 6, got {k}")));
    }
    let alpha = solve_alpha_match(k)?;
    let j = bessel_zero(k as f64 / 2.0, 1)?;
    let integral = weighted_bessel_integral(alpha, j)?;
    Ok(-2.0 * k as f64 * alpha * (alpha * PI / k as f64).tan() * integral)
}

/// Angular profile for odd `k`: `−T'' = α² T` on `(0, 2π)` with
/// `T(0) = T(2π) = 0` and jumps `T'(θᵢ⁺) − T'(θᵢ⁻) = σ T(θᵢ)` at
/// `θᵢ = 2πi/k`, normalized by `T'(0) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralFlowSolution {
    pub k: usize,
    pub alpha: f64,
    pub sigma: f64,
    /// `T(θ) = A sin(αθ + φ)` on interval `i`, stored as `(A, φ)`.
    pub intervals: Vec<(f64, f64)>,
    /// `T(θᵢ)` for `i = 1..k`.
    pub node_values: Vec<f64>,
    /// `T(2π)`.
    pub endpoint_residual: f64,
    /// Largest `|jump − σT(θᵢ)|` recomputed from the interval representation.
    pub jump_residual: f64,
    /// Relative spread of `T(θᵢ) / sin(θᵢ/2)`.
    pub node_ratio_spread: f64,
    /// Sign changes of `T(2π; σ)` seen on the σ-grid; only one of them has
    /// a positive node profile.
    pub sign_changes: usize,
    pub bessel_integral: f64,
    /// `−σ Σᵢ T(θᵢ)² ∫₀¹ r⁻¹ J_α² dr`.
    pub form: f64,
}

impl SpectralFlowSolution {
    pub fn eval(&self, theta: f64) -> f64 {
        let i = ((theta / TAU * self.k as f64).floor() as usize).min(self.k - 1);
        let (a, phi) = self.intervals[i];
        a * (self.alpha * theta + phi).sin()
    }
}

/// σ-grid step and upper end for the uniqueness scan.
pub const SIGMA_SCAN_STEP: f64 = 0.05;
pub const SIGMA_MAX: f64 = 1e3;

/// Propagates `(T, T')` across the intervals for a given `σ`.
fn shoot(k: usize, alpha: f64, sigma: f64) -> (Vec<[f64; 2]>, f64) {
    let h = TAU / k as f64;
    let (c, s) = ((alpha * h).cos(), (alpha * h).sin());
    let mut state = [0.0, 1.0];
    let mut starts = Vec::with_capacity(k);
    for i in 0..k {
        starts.push(state);
        let [t, dt] = state;
        state = [t * c + dt / alpha * s, -alpha * t * s + dt * c];
        if i + 1 < k {
            state[1] += sigma * state[0];
        }
    }
    (starts, state[0])
}

/// Solves the odd-`k` jump problem for `σ > 0` and evaluates the form.
pub fn spectral_flow_odd(k: usize) -> Result<SpectralFlowSolution> {
    if k < 7 || k.is_multiple_of(2) {
        return Err(Error::Domain(format!("odd-case shooting needs odd k >= 7, got {k}")));
    }
    let alpha = solve_alpha_match(k)?;
    let end = |s: f64| shoot(k, alpha, s).1;
    let steps = (SIGMA_MAX / SIGMA_SCAN_STEP).round() as usize;
    let mut brackets = Vec::new();
    let mut prev = end(SIGMA_SCAN_STEP * 1e-3);
    for i in 1..=steps {
        let s = i as f64 * SIGMA_SCAN_STEP;
        let v = end(s);
        if v == 0.0 || v * prev < 0.0 {
            brackets.push((s - SIGMA_SCAN_STEP, s));
        }
        prev = v;
    }
    if brackets.is_empty() {
        return Err(Error::Numerical(format!("no σ in (0, {SIGMA_MAX}) solves the jump problem for k = {k}")));
    }
    // Other roots belong to profiles that change sign between the rays; the
    // wanted one is positive at every node.
    let mut found = None;
    for &(lo, hi) in &brackets {
        let s = bracketed_root(end, lo.max(SIGMA_SCAN_STEP * 1e-3), hi, ROOT_WIDTH)?;
        let (starts, endpoint) = shoot(k, alpha, s);
        let h = TAU / k as f64;
        let positive = (1..k).all(|i| {
            let [t, dt] = starts[i - 1];
            t * (alpha * h).cos() + dt / alpha * (alpha * h).sin() > 0.0
        });
        if positive {
            found = Some((s, starts, endpoint));
            break;
        }
    }
    let Some((sigma, starts, endpoint)) = found else {
        return Err(Error::Numerical(format!("no σ root with a positive node profile for k = {k}")));
    };
    let h = TAU / k as f64;
    let intervals: Vec<(f64, f64)> = starts
        .iter()
        .enumerate()
        .map(|(i, &[t, dt])| {
            let theta = i as f64 * h;
            let amp = t.hypot(dt / alpha);
            (amp, t.atan2(dt / alpha) - alpha * theta)
        })
        .collect();
    let sol_eval = |i: usize, theta: f64| intervals[i].0 * (alpha * theta + intervals[i].1).sin();
    let sol_der = |i: usize, theta: f64| intervals[i].0 * alpha * (alpha * theta + intervals[i].1).cos();
    let node_values: Vec<f64> = (1..k).map(|i| sol_eval(i, i as f64 * h)).collect();
    let jump_residual = (1..k)
        .map(|i| {
            let th = i as f64 * h;
            (sol_der(i, th) - sol_der(i - 1, th) - sigma * node_values[i - 1]).abs()
        })
        .fold(0.0, f64::max);
    let ratios: Vec<f64> = (1..k).map(|i| node_values[i - 1] / (i as f64 * h / 2.0).sin()).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let node_ratio_spread = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean.abs();
    let j = bessel_zero(k as f64 / 2.0, 1)?;
    let bessel_integral = weighted_bessel_integral(alpha, j)?;
    let form = -sigma * node_values.iter().map(|t| t * t).sum::<f64>() * bessel_integral;
    Ok(SpectralFlowSolution {
        k,
        alpha,
        sigma,
        intervals,
        node_values,
        endpoint_residual: endpoint.abs(),
        jump_residual,
        node_ratio_spread,
        sign_changes: brackets.len(),
        bessel_integral,
        form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_k_has_no_matched_order() {
        assert!(matches!(solve_alpha_match(5), Err(Error::Bracket { .. })));
    }

    #[test]
    fn flow_solution_is_continuous_at_nodes() {
        let s = spectral_flow_odd(7).unwrap();
        let h = TAU / 7.0;
        for i in 1..7 {
            let th = i as f64 * h;
            let (a0, p0) = s.intervals[i - 1];
            let left = a0 * (s.alpha * th + p0).sin();
            assert!((left - s.node_values[i - 1]).abs() < 1e-9);
        }
        assert!(s.eval(TAU - 1e-12).abs() < 1e-8);
    }
}
