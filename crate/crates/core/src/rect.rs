//! Closed-form spectral data of the rectangle `(0, απ) × (0, π)` and the
//! analysis of its nodal cross, the partition of the `(2, 2)` mode.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numerics::bracketed_root;
use crate::partition::{rect_cross, Partition};
use crate::tolerances::ROOT_WIDTH;
use crate::variation::BoundaryField;
use crate::{Error, Result};

/// Aspect parameter `α`. When `α²` is a known rational the eigenvalue
/// comparisons are exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AspectRatio {
    Real { alpha: f64 },
    /// `α² = p / q`.
    SquaredRational { p: u64, q: u64 },
}

impl AspectRatio {
    pub fn real(alpha: f64) -> Self {
        AspectRatio::Real { alpha }
    }

    /// `α = p / q`.
    pub fn rational(p: u64, q: u64) -> Self {
        AspectRatio::SquaredRational { p: p * p, q: q * q }
    }

    /// `α² = p / q`.
    pub fn squared_rational(p: u64, q: u64) -> Self {
        AspectRatio::SquaredRational { p, q }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_sq().sqrt()
    }

    pub fn alpha_sq(&self) -> f64 {
        match *self {
            AspectRatio::Real { alpha } => alpha * alpha,
            AspectRatio::SquaredRational { p, q } => p as f64 / q as f64,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            AspectRatio::Real { alpha } => alpha.is_finite() && alpha > 0.0,
            AspectRatio::SquaredRational { p, q } => p > 0 && q > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("aspect ratio {self:?} must be positive")))
        }
    }

    /// Sign of `λ_{m1,n1} − λ_{m2,n2}`; exact for rational `α²`, otherwise
    /// with a relative tolerance of `10⁻¹²`.
    fn compare(&self, a: (u64, u64), b: (u64, u64)) -> std::cmp::Ordering {
        match *self {
            AspectRatio::SquaredRational { p, q } => {
                // λ·p = m² q + n² p
                let key = |(m, n): (u64, u64)| (m as u128).pow(2) * q as u128 + (n as u128).pow(2) * p as u128;
                key(a).cmp(&key(b))
            }
            AspectRatio::Real { .. } => {
                let (la, lb) = (self.eigenvalue(a.0, a.1), self.eigenvalue(b.0, b.1));
                if (la - lb).abs() <= 1e-12 * la.max(lb) {
                    std::cmp::Ordering::Equal
                } else {
                    la.total_cmp(&lb)
                }
            }
        }
    }

    fn eigenvalue(&self, m: u64, n: u64) -> f64 {
        (m * m) as f64 / self.alpha_sq() + (n * n) as f64
    }
}

impl From<f64> for AspectRatio {
    fn from(alpha: f64) -> Self {
        AspectRatio::real(alpha)
    }
}

/// Dirichlet eigenmode `ψ_{m,n}(x, y) = sin(m x / α) sin(n y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RectMode {
    pub m: u64,
    pub n: u64,
    pub alpha: f64,
    pub eigenvalue: f64,
}

impl RectMode {
    pub fn new(m: u64, n: u64, alpha: impl Into<AspectRatio>) -> Result<Self> {
        let ar = alpha.into();
        ar.validate()?;
        if m == 0 || n == 0 {
            return Err(Error::Domain(format!("mode ({m}, {n}) needs positive indices")));
        }
        Ok(Self { m, n, alpha: ar.alpha(), eigenvalue: ar.eigenvalue(m, n) })
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        (self.m as f64 * p[0] / self.alpha).sin() * (self.n as f64 * p[1]).sin()
    }
}

/// `λ_{m,n} = (m/α)² + n²`.
pub fn rect_eigenvalue(m: u64, n: u64, alpha: impl Into<AspectRatio>) -> Result<f64> {
    Ok(RectMode::new(m, n, alpha)?.eigenvalue)
}

/// Where an eigenvalue sits in the full Dirichlet spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPosition {
    /// 1-based index of the first occurrence.
    pub position: usize,
    pub multiplicity: usize,
}

/// Spectral position of `λ_{m,n}`: one plus the number of rectangle
/// eigenvalues strictly below it, counted with multiplicity.
pub fn rect_spectral_position(m: u64, n: u64, alpha: impl Into<AspectRatio>) -> Result<SpectralPosition> {
    let ar = alpha.into();
    let lambda = RectMode::new(m, n, ar)?.eigenvalue;
    let mmax = (ar.alpha() * lambda.sqrt()).ceil() as u64 + 2;
    let nmax = lambda.sqrt().ceil() as u64 + 2;
    let (mut below, mut equal) = (0, 0);
    for i in 1..=mmax {
        for j in 1..=nmax {
            match ar.compare((i, j), (m, n)) {
                std::cmp::Ordering::Less => below += 1,
                std::cmp::Ordering::Equal => equal += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    Ok(SpectralPosition { position: below + 1, multiplicity: equal })
}

/// Whether the nodal cross of `ψ_{2,2}` is a Courant-sharp partition, i.e.
/// `λ_{2,2}` sits at position 4. This holds exactly for `3/5 ≤ α² ≤ 5/3`.
pub fn courant_sharp_22(alpha: impl Into<AspectRatio>) -> Result<bool> {
    Ok(rect_spectral_position(2, 2, alpha)?.position == 4)
}

/// Solution of `γ1² + γ2² = λ_{2,2}`, `γ1 cot(γ1 απ/2) = γ2 cot(γ2 π/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaPair {
    pub alpha: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// `σ̄ = −2 γ1 cot(γ1 απ/2)`, the magnitude of the negative DtN eigenvalue.
    pub sigma_bar: f64,
    /// `|γ1² + γ2² − λ_{2,2}|`.
    pub constraint_residual: f64,
    /// `|γ1 cot(γ1 απ/2) − γ2 cot(γ2 π/2)|`.
    pub matching_residual: f64,
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// Solves the γ-system for `5/3 < α² < 4` by eliminating `γ2` and rooting the
/// matching residual in `γ1 ∈ (3/α, √(λ_{2,2} − 1))`, where `γ2 ∈ (1, 2)`.
pub fn solve_gamma_pair(alpha: impl Into<AspectRatio>) -> Result<GammaPair> {
    let ar = alpha.into();
    ar.validate()?;
    let a = ar.alpha();
    let a2 = ar.alpha_sq();
    if !(a2 > 5.0 / 3.0 && a2 < 4.0) {
        return Err(Error::Numerical(format!("γ-system has no root in its bracket for α² = {a2} (needs 5/3 < α² < 4)")));
    }
    let lambda = 4.0 / a2 + 4.0;
    let residual = |g1: f64| {
        let g2 = (lambda - g1 * g1).max(0.0).sqrt();
        g1 * cot(g1 * a * PI / 2.0) - g2 * cot(g2 * PI / 2.0)
    };
    let lo = 3.0 / a;
    let hi = (lambda - 1.0).sqrt();
    // cot(γ1 απ/2) has poles at γ1 = 2j/α; the bracket sits strictly between
    // 2/α and 4/α, so only the interval ends need shrinking.
    let span = hi - lo;
    let (l, h) = (lo + 1e-12 * span, hi - 1e-12 * span);
    let (rl, rh) = (residual(l), residual(h));
    if !(rl.is_finite() && rh.is_finite()) || rl * rh > 0.0 {
        return Err(Error::Numerical(format!("γ-system residual has no sign change on [{lo}, {hi}]")));
    }
    let g1 = bracketed_root(residual, l, h, ROOT_WIDTH)?;
    let g2 = (lambda - g1 * g1).sqrt();
    Ok(GammaPair {
        alpha: a,
        gamma1: g1,
        gamma2: g2,
        sigma_bar: -2.0 * g1 * cot(g1 * a * PI / 2.0),
        constraint_residual: (g1 * g1 + g2 * g2 - lambda).abs(),
        matching_residual: (g1 * cot(g1 * a * PI / 2.0) - g2 * cot(g2 * PI / 2.0)).abs(),
    })
}

/// Orientation of one half-arm of the cross.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmKind {
    Horizontal,
    Vertical,
}

/// Sign structure of the DtN profile on one interface arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArmReport {
    pub arc: usize,
    pub kind: ArmKind,
    /// Sign at the outer-boundary end and at the centre.
    pub sign_at_boundary: f64,
    pub sign_at_center: f64,
    /// Interior zero, as a distance from the outer-boundary end.
    pub zero_from_boundary: Option<f64>,
}

/// Negative DtN eigenfunction of the cross partition, sampled on Σ.
#[derive(Clone, Debug, Serialize)]
pub struct DtnProfile22 {
    pub gamma: GammaPair,
    #[serde(skip)]
    pub partition: Partition,
    pub field: BoundaryField,
    pub arms: Vec<ArmReport>,
    pub center_value: f64,
}

/// Profile `f` on the cross: `sin(γ1 x) sin(γ2 π/2)` on the horizontal arm
/// and `sin(γ1 απ/2) sin(γ2 y)` on the vertical arm, reflected evenly about
/// the centre. Left unnormalized.
pub fn dtn_negative_profile_22(alpha: impl Into<AspectRatio>, samples: usize) -> Result<DtnProfile22> {
    let gamma = solve_gamma_pair(alpha)?;
    let a = gamma.alpha;
    let w = a * PI;
    let partition = rect_cross(a)?;
    let f = move |p: [f64; 2], kind: ArmKind| match kind {
        ArmKind::Horizontal => (gamma.gamma1 * p[0].min(w - p[0])).sin() * (gamma.gamma2 * PI / 2.0).sin(),
        ArmKind::Vertical => (gamma.gamma1 * w / 2.0).sin() * (gamma.gamma2 * p[1].min(PI - p[1])).sin(),
    };
    let kinds: Vec<ArmKind> = partition
        .interfaces
        .iter()
        .map(|arc| {
            let g = arc.geometry;
            if (g.start[1] - g.end[1]).abs() < 1e-12 {
                ArmKind::Horizontal
            } else {
                ArmKind::Vertical
            }
        })
        .collect();
    let field = BoundaryField::sample(&partition, samples, |arc, _, p| f(p, kinds[arc]))?;
    let center = [w / 2.0, PI / 2.0];
    let mut arms = Vec::new();
    for (arc, kind) in kinds.iter().enumerate() {
        let g = partition.interfaces[arc].geometry;
        let (outer, len) = {
            let d0 = (g.start[0] - center[0]).hypot(g.start[1] - center[1]);
            let d1 = (g.end[0] - center[0]).hypot(g.end[1] - center[1]);
            (if d0 > d1 { g.start } else { g.end }, d0.max(d1))
        };
        let dir = [(center[0] - outer[0]) / len, (center[1] - outer[1]) / len];
        let at = |s: f64| f([outer[0] + s * dir[0], outer[1] + s * dir[1]], *kind);
        let eps = 1e-6 * len;
        // The profile is a single sine along each arm: at most one interior zero.
        let (fb, fc) = (at(eps), at(len));
        let zero = if fb * fc < 0.0 { Some(bracketed_root(at, eps, len, ROOT_WIDTH)?) } else { None };
        arms.push(ArmReport { arc, kind: *kind, sign_at_boundary: fb.signum(), sign_at_center: fc.signum(), zero_from_boundary: zero });
    }
    let center_value = (gamma.gamma1 * w / 2.0).sin() * (gamma.gamma2 * PI / 2.0).sin();
    Ok(DtnProfile22 { gamma, partition, field, arms, center_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_ties_for_rational_alpha_squared() {
        let ar = AspectRatio::squared_rational(5, 3);
        assert_eq!(ar.compare((3, 1), (2, 2)), std::cmp::Ordering::Equal);
        let p = rect_spectral_position(2, 2, ar).unwrap();
        assert_eq!((p.position, p.multiplicity), (4, 2));
        assert!(courant_sharp_22(ar).unwrap());
        assert!(courant_sharp_22(AspectRatio::squared_rational(3, 5)).unwrap());
        assert!(!courant_sharp_22(AspectRatio::squared_rational(17, 10)).unwrap());
    }

    #[test]
    fn gamma_pair_outside_regime_fails() {
        assert!(matches!(solve_gamma_pair(1.0), Err(Error::Numerical(_))));
        assert!(matches!(solve_gamma_pair(2.5), Err(Error::Numerical(_))));
    }
}
