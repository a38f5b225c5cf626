//! Closed-form vector fields on the plane and deformation fields built from them.

use serde::{Deserialize, Serialize};

use super::boundary::BoundaryField;

/// Smooth compactly supported profile `φ(s) = exp(1 − 1/(1 − s²))` on `|s| < 1`,
/// normalised to `φ(0) = 1`.
pub fn bump_profile(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

fn bump_profile_prime(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        -2.0 * s / (q * q) * bump_profile(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldTerm {
    /// `X = b + A p`.
    Affine { b: [f64; 2], a: [[f64; 2]; 2] },
    /// `X = coeff · x^px · y^py`.
    Monomial { coeff: [f64; 2], px: u32, py: u32 },
    /// `X = amplitude · φ(|p − center| / radius)`.
    Bump { center: [f64; 2], radius: f64, amplitude: [f64; 2] },
    /// Normal push of a straight arc: `X = amplitude · n · φ(s / half_length) · φ(d / width)`
    /// with `s`, `d` the tangential and normal offsets from `center` and `n`
    /// the left normal of `tangent`.
    ArcNormalBump { center: [f64; 2], tangent: [f64; 2], half_length: f64, width: f64, amplitude: f64 },
    /// As `ArcNormalBump` with polynomial profiles `(1 − (s/half_length)²)^power`
    /// and `(1 − (d/width)²)^power`, which spectral quadrature resolves.
    ArcNormalPolynomial { center: [f64; 2], tangent: [f64; 2], half_length: f64, width: f64, amplitude: f64, power: u32 },
    /// `X = amplitude · (sin(kx x) sin(ky y), sin(lx x) sin(ly y))`-style
    /// trigonometric product: `coeff[c] · sin(freq[c][0] x + phase[c][0]) · sin(freq[c][1] y + phase[c][1])`.
    TrigProduct { coeff: [f64; 2], freq: [[f64; 2]; 2], phase: [[f64; 2]; 2] },
}

impl FieldTerm {
    fn value(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            FieldTerm::Affine { b, a } => {
                [b[0] + a[0][0] * p[0] + a[0][1] * p[1], b[1] + a[1][0] * p[0] + a[1][1] * p[1]]
            }
            FieldTerm::Monomial { coeff, px, py } => {
                let m = p[0].powi(px as i32) * p[1].powi(py as i32);
                [coeff[0] * m, coeff[1] * m]
            }
            FieldTerm::Bump { center, radius, amplitude } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]) / radius;
                let f = bump_profile(r);
                [amplitude[0] * f, amplitude[1] * f]
            }
            FieldTerm::ArcNormalBump { center, tangent, half_length, width, amplitude } => {
                let (s, d) = arc_offsets(p, center, tangent);
                let f = amplitude * bump_profile(s / half_length) * bump_profile(d / width);
                [-tangent[1] * f, tangent[0] * f]
            }
            FieldTerm::ArcNormalPolynomial { center, tangent, half_length, width, amplitude, power } => {
                let (s, d) = arc_offsets(p, center, tangent);
                let f = amplitude * poly_profile(s / half_length, power) * poly_profile(d / width, power);
                [-tangent[1] * f, tangent[0] * f]
            }
            FieldTerm::TrigProduct { coeff, freq, phase } => {
                let c = |k: usize| {
                    coeff[k] * (freq[k][0] * p[0] + phase[k][0]).sin() * (freq[k][1] * p[1] + phase[k][1]).sin()
                };
                [c(0), c(1)]
            }
        }
    }

    /// `J[i][j] = ∂X_i/∂x_j`.
    fn jacobian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        match *self {
            FieldTerm::Affine { a, .. } => a,
            FieldTerm::Monomial { coeff, px, py } => {
                let dx = if px == 0 { 0.0 } else { px as f64 * p[0].powi(px as i32 - 1) * p[1].powi(py as i32) };
                let dy = if py == 0 { 0.0 } else { py as f64 * p[0].powi(px as i32) * p[1].powi(py as i32 - 1) };
                [[coeff[0] * dx, coeff[0] * dy], [coeff[1] * dx, coeff[1] * dy]]
            }
            FieldTerm::Bump { center, radius, amplitude } => {
                let v = [p[0] - center[0], p[1] - center[1]];
                let dist = v[0].hypot(v[1]);
                if dist == 0.0 || dist >= radius {
                    return [[0.0; 2]; 2];
                }
                let g = bump_profile_prime(dist / radius) / (radius * dist);
                let grad = [g * v[0], g * v[1]];
                [
                    [amplitude[0] * grad[0], amplitude[0] * grad[1]],
                    [amplitude[1] * grad[0], amplitude[1] * grad[1]],
                ]
            }
            FieldTerm::ArcNormalBump { center, tangent, half_length, width, amplitude } => {
                let (s, d) = arc_offsets(p, center, tangent);
                let n = [-tangent[1], tangent[0]];
                let fs = bump_profile(s / half_length);
                let fd = bump_profile(d / width);
                let gs = bump_profile_prime(s / half_length) / half_length * fd;
                let gd = fs * bump_profile_prime(d / width) / width;
                let grad = [amplitude * (gs * tangent[0] + gd * n[0]), amplitude * (gs * tangent[1] + gd * n[1])];
                [[n[0] * grad[0], n[0] * grad[1]], [n[1] * grad[0], n[1] * grad[1]]]
            }
            FieldTerm::ArcNormalPolynomial { center, tangent, half_length, width, amplitude, power } => {
                let (s, d) = arc_offsets(p, center, tangent);
                let n = [-tangent[1], tangent[0]];
                let fs = poly_profile(s / half_length, power);
                let fd = poly_profile(d / width, power);
                let gs = poly_profile_prime(s / half_length, power) / half_length * fd;
                let gd = fs * poly_profile_prime(d / width, power) / width;
                let grad = [amplitude * (gs * tangent[0] + gd * n[0]), amplitude * (gs * tangent[1] + gd * n[1])];
                [[n[0] * grad[0], n[0] * grad[1]], [n[1] * grad[0], n[1] * grad[1]]]
            }
            FieldTerm::TrigProduct { coeff, freq, phase } => {
                let row = |k: usize| {
                    let (sx, cx) = (freq[k][0] * p[0] + phase[k][0]).sin_cos();
                    let (sy, cy) = (freq[k][1] * p[1] + phase[k][1]).sin_cos();
                    [coeff[k] * freq[k][0] * cx * sy, coeff[k] * freq[k][1] * sx * cy]
                };
                [row(0), row(1)]
            }
        }
    }
}

/// `(1 − s²)^power` on `|s| < 1`, zero outside.
pub fn poly_profile(s: f64, power: u32) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(power as i32)
    }
}

fn poly_profile_prime(s: f64, power: u32) -> f64 {
    if s.abs() >= 1.0 || power == 0 {
        0.0
    } else {
        -2.0 * power as f64 * s * (1.0 - s * s).powi(power as i32 - 1)
    }
}

fn arc_offsets(p: [f64; 2], center: [f64; 2], tangent: [f64; 2]) -> (f64, f64) {
    let v = [p[0] - center[0], p[1] - center[1]];
    (v[0] * tangent[0] + v[1] * tangent[1], -v[0] * tangent[1] + v[1] * tangent[0])
}

/// Sum of closed-form terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticField {
    pub terms: Vec<FieldTerm>,
}

impl AnalyticField {
    pub fn new(terms: Vec<FieldTerm>) -> Self {
        AnalyticField { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `X(p) = p − center`.
    pub fn dilation(center: [f64; 2]) -> Self {
        Self::new(vec![FieldTerm::Affine { b: [-center[0], -center[1]], a: [[1.0, 0.0], [0.0, 1.0]] }])
    }

    pub fn translation(v: [f64; 2]) -> Self {
        Self::new(vec![FieldTerm::Affine { b: v, a: [[0.0; 2]; 2] }])
    }

    /// Rotation about `center`.
    pub fn rotation(center: [f64; 2]) -> Self {
        Self::new(vec![FieldTerm::Affine { b: [center[1], -center[0]], a: [[0.0, -1.0], [1.0, 0.0]] }])
    }

    pub fn value(&self, p: [f64; 2]) -> [f64; 2] {
        self.terms.iter().fold([0.0; 2], |acc, t| {
            let v = t.value(p);
            [acc[0] + v[0], acc[1] + v[1]]
        })
    }

    pub fn jacobian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let mut j = [[0.0; 2]; 2];
        for t in &self.terms {
            let a = t.jacobian(p);
            for r in 0..2 {
                for c in 0..2 {
                    j[r][c] += a[r][c];
                }
            }
        }
        j
    }

    /// `X'` of the straight-line family `φ_t = id + tX`, i.e. `−(DX) X`.
    pub fn line_family_acceleration(&self, p: [f64; 2]) -> [f64; 2] {
        let x = self.value(p);
        let j = self.jacobian(p);
        [-(j[0][0] * x[0] + j[0][1] * x[1]), -(j[1][0] * x[0] + j[1][1] * x[1])]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match *t {
                FieldTerm::Affine { b, a } => FieldTerm::Affine {
                    b: [s * b[0], s * b[1]],
                    a: [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]],
                },
                FieldTerm::Monomial { coeff, px, py } => FieldTerm::Monomial { coeff: [s * coeff[0], s * coeff[1]], px, py },
                FieldTerm::Bump { center, radius, amplitude } => {
                    FieldTerm::Bump { center, radius, amplitude: [s * amplitude[0], s * amplitude[1]] }
                }
                FieldTerm::ArcNormalBump { center, tangent, half_length, width, amplitude } => {
                    FieldTerm::ArcNormalBump { center, tangent, half_length, width, amplitude: s * amplitude }
                }
                FieldTerm::ArcNormalPolynomial { center, tangent, half_length, width, amplitude, power } => {
                    FieldTerm::ArcNormalPolynomial { center, tangent, half_length, width, amplitude: s * amplitude, power }
                }
                FieldTerm::TrigProduct { coeff, freq, phase } => {
                    FieldTerm::TrigProduct { coeff: [s * coeff[0], s * coeff[1]], freq, phase }
                }
            })
            .collect();
        AnalyticField { terms }
    }

    pub fn plus(&self, other: &AnalyticField) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        AnalyticField { terms }
    }
}

/// A deformation of a partition: an analytic field, optionally with its
/// normal trace on the interface set replaced by sampled data.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DeformationField {
    pub field: AnalyticField,
    /// Overrides `X·ν` on the interfaces (values relative to the frame normal).
    pub normal_trace: Option<BoundaryField>,
    /// Radius of the balls around interior corners on which `X` vanishes.
    pub corner_radius: Option<f64>,
}

impl DeformationField {
    pub fn analytic(field: AnalyticField) -> Self {
        DeformationField { field, normal_trace: None, corner_radius: None }
    }

    pub fn from_normal_trace(trace: BoundaryField) -> Self {
        DeformationField { field: AnalyticField::zero(), normal_trace: Some(trace), corner_radius: None }
    }
}
