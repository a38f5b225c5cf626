//! Partitions of a rectangle or the unit disk by straight cuts, their
//! adjacency graph and interface orientations.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::tolerances::{ADJACENCY_LENGTH, POINT_MATCH};
use crate::{Error, Result};

/// Rectangle `(0, απ) × (0, π)` or the unit disk centred at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainShape {
    Rectangle { alpha: f64 },
    Disk,
}

impl DomainShape {
    pub fn diameter(&self) -> f64 {
        match self {
            DomainShape::Rectangle { alpha } => PI * (1.0 + alpha * alpha).sqrt(),
            DomainShape::Disk => 2.0,
        }
    }

    fn tol(&self) -> f64 {
        POINT_MATCH * self.diameter()
    }

    /// Whether `p` lies in the closed domain (up to the matching tolerance).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let t = self.tol();
        match self {
            DomainShape::Rectangle { alpha } => {
                p[0] >= -t && p[0] <= alpha * PI + t && p[1] >= -t && p[1] <= PI + t
            }
            DomainShape::Disk => p[0].hypot(p[1]) <= 1.0 + t,
        }
    }

    /// Whether `p` lies on the outer boundary.
    pub fn on_boundary(&self, p: [f64; 2]) -> bool {
        let t = self.tol();
        match self {
            DomainShape::Rectangle { alpha } => {
                self.contains(p)
                    && (p[0].abs() < t || (p[0] - alpha * PI).abs() < t || p[1].abs() < t || (p[1] - PI).abs() < t)
            }
            DomainShape::Disk => (p[0].hypot(p[1]) - 1.0).abs() < t,
        }
    }

    /// Outward unit normal at a boundary point.
    pub fn outer_normal(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            DomainShape::Rectangle { alpha } => {
                let d = [p[0], alpha * PI - p[0], p[1], PI - p[1]];
                let k = (0..4).min_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs())).unwrap_or(0);
                [[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]][k]
            }
            DomainShape::Disk => {
                let r = p[0].hypot(p[1]);
                [p[0] / r, p[1] / r]
            }
        }
    }
}

/// Straight segment; arcs are parametrized by `t ∈ [-1, 1]` from start to end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl Segment {
    pub fn new(start: [f64; 2], end: [f64; 2]) -> Self {
        Self { start, end }
    }
    pub fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1])
    }
    pub fn point(&self, t: f64) -> [f64; 2] {
        let s = 0.5 * (1.0 + t);
        [
            self.start[0] + s * (self.end[0] - self.start[0]),
            self.start[1] + s * (self.end[1] - self.start[1]),
        ]
    }
    pub fn midpoint(&self) -> [f64; 2] {
        self.point(0.0)
    }
    pub fn tangent(&self) -> [f64; 2] {
        let l = self.length();
        [(self.end[0] - self.start[0]) / l, (self.end[1] - self.start[1]) / l]
    }
    /// Tangent rotated by +90°.
    pub fn left_normal(&self) -> [f64; 2] {
        let t = self.tangent();
        [-t[1], t[0]]
    }
    /// Parameter of the orthogonal projection of `p` and the distance to the
    /// segment (clamped to the segment).
    pub fn project(&self, p: [f64; 2]) -> (f64, f64) {
        let t = self.tangent();
        let l = self.length();
        let s = ((p[0] - self.start[0]) * t[0] + (p[1] - self.start[1]) * t[1]).clamp(0.0, l);
        let q = [self.start[0] + s * t[0], self.start[1] + s * t[1]];
        (2.0 * s / l - 1.0, (p[0] - q[0]).hypot(p[1] - q[1]))
    }
}

/// Cut specification: an axis-aligned segment in a rectangle or a radial
/// segment `{r e(θ) : r0 ≤ r ≤ r1}` in the disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Cut {
    Segment { start: [f64; 2], end: [f64; 2] },
    Radial { theta: f64, r0: f64, r1: f64 },
}

impl Cut {
    pub fn segment(&self) -> Segment {
        match *self {
            Cut::Segment { start, end } => Segment { start, end },
            Cut::Radial { theta, r0, r1 } => {
                let (s, c) = theta.sin_cos();
                Segment { start: [r0 * c, r0 * s], end: [r1 * c, r1 * s] }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerKind {
    Interior,
    Boundary,
}

#[derive(Clone, Debug, Serialize)]
pub struct CornerPoint {
    pub id: usize,
    pub position: [f64; 2],
    pub kind: CornerKind,
    /// Number of interface arcs ending here.
    pub degree: usize,
}

/// Maximal piece of a cut between two corner points. `left` is the
/// subdomain on the side of [`Segment::left_normal`].
#[derive(Clone, Debug, Serialize)]
pub struct InterfaceArc {
    pub id: usize,
    pub geometry: Segment,
    pub endpoints: [usize; 2],
    pub left: usize,
    pub right: usize,
}

impl InterfaceArc {
    /// Slit pieces have the same subdomain on both sides.
    pub fn is_self_bordering(&self) -> bool {
        self.left == self.right
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcSide {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ArcRef {
    pub arc: usize,
    pub side: ArcSide,
}

/// Closed form available for a subdomain's Dirichlet ground state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticTag {
    RectCell { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Disk sector between the angles `theta0 < theta1`.
    Sector { theta0: f64, theta1: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Subdomain {
    pub id: usize,
    /// Interface arcs on the boundary, with the side facing this subdomain.
    pub boundary_arcs: Vec<ArcRef>,
    pub analytic_tag: Option<AnalyticTag>,
    /// Indices into [`CellLayout::cells`].
    pub cells: Vec<usize>,
    pub area: f64,
}

/// Axis-aligned rectangle or polar box `[r0, r1] × [t0, t1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellGeometry {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Polar { r0: f64, r1: f64, t0: f64, t1: f64 },
}

impl CellGeometry {
    pub fn area(&self) -> f64 {
        match *self {
            CellGeometry::Rect { x0, x1, y0, y1 } => (x1 - x0) * (y1 - y0),
            CellGeometry::Polar { r0, r1, t0, t1 } => 0.5 * (r1 * r1 - r0 * r0) * (t1 - t0),
        }
    }

    /// Reference coordinates in `[-1, 1]²` of `p`, if `p` lies in the cell.
    pub fn reference_coords(&self, p: [f64; 2], tol: f64) -> Option<[f64; 2]> {
        match *self {
            CellGeometry::Rect { x0, x1, y0, y1 } => {
                if p[0] < x0 - tol || p[0] > x1 + tol || p[1] < y0 - tol || p[1] > y1 + tol {
                    return None;
                }
                Some([
                    (2.0 * (p[0] - x0) / (x1 - x0) - 1.0).clamp(-1.0, 1.0),
                    (2.0 * (p[1] - y0) / (y1 - y0) - 1.0).clamp(-1.0, 1.0),
                ])
            }
            CellGeometry::Polar { r0, r1, t0, t1 } => {
                let r = p[0].hypot(p[1]);
                if r < r0 - tol || r > r1 + tol {
                    return None;
                }
                let xi = (2.0 * (r - r0) / (r1 - r0) - 1.0).clamp(-1.0, 1.0);
                if r < tol {
                    return (r0 == 0.0).then_some([-1.0, 0.0]);
                }
                let th = unwrap_angle(p[1].atan2(p[0]), t0);
                let slack = tol / r;
                if th > t1 + slack {
                    // just below t0 after wrapping
                    if th - TAU >= t0 - slack {
                        return Some([xi, -1.0]);
                    }
                    return None;
                }
                Some([xi, (2.0 * (th - t0) / (t1 - t0) - 1.0).clamp(-1.0, 1.0)])
            }
        }
    }
}

/// Side of a cell in reference coordinates: `XMin` is `ξ = -1`, `YMax` is
/// `η = +1`. For polar cells `ξ` is the radius and `η` the angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeSide {
    XMin,
    XMax,
    YMin,
    YMax,
}

impl EdgeSide {
    pub const ALL: [EdgeSide; 4] = [EdgeSide::XMin, EdgeSide::XMax, EdgeSide::YMin, EdgeSide::YMax];
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Two cells sharing a full edge; `cut` marks edges lying on a cut.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CellLink {
    pub a: usize,
    pub a_side: EdgeSide,
    pub b: usize,
    pub b_side: EdgeSide,
    pub cut: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub geometry: CellGeometry,
    pub subdomain: usize,
}

/// Conforming decomposition of the domain into cells whose edges contain
/// every cut.
#[derive(Clone, Debug, Serialize)]
pub struct CellLayout {
    pub cells: Vec<Cell>,
    pub links: Vec<CellLink>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Partition {
    pub domain: DomainShape,
    pub cuts: Vec<Cut>,
    pub subdomains: Vec<Subdomain>,
    pub interfaces: Vec<InterfaceArc>,
    pub corners: Vec<CornerPoint>,
    pub layout: CellLayout,
}

/// Angle equivalent to `th` in `[base, base + 2π)`.
pub(crate) fn unwrap_angle(th: f64, base: f64) -> f64 {
    let mut d = (th - base).rem_euclid(TAU);
    if d >= TAU - 1e-13 {
        d = 0.0;
    }
    base + d
}

/// Partition of `(0, απ) × (0, π)` by axis-aligned cuts.
pub fn build_rect_partition(alpha: f64, cuts: &[Segment]) -> Result<Partition> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidGeometry(format!("aspect ratio {alpha} must be positive")));
    }
    let domain = DomainShape::Rectangle { alpha };
    let tol = domain.tol();
    let w = alpha * PI;
    let snap = |v: f64, hi: f64| {
        if v.abs() < tol {
            0.0
        } else if (v - hi).abs() < tol {
            hi
        } else {
            v
        }
    };
    let mut segs = Vec::with_capacity(cuts.len());
    for (i, c) in cuts.iter().enumerate() {
        let s = Segment {
            start: [snap(c.start[0], w), snap(c.start[1], PI)],
            end: [snap(c.end[0], w), snap(c.end[1], PI)],
        };
        if !domain.contains(s.start) || !domain.contains(s.end) {
            return Err(Error::InvalidGeometry(format!("cut {i} leaves the rectangle")));
        }
        if s.length() < tol {
            return Err(Error::InvalidGeometry(format!("cut {i} has zero length")));
        }
        let vertical = (s.start[0] - s.end[0]).abs() < tol;
        let horizontal = (s.start[1] - s.end[1]).abs() < tol;
        if !(vertical || horizontal) {
            return Err(Error::InvalidGeometry(format!("cut {i} is not axis-aligned")));
        }
        if (vertical && (s.start[0] < tol || s.start[0] > w - tol)) || (horizontal && (s.start[1] < tol || s.start[1] > PI - tol)) {
            return Err(Error::InvalidGeometry(format!("cut {i} lies on the outer boundary")));
        }
        segs.push(s);
    }
    for i in 0..segs.len() {
        for j in 0..i {
            if collinear_overlap(&segs[i], &segs[j], tol) {
                return Err(Error::InvalidGeometry(format!("cuts {j} and {i} overlap")));
            }
        }
    }
    let mut xs = vec![0.0, w];
    let mut ys = vec![0.0, PI];
    for s in &segs {
        xs.extend([s.start[0], s.end[0]]);
        ys.extend([s.start[1], s.end[1]]);
    }
    let xs = sorted_unique(xs, tol);
    let ys = sorted_unique(ys, tol);
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let idx = |i: usize, j: usize| j * nx + i;
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            cells.push(CellGeometry::Rect { x0: xs[i], x1: xs[i + 1], y0: ys[j], y1: ys[j + 1] });
        }
    }
    let on_cut = |p: [f64; 2]| segs.iter().any(|s| s.project(p).1 < tol);
    let mut links = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                let mid = [xs[i + 1], 0.5 * (ys[j] + ys[j + 1])];
                links.push(CellLink { a: idx(i, j), a_side: EdgeSide::XMax, b: idx(i + 1, j), b_side: EdgeSide::XMin, cut: on_cut(mid) });
            }
            if j + 1 < ny {
                let mid = [0.5 * (xs[i] + xs[i + 1]), ys[j + 1]];
                links.push(CellLink { a: idx(i, j), a_side: EdgeSide::YMax, b: idx(i, j + 1), b_side: EdgeSide::YMin, cut: on_cut(mid) });
            }
        }
    }
    let cuts = segs.iter().map(|s| Cut::Segment { start: s.start, end: s.end }).collect();
    assemble(domain, cuts, segs, cells, links)
}

/// Partition of the unit disk by radial segments.
pub fn build_disk_partition(cuts: &[Cut]) -> Result<Partition> {
    let domain = DomainShape::Disk;
    let tol = domain.tol();
    let mut rays = Vec::with_capacity(cuts.len());
    for (i, c) in cuts.iter().enumerate() {
        let Cut::Radial { theta, r0, r1 } = *c else {
            return Err(Error::InvalidGeometry(format!("cut {i}: disk partitions take radial cuts")));
        };
        if !(theta.is_finite() && r0 >= 0.0 && r1 <= 1.0 + tol && r1 - r0 > tol) {
            return Err(Error::InvalidGeometry(format!("cut {i}: radial segment [{r0}, {r1}] at angle {theta}")));
        }
        rays.push((theta.rem_euclid(TAU), r0, r1.min(1.0)));
    }
    for i in 0..rays.len() {
        for j in 0..i {
            let same = angle_dist(rays[i].0, rays[j].0) < tol;
            let overlap = rays[i].2.min(rays[j].2) - rays[i].1.max(rays[j].1);
            if same && overlap > tol {
                return Err(Error::InvalidGeometry(format!("cuts {j} and {i} overlap")));
            }
        }
    }
    let base = rays.first().map(|r| r.0).unwrap_or(0.0);
    let mut angles: Vec<f64> = rays.iter().map(|r| unwrap_angle(r.0, base)).collect();
    if angles.is_empty() {
        angles.push(0.0);
    }
    let mut angles = sorted_unique(angles, tol);
    if angles.len() > 1 && (angles[0] + TAU - angles[angles.len() - 1]) < tol {
        angles.pop();
    }
    // Cells span at most a quarter turn.
    let mut thetas = Vec::new();
    for (k, &a) in angles.iter().enumerate() {
        let next = if k + 1 < angles.len() { angles[k + 1] } else { angles[0] + TAU };
        let parts = ((next - a) / (0.5 * PI) - 1e-9).ceil().max(1.0) as usize;
        for p in 0..parts {
            thetas.push(a + (next - a) * p as f64 / parts as f64);
        }
    }
    let nt = thetas.len();
    thetas.push(thetas[0] + TAU);
    let mut rs = vec![0.0, 1.0];
    for r in &rays {
        rs.extend([r.1, r.2]);
    }
    let rs = sorted_unique(rs, tol);
    let nr = rs.len() - 1;
    let idx = |it: usize, ir: usize| it * nr + ir;
    let mut cells = Vec::new();
    for it in 0..nt {
        for ir in 0..nr {
            cells.push(CellGeometry::Polar { r0: rs[ir], r1: rs[ir + 1], t0: thetas[it], t1: thetas[it + 1] });
        }
    }
    let segs: Vec<Segment> = cuts.iter().map(|c| c.segment()).collect();
    let on_cut = |p: [f64; 2]| segs.iter().any(|s| s.project(p).1 < tol);
    let mut links = Vec::new();
    for it in 0..nt {
        for ir in 0..nr {
            if ir + 1 < nr {
                links.push(CellLink { a: idx(it, ir), a_side: EdgeSide::XMax, b: idx(it, ir + 1), b_side: EdgeSide::XMin, cut: false });
            }
            let next = (it + 1) % nt;
            if next != it {
                let rm = 0.5 * (rs[ir] + rs[ir + 1]);
                let th = thetas[it + 1];
                let cut = on_cut([rm * th.cos(), rm * th.sin()]);
                links.push(CellLink { a: idx(it, ir), a_side: EdgeSide::YMax, b: idx(next, ir), b_side: EdgeSide::YMin, cut });
            }
        }
    }
    let cuts: Vec<Cut> = rays.iter().map(|&(theta, r0, r1)| Cut::Radial { theta, r0, r1 }).collect();
    assemble(domain, cuts, segs, cells, links)
}

/// `k` radial cuts at `rotation + 2πj/k`, `j = 0..k`.
pub fn build_radial_partition(k: usize) -> Result<Partition> {
    build_radial_partition_rotated(k, 0.0)
}

pub fn build_radial_partition_rotated(k: usize, rotation: f64) -> Result<Partition> {
    if k < 2 {
        return Err(Error::InvalidGeometry(format!("radial partition needs k >= 2, got {k}")));
    }
    let cuts: Vec<Cut> =
        (0..k).map(|j| Cut::Radial { theta: rotation + TAU * j as f64 / k as f64, r0: 0.0, r1: 1.0 }).collect();
    build_disk_partition(&cuts)
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn sorted_unique(mut v: Vec<f64>, tol: f64) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        if out.last().is_none_or(|&l| x - l > tol) {
            out.push(x);
        }
    }
    out
}

fn collinear_overlap(a: &Segment, b: &Segment, tol: f64) -> bool {
    let ta = a.tangent();
    let tb = b.tangent();
    if (ta[0] * tb[1] - ta[1] * tb[0]).abs() > 1e-12 {
        return false;
    }
    let n = a.left_normal();
    let off = (b.start[0] - a.start[0]) * n[0] + (b.start[1] - a.start[1]) * n[1];
    if off.abs() > tol {
        return false;
    }
    let proj = |p: [f64; 2]| (p[0] - a.start[0]) * ta[0] + (p[1] - a.start[1]) * ta[1];
    let (b0, b1) = (proj(b.start), proj(b.end));
    let overlap = a.length().min(b0.max(b1)) - 0.0f64.max(b0.min(b1));
    overlap > tol
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn intersection(a: &Segment, b: &Segment, tol: f64) -> Option<[f64; 2]> {
    let d1 = [a.end[0] - a.start[0], a.end[1] - a.start[1]];
    let d2 = [b.end[0] - b.start[0], b.end[1] - b.start[1]];
    let den = d1[0] * d2[1] - d1[1] * d2[0];
    if den.abs() < 1e-14 * a.length() * b.length() {
        return None;
    }
    let w = [b.start[0] - a.start[0], b.start[1] - a.start[1]];
    let s = (w[0] * d2[1] - w[1] * d2[0]) / den;
    let t = (w[0] * d1[1] - w[1] * d1[0]) / den;
    let ea = tol / a.length();
    let eb = tol / b.length();
    if s < -ea || s > 1.0 + ea || t < -eb || t > 1.0 + eb {
        return None;
    }
    Some([a.start[0] + s * d1[0], a.start[1] + s * d1[1]])
}

fn assemble(
    domain: DomainShape,
    cuts: Vec<Cut>,
    segs: Vec<Segment>,
    geoms: Vec<CellGeometry>,
    links: Vec<CellLink>,
) -> Result<Partition> {
    let tol = domain.tol();
    let n = geoms.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for l in links.iter().filter(|l| !l.cut) {
        let (ra, rb) = (find(&mut parent, l.a), find(&mut parent, l.b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut cell_sub = vec![0; n];
    for c in 0..n {
        let r = find(&mut parent, c);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        cell_sub[c] = label[r];
    }
    let cells: Vec<Cell> = geoms.iter().zip(&cell_sub).map(|(&g, &s)| Cell { geometry: g, subdomain: s }).collect();
    let layout = CellLayout { cells, links };

    // Corners: cut endpoints and pairwise intersections.
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let add = |p: [f64; 2], pts: &mut Vec<[f64; 2]>| {
        if !pts.iter().any(|q| (p[0] - q[0]).hypot(p[1] - q[1]) < tol) {
            pts.push(p);
        }
    };
    for s in &segs {
        add(s.start, &mut pts);
        add(s.end, &mut pts);
    }
    for i in 0..segs.len() {
        for j in 0..i {
            if let Some(p) = intersection(&segs[i], &segs[j], tol) {
                add(p, &mut pts);
            }
        }
    }
    let mut corners: Vec<CornerPoint> = pts
        .iter()
        .enumerate()
        .map(|(id, &p)| CornerPoint {
            id,
            position: p,
            kind: if domain.on_boundary(p) { CornerKind::Boundary } else { CornerKind::Interior },
            degree: 0,
        })
        .collect();

    let eps = 1e-7 * domain.diameter();
    let mut interfaces = Vec::new();
    for s in &segs {
        let mut on: Vec<(f64, usize)> = corners
            .iter()
            .filter_map(|c| {
                let (t, d) = s.project(c.position);
                (d < tol).then_some((t, c.id))
            })
            .collect();
        on.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in on.windows(2) {
            let geometry = Segment { start: corners[w[0].1].position, end: corners[w[1].1].position };
            if geometry.length() < tol {
                continue;
            }
            let m = geometry.midpoint();
            let nl = geometry.left_normal();
            let side = |sgn: f64| locate_in(&layout, [m[0] + sgn * eps * nl[0], m[1] + sgn * eps * nl[1]], tol);
            let (Some(left), Some(right)) = (side(1.0), side(-1.0)) else {
                return Err(Error::InvalidGeometry("cut piece outside the cell layout".into()));
            };
            interfaces.push(InterfaceArc { id: interfaces.len(), geometry, endpoints: [w[0].1, w[1].1], left, right });
        }
    }
    for a in &interfaces {
        corners[a.endpoints[0]].degree += 1;
        corners[a.endpoints[1]].degree += 1;
    }

    let mut subdomains: Vec<Subdomain> = (0..count)
        .map(|id| Subdomain { id, boundary_arcs: Vec::new(), analytic_tag: None, cells: Vec::new(), area: 0.0 })
        .collect();
    for (c, cell) in layout.cells.iter().enumerate() {
        subdomains[cell.subdomain].cells.push(c);
        subdomains[cell.subdomain].area += cell.geometry.area();
    }
    for a in &interfaces {
        subdomains[a.left].boundary_arcs.push(ArcRef { arc: a.id, side: ArcSide::Left });
        subdomains[a.right].boundary_arcs.push(ArcRef { arc: a.id, side: ArcSide::Right });
    }
    for s in subdomains.iter_mut() {
        let self_bordered = s.boundary_arcs.iter().any(|r| interfaces[r.arc].is_self_bordering());
        if !self_bordered {
            s.analytic_tag = analytic_tag(&layout, s);
        }
    }
    Ok(Partition { domain, cuts, subdomains, interfaces, corners, layout })
}

fn locate_in(layout: &CellLayout, p: [f64; 2], tol: f64) -> Option<usize> {
    layout.cells.iter().find(|c| c.geometry.reference_coords(p, tol).is_some()).map(|c| c.subdomain)
}

fn analytic_tag(layout: &CellLayout, s: &Subdomain) -> Option<AnalyticTag> {
    let geoms: Vec<CellGeometry> = s.cells.iter().map(|&c| layout.cells[c].geometry).collect();
    match geoms[0] {
        CellGeometry::Rect { .. } => {
            let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for g in &geoms {
                if let CellGeometry::Rect { x0: a, x1: b, y0: c, y1: d } = *g {
                    x0 = x0.min(a);
                    x1 = x1.max(b);
                    y0 = y0.min(c);
                    y1 = y1.max(d);
                }
            }
            let bbox = (x1 - x0) * (y1 - y0);
            ((bbox - s.area).abs() < 1e-10 * bbox).then_some(AnalyticTag::RectCell { x0, x1, y0, y1 })
        }
        CellGeometry::Polar { .. } => {
            // A sector: full radial coverage on a contiguous angular run.
            let mut runs: Vec<(f64, f64, f64)> = Vec::new();
            for g in &geoms {
                if let CellGeometry::Polar { r0, r1, t0, t1 } = *g {
                    match runs.iter_mut().find(|r| (r.0 - t0).abs() < 1e-12) {
                        Some(r) => r.2 += r1 - r0,
                        None => runs.push((t0, t1, r1 - r0)),
                    }
                }
            }
            if runs.iter().any(|r| (r.2 - 1.0).abs() > 1e-10) {
                return None;
            }
            runs.sort_by(|a, b| a.0.total_cmp(&b.0));
            // Rotate so the run starts after its angular gap.
            let total: f64 = runs.iter().map(|r| r.1 - r.0).sum();
            if total > TAU - 1e-9 {
                return None;
            }
            let m = runs.len();
            let start = (0..m).find(|&i| {
                let prev = runs[(i + m - 1) % m];
                angle_dist(prev.1, runs[i].0) > 1e-9 || m == 1
            })?;
            let mut th = runs[start].0;
            for k in 0..m {
                let r = runs[(start + k) % m];
                if angle_dist(r.0, th) > 1e-9 {
                    return None;
                }
                th = r.1;
            }
            let theta0 = runs[start].0;
            Some(AnalyticTag::Sector { theta0, theta1: theta0 + total })
        }
    }
}

impl Partition {
    /// Subdomain containing `p`, if any.
    pub fn locate(&self, p: [f64; 2]) -> Option<usize> {
        locate_in(&self.layout, p, self.domain.tol())
    }

    /// Arc containing `p` together with its parameter `t ∈ [-1, 1]`.
    pub fn arc_at(&self, p: [f64; 2]) -> Option<(usize, f64)> {
        let tol = 10.0 * self.domain.tol();
        self.interfaces.iter().find_map(|a| {
            let (t, d) = a.geometry.project(p);
            (d < tol).then_some((a.id, t))
        })
    }

    pub fn interior_corners(&self) -> impl Iterator<Item = &CornerPoint> {
        self.corners.iter().filter(|c| c.kind == CornerKind::Interior)
    }

    /// Edges of the adjacency graph: pairs of distinct subdomains sharing
    /// an arc of positive length, sorted and deduplicated.
    pub fn adjacency(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .interfaces
            .iter()
            .filter(|a| !a.is_self_bordering() && a.geometry.length() > ADJACENCY_LENGTH)
            .map(|a| (a.left.min(a.right), a.left.max(a.right)))
            .collect();
        e.sort();
        e.dedup();
        e
    }

    /// Total length of all interface arcs.
    pub fn interface_length(&self) -> f64 {
        self.interfaces.iter().map(|a| a.geometry.length()).sum()
    }
}

/// Two-colouring of the adjacency graph, or `None` when it has an odd cycle.
/// Breadth-first search from the lowest-numbered subdomain of each component,
/// which receives colour 0.
pub fn check_bipartite(p: &Partition) -> Option<Vec<u8>> {
    bipartite_coloring(p.subdomains.len(), &p.adjacency())
}

/// Two-colouring of an arbitrary graph on `n` vertices.
pub fn bipartite_coloring(n: usize, edges: &[(usize, usize)]) -> Option<Vec<u8>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color = vec![u8::MAX; n];
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    q.push_back(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

/// How to choose the interface normal `ν` on every arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrientationRule {
    /// `ν` is the left normal of each arc.
    LeftNormal,
    /// Radial partitions: `ν = -e_θ` on the first ray and
    /// `(-1)^{j+1} e_θ` on ray `j`.
    DiskCounterclockwise,
    /// `ν` points out of the listed subdomains; each arc must border exactly
    /// one of them.
    OutwardFrom { subdomains: Vec<usize> },
    /// As `OutwardFrom`, naming the subdomains by interior points.
    OutwardFromPoints { points: Vec<[f64; 2]> },
    /// Outward from colour class 0 of a bipartite partition.
    Bipartite,
}

/// Unit normal field on Σ: on arc `a`, `ν = sign[a] · left_normal(a)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalFrame {
    pub signs: Vec<f64>,
    pub normals: Vec<[f64; 2]>,
}

impl NormalFrame {
    /// `χ = ν · ν_side`, where `ν_side` is the outward normal of the
    /// subdomain on that side.
    pub fn chi(&self, arc: usize, side: ArcSide) -> f64 {
        match side {
            ArcSide::Left => -self.signs[arc],
            ArcSide::Right => self.signs[arc],
        }
    }

    /// `χ_i` of subdomain `sub` on `arc`; for a slit both values occur and
    /// the left one is returned.
    pub fn chi_of(&self, p: &Partition, sub: usize, arc: usize) -> Option<f64> {
        let a = &p.interfaces[arc];
        if a.left == sub {
            Some(self.chi(arc, ArcSide::Left))
        } else if a.right == sub {
            Some(self.chi(arc, ArcSide::Right))
        } else {
            None
        }
    }

    /// The frame with every normal reversed.
    pub fn flipped(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|s| -s).collect(),
            normals: self.normals.iter().map(|n| [-n[0], -n[1]]).collect(),
        }
    }
}

/// Chooses `ν` on every interface arc according to `rule`.
pub fn orient_interfaces(p: &Partition, rule: &OrientationRule) -> Result<NormalFrame> {
    let signs: Vec<f64> = match rule {
        OrientationRule::LeftNormal => vec![1.0; p.interfaces.len()],
        OrientationRule::DiskCounterclockwise => disk_signs(p)?,
        OrientationRule::OutwardFrom { subdomains } => outward_signs(p, subdomains)?,
        OrientationRule::OutwardFromPoints { points } => {
            let subs = points
                .iter()
                .map(|&q| p.locate(q).ok_or_else(|| Error::InvalidGeometry(format!("point {q:?} outside the domain"))))
                .collect::<Result<Vec<_>>>()?;
            outward_signs(p, &subs)?
        }
        OrientationRule::Bipartite => {
            let colors = check_bipartite(p)
                .ok_or_else(|| Error::InvalidGeometry("partition is not bipartite".into()))?;
            let subs: Vec<usize> = (0..colors.len()).filter(|&i| colors[i] == 0).collect();
            outward_signs(p, &subs)?
        }
    };
    let normals = p
        .interfaces
        .iter()
        .zip(&signs)
        .map(|(a, s)| {
            let n = a.geometry.left_normal();
            [s * n[0], s * n[1]]
        })
        .collect();
    Ok(NormalFrame { signs, normals })
}

fn outward_signs(p: &Partition, subs: &[usize]) -> Result<Vec<f64>> {
    p.interfaces
        .iter()
        .map(|a| match (subs.contains(&a.left), subs.contains(&a.right)) {
            (true, false) => Ok(-1.0),
            (false, true) => Ok(1.0),
            _ => Err(Error::InvalidGeometry(format!("arc {} does not border exactly one listed subdomain", a.id))),
        })
        .collect()
}

fn disk_signs(p: &Partition) -> Result<Vec<f64>> {
    let k = p.cuts.len();
    let bad = || Error::InvalidGeometry("counterclockwise rule needs a radial partition".into());
    if p.domain != DomainShape::Disk || k < 2 || p.interfaces.len() != k {
        return Err(bad());
    }
    let Cut::Radial { theta: base, .. } = p.cuts[0] else { return Err(bad()) };
    for (j, c) in p.cuts.iter().enumerate() {
        let Cut::Radial { theta, r0, r1 } = *c else { return Err(bad()) };
        let want = base + TAU * j as f64 / k as f64;
        if r0 != 0.0 || (r1 - 1.0).abs() > 1e-12 || angle_dist(theta, want) > 1e-9 {
            return Err(bad());
        }
    }
    Ok((0..k).map(|j| if j == 0 { -1.0 } else if j % 2 == 1 { 1.0 } else { -1.0 }).collect())
}

/// The cross partition of `(0, απ) × (0, π)` by the two symmetry lines.
pub fn rect_cross(alpha: f64) -> Result<Partition> {
    let w = alpha * PI;
    build_rect_partition(
        alpha,
        &[Segment::new([0.0, 0.5 * PI], [w, 0.5 * PI]), Segment::new([0.5 * w, 0.0], [0.5 * w, PI])],
    )
}

/// Cross with its centre moved to `center`.
pub fn rect_shifted_cross(alpha: f64, center: [f64; 2]) -> Result<Partition> {
    let w = alpha * PI;
    build_rect_partition(
        alpha,
        &[Segment::new([0.0, center[1]], [w, center[1]]), Segment::new([center[0], 0.0], [center[0], PI])],
    )
}

/// Rule used for cross partitions: `ν` points out of the bottom-left and
/// top-right cells.
pub fn cross_rule(alpha: f64) -> OrientationRule {
    let e = 1e-3;
    OrientationRule::OutwardFromPoints { points: vec![[e, e], [alpha * PI - e, PI - e]] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_has_four_cells_and_one_interior_corner() {
        let p = rect_cross(1.5).unwrap();
        assert_eq!(p.subdomains.len(), 4);
        assert_eq!(p.interfaces.len(), 4);
        assert_eq!(p.interior_corners().count(), 1);
        assert_eq!(p.interior_corners().next().unwrap().degree, 4);
        assert!(p.subdomains.iter().all(|s| matches!(s.analytic_tag, Some(AnalyticTag::RectCell { .. }))));
        assert_eq!(check_bipartite(&p).unwrap(), vec![0, 1, 1, 0]);
    }

    #[test]
    fn radial_partition_orientation_matches_convention() {
        let p = build_radial_partition(4).unwrap();
        let f = orient_interfaces(&p, &OrientationRule::DiskCounterclockwise).unwrap();
        let chis: Vec<Vec<f64>> = p
            .subdomains
            .iter()
            .map(|s| s.boundary_arcs.iter().map(|r| f.chi(r.arc, r.side)).collect())
            .collect();
        assert_eq!(chis, vec![vec![1.0, 1.0], vec![-1.0, -1.0], vec![1.0, 1.0], vec![-1.0, -1.0]]);
        let p = build_radial_partition(3).unwrap();
        let f = orient_interfaces(&p, &OrientationRule::DiskCounterclockwise).unwrap();
        let last: Vec<f64> = p.subdomains[2].boundary_arcs.iter().map(|r| f.chi(r.arc, r.side)).collect();
        assert!(last.contains(&1.0) && last.contains(&-1.0));
        assert!(check_bipartite(&p).is_none());
    }

    #[test]
    fn sectors_carry_analytic_tags() {
        let p = build_radial_partition_rotated(3, 0.5 * PI).unwrap();
        assert_eq!(p.subdomains.len(), 3);
        for (i, s) in p.subdomains.iter().enumerate() {
            let Some(AnalyticTag::Sector { theta0, theta1 }) = s.analytic_tag else { panic!() };
            assert!((theta0 - (0.5 * PI + TAU * i as f64 / 3.0)).abs() < 1e-12);
            assert!((theta1 - theta0 - TAU / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn slits_give_self_bordering_arcs() {
        let a = 1.5;
        let w = a * PI;
        let p = build_rect_partition(
            a,
            &[Segment::new([2.14, 0.0], [2.14, 1.394]), Segment::new([w - 2.14, PI - 1.394], [w - 2.14, PI])],
        )
        .unwrap();
        assert_eq!(p.subdomains.len(), 1);
        assert!(p.interfaces.iter().all(|a| a.is_self_bordering()));
        assert_eq!(p.interior_corners().count(), 2);
    }

    #[test]
    fn invalid_cuts_are_rejected() {
        assert!(build_rect_partition(1.0, &[Segment::new([0.0, 0.0], [1.0, 1.0])]).is_err());
        assert!(build_rect_partition(1.0, &[Segment::new([0.0, 1.0], [5.0, 1.0])]).is_err());
        assert!(build_rect_partition(
            1.0,
            &[Segment::new([0.0, 1.0], [2.0, 1.0]), Segment::new([1.0, 1.0], [3.0, 1.0])]
        )
        .is_err());
        assert!(build_rect_partition(-1.0, &[]).is_err());
        assert!(build_radial_partition(1).is_err());
    }
}
