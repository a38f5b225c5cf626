//! Structural invariants checked over randomized inputs.

use std::f64::consts::{PI, TAU};

use faer::Mat;
use proptest::prelude::*;

use spectral_partitions::numerics::linalg::sym_generalized_eigs;
use spectral_partitions::io::fmt_num;
use spectral_partitions::numerics::{bessel_zero, ChebGrid};
use spectral_partitions::partition::{
    build_disk_partition, build_radial_partition, build_radial_partition_rotated, build_rect_partition, check_bipartite, cross_rule,
    orient_interfaces, rect_cross, ArcSide, Cut, OrientationRule, Partition, Segment,
};
use spectral_partitions::plap::{assemble_plap, assemble_plap_gauged, solve_eigs};
use spectral_partitions::rect::{rect_eigenvalue, rect_spectral_position, AspectRatio};
use spectral_partitions::variation::dtn::DtnContext;
use spectral_partitions::variation::{
    arc_polynomial_basis, criticality, dtn::weighted_trace, dtn_form_matrix_with, groundstate_data, hadamard_first, moments, project_equipartition_tangent, AnalyticField,
    DeformationField, FieldTerm,
};

/// Full-height vertical cuts, each strip optionally split by horizontal
/// segments spanning it. Produces T-junctions, hence odd cycles, often.
fn strip_partition(alpha: f64, xs: &[f64], splits: &[Vec<f64>]) -> Partition {
    let w = alpha * PI;
    let mut bounds = vec![0.0];
    bounds.extend(xs.iter().map(|x| x * w));
    bounds.push(w);
    let mut segs: Vec<Segment> = xs.iter().map(|x| Segment::new([x * w, 0.0], [x * w, PI])).collect();
    for (i, ys) in splits.iter().enumerate() {
        for y in ys {
            segs.push(Segment::new([bounds[i], y * PI], [bounds[i + 1], y * PI]));
        }
    }
    build_rect_partition(alpha, &segs).expect("strip partition")
}

fn strip_strategy() -> impl Strategy<Value = Partition> {
    (0.7f64..1.8, 0usize..3).prop_flat_map(|(alpha, ncuts)| {
        let xs = Just((1..=ncuts).map(|i| i as f64 / (ncuts + 1) as f64).collect::<Vec<_>>());
        let splits = proptest::collection::vec(proptest::sample::subsequence(vec![0.25, 0.5, 0.75], 0..=2), ncuts + 1);
        (Just(alpha), xs, splits).prop_map(|(a, xs, sp)| strip_partition(a, &xs, &sp))
    })
}

fn disk_strategy() -> impl Strategy<Value = Partition> {
    (2usize..8, 0.0f64..TAU, proptest::collection::vec(0.1f64..0.9, 8)).prop_map(|(k, rot, jitter)| {
        // Rays from the centre with perturbed angles stay ordered.
        let cuts: Vec<Cut> = (0..k)
            .map(|j| Cut::Radial { theta: rot + TAU * (j as f64 + 0.6 * (jitter[j] - 0.5)) / k as f64, r0: 0.0, r1: 1.0 })
            .collect();
        build_disk_partition(&cuts).expect("disk partition")
    })
}

/// Exhaustive 2-colouring of the adjacency graph.
fn brute_force_bipartite(n: usize, edges: &[(usize, usize)]) -> bool {
    (0u32..1 << n).any(|mask| edges.iter().all(|&(a, b)| (mask >> a & 1) != (mask >> b & 1)))
}

fn assert_antisymmetric(p: &Partition, rule: &OrientationRule) {
    let frame = orient_interfaces(p, rule).unwrap();
    for a in p.interfaces.iter().filter(|a| !a.is_self_bordering()) {
        assert_eq!(frame.chi(a.id, ArcSide::Left) * frame.chi(a.id, ArcSide::Right), -1.0, "arc {}", a.id);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi_is_antisymmetric_on_rectangles(p in strip_strategy()) {
        assert_antisymmetric(&p, &OrientationRule::LeftNormal);
        if check_bipartite(&p).is_some() {
            assert_antisymmetric(&p, &OrientationRule::Bipartite);
        }
    }

    #[test]
    fn chi_is_antisymmetric_on_disks(p in disk_strategy()) {
        assert_antisymmetric(&p, &OrientationRule::LeftNormal);
        if check_bipartite(&p).is_some() {
            assert_antisymmetric(&p, &OrientationRule::Bipartite);
        }
    }

    #[test]
    fn chi_is_antisymmetric_on_sectors(k in 2usize..11, rot in 0.0f64..TAU) {
        assert_antisymmetric(&build_radial_partition_rotated(k, rot).unwrap(), &OrientationRule::DiskCounterclockwise);
    }

    #[test]
    fn bipartite_check_agrees_with_brute_force(p in prop_oneof![strip_strategy(), disk_strategy()]) {
        let n = p.subdomains.len();
        prop_assume!(n <= 8);
        let edges = p.adjacency();
        let colouring = check_bipartite(&p);
        prop_assert_eq!(colouring.is_some(), brute_force_bipartite(n, &edges));
        if let Some(c) = colouring {
            prop_assert!(edges.iter().all(|&(a, b)| c[a] != c[b]));
        }
    }

    #[test]
    fn spectral_position_matches_enumeration(m in 1u64..6, n in 1u64..6, alpha in 0.4f64..2.5) {
        let lambda = rect_eigenvalue(m, n, alpha).unwrap();
        let mut all = Vec::new();
        for i in 1..60u64 {
            for j in 1..60u64 {
                all.push(rect_eigenvalue(i, j, alpha).unwrap());
            }
        }
        let tol = 1e-12 * lambda;
        let below = all.iter().filter(|&&v| v < lambda - tol).count();
        let pos = rect_spectral_position(m, n, AspectRatio::real(alpha)).unwrap();
        prop_assert_eq!(pos.position, below + 1);
    }

    #[test]
    fn congruence_preserves_generalized_eigenvalues(seed in proptest::collection::vec(-0.3f64..0.3, 36)) {
        let n = 6;
        let a = Mat::<f64>::from_fn(n, n, |i, j| if i == j { 2.0 + i as f64 } else if i.abs_diff(j) == 1 { -0.5 } else { 0.0 });
        let b = Mat::<f64>::from_fn(n, n, |i, j| if i == j { 1.0 + 0.1 * j as f64 } else { 0.0 });
        let s = Mat::<f64>::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + seed[i * n + j]);
        let sa = s.transpose() * &a * &s;
        let sb = s.transpose() * &b * &s;
        let e1 = sym_generalized_eigs(a.as_ref(), b.as_ref(), n).unwrap();
        let e2 = sym_generalized_eigs(sa.as_ref(), sb.as_ref(), n).unwrap();
        for (x, y) in e1.iter().zip(&e2) {
            prop_assert!((x.value - y.value).abs() < 1e-9 * x.value.abs().max(1.0));
        }
    }

    #[test]
    fn fresh_gauges_leave_the_spectrum_unchanged(flips in proptest::collection::vec(any::<bool>(), 4)) {
        let p = rect_cross(1.0).unwrap();
        let gauge: Vec<f64> = flips.iter().map(|&f| if f { -1.0 } else { 1.0 }).collect();
        let base = solve_eigs(&assemble_plap(&p, 10).unwrap(), 6).unwrap();
        let flipped = solve_eigs(&assemble_plap_gauged(&p, 10, &gauge).unwrap(), 6).unwrap();
        for (x, y) in base.pairs.iter().zip(&flipped.pairs) {
            prop_assert!((x.value - y.value).abs() < 1e-10 * (1.0 + x.value));
        }
    }
}

proptest! {
    #[test]
    fn formatted_numbers_round_trip(m in -1.0f64..1.0, e in -30i32..30) {
        let x = m * 10f64.powi(e);
        let back: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs());
    }
}

#[test]
fn radial_partitions_are_bipartite_iff_k_is_even() {
    for k in 2..=10 {
        assert_eq!(check_bipartite(&build_radial_partition(k).unwrap()).is_some(), k % 2 == 0, "k = {k}");
    }
}

#[test]
fn bessel_zeros_interlace() {
    for i in 0..12 {
        let alpha = 0.25 * i as f64;
        for n in 1..=4 {
            let (a, b, c) = (bessel_zero(alpha, n).unwrap(), bessel_zero(alpha + 1.0, n).unwrap(), bessel_zero(alpha, n + 1).unwrap());
            assert!(a < b && b < c, "α = {alpha}, n = {n}: {a} {b} {c}");
        }
    }
}

#[test]
fn chebyshev_derivative_of_exp() {
    let g = ChebGrid::new(32).unwrap();
    let f: Vec<f64> = g.nodes.iter().map(|x| x.exp()).collect();
    for i in 1..g.nodes.len() - 1 {
        let df: f64 = (0..f.len()).map(|j| g.d[(i, j)] * f[j]).sum();
        assert!((df - f[i]).abs() < 1e-9, "node {i}: {df} vs {}", f[i]);
    }
}

fn trig(cx: f64, cy: f64, fx: [f64; 2], fy: [f64; 2], px: [f64; 2], py: [f64; 2]) -> AnalyticField {
    AnalyticField::new(vec![FieldTerm::TrigProduct { coeff: [cx, cy], freq: [fx, fy], phase: [px, py] }])
}

fn random_fields(count: usize, seed: u64) -> Vec<AnalyticField> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut r = || rng.random_range(-1.0..1.0);
            trig(0.3 * r(), 0.3 * r(), [1.0 + (2.0 * r()).abs().floor(), 2.0], [1.0, 1.0 + (2.0 * r()).abs().floor()], [r(), r()], [r(), r()])
        })
        .collect()
}

#[test]
fn translations_do_not_move_eigenvalues() {
    let parts = [rect_cross(1.0).unwrap(), rect_cross(1.4).unwrap(), build_radial_partition(5).unwrap(), build_radial_partition_rotated(6, 0.3).unwrap()];
    for p in &parts {
        let frame = orient_interfaces(p, &OrientationRule::LeftNormal).unwrap();
        let gs = groundstate_data(p, 12).unwrap();
        for v in [[1.0, 0.0], [0.3, -0.7], [-0.2, 0.9]] {
            let x = DeformationField::analytic(AnalyticField::translation(v));
            for d in hadamard_first(p, &gs, &frame, &x).unwrap() {
                assert!(d.abs() < 1e-9, "{d}");
            }
        }
    }
}

/// Cross of `(0, απ) × (0, π)` with the DtN context and criticality data.
struct CrossSetup {
    p: Partition,
    ctx: DtnContext,
    crit: spectral_partitions::variation::CriticalityData,
    gs: spectral_partitions::variation::GroundStateData,
}

fn cross_setup(alpha: f64) -> CrossSetup {
    let p = rect_cross(alpha).unwrap();
    let frame = orient_interfaces(&p, &cross_rule(alpha)).unwrap();
    let gs = groundstate_data(&p, 12).unwrap();
    let crit = criticality(&p, &gs).unwrap();
    let ctx = DtnContext::new(&p, &frame, 12).unwrap();
    CrossSetup { p, ctx, crit, gs }
}

#[test]
fn tangential_fields_have_zero_hessian() {
    for alpha in [1.0, 1.5] {
        let s = cross_setup(alpha);
        let (cx, cy) = (alpha * PI / 2.0, PI / 2.0);
        // X_x vanishes on x = cx and X_y on y = cy: tangent to both cuts.
        let tangent = DeformationField::analytic(trig(0.4, -0.3, [1.0, 2.0], [1.0, 1.0], [-cx, 0.3], [0.7, -cy]));
        let other = DeformationField::analytic(random_fields(1, 7).remove(0));
        let q = s.ctx.hessian(&s.p, &s.crit, &tangent, &tangent).unwrap();
        let mixed = s.ctx.hessian(&s.p, &s.crit, &tangent, &other).unwrap();
        assert!(q.abs() < 1e-9 && mixed.abs() < 1e-9, "{q} {mixed}");
    }
}

#[test]
fn hessian_polarizes() {
    let s = cross_setup(1.5);
    let f = random_fields(2, 11);
    let (x1, x2) = (DeformationField::analytic(f[0].clone()), DeformationField::analytic(f[1].clone()));
    let plus = DeformationField::analytic(f[0].plus(&f[1]));
    let minus = DeformationField::analytic(f[0].plus(&f[1].scaled(-1.0)));
    let h = s.ctx.hessian(&s.p, &s.crit, &x1, &x2).unwrap();
    let qp = s.ctx.hessian(&s.p, &s.crit, &plus, &plus).unwrap();
    let qm = s.ctx.hessian(&s.p, &s.crit, &minus, &minus).unwrap();
    assert!((h - 0.25 * (qp - qm)).abs() < 1e-8 * (1.0 + h.abs()), "{h} {}", 0.25 * (qp - qm));
}

#[test]
fn index_is_gauge_invariant_and_moments_vanish() {
    let mut cases: Vec<(Partition, OrientationRule)> = [1.0, 1.25, 1.5].iter().map(|&a| (rect_cross(a).unwrap(), cross_rule(a))).collect();
    cases.push((build_radial_partition(4).unwrap(), OrientationRule::DiskCounterclockwise));
    cases.push((build_radial_partition(6).unwrap(), OrientationRule::DiskCounterclockwise));
    for (p, rule) in &cases {
        let frame = orient_interfaces(p, rule).unwrap();
        let gs = groundstate_data(p, 12).unwrap();
        let basis = arc_polynomial_basis(p, 3, 24).unwrap();
        let a = dtn_form_matrix_with(&DtnContext::new(p, &frame, 12).unwrap(), p, &gs, &basis).unwrap();
        let b = dtn_form_matrix_with(&DtnContext::new(p, &frame.flipped(), 12).unwrap(), p, &gs, &basis).unwrap();
        assert_eq!(a.n_minus, b.n_minus);
        assert!(a.moment_residual < 1e-10 && b.moment_residual < 1e-10, "{} {}", a.moment_residual, b.moment_residual);
    }
}

#[test]
fn projected_fields_preserve_equipartition() {
    use rand::{Rng, SeedableRng};
    let s = cross_setup(1.0);
    let frame = s.ctx.frame.clone();
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for i in 0..20 {
        // Integer frequencies keep the field tangent to the sides of the square.
        let (m, n) = (rng.random_range(1..4) as f64, rng.random_range(1..4) as f64);
        let mut r = || rng.random_range(-1.0..1.0);
        let f = trig(0.3 * r(), 0.3 * r(), [m, 1.0 + r().abs()], [1.0 + r().abs(), n], [0.0, r()], [r(), 0.0]);
        let proj = project_equipartition_tangent(&DeformationField::analytic(f), &s.p, &frame, &s.gs, &s.crit).unwrap();
        let d = hadamard_first(&s.p, &s.gs, &frame, &proj.field).unwrap();
        let spread = d.iter().fold(0.0f64, |m, v| m.max((v - d[0]).abs()));
        assert!(spread < 1e-8, "field {i}: {d:?}");
    }
}

#[test]
fn constrained_basis_has_vanishing_moments() {
    let s = cross_setup(1.5);
    let basis = arc_polynomial_basis(&s.p, 4, 24).unwrap();
    let rep = dtn_form_matrix_with(&s.ctx, &s.p, &s.gs, &basis).unwrap();
    assert!(rep.moment_residual < 1e-10, "{}", rep.moment_residual);
    // The raw basis does carry moments, so the constraint is not vacuous.
    let raw = basis.iter().flat_map(|f| moments(&s.p, &s.ctx.frame, &s.gs, f)).fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(raw > 1e-3);
}

#[test]
fn hessian_matches_the_energy_form() {
    for alpha in [1.0, 1.5] {
        let s = cross_setup(alpha);
        for pair in random_fields(6, 19).chunks(2) {
            let (x1, x2) = (DeformationField::analytic(pair[0].clone()), DeformationField::analytic(pair[1].clone()));
            let h = s.ctx.hessian(&s.p, &s.crit, &x1, &x2).unwrap();
            let f = weighted_trace(&s.p, &s.ctx.frame, &s.crit, &x1).unwrap();
            let g = weighted_trace(&s.p, &s.ctx.frame, &s.crit, &x2).unwrap();
            let a = s.ctx.form(&f, &g);
            assert!((h - 2.0 * a).abs() < 1e-6 * (1.0 + h.abs()), "α = {alpha}: {h} vs {}", 2.0 * a);
        }
    }
}
