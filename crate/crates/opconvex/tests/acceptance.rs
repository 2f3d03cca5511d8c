//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Run with `cargo test --test acceptance`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opconvex::closed_set::ClosedSet;
use opconvex::decompose::{decomposition_range, extremal_decomposition};
use opconvex::faces::{face_contains, is_maximal, is_simplicial, member, smallest_closed_face, FaceDescriptor};
use opconvex::interval::{
    affine_transport, boundary_rep_evaluate, boundary_rep_i, identity_check_i, make_extreme_i,
    OcFunctionI, SourceFunction,
};
use opconvex::matcalc::{
    convexity_witness_search, log_convexity_spot_check, loewner_psd_check_raw,
    monotone_decreasing_check, RawScalarFn,
};
use opconvex::ocfun::{phi, psi};
use opconvex::recover::{default_lambda_grid, fit_measure, SampleSet};
use opconvex::specfile::{parse_spec_str, ParsedFunction};
use opconvex::{ExtendedParam, FiniteMeasure, OcFunction};

const SEED: u64 = 20260823;

fn fin(v: f64) -> ExtendedParam {
    ExtendedParam::Finite(v)
}

const INF: ExtendedParam = ExtendedParam::Infinity;

fn pass(n: usize, what: &str) {
    println!("criterion {n:2}: PASS — {what}");
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn parse_halfline(text: &str) -> OcFunction {
    match parse_spec_str(text).unwrap().function {
        ParsedFunction::HalfLine(f) => f,
        _ => panic!("expected a (0, inf) function"),
    }
}

/// A random cone member built from affine plus a few extreme atoms.
fn random_member(rng: &mut ChaCha8Rng) -> OcFunction {
    let mut f =
        OcFunction::affine(rng.gen_range(0.1..2.0), rng.gen_range(0.0..1.0)).unwrap();
    let pieces = rng.gen_range(1..=4);
    for _ in 0..pieces {
        let alpha = match rng.gen_range(0..4) {
            0 => INF,
            _ => fin(rng.gen_range(0.0..4.0)),
        };
        let lambda = match rng.gen_range(0..4) {
            0 => INF,
            _ => fin(10f64.powf(rng.gen_range(-1.5..1.5))),
        };
        let g = OcFunction::make_extreme(alpha, lambda)
            .scale(rng.gen_range(0.1..2.0))
            .unwrap();
        f = f.add(&g);
    }
    f
}

#[test]
fn criterion_01_canonical_identity() {
    // x + 1/(x+1) and 1 + x²/(x+1) written as two different sum specs
    let lhs = parse_halfline(
        r#"{"name":"a","kind":"sum","children":[
            {"kind":"linear","p":0,"q":1},
            {"kind":"extreme","alpha":"inf","lambda":1}]}"#,
    );
    let rhs = parse_halfline(
        r#"{"name":"b","kind":"sum","children":[
            {"kind":"linear","p":1,"q":0},
            {"kind":"extreme","alpha":0,"lambda":1}]}"#,
    );
    let mut gap = 0.0f64;
    for x in log_grid(1e-3, 1e3, 1000) {
        gap = gap.max((lhs.evaluate(x).unwrap() - rhs.evaluate(x).unwrap()).abs());
    }
    assert!(gap <= 1e-12, "criterion  1: FAIL — max gap {gap}");
    pass(1, &format!("two sum specs agree, max gap {gap:.2e}"));
}

#[test]
fn criterion_02_decomposition_family_mixed() {
    let f = OcFunction::affine(0.0, 1.0)
        .unwrap()
        .add(&OcFunction::make_extreme(INF, fin(1.0)));
    let r = decomposition_range(&f).unwrap();
    assert_eq!(r.alpha0, 0.0);
    assert_eq!(r.alpha1, INF);
    let mut worst = 0.0f64;
    for i in 0..32 {
        let alpha = 20.0 * i as f64 / 31.0;
        let d = extremal_decomposition(&f, alpha).unwrap();
        let s = alpha + 1.0;
        let a_want = (2.0 * alpha + 1.0) / (s * s);
        let c_want = (alpha * alpha + 2.0 * alpha) / (s * s);
        assert!((d.a - a_want).abs() <= 1e-10, "a at alpha={alpha}");
        assert!((d.c - c_want).abs() <= 1e-10, "c at alpha={alpha}");
        for x in log_grid(1e-2, 1e2, 40) {
            let rest_want = (x - alpha) * (x - alpha) / (s * s * (x + 1.0));
            let rest_got = d.remainder.evaluate(x).unwrap();
            worst = worst.max((rest_got - rest_want).abs());
            let whole = d.a + d.c * x + rest_got;
            assert!(
                (whole - f.evaluate(x).unwrap()).abs() <= 1e-10,
                "reconstruction at alpha={alpha}, x={x}"
            );
        }
        assert!(worst <= 1e-10, "remainder at alpha={alpha}: {worst}");
    }
    pass(2, "tangent family of x + 1/(x+1) matches the closed form");
}

#[test]
fn criterion_03_decomposition_family_quadratic() {
    // 2x² − 2x + 1 in canonical data
    let f = OcFunction::new(1.0, 2.0, FiniteMeasure::single_atom(INF, 2.0).unwrap()).unwrap();
    let r = decomposition_range(&f).unwrap();
    assert!((r.alpha0 - 0.5).abs() <= 1e-10);
    let a1 = r.alpha1.as_finite().expect("finite alpha1");
    assert!((a1 - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-10);
    for i in 0..24 {
        let alpha = 0.5 + (a1 - 0.5) * (i as f64 + 0.5) / 24.0;
        let d = extremal_decomposition(&f, alpha).unwrap();
        assert!((d.a - (1.0 - 2.0 * alpha * alpha)).abs() <= 1e-12);
        assert!((d.c - 2.0 * (2.0 * alpha - 1.0)).abs() <= 1e-12);
        assert!((d.remainder.weights.mass_at_infinity() - 2.0).abs() <= 1e-12);
        for &x in &[0.2, 0.7, 1.0, 3.0, 20.0] {
            let want = 2.0 * x * x - 2.0 * x + 1.0;
            assert!((d.evaluate(x).unwrap() - want).abs() <= 1e-10 * want.max(1.0));
        }
    }
    pass(3, "2x²−2x+1 decomposes as 2(x−α)² + 2(2α−1)x + (1−2α²) on [1/2, 1/√2]");
}

#[test]
fn criterion_04_non_simpliciality_witnesses() {
    for lambda in [INF, fin(0.0), fin(1.0), fin(4.0)] {
        let face = FaceDescriptor::e(ClosedSet::point(lambda));
        let verdict = is_simplicial(&face);
        assert!(!verdict.simplicial, "E({lambda}) must not be simplicial");
        let w = verdict.witness.expect("witness");
        for x in log_grid(1e-2, 1e2, 128) {
            let lhs = w.lhs.evaluate(x).unwrap();
            let rhs = w.rhs.evaluate(x).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                "lambda={lambda} x={x}: {lhs} vs {rhs}"
            );
        }
    }
    for face in [
        FaceDescriptor::f(fin(1.0), ClosedSet::point(fin(3.0))).unwrap(),
        FaceDescriptor::f(fin(0.0), ClosedSet::full()).unwrap(),
        FaceDescriptor::f(INF, ClosedSet::interval(fin(1.0), fin(2.0)).unwrap()).unwrap(),
    ] {
        assert!(is_simplicial(&face).simplicial);
    }
    pass(4, "two distinct decompositions agree pointwise; F-faces stay simplicial");
}

#[test]
fn criterion_05_anchor_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for case in 0..20 {
        let f = random_member(&mut rng);
        let reps: Vec<_> = [0.5, 1.0, 3.0]
            .iter()
            .map(|&a| f.reanchor(a).unwrap())
            .collect();
        for r in &reps[1..] {
            assert!(
                (r.gamma - reps[0].gamma).abs() <= 1e-10,
                "case {case}: gamma"
            );
            let a0 = reps[0].mu.atoms();
            let a1 = r.mu.atoms();
            assert_eq!(a0.len(), a1.len(), "case {case}: atom count");
            for ((p0, m0), (p1, m1)) in a0.iter().zip(a1) {
                assert!(p0.approx_eq(p1, 1e-10), "case {case}: atom position");
                assert!((m0 - m1).abs() <= 1e-10, "case {case}: atom mass");
            }
        }
    }
    pass(5, "re-anchoring at 0.5, 1, 3 yields identical (γ, μ)");
}

#[test]
fn criterion_06_tau_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x7a7a);
    for _ in 0..20 {
        let f = random_member(&mut rng);
        let back = f.tau_transform().tau_transform();
        for x in log_grid(1e-2, 1e2, 64) {
            let want = f.evaluate(x).unwrap();
            let got = back.evaluate(x).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "x={x}");
        }
    }
    for &l in &[0.1, 1.0, 10.0] {
        let t = phi(fin(l)).tau_transform();
        let ray = t.classify_extreme().unwrap().expect("extreme ray");
        assert!(ray.alpha.approx_eq(&fin(0.0), 1e-10));
        assert!(ray.lambda.approx_eq(&fin(1.0 / l), 1e-8 * (1.0 / l).max(1.0)));
        let want = psi(fin(1.0 / l));
        for &x in &[0.3, 1.0, 4.0] {
            let a = t.evaluate(x).unwrap();
            let b = want.evaluate(x).unwrap();
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
    // membership duality: g_{α,λ} ∈ F(α,{λ}) iff τg ∈ F(1/α,{1/λ})
    let params = [fin(0.0), fin(0.5), fin(1.0), fin(2.0), INF];
    for alpha in params {
        for lambda in params {
            let g = OcFunction::make_extreme(alpha, lambda);
            let d = FaceDescriptor::f(alpha, ClosedSet::point(lambda)).unwrap();
            let d_dual =
                FaceDescriptor::f(alpha.reciprocal(), ClosedSet::point(lambda.reciprocal()))
                    .unwrap();
            assert!(member(&g, &d), "g({alpha},{lambda})");
            assert!(member(&g.tau_transform(), &d_dual), "tau g({alpha},{lambda})");
        }
    }
    pass(6, "τ is an involution and exchanges the dual faces");
}

#[test]
fn criterion_07_matrix_verification_grid() {
    let params = [
        fin(0.0),
        fin(0.5),
        fin(1.0),
        fin(2.0),
        fin(5.0),
        fin(10.0),
        INF,
    ];
    for alpha in params {
        for lambda in params {
            let g = OcFunction::make_extreme(alpha, lambda);
            for n in [2usize, 4, 8] {
                let w = convexity_witness_search(&g, n, 200, SEED).unwrap();
                assert!(w.is_none(), "false witness for g({alpha},{lambda}) at n={n}");
            }
        }
    }
    // negative controls
    let cube = convexity_witness_search(&RawScalarFn::cube(), 2, 1000, SEED).unwrap();
    assert!(cube.is_some(), "x³ must fail matrix convexity at order 2");
    let (min_eig, psd) = loewner_psd_check_raw(&RawScalarFn::square(), &[1.0, 2.0, 3.0]).unwrap();
    assert!(!psd && min_eig < 0.0, "x² must fail the Loewner PSD test");
    pass(7, "no witness on the extreme grid; x³ and x² controls fail as they should");
}

#[test]
fn criterion_08_f_infinity_equivalences() {
    let fixtures = [
        phi(fin(0.0)),                                      // 1/x
        OcFunction::make_extreme(INF, fin(1.0)),            // 1/(x+1)
        OcFunction::affine(1.0, 0.0).unwrap().add(&phi(fin(0.0))), // 1 + 1/x
    ];
    let full = ClosedSet::full();
    for (i, f) in fixtures.iter().enumerate() {
        let b = f.boundary();
        assert!(
            b.slope_at_inf.abs() <= 1e-10 * f.scale_hint(),
            "fixture {i}: slope at infinity"
        );
        assert!(
            monotone_decreasing_check(f, 6, 200, SEED).unwrap().is_none(),
            "fixture {i}: monotone check"
        );
        assert!(
            log_convexity_spot_check(f, 4, 100, SEED).unwrap().is_none(),
            "fixture {i}: log-convexity check"
        );
        let dual_face = FaceDescriptor::f(fin(0.0), full.clone()).unwrap();
        assert!(
            member(&f.tau_transform(), &dual_face),
            "fixture {i}: τf ∈ F_0"
        );
    }
    pass(8, "flat tail, monotone decrease, log-convexity, and τ-membership agree");
}

#[test]
fn criterion_09_measure_recovery() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
    let mut ok = 0;
    for case in 0..20 {
        let mut atoms: Vec<(ExtendedParam, f64)> = Vec::new();
        let n_atoms = rng.gen_range(1..=5);
        for _ in 0..n_atoms {
            let pos = if rng.gen_range(0..6) == 0 {
                INF
            } else {
                fin(10f64.powf(rng.gen_range(-1.5..1.5)))
            };
            atoms.push((pos, rng.gen_range(0.05..0.4)));
        }
        let truth = OcFunction::affine(rng.gen_range(0.1..1.0), rng.gen_range(0.0..0.5))
            .unwrap()
            .add(&OcFunction::new(0.0, 0.0, FiniteMeasure::from_atoms(atoms).unwrap()).unwrap());
        let samples = SampleSet::from_function(&truth, 1e-1, 10.0, 50).unwrap();
        let fit = match fit_measure(&samples, &default_lambda_grid(), 1e-12) {
            Ok(fit) => fit,
            Err(_) => continue,
        };
        let mut ss = 0.0;
        for i in 0..50 {
            let x = 0.13 * (9.7f64 / 0.13).powf(i as f64 / 49.0);
            let want = truth.evaluate(x).unwrap();
            // residuals are normalized by the local magnitude so the criterion
            // is scale-free
            let d = (fit.f.evaluate(x).unwrap() - want) / want.abs().max(1.0);
            ss += d * d;
        }
        let rms = (ss / 50.0).sqrt();
        if rms <= 1e-7 {
            ok += 1;
        } else {
            println!("criterion  9: case {case} held-out rms {rms:.2e} (allowed once)");
        }
    }
    assert!(ok >= 19, "criterion  9: FAIL — only {ok}/20 fits within 1e-7");
    pass(9, &format!("{ok}/20 random ground truths recovered to 1e-7"));
}

#[test]
fn criterion_10_interval_suite() {
    for i in 0..16 {
        let lambda = -1.0 + 2.0 * i as f64 / 15.0;
        let gap = identity_check_i(lambda).unwrap();
        assert!(gap <= 1e-12, "identity gap {gap} at lambda={lambda}");
    }
    // boundary representations reconstruct the Lemma fixtures
    let fixtures = [
        make_extreme_i(-1.0, 0.0).unwrap(),  // (x+1)²
        make_extreme_i(-1.0, 0.5).unwrap(),  // (x+1)²/(1−x/2)
        OcFunctionI::affine(1.0, 1.0).unwrap(), // x + 1
    ];
    for f in &fixtures {
        let nu = boundary_rep_i(f, -1.0).unwrap();
        for j in 0..64 {
            let x = -0.95 + 1.9 * j as f64 / 63.0;
            let want = f.evaluate(x).unwrap();
            let got = boundary_rep_evaluate(&nu, false, x).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "x={x}");
        }
    }
    // affine transport fixtures
    let g = affine_transport(
        &SourceFunction::Poly2 {
            c0: 1.0,
            c1: -2.0,
            c2: 1.0,
        },
        0.0,
        2.0,
    )
    .unwrap();
    assert!((g.evaluate(0.5).unwrap() - 0.25).abs() <= 1e-12);
    let g = affine_transport(
        &SourceFunction::Poly2 {
            c0: 0.0,
            c1: 1.0,
            c2: 0.0,
        },
        0.0,
        4.0,
    )
    .unwrap();
    assert!((g.evaluate(-0.5).unwrap() - 1.0).abs() <= 1e-12);
    let id = affine_transport(
        &SourceFunction::Extreme {
            alpha: 0.25,
            lambda: -0.5,
        },
        -1.0,
        1.0,
    )
    .unwrap();
    let direct = make_extreme_i(0.25, -0.5).unwrap();
    for j in 0..16 {
        let x = -0.9 + 1.8 * j as f64 / 15.0;
        assert!((id.evaluate(x).unwrap() - direct.evaluate(x).unwrap()).abs() <= 1e-12);
    }
    pass(10, "interval identity, boundary representations, and transport all check out");
}

#[test]
fn criterion_11_face_lattice_consistency() {
    let functions: Vec<OcFunction> = vec![
        OcFunction::make_extreme(fin(1.0), fin(3.0)),
        OcFunction::make_extreme(fin(0.0), fin(1.0)),
        OcFunction::make_extreme(INF, fin(1.0)),
        OcFunction::make_extreme(fin(2.0), INF),
        OcFunction::make_extreme(INF, INF),
        phi(fin(0.0)),
        psi(fin(1.0)),
        OcFunction::affine(1.0, 1.0).unwrap(),
        OcFunction::affine(0.0, 1.0)
            .unwrap()
            .add(&OcFunction::make_extreme(INF, fin(1.0))),
        OcFunction::make_extreme(fin(1.0), fin(1.0))
            .add(&OcFunction::make_extreme(fin(1.0), fin(4.0))),
    ];
    let point = |v: ExtendedParam| ClosedSet::point(v);
    let descriptors: Vec<FaceDescriptor> = vec![
        FaceDescriptor::f(fin(1.0), point(fin(3.0))).unwrap(),
        FaceDescriptor::f(fin(1.0), ClosedSet::full()).unwrap(),
        FaceDescriptor::e(point(fin(3.0))),
        FaceDescriptor::e(ClosedSet::full()),
        FaceDescriptor::e(ClosedSet::empty()),
        FaceDescriptor::f(fin(0.0), ClosedSet::interval(fin(0.0), fin(2.0)).unwrap()).unwrap(),
        FaceDescriptor::f(INF, point(fin(1.0))).unwrap(),
        FaceDescriptor::e(point(fin(1.0)).union(&point(INF))),
        FaceDescriptor::f(fin(2.0), point(INF)).unwrap(),
        FaceDescriptor::f(INF, ClosedSet::full()).unwrap(),
    ];
    let mut pairs = 0;
    let mut memberships = 0;
    for f in &functions {
        let smallest = smallest_closed_face(f).unwrap();
        assert!(member(f, &smallest), "f must sit in its smallest face");
        for d in descriptors.iter().take(4) {
            pairs += 1;
            let m = member(f, d);
            if m {
                memberships += 1;
                assert!(
                    face_contains(&smallest, d),
                    "smallest face of {f:?} not contained in {d}"
                );
            }
            // containment of the smallest face implies membership back
            if face_contains(&smallest, d) {
                assert!(m, "containment without membership for {d}");
            }
        }
    }
    // maximality is exactly F(α, [0, ∞])
    for d in &descriptors {
        let want = matches!(d, FaceDescriptor::F { lambda_set, .. } if lambda_set.is_full());
        assert_eq!(is_maximal(d), want, "maximality of {d}");
    }
    assert_eq!(pairs, 40);
    assert!(memberships > 5, "fixture set must exercise membership");
    pass(
        11,
        &format!("{pairs} (f, D) pairs consistent; {memberships} memberships cross-checked"),
    );
}
