//! End-to-end acceptance suite. Each test covers one acceptance criterion and
//! prints a single pass line on success (a failure panics, so the line count
//! doubles as a scoreboard). Timing bounds are asserted only in optimized
//! builds without debug assertions; otherwise they are reported.

use std::time::{Duration, Instant};

use bap::certificates::{PairClause, UniquenessRule, UniquenessVerdict};
use bap::corpus::corpus;
use bap::geometry::{norm_eval, Segment, Vector};
use bap::oracle::{verify_boundary_identity, GridBox};
use bap::problem::ProblemSpec;
use bap::projections::{euclid_project, ProjParams};
use bap::report::best_run;
use bap::runner::{run_corpus, run_pipeline, Overrides, Pipeline};
use bap::sets::{contains, is_boundary_point, SetExpr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(name: &str) -> ProblemSpec {
    corpus()
        .into_iter()
        .find(|i| i.name == name)
        .unwrap_or_else(|| panic!("no corpus instance named {name}"))
        .spec
}

fn check_time(label: &str, elapsed: Duration, bound: Duration) {
    if cfg!(debug_assertions) {
        eprintln!("{label}: {elapsed:?} (bound {bound:?} not enforced in debug builds)");
    } else {
        assert!(elapsed <= bound, "{label} took {elapsed:?}, bound {bound:?}");
    }
}

#[test]
fn criterion_1_euclidean_box_vs_ellipse() {
    let spec = instance("euclid_box_vs_ellipse");
    let t0 = Instant::now();
    let out = run_pipeline(&spec, Pipeline::Certify, &Overrides::default()).unwrap();
    let elapsed = t0.elapsed();
    let best = best_run(&out.multistart);
    assert!((best.distance - 1.0).abs() <= 1e-6);
    assert!((best.a.0[0]).abs() <= 1e-6 && (best.a.0[1]).abs() <= 1e-6);
    assert!((best.b.0[0]).abs() <= 1e-6 && (best.b.0[1] - 1.0).abs() <= 1e-6);
    let cert = out.uniqueness.unwrap();
    assert!(matches!(cert.verdict, UniquenessVerdict::AtMostOne));
    match cert.fired_rule {
        Some(UniquenessRule::StrictlyConvexNorm { pair_clauses }) => {
            assert!(pair_clauses
                .iter()
                .any(|(_, _, c)| *c == PairClause::SecondSetStrictlyConvex));
        }
        other => panic!("expected the strictly-convex-norm rule, got {other:?}"),
    }
    check_time("criterion 1", elapsed, Duration::from_secs(1));
    println!("criterion 1: pass (unique pair (0,0)-(0,1) at distance 1)");
}

#[test]
fn criterion_2_sup_norm_interval_of_solutions() {
    let spec = instance("sup_box_vs_ellipse");
    let t0 = Instant::now();
    let out = run_pipeline(&spec, Pipeline::Oracle, &Overrides::default()).unwrap();
    let elapsed = t0.elapsed();
    let best = best_run(&out.multistart);
    assert!(best.distance >= 1.0 - 1e-9 && best.distance <= 1.0 + 1e-4);
    let cert = out.uniqueness.unwrap();
    assert!(
        !matches!(cert.verdict, UniquenessVerdict::AtMostOne),
        "no structural uniqueness claim is sound here"
    );
    let rep = out.oracle.unwrap();
    assert!(rep.segment_fit.is_some(), "solutions should trace a segment");
    let xs: Vec<f64> = rep.optimal_pairs.iter().map(|(a, _)| a.0[0]).collect();
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| {
            (l.min(x), h.max(x))
        });
    assert!(
        lo <= -0.98 && hi >= 0.98,
        "near-optimal first coordinates span [{lo:.3}, {hi:.3}], expected to cover [-0.98, 0.98]"
    );
    check_time("criterion 2", elapsed, Duration::from_secs(10));
    println!("criterion 2: pass (sup-norm distance 1 attained along a segment)");
}

#[test]
fn criterion_3_skew_segments_all_pairs_optimal() {
    let spec = instance("sup_skew_segments");
    let out = run_pipeline(&spec, Pipeline::Oracle, &Overrides::default()).unwrap();
    let best = best_run(&out.multistart);
    assert!(best.distance >= 1.5 - 1e-9 && best.distance <= 1.5 + 1e-4);
    // At resolution 0.05 each segment contributes 41 grid members, and every
    // one of the 1681 cross pairs sits at the optimal sup distance.
    let rep = out.oracle.unwrap();
    assert_eq!(rep.optimal_pairs.len(), 41 * 41);
    let (SetExpr::SegmentSet { seg: sa }, SetExpr::SegmentSet { seg: sb }) =
        (spec.set_a.as_expr(), spec.set_b.as_expr())
    else {
        panic!("instance should be a pair of segments")
    };
    assert!(!bap::geometry::are_parallel_segments(&sa, &sb, 1e-9).unwrap());
    println!("criterion 3: pass (1681 of 1681 grid pairs optimal, segments not parallel)");
}

#[test]
fn criterion_4_cylinder_solution_family_shares_difference() {
    let spec = instance("cylinder_vs_disk");
    let out = run_pipeline(&spec, Pipeline::Oracle, &Overrides::default()).unwrap();
    let ms = &out.multistart;
    assert!(ms.distinct_count >= 2, "expected several solution clusters");
    assert!(ms.common_difference);
    let diff = Vector::from([0.0, 0.0, -2.0]);
    for c in &ms.clusters {
        assert!(c.a.sub(&c.b).sub(&diff).norm2() <= 1e-5);
    }
    let rep = out.oracle.unwrap();
    let best = best_run(ms);
    assert!((rep.dist_estimate - best.distance).abs() <= 0.05);
    println!("criterion 4: pass (distinct pairs, common difference (0,0,-2), oracle agrees)");
}

#[test]
fn criterion_5_polytope_and_cylinder_uniqueness_rules() {
    for (name, clause) in [
        ("pentagon_vs_ellipse", PairClause::SecondSetStrictlyConvex),
        ("crossing_cylinders", PairClause::NoSharedBoundaryFaceDirection),
    ] {
        let spec = instance(name);
        let out = run_pipeline(&spec, Pipeline::Certify, &Overrides::default()).unwrap();
        let cert = out.uniqueness.unwrap();
        assert!(
            matches!(cert.verdict, UniquenessVerdict::AtMostOne),
            "{name}: expected a uniqueness certificate"
        );
        match cert.fired_rule {
            Some(UniquenessRule::StrictlyConvexNorm { pair_clauses }) => {
                assert!(
                    pair_clauses.iter().any(|(_, _, c)| *c == clause),
                    "{name}: expected clause {clause:?}, got {pair_clauses:?}"
                );
            }
            other => panic!("{name}: expected the strictly-convex-norm rule, got {other:?}"),
        }
        assert_eq!(out.multistart.distinct_count, 1, "{name}");
    }
    println!("criterion 5: pass (both instances certified unique, single cluster)");
}

#[test]
fn criterion_6_unattained_infimum_flagged() {
    let spec = instance("unattained_exponential");
    let t0 = Instant::now();
    let out = run_pipeline(&spec, Pipeline::Certify, &Overrides::default()).unwrap();
    let elapsed = t0.elapsed();
    let best = best_run(&out.multistart);
    assert!(out.multistart.runs.iter().any(|r| r.diverging));
    assert!(
        best.distance > 2.0 && best.distance < 2.05,
        "distance {} outside (2, 2.05)",
        best.distance
    );
    assert!(matches!(
        out.existence.unwrap().verdict,
        bap::certificates::ExistenceVerdict::SuspectedNotAttained { .. }
    ));
    assert!(!out.solver_ok);
    check_time("criterion 6", elapsed, Duration::from_secs(30));
    println!("criterion 6: pass (divergence detected, infimum bracketed, non-attainment suspected)");
}

#[test]
fn criterion_7_boundary_and_segment_structure() {
    let t0 = Instant::now();

    // Boundary identity: on every 2-D corpus instance with oracle settings,
    // the set distance equals the boundary distance on the grid.
    let mut checked = 0;
    for inst in corpus() {
        let Some(cfg) = &inst.spec.oracle else { continue };
        if inst.spec.dimension != 2 {
            continue;
        }
        let bbox = GridBox::from_vectors(&cfg.bbox.lo, &cfg.bbox.hi).unwrap();
        let rep = verify_boundary_identity(
            &inst.spec.set_a.as_expr(),
            &inst.spec.set_b.as_expr(),
            inst.spec.norm,
            &bbox,
            cfg.resolution,
        )
        .unwrap();
        assert!(rep.holds, "{}: {:?}", inst.name, rep);
        assert!(rep.disjoint, "{}", inst.name);
        checked += 1;
    }
    assert!(checked >= 4);

    // Converged best pairs sit on both boundaries.
    for name in ["euclid_box_vs_ellipse", "box_vs_pentagon", "pentagon_vs_ellipse"] {
        let spec = instance(name);
        let out = run_pipeline(&spec, Pipeline::Solve, &Overrides::default()).unwrap();
        let best = best_run(&out.multistart);
        assert!(best.converged);
        assert!(is_boundary_point(&spec.set_a.as_expr(), &best.a, 1e-6).unwrap());
        assert!(is_boundary_point(&spec.set_b.as_expr(), &best.b, 1e-6).unwrap());
    }

    // Two distance-equal pairs interpolate to optimal pairs: check membership
    // and the distance at five interior parameters.
    let spec = instance("cylinder_vs_disk");
    let out = run_pipeline(&spec, Pipeline::Solve, &Overrides::default()).unwrap();
    let ms = &out.multistart;
    assert!(ms.distinct_count >= 2);
    let (r1, r2) = (&ms.clusters[0], &ms.clusters[1]);
    let set_a = spec.set_a.as_expr();
    let set_b = spec.set_b.as_expr();
    let d = r1.distance;
    for k in 1..=5 {
        let t = k as f64 / 6.0;
        let at = r1.a.scale(1.0 - t).add(&r2.a.scale(t));
        let bt = r1.b.scale(1.0 - t).add(&r2.b.scale(t));
        assert!(contains(&set_a, &at, 1e-7).unwrap(), "t={t}");
        assert!(contains(&set_b, &bt, 1e-7).unwrap(), "t={t}");
        let dt = norm_eval(spec.norm, &at.sub(&bt));
        assert!((dt - d).abs() <= 1e-7, "t={t}: {dt} vs {d}");
    }

    // The oracle's fitted solution segments interpolate to near-optimal
    // pairs as well, within the grid tolerance.
    let spec2 = instance("sup_box_vs_ellipse");
    let out2 = run_pipeline(&spec2, Pipeline::Oracle, &Overrides::default()).unwrap();
    let rep = out2.oracle.unwrap();
    let (fa, fb): (Segment, Segment) = rep.segment_fit.clone().unwrap();
    let sa2 = spec2.set_a.as_expr();
    let sb2 = spec2.set_b.as_expr();
    for k in 1..=5 {
        let t = k as f64 / 6.0;
        let at = fa.a0.scale(1.0 - t).add(&fa.a1.scale(t));
        let bt = fb.a0.scale(1.0 - t).add(&fb.a1.scale(t));
        let slack = 3.0 * rep.resolution;
        assert!(contains(&sa2, &at, slack).unwrap());
        assert!(contains(&sb2, &bt, slack).unwrap());
        let dt = norm_eval(spec2.norm, &at.sub(&bt));
        assert!((dt - rep.dist_estimate).abs() <= slack);
    }

    check_time("criterion 7", t0.elapsed(), Duration::from_secs(300));
    println!("criterion 7: pass (boundary identity, boundary membership, segment interpolation)");
}

#[test]
fn criterion_8_projection_suite() {
    let pp = ProjParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rand_vec = |rng: &mut ChaCha8Rng, dim: usize, scale: f64| {
        Vector((0..dim).map(|_| rng.gen_range(-scale..scale)).collect())
    };

    let make_sets: Vec<Box<dyn Fn(&mut ChaCha8Rng) -> SetExpr>> = vec![
        Box::new(|rng| {
            let n = Vector::from([rng.gen_range(-1.0..1.0f64), rng.gen_range(0.1..1.0)]);
            SetExpr::halfspace(n, rng.gen_range(-2.0..2.0))
        }),
        Box::new(|rng| {
            let lo = [rng.gen_range(-3.0..0.0), rng.gen_range(-3.0..0.0)];
            SetExpr::axis_box(lo, [lo[0] + rng.gen_range(0.5..3.0), lo[1] + rng.gen_range(0.5..3.0)])
        }),
        Box::new(|rng| {
            SetExpr::ball(
                [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                rng.gen_range(0.3..2.0),
            )
        }),
        Box::new(|rng| {
            SetExpr::ellipsoid(
                [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                [rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0)],
            )
        }),
        Box::new(|rng| {
            SetExpr::segment(
                [rng.gen_range(-2.0..0.0), rng.gen_range(-2.0..2.0)],
                [rng.gen_range(0.1..2.0), rng.gen_range(-2.0..2.0)],
            )
        }),
    ];

    for make in &make_sets {
        for _ in 0..1000 {
            let set = make(&mut rng);
            let x = rand_vec(&mut rng, 2, 5.0);
            let y = rand_vec(&mut rng, 2, 5.0);
            let px = euclid_project(&set, &x, &pp).unwrap().point;
            let py = euclid_project(&set, &y, &pp).unwrap().point;
            // Idempotence.
            let pxx = euclid_project(&set, &px, &pp).unwrap().point;
            assert!(pxx.sub(&px).norm2() <= 1e-7, "idempotence: {set:?}");
            // Variational inequality against a sampled member.
            let z = euclid_project(&set, &rand_vec(&mut rng, 2, 5.0), &pp)
                .unwrap()
                .point;
            let lhs = x.sub(&px).dot(&z.sub(&px));
            assert!(lhs <= 1e-9 * (1.0 + x.norm2()), "VI: {set:?} gives {lhs}");
            // Nonexpansiveness.
            assert!(
                px.sub(&py).norm2() <= x.sub(&y).norm2() + 1e-9,
                "nonexpansive: {set:?}"
            );
        }
    }

    // Dykstra on an intersection of two boxes agrees with the closed-form
    // projection onto the intersection box.
    for _ in 0..1000 {
        let b1 = SetExpr::axis_box([-2.0, -2.0], [1.0, 1.0]);
        let b2 = SetExpr::axis_box([-1.0, -1.5], [2.0, 2.0]);
        let both = SetExpr::Intersection {
            parts: vec![b1, b2],
        };
        let closed = SetExpr::axis_box([-1.0, -1.5], [1.0, 1.0]);
        let x = rand_vec(&mut rng, 2, 6.0);
        let pd = euclid_project(&both, &x, &pp).unwrap().point;
        let pc = euclid_project(&closed, &x, &pp).unwrap().point;
        assert!(pd.sub(&pc).norm2() <= 1e-8, "{x:?}: {pd:?} vs {pc:?}");
    }
    println!("criterion 8: pass (5000 projection property checks, 1000 Dykstra agreements)");
}

#[test]
fn criterion_9_corpus_reproduction_passes() {
    let outcome = run_corpus(true).unwrap();
    for row in &outcome.rows {
        assert!(row.failures.is_empty(), "{}: {:?}", row.name, row.failures);
    }
    assert!(outcome.all_pass);
    assert_eq!(outcome.rows.len(), 9);
    println!("criterion 9: pass (all 9 corpus instances reproduce their recorded results)");
}
