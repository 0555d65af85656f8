//! Structural certificates: when is a best approximation pair necessarily
//! unique (at most one), and when is the distance between the sets
//! necessarily attained?

use crate::geometry::{is_strictly_convex_norm, NormSpec, Vector};
use crate::linalg;
use crate::sets::{
    boundary_segments_directions, classify_strict_convexity, recession_cone, BoundaryDirections,
    ConvexFn, Extent, RecessionCone, SetExpr, FACE_ENUM_BUDGET,
};
use crate::solvers::{solve_bap, BapResult, SolverParams};

/// Which hypothesis carried a set pair in the strictly-convex-norm rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClause {
    FirstSetStrictlyConvex,
    SecondSetStrictlyConvex,
    NoSharedBoundaryFaceDirection,
}

#[derive(Clone, Debug, PartialEq)]
pub enum UniquenessRule {
    /// Every part of both sets is strictly convex (any norm).
    StrictlyConvexSets,
    /// The norm is strictly convex and every pair of parts satisfies one of
    /// the per-pair clauses.
    StrictlyConvexNorm { pair_clauses: Vec<(usize, usize, PairClause)> },
    /// Both sets are affine-like with difference subspaces meeting only at 0,
    /// under a strictly convex norm.
    TrivialDifferenceSubspaces,
}

#[derive(Clone, Debug)]
pub enum UniquenessVerdict {
    AtMostOne,
    /// Two verified distance-equal pairs that differ substantially.
    NotUnique(Box<(BapResult, BapResult)>),
    Unknown,
}

#[derive(Clone, Debug)]
pub struct UniquenessCertificate {
    pub verdict: UniquenessVerdict,
    pub fired_rule: Option<UniquenessRule>,
    pub trace: Vec<String>,
}

fn all_strictly_convex(parts: &[SetExpr]) -> bool {
    parts
        .iter()
        .all(|p| classify_strict_convexity(p).is_yes())
}

fn no_shared_face_direction(a: &SetExpr, b: &SetExpr, tol: f64) -> bool {
    let (da, db) = (boundary_segments_directions(a), boundary_segments_directions(b));
    let (BoundaryDirections::Flat(da), BoundaryDirections::Flat(db)) = (da, db) else {
        return false;
    };
    for sa in &da {
        for sb in &db {
            if linalg::subspaces_intersect_nontrivially(sa, sb, tol) {
                return false;
            }
        }
    }
    true
}

/// Structural uniqueness certificate for A = intersection of `a_parts`,
/// B = intersection of `b_parts`. Never claims NotUnique on its own; see
/// [`witness_non_uniqueness`] for the computational side.
pub fn certify_uniqueness(
    a_parts: &[SetExpr],
    b_parts: &[SetExpr],
    norm: NormSpec,
) -> UniquenessCertificate {
    let tol = crate::geometry::PARALLEL_TOL;
    let mut trace = Vec::new();

    if a_parts.is_empty() || b_parts.is_empty() {
        trace.push("empty part list; no structural rule applies".into());
        return UniquenessCertificate {
            verdict: UniquenessVerdict::Unknown,
            fired_rule: None,
            trace,
        };
    }

    if all_strictly_convex(a_parts) && all_strictly_convex(b_parts) {
        trace.push(
            "every part of both sets is strictly convex; a second best pair would force \
             a nondegenerate boundary segment in each set"
                .into(),
        );
        return UniquenessCertificate {
            verdict: UniquenessVerdict::AtMostOne,
            fired_rule: Some(UniquenessRule::StrictlyConvexSets),
            trace,
        };
    }
    trace.push("not all parts are strictly convex".into());

    if is_strictly_convex_norm(norm) {
        let mut clauses = Vec::new();
        let mut all_ok = true;
        'outer: for (i, ai) in a_parts.iter().enumerate() {
            for (j, bj) in b_parts.iter().enumerate() {
                let clause = if classify_strict_convexity(ai).is_yes() {
                    Some(PairClause::FirstSetStrictlyConvex)
                } else if classify_strict_convexity(bj).is_yes() {
                    Some(PairClause::SecondSetStrictlyConvex)
                } else if no_shared_face_direction(ai, bj, tol) {
                    Some(PairClause::NoSharedBoundaryFaceDirection)
                } else {
                    None
                };
                match clause {
                    Some(c) => clauses.push((i, j, c)),
                    None => {
                        trace.push(format!(
                            "pair (part {i} of A, part {j} of B): neither part strictly \
                             convex and boundary face directions may share a line"
                        ));
                        all_ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if all_ok {
            trace.push(
                "strictly convex norm: every part pair excludes parallel boundary intervals"
                    .into(),
            );
            return UniquenessCertificate {
                verdict: UniquenessVerdict::AtMostOne,
                fired_rule: Some(UniquenessRule::StrictlyConvexNorm {
                    pair_clauses: clauses,
                }),
                trace,
            };
        }
    } else {
        trace.push("norm is not strictly convex".into());
    }

    if is_strictly_convex_norm(norm) {
        if let (Some(sa), Some(sb)) = (difference_span(a_parts), difference_span(b_parts)) {
            if !linalg::subspaces_intersect_nontrivially(&sa, &sb, tol) {
                trace.push(
                    "difference subspaces of the two sets meet only at the origin".into(),
                );
                return UniquenessCertificate {
                    verdict: UniquenessVerdict::AtMostOne,
                    fired_rule: Some(UniquenessRule::TrivialDifferenceSubspaces),
                    trace,
                };
            }
            trace.push("difference subspaces share a direction".into());
        }
    }

    trace.push("no structural uniqueness rule applies".into());
    UniquenessCertificate {
        verdict: UniquenessVerdict::Unknown,
        fired_rule: None,
        trace,
    }
}

/// Span of the difference set A - A for flat single-part sets.
fn difference_span(parts: &[SetExpr]) -> Option<Vec<Vector>> {
    if parts.len() != 1 {
        return None;
    }
    match &parts[0] {
        SetExpr::AffineSubspace { basis, .. } => {
            Some(linalg::orthonormal_basis(basis, 1e-12))
        }
        SetExpr::SegmentSet { seg } => {
            if seg.is_nondegenerate() {
                Some(vec![seg.direction()])
            } else {
                Some(Vec::new())
            }
        }
        _ => None,
    }
}

/// Find two verified, distance-equal, well-separated solutions among solver
/// runs; such a pair witnesses non-uniqueness. `value_tol` is the relative
/// slack for calling two distances equal; the separation threshold follows
/// the multistart clustering convention (10x the solver tolerance).
pub fn witness_non_uniqueness(
    runs: &[BapResult],
    solver_tol: f64,
    value_tol: f64,
) -> Option<(BapResult, BapResult)> {
    let sep = 10.0 * solver_tol.max(1e-12);
    let best = runs
        .iter()
        .filter(|r| r.converged)
        .map(|r| r.distance)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    let optimal: Vec<&BapResult> = runs
        .iter()
        .filter(|r| r.converged && (r.distance - best).abs() <= value_tol * (1.0 + best))
        .collect();
    for (k, r1) in optimal.iter().enumerate() {
        for r2 in optimal.iter().skip(k + 1) {
            let gap = r1.a.sub(&r2.a).norm2().max(r1.b.sub(&r2.b).norm2());
            if gap > sep {
                return Some(((*r1).clone(), (*r2).clone()));
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExistenceRule {
    /// Solver probe reached distance ~ 0: the sets intersect.
    IntersectionNonempty,
    /// Both recession cones are trivial, so both sets are compact.
    BothBounded,
    /// Both sets are polyhedral.
    Polyhedral,
    /// Both sets are affine subspaces.
    AffineSubspaces,
    /// One set is the nearest-point cell of finitely many sites with the
    /// other set as competitor.
    VoronoiCell,
    /// Both sets are full-line ball cylinders (line plus ball).
    Hypercylinders,
    /// The recession cones intersect only at the origin (distance coercive).
    RecessionConesTrivial,
}

#[derive(Clone, Debug)]
pub enum ExistenceVerdict {
    Exists(ExistenceRule),
    /// A diverging solver run plus a shared recession ray.
    SuspectedNotAttained { shared_ray: Vector },
    Unknown,
}

#[derive(Clone, Debug)]
pub struct ExistenceCertificate {
    pub verdict: ExistenceVerdict,
    pub trace: Vec<String>,
    /// The solver probe used for the intersection and divergence checks.
    pub probe: Option<BapResult>,
}

fn is_polyhedral(s: &SetExpr) -> bool {
    match s {
        SetExpr::Halfspace(_)
        | SetExpr::Box { .. }
        | SetExpr::PolytopeH { .. }
        | SetExpr::AffineSubspace { .. }
        | SetExpr::SegmentSet { .. } => true,
        SetExpr::NormBall { norm, .. } => !matches!(norm, NormSpec::P(p) if *p > 1.0),
        SetExpr::Intersection { parts } => parts.iter().all(is_polyhedral),
        SetExpr::SublevelSet { f, .. } => matches!(f, ConvexFn::Affine { .. }),
        _ => false,
    }
}

fn is_affine(s: &SetExpr) -> bool {
    match s {
        SetExpr::AffineSubspace { .. } => true,
        SetExpr::Intersection { parts } => parts.iter().all(is_affine),
        _ => false,
    }
}

fn is_full_ball_cylinder(s: &SetExpr) -> bool {
    matches!(
        s,
        SetExpr::Cylinder {
            cross_section,
            extent: Extent::FullLine,
            ..
        } if matches!(**cross_section, SetExpr::NormBall { norm, .. } if norm.is_euclidean())
    )
}

/// A nonzero ray of the polyhedral cone {d : <n, d> <= 0 for all n}, if one
/// exists. Exact for polyhedral cones: checks the lineality space, then every
/// candidate extreme-ray direction (nullspaces of (dim-1)-subsets of the
/// normals).
pub fn nonzero_cone_ray(normals: &[Vector], dim: usize, tol: f64) -> Option<Vector> {
    if normals.is_empty() {
        let mut e = Vector::zeros(dim);
        e.0[0] = 1.0;
        return Some(e);
    }
    let feasible = |d: &Vector| normals.iter().all(|n| n.dot(d) <= tol * n.norm2().max(1.0));
    let lineality = linalg::nullspace(normals, dim, tol);
    if let Some(d) = lineality.first() {
        return Some(d.clone());
    }
    if dim == 1 {
        for d in [Vector(vec![1.0]), Vector(vec![-1.0])] {
            if feasible(&d) {
                return Some(d);
            }
        }
        return None;
    }
    let m = normals.len();
    let k = dim - 1;
    // Candidate extreme rays come from (dim-1)-subsets of the normals.
    let mut count: u64 = 0;
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 || k > m {
        return None;
    }
    loop {
        count += 1;
        if count > FACE_ENUM_BUDGET {
            return None;
        }
        let rows: Vec<Vector> = idx.iter().map(|&i| normals[i].clone()).collect();
        let ns = linalg::nullspace(&rows, dim, tol);
        if ns.len() == 1 {
            for d in [ns[0].clone(), ns[0].scale(-1.0)] {
                if feasible(&d) {
                    return Some(d);
                }
            }
        }
        // next combination
        let mut i = k;
        let done = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break false;
            }
            if i == 0 {
                break true;
            }
        };
        if done {
            return None;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn cone_nonzero_ray(cone: &RecessionCone, dim: usize, tol: f64) -> Option<Option<Vector>> {
    // Outer None: cone unknown. Inner: the ray, if any.
    match cone {
        RecessionCone::Bounded => Some(None),
        RecessionCone::Polyhedral { normals } => Some(nonzero_cone_ray(normals, dim, tol)),
        RecessionCone::Unknown => None,
    }
}

/// Shared nonzero recession ray of the two sets, when both cones are exactly
/// known (the intersection of two polyhedral cones is polyhedral).
pub fn shared_recession_ray(a: &SetExpr, b: &SetExpr, tol: f64) -> Option<Option<Vector>> {
    let dim = a.dim();
    match (recession_cone(a), recession_cone(b)) {
        (RecessionCone::Unknown, _) | (_, RecessionCone::Unknown) => None,
        (RecessionCone::Bounded, _) | (_, RecessionCone::Bounded) => Some(None),
        (
            RecessionCone::Polyhedral { normals: na },
            RecessionCone::Polyhedral { normals: nb },
        ) => {
            let mut all = na;
            all.extend(nb);
            Some(nonzero_cone_ray(&all, dim, tol))
        }
    }
}

/// Structural + probe-based existence certificate with a caller-supplied
/// solver probe (pass `None` to run one internally).
pub fn certify_existence_with_probe(
    a: &SetExpr,
    b: &SetExpr,
    norm: NormSpec,
    probe: Option<BapResult>,
    params: &SolverParams,
) -> ExistenceCertificate {
    let tol = crate::geometry::PARALLEL_TOL;
    let dim = a.dim();
    let mut trace = Vec::new();
    let probe = probe.or_else(|| {
        let start = Vector::zeros(dim);
        solve_bap(a, b, norm, &start, params).ok()
    });

    if let Some(p) = &probe {
        if p.converged && p.distance <= 10.0 * params.tol {
            trace.push(format!(
                "solver probe reached distance {:.3e}: the sets intersect",
                p.distance
            ));
            return ExistenceCertificate {
                verdict: ExistenceVerdict::Exists(ExistenceRule::IntersectionNonempty),
                trace,
                probe,
            };
        }
    }

    let (ray_a, ray_b) = (
        cone_nonzero_ray(&recession_cone(a), dim, tol),
        cone_nonzero_ray(&recession_cone(b), dim, tol),
    );
    if matches!((&ray_a, &ray_b), (Some(None), Some(None))) {
        trace.push("both recession cones are trivial: both sets are compact".into());
        return ExistenceCertificate {
            verdict: ExistenceVerdict::Exists(ExistenceRule::BothBounded),
            trace,
            probe,
        };
    }

    if is_polyhedral(a) && is_polyhedral(b) {
        trace.push("both sets are polyhedral".into());
        return ExistenceCertificate {
            verdict: ExistenceVerdict::Exists(ExistenceRule::Polyhedral),
            trace,
            probe,
        };
    }

    if is_affine(a) && is_affine(b) {
        trace.push("both sets are affine subspaces".into());
        return ExistenceCertificate {
            verdict: ExistenceVerdict::Exists(ExistenceRule::AffineSubspaces),
            trace,
            probe,
        };
    }

    let voronoi_of_other = |cell: &SetExpr, other: &SetExpr| {
        matches!(cell, SetExpr::VoronoiCell { competitor, .. } if **competitor == *other)
    };
    if voronoi_of_other(a, b) || voronoi_of_other(b, a) {
        trace.push(
            "one set is the nearest-point cell of finitely many sites against the other set"
                .into(),
        );
        return ExistenceCertificate {
            verdict: ExistenceVerdict::Exists(ExistenceRule::VoronoiCell),
            trace,
            probe,
        };
    }

    if is_full_ball_cylinder(a) && is_full_ball_cylinder(b) {
        trace.push("both sets are full-line ball cylinders".into());
        return ExistenceCertificate {
            verdict: ExistenceVerdict::Exists(ExistenceRule::Hypercylinders),
            trace,
            probe,
        };
    }

    match shared_recession_ray(a, b, tol) {
        Some(None) => {
            trace.push(
                "the recession cones intersect only at the origin: the distance is coercive"
                    .into(),
            );
            return ExistenceCertificate {
                verdict: ExistenceVerdict::Exists(ExistenceRule::RecessionConesTrivial),
                trace,
                probe,
            };
        }
        Some(Some(ray)) => {
            trace.push(format!(
                "the recession cones share the ray {:?}",
                ray.0
            ));
            if probe.as_ref().map(|p| p.diverging).unwrap_or(false) {
                trace.push(
                    "solver probe diverged along an unbounded direction: infimum suspected \
                     unattained"
                        .into(),
                );
                return ExistenceCertificate {
                    verdict: ExistenceVerdict::SuspectedNotAttained { shared_ray: ray },
                    trace,
                    probe,
                };
            }
        }
        None => {
            trace.push("a recession cone is not computable for these sets".into());
        }
    }

    trace.push("no structural existence rule applies".into());
    ExistenceCertificate {
        verdict: ExistenceVerdict::Unknown,
        trace,
        probe,
    }
}

pub fn certify_existence(
    a: &SetExpr,
    b: &SetExpr,
    norm: NormSpec,
    params: &SolverParams,
) -> ExistenceCertificate {
    certify_existence_with_probe(a, b, norm, None, params)
}

/// Attainment conditions known from the theory but outside what this crate
/// can verify mechanically; surfaced in reports for context.
pub fn condition_catalog() -> &'static [&'static str] {
    &[
        "one set compact and the other closed (any normed space)",
        "one set boundedly compact and the other closed",
        "weakly compact sets in a reflexive space",
        "one set proximinal with respect to the other",
        "uniformly convex space with approximatively compact sets",
        "sum of the sets' recession cones closed and pointed in infinite dimensions",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::Halfspace;

    fn pentagon() -> SetExpr {
        // Vertices (-3,0), (-2,1), (-1,0.5), (-1,-0.5), (-2,-1).
        SetExpr::PolytopeH {
            halfspaces: vec![
                Halfspace {
                    normal: Vector::from([1.0, 0.0]),
                    offset: -1.0,
                },
                Halfspace {
                    normal: Vector::from([-1.0, 1.0]),
                    offset: 3.0,
                },
                Halfspace {
                    normal: Vector::from([-1.0, -1.0]),
                    offset: 3.0,
                },
                Halfspace {
                    normal: Vector::from([0.5, 1.0]),
                    offset: 0.0,
                },
                Halfspace {
                    normal: Vector::from([0.5, -1.0]),
                    offset: 0.0,
                },
            ],
        }
    }

    #[test]
    fn box_vs_ellipsoid_euclidean_unique() {
        let a = SetExpr::axis_box([-2.0, -2.0], [2.0, 0.0]);
        let b = SetExpr::ellipsoid([0.0, 2.0], [2.0, 1.0]);
        let c = certify_uniqueness(&[a], &[b], NormSpec::EUCLIDEAN);
        assert!(matches!(c.verdict, UniquenessVerdict::AtMostOne));
        match c.fired_rule {
            Some(UniquenessRule::StrictlyConvexNorm { pair_clauses }) => {
                assert_eq!(
                    pair_clauses,
                    vec![(0, 0, PairClause::SecondSetStrictlyConvex)]
                );
            }
            other => panic!("unexpected rule {other:?}"),
        }
    }

    #[test]
    fn box_vs_ellipsoid_sup_norm_unknown() {
        let a = SetExpr::axis_box([-2.0, -2.0], [2.0, 0.0]);
        let b = SetExpr::ellipsoid([0.0, 2.0], [2.0, 1.0]);
        let c = certify_uniqueness(&[a], &[b], NormSpec::Inf);
        assert!(matches!(c.verdict, UniquenessVerdict::Unknown));
    }

    #[test]
    fn crossing_full_cylinders_unique_by_face_directions() {
        let a = SetExpr::Cylinder {
            cross_section: Box::new(SetExpr::ball([0.0, 0.0, 0.0], 1.0)),
            axis_point: Vector::from([0.0, 0.0, 0.0]),
            axis_dir: Vector::from([1.0, 0.0, 0.0]),
            extent: Extent::FullLine,
        };
        let b = SetExpr::Cylinder {
            cross_section: Box::new(SetExpr::ball([0.0, 0.0, 3.0], 1.0)),
            axis_point: Vector::from([0.0, 0.0, 3.0]),
            axis_dir: Vector::from([0.0, 1.0, 0.0]),
            extent: Extent::FullLine,
        };
        let c = certify_uniqueness(
            &[a.clone()],
            &[b.clone()],
            NormSpec::EUCLIDEAN,
        );
        match c.fired_rule {
            Some(UniquenessRule::StrictlyConvexNorm { pair_clauses }) => {
                assert_eq!(
                    pair_clauses,
                    vec![(0, 0, PairClause::NoSharedBoundaryFaceDirection)]
                );
            }
            other => panic!("unexpected rule {other:?}"),
        }

        // Parallel copies share the axis direction: no verdict.
        let b_parallel = SetExpr::Cylinder {
            cross_section: Box::new(SetExpr::ball([0.0, 0.0, 3.0], 1.0)),
            axis_point: Vector::from([0.0, 0.0, 3.0]),
            axis_dir: Vector::from([1.0, 0.0, 0.0]),
            extent: Extent::FullLine,
        };
        let c = certify_uniqueness(&[a.clone()], &[b_parallel], NormSpec::EUCLIDEAN);
        assert!(matches!(c.verdict, UniquenessVerdict::Unknown));

        // Existence for the crossing pair fires the cylinder rule.
        let e = certify_existence(&a, &b, NormSpec::EUCLIDEAN, &SolverParams::default());
        assert!(matches!(
            e.verdict,
            ExistenceVerdict::Exists(ExistenceRule::Hypercylinders)
        ));
    }

    #[test]
    fn pentagon_vs_ellipsoid_unique_and_exists() {
        let a = pentagon();
        let b = SetExpr::ellipsoid([1.5, 0.0], [1.0, 0.75]);
        let c = certify_uniqueness(&[a.clone()], &[b.clone()], NormSpec::EUCLIDEAN);
        assert!(matches!(c.verdict, UniquenessVerdict::AtMostOne));
        let e = certify_existence(&a, &b, NormSpec::EUCLIDEAN, &SolverParams::default());
        assert!(matches!(
            e.verdict,
            ExistenceVerdict::Exists(ExistenceRule::BothBounded)
        ));
    }

    #[test]
    fn two_polytopes_exist_via_polyhedral_rule() {
        let a = SetExpr::halfspace([1.0, 0.0], -1.0);
        let b = SetExpr::halfspace([-1.0, 0.0], -1.0);
        let e = certify_existence(&a, &b, NormSpec::EUCLIDEAN, &SolverParams::default());
        assert!(matches!(
            e.verdict,
            ExistenceVerdict::Exists(ExistenceRule::Polyhedral)
        ));
    }

    #[test]
    fn overlapping_sets_exist_via_intersection_probe() {
        let a = SetExpr::ball([0.0, 0.0], 1.0);
        let b = SetExpr::ball([1.0, 0.0], 1.0);
        let e = certify_existence(&a, &b, NormSpec::EUCLIDEAN, &SolverParams::default());
        assert!(matches!(
            e.verdict,
            ExistenceVerdict::Exists(ExistenceRule::IntersectionNonempty)
        ));
    }

    #[test]
    fn cone_ray_search() {
        // {d1 <= 0, d2 = 0} has the ray (-1, 0).
        let normals = vec![
            Vector::from([1.0, 0.0]),
            Vector::from([0.0, 1.0]),
            Vector::from([0.0, -1.0]),
        ];
        let ray = nonzero_cone_ray(&normals, 2, 1e-9).expect("ray expected");
        assert!(ray.0[0] < 0.0 && ray.0[1].abs() < 1e-9);

        // The nonnegative quadrant flipped: {d <= 0} componentwise has rays.
        let normals = vec![Vector::from([1.0, 0.0]), Vector::from([0.0, 1.0])];
        assert!(nonzero_cone_ray(&normals, 2, 1e-9).is_some());

        // A pointed trivial cone: {d <= 0, d >= 0} componentwise.
        let normals = vec![
            Vector::from([1.0, 0.0]),
            Vector::from([-1.0, 0.0]),
            Vector::from([0.0, 1.0]),
            Vector::from([0.0, -1.0]),
        ];
        // The lineality space of this system is trivial and every candidate
        // direction violates a constraint.
        assert!(nonzero_cone_ray(&normals, 2, 1e-9).is_none());
    }

    #[test]
    fn adding_strictly_convex_part_preserves_at_most_one() {
        let a = pentagon();
        let b = SetExpr::ellipsoid([1.5, 0.0], [1.0, 0.75]);
        let before = certify_uniqueness(&[a.clone()], &[b.clone()], NormSpec::EUCLIDEAN);
        assert!(matches!(before.verdict, UniquenessVerdict::AtMostOne));
        let extra = SetExpr::ball([-2.0, 0.0], 5.0);
        let after = certify_uniqueness(&[a, extra], &[b], NormSpec::EUCLIDEAN);
        assert!(matches!(after.verdict, UniquenessVerdict::AtMostOne));
    }

    #[test]
    fn non_uniqueness_witness_requires_separation() {
        let mk = |ax: f64, d: f64| BapResult {
            a: Vector::from([ax, 0.0]),
            b: Vector::from([ax, 1.0]),
            distance: d,
            iterations: 10,
            residual: 0.0,
            converged: true,
            diverging: false,
            trace: vec![],
        };
        let runs = vec![mk(0.0, 1.0), mk(0.5, 1.0)];
        assert!(witness_non_uniqueness(&runs, 1e-9, 1e-6).is_some());
        // Same point twice: no witness.
        let runs = vec![mk(0.0, 1.0), mk(0.0, 1.0)];
        assert!(witness_non_uniqueness(&runs, 1e-9, 1e-6).is_none());
        // Different distances: no witness.
        let runs = vec![mk(0.0, 1.0), mk(0.5, 1.2)];
        assert!(witness_non_uniqueness(&runs, 1e-9, 1e-6).is_none());
    }
}
