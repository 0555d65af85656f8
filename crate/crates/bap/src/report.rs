//! JSON report assembly. The report is an ordered object with sections
//! spec_echo, solve, uniqueness, existence, oracle, corpus; sections that a
//! given run does not produce are omitted.

use serde_json::{json, Map, Value};

use crate::certificates::{
    ExistenceCertificate, ExistenceRule, ExistenceVerdict, PairClause, UniquenessCertificate,
    UniquenessRule, UniquenessVerdict,
};
use crate::geometry::Vector;
use crate::oracle::{BoundaryIdentityReport, OracleReport};
use crate::problem::ProblemSpec;
use crate::solvers::{BapResult, MultistartResult};

fn vec_json(v: &Vector) -> Value {
    json!(v.0)
}

fn run_json(r: &BapResult) -> Value {
    json!({
        "a": vec_json(&r.a),
        "b": vec_json(&r.b),
        "distance": r.distance,
        "iterations": r.iterations,
        "residual": r.residual,
        "converged": r.converged,
        "diverging": r.diverging,
    })
}

/// The representative run for a multistart result: the best converged run,
/// falling back to the lowest distance overall.
pub fn best_run(ms: &MultistartResult) -> &BapResult {
    ms.runs
        .iter()
        .filter(|r| r.converged)
        .min_by(|x, y| x.distance.total_cmp(&y.distance))
        .unwrap_or_else(|| {
            ms.runs
                .iter()
                .min_by(|x, y| x.distance.total_cmp(&y.distance))
                .expect("multistart always produces at least one run")
        })
}

pub fn solve_section(ms: &MultistartResult) -> Value {
    let best = best_run(ms);
    json!({
        "best": run_json(best),
        "starts": ms.runs.len(),
        "distinct_solutions": ms.distinct_count,
        "common_difference": ms.common_difference,
        "clusters": ms.clusters.iter().map(run_json).collect::<Vec<_>>(),
    })
}

fn pair_clause_id(c: PairClause) -> &'static str {
    match c {
        PairClause::FirstSetStrictlyConvex => "first_set_strictly_convex",
        PairClause::SecondSetStrictlyConvex => "second_set_strictly_convex",
        PairClause::NoSharedBoundaryFaceDirection => "no_shared_boundary_face_direction",
    }
}

pub fn uniqueness_rule_id(rule: &UniquenessRule) -> &'static str {
    match rule {
        UniquenessRule::StrictlyConvexSets => "strictly_convex_sets",
        UniquenessRule::StrictlyConvexNorm { .. } => "strictly_convex_norm",
        UniquenessRule::TrivialDifferenceSubspaces => "trivial_difference_subspaces",
    }
}

pub fn uniqueness_section(cert: &UniquenessCertificate) -> Value {
    let verdict = match &cert.verdict {
        UniquenessVerdict::AtMostOne => "at_most_one",
        UniquenessVerdict::NotUnique(_) => "not_unique",
        UniquenessVerdict::Unknown => "unknown",
    };
    let mut obj = Map::new();
    obj.insert("verdict".into(), json!(verdict));
    obj.insert(
        "fired_rule".into(),
        match &cert.fired_rule {
            Some(rule) => json!(uniqueness_rule_id(rule)),
            None => Value::Null,
        },
    );
    if let Some(UniquenessRule::StrictlyConvexNorm { pair_clauses }) = &cert.fired_rule {
        obj.insert(
            "pair_clauses".into(),
            json!(pair_clauses
                .iter()
                .map(|(i, j, c)| json!({"a_part": i, "b_part": j, "clause": pair_clause_id(*c)}))
                .collect::<Vec<_>>()),
        );
    }
    if let UniquenessVerdict::NotUnique(pair) = &cert.verdict {
        obj.insert(
            "witness".into(),
            json!({"first": run_json(&pair.0), "second": run_json(&pair.1)}),
        );
    }
    obj.insert("trace".into(), json!(cert.trace));
    Value::Object(obj)
}

pub fn existence_rule_id(rule: ExistenceRule) -> &'static str {
    match rule {
        ExistenceRule::IntersectionNonempty => "intersection_nonempty",
        ExistenceRule::BothBounded => "both_bounded",
        ExistenceRule::Polyhedral => "polyhedral",
        ExistenceRule::AffineSubspaces => "affine_subspaces",
        ExistenceRule::VoronoiCell => "voronoi_cell",
        ExistenceRule::Hypercylinders => "hypercylinders",
        ExistenceRule::RecessionConesTrivial => "recession_cones_trivial",
    }
}

pub fn existence_section(cert: &ExistenceCertificate) -> Value {
    let mut obj = Map::new();
    match &cert.verdict {
        ExistenceVerdict::Exists(rule) => {
            obj.insert("verdict".into(), json!("exists"));
            obj.insert("fired_rule".into(), json!(existence_rule_id(*rule)));
        }
        ExistenceVerdict::SuspectedNotAttained { shared_ray } => {
            obj.insert("verdict".into(), json!("suspected_not_attained"));
            obj.insert("fired_rule".into(), Value::Null);
            obj.insert("shared_recession_ray".into(), vec_json(shared_ray));
        }
        ExistenceVerdict::Unknown => {
            obj.insert("verdict".into(), json!("unknown"));
            obj.insert("fired_rule".into(), Value::Null);
        }
    }
    obj.insert("trace".into(), json!(cert.trace));
    Value::Object(obj)
}

pub fn oracle_section(rep: &OracleReport, boundary: Option<&BoundaryIdentityReport>) -> Value {
    let mut obj = Map::new();
    obj.insert("dist_estimate".into(), json!(rep.dist_estimate));
    obj.insert("resolution".into(), json!(rep.resolution));
    obj.insert("optimal_pair_count".into(), json!(rep.optimal_pairs.len()));
    obj.insert("cluster_count".into(), json!(rep.cluster_count));
    obj.insert(
        "segment_fit".into(),
        match &rep.segment_fit {
            Some((sa, sb)) => json!({
                "a0": vec_json(&sa.a0), "a1": vec_json(&sa.a1),
                "b0": vec_json(&sb.a0), "b1": vec_json(&sb.a1),
            }),
            None => Value::Null,
        },
    );
    obj.insert("clipped".into(), json!(rep.clipped));
    if let Some(b) = boundary {
        obj.insert(
            "boundary_identity".into(),
            json!({
                "holds": b.holds,
                "full_estimate": b.full_estimate,
                "boundary_estimate": b.boundary_estimate,
                "disjoint": b.disjoint,
                "note": b.note,
            }),
        );
    }
    Value::Object(obj)
}

/// Assemble the top-level report. `None` sections are omitted.
pub fn assemble(
    spec: &ProblemSpec,
    solve: Value,
    uniqueness: Option<Value>,
    existence: Option<Value>,
    oracle: Option<Value>,
    corpus: Option<Value>,
) -> Value {
    let mut obj = Map::new();
    obj.insert(
        "spec_echo".into(),
        serde_json::to_value(spec).expect("problem specs always serialize"),
    );
    obj.insert("solve".into(), solve);
    if let Some(u) = uniqueness {
        obj.insert("uniqueness".into(), u);
    }
    if let Some(e) = existence {
        obj.insert("existence".into(), e);
    }
    if let Some(o) = oracle {
        obj.insert("oracle".into(), o);
    }
    if let Some(c) = corpus {
        obj.insert("corpus".into(), c);
    }
    Value::Object(obj)
}
