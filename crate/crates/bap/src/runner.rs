//! Pipeline orchestration behind the CLI: solve, certify, oracle, and the
//! built-in corpus reproduction, plus the plot-data CSV writer.

use std::io::Write as _;

use serde_json::{json, Value};

use crate::certificates::{
    certify_existence_with_probe, certify_uniqueness, witness_non_uniqueness,
    ExistenceCertificate, ExistenceVerdict, UniquenessCertificate, UniquenessVerdict,
};
use crate::corpus::{corpus, CorpusInstance, ExpectedExistence};
use crate::error::{Error, Result};
use crate::geometry::{NormSpec, Vector};
use crate::oracle::{grid_min_distance, verify_boundary_identity, GridBox, OracleReport};
use crate::problem::{OutputKind, ProblemSpec};
use crate::projections::{euclid_project, ProjParams};
use crate::report;
use crate::sets::{is_boundary_point, SetExpr};
use crate::solvers::{multistart_bap, BapResult, MultistartResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// Multistart solve only.
    Solve,
    /// Solve plus uniqueness and existence certificates.
    Certify,
    /// Certify plus the grid oracle cross-check.
    Oracle,
}

/// Command-line overrides applied on top of the spec file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub resolution: Option<f64>,
}

pub struct RunOutput {
    pub report: Value,
    /// The representative solver run converged without drifting off.
    pub solver_ok: bool,
    pub multistart: MultistartResult,
    pub uniqueness: Option<UniquenessCertificate>,
    pub existence: Option<ExistenceCertificate>,
    pub oracle: Option<OracleReport>,
}

fn value_tol(norm: NormSpec) -> f64 {
    if norm.is_euclidean() {
        1e-6
    } else {
        1e-3
    }
}

pub fn run_pipeline(spec: &ProblemSpec, pipeline: Pipeline, ov: &Overrides) -> Result<RunOutput> {
    let mut solver = spec.solver.clone();
    if let Some(seed) = ov.seed {
        solver.seed = seed;
    }
    if let Some(starts) = ov.starts {
        solver.starts = starts;
    }
    let params = solver.params();
    let set_a = spec.set_a.as_expr();
    let set_b = spec.set_b.as_expr();
    let ms = multistart_bap(&set_a, &set_b, spec.norm, solver.starts, &params)?;
    let best = report::best_run(&ms).clone();
    let solver_ok = best.converged && !best.diverging;

    let mut uniqueness = None;
    let mut existence = None;
    let mut oracle_rep = None;
    let mut oracle_section = None;

    if pipeline != Pipeline::Solve {
        let mut cert = certify_uniqueness(&spec.set_a.parts(), &spec.set_b.parts(), spec.norm);
        if !matches!(cert.verdict, UniquenessVerdict::AtMostOne) {
            if let Some(w) = witness_non_uniqueness(&ms.runs, params.tol, value_tol(spec.norm)) {
                cert.trace.push(
                    "two well-separated solver runs reached the same distance".into(),
                );
                cert.verdict = UniquenessVerdict::NotUnique(Box::new(w));
            }
        }
        let ex = certify_existence_with_probe(
            &set_a,
            &set_b,
            spec.norm,
            Some(best.clone()),
            &params,
        );
        uniqueness = Some(cert);
        existence = Some(ex);
    }

    if pipeline == Pipeline::Oracle {
        let cfg = spec.oracle.as_ref().ok_or_else(|| {
            Error::Unsupported("the spec file has no oracle section (bbox and resolution)".into())
        })?;
        let resolution = ov.resolution.unwrap_or(cfg.resolution);
        let bbox = GridBox::from_vectors(&cfg.bbox.lo, &cfg.bbox.hi)?;
        let rep = grid_min_distance(&set_a, &set_b, spec.norm, &bbox, resolution)?;
        let boundary = verify_boundary_identity(&set_a, &set_b, spec.norm, &bbox, resolution)?;
        oracle_section = Some(report::oracle_section(&rep, Some(&boundary)));
        oracle_rep = Some(rep);
    }

    let report = report::assemble(
        spec,
        report::solve_section(&ms),
        uniqueness.as_ref().map(report::uniqueness_section),
        existence.as_ref().map(report::existence_section),
        oracle_section,
        None,
    );
    Ok(RunOutput {
        report,
        solver_ok,
        multistart: ms,
        uniqueness,
        existence,
        oracle: oracle_rep,
    })
}

/// Whether the spec asks for plot data (2-D boundary samples plus the
/// solution segment).
pub fn wants_plotdata(spec: &ProblemSpec) -> bool {
    spec.outputs.contains(&OutputKind::Plotdata)
}

/// Sample a convex set's boundary by projecting points of a large circle
/// around `center` onto the set; convexity makes every such projection a
/// boundary point.
fn boundary_samples(set: &SetExpr, center: &Vector, samples: usize) -> Vec<Vector> {
    let pp = ProjParams::default();
    let radius = 100.0;
    let mut out = Vec::new();
    for k in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (samples as f64);
        let far = Vector::from([
            center.0[0] + radius * theta.cos(),
            center.0[1] + radius * theta.sin(),
        ]);
        let Ok(proj) = euclid_project(set, &far, &pp) else {
            continue;
        };
        if is_boundary_point(set, &proj.point, 1e-6).unwrap_or(false) {
            out.push(proj.point);
        }
    }
    out
}

/// Write the plot-data CSV: boundary samples of both sets and the best-pair
/// segment endpoints. 2-D only.
pub fn write_plotdata(spec: &ProblemSpec, best: &BapResult, path: &std::path::Path) -> Result<()> {
    if spec.dimension != 2 {
        return Err(Error::Unsupported(
            "plot data is only produced for 2-dimensional problems".into(),
        ));
    }
    let set_a = spec.set_a.as_expr();
    let set_b = spec.set_b.as_expr();
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::Unsupported(format!("cannot write {}: {e}", path.display())))?;
    fn emit(file: &mut std::fs::File, kind: &str, p: &Vector) -> Result<()> {
        writeln!(file, "{kind},{},{}", p.0[0], p.0[1])
            .map_err(|e| Error::Unsupported(format!("write failed: {e}")))
    }
    writeln!(file, "kind,x,y").map_err(|e| Error::Unsupported(format!("write failed: {e}")))?;
    for p in boundary_samples(&set_a, &best.a, 720) {
        emit(&mut file, "boundary_a", &p)?;
    }
    for p in boundary_samples(&set_b, &best.b, 720) {
        emit(&mut file, "boundary_b", &p)?;
    }
    emit(&mut file, "pair_a", &best.a)?;
    emit(&mut file, "pair_b", &best.b)?;
    Ok(())
}

pub struct CorpusRow {
    pub name: &'static str,
    pub distance: f64,
    pub failures: Vec<String>,
}

fn check_instance(inst: &CorpusInstance) -> Result<CorpusRow> {
    let pipeline = if inst.spec.oracle.is_some() {
        Pipeline::Oracle
    } else {
        Pipeline::Certify
    };
    let out = run_pipeline(&inst.spec, pipeline, &Overrides::default())?;
    let best = report::best_run(&out.multistart);
    let exp = &inst.expected;
    let mut failures = Vec::new();

    if !(best.distance >= exp.distance.0 && best.distance <= exp.distance.1) {
        failures.push(format!(
            "distance {:.6} outside [{:.6}, {:.6}]",
            best.distance, exp.distance.0, exp.distance.1
        ));
    }
    if let Some(((a, b), tol)) = &exp.pair {
        let gap = best.a.sub(a).norm2().max(best.b.sub(b).norm2());
        if gap > *tol {
            failures.push(format!("pair off target by {gap:.2e} (tol {tol:.0e})"));
        }
    }
    let at_most_one = matches!(
        out.uniqueness.as_ref().map(|c| &c.verdict),
        Some(UniquenessVerdict::AtMostOne)
    );
    if at_most_one != exp.at_most_one {
        failures.push(format!(
            "uniqueness certificate fired={at_most_one}, expected {}",
            exp.at_most_one
        ));
    }
    match (&out.existence.as_ref().map(|c| &c.verdict), exp.existence) {
        (Some(ExistenceVerdict::Exists(_)), ExpectedExistence::Exists) => {}
        (
            Some(ExistenceVerdict::SuspectedNotAttained { .. }),
            ExpectedExistence::SuspectedNotAttained,
        ) => {}
        (v, e) => failures.push(format!("existence verdict {v:?}, expected {e:?}")),
    }
    if out.multistart.distinct_count < exp.min_clusters {
        failures.push(format!(
            "{} solution clusters, expected at least {}",
            out.multistart.distinct_count, exp.min_clusters
        ));
    }
    if let Some(max) = exp.max_clusters {
        if out.multistart.distinct_count > max {
            failures.push(format!(
                "{} solution clusters, expected at most {max}",
                out.multistart.distinct_count
            ));
        }
    }
    if let Some((diff, tol)) = &exp.common_difference {
        if !out.multistart.common_difference {
            failures.push("clusters do not share a common difference vector".into());
        }
        for c in &out.multistart.clusters {
            let gap = c.a.sub(&c.b).sub(diff).norm2();
            if gap > *tol {
                failures.push(format!("cluster difference off by {gap:.2e}"));
                break;
            }
        }
    }
    if let Some(rep) = &out.oracle {
        if (rep.dist_estimate - best.distance).abs() > 3.0 * rep.resolution {
            failures.push(format!(
                "oracle estimate {:.4} disagrees with solver {:.4}",
                rep.dist_estimate, best.distance
            ));
        }
        if exp.segment_fit && rep.segment_fit.is_none() {
            failures.push("oracle found no solution segment".into());
        }
    } else if exp.segment_fit {
        failures.push("no oracle report to check the solution segment".into());
    }
    if exp.diverging && !out.multistart.runs.iter().any(|r| r.diverging) {
        failures.push("no solver run flagged divergence".into());
    }

    Ok(CorpusRow {
        name: inst.name,
        distance: best.distance,
        failures,
    })
}

pub struct CorpusOutcome {
    pub rows: Vec<CorpusRow>,
    pub all_pass: bool,
    pub report: Value,
}

/// Run every built-in corpus instance and compare against its recorded
/// expectations.
pub fn run_corpus(quiet: bool) -> Result<CorpusOutcome> {
    let mut rows = Vec::new();
    for inst in corpus() {
        if !quiet {
            eprintln!("running {} ...", inst.name);
        }
        rows.push(check_instance(&inst)?);
    }
    let all_pass = rows.iter().all(|r| r.failures.is_empty());
    let report = json!({
        "rows": rows
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "distance": r.distance,
                    "pass": r.failures.is_empty(),
                    "failures": r.failures,
                })
            })
            .collect::<Vec<_>>(),
        "all_pass": all_pass,
    });
    Ok(CorpusOutcome {
        rows,
        all_pass,
        report,
    })
}
