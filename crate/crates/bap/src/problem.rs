//! Problem-spec files: the JSON schema for a pair of sets, a norm, solver
//! knobs, and optional oracle settings, plus full structural validation with
//! field-path error reporting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SchemaError};
use crate::geometry::{NormSpec, Vector};
use crate::sets::{ConvexFn, Extent, SetExpr};
use crate::solvers::{SolverParams, StepSchedule};

/// Either a single set expression or a list of intersection parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    One(SetExpr),
    Parts(Vec<SetExpr>),
}

impl SetSpec {
    pub fn parts(&self) -> Vec<SetExpr> {
        match self {
            SetSpec::One(s) => vec![s.clone()],
            SetSpec::Parts(v) => v.clone(),
        }
    }

    /// The set as a single expression (wrapping part lists in an
    /// intersection).
    pub fn as_expr(&self) -> SetExpr {
        match self {
            SetSpec::One(s) => s.clone(),
            SetSpec::Parts(v) if v.len() == 1 => v[0].clone(),
            SetSpec::Parts(v) => SetExpr::Intersection { parts: v.clone() },
        }
    }
}

fn default_tol() -> f64 {
    1e-9
}
fn default_max_iter() -> usize {
    20_000
}
fn default_blowup() -> f64 {
    1e6
}
fn default_starts() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_blowup")]
    pub blowup_radius: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_starts")]
    pub starts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: default_tol(),
            max_iter: default_max_iter(),
            blowup_radius: default_blowup(),
            seed: 0,
            starts: default_starts(),
        }
    }
}

impl SolverConfig {
    pub fn params(&self) -> SolverParams {
        SolverParams {
            tol: self.tol,
            max_iter: self.max_iter,
            step_schedule: StepSchedule::Diminishing,
            blowup_radius: self.blowup_radius,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub bbox: BboxConfig,
    pub resolution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BboxConfig {
    pub lo: Vector,
    pub hi: Vector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Report,
    Plotdata,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Report]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub norm: NormSpec,
    pub set_a: SetSpec,
    pub set_b: SetSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
}

/// Parse and fully validate a problem-spec file.
pub fn parse_problem(contents: &str) -> Result<ProblemSpec> {
    let spec: ProblemSpec =
        serde_json::from_str(contents).map_err(|e| Error::Parse(e.to_string()))?;
    let errors = validate(&spec);
    if errors.is_empty() {
        Ok(spec)
    } else {
        Err(Error::Schema(errors))
    }
}

pub fn validate(spec: &ProblemSpec) -> Vec<SchemaError> {
    let mut errors = Vec::new();
    let dim = spec.dimension;
    if dim == 0 {
        errors.push(err("dimension", "must be at least 1"));
    }
    if spec.solver.tol <= 0.0 {
        errors.push(err("solver.tol", "must be positive"));
    }
    if spec.solver.max_iter == 0 {
        errors.push(err("solver.max_iter", "must be at least 1"));
    }
    if spec.solver.starts == 0 {
        errors.push(err("solver.starts", "must be at least 1"));
    }
    validate_side(&spec.set_a, "set_a", dim, &mut errors);
    validate_side(&spec.set_b, "set_b", dim, &mut errors);
    if let Some(oracle) = &spec.oracle {
        if oracle.resolution <= 0.0 {
            errors.push(err("oracle.resolution", "must be positive"));
        }
        check_vec(&oracle.bbox.lo, "oracle.bbox.lo", dim, &mut errors);
        check_vec(&oracle.bbox.hi, "oracle.bbox.hi", dim, &mut errors);
        if oracle.bbox.lo.dim() == dim && oracle.bbox.hi.dim() == dim {
            for i in 0..dim {
                if oracle.bbox.lo.0[i] >= oracle.bbox.hi.0[i] {
                    errors.push(err("oracle.bbox", "lo must be strictly below hi"));
                    break;
                }
            }
        }
    }
    errors
}

fn err(path: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError {
        path: path.into(),
        message: message.into(),
    }
}

fn validate_side(side: &SetSpec, path: &str, dim: usize, errors: &mut Vec<SchemaError>) {
    match side {
        SetSpec::One(s) => validate_set(s, path, dim, errors),
        SetSpec::Parts(parts) => {
            if parts.is_empty() {
                errors.push(err(path, "part list must be nonempty"));
            }
            for (i, p) in parts.iter().enumerate() {
                validate_set(p, &format!("{path}[{i}]"), dim, errors);
            }
        }
    }
}

fn check_vec(v: &Vector, path: &str, dim: usize, errors: &mut Vec<SchemaError>) {
    if v.dim() != dim {
        errors.push(err(
            path,
            format!("expected dimension {dim}, got {}", v.dim()),
        ));
    } else if !v.is_finite() {
        errors.push(err(path, "coordinates must be finite"));
    }
}

fn validate_set(s: &SetExpr, path: &str, dim: usize, errors: &mut Vec<SchemaError>) {
    match s {
        SetExpr::Halfspace(h) => {
            check_vec(&h.normal, &format!("{path}.normal"), dim, errors);
            if h.normal.norm2() == 0.0 {
                errors.push(err(format!("{path}.normal"), "must be nonzero"));
            }
            if !h.offset.is_finite() {
                errors.push(err(format!("{path}.offset"), "must be finite"));
            }
        }
        SetExpr::Box { lo, hi } => {
            check_vec(lo, &format!("{path}.lo"), dim, errors);
            check_vec(hi, &format!("{path}.hi"), dim, errors);
            if lo.dim() == hi.dim() {
                for i in 0..lo.dim() {
                    if lo.0[i] > hi.0[i] {
                        errors.push(err(
                            format!("{path}.lo[{i}]"),
                            "lower bound exceeds upper bound",
                        ));
                    }
                }
            }
        }
        SetExpr::NormBall { center, radius, .. } => {
            check_vec(center, &format!("{path}.center"), dim, errors);
            if !(*radius > 0.0) {
                errors.push(err(format!("{path}.radius"), "must be positive"));
            }
        }
        SetExpr::Ellipsoid { center, semiaxes } => {
            check_vec(center, &format!("{path}.center"), dim, errors);
            check_vec(semiaxes, &format!("{path}.semiaxes"), dim, errors);
            if semiaxes.0.iter().any(|s| !(*s > 0.0)) {
                errors.push(err(format!("{path}.semiaxes"), "must be positive"));
            }
        }
        SetExpr::PolytopeH { halfspaces } => {
            if halfspaces.is_empty() {
                errors.push(err(
                    format!("{path}.halfspaces"),
                    "must contain at least one halfspace",
                ));
            }
            for (i, h) in halfspaces.iter().enumerate() {
                let hp = format!("{path}.halfspaces[{i}]");
                check_vec(&h.normal, &format!("{hp}.normal"), dim, errors);
                if h.normal.norm2() == 0.0 {
                    errors.push(err(format!("{hp}.normal"), "must be nonzero"));
                }
            }
        }
        SetExpr::AffineSubspace { point, basis } => {
            check_vec(point, &format!("{path}.point"), dim, errors);
            for (i, b) in basis.iter().enumerate() {
                check_vec(b, &format!("{path}.basis[{i}]"), dim, errors);
            }
        }
        SetExpr::SegmentSet { seg } => {
            check_vec(&seg.a0, &format!("{path}.seg.a0"), dim, errors);
            check_vec(&seg.a1, &format!("{path}.seg.a1"), dim, errors);
        }
        SetExpr::Intersection { parts } => {
            if parts.is_empty() {
                errors.push(err(format!("{path}.parts"), "must be nonempty"));
            }
            for (i, p) in parts.iter().enumerate() {
                validate_set(p, &format!("{path}.parts[{i}]"), dim, errors);
            }
        }
        SetExpr::Cylinder {
            cross_section,
            axis_point,
            axis_dir,
            extent,
        } => {
            check_vec(axis_point, &format!("{path}.axis_point"), dim, errors);
            check_vec(axis_dir, &format!("{path}.axis_dir"), dim, errors);
            if (axis_dir.norm2() - 1.0).abs() > 1e-9 {
                errors.push(err(format!("{path}.axis_dir"), "must be a unit vector"));
            }
            if let Extent::Range { lo, hi } = extent {
                if lo > hi {
                    errors.push(err(format!("{path}.extent"), "lo exceeds hi"));
                }
            }
            match &**cross_section {
                SetExpr::NormBall { norm, .. } if norm.is_euclidean() => {
                    validate_set(cross_section, &format!("{path}.cross_section"), dim, errors);
                }
                SetExpr::Ellipsoid { .. } => {
                    validate_set(cross_section, &format!("{path}.cross_section"), dim, errors);
                    // Exact ellipsoid cross-section projections need a
                    // coordinate-aligned axis.
                    let aligned = axis_dir
                        .0
                        .iter()
                        .filter(|c| c.abs() > 1e-9)
                        .count()
                        == 1;
                    if !aligned {
                        errors.push(err(
                            format!("{path}.axis_dir"),
                            "ellipsoid cross-sections require a coordinate-axis direction",
                        ));
                    }
                }
                _ => errors.push(err(
                    format!("{path}.cross_section"),
                    "must be a Euclidean ball or an ellipsoid",
                )),
            }
        }
        SetExpr::VoronoiCell { sites, competitor } => {
            if sites.is_empty() {
                errors.push(err(format!("{path}.sites"), "must be nonempty"));
            }
            for (i, s) in sites.iter().enumerate() {
                check_vec(s, &format!("{path}.sites[{i}]"), dim, errors);
            }
            validate_set(competitor, &format!("{path}.competitor"), dim, errors);
        }
        SetExpr::SublevelSet { f, level } => {
            if !level.is_finite() {
                errors.push(err(format!("{path}.level"), "must be finite"));
            }
            match f {
                ConvexFn::Affine { linear, .. } => {
                    check_vec(linear, &format!("{path}.f.linear"), dim, errors);
                    if linear.norm2() == 0.0 {
                        errors.push(err(format!("{path}.f.linear"), "must be nonzero"));
                    }
                }
                ConvexFn::Quadratic { quad, linear, .. } => {
                    check_vec(quad, &format!("{path}.f.quad"), dim, errors);
                    check_vec(linear, &format!("{path}.f.linear"), dim, errors);
                    if quad.0.iter().any(|q| *q < 0.0) {
                        errors.push(err(
                            format!("{path}.f.quad"),
                            "must be componentwise nonnegative",
                        ));
                    }
                }
                ConvexFn::ExpAffine {
                    coeff,
                    coord,
                    linear,
                    ..
                } => {
                    check_vec(linear, &format!("{path}.f.linear"), dim, errors);
                    if *coeff < 0.0 {
                        errors.push(err(format!("{path}.f.coeff"), "must be nonnegative"));
                    }
                    if *coord >= dim {
                        errors.push(err(
                            format!("{path}.f.coord"),
                            format!("must be below the dimension {dim}"),
                        ));
                    }
                }
            }
        }
    }
}
