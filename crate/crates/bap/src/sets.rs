//! Structured closed convex set expressions: membership, boundary tests,
//! strict-convexity classification, recession cones, and the flat boundary
//! directions that the uniqueness certificates inspect.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{norm_eval, NormSpec, Segment, Vector};
use crate::linalg;

/// Default additive membership slack.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Default boundary-activity tolerance.
pub const ACTIVITY_TOL: f64 = 1e-7;
/// Active-set combination budget for polytope face enumeration.
pub const FACE_ENUM_BUDGET: u64 = 1 << 20;

/// The closed halfspace {x : <normal, x> <= offset}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

/// Axis extent of a cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Extent {
    #[serde(rename = "full_line")]
    FullLine,
    #[serde(rename = "range")]
    Range { lo: f64, hi: f64 },
}

/// Convex scalar functions available to sublevel sets. Deliberately a small
/// closed catalog: an affine form, a separable convex quadratic, and an
/// exponential-of-one-coordinate plus affine term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexFn {
    /// <linear, x> + offset
    Affine { linear: Vector, offset: f64 },
    /// sum_i quad_i x_i^2 + <linear, x> + offset, quad_i >= 0
    Quadratic {
        quad: Vector,
        linear: Vector,
        offset: f64,
    },
    /// coeff * e^{x_coord} + <linear, x> + offset, coeff >= 0
    ExpAffine {
        coeff: f64,
        coord: usize,
        linear: Vector,
        offset: f64,
    },
}

impl ConvexFn {
    pub fn eval(&self, x: &Vector) -> f64 {
        match self {
            ConvexFn::Affine { linear, offset } => linear.dot(x) + offset,
            ConvexFn::Quadratic {
                quad,
                linear,
                offset,
            } => {
                let q: f64 = quad.0.iter().zip(&x.0).map(|(q, xi)| q * xi * xi).sum();
                q + linear.dot(x) + offset
            }
            ConvexFn::ExpAffine {
                coeff,
                coord,
                linear,
                offset,
            } => coeff * x.0[*coord].exp() + linear.dot(x) + offset,
        }
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        match self {
            ConvexFn::Affine { linear, .. } => linear.clone(),
            ConvexFn::Quadratic { quad, linear, .. } => Vector(
                quad.0
                    .iter()
                    .zip(&x.0)
                    .zip(&linear.0)
                    .map(|((q, xi), a)| 2.0 * q * xi + a)
                    .collect(),
            ),
            ConvexFn::ExpAffine {
                coeff,
                coord,
                linear,
                ..
            } => {
                let mut g = linear.clone();
                g.0[*coord] += coeff * x.0[*coord].exp();
                g
            }
        }
    }
}

/// A closed convex set as a structured expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetExpr {
    Halfspace(Halfspace),
    Box {
        lo: Vector,
        hi: Vector,
    },
    NormBall {
        center: Vector,
        radius: f64,
        norm: NormSpec,
    },
    /// Axis-aligned: {x : sum ((x_i - center_i) / semiaxes_i)^2 <= 1}.
    Ellipsoid {
        center: Vector,
        semiaxes: Vector,
    },
    PolytopeH {
        halfspaces: Vec<Halfspace>,
    },
    /// point + span(basis); an empty basis is a singleton.
    AffineSubspace {
        point: Vector,
        basis: Vec<Vector>,
    },
    SegmentSet {
        seg: Segment,
    },
    Intersection {
        parts: Vec<SetExpr>,
    },
    /// {axis_point + t*axis_dir + w : t in extent, w _|_ axis_dir,
    ///  axis_point + w in cross_section}. The cross-section must be a ball or
    /// an (axis-aligned) ellipsoid centered on the axis point.
    Cylinder {
        cross_section: Box<SetExpr>,
        axis_point: Vector,
        axis_dir: Vector,
        extent: Extent,
    },
    /// Points at least as close to the site list as to the competitor set.
    VoronoiCell {
        sites: Vec<Vector>,
        competitor: Box<SetExpr>,
    },
    SublevelSet {
        f: ConvexFn,
        level: f64,
    },
}

/// Strict-convexity classification of a set.
#[derive(Clone, Debug, PartialEq)]
pub enum StrictConvexityVerdict {
    Yes,
    /// Carries a nondegenerate boundary segment as witness.
    No(Segment),
    Unknown,
}

impl StrictConvexityVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, StrictConvexityVerdict::Yes)
    }
}

/// Recession cone description.
#[derive(Clone, Debug, PartialEq)]
pub enum RecessionCone {
    /// The set is bounded, so the cone is {0}.
    Bounded,
    /// {d : <n, d> <= 0 for every n in normals}. A linear subspace is encoded
    /// by including both n and -n for a basis of its orthogonal complement.
    Polyhedral { normals: Vec<Vector> },
    Unknown,
}

impl RecessionCone {
    /// Polyhedral encoding of a linear subspace span(basis) in R^dim.
    pub fn subspace(basis: &[Vector], dim: usize, tol: f64) -> RecessionCone {
        let mut normals = Vec::new();
        for q in linalg::orthogonal_complement(basis, dim, tol) {
            normals.push(q.scale(-1.0));
            normals.push(q);
        }
        RecessionCone::Polyhedral { normals }
    }

    pub fn contains_dir(&self, d: &Vector, tol: f64) -> Option<bool> {
        match self {
            RecessionCone::Bounded => Some(d.norm2() <= tol),
            RecessionCone::Polyhedral { normals } => {
                Some(normals.iter().all(|n| n.dot(d) <= tol * (1.0 + n.norm2())))
            }
            RecessionCone::Unknown => None,
        }
    }
}

/// Flat boundary directions: the direction subspace (a basis each) of every
/// face of dimension >= 1.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryDirections {
    /// Empty when the boundary contains no nondegenerate segment.
    Flat(Vec<Vec<Vector>>),
    Unknown,
}

impl SetExpr {
    pub fn halfspace(normal: impl Into<Vector>, offset: f64) -> SetExpr {
        SetExpr::Halfspace(Halfspace {
            normal: normal.into(),
            offset,
        })
    }

    pub fn axis_box(lo: impl Into<Vector>, hi: impl Into<Vector>) -> SetExpr {
        SetExpr::Box {
            lo: lo.into(),
            hi: hi.into(),
        }
    }

    pub fn ball(center: impl Into<Vector>, radius: f64) -> SetExpr {
        SetExpr::NormBall {
            center: center.into(),
            radius,
            norm: NormSpec::EUCLIDEAN,
        }
    }

    pub fn ellipsoid(center: impl Into<Vector>, semiaxes: impl Into<Vector>) -> SetExpr {
        SetExpr::Ellipsoid {
            center: center.into(),
            semiaxes: semiaxes.into(),
        }
    }

    pub fn segment(a0: impl Into<Vector>, a1: impl Into<Vector>) -> SetExpr {
        SetExpr::SegmentSet {
            seg: Segment {
                a0: a0.into(),
                a1: a1.into(),
            },
        }
    }

    /// Ambient dimension, if derivable from the expression.
    pub fn dim(&self) -> usize {
        match self {
            SetExpr::Halfspace(h) => h.normal.dim(),
            SetExpr::Box { lo, .. } => lo.dim(),
            SetExpr::NormBall { center, .. } => center.dim(),
            SetExpr::Ellipsoid { center, .. } => center.dim(),
            SetExpr::PolytopeH { halfspaces } => {
                halfspaces.first().map_or(0, |h| h.normal.dim())
            }
            SetExpr::AffineSubspace { point, .. } => point.dim(),
            SetExpr::SegmentSet { seg } => seg.dim(),
            SetExpr::Intersection { parts } => parts.first().map_or(0, |p| p.dim()),
            SetExpr::Cylinder { axis_point, .. } => axis_point.dim(),
            SetExpr::VoronoiCell { sites, .. } => sites.first().map_or(0, |s| s.dim()),
            SetExpr::SublevelSet { f, .. } => match f {
                ConvexFn::Affine { linear, .. } => linear.dim(),
                ConvexFn::Quadratic { linear, .. } => linear.dim(),
                ConvexFn::ExpAffine { linear, .. } => linear.dim(),
            },
        }
    }
}

fn cylinder_split(axis_point: &Vector, axis_dir: &Vector, x: &Vector) -> (f64, Vector) {
    let u = x.sub(axis_point);
    let t = u.dot(axis_dir);
    let w = u.add_scaled(axis_dir, -t);
    (t, axis_point.add(&w))
}

/// Minimum Euclidean distance from `x` to the site list.
pub fn site_distance(sites: &[Vector], x: &Vector) -> f64 {
    sites
        .iter()
        .map(|p| x.sub(p).norm2())
        .fold(f64::INFINITY, f64::min)
}

fn competitor_distance(competitor: &SetExpr, x: &Vector) -> f64 {
    crate::projections::euclid_project(competitor, x, &crate::projections::ProjParams::default())
        .map(|r| r.distance)
        .unwrap_or(f64::INFINITY)
}

/// Membership with a signed additive slack: positive slack relaxes the
/// constraints (closed membership up to `tol`); negative slack demands a
/// strict interior margin, which is what the closure-identity oracle check
/// uses as an open-set proxy.
pub fn contains_with_slack(s: &SetExpr, x: &Vector, slack: f64) -> Result<bool> {
    x.check_dim(s.dim())?;
    Ok(match s {
        SetExpr::Halfspace(h) => h.normal.dot(x) <= h.offset + slack,
        SetExpr::Box { lo, hi } => x
            .0
            .iter()
            .zip(&lo.0)
            .zip(&hi.0)
            .all(|((xi, l), h)| *xi >= l - slack && *xi <= h + slack),
        SetExpr::NormBall {
            center,
            radius,
            norm,
        } => norm_eval(*norm, &x.sub(center)) <= radius + slack,
        SetExpr::Ellipsoid { center, semiaxes } => {
            ellipsoid_level(center, semiaxes, x) <= 1.0 + slack
        }
        SetExpr::PolytopeH { halfspaces } => halfspaces
            .iter()
            .all(|h| h.normal.dot(x) <= h.offset + slack),
        SetExpr::AffineSubspace { point, basis } => {
            affine_residual(point, basis, x) <= slack.max(0.0)
        }
        SetExpr::SegmentSet { seg } => segment_distance(seg, x) <= slack.max(0.0),
        SetExpr::Intersection { parts } => {
            for p in parts {
                if !contains_with_slack(p, x, slack)? {
                    return Ok(false);
                }
            }
            true
        }
        SetExpr::Cylinder {
            cross_section,
            axis_point,
            axis_dir,
            extent,
        } => {
            let (t, cross_pt) = cylinder_split(axis_point, axis_dir, x);
            let in_extent = match extent {
                Extent::FullLine => true,
                Extent::Range { lo, hi } => t >= lo - slack && t <= hi + slack,
            };
            in_extent && contains_with_slack(cross_section, &cross_pt, slack)?
        }
        SetExpr::VoronoiCell { sites, competitor } => {
            site_distance(sites, x) <= competitor_distance(competitor, x) + slack
        }
        SetExpr::SublevelSet { f, level } => f.eval(x) <= level + slack,
    })
}

/// Scaled residual of the axis-aligned ellipsoid constraint:
/// sqrt(sum ((x_i - c_i)/s_i)^2), so the boundary sits at level 1.
pub fn ellipsoid_level(center: &Vector, semiaxes: &Vector, x: &Vector) -> f64 {
    x.0.iter()
        .zip(&center.0)
        .zip(&semiaxes.0)
        .map(|((xi, c), s)| {
            let r = (xi - c) / s;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

fn affine_residual(point: &Vector, basis: &[Vector], x: &Vector) -> f64 {
    let q = linalg::orthonormal_basis(basis, 1e-12);
    let d = x.sub(point);
    let mut residual = d.clone();
    for b in &q {
        residual = residual.add_scaled(b, -b.dot(&d));
    }
    residual.norm2()
}

fn segment_distance(seg: &Segment, x: &Vector) -> f64 {
    let d = seg.direction();
    let len2 = d.dot(&d);
    let t = if len2 > 0.0 {
        (x.sub(&seg.a0).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    x.sub(&seg.a0.add_scaled(&d, t)).norm2()
}

/// True iff `x` belongs to `s` with additive slack `tol`.
pub fn contains(s: &SetExpr, x: &Vector, tol: f64) -> Result<bool> {
    contains_with_slack(s, x, tol)
}

/// True iff `x` lies on the boundary of `s` (at least one defining constraint
/// is active within `tol`). Pre: `x` is a member.
pub fn is_boundary_point(s: &SetExpr, x: &Vector, tol: f64) -> Result<bool> {
    if !contains(s, x, tol)? {
        return Err(Error::NotAMember);
    }
    boundary_active(s, x, tol)
}

fn boundary_active(s: &SetExpr, x: &Vector, tol: f64) -> Result<bool> {
    let dim = s.dim();
    Ok(match s {
        SetExpr::Halfspace(h) => h.normal.dot(x) >= h.offset - tol,
        SetExpr::Box { lo, hi } => x
            .0
            .iter()
            .zip(&lo.0)
            .zip(&hi.0)
            .any(|((xi, l), h)| *xi <= l + tol || *xi >= h - tol),
        SetExpr::NormBall {
            center,
            radius,
            norm,
        } => (norm_eval(*norm, &x.sub(center)) - radius).abs() <= tol,
        SetExpr::Ellipsoid { center, semiaxes } => {
            (ellipsoid_level(center, semiaxes, x) - 1.0).abs() <= tol
        }
        SetExpr::PolytopeH { halfspaces } => halfspaces
            .iter()
            .any(|h| h.normal.dot(x) >= h.offset - tol),
        SetExpr::AffineSubspace { basis, .. } => {
            // A proper affine subspace has empty interior; the whole space has
            // empty boundary.
            linalg::rank(basis, 1e-12) < dim
        }
        SetExpr::SegmentSet { seg } => {
            if dim == 1 && seg.is_nondegenerate() {
                (x.0[0] - seg.a0.0[0]).abs() <= tol || (x.0[0] - seg.a1.0[0]).abs() <= tol
            } else {
                true
            }
        }
        SetExpr::Intersection { parts } => {
            for p in parts {
                if boundary_active(p, x, tol)? {
                    return Ok(true);
                }
            }
            false
        }
        SetExpr::Cylinder {
            cross_section,
            axis_point,
            axis_dir,
            extent,
        } => {
            let (t, cross_pt) = cylinder_split(axis_point, axis_dir, x);
            let at_cap = match extent {
                Extent::FullLine => false,
                Extent::Range { lo, hi } => (t - lo).abs() <= tol || (t - hi).abs() <= tol,
            };
            at_cap || boundary_active(cross_section, &cross_pt, tol)?
        }
        SetExpr::VoronoiCell { sites, competitor } => {
            (site_distance(sites, x) - competitor_distance(competitor, x)).abs() <= tol
        }
        SetExpr::SublevelSet { f, level } => (f.eval(x) - level).abs() <= tol,
    })
}

/// Classify strict convexity, producing a boundary-segment witness for
/// non-strictly-convex sets where one is constructible.
pub fn classify_strict_convexity(s: &SetExpr) -> StrictConvexityVerdict {
    use StrictConvexityVerdict::{No, Unknown, Yes};
    let dim = s.dim();
    // Every convex subset of the real line is strictly convex.
    if dim == 1 {
        return Yes;
    }
    match s {
        SetExpr::Halfspace(h) => match hyperplane_segment(&h.normal, h.offset) {
            Some(seg) => No(seg),
            None => Unknown,
        },
        SetExpr::Box { lo, hi } => box_witness(lo, hi).map_or(Yes, No),
        SetExpr::NormBall {
            center,
            radius,
            norm,
        } => match norm {
            NormSpec::P(p) if *p > 1.0 => Yes,
            NormSpec::P(_) => {
                // l1 ball: the facet chord between two axis vertices.
                let mut a = center.clone();
                a.0[0] += radius;
                let mut b = center.clone();
                b.0[1] += radius;
                No(Segment { a0: a, a1: b })
            }
            NormSpec::Inf => {
                // sup-norm ball: an edge of the cube.
                let mut a = center.clone();
                a.0[0] += radius;
                a.0[1] += radius;
                let mut b = center.clone();
                b.0[0] += radius;
                b.0[1] -= radius;
                No(Segment { a0: a, a1: b })
            }
        },
        SetExpr::Ellipsoid { .. } => Yes,
        SetExpr::PolytopeH { halfspaces } => {
            match enumerate_polytope_faces(halfspaces, crate::geometry::PARALLEL_TOL) {
                FaceEnum::Faces { witness, .. } => witness.map_or(Yes, No),
                FaceEnum::Unknown => Unknown,
            }
        }
        SetExpr::AffineSubspace { point, basis } => {
            if linalg::rank(basis, 1e-12) >= 1 {
                let d = linalg::orthonormal_basis(basis, 1e-12).remove(0);
                No(Segment {
                    a0: point.sub(&d),
                    a1: point.add(&d),
                })
            } else {
                Yes // singleton
            }
        }
        SetExpr::SegmentSet { seg } => {
            if seg.is_nondegenerate() {
                No(seg.clone())
            } else {
                Yes
            }
        }
        SetExpr::Intersection { parts } => {
            let verdicts: Vec<_> = parts.iter().map(classify_strict_convexity).collect();
            if verdicts.iter().all(|v| v.is_yes()) {
                return Yes;
            }
            // A witness of one part survives if the whole segment still lies
            // on the boundary of the intersection.
            for v in &verdicts {
                if let No(seg) = v {
                    if segment_on_boundary(s, seg) {
                        return No(seg.clone());
                    }
                }
            }
            Unknown
        }
        SetExpr::Cylinder {
            cross_section,
            axis_point,
            axis_dir,
            extent,
        } => cylinder_witness(cross_section, axis_point, axis_dir, extent).map_or(Unknown, No),
        SetExpr::VoronoiCell { .. } => Unknown,
        SetExpr::SublevelSet { f, level: _ } => match f {
            ConvexFn::Affine { linear, .. } => {
                // A halfspace in disguise.
                match hyperplane_segment(linear, 0.0) {
                    Some(seg) => {
                        // Recenter the witness onto the actual boundary.
                        let shift = sublevel_boundary_shift(s, &seg.a0);
                        shift.map_or(Unknown, |t| {
                            No(Segment {
                                a0: seg.a0.add_scaled(linear, t),
                                a1: seg.a1.add_scaled(linear, t),
                            })
                        })
                    }
                    None => Unknown,
                }
            }
            ConvexFn::Quadratic { quad, .. } => {
                if quad.0.iter().all(|q| *q > 0.0) {
                    Yes
                } else {
                    Unknown
                }
            }
            ConvexFn::ExpAffine {
                coeff,
                coord,
                linear,
                ..
            } => {
                // In the plane, a positive exponential plus a genuine linear
                // term in the other coordinate bounds a strictly convex region.
                let other = 1 - *coord;
                if dim == 2 && *coeff > 0.0 && linear.0[other] != 0.0 {
                    Yes
                } else {
                    Unknown
                }
            }
        },
    }
}

fn sublevel_boundary_shift(s: &SetExpr, x: &Vector) -> Option<f64> {
    if let SetExpr::SublevelSet { f, level } = s {
        if let ConvexFn::Affine { linear, offset } = f {
            let n2 = linear.dot(linear);
            if n2 > 0.0 {
                return Some((level - offset - linear.dot(x)) / n2);
            }
        }
    }
    None
}

fn hyperplane_segment(normal: &Vector, offset: f64) -> Option<Segment> {
    let dim = normal.dim();
    if dim < 2 {
        return None;
    }
    let n2 = normal.dot(normal);
    if n2 == 0.0 {
        return None;
    }
    let p0 = normal.scale(offset / n2);
    let tangents = linalg::orthogonal_complement(&[normal.clone()], dim, 1e-12);
    let t = tangents.first()?;
    Some(Segment {
        a0: p0.sub(t),
        a1: p0.add(t),
    })
}

fn box_witness(lo: &Vector, hi: &Vector) -> Option<Segment> {
    // A segment along the first nondegenerate axis on the "top" face.
    let i = (0..lo.dim()).find(|&i| hi.0[i] > lo.0[i])?;
    let mut a = hi.clone();
    let mut b = hi.clone();
    a.0[i] = lo.0[i];
    b.0[i] = hi.0[i];
    Some(Segment { a0: a, a1: b })
}

fn cylinder_witness(
    cross_section: &SetExpr,
    axis_point: &Vector,
    axis_dir: &Vector,
    extent: &Extent,
) -> Option<Segment> {
    let boundary_pt = cross_section_boundary_point(cross_section, axis_point, axis_dir)?;
    match extent {
        Extent::FullLine => Some(Segment {
            a0: boundary_pt.add_scaled(axis_dir, -1.0),
            a1: boundary_pt.add_scaled(axis_dir, 1.0),
        }),
        Extent::Range { lo, hi } if hi > lo => Some(Segment {
            a0: boundary_pt.add_scaled(axis_dir, *lo),
            a1: boundary_pt.add_scaled(axis_dir, *hi),
        }),
        Extent::Range { .. } => {
            // A flat disk: any diameter is a boundary chord.
            let w = boundary_pt.sub(axis_point);
            Some(Segment {
                a0: axis_point.sub(&w),
                a1: axis_point.add(&w),
            })
        }
    }
}

fn cross_section_boundary_point(
    cross_section: &SetExpr,
    axis_point: &Vector,
    axis_dir: &Vector,
) -> Option<Vector> {
    let dim = axis_point.dim();
    match cross_section {
        SetExpr::NormBall { center, radius, .. } => {
            let u = linalg::orthogonal_complement(&[axis_dir.clone()], dim, 1e-12);
            u.first().map(|u| center.add_scaled(u, *radius))
        }
        SetExpr::Ellipsoid { center, semiaxes } => {
            // Pick the coordinate axis most orthogonal to the cylinder axis.
            let j = (0..dim).min_by(|a, b| {
                axis_dir.0[*a]
                    .abs()
                    .partial_cmp(&axis_dir.0[*b].abs())
                    .unwrap()
            })?;
            if axis_dir.0[j].abs() > 1e-9 {
                return None; // no coordinate direction orthogonal to the axis
            }
            let mut p = center.clone();
            p.0[j] += semiaxes.0[j];
            Some(p)
        }
        _ => None,
    }
}

fn segment_on_boundary(s: &SetExpr, seg: &Segment) -> bool {
    [0.0, 0.25, 0.5, 0.75, 1.0].iter().all(|&t| {
        let p = seg.a0.add_scaled(&seg.direction(), t);
        contains(s, &p, MEMBERSHIP_TOL).unwrap_or(false)
            && is_boundary_point(s, &p, ACTIVITY_TOL).unwrap_or(false)
    })
}

/// Recession cone of the set, where computable.
pub fn recession_cone(s: &SetExpr) -> RecessionCone {
    let dim = s.dim();
    let tol = crate::geometry::PARALLEL_TOL;
    match s {
        SetExpr::Box { .. }
        | SetExpr::NormBall { .. }
        | SetExpr::Ellipsoid { .. }
        | SetExpr::SegmentSet { .. } => RecessionCone::Bounded,
        SetExpr::Halfspace(h) => RecessionCone::Polyhedral {
            normals: vec![h.normal.clone()],
        },
        SetExpr::PolytopeH { halfspaces } => RecessionCone::Polyhedral {
            normals: halfspaces.iter().map(|h| h.normal.clone()).collect(),
        },
        SetExpr::AffineSubspace { basis, .. } => RecessionCone::subspace(basis, dim, tol),
        SetExpr::Cylinder {
            extent, axis_dir, ..
        } => match extent {
            Extent::FullLine => RecessionCone::subspace(&[axis_dir.clone()], dim, tol),
            Extent::Range { .. } => RecessionCone::Bounded,
        },
        SetExpr::Intersection { parts } => {
            let mut normals = Vec::new();
            let mut unknown = false;
            for p in parts {
                match recession_cone(p) {
                    RecessionCone::Bounded => return RecessionCone::Bounded,
                    RecessionCone::Polyhedral { normals: n } => normals.extend(n),
                    RecessionCone::Unknown => unknown = true,
                }
            }
            if unknown {
                RecessionCone::Unknown
            } else {
                RecessionCone::Polyhedral { normals }
            }
        }
        SetExpr::SublevelSet { f, .. } => match f {
            ConvexFn::Affine { linear, .. } => RecessionCone::Polyhedral {
                normals: vec![linear.clone()],
            },
            ConvexFn::Quadratic { quad, linear, .. } => {
                // Quadratic directions must vanish; the affine part must not grow.
                let mut normals = vec![linear.clone()];
                for (i, q) in quad.0.iter().enumerate() {
                    if *q > 0.0 {
                        let mut e = Vector::zeros(dim);
                        e.0[i] = 1.0;
                        normals.push(e.scale(-1.0));
                        normals.push(e);
                    }
                }
                RecessionCone::Polyhedral { normals }
            }
            ConvexFn::ExpAffine {
                coeff,
                coord,
                linear,
                ..
            } => {
                let mut normals = vec![linear.clone()];
                if *coeff > 0.0 {
                    let mut e = Vector::zeros(dim);
                    e.0[*coord] = 1.0;
                    normals.push(e);
                }
                RecessionCone::Polyhedral { normals }
            }
        },
        SetExpr::VoronoiCell { .. } => RecessionCone::Unknown,
    }
}

/// Direction subspaces of all boundary faces of dimension >= 1.
pub fn boundary_segments_directions(s: &SetExpr) -> BoundaryDirections {
    use BoundaryDirections::{Flat, Unknown};
    let dim = s.dim();
    let tol = crate::geometry::PARALLEL_TOL;
    if dim == 1 {
        return Flat(Vec::new());
    }
    match s {
        SetExpr::Ellipsoid { .. } => Flat(Vec::new()),
        SetExpr::NormBall { norm, .. } => match norm {
            NormSpec::P(p) if *p > 1.0 => Flat(Vec::new()),
            NormSpec::Inf => Flat(cube_facet_directions(dim)),
            NormSpec::P(_) => Flat(cross_polytope_facet_directions(dim)),
        },
        SetExpr::Halfspace(h) => {
            Flat(vec![linalg::orthogonal_complement(&[h.normal.clone()], dim, tol)])
        }
        SetExpr::Box { lo, hi } => {
            let free: Vec<usize> = (0..dim).filter(|&i| hi.0[i] > lo.0[i]).collect();
            if free.is_empty() {
                return Flat(Vec::new());
            }
            if free.len() < dim {
                // Flat box: the whole set is boundary; one direction space.
                return Flat(vec![axis_span(dim, &free)]);
            }
            // Full-dimensional box: one facet space per axis.
            let mut spaces = Vec::new();
            for j in 0..dim {
                let others: Vec<usize> = free.iter().copied().filter(|i| *i != j).collect();
                if !others.is_empty() {
                    spaces.push(axis_span(dim, &others));
                }
            }
            Flat(spaces)
        }
        SetExpr::SegmentSet { seg } => {
            if seg.is_nondegenerate() {
                Flat(vec![vec![seg.direction()]])
            } else {
                Flat(Vec::new())
            }
        }
        SetExpr::AffineSubspace { basis, .. } => {
            let rank = linalg::rank(basis, tol);
            if rank == 0 {
                Flat(Vec::new())
            } else if rank == dim {
                Flat(Vec::new()) // the whole space has no boundary
            } else {
                Flat(vec![linalg::orthonormal_basis(basis, tol)])
            }
        }
        SetExpr::PolytopeH { halfspaces } => match enumerate_polytope_faces(halfspaces, tol) {
            FaceEnum::Faces { directions, .. } => Flat(directions),
            FaceEnum::Unknown => Unknown,
        },
        SetExpr::Cylinder {
            cross_section,
            axis_dir,
            extent,
            ..
        } => {
            let mut spaces = Vec::new();
            let lateral = match extent {
                Extent::FullLine => true,
                Extent::Range { lo, hi } => hi > lo,
            };
            if lateral {
                spaces.push(vec![axis_dir.clone()]);
            }
            if let Extent::Range { .. } = extent {
                // Cap faces (or the flat disk itself) are flat in the
                // orthogonal complement of the axis.
                spaces.push(linalg::orthogonal_complement(&[axis_dir.clone()], dim, tol));
            }
            match boundary_segments_directions(cross_section) {
                Flat(cross_spaces) => spaces.extend(cross_spaces),
                Unknown => return Unknown,
            }
            Flat(spaces)
        }
        SetExpr::Intersection { .. } | SetExpr::VoronoiCell { .. } | SetExpr::SublevelSet { .. } => {
            Unknown
        }
    }
}

fn axis_span(dim: usize, axes: &[usize]) -> Vec<Vector> {
    axes.iter()
        .map(|&i| {
            let mut e = Vector::zeros(dim);
            e.0[i] = 1.0;
            e
        })
        .collect()
}

fn cube_facet_directions(dim: usize) -> Vec<Vec<Vector>> {
    (0..dim)
        .map(|j| axis_span(dim, &(0..dim).filter(|i| *i != j).collect::<Vec<_>>()))
        .collect()
}

fn cross_polytope_facet_directions(dim: usize) -> Vec<Vec<Vector>> {
    // Facet normals of the l1 ball are sign vectors; dedupe antipodal pairs
    // by fixing the first sign.
    let mut out = Vec::new();
    let count = 1u64 << (dim - 1);
    for bits in 0..count {
        let mut n = vec![1.0; dim];
        for (i, ni) in n.iter_mut().enumerate().skip(1) {
            if bits >> (i - 1) & 1 == 1 {
                *ni = -1.0;
            }
        }
        out.push(linalg::orthogonal_complement(
            &[Vector(n)],
            dim,
            crate::geometry::PARALLEL_TOL,
        ));
    }
    out
}

pub(crate) enum FaceEnum {
    Faces {
        directions: Vec<Vec<Vector>>,
        witness: Option<Segment>,
        vertices: Vec<Vector>,
    },
    Unknown,
}

/// Enumerate vertices and extreme rays of a pointed H-polytope, then derive
/// the direction space of every facet of dimension >= 1. Returns Unknown when
/// the polyhedron is not pointed (contains lines) or when the active-set
/// enumeration would exceed the budget.
pub(crate) fn enumerate_polytope_faces(halfspaces: &[Halfspace], tol: f64) -> FaceEnum {
    let m = halfspaces.len();
    if m == 0 {
        return FaceEnum::Unknown;
    }
    let dim = halfspaces[0].normal.dim();
    let normals: Vec<Vector> = halfspaces.iter().map(|h| h.normal.clone()).collect();
    if linalg::rank(&normals, tol) < dim {
        return FaceEnum::Unknown; // contains lines
    }
    if n_choose_k(m as u64, dim as u64) > FACE_ENUM_BUDGET {
        return FaceEnum::Unknown;
    }
    let scale = halfspaces
        .iter()
        .map(|h| h.normal.norm2().max(h.offset.abs()))
        .fold(1.0f64, f64::max);
    let feas_tol = 1e-7 * scale;

    let mut vertices: Vec<Vector> = Vec::new();
    for subset in subsets(m, dim) {
        let rows: Vec<Vector> = subset.iter().map(|&i| normals[i].clone()).collect();
        let mat = nalgebra::DMatrix::from_fn(dim, dim, |r, c| rows[r].0[c]);
        let rhs = nalgebra::DVector::from_fn(dim, |r, _| halfspaces[subset[r]].offset);
        let lu = mat.lu();
        if let Some(x) = lu.solve(&rhs) {
            let v = Vector(x.iter().copied().collect());
            if !v.is_finite() {
                continue;
            }
            let feasible = halfspaces
                .iter()
                .all(|h| h.normal.dot(&v) <= h.offset + feas_tol);
            if feasible && !vertices.iter().any(|w| w.sub(&v).norm2() <= feas_tol * 10.0) {
                vertices.push(v);
            }
        }
    }

    let mut rays: Vec<Vector> = Vec::new();
    if dim >= 2 {
        for subset in subsets(m, dim - 1) {
            let rows: Vec<Vector> = subset.iter().map(|&i| normals[i].clone()).collect();
            let ns = linalg::nullspace(&rows, dim, tol);
            if ns.len() != 1 {
                continue;
            }
            for d in [ns[0].clone(), ns[0].scale(-1.0)] {
                let in_cone = normals.iter().all(|n| n.dot(&d) <= feas_tol);
                if in_cone && !rays.iter().any(|r| r.sub(&d).norm2() <= 1e-7) {
                    rays.push(d);
                }
            }
        }
    }

    if vertices.is_empty() {
        return FaceEnum::Unknown;
    }

    let mut directions = Vec::new();
    let mut witness = None;
    for (i, h) in halfspaces.iter().enumerate() {
        let on_facet: Vec<&Vector> = vertices
            .iter()
            .filter(|v| (h.normal.dot(v) - h.offset).abs() <= feas_tol)
            .collect();
        let facet_rays: Vec<&Vector> = rays
            .iter()
            .filter(|d| h.normal.dot(d).abs() <= feas_tol && !on_facet.is_empty())
            .collect();
        let mut span: Vec<Vector> = Vec::new();
        if let Some(v0) = on_facet.first() {
            for v in on_facet.iter().skip(1) {
                span.push(v.sub(v0));
            }
        }
        span.extend(facet_rays.iter().map(|d| (*d).clone()));
        let basis = linalg::orthonormal_basis(&span, tol);
        if !basis.is_empty() {
            if witness.is_none() && on_facet.len() >= 2 {
                witness = Some(Segment {
                    a0: on_facet[0].clone(),
                    a1: on_facet[1].clone(),
                });
            }
            directions.push(basis);
        }
        let _ = i;
    }

    FaceEnum::Faces {
        directions,
        witness,
        vertices,
    }
}

/// Vertices of a pointed, full-rank H-polytope, when enumerable.
pub fn polytope_vertices(halfspaces: &[Halfspace]) -> Option<Vec<Vector>> {
    match enumerate_polytope_faces(halfspaces, crate::geometry::PARALLEL_TOL) {
        FaceEnum::Faces { vertices, .. } => Some(vertices),
        FaceEnum::Unknown => None,
    }
}

fn n_choose_k(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k.min(n - k) {
        r = r.saturating_mul(n - i) / (i + 1);
        if r > FACE_ENUM_BUDGET {
            return r;
        }
    }
    r
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
