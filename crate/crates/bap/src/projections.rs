//! Euclidean (metric) projections onto set expressions: closed forms where
//! available, multiplier root-finding for curved sets, and a corrected cyclic
//! projection scheme for intersections.

use crate::error::{Error, Result};
use crate::geometry::{norm_eval, NormSpec, Segment, Vector};
use crate::linalg;
use crate::sets::{ellipsoid_level, ConvexFn, Extent, Halfspace, SetExpr};

#[derive(Clone, Copy, Debug)]
pub struct ProjParams {
    /// Stop when a full correction cycle moves the iterate less than this.
    pub tol: f64,
    /// Cycle budget for the iterative schemes.
    pub max_cycles: usize,
}

impl Default for ProjParams {
    fn default() -> Self {
        ProjParams {
            tol: 1e-10,
            max_cycles: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionResult {
    pub point: Vector,
    /// Euclidean distance from the query point to `point`.
    pub distance: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn done(x: &Vector, point: Vector) -> ProjectionResult {
    let distance = x.sub(&point).norm2();
    ProjectionResult {
        point,
        distance,
        iterations: 1,
        converged: true,
    }
}

/// Projection of `x` onto `s` in the Euclidean metric.
pub fn euclid_project(s: &SetExpr, x: &Vector, params: &ProjParams) -> Result<ProjectionResult> {
    x.check_dim(s.dim())?;
    match s {
        SetExpr::Halfspace(h) => Ok(done(x, halfspace_point(h, x))),
        SetExpr::Box { lo, hi } => Ok(done(x, box_point(lo, hi, x))),
        SetExpr::NormBall {
            center,
            radius,
            norm,
        } => Ok(done(x, norm_ball_point(center, *radius, *norm, x)?)),
        SetExpr::Ellipsoid { center, semiaxes } => {
            Ok(done(x, ellipsoid_point(center, semiaxes, x)))
        }
        SetExpr::AffineSubspace { point, basis } => {
            let q = linalg::orthonormal_basis(basis, 1e-12);
            let d = x.sub(point);
            let mut y = point.clone();
            for b in &q {
                y = y.add_scaled(b, b.dot(&d));
            }
            Ok(done(x, y))
        }
        SetExpr::SegmentSet { seg } => Ok(done(x, segment_point_nearest(seg, x))),
        SetExpr::PolytopeH { halfspaces } => {
            let parts: Vec<SetExpr> = halfspaces
                .iter()
                .map(|h| SetExpr::Halfspace(h.clone()))
                .collect();
            let mut r = dykstra_project(&parts, x, params)?;
            polish_with_halfspaces(halfspaces, x, &mut r, params.tol);
            Ok(r)
        }
        SetExpr::Intersection { parts } => {
            let mut r = dykstra_project(parts, x, params)?;
            if let Some(hs) = all_halfspaces(parts) {
                polish_with_halfspaces(&hs, x, &mut r, params.tol);
            }
            Ok(r)
        }
        SetExpr::Cylinder {
            cross_section,
            axis_point,
            axis_dir,
            extent,
        } => cylinder_project(cross_section, axis_point, axis_dir, extent, x, params),
        SetExpr::VoronoiCell { sites, competitor } => {
            voronoi_project(sites, competitor, x, params)
        }
        SetExpr::SublevelSet { f, level } => Ok(done(x, sublevel_point(f, *level, x)?)),
    }
}

fn halfspace_point(h: &Halfspace, x: &Vector) -> Vector {
    let n2 = h.normal.dot(&h.normal);
    if n2 == 0.0 {
        return x.clone();
    }
    let excess = h.normal.dot(x) - h.offset;
    if excess > 0.0 {
        x.add_scaled(&h.normal, -excess / n2)
    } else {
        x.clone()
    }
}

fn box_point(lo: &Vector, hi: &Vector, x: &Vector) -> Vector {
    Vector(
        x.0.iter()
            .zip(&lo.0)
            .zip(&hi.0)
            .map(|((xi, l), h)| xi.clamp(*l, *h))
            .collect(),
    )
}

fn segment_point_nearest(seg: &Segment, x: &Vector) -> Vector {
    let d = seg.direction();
    let len2 = d.dot(&d);
    let t = if len2 > 0.0 {
        (x.sub(&seg.a0).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    seg.a0.add_scaled(&d, t)
}

fn norm_ball_point(center: &Vector, radius: f64, norm: NormSpec, x: &Vector) -> Result<Vector> {
    let d = x.sub(center);
    if norm_eval(norm, &d) <= radius {
        return Ok(x.clone());
    }
    let z = match norm {
        NormSpec::P(p) if p == 2.0 => d.scale(radius / d.norm2()),
        NormSpec::Inf => Vector(d.0.iter().map(|c| c.clamp(-radius, radius)).collect()),
        NormSpec::P(p) if p == 1.0 => l1_ball_point(&d, radius),
        NormSpec::P(p) => lp_ball_point(&d, radius, p),
    };
    Ok(center.add(&z))
}

/// Soft-threshold projection onto the l1 ball of the given radius (centered
/// at the origin), assuming the point is outside.
fn l1_ball_point(d: &Vector, radius: f64) -> Vector {
    let mut mags: Vec<f64> = d.0.iter().map(|c| c.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        cum += m;
        let t = (cum - radius) / (k as f64 + 1.0);
        if t >= mags.get(k + 1).copied().unwrap_or(0.0) {
            theta = t;
            break;
        }
    }
    Vector(
        d.0.iter()
            .map(|c| c.signum() * (c.abs() - theta).max(0.0))
            .collect(),
    )
}

/// Projection onto the lp ball (1 < p < inf) of the given radius, centered at
/// the origin, assuming the point is outside. Outer bisection on the KKT
/// multiplier; per-coordinate inner solves are monotone scalar equations.
fn lp_ball_point(d: &Vector, radius: f64, p: f64) -> Vector {
    let solve_coord = |di: f64, lambda: f64| -> f64 {
        // z + lambda * p * z^(p-1) = di for z in [0, di].
        if di == 0.0 {
            return 0.0;
        }
        let g = |z: f64| z + lambda * p * z.powf(p - 1.0) - di;
        let (mut lo, mut hi) = (0.0f64, di);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let point_for = |lambda: f64| -> Vector {
        Vector(
            d.0.iter()
                .map(|c| c.signum() * solve_coord(c.abs(), lambda))
                .collect(),
        )
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while norm_eval(NormSpec::P(p), &point_for(hi)) > radius {
        hi *= 2.0;
        if hi > 1e18 {
            break;
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if norm_eval(NormSpec::P(p), &point_for(mid)) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    point_for(0.5 * (lo + hi))
}

/// Exact projection onto an axis-aligned ellipsoid via the standard secular
/// equation: y_i = c_i + s_i^2 (x_i - c_i) / (s_i^2 + lambda).
pub fn ellipsoid_point(center: &Vector, semiaxes: &Vector, x: &Vector) -> Vector {
    if ellipsoid_level(center, semiaxes, x) <= 1.0 {
        return x.clone();
    }
    let d = x.sub(center);
    let level = |lambda: f64| -> f64 {
        d.0.iter()
            .zip(&semiaxes.0)
            .map(|(di, s)| {
                let r = s * di / (s * s + lambda);
                r * r
            })
            .sum::<f64>()
            - 1.0
    };
    let dlevel = |lambda: f64| -> f64 {
        d.0.iter()
            .zip(&semiaxes.0)
            .map(|(di, s)| {
                let num = s * di;
                -2.0 * num * num / (s * s + lambda).powi(3)
            })
            .sum()
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while level(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e30 {
            break;
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if level(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..4 {
        let f = level(lambda);
        let df = dlevel(lambda);
        if df != 0.0 {
            let next = lambda - f / df;
            if next > 0.0 && next.is_finite() {
                lambda = next;
            }
        }
    }
    Vector(
        center
            .0
            .iter()
            .zip(&d.0)
            .zip(&semiaxes.0)
            .map(|((c, di), s)| c + s * s * di / (s * s + lambda))
            .collect(),
    )
}

fn cylinder_project(
    cross_section: &SetExpr,
    axis_point: &Vector,
    axis_dir: &Vector,
    extent: &Extent,
    x: &Vector,
    params: &ProjParams,
) -> Result<ProjectionResult> {
    let u = x.sub(axis_point);
    let t = u.dot(axis_dir);
    let w = u.add_scaled(axis_dir, -t);
    let t_clamped = match extent {
        Extent::FullLine => t,
        Extent::Range { lo, hi } => t.clamp(*lo, *hi),
    };
    let base = axis_point.add(&w);
    let q = match cross_section {
        SetExpr::NormBall {
            center,
            radius,
            norm,
        } if norm.is_euclidean() => {
            // Ball centered on the axis: radial clamp inside the base plane.
            let v = base.sub(center);
            let n = v.norm2();
            if n <= *radius {
                base
            } else {
                center.add(&v.scale(*radius / n))
            }
        }
        SetExpr::Ellipsoid { center, semiaxes } => {
            // The axis must be a coordinate direction for this to stay inside
            // the base plane; structural validation enforces that.
            ellipsoid_point(center, semiaxes, &base)
        }
        other => {
            let r = euclid_project(other, &base, params)?;
            r.point
        }
    };
    Ok(done(x, q.add_scaled(axis_dir, t_clamped)))
}

fn sublevel_point(f: &ConvexFn, level: f64, x: &Vector) -> Result<Vector> {
    if f.eval(x) <= level {
        return Ok(x.clone());
    }
    match f {
        ConvexFn::Affine { linear, offset } => {
            let h = Halfspace {
                normal: linear.clone(),
                offset: level - offset,
            };
            Ok(halfspace_point(&h, x))
        }
        ConvexFn::Quadratic { quad, linear, .. } => {
            // y(mu): y_i = (x_i - mu a_i) / (1 + 2 mu q_i); f(y(mu)) is
            // decreasing in mu >= 0 toward the unconstrained minimum.
            let point_for = |mu: f64| -> Vector {
                Vector(
                    x.0.iter()
                        .zip(&quad.0)
                        .zip(&linear.0)
                        .map(|((xi, q), a)| (xi - mu * a) / (1.0 + 2.0 * mu * q))
                        .collect(),
                )
            };
            Ok(point_for(multiplier_root(|mu| f.eval(&point_for(mu)) - level)?))
        }
        ConvexFn::ExpAffine {
            coeff,
            coord,
            linear,
            ..
        } => {
            let point_for = |mu: f64| -> Vector {
                let mut y = Vector(
                    x.0.iter()
                        .zip(&linear.0)
                        .map(|(xi, a)| xi - mu * a)
                        .collect(),
                );
                // y_i + mu * c * e^{y_i} = x_i - mu * a_i: strictly increasing
                // in y_i, solved by bisection from a safe bracket.
                let target = x.0[*coord] - mu * linear.0[*coord];
                let g = |z: f64| z + mu * coeff * z.exp() - target;
                let mut hi = target.max(0.0);
                let mut lo = hi - 1.0;
                while g(lo) > 0.0 {
                    lo -= (hi - lo) * 2.0;
                    if lo < -1e8 {
                        break;
                    }
                }
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                y.0[*coord] = 0.5 * (lo + hi);
                y
            };
            Ok(point_for(multiplier_root(|mu| f.eval(&point_for(mu)) - level)?))
        }
    }
}

/// Root of a decreasing function of the KKT multiplier on [0, inf): bracket
/// by doubling, then bisect.
fn multiplier_root(excess: impl Fn(f64) -> f64) -> Result<f64> {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut guard = 0;
    while excess(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Unsupported(
                "sublevel projection multiplier failed to bracket".into(),
            ));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Corrected cyclic projections onto an intersection of parts. Converges to
/// the metric projection for closed convex parts; the correction terms are
/// what distinguishes this from plain cyclic projection.
pub fn dykstra_project(parts: &[SetExpr], x: &Vector, params: &ProjParams) -> Result<ProjectionResult> {
    if parts.is_empty() {
        return Err(Error::Unsupported("empty intersection".into()));
    }
    if parts.len() == 1 {
        return euclid_project(&parts[0], x, params);
    }
    let dim = x.dim();
    let mut y = x.clone();
    let mut corrections = vec![Vector::zeros(dim); parts.len()];
    let mut converged = false;
    let mut cycles = 0;
    while cycles < params.max_cycles {
        cycles += 1;
        let start = y.clone();
        for (i, part) in parts.iter().enumerate() {
            let shifted = y.add(&corrections[i]);
            let r = euclid_project(part, &shifted, params)?;
            corrections[i] = shifted.sub(&r.point);
            y = r.point;
        }
        if y.sub(&start).norm2() < params.tol {
            converged = true;
            break;
        }
    }
    let distance = x.sub(&y).norm2();
    Ok(ProjectionResult {
        point: y,
        distance,
        iterations: cycles,
        converged,
    })
}

fn all_halfspaces(parts: &[SetExpr]) -> Option<Vec<Halfspace>> {
    let mut out = Vec::new();
    for p in parts {
        match p {
            SetExpr::Halfspace(h) => out.push(h.clone()),
            SetExpr::PolytopeH { halfspaces } => out.extend(halfspaces.iter().cloned()),
            SetExpr::Box { lo, hi } => {
                let dim = lo.dim();
                for i in 0..dim {
                    let mut e = Vector::zeros(dim);
                    e.0[i] = 1.0;
                    out.push(Halfspace {
                        normal: e.clone(),
                        offset: hi.0[i],
                    });
                    out.push(Halfspace {
                        normal: e.scale(-1.0),
                        offset: -lo.0[i],
                    });
                }
            }
            _ => return None,
        }
    }
    Some(out)
}

/// Refine a near-projection onto a polyhedron to full accuracy: project the
/// query point onto the affine hull of the active constraints and accept the
/// candidate if it is feasible with nonnegative multipliers.
fn polish_with_halfspaces(
    halfspaces: &[Halfspace],
    x: &Vector,
    r: &mut ProjectionResult,
    tol: f64,
) {
    let active_tol = (tol.sqrt() * 10.0).max(1e-6);
    let active: Vec<&Halfspace> = halfspaces
        .iter()
        .filter(|h| {
            let scale = h.normal.norm2().max(1.0);
            (h.normal.dot(&r.point) - h.offset).abs() <= active_tol * scale
        })
        .collect();
    if active.is_empty() {
        // Interior projection: the query point itself must be feasible.
        let feasible = halfspaces.iter().all(|h| h.normal.dot(x) <= h.offset + tol);
        if feasible {
            r.point = x.clone();
            r.distance = 0.0;
            r.converged = true;
        }
        return;
    }
    let dim = x.dim();
    let m = active.len();
    let n = nalgebra::DMatrix::from_fn(m, dim, |i, j| active[i].normal.0[j]);
    let rhs = nalgebra::DVector::from_fn(m, |i, _| active[i].normal.dot(x) - active[i].offset);
    let gram = &n * n.transpose();
    let Some(chol_or_svd) = solve_spd_or_lstsq(&gram, &rhs) else {
        return;
    };
    let mu = chol_or_svd;
    // Candidate: x - N^T mu.
    let shift = n.transpose() * &mu;
    let candidate = Vector(
        x.0.iter()
            .enumerate()
            .map(|(i, xi)| xi - shift[i])
            .collect(),
    );
    let feas_ok = halfspaces
        .iter()
        .all(|h| h.normal.dot(&candidate) <= h.offset + tol.max(1e-12) * h.normal.norm2().max(1.0));
    let kkt_ok = mu.iter().all(|&m| m >= -active_tol);
    if feas_ok && kkt_ok {
        let distance = x.sub(&candidate).norm2();
        if distance <= r.distance + active_tol {
            r.point = candidate;
            r.distance = distance;
            r.converged = true;
        }
    }
}

fn solve_spd_or_lstsq(
    gram: &nalgebra::DMatrix<f64>,
    rhs: &nalgebra::DVector<f64>,
) -> Option<nalgebra::DVector<f64>> {
    if let Some(chol) = gram.clone().cholesky() {
        return Some(chol.solve(rhs));
    }
    gram.clone().svd(true, true).solve(rhs, 1e-12).ok()
}

/// Best-effort projection onto a nearest-to-sites cell: outer approximation
/// by bisector halfspaces of (nearest site, competitor projection), followed
/// by a boundary bisection toward the nearest site (which always lies in the
/// cell). `converged` is only set when the halfspace iteration stabilized.
fn voronoi_project(
    sites: &[Vector],
    competitor: &SetExpr,
    x: &Vector,
    params: &ProjParams,
) -> Result<ProjectionResult> {
    if sites.is_empty() {
        return Err(Error::Unsupported("nearest-point cell with no sites".into()));
    }
    let member = |y: &Vector| -> Result<bool> {
        let s = crate::sets::site_distance(sites, y);
        let c = euclid_project(competitor, y, params)?.distance;
        Ok(s <= c + crate::sets::MEMBERSHIP_TOL)
    };
    if member(x)? {
        return Ok(done(x, x.clone()));
    }
    let mut y = x.clone();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..params.max_cycles.min(500) {
        iterations += 1;
        let site = sites
            .iter()
            .min_by(|a, b| {
                y.sub(a)
                    .norm2()
                    .partial_cmp(&y.sub(b).norm2())
                    .unwrap()
            })
            .unwrap();
        let q = euclid_project(competitor, &y, params)?.point;
        let n = q.sub(site);
        if n.norm2() < params.tol {
            break;
        }
        // Bisector of site and q: <q - s, z> <= (|q|^2 - |s|^2)/2.
        let h = Halfspace {
            normal: n.clone(),
            offset: 0.5 * (q.dot(&q) - site.dot(site)),
        };
        let next = halfspace_point(&h, &y);
        let step = next.sub(&y).norm2();
        y = next;
        if step < params.tol {
            converged = true;
            break;
        }
    }
    // Pull into the cell along the segment toward the nearest site.
    if !member(&y)? {
        let site = sites
            .iter()
            .min_by(|a, b| y.sub(a).norm2().partial_cmp(&y.sub(b).norm2()).unwrap())
            .unwrap()
            .clone();
        let (mut lo, mut hi) = (0.0f64, 1.0f64); // y + t (site - y)
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let probe = y.add_scaled(&site.sub(&y), mid);
            if member(&probe)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        y = y.add_scaled(&site.sub(&y), hi);
        converged = false;
    }
    let distance = x.sub(&y).norm2();
    Ok(ProjectionResult {
        point: y,
        distance,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{contains, MEMBERSHIP_TOL};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn project(s: &SetExpr, x: impl Into<Vector>) -> ProjectionResult {
        euclid_project(s, &x.into(), &ProjParams::default()).unwrap()
    }

    #[test]
    fn closed_form_projections() {
        let h = SetExpr::halfspace([0.0, 1.0], 0.0);
        let r = project(&h, [3.0, 2.0]);
        assert_eq!(r.point, Vector::from([3.0, 0.0]));
        assert_relative_eq!(r.distance, 2.0);

        let b = SetExpr::axis_box([-1.0, -1.0], [1.0, 1.0]);
        assert_eq!(project(&b, [2.0, 0.5]).point, Vector::from([1.0, 0.5]));

        let ball = SetExpr::ball([0.0, 0.0], 1.0);
        let r = project(&ball, [3.0, 4.0]);
        assert_relative_eq!(r.point.0[0], 0.6, epsilon = 1e-12);
        assert_relative_eq!(r.point.0[1], 0.8, epsilon = 1e-12);
        assert_relative_eq!(r.distance, 4.0, epsilon = 1e-12);

        let seg = SetExpr::segment([-1.0, 0.0], [1.0, 0.0]);
        assert_eq!(project(&seg, [5.0, 2.0]).point, Vector::from([1.0, 0.0]));

        let aff = SetExpr::AffineSubspace {
            point: Vector::from([0.0, 0.0, 1.0]),
            basis: vec![Vector::from([1.0, 0.0, 0.0])],
        };
        let r = project(&aff, [2.0, 3.0, 5.0]);
        assert_eq!(r.point, Vector::from([2.0, 0.0, 1.0]));
    }

    #[test]
    fn sup_and_l1_ball_projections() {
        let cube = SetExpr::NormBall {
            center: Vector::from([0.0, 0.0]),
            radius: 1.0,
            norm: NormSpec::Inf,
        };
        assert_eq!(project(&cube, [2.0, -3.0]).point, Vector::from([1.0, -1.0]));

        let diamond = SetExpr::NormBall {
            center: Vector::from([0.0, 0.0]),
            radius: 1.0,
            norm: NormSpec::P(1.0),
        };
        let r = project(&diamond, [1.0, 1.0]);
        assert_relative_eq!(r.point.0[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.point.0[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ellipsoid_projection_axis_points() {
        let e = SetExpr::ellipsoid([0.0, 0.0], [2.0, 1.0]);
        let r = project(&e, [5.0, 0.0]);
        assert_relative_eq!(r.point.0[0], 2.0, epsilon = 1e-9);
        assert_relative_eq!(r.point.0[1], 0.0, epsilon = 1e-9);
        let r = project(&e, [0.0, -3.0]);
        assert_relative_eq!(r.point.0[1], -1.0, epsilon = 1e-9);
        // Interior point is a fixed point.
        let r = project(&e, [0.5, 0.2]);
        assert_eq!(r.point, Vector::from([0.5, 0.2]));
    }

    #[test]
    fn polytope_projection_hits_vertices_and_facets() {
        // Triangle x >= 0, y >= 0, x + y <= 1.
        let tri = SetExpr::PolytopeH {
            halfspaces: vec![
                Halfspace {
                    normal: Vector::from([-1.0, 0.0]),
                    offset: 0.0,
                },
                Halfspace {
                    normal: Vector::from([0.0, -1.0]),
                    offset: 0.0,
                },
                Halfspace {
                    normal: Vector::from([1.0, 1.0]),
                    offset: 1.0,
                },
            ],
        };
        let r = project(&tri, [2.0, 2.0]);
        assert_relative_eq!(r.point.0[0], 0.5, epsilon = 1e-9);
        assert_relative_eq!(r.point.0[1], 0.5, epsilon = 1e-9);
        let r = project(&tri, [-1.0, -1.0]);
        assert!(r.point.norm2() < 1e-9, "vertex projection, got {:?}", r.point);
        let r = project(&tri, [1.0, 1.0]);
        assert_relative_eq!(r.point.0[0], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn cylinder_projection() {
        // Infinite ball-cylinder around the x1 axis, radius 1.
        let cyl = SetExpr::Cylinder {
            cross_section: Box::new(SetExpr::ball([0.0, 0.0, 0.0], 1.0)),
            axis_point: Vector::from([0.0, 0.0, 0.0]),
            axis_dir: Vector::from([1.0, 0.0, 0.0]),
            extent: Extent::FullLine,
        };
        let r = project(&cyl, [5.0, 0.0, 3.0]);
        assert_relative_eq!(r.point.0[0], 5.0, epsilon = 1e-12);
        assert_relative_eq!(r.point.0[2], 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.distance, 2.0, epsilon = 1e-12);

        // Capped extent clamps the axial coordinate.
        let capped = SetExpr::Cylinder {
            cross_section: Box::new(SetExpr::ball([0.0, 0.0, 0.0], 1.0)),
            axis_point: Vector::from([0.0, 0.0, 0.0]),
            axis_dir: Vector::from([1.0, 0.0, 0.0]),
            extent: Extent::Range { lo: -1.0, hi: 1.0 },
        };
        let r = project(&capped, [5.0, 0.5, 0.0]);
        assert_relative_eq!(r.point.0[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.point.0[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn sublevel_projection_exponential() {
        // {x : e^{x1} + 1 - x2 <= 0}.
        let s = SetExpr::SublevelSet {
            f: ConvexFn::ExpAffine {
                coeff: 1.0,
                coord: 0,
                linear: Vector::from([0.0, -1.0]),
                offset: 1.0,
            },
            level: 0.0,
        };
        let r = project(&s, [0.0, 0.0]);
        // Boundary residual must vanish and the step must be normal to the
        // boundary gradient... verified via the variational inequality below.
        assert!(contains(&s, &r.point, 1e-7).unwrap());
        let g = Vector::from([r.point.0[0].exp(), -1.0]);
        let step = Vector::from([0.0, 0.0]).sub(&r.point);
        let cosine = step.dot(&g) / (step.norm2() * g.norm2());
        assert!(
            (cosine.abs() - 1.0).abs() < 1e-5,
            "projection step not normal to boundary: cosine {cosine}"
        );
    }

    #[test]
    fn dykstra_matches_closed_form_on_quadrant_ball() {
        // Intersection of the unit ball with the nonnegative quadrant;
        // projection of (-0.5, 2) is (0, 1).
        let parts = vec![
            SetExpr::ball([0.0, 0.0], 1.0),
            SetExpr::halfspace([-1.0, 0.0], 0.0),
            SetExpr::halfspace([0.0, -1.0], 0.0),
        ];
        let r = dykstra_project(&parts, &Vector::from([-0.5, 2.0]), &ProjParams::default())
            .unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.point.0[0], 0.0, epsilon = 1e-7);
        assert_relative_eq!(r.point.0[1], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn voronoi_cell_projection_two_sites() {
        // Sites on the left, competitor a point on the right: the cell is the
        // halfplane x1 <= 0 here.
        let cell = SetExpr::VoronoiCell {
            sites: vec![Vector::from([-1.0, 0.0])],
            competitor: Box::new(SetExpr::segment([1.0, 0.0], [1.0, 0.0])),
        };
        let r = project(&cell, [2.0, 0.0]);
        assert!(
            r.point.0[0].abs() < 1e-6,
            "expected bisector point, got {:?}",
            r.point
        );
        assert!(contains(&cell, &r.point, MEMBERSHIP_TOL).unwrap());
    }

    proptest! {
        // The variational inequality <x - Px, y - Px> <= 0 for members y
        // characterizes the metric projection; check it against random
        // queries and random member probes.
        #[test]
        fn projection_variational_inequality(
            q in proptest::collection::vec(-5.0f64..5.0, 2),
            probe in proptest::collection::vec(-5.0f64..5.0, 2),
            which in 0usize..5,
        ) {
            let sets = [
                SetExpr::ball([0.3, -0.2], 1.2),
                SetExpr::ellipsoid([0.0, 0.5], [2.0, 0.7]),
                SetExpr::axis_box([-1.0, -0.5], [0.5, 1.5]),
                SetExpr::halfspace([1.0, 2.0], 1.0),
                SetExpr::PolytopeH { halfspaces: vec![
                    Halfspace { normal: Vector::from([-1.0, 0.0]), offset: 0.0 },
                    Halfspace { normal: Vector::from([0.0, -1.0]), offset: 0.0 },
                    Halfspace { normal: Vector::from([1.0, 1.0]), offset: 1.0 },
                ]},
            ];
            let s = &sets[which];
            let x = Vector(q);
            let px = euclid_project(s, &x, &ProjParams::default()).unwrap().point;
            prop_assert!(contains(s, &px, 1e-6).unwrap());
            // Map the probe into the set first.
            let y = euclid_project(s, &Vector(probe), &ProjParams::default()).unwrap().point;
            let lhs = x.sub(&px).dot(&y.sub(&px));
            prop_assert!(lhs <= 1e-6 * (1.0 + x.norm2()), "variational inequality violated: {lhs}");
        }

        #[test]
        fn lp_ball_projection_lands_on_sphere(
            q in proptest::collection::vec(-4.0f64..4.0, 3),
            p in 1.2f64..6.0,
        ) {
            let norm = NormSpec::P(p);
            let x = Vector(q);
            prop_assume!(norm_eval(norm, &x) > 1.1);
            let ball = SetExpr::NormBall {
                center: Vector::zeros(3),
                radius: 1.0,
                norm,
            };
            let px = euclid_project(&ball, &x, &ProjParams::default()).unwrap().point;
            prop_assert!((norm_eval(norm, &px) - 1.0).abs() < 1e-7);
            // No interior point on the segment [px, x] may be closer.
            let mid = px.add_scaled(&x.sub(&px), 0.01);
            prop_assert!(norm_eval(norm, &mid) > 1.0 - 1e-9);
        }
    }
}
