//! Brute-force grid verification: distance estimates with a provable
//! Lipschitz error bound, near-optimal pair enumeration, multiplicity
//! clustering, and detection of segment-shaped solution sets.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{norm_eval, NormSpec, Segment, Vector};
use crate::sets::{contains_with_slack, is_boundary_point, SetExpr};

/// Hard cap on the number of bbox grid points.
pub const GRID_BUDGET: u128 = 100_000_000;
/// Near-optimal pairs kept in a report.
pub const MAX_PAIRS: usize = 200_000;

#[derive(Clone, Copy, Debug)]
pub struct GridBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub dim: usize,
}

impl GridBox {
    pub fn new_2d(lo: [f64; 2], hi: [f64; 2]) -> GridBox {
        GridBox {
            lo: [lo[0], lo[1], 0.0],
            hi: [hi[0], hi[1], 0.0],
            dim: 2,
        }
    }

    pub fn new_3d(lo: [f64; 3], hi: [f64; 3]) -> GridBox {
        GridBox { lo, hi, dim: 3 }
    }

    pub fn from_vectors(lo: &Vector, hi: &Vector) -> Result<GridBox> {
        let dim = lo.dim();
        if dim < 2 || dim > 3 || hi.dim() != dim {
            return Err(Error::Unsupported(
                "the grid oracle supports dimensions 2 and 3".into(),
            ));
        }
        let mut b = GridBox {
            lo: [0.0; 3],
            hi: [0.0; 3],
            dim,
        };
        for i in 0..dim {
            b.lo[i] = lo.0[i];
            b.hi[i] = hi.0[i];
        }
        Ok(b)
    }
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub dist_estimate: f64,
    pub resolution: f64,
    /// Member pairs within `dist_estimate + 2 * resolution`.
    pub optimal_pairs: Vec<(Vector, Vector)>,
    pub cluster_count: usize,
    /// Fitted (A-side, B-side) segments when the optimal pairs trace out a
    /// one-parameter family.
    pub segment_fit: Option<(Segment, Segment)>,
    /// Set when a set reaches the bbox shell (the grid clipped it).
    pub clipped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MembershipMode {
    Closed,
    /// Strict-interior proxy for open sets (used by the closure-identity
    /// check).
    OpenProxy,
}

struct GridPoints {
    points: Vec<Vector>,
    clipped: bool,
}

fn check_budget(bbox: &GridBox, resolution: f64) -> Result<()> {
    if resolution <= 0.0 {
        return Err(Error::ParamOutOfRange {
            name: "resolution",
            value: resolution,
            range: "(0, inf)",
        });
    }
    if bbox.dim == 3 {
        if resolution < 0.02 {
            return Err(Error::ParamOutOfRange {
                name: "resolution",
                value: resolution,
                range: "[0.02, inf) in dimension 3",
            });
        }
        for i in 0..3 {
            if bbox.hi[i] - bbox.lo[i] > 8.0 {
                return Err(Error::ParamOutOfRange {
                    name: "bbox side",
                    value: bbox.hi[i] - bbox.lo[i],
                    range: "(0, 8] in dimension 3",
                });
            }
        }
    }
    let mut total: u128 = 1;
    for i in 0..bbox.dim {
        let n = ((bbox.hi[i] - bbox.lo[i]) / resolution).floor() as u128 + 1;
        total = total.saturating_mul(n);
    }
    if total > GRID_BUDGET {
        let factor = (total as f64 / GRID_BUDGET as f64).powf(1.0 / bbox.dim as f64);
        return Err(Error::GridBudgetExceeded {
            points: total,
            suggested_resolution: resolution * factor * 1.01,
        });
    }
    Ok(())
}

fn collect_members(
    s: &SetExpr,
    bbox: &GridBox,
    resolution: f64,
    mode: MembershipMode,
) -> Result<GridPoints> {
    let slack = match mode {
        MembershipMode::Closed => crate::sets::MEMBERSHIP_TOL,
        MembershipMode::OpenProxy => -crate::sets::MEMBERSHIP_TOL,
    };
    let dim = bbox.dim;
    let counts: Vec<usize> = (0..dim)
        .map(|i| ((bbox.hi[i] - bbox.lo[i]) / resolution).floor() as usize + 1)
        .collect();
    let mut points = Vec::new();
    let mut clipped = false;
    let mut idx = vec![0usize; dim];
    loop {
        let p = Vector(
            (0..dim)
                .map(|i| bbox.lo[i] + idx[i] as f64 * resolution)
                .collect(),
        );
        if contains_with_slack(s, &p, slack)? {
            let on_shell = (0..dim).any(|i| idx[i] == 0 || idx[i] + 1 == counts[i]);
            clipped |= on_shell;
            points.push(p);
        }
        // advance the multi-index
        let mut i = 0;
        loop {
            if i == dim {
                return Ok(GridPoints { points, clipped });
            }
            idx[i] += 1;
            if idx[i] < counts[i] {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn cell_key(p: &Vector, cell: f64) -> [i64; 3] {
    let mut k = [0i64; 3];
    for (i, c) in p.0.iter().enumerate().take(3) {
        k[i] = (c / cell).floor() as i64;
    }
    k
}

struct Buckets {
    cell: f64,
    dim: usize,
    map: HashMap<[i64; 3], Vec<usize>>,
}

impl Buckets {
    fn build(points: &[Vector], cell: f64, dim: usize) -> Buckets {
        let mut map: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            map.entry(cell_key(p, cell)).or_default().push(i);
        }
        Buckets { cell, dim, map }
    }

    /// Indices of points whose sup-distance to `p` can be at most `radius`.
    fn candidates<'a>(&'a self, p: &Vector, radius: f64) -> impl Iterator<Item = usize> + 'a {
        let base = cell_key(p, self.cell);
        let span = (radius / self.cell).ceil() as i64 + 1;
        let dim = self.dim;
        let ranges: Vec<std::ops::RangeInclusive<i64>> = (0..3)
            .map(|i| {
                if i < dim {
                    (base[i] - span)..=(base[i] + span)
                } else {
                    0..=0
                }
            })
            .collect();
        let mut keys = Vec::new();
        for x in ranges[0].clone() {
            for y in ranges[1].clone() {
                for z in ranges[2].clone() {
                    keys.push([x, y, z]);
                }
            }
        }
        keys.into_iter()
            .filter_map(move |k| self.map.get(&k))
            .flatten()
            .copied()
    }
}

/// Minimum of `norm` over all member-pair combinations of the two grids,
/// using sup-norm bucket pruning (valid because every lp norm dominates the
/// sup norm).
fn min_pair_distance(
    a_pts: &[Vector],
    b_pts: &[Vector],
    norm: NormSpec,
    dim: usize,
    resolution: f64,
) -> Option<f64> {
    if a_pts.is_empty() || b_pts.is_empty() {
        return None;
    }
    let cell = (resolution * 8.0).max(1e-9);
    let buckets = Buckets::build(b_pts, cell, dim);
    // Initial upper bound from a coarse subsample.
    let stride_a = (a_pts.len() / 1000).max(1);
    let stride_b = (b_pts.len() / 1000).max(1);
    let mut best = f64::INFINITY;
    for a in a_pts.iter().step_by(stride_a) {
        for b in b_pts.iter().step_by(stride_b) {
            best = best.min(norm_eval(norm, &a.sub(b)));
        }
    }
    for a in a_pts {
        // Any pair beating `best` is within sup-distance `best` of `a`.
        let mut local = best;
        for j in buckets.candidates(a, local) {
            let d = norm_eval(norm, &a.sub(&b_pts[j]));
            if d < local {
                local = d;
            }
        }
        best = best.min(local);
    }
    Some(best)
}

fn collect_near_optimal(
    a_pts: &[Vector],
    b_pts: &[Vector],
    norm: NormSpec,
    dim: usize,
    resolution: f64,
    threshold: f64,
) -> Vec<(Vector, Vector)> {
    let cell = (resolution * 8.0).max(1e-9);
    let buckets = Buckets::build(b_pts, cell, dim);
    let mut pairs = Vec::new();
    for a in a_pts {
        for j in buckets.candidates(a, threshold) {
            let d = norm_eval(norm, &a.sub(&b_pts[j]));
            if d <= threshold {
                pairs.push((a.clone(), b_pts[j].clone()));
                if pairs.len() >= MAX_PAIRS {
                    return pairs;
                }
            }
        }
    }
    pairs
}

/// Union-find clustering of pairs in the product metric with threshold
/// 5 * resolution, accelerated by product-space grid hashing.
fn cluster_pairs(pairs: &[(Vector, Vector)], dim: usize, resolution: f64) -> (usize, Vec<usize>) {
    let n = pairs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    let threshold = 5.0 * resolution;
    let cell = threshold;
    let mut map: HashMap<[i64; 6], Vec<usize>> = HashMap::new();
    let key_of = |pair: &(Vector, Vector)| -> [i64; 6] {
        let mut k = [0i64; 6];
        for (i, c) in pair.0 .0.iter().enumerate().take(3) {
            k[i] = (c / cell).floor() as i64;
        }
        for (i, c) in pair.1 .0.iter().enumerate().take(3) {
            k[3 + i] = (c / cell).floor() as i64;
        }
        k
    };
    for (i, pair) in pairs.iter().enumerate() {
        map.entry(key_of(pair)).or_default().push(i);
    }
    let close = |x: &(Vector, Vector), y: &(Vector, Vector)| -> bool {
        x.0.sub(&y.0).norm2().max(x.1.sub(&y.1).norm2()) <= threshold
    };
    // Offsets over the 2*dim product dimensions.
    let active = 2 * dim;
    let mut offsets: Vec<[i64; 6]> = vec![[0; 6]];
    for axis in 0..active {
        let axis = if axis < dim { axis } else { 3 + (axis - dim) };
        let mut next = Vec::new();
        for off in &offsets {
            for d in -1..=1i64 {
                let mut o = *off;
                o[axis] = d;
                next.push(o);
            }
        }
        offsets = next;
    }
    for (i, pair) in pairs.iter().enumerate() {
        let base = key_of(pair);
        for off in &offsets {
            let mut k = base;
            for t in 0..6 {
                k[t] += off[t];
            }
            if let Some(list) = map.get(&k) {
                for &j in list {
                    if j <= i {
                        continue;
                    }
                    if close(pair, &pairs[j]) {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri] = rj;
                        }
                    }
                }
            }
        }
    }
    let mut labels = vec![0usize; n];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let label = match reps.iter().position(|&x| x == r) {
            Some(l) => l,
            None => {
                reps.push(r);
                reps.len() - 1
            }
        };
        labels[i] = label;
    }
    (reps.len(), labels)
}

/// Principal-direction segment fit: centroid plus dominant direction of the
/// centered points, spanning the observed parameter range.
fn fit_line(points: &[&Vector]) -> Option<(Vector, Vector, f64, f64, f64)> {
    let n = points.len();
    if n == 0 {
        return None;
    }
    let dim = points[0].dim();
    let mut centroid = Vector::zeros(dim);
    for p in points {
        centroid = centroid.add(p);
    }
    let centroid = centroid.scale(1.0 / n as f64);
    let centered: Vec<Vector> = points.iter().map(|p| p.sub(&centroid)).collect();
    let spread = centered.iter().map(|c| c.norm2()).fold(0.0f64, f64::max);
    if spread == 0.0 {
        return Some((centroid, Vector::zeros(dim), 0.0, 0.0, 0.0));
    }
    let basis = crate::linalg::orthonormal_basis(&centered, 1e-12);
    let dir = basis.first()?.clone();
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    let mut residual = 0.0f64;
    for c in &centered {
        let t = c.dot(&dir);
        t_min = t_min.min(t);
        t_max = t_max.max(t);
        residual = residual.max(c.add_scaled(&dir, -t).norm2());
    }
    Some((centroid, dir, t_min, t_max, residual))
}

fn segment_fit(
    pairs: &[(Vector, Vector)],
    resolution: f64,
) -> Option<(Segment, Segment)> {
    if pairs.len() < 8 {
        return None;
    }
    let a_points: Vec<&Vector> = pairs.iter().map(|p| &p.0).collect();
    let b_points: Vec<&Vector> = pairs.iter().map(|p| &p.1).collect();
    let (ac, ad, a_min, a_max, a_res) = fit_line(&a_points)?;
    let (bc, bd, b_min, b_max, b_res) = fit_line(&b_points)?;
    if a_res > 2.0 * resolution || b_res > 2.0 * resolution {
        return None;
    }
    let a_span = a_max - a_min;
    let b_span = b_max - b_min;
    if a_span.max(b_span) <= 5.0 * resolution {
        return None; // single cluster of pairs, not a segment family
    }
    let seg_a = Segment {
        a0: ac.add_scaled(&ad, a_min),
        a1: ac.add_scaled(&ad, a_max),
    };
    let seg_b = if b_span <= 2.0 * resolution {
        Segment {
            a0: bc.clone(),
            a1: bc,
        }
    } else {
        Segment {
            a0: bc.add_scaled(&bd, b_min),
            a1: bc.add_scaled(&bd, b_max),
        }
    };
    Some((seg_a, seg_b))
}

fn grid_report(
    a: &SetExpr,
    b: &SetExpr,
    norm: NormSpec,
    bbox: &GridBox,
    resolution: f64,
    mode: MembershipMode,
) -> Result<OracleReport> {
    check_budget(bbox, resolution)?;
    let ga = collect_members(a, bbox, resolution, mode)?;
    let gb = collect_members(b, bbox, resolution, mode)?;
    let dist = min_pair_distance(&ga.points, &gb.points, norm, bbox.dim, resolution)
        .ok_or_else(|| Error::Unsupported("a set has no grid points inside the bbox".into()))?;
    let pairs = collect_near_optimal(
        &ga.points,
        &gb.points,
        norm,
        bbox.dim,
        resolution,
        dist + 2.0 * resolution,
    );
    let (cluster_count, _labels) = cluster_pairs(&pairs, bbox.dim, resolution);
    let fit = segment_fit(&pairs, resolution);
    Ok(OracleReport {
        dist_estimate: dist,
        resolution,
        optimal_pairs: pairs,
        cluster_count,
        segment_fit: fit,
        clipped: ga.clipped || gb.clipped,
    })
}

/// Grid-based distance between the member points of `a` and `b` inside the
/// bbox, with near-optimal pair enumeration and clustering.
pub fn grid_min_distance(
    a: &SetExpr,
    b: &SetExpr,
    norm: NormSpec,
    bbox: &GridBox,
    resolution: f64,
) -> Result<OracleReport> {
    grid_report(a, b, norm, bbox, resolution, MembershipMode::Closed)
}

/// Same estimate with the strict-interior membership proxy; comparing the two
/// checks that passing to closures leaves the distance unchanged.
pub fn grid_min_distance_open(
    a: &SetExpr,
    b: &SetExpr,
    norm: NormSpec,
    bbox: &GridBox,
    resolution: f64,
) -> Result<OracleReport> {
    grid_report(a, b, norm, bbox, resolution, MembershipMode::OpenProxy)
}

#[derive(Clone, Debug)]
pub struct BoundaryIdentityReport {
    pub holds: bool,
    pub full_estimate: f64,
    pub boundary_estimate: Option<f64>,
    pub disjoint: bool,
    pub note: String,
}

/// Check that the distance between the sets equals the distance between
/// their boundaries, on the grid, within 3 * resolution.
pub fn verify_boundary_identity(
    a: &SetExpr,
    b: &SetExpr,
    norm: NormSpec,
    bbox: &GridBox,
    resolution: f64,
) -> Result<BoundaryIdentityReport> {
    check_budget(bbox, resolution)?;
    let ga = collect_members(a, bbox, resolution, MembershipMode::Closed)?;
    let gb = collect_members(b, bbox, resolution, MembershipMode::Closed)?;
    let full = min_pair_distance(&ga.points, &gb.points, norm, bbox.dim, resolution)
        .ok_or_else(|| Error::Unsupported("a set has no grid points inside the bbox".into()))?;
    if full <= 2.0 * resolution {
        return Ok(BoundaryIdentityReport {
            holds: true,
            full_estimate: full,
            boundary_estimate: None,
            disjoint: false,
            note: "sets overlap at grid resolution; the disjointness precondition fails, \
                   identity not asserted"
                .into(),
        });
    }
    let boundary_tol = resolution;
    let filter = |s: &SetExpr, pts: &[Vector]| -> Result<Vec<Vector>> {
        let mut out = Vec::new();
        for p in pts {
            if is_boundary_point(s, p, boundary_tol).unwrap_or(false) {
                out.push(p.clone());
            }
        }
        Ok(out)
    };
    let ba = filter(a, &ga.points)?;
    let bb = filter(b, &gb.points)?;
    let boundary = min_pair_distance(&ba, &bb, norm, bbox.dim, resolution)
        .ok_or_else(|| Error::Unsupported("no boundary-layer grid points found".into()))?;
    let holds = (boundary - full).abs() <= 3.0 * resolution;
    Ok(BoundaryIdentityReport {
        holds,
        full_estimate: full,
        boundary_estimate: Some(boundary),
        disjoint: true,
        note: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincident_singleton_points() {
        // A = B = one grid-aligned point: distance 0, a single pair.
        let a = SetExpr::segment([1.0, 1.0], [1.0, 1.0]);
        let b = a.clone();
        let bbox = GridBox::new_2d([0.0, 0.0], [2.0, 2.0]);
        let r = grid_min_distance(&a, &b, NormSpec::EUCLIDEAN, &bbox, 0.5).unwrap();
        assert_eq!(r.dist_estimate, 0.0);
        assert_eq!(r.cluster_count, 1);
    }

    #[test]
    fn two_boxes_known_distance() {
        let a = SetExpr::axis_box([-2.0, -1.0], [-1.0, 1.0]);
        let b = SetExpr::axis_box([1.0, -1.0], [2.0, 1.0]);
        let bbox = GridBox::new_2d([-2.5, -1.5], [2.5, 1.5]);
        let r = grid_min_distance(&a, &b, NormSpec::EUCLIDEAN, &bbox, 0.05).unwrap();
        assert!((r.dist_estimate - 2.0).abs() <= 2.0 * 0.05 * 2.0_f64.sqrt());
        assert!(!r.clipped);
        // The facing facets are both vertical: the optimal pairs trace out a
        // segment family.
        assert!(r.segment_fit.is_some());
    }

    #[test]
    fn budget_guard_fires() {
        let bbox = GridBox::new_2d([-100.0, -100.0], [100.0, 100.0]);
        let a = SetExpr::ball([0.0, 0.0], 1.0);
        let err = grid_min_distance(&a, &a, NormSpec::EUCLIDEAN, &bbox, 1e-4);
        match err {
            Err(Error::GridBudgetExceeded {
                suggested_resolution,
                ..
            }) => assert!(suggested_resolution > 1e-4),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn boundary_identity_on_disjoint_and_overlapping() {
        let a = SetExpr::axis_box([-2.0, -1.0], [-1.0, 1.0]);
        let b = SetExpr::ball([1.5, 0.0], 0.5);
        let bbox = GridBox::new_2d([-2.5, -1.5], [2.5, 1.5]);
        let r =
            verify_boundary_identity(&a, &b, NormSpec::EUCLIDEAN, &bbox, 0.05).unwrap();
        assert!(r.disjoint && r.holds);

        let b = SetExpr::axis_box([-1.5, -1.0], [0.0, 1.0]);
        let r =
            verify_boundary_identity(&a, &b, NormSpec::EUCLIDEAN, &bbox, 0.05).unwrap();
        assert!(!r.disjoint);
        assert!(r.note.contains("disjointness"));
    }

    #[test]
    fn clipped_flag_for_unbounded_set() {
        let a = SetExpr::halfspace([1.0, 0.0], -1.0);
        let b = SetExpr::ball([2.0, 0.0], 0.5);
        let bbox = GridBox::new_2d([-3.0, -1.0], [3.0, 1.0]);
        let r = grid_min_distance(&a, &b, NormSpec::EUCLIDEAN, &bbox, 0.1).unwrap();
        assert!(r.clipped);
        assert!((r.dist_estimate - 2.5).abs() <= 0.3);
    }
}
