//! Iterative solvers for best approximation pairs: alternating projections,
//! an anchored simultaneous scheme, a projected subgradient method for
//! non-Euclidean norms, and a clustering multistart driver.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{norm_eval, NormSpec, Vector};
use crate::projections::{euclid_project, ProjParams};
use crate::sets::{contains, SetExpr};

/// Step-size rule for the subgradient solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// c / sqrt(k) with c taken from the initial distance estimate.
    Diminishing,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverParams {
    /// Stop when the iterate displacement per sweep drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub step_schedule: StepSchedule,
    /// Iterates beyond this Euclidean norm are declared divergent.
    pub blowup_radius: f64,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            tol: 1e-9,
            max_iter: 20_000,
            step_schedule: StepSchedule::Diminishing,
            blowup_radius: 1e6,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BapResult {
    pub a: Vector,
    pub b: Vector,
    /// Distance between `a` and `b` in the problem norm.
    pub distance: f64,
    pub iterations: usize,
    /// Final per-sweep displacement of the iterates.
    pub residual: f64,
    pub converged: bool,
    /// Set when the iterates blow up or drift along a joint recession
    /// direction without converging (the infimum is then suspected
    /// unattained).
    pub diverging: bool,
    /// Distance after each sweep.
    pub trace: Vec<f64>,
}

fn proj_params(params: &SolverParams) -> ProjParams {
    ProjParams {
        tol: (params.tol * 0.1).min(1e-10),
        max_cycles: 10_000,
    }
}

/// Alternating metric projections a <- P_A(b), b <- P_B(a). Euclidean only:
/// the scheme solves the problem in the norm the projections minimize.
pub fn alternating_projections(
    set_a: &SetExpr,
    set_b: &SetExpr,
    norm: NormSpec,
    start: &Vector,
    params: &SolverParams,
) -> Result<BapResult> {
    if !norm.is_euclidean() {
        return Err(Error::NonEuclideanNorm);
    }
    let pp = proj_params(params);
    let mut b = euclid_project(set_b, start, &pp)?.point;
    let mut a = euclid_project(set_a, &b, &pp)?.point;
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut diverging = false;
    let mut iterations = 0;
    let mut mid_a: Option<Vector> = None;
    let mut mid_b: Option<Vector> = None;
    while iterations < params.max_iter {
        iterations += 1;
        let prev_a = a.clone();
        let prev_b = b.clone();
        b = euclid_project(set_b, &a, &pp)?.point;
        a = euclid_project(set_a, &b, &pp)?.point;
        trace.push(a.sub(&b).norm2());
        residual = a.sub(&prev_a).norm2() + b.sub(&prev_b).norm2();
        if a.norm2() > params.blowup_radius || b.norm2() > params.blowup_radius {
            diverging = true;
            break;
        }
        if iterations == params.max_iter / 2 {
            mid_a = Some(a.clone());
            mid_b = Some(b.clone());
        }
        if residual < params.tol {
            converged = true;
            break;
        }
    }
    if !converged && !diverging {
        if let (Some(ma), Some(mb)) = (mid_a, mid_b) {
            diverging = recession_drift(set_a, &a, &ma) && recession_drift(set_b, &b, &mb);
        }
    }
    let distance = a.sub(&b).norm2();
    Ok(BapResult {
        a,
        b,
        distance,
        iterations,
        residual,
        converged,
        diverging,
        trace,
    })
}

/// Heuristic test for drift along a recession direction: take the direction
/// the iterate moved over the second half of the run, drop negligible
/// components, and check that marching far along it stays in the set.
fn recession_drift(set: &SetExpr, end: &Vector, mid: &Vector) -> bool {
    let drift = end.sub(mid);
    if drift.norm2() < 1e-6 {
        return false;
    }
    let Some(mut d) = drift.normalized() else {
        return false;
    };
    let cap = d.0.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for c in d.0.iter_mut() {
        if c.abs() < 1e-3 * cap {
            *c = 0.0;
        }
    }
    let Some(d) = d.normalized() else {
        return false;
    };
    [1.0, 10.0, 100.0].iter().all(|&t| {
        contains(set, &end.add_scaled(&d, t), crate::sets::MEMBERSHIP_TOL).unwrap_or(false)
    })
}

/// Averaged projection onto the parts of an intersection, pulled toward an
/// anchor with weight `lambda`.
fn averaged_step(
    parts: &[SetExpr],
    x: &Vector,
    anchor: &Vector,
    lambda: f64,
    pp: &ProjParams,
) -> Result<Vector> {
    let mut avg = Vector::zeros(x.dim());
    for p in parts {
        avg = avg.add(&euclid_project(p, x, pp)?.point);
    }
    let avg = avg.scale(1.0 / parts.len() as f64);
    Ok(anchor.scale(lambda).add(&avg.scale(1.0 - lambda)))
}

/// Simplified anchored simultaneous scheme for intersections: each half-step
/// averages the projections onto the parts of one side and pulls toward the
/// anchor with a vanishing weight 1/(k+1), forcing convergence to a definite
/// pair.
pub fn simultaneous_projection_solve(
    a_parts: &[SetExpr],
    b_parts: &[SetExpr],
    anchor: &Vector,
    params: &SolverParams,
) -> Result<BapResult> {
    if a_parts.is_empty() || b_parts.is_empty() {
        return Err(Error::Unsupported("empty intersection".into()));
    }
    let pp = proj_params(params);
    let set_a = if a_parts.len() == 1 {
        a_parts[0].clone()
    } else {
        SetExpr::Intersection {
            parts: a_parts.to_vec(),
        }
    };
    let set_b = if b_parts.len() == 1 {
        b_parts[0].clone()
    } else {
        SetExpr::Intersection {
            parts: b_parts.to_vec(),
        }
    };
    let mut a = euclid_project(&set_a, anchor, &pp)?.point;
    let mut b = euclid_project(&set_b, anchor, &pp)?.point;
    let anchor_a = a.clone();
    let anchor_b = b.clone();
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut diverging = false;
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        let lambda = 1.0 / (iterations as f64 + 1.0);
        let next_a = averaged_step(a_parts, &b, &anchor_a, lambda, &pp)?;
        let next_b = averaged_step(b_parts, &next_a, &anchor_b, lambda, &pp)?;
        residual = next_a.sub(&a).norm2() + next_b.sub(&b).norm2();
        a = next_a;
        b = next_b;
        trace.push(a.sub(&b).norm2());
        if a.norm2() > params.blowup_radius || b.norm2() > params.blowup_radius {
            diverging = true;
            break;
        }
        if residual < params.tol {
            converged = true;
            break;
        }
    }
    // The averaged, anchored iterates sit slightly off the sets; snap on.
    a = euclid_project(&set_a, &a, &pp)?.point;
    b = euclid_project(&set_b, &b, &pp)?.point;
    let distance = a.sub(&b).norm2();
    Ok(BapResult {
        a,
        b,
        distance,
        iterations,
        residual,
        converged,
        diverging,
        trace,
    })
}

/// Subgradient of the lp norm at `v` (any nonzero subgradient for the
/// nonsmooth cases; ties in the sup norm break toward the smallest index).
fn norm_subgradient(norm: NormSpec, v: &Vector) -> Vector {
    let n = norm_eval(norm, v);
    if n == 0.0 {
        return Vector::zeros(v.dim());
    }
    match norm {
        NormSpec::P(p) if p == 1.0 => Vector(v.0.iter().map(|c| c.signum()).collect()),
        NormSpec::P(p) => Vector(
            v.0.iter()
                .map(|c| c.signum() * (c.abs() / n).powf(p - 1.0))
                .collect(),
        ),
        NormSpec::Inf => {
            let j = v
                .0
                .iter()
                .enumerate()
                .filter(|(_, c)| c.abs() == n)
                .map(|(i, _)| i)
                .next()
                .unwrap_or(0);
            let mut g = Vector::zeros(v.dim());
            g.0[j] = v.0[j].signum();
            g
        }
    }
}

/// Projected subgradient descent on (a, b) -> ||a - b|| in an arbitrary lp
/// norm, with a diminishing step c / sqrt(k). Returns the best pair seen.
pub fn general_norm_descent(
    set_a: &SetExpr,
    set_b: &SetExpr,
    norm: NormSpec,
    x0: &Vector,
    y0: &Vector,
    params: &SolverParams,
) -> Result<BapResult> {
    let pp = proj_params(params);
    let mut a = euclid_project(set_a, x0, &pp)?.point;
    let mut b = euclid_project(set_b, y0, &pp)?.point;
    let step_scale = match params.step_schedule {
        StepSchedule::Constant(c) => c,
        StepSchedule::Diminishing => norm_eval(norm, &a.sub(&b)).max(1.0),
    };
    let mut best_a = a.clone();
    let mut best_b = b.clone();
    let mut best = norm_eval(norm, &a.sub(&b));
    let mut trace = vec![best];
    let mut converged = false;
    let mut diverging = false;
    let mut iterations = 0;
    let mut window_best = best;
    let mut window_start = 0usize;
    let window = 100;
    while iterations < params.max_iter {
        iterations += 1;
        let v = a.sub(&b);
        let g = norm_subgradient(norm, &v);
        let alpha = match params.step_schedule {
            StepSchedule::Constant(c) => c,
            StepSchedule::Diminishing => step_scale / (iterations as f64).sqrt(),
        };
        a = euclid_project(set_a, &a.add_scaled(&g, -alpha), &pp)?.point;
        b = euclid_project(set_b, &b.add_scaled(&g, alpha), &pp)?.point;
        let d = norm_eval(norm, &a.sub(&b));
        if d < best {
            best = d;
            best_a = a.clone();
            best_b = b.clone();
        }
        trace.push(best);
        if a.norm2() > params.blowup_radius || b.norm2() > params.blowup_radius {
            diverging = true;
            break;
        }
        if iterations - window_start >= window {
            if window_best - best < params.tol.max(1e-12) * (1.0 + best) {
                converged = true;
                break;
            }
            window_best = best;
            window_start = iterations;
        }
    }
    let residual = window_best - best;
    Ok(BapResult {
        a: best_a,
        b: best_b,
        distance: best,
        iterations,
        residual: residual.max(0.0),
        converged,
        diverging,
        trace,
    })
}

/// Solve with the scheme appropriate for the norm.
pub fn solve_bap(
    set_a: &SetExpr,
    set_b: &SetExpr,
    norm: NormSpec,
    start: &Vector,
    params: &SolverParams,
) -> Result<BapResult> {
    if norm.is_euclidean() {
        alternating_projections(set_a, set_b, norm, start, params)
    } else {
        general_norm_descent(set_a, set_b, norm, start, start, params)
    }
}

#[derive(Clone, Debug)]
pub struct MultistartResult {
    pub runs: Vec<BapResult>,
    /// One representative run per cluster of distinct solutions.
    pub clusters: Vec<BapResult>,
    pub distinct_count: usize,
    /// Whether all clusters share the same difference vector a - b (expected
    /// whenever the solution set is a segment of translates).
    pub common_difference: bool,
}

/// Run the solver from several seeded starts and cluster the outcomes.
pub fn multistart_bap(
    set_a: &SetExpr,
    set_b: &SetExpr,
    norm: NormSpec,
    starts: usize,
    params: &SolverParams,
) -> Result<MultistartResult> {
    let dim = set_a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut runs = Vec::new();
    for k in 0..starts.max(1) {
        let start = if k == 0 {
            Vector::zeros(dim)
        } else {
            Vector((0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect())
        };
        runs.push(solve_bap(set_a, set_b, norm, &start, params)?);
    }
    let usable: Vec<usize> = (0..runs.len()).filter(|&i| runs[i].converged).collect();
    let pool: Vec<usize> = if usable.is_empty() {
        (0..runs.len()).collect()
    } else {
        usable
    };

    // Union-find clustering of the (a, b) pairs.
    let threshold = 10.0 * params.tol.max(1e-12);
    let mut parent: Vec<usize> = (0..pool.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            let (ri, rj) = (&runs[pool[i]], &runs[pool[j]]);
            let gap = ri.a.sub(&rj.a).norm2().max(ri.b.sub(&rj.b).norm2());
            if gap <= threshold {
                let (pi, pj) = (find(&mut parent, i), find(&mut parent, j));
                parent[pi] = pj;
            }
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..pool.len() {
        let r = find(&mut parent, i);
        if r == i {
            reps.push(pool[i]);
        }
    }
    let clusters: Vec<BapResult> = reps.iter().map(|&i| runs[i].clone()).collect();
    let distinct_count = clusters.len();
    let diff_tol = 1e2 * threshold + 1e-6;
    let common_difference = clusters
        .windows(2)
        .all(|w| {
            let d0 = w[0].a.sub(&w[0].b);
            let d1 = w[1].a.sub(&w[1].b);
            d0.sub(&d1).norm2() <= diff_tol
        });
    Ok(MultistartResult {
        runs,
        clusters,
        distinct_count,
        common_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alternating_projections_two_balls() {
        // Unit balls centered at (-2, 0) and (2, 0): distance 2 between
        // (-1, 0) and (1, 0).
        let a = SetExpr::ball([-2.0, 0.0], 1.0);
        let b = SetExpr::ball([2.0, 0.0], 1.0);
        let r = alternating_projections(
            &a,
            &b,
            NormSpec::EUCLIDEAN,
            &Vector::from([0.3, 1.7]),
            &SolverParams::default(),
        )
        .unwrap();
        assert!(r.converged && !r.diverging);
        assert_relative_eq!(r.distance, 2.0, epsilon = 1e-6);
        assert_relative_eq!(r.a.0[0], -1.0, epsilon = 1e-5);
        assert_relative_eq!(r.b.0[0], 1.0, epsilon = 1e-5);
        // Fejér-style sanity: the distance trace never increases.
        for w in r.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn alternating_projections_rejects_non_euclidean() {
        let a = SetExpr::ball([-2.0, 0.0], 1.0);
        let b = SetExpr::ball([2.0, 0.0], 1.0);
        let err = alternating_projections(
            &a,
            &b,
            NormSpec::Inf,
            &Vector::zeros(2),
            &SolverParams::default(),
        );
        assert!(matches!(err, Err(Error::NonEuclideanNorm)));
    }

    #[test]
    fn simultaneous_projections_matches_alternating() {
        let a = SetExpr::axis_box([-3.0, -1.0], [-1.0, 1.0]);
        let b = SetExpr::ball([2.0, 0.0], 1.0);
        let r = simultaneous_projection_solve(
            &[a],
            &[b],
            &Vector::from([0.0, 0.5]),
            &SolverParams {
                max_iter: 100_000,
                tol: 1e-8,
                ..Default::default()
            },
        )
        .unwrap();
        assert_relative_eq!(r.distance, 2.0, epsilon = 1e-4);
        assert_relative_eq!(r.a.0[0], -1.0, epsilon = 1e-3);
        assert_relative_eq!(r.b.0[0], 1.0, epsilon = 1e-3);
    }

    #[test]
    fn general_norm_descent_sup_norm_intervals() {
        // Segments at vertical offset 1: sup-norm distance is 1.
        let a = SetExpr::segment([-1.0, 0.0], [1.0, 0.0]);
        let b = SetExpr::segment([-1.0, 1.0], [1.0, 1.0]);
        let r = general_norm_descent(
            &a,
            &b,
            NormSpec::Inf,
            &Vector::from([0.5, 0.5]),
            &Vector::from([0.5, 0.5]),
            &SolverParams {
                tol: 1e-7,
                ..Default::default()
            },
        )
        .unwrap();
        assert_relative_eq!(r.distance, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn multistart_finds_unique_pair_once() {
        let a = SetExpr::ball([-2.0, 0.0], 1.0);
        let b = SetExpr::ball([2.0, 0.0], 1.0);
        let m = multistart_bap(&a, &b, NormSpec::EUCLIDEAN, 6, &SolverParams::default())
            .unwrap();
        assert!(m.common_difference);
        for c in &m.clusters {
            assert_relative_eq!(c.distance, 2.0, epsilon = 1e-6);
        }
    }
}
