//! Vectors, lp norms, segments, and the segment-parallelism predicate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Default tolerance for the parallelism/collinearity rank tests.
pub const PARALLEL_TOL: f64 = 1e-9;

/// A point of R^n, n >= 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// self + t * other.
    pub fn add_scaled(&self, other: &Vector, t: f64) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * b)
                .collect(),
        )
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * t).collect())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm2();
        if n > 0.0 {
            Some(self.scale(1.0 / n))
        } else {
            None
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            })
        }
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

/// An lp norm descriptor. Infinity is its own case so that max semantics
/// stay exact instead of going through a large float.
///
/// Serializes as `{"p": 2.0}`; the sup norm is the string `{"p": "inf"}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpecRepr", into = "NormSpecRepr")]
pub enum NormSpec {
    P(f64),
    Inf,
}

#[derive(Serialize, Deserialize, Clone)]
struct NormSpecRepr {
    p: PRepr,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(untagged)]
enum PRepr {
    Num(f64),
    Str(String),
}

impl TryFrom<NormSpecRepr> for NormSpec {
    type Error = String;
    fn try_from(r: NormSpecRepr) -> std::result::Result<Self, String> {
        match r.p {
            PRepr::Num(p) => NormSpec::p(p).map_err(|e| e.to_string()),
            PRepr::Str(s) if s.eq_ignore_ascii_case("inf") => Ok(NormSpec::Inf),
            PRepr::Str(s) => Err(format!("unknown norm exponent {s:?} (expected a number or \"inf\")")),
        }
    }
}

impl From<NormSpec> for NormSpecRepr {
    fn from(n: NormSpec) -> Self {
        NormSpecRepr {
            p: match n {
                NormSpec::P(p) => PRepr::Num(p),
                NormSpec::Inf => PRepr::Str("inf".to_string()),
            },
        }
    }
}

impl NormSpec {
    pub const EUCLIDEAN: NormSpec = NormSpec::P(2.0);

    pub fn p(p: f64) -> Result<NormSpec> {
        if p.is_finite() && p >= 1.0 {
            Ok(NormSpec::P(p))
        } else if p.is_infinite() && p > 0.0 {
            Ok(NormSpec::Inf)
        } else {
            Err(Error::ParamOutOfRange {
                name: "p",
                value: p,
                range: "[1, inf]",
            })
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, NormSpec::P(p) if *p == 2.0)
    }
}

/// (sum |v_i|^p)^(1/p), or max |v_i| for the sup norm. Scaled by the largest
/// component to avoid overflow for large p.
pub fn norm_eval(norm: NormSpec, v: &Vector) -> f64 {
    let maxabs = v.0.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    match norm {
        NormSpec::Inf => maxabs,
        NormSpec::P(p) if p == 1.0 => v.0.iter().map(|c| c.abs()).sum(),
        NormSpec::P(p) if p == 2.0 => v.norm2(),
        NormSpec::P(p) => {
            if maxabs == 0.0 {
                0.0
            } else {
                let s: f64 = v.0.iter().map(|c| (c.abs() / maxabs).powf(p)).sum();
                maxabs * s.powf(1.0 / p)
            }
        }
    }
}

/// The unit ball of lp contains no flat boundary pieces exactly when 1 < p < inf.
pub fn is_strictly_convex_norm(norm: NormSpec) -> bool {
    match norm {
        NormSpec::P(p) => p > 1.0,
        NormSpec::Inf => false,
    }
}

/// A closed line segment [a0, a1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a0: Vector,
    pub a1: Vector,
}

impl Segment {
    pub fn new(a0: Vector, a1: Vector) -> Result<Segment> {
        a1.check_dim(a0.dim())?;
        Ok(Segment { a0, a1 })
    }

    pub fn dim(&self) -> usize {
        self.a0.dim()
    }

    pub fn direction(&self) -> Vector {
        self.a1.sub(&self.a0)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.a0 != self.a1
    }

    pub fn length(&self) -> f64 {
        self.direction().norm2()
    }
}

/// a0 + t (a1 - a0) for t in [0, 1].
pub fn segment_point(s: &Segment, t: f64) -> Result<Vector> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParamOutOfRange {
            name: "t",
            value: t,
            range: "[0, 1]",
        });
    }
    Ok(s.a0.add_scaled(&s.direction(), t))
}

/// True iff the two segments lie on parallel lines: collinear directions,
/// disjoint supporting lines, and all four endpoints in a common
/// two-dimensional affine subspace.
pub fn are_parallel_segments(s1: &Segment, s2: &Segment, tol: f64) -> Result<bool> {
    if !s1.is_nondegenerate() || !s2.is_nondegenerate() {
        return Err(Error::DegenerateSegment);
    }
    s2.a0.check_dim(s1.dim())?;

    let u = s1.direction().normalized().unwrap();
    let v = s2.direction().normalized().unwrap();

    // Collinear directions: sine of the angle between the lines below tol.
    let residual = v.add_scaled(&u, -u.dot(&v)).norm2();
    if residual > tol {
        return Ok(false);
    }

    // Disjoint supporting lines: the offset between base points must have a
    // component orthogonal to the common direction. Scale-aware comparison.
    let w = s2.a0.sub(&s1.a0);
    let w_perp = w.add_scaled(&u, -u.dot(&w));
    let scale = 1.0 + w.norm2();
    if w_perp.norm2() <= tol * scale {
        return Ok(false); // same supporting line
    }

    // Coplanarity of the four endpoints (rank of the span of the three
    // difference vectors must be at most 2).
    let cols = [s1.direction(), w, s2.a1.sub(&s1.a0)];
    Ok(linalg::rank(&cols, tol) <= 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn vec2(x: f64, y: f64) -> Vector {
        Vector::from([x, y])
    }

    #[test]
    fn norm_eval_known_values() {
        assert_relative_eq!(norm_eval(NormSpec::P(2.0), &vec2(3.0, 4.0)), 5.0);
        assert_relative_eq!(
            norm_eval(NormSpec::Inf, &Vector::from([-1.0, 0.5, 1.5])),
            1.5
        );
        assert_relative_eq!(norm_eval(NormSpec::P(1.0), &Vector::from([1.0, 1.0, 1.0])), 3.0);
        assert_eq!(norm_eval(NormSpec::P(3.5), &Vector::zeros(4)), 0.0);
    }

    #[test]
    fn strict_convexity_of_norms() {
        assert!(is_strictly_convex_norm(NormSpec::P(2.0)));
        assert!(is_strictly_convex_norm(NormSpec::P(1.5)));
        assert!(!is_strictly_convex_norm(NormSpec::P(1.0)));
        assert!(!is_strictly_convex_norm(NormSpec::Inf));
    }

    #[test]
    fn strict_convexity_agrees_with_midpoint_probe() {
        // For 1 < p < inf, distinct unit vectors have a midpoint strictly
        // inside the ball; for p in {1, inf} a flat pair attains norm 1.
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for &p in &[1.5, 2.0, 3.0, 7.0] {
            let norm = NormSpec::P(p);
            for _ in 0..50 {
                let u = Vector::from([next(), next(), next()]);
                let v = Vector::from([next(), next(), next()]);
                let (nu, nv) = (norm_eval(norm, &u), norm_eval(norm, &v));
                if nu == 0.0 || nv == 0.0 {
                    continue;
                }
                let u = u.scale(1.0 / nu);
                let v = v.scale(1.0 / nv);
                if u.sub(&v).norm2() < 1e-6 {
                    continue;
                }
                let mid = u.add(&v).scale(0.5);
                assert!(norm_eval(norm, &mid) < 1.0 - 1e-15);
            }
        }
        // Flat pairs.
        let e1 = Vector::from([1.0, 0.0]);
        let e2 = Vector::from([0.0, 1.0]);
        let mid = e1.add(&e2).scale(0.5);
        assert_relative_eq!(norm_eval(NormSpec::P(1.0), &mid), 1.0);
        let u = Vector::from([1.0, 1.0]);
        let v = Vector::from([1.0, -1.0]);
        let mid = u.add(&v).scale(0.5);
        assert_relative_eq!(norm_eval(NormSpec::Inf, &mid), 1.0);
    }

    #[test]
    fn segment_points() {
        let s = Segment::new(vec2(0.0, 0.0), vec2(2.0, 0.0)).unwrap();
        assert_eq!(segment_point(&s, 0.5).unwrap(), vec2(1.0, 0.0));
        let s = Segment::new(vec2(-1.0, 0.0), vec2(1.0, 0.0)).unwrap();
        assert_eq!(segment_point(&s, 1.0).unwrap(), vec2(1.0, 0.0));
        let s = Segment::new(vec2(0.0, 0.0), vec2(0.0, 0.0)).unwrap();
        assert_eq!(segment_point(&s, 0.3).unwrap(), vec2(0.0, 0.0));
        assert!(segment_point(&s, 1.5).is_err());
    }

    #[test]
    fn parallel_segments_basic() {
        let tol = PARALLEL_TOL;
        let s1 = Segment::new(vec2(0.0, 0.0), vec2(1.0, 0.0)).unwrap();
        let s2 = Segment::new(vec2(0.0, 1.0), vec2(1.0, 1.0)).unwrap();
        assert!(are_parallel_segments(&s1, &s2, tol).unwrap());

        // Collinear segments share a supporting line: not parallel.
        let s3 = Segment::new(vec2(2.0, 0.0), vec2(3.0, 0.0)).unwrap();
        assert!(!are_parallel_segments(&s1, &s3, tol).unwrap());

        // Crossed segments in R^3 on skew lines: not parallel.
        let a = Segment::new(
            Vector::from([-1.0, 0.0, 0.0]),
            Vector::from([1.0, 0.0, 0.0]),
        )
        .unwrap();
        let b = Segment::new(
            Vector::from([0.0, -1.0, 1.5]),
            Vector::from([0.0, 1.0, 1.5]),
        )
        .unwrap();
        assert!(!are_parallel_segments(&a, &b, tol).unwrap());

        let degenerate = Segment::new(vec2(1.0, 1.0), vec2(1.0, 1.0)).unwrap();
        assert!(are_parallel_segments(&s1, &degenerate, tol).is_err());
    }

    proptest! {
        #[test]
        fn norm_triangle_inequality_and_homogeneity(
            a in proptest::collection::vec(-100.0f64..100.0, 2..5),
            b in proptest::collection::vec(-100.0f64..100.0, 2..5),
            lambda in -50.0f64..50.0,
            p_choice in 0usize..4,
        ) {
            let dim = a.len().min(b.len());
            let a = Vector(a[..dim].to_vec());
            let b = Vector(b[..dim].to_vec());
            let norm = [NormSpec::P(1.0), NormSpec::P(1.7), NormSpec::P(2.0), NormSpec::Inf][p_choice];
            let na = norm_eval(norm, &a);
            let nb = norm_eval(norm, &b);
            let nsum = norm_eval(norm, &a.add(&b));
            prop_assert!(nsum <= (na + nb) * (1.0 + 1e-12) + 1e-12);
            let nl = norm_eval(norm, &a.scale(lambda));
            prop_assert!((nl - lambda.abs() * na).abs() <= 1e-12 * (1.0 + nl.abs()));
        }

        #[test]
        fn parallelism_invariant_under_translation_and_scaling(
            shift in proptest::collection::vec(-10.0f64..10.0, 3),
            scale in 0.1f64..10.0,
        ) {
            let s1 = Segment::new(
                Vector::from([0.0, 0.0, 0.0]),
                Vector::from([1.0, 2.0, 0.5]),
            ).unwrap();
            let s2 = Segment::new(
                Vector::from([0.0, 1.0, 0.0]),
                Vector::from([2.0, 5.0, 1.0]),
            ).unwrap();
            let base = are_parallel_segments(&s1, &s2, PARALLEL_TOL).unwrap();
            let sym = are_parallel_segments(&s2, &s1, PARALLEL_TOL).unwrap();
            prop_assert_eq!(base, sym);

            let t = Vector(shift);
            let moved = Segment::new(s1.a0.add(&t), s1.a1.add(&t)).unwrap();
            let moved2 = Segment::new(s2.a0.add(&t), s2.a1.add(&t)).unwrap();
            prop_assert_eq!(
                are_parallel_segments(&moved, &moved2, PARALLEL_TOL).unwrap(),
                base
            );

            let stretched = Segment::new(
                s1.a0.clone(),
                s1.a0.add_scaled(&s1.direction(), scale),
            ).unwrap();
            prop_assert_eq!(
                are_parallel_segments(&stretched, &s2, PARALLEL_TOL).unwrap(),
                base
            );
        }
    }
}
