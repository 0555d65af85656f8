//! Small dense linear-algebra helpers shared by the geometry predicates,
//! projections, and certificates. Everything routes through nalgebra.

use nalgebra::DMatrix;

use crate::geometry::Vector;

pub fn to_matrix(cols: &[Vector]) -> DMatrix<f64> {
    if cols.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    let rows = cols[0].dim();
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j].0[i])
}

/// Rank of the column span, with an absolute singular-value cutoff scaled by
/// the largest column norm.
pub fn rank(cols: &[Vector], tol: f64) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let scale = cols.iter().map(|c| c.norm2()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let m = to_matrix(cols);
    m.rank(tol * scale)
}

/// Orthonormal basis of the column span (thin SVD, singular values above the
/// scaled cutoff).
pub fn orthonormal_basis(cols: &[Vector], tol: f64) -> Vec<Vector> {
    if cols.is_empty() {
        return Vec::new();
    }
    let scale = cols.iter().map(|c| c.norm2()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let m = to_matrix(cols);
    let svd = m.svd(true, false);
    let u = svd.u.as_ref().expect("u requested");
    let mut basis = Vec::new();
    for (j, sv) in svd.singular_values.iter().enumerate() {
        if *sv > tol * scale {
            basis.push(Vector(u.column(j).iter().copied().collect()));
        }
    }
    basis
}

/// Orthonormal basis of the null space of the matrix whose rows are `rows`.
pub fn nullspace(rows: &[Vector], dim: usize, tol: f64) -> Vec<Vector> {
    if rows.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                Vector(e)
            })
            .collect();
    }
    let scale = rows.iter().map(|r| r.norm2()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return nullspace(&[], dim, tol);
    }
    // Orthonormalize the row span, then complete it to a basis of R^dim with
    // Gram-Schmidt over the standard basis; the added vectors span the kernel.
    let span = orthonormal_basis(rows, tol);
    let mut basis: Vec<Vector> = Vec::new();
    for i in 0..dim {
        let mut e = Vector::zeros(dim);
        e.0[i] = 1.0;
        for b in span.iter().chain(basis.iter()) {
            e = e.add_scaled(b, -b.dot(&e));
        }
        let n = e.norm2();
        if n > tol.max(1e-12) * 10.0 {
            basis.push(e.scale(1.0 / n));
        }
    }
    basis
}

/// Orthogonal complement of the span of `cols` inside R^dim.
pub fn orthogonal_complement(cols: &[Vector], dim: usize, tol: f64) -> Vec<Vector> {
    nullspace(cols, dim, tol)
}

/// True iff span(u) and span(v) share a nonzero vector:
/// rank(U) + rank(V) - rank([U V]) >= 1.
pub fn subspaces_intersect_nontrivially(u: &[Vector], v: &[Vector], tol: f64) -> bool {
    let ru = rank(u, tol);
    let rv = rank(v, tol);
    if ru == 0 || rv == 0 {
        return false;
    }
    let mut joint = u.to_vec();
    joint.extend(v.iter().cloned());
    ru + rv >= rank(&joint, tol) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector(c.to_vec())
    }

    #[test]
    fn rank_and_nullspace() {
        let cols = [v(&[1.0, 0.0, 0.0]), v(&[2.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])];
        assert_eq!(rank(&cols, 1e-9), 2);
        let ns = nullspace(&[v(&[0.0, 0.0, 1.0])], 3, 1e-9);
        assert_eq!(ns.len(), 2);
        for b in &ns {
            assert!(b.0[2].abs() < 1e-12);
            assert!((b.norm2() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn subspace_intersection() {
        let e1 = v(&[1.0, 0.0, 0.0]);
        let e2 = v(&[0.0, 1.0, 0.0]);
        let e3 = v(&[0.0, 0.0, 1.0]);
        assert!(!subspaces_intersect_nontrivially(
            &[e1.clone()],
            &[e2.clone()],
            1e-9
        ));
        assert!(subspaces_intersect_nontrivially(
            &[e1.clone(), e2.clone()],
            &[e2.clone(), e3.clone()],
            1e-9
        ));
        assert!(subspaces_intersect_nontrivially(
            &[e1.clone(), e2],
            &[v(&[1.0, 1.0, 0.0])],
            1e-9
        ));
        assert!(!subspaces_intersect_nontrivially(&[e1], &[e3], 1e-9));
    }
}
