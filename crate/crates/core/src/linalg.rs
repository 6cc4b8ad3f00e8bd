//! Pointwise dense linear algebra on the small matrices the engine needs
//! (ambient dimension is at most 6). Backed by nalgebra.

use nalgebra::{DMatrix, DVector};

pub fn invert(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().try_inverse()
}

pub fn det(a: &DMatrix<f64>) -> f64 {
    a.clone().lu().determinant()
}

/// Least-squares solution of (possibly tall) `a x = b` via SVD, together
/// with the Euclidean residual norm of `a x - b`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(b, 1e-12)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Right-singular vector for the smallest singular value (a unit vector
/// spanning the numerical nullspace when the matrix has rank deficiency 1).
pub fn nullspace_vector(a: &DMatrix<f64>) -> DVector<f64> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("svd with v_t requested");
    let sv = &svd.singular_values;
    let mut idx = 0;
    for i in 1..sv.len() {
        if sv[i] < sv[idx] {
            idx = i;
        }
    }
    vt.row(idx).transpose()
}

/// Minimum-norm solution of the underdetermined system `a x = b`.
pub fn min_norm_solution(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-12).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_deficient_gram() {
        // diag(2, 0, -3) has nullspace e1
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -3.0]);
        let v = nullspace_vector(&a);
        assert!((v[0].abs()) < 1e-12);
        assert!((v[1].abs() - 1.0).abs() < 1e-12);
        assert!((v[2].abs()) < 1e-12);
        let sv = singular_values(&a);
        assert!((sv[0] - 3.0).abs() < 1e-12);
        assert!(sv[2] < 1e-14);
    }

    #[test]
    fn lstsq_exact_for_consistent_system() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_row_slice(&[2.0, 3.0, 5.0]);
        let (x, r) = lstsq(&a, &b);
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
        assert!(r < 1e-12);
    }
}
