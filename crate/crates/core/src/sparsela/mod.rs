//! Sparse matrices and a direct LU solve with a residual contract.

mod csr;
mod direct;
mod umfpack;

pub use csr::{csr_from_triplets, spmv, CsrMatrix, TripletBuffer};
pub use direct::{solve_direct, DirectSolver, FactorStatus, SolveReport, DEFAULT_RESIDUAL_BOUND};

use crate::error::{Error, Result};

/// Borders `A` with a Lagrange multiplier enforcing `Σ w_k x_{dofs[k]} = 0`.
pub fn augment_mean_zero(
    a: &CsrMatrix,
    b: &[f64],
    dofs: &[usize],
    weights: &[f64],
) -> Result<(CsrMatrix, Vec<f64>)> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::input("bordering needs a square system"));
    }
    if dofs.len() != weights.len() {
        return Err(Error::input("one weight per constrained dof is required"));
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::input("mean-zero weights are all zero"));
    }
    if let Some(&d) = dofs.iter().find(|&&d| d >= n) {
        return Err(Error::input(format!("constrained dof {d} out of range")));
    }

    let mut t = TripletBuffer::with_capacity(n + 1, n + 1, a.nnz() + 2 * dofs.len());
    for r in 0..n {
        for (c, v) in a.row(r) {
            t.push(r, c, v);
        }
    }
    for (&d, &w) in dofs.iter().zip(weights) {
        t.push(d, n, w);
        t.push(n, d, w);
    }
    let mut rhs = b.to_vec();
    rhs.push(0.0);
    Ok((csr_from_triplets(&t)?, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_gepp(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let l = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= l * a[k][j];
                }
                b[i] -= l * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn diagonal_system() {
        let mut t = TripletBuffer::new(2, 2);
        t.push(0, 0, 2.0);
        t.push(1, 1, 4.0);
        let (x, rep) = solve_direct(&csr_from_triplets(&t).unwrap(), &[2.0, 4.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
        assert!(rep.relative_residual >= 0.0 && rep.relative_residual <= 1e-15);
    }

    #[test]
    fn identity_returns_rhs() {
        let b = [3.0, -1.0, 0.5, 8.0];
        let (x, _) = solve_direct(&CsrMatrix::identity(4), &b).unwrap();
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn random_system_matches_dense_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let n = 50;
        let mut t = TripletBuffer::new(n, n);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j || rng.gen_bool(0.15) {
                    let v = rng.gen_range(-1.0..1.0) + if i == j { 0.5 } else { 0.0 };
                    t.push(i, j, v);
                    dense[i][j] = v;
                }
            }
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = csr_from_triplets(&t).unwrap();
        let (x, rep) = solve_direct(&a, &b).unwrap();
        let xo = dense_gepp(dense, b);
        let scale = xo.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, v) in x.iter().zip(&xo) {
            assert!((u - v).abs() <= 1e-10 * scale);
        }
        assert!(rep.relative_residual <= 1e-12);
    }

    #[test]
    fn saddle_point_needs_pivoting() {
        // [[1, 1], [1, 0]] has a zero diagonal entry.
        let mut t = TripletBuffer::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        let (x, _) = solve_direct(&csr_from_triplets(&t).unwrap(), &[3.0, 1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let mut t = TripletBuffer::new(3, 3);
        t.push(0, 0, 1.0);
        t.push(1, 1, 1.0);
        t.push(2, 0, 1.0);
        t.push(2, 2, 0.0);
        let err = solve_direct(&csr_from_triplets(&t).unwrap(), &[1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }), "{err}");
    }

    #[test]
    fn numerically_singular_matrix_is_rejected() {
        let mut t = TripletBuffer::new(2, 2);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            t.push(i, j, 1.0);
        }
        let err = solve_direct(&csr_from_triplets(&t).unwrap(), &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }), "{err}");
    }

    #[test]
    fn solver_reuses_pattern_and_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 30;
        let mut t = TripletBuffer::new(n, n);
        for i in 0..n {
            t.push(i, i, 4.0);
            t.push(i, (i + 7) % n, rng.gen_range(-1.0..1.0));
        }
        let a = csr_from_triplets(&t).unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let mut s = DirectSolver::default();
        let (x1, _) = s.solve(&a, &b).unwrap();
        let (x2, _) = s.solve(&a, &b).unwrap();
        let (x3, _) = solve_direct(&a, &b).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(x1, x3);
        let a2 = a.scaled(2.0);
        let (y, _) = s.solve(&a2, &b).unwrap();
        for (u, v) in x1.iter().zip(&y) {
            assert!((u - 2.0 * v).abs() < 1e-13 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn bordering_adds_one_row_and_column() {
        let a = CsrMatrix::identity(4);
        let (m, rhs) = augment_mean_zero(&a, &[1.0; 4], &[1, 2], &[0.5, 0.5]).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (5, 5));
        assert_eq!(rhs.len(), 5);
        assert_eq!(m.get(4, 1), 0.5);
        assert_eq!(m.get(2, 4), 0.5);
        assert_eq!(m.get(4, 4), 0.0);
    }

    #[test]
    fn bordering_rejects_zero_weights() {
        let a = CsrMatrix::identity(2);
        assert!(matches!(
            augment_mean_zero(&a, &[1.0, 1.0], &[0, 1], &[0.0, 0.0]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn bordered_singular_gauge_system() {
        // Pure-Neumann 1D Laplacian: singular with constant kernel.
        let n = 6;
        let mut t = TripletBuffer::new(n, n);
        for i in 0..n - 1 {
            t.push(i, i, 1.0);
            t.push(i + 1, i + 1, 1.0);
            t.push(i, i + 1, -1.0);
            t.push(i + 1, i, -1.0);
        }
        let a = csr_from_triplets(&t).unwrap();
        let b = [1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        let dofs: Vec<usize> = (0..n).collect();
        let w = vec![1.0; n];
        let (m, rhs) = augment_mean_zero(&a, &b, &dofs, &w).unwrap();
        let (x, rep) = solve_direct(&m, &rhs).unwrap();
        let mean: f64 = x[..n].iter().sum();
        let pn = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(mean.abs() <= 1e-12 * pn);
        assert!(rep.relative_residual <= 1e-12);
    }
}
