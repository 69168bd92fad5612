use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sparsela::CsrMatrix;

/// Prescribed values on a set of dofs, sorted by dof.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DirichletData {
    dofs: Vec<usize>,
    values: Vec<f64>,
}

impl DirichletData {
    /// Later pairs override earlier ones on the same dof.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let map: BTreeMap<usize, f64> = pairs.into_iter().collect();
        let (dofs, values) = map.into_iter().unzip();
        Self { dofs, values }
    }

    pub fn homogeneous(dofs: impl IntoIterator<Item = usize>) -> Self {
        Self::from_pairs(dofs.into_iter().map(|d| (d, 0.0)))
    }

    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.dofs.iter().copied().zip(self.values.iter().copied())
    }

    /// Overwrites the constrained entries of `x`.
    pub fn impose(&self, x: &mut [f64]) {
        for (d, v) in self.iter() {
            x[d] = v;
        }
    }
}

/// A system restricted to its unconstrained dofs.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    free: Vec<usize>,
    full_len: usize,
    constraints: DirichletData,
}

impl ReducedSystem {
    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Reinserts the constrained values around a reduced solution.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.full_len];
        for (&d, &v) in self.free.iter().zip(reduced) {
            x[d] = v;
        }
        self.constraints.impose(&mut x);
        x
    }
}

/// Eliminates constrained dofs: their columns move to the right-hand side and
/// their rows are dropped.
pub fn apply_dirichlet(a: &CsrMatrix, b: &[f64], bc: &DirichletData) -> Result<ReducedSystem> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::input("Dirichlet elimination needs a square system"));
    }
    if let Some(&d) = bc.dofs().last() {
        if d >= n {
            return Err(Error::input(format!("constrained dof {d} outside a system of size {n}")));
        }
    }

    let mut fixed = vec![None; n];
    for (d, v) in bc.iter() {
        fixed[d] = Some(v);
    }
    let mut index = vec![usize::MAX; n];
    let mut free = Vec::with_capacity(n - bc.len());
    for (d, f) in fixed.iter().enumerate() {
        if f.is_none() {
            index[d] = free.len();
            free.push(d);
        }
    }

    let m = free.len();
    let mut row_ptr = Vec::with_capacity(m + 1);
    let mut col_idx = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    let mut rhs = Vec::with_capacity(m);
    row_ptr.push(0);
    for &r in &free {
        let mut acc = b[r];
        for (c, v) in a.row(r) {
            match fixed[c] {
                Some(g) => acc -= v * g,
                None => {
                    col_idx.push(index[c]);
                    values.push(v);
                }
            }
        }
        rhs.push(acc);
        row_ptr.push(col_idx.len());
    }

    Ok(ReducedSystem {
        matrix: CsrMatrix::from_parts(m, m, row_ptr, col_idx, values)?,
        rhs,
        free,
        full_len: n,
        constraints: bc.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparsela::{csr_from_triplets, solve_direct, TripletBuffer};

    #[test]
    fn later_pairs_win() {
        let bc = DirichletData::from_pairs([(3, 1.0), (1, 2.0), (3, 5.0)]);
        assert_eq!(bc.dofs(), &[1, 3]);
        assert_eq!(bc.values(), &[2.0, 5.0]);
    }

    #[test]
    fn fully_constrained_system_is_empty() {
        let a = CsrMatrix::identity(3);
        let bc = DirichletData::from_pairs([(0, 1.0), (1, 2.0), (2, 3.0)]);
        let red = apply_dirichlet(&a, &[0.0; 3], &bc).unwrap();
        assert_eq!(red.matrix.nrows(), 0);
        let (x, _) = solve_direct(&red.matrix, &red.rhs).unwrap();
        assert_eq!(red.expand(&x), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn homogeneous_values_keep_free_rhs() {
        let mut t = TripletBuffer::new(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                t.push(i, j, 1.0 + (i * 3 + j) as f64);
            }
        }
        let a = csr_from_triplets(&t).unwrap();
        let red = apply_dirichlet(&a, &[4.0, 5.0, 6.0], &DirichletData::homogeneous([1])).unwrap();
        assert_eq!(red.rhs, vec![4.0, 6.0]);
        assert_eq!(red.free_dofs(), &[0, 2]);
        assert_eq!(red.matrix.get(1, 1), 9.0);
    }

    #[test]
    fn out_of_range_constraint() {
        let a = CsrMatrix::identity(2);
        assert!(apply_dirichlet(&a, &[0.0; 2], &DirichletData::homogeneous([2])).is_err());
    }
}
