//! Dense linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Truncated-SVD least-squares solution.
#[derive(Clone, Debug)]
pub struct LstsqSolution<T: Real> {
    pub x: DVector<T>,
    /// All singular values, descending.
    pub singular_values: Vec<T>,
    pub rank: usize,
    /// Euclidean norm of `A x − b`.
    pub residual: T,
}

impl<T: Real> LstsqSolution<T> {
    pub fn largest_singular_value(&self) -> T {
        self.singular_values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn smallest_retained(&self) -> T {
        if self.rank == 0 {
            T::zero()
        } else {
            self.singular_values[self.rank - 1]
        }
    }
}

/// Minimum-norm least squares with singular values below `rel_tol·σ_max`
/// discarded.
pub fn lstsq_truncated<T: Real>(a: &DMatrix<T>, b: &DVector<T>, rel_tol: T) -> Result<LstsqSolution<T>> {
    if a.nrows() != b.len() {
        return Err(Error::Numerical(format!(
            "right-hand side has {} rows, matrix has {}",
            b.len(),
            a.nrows()
        )));
    }
    let svd = a.clone().svd(true, true);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| Error::Numerical("SVD did not return U".into()))?;
    let vt = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::Numerical("SVD did not return Vᵀ".into()))?;
    let sv: Vec<T> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted: Vec<T> = order.iter().map(|&i| sv[i]).collect();
    let smax = sorted.first().copied().unwrap_or_else(T::zero);
    let cut = smax * rel_tol;

    let mut x = DVector::zeros(a.ncols());
    let mut rank = 0;
    for &i in &order {
        if sv[i] <= cut || sv[i] == T::zero() {
            continue;
        }
        rank += 1;
        let coef = u.column(i).dot(b) / sv[i];
        x.axpy(coef, &vt.row(i).transpose(), T::one());
    }
    let residual = (a * &x - b).norm();
    Ok(LstsqSolution {
        x,
        singular_values: sorted,
        rank,
        residual,
    })
}

/// Singular values of `a`, descending.
pub fn singular_values<T: Real>(a: &DMatrix<T>) -> Vec<T> {
    let mut sv: Vec<T> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues ascending and
/// eigenvectors as matching columns.
pub fn symmetric_eigen<T: Real>(m: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let eig = m.clone().symmetric_eigen();
    let vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (sorted_vals, vecs)
}

/// Pseudoinverse of a symmetric PSD matrix, eigenvalues below
/// `rel_tol·λ_max` treated as zero.
pub fn pinv_symmetric<T: Real>(m: &DMatrix<T>, rel_tol: T) -> DMatrix<T> {
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let sym = (m + m.transpose()) * lit::<T>(0.5);
    let (vals, vecs) = symmetric_eigen(&sym);
    let top = vals.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let cut = top * rel_tol;
    let mut out = DMatrix::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        if v > cut && v > T::zero() {
            let col = vecs.column(i);
            out += col * col.transpose() * (T::one() / v);
        }
    }
    out
}

/// Largest absolute entry of `m − mᵀ`.
pub fn symmetry_defect<T: Real>(m: &DMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Spectral norm of a symmetric matrix.
pub fn symmetric_norm<T: Real>(m: &DMatrix<T>) -> T {
    let (vals, _) = symmetric_eigen(m);
    vals.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
}
