//! Reflected Gram matrices `Q_ij = ⟨Θt_i, C t_j⟩` over plus-supported tests
//! and their eigenvalue certificate.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, symmetric_norm, symmetry_defect};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{CovarianceKernel, Field, RegionPartition, SpectralBasis};

pub const SUPPORT_LEAKAGE: f64 = 1e-12;
pub const SYMMETRY_BOUND: f64 = 1e-8;
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RpVerdict {
    RpHolds,
    RpFails,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RPReport {
    pub min_eigenvalue: f64,
    pub witness_coeffs: Vec<f64>,
    pub verdict: RpVerdict,
    pub gram_dim: usize,
    pub symmetry_defect: f64,
    pub tolerance: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RpGram<T: Real> {
    /// Symmetrised Gram matrix.
    pub matrix: DMatrix<T>,
    /// Largest `|Q_ij − Q_ji|` before symmetrisation.
    pub symmetry_defect: T,
}

/// `Q_ij = covariance_pairing(Θ t_i, t_j)`, symmetrised.
pub fn assemble_rp_gram<T: Real + Send + Sync>(
    kernel: &CovarianceKernel<T>,
    tests: &[Field<T>],
    region: &RegionPartition,
) -> Result<RpGram<T>> {
    for (index, t) in tests.iter().enumerate() {
        if !t.same_basis(kernel.basis()) {
            return Err(Error::GeometryMismatch);
        }
        let norm = to_f64(t.norm());
        let outside = to_f64(t.norm_outside(&region.plus));
        if outside > SUPPORT_LEAKAGE * norm {
            return Err(Error::TestSupport {
                index,
                leakage: if norm > 0.0 { outside / norm } else { outside },
            });
        }
    }
    let m = kernel.multiplier();
    let parity = kernel.basis().parities();
    let weighted: Vec<Vec<T>> = tests
        .iter()
        .map(|t| {
            t.coeffs()
                .iter()
                .zip(m)
                .zip(parity)
                .map(|((&c, &mk), &p)| if p < 0 { -c * mk } else { c * mk })
                .collect()
        })
        .collect();
    let n = tests.len();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    weighted[i]
                        .iter()
                        .zip(tests[j].coeffs())
                        .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
                })
                .collect()
        })
        .collect();
    let raw = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let defect = symmetry_defect(&raw);
    let matrix = (&raw + raw.transpose()) * lit::<T>(0.5);
    Ok(RpGram {
        matrix,
        symmetry_defect: defect,
    })
}

/// Eigenvalue certificate for a symmetric `Q`. The default tolerance is
/// `1e−9·‖Q‖₂`.
pub fn certify_rp<T: Real>(q: &DMatrix<T>, tolerance: Option<f64>) -> Result<RPReport> {
    if q.nrows() != q.ncols() {
        return Err(Error::Precondition("Gram matrix must be square".into()));
    }
    let defect = to_f64(symmetry_defect(q));
    if defect > SYMMETRY_BOUND {
        return Err(Error::NotSymmetric { defect });
    }
    let sym = (q + q.transpose()) * lit::<T>(0.5);
    let tolerance = tolerance.unwrap_or_else(|| RELATIVE_TOLERANCE * to_f64(symmetric_norm(&sym)));
    if q.nrows() == 0 {
        return Ok(RPReport {
            min_eigenvalue: 0.0,
            witness_coeffs: vec![],
            verdict: RpVerdict::RpHolds,
            gram_dim: 0,
            symmetry_defect: defect,
            tolerance,
            eigenvalues: vec![],
        });
    }
    let (vals, vecs) = symmetric_eigen(&sym);
    let min = to_f64(vals[0]);
    let mut witness: Vec<f64> = vecs.column(0).iter().map(|&x| to_f64(x)).collect();
    // fix the sign so the largest entry is positive
    if let Some(big) = witness.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())) {
        if big < 0.0 {
            witness.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(RPReport {
        min_eigenvalue: min,
        witness_coeffs: witness,
        verdict: if min < -tolerance {
            RpVerdict::RpFails
        } else {
            RpVerdict::RpHolds
        },
        gram_dim: q.nrows(),
        symmetry_defect: defect,
        tolerance,
        eigenvalues: vals.iter().map(|&v| to_f64(v)).collect(),
    })
}

/// `Σ_i c_i t_i`.
pub fn combine_tests<T: Real>(tests: &[Field<T>], coeffs: &[f64]) -> Result<Field<T>> {
    let first = tests
        .first()
        .ok_or_else(|| Error::Precondition("empty test family".into()))?;
    tests
        .iter()
        .zip(coeffs)
        .try_fold(Field::zeros(first.basis().clone()), |acc, (t, &c)| {
            acc.add(&t.scale(lit(c)))
        })
}

/// Bumps `exp(−1/(1−(r/σ)²))` centred at every plus node for each width in
/// `widths` (in units of the grid spacing), multiplied by the plus indicator.
pub fn default_test_family<T: Real>(
    basis: &std::sync::Arc<SpectralBasis<T>>,
    region: &RegionPartition,
    widths: &[f64],
) -> Vec<Field<T>> {
    let geom = basis.geometry();
    let h = geom.axes().iter().map(|a| a.spacing()).fold(f64::INFINITY, f64::min);
    let coords: Vec<Vec<f64>> = (0..geom.num_nodes()).map(|v| geom.coordinates(v)).collect();
    let lengths: Vec<f64> = geom.axes().iter().map(|a| a.length).collect();
    let mut out = Vec::new();
    for &width in widths {
        let sigma = width * h;
        for p in (0..geom.num_nodes()).filter(|&v| region.plus[v]) {
            let values: Vec<T> = (0..geom.num_nodes())
                .map(|v| {
                    if !region.plus[v] {
                        return T::zero();
                    }
                    let r2: f64 = coords[v]
                        .iter()
                        .zip(&coords[p])
                        .zip(&lengths)
                        .map(|((a, b), l)| {
                            let d = (a - b).abs();
                            let d = d.min(l - d);
                            d * d
                        })
                        .sum();
                    let t2 = r2 / (sigma * sigma);
                    if t2 >= 1.0 {
                        T::zero()
                    } else {
                        lit((-1.0 / (1.0 - t2)).exp())
                    }
                })
                .collect();
            out.push(Field::from_values(basis.clone(), values));
        }
    }
    out
}
