//! Seeded Gaussian draws with per-mode streams.
//!
//! The normal variate for `(seed, sample, mode)` comes from a ChaCha8 stream
//! keyed by `(seed, sample)` with stream id `mode`, so results do not depend
//! on how samples are split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::field::Field;
use super::kernel::CovarianceKernel;
use crate::scalar::{lit, Real};

/// Standard normal variate for `(seed, sample, mode)`.
pub fn keyed_normal(seed: u64, sample: u64, mode: u64) -> f64 {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&sample.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(mode);
    rng.sample(StandardNormal)
}

/// Coefficients `ξ_k √m_k` of sample `sample`; inactive modes are exactly 0.
pub fn sample_coefficients<T: Real>(kernel: &CovarianceKernel<T>, seed: u64, sample: u64) -> Vec<T> {
    kernel
        .multiplier()
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            if m == T::zero() {
                T::zero()
            } else {
                lit::<T>(keyed_normal(seed, sample, k as u64)) * m.sqrt()
            }
        })
        .collect()
}

/// One draw of the (cut-off) free field.
pub fn sample_gff<T: Real>(kernel: &CovarianceKernel<T>, seed: u64) -> Field<T> {
    Field::from_coeffs(kernel.basis().clone(), sample_coefficients(kernel, seed, 0))
}

/// `count` independent coefficient vectors, drawn in parallel.
pub fn sample_coefficient_batch<T: Real + Send + Sync>(
    kernel: &CovarianceKernel<T>,
    seed: u64,
    count: usize,
) -> Vec<Vec<T>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_coefficients(kernel, seed, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::basis::build_basis;
    use crate::spectral::cutoff::CutoffSpec;
    use crate::spectral::geometry::Geometry;

    #[test]
    fn same_seed_same_field() {
        let basis = build_basis::<f64>(&Geometry::circle(32).unwrap());
        let kernel = CovarianceKernel::cut(basis, CutoffSpec::sharp(3.0));
        let a = sample_gff(&kernel, 7);
        let b = sample_gff(&kernel, 7);
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), sample_gff(&kernel, 8).values());
    }

    #[test]
    fn modes_above_cutoff_are_zero() {
        let basis = build_basis::<f64>(&Geometry::circle(32).unwrap());
        let kernel = CovarianceKernel::cut(basis.clone(), CutoffSpec::sharp(3.0));
        let f = sample_gff(&kernel, 1);
        for (k, &c) in f.coeffs().iter().enumerate() {
            if basis.eigenvalue(k) > 9.0 {
                assert_eq!(c, 0.0);
            } else {
                assert_ne!(c, 0.0);
            }
        }
    }

    #[test]
    fn batch_matches_serial_draws() {
        let basis = build_basis::<f64>(&Geometry::circle(8).unwrap());
        let kernel = CovarianceKernel::uncut(basis);
        let batch = sample_coefficient_batch(&kernel, 3, 5);
        assert_eq!(batch[4], sample_coefficients(&kernel, 3, 4));
    }
}
