//! Half-space witness: fit `f` supported in `x₁ > 0` so that the low
//! frequencies of `ρf` approximate `iξ₁` on the ball `|ξ| ≤ Λ`, then evaluate
//! the smoothly cut-off reflected pairing.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::certificate::{WitnessCertificate, WitnessKind};
use crate::error::{Error, Result};
use crate::linalg::lstsq_truncated;
use crate::quadrature::integrate;
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{covariance_pairing, CovarianceKernel, CutoffKind, CutoffSpec, Field, RhoSpec, SpectralBasis};

pub const TRUNCATION: f64 = 1e-10;

/// Default `ρ` on a periodic box: plateau with core `L/8` and support `L/4`,
/// `L` the shortest side.
pub fn default_rho_spec<T: Real>(basis: &SpectralBasis<T>) -> RhoSpec {
    let l = basis
        .geometry()
        .axes()
        .iter()
        .map(|a| a.length)
        .fold(f64::INFINITY, f64::min);
    RhoSpec::new(l / 8.0, l / 4.0)
}

/// Plus-side nodes where `ρ > 0`.
pub fn halfspace_mask<T: Real>(rho: &Field<T>) -> Vec<bool> {
    let plus = rho.geometry().partition().plus;
    rho.values()
        .iter()
        .zip(plus)
        .map(|(&r, p)| p && r > T::zero())
        .collect()
}

/// Coefficients on the ball modes of `g = −V⁻¹ Σ_{|ξ|≤Λ} ξ₁ sin(ξ·x)`, the
/// function whose transform is `iξ₁` on the ball.
pub fn default_target<T: Real>(basis: &SpectralBasis<T>, ball_radius: f64) -> Vec<T> {
    let geom = basis.geometry();
    let axes = geom.axes();
    let refl = geom.reflection_axis();
    let bound = ball_radius * ball_radius * (1.0 + 1e-12);
    let ranges: Vec<i64> = axes
        .iter()
        .map(|a| ((ball_radius / a.wave_scale).floor() as i64).min(a.points as i64 / 2 - 1))
        .collect();
    let mut lattice: Vec<Vec<f64>> = vec![vec![]];
    for (a, &r) in ranges.iter().enumerate() {
        lattice = lattice
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |m| {
                    let mut q = p.clone();
                    q.push(m as f64 * axes[a].wave_scale);
                    q
                })
            })
            .collect();
    }
    lattice.retain(|xi| xi.iter().map(|x| x * x).sum::<f64>() <= bound);
    let vol = geom.volume();
    let values: Vec<T> = (0..geom.num_nodes())
        .map(|v| {
            let x = geom.coordinates(v);
            let s: f64 = lattice
                .iter()
                .map(|xi| xi[refl] * xi.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>().sin())
                .sum();
            lit(-s / vol)
        })
        .collect();
    let k = basis.count_at_most(lit(ball_radius * ball_radius));
    basis.analyze(&values)[..k].to_vec()
}

/// `M[k, j] = w ρ(x_j) e_k(x_j)` over ball modes `k` and masked nodes `j`.
pub fn restriction_matrix<T: Real>(rho: &Field<T>, mask: &[bool], ball_radius: f64) -> (DMatrix<T>, Vec<usize>) {
    let basis = rho.basis();
    let nodes: Vec<usize> = (0..mask.len()).filter(|&v| mask[v]).collect();
    let k = basis.count_at_most(lit(ball_radius * ball_radius));
    let w = basis.weight();
    let rows: Vec<Vec<T>> = (0..k).map(|r| basis.mode_vector(r)).collect();
    let m = DMatrix::from_fn(k, nodes.len(), |r, j| w * rho.values()[nodes[j]] * rows[r][nodes[j]]);
    (m, nodes)
}

#[derive(Clone, Debug)]
pub struct RestrictionFit<T> {
    pub f: Field<T>,
    /// `‖P_B(ρf) − target‖`.
    pub residual: f64,
    pub target_norm: f64,
    pub rank: usize,
    pub ball_modes: usize,
    pub smallest_singular_value: f64,
}

impl<T> RestrictionFit<T> {
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.target_norm
    }
}

/// Least-squares fit of `f` on `support_mask` to a target on the ball modes
/// (default [`default_target`]). With `bound`, a residual above it is an
/// error carrying the residual.
pub fn fit_fourier_restriction<T: Real>(
    basis: &Arc<SpectralBasis<T>>,
    support_mask: &[bool],
    ball_radius: f64,
    rho: &Field<T>,
    target: Option<&[T]>,
    bound: Option<f64>,
) -> Result<RestrictionFit<T>> {
    if !rho.same_basis(basis) || support_mask.len() != basis.num_nodes() {
        return Err(Error::GeometryMismatch);
    }
    if !support_mask.iter().any(|&m| m) {
        return Err(Error::Precondition("support mask is empty".into()));
    }
    let plus = basis.geometry().partition().plus;
    if let Some(v) = (0..support_mask.len()).find(|&v| support_mask[v] && !plus[v]) {
        return Err(Error::Support(format!("support mask includes node {v} outside x₁ > 0")));
    }
    if !(0..support_mask.len()).any(|v| support_mask[v] && rho.values()[v] > T::zero()) {
        return Err(Error::Precondition("ρ vanishes on the support mask".into()));
    }
    let k = basis.count_at_most(lit(ball_radius * ball_radius));
    let target: Vec<T> = match target {
        Some(t) if t.len() != k => {
            return Err(Error::config(
                "target",
                format!("expected {k} ball-mode values, got {}", t.len()),
            ))
        }
        Some(t) => t.to_vec(),
        None => default_target(basis, ball_radius),
    };
    let (m, nodes) = restriction_matrix(rho, support_mask, ball_radius);
    let rhs = DVector::from_vec(target.clone());
    let sol = lstsq_truncated(&m, &rhs, lit(TRUNCATION))?;
    let mut values = vec![T::zero(); basis.num_nodes()];
    for (j, &v) in nodes.iter().enumerate() {
        values[v] = sol.x[j];
    }
    let residual = to_f64(sol.residual);
    if let Some(b) = bound {
        if residual > b {
            return Err(Error::FitFailed { residual, bound: b });
        }
    }
    Ok(RestrictionFit {
        f: Field::from_values(basis.clone(), values),
        residual,
        target_norm: to_f64(rhs.norm()),
        rank: sol.rank,
        ball_modes: k,
        smallest_singular_value: to_f64(sol.smallest_retained()),
    })
}

/// `⟨ψ_Λ(√Δ)(ρΘf), (Δ+1)⁻¹ ψ_Λ(√Δ)(ρf)⟩`.
pub fn halfspace_pairing<T: Real>(f: &Field<T>, kernel: &CovarianceKernel<T>, rho: &Field<T>) -> Result<T> {
    let a = rho.multiply(&f.reflect())?;
    let b = rho.multiply(f)?;
    covariance_pairing(&a, &b, kernel)
}

/// `−∫_{ℝᵈ} ψ_Λ(|ξ|)² ξ₁² / (|ξ|²+1) dξ` in radial form.
pub fn limit_integral(dim: usize, cutoff: &CutoffSpec) -> Result<f64> {
    let sphere = match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => return Err(Error::Unsupported(format!("dimension {dim}"))),
    };
    let l = cutoff.lambda;
    let radial = |r: f64| {
        let p: f64 = cutoff.multiplier(r * r);
        p * p * r.powi(dim as i32 + 1) / (r * r + 1.0)
    };
    let integral = match cutoff.kind {
        CutoffKind::Sharp => integrate(radial, 0.0, l, 16, 16),
        CutoffKind::Smooth => {
            let edge = (1.0 - cutoff.width) * l;
            integrate(radial, 0.0, edge, 16, 16) + integrate(radial, edge, l, 16, 64)
        }
    };
    Ok(-sphere / dim as f64 * integral)
}

/// Lattice analogue `−V⁻¹ Σ_k m_k ξ₁(k)²` of the limit, over all modes.
pub fn lattice_limit<T: Real>(kernel: &CovarianceKernel<T>) -> f64 {
    let basis = kernel.basis();
    let refl = basis.geometry().reflection_axis();
    let s: f64 = kernel
        .active_modes()
        .into_iter()
        .map(|k| {
            let xi = to_f64(basis.wavevector(k)[refl]);
            to_f64(kernel.multiplier()[k]) * xi * xi
        })
        .sum();
    -s / basis.geometry().volume()
}

/// Certifies the half-space pairing negative and reports the continuum
/// prediction `(2π)^{−d} × limit_integral`.
pub fn halfspace_certificate<T: Real>(
    f: &Field<T>,
    kernel: &CovarianceKernel<T>,
    rho: &Field<T>,
) -> Result<WitnessCertificate> {
    let cutoff = *kernel
        .cutoff()
        .ok_or_else(|| Error::Precondition("half-space certificate needs a cut-off kernel".into()))?;
    let value = to_f64(halfspace_pairing(f, kernel, rho)?);
    let dim = f.geometry().dim();
    let limit = limit_integral(dim, &cutoff)?;
    let predicted = limit / (2.0 * std::f64::consts::PI).powi(dim as i32);
    if !(value < 0.0) {
        return Err(Error::ConstructionFailed {
            reason: "half-space pairing is not negative".into(),
            best: value,
        });
    }
    let mut certificate = WitnessCertificate::new(WitnessKind::Halfspace, value)
        .param("lambda", cutoff.lambda)
        .param("limit_integral", limit)
        .param("lattice_limit", lattice_limit(kernel))
        .param("dim", dim as f64);
    certificate.predicted = Some(predicted);
    Ok(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_basis, Geometry};

    #[test]
    fn sharp_one_dimensional_limit_has_closed_form() {
        for l in [0.5, 1.0, 2.0, 3.0] {
            let v = limit_integral(1, &CutoffSpec::sharp(l)).unwrap();
            assert!((v + 2.0 * (l - f64::atan(l))).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_pairs_to_zero() {
        let basis = build_basis::<f64>(&Geometry::periodic_grid(&[32.0], &[64]).unwrap());
        let kernel = CovarianceKernel::cut(basis.clone(), CutoffSpec::smooth(2.0, 0.25));
        let rho = default_rho_spec(&basis).field(basis.clone());
        assert_eq!(halfspace_pairing(&Field::zeros(basis), &kernel, &rho).unwrap(), 0.0);
    }

    #[test]
    fn empty_mask_is_an_error() {
        let basis = build_basis::<f64>(&Geometry::periodic_grid(&[32.0], &[64]).unwrap());
        let rho = default_rho_spec(&basis).field(basis.clone());
        let err = fit_fourier_restriction(&basis, &[false; 64], 2.0, &rho, None, None).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn one_dimensional_desk_instance() {
        let basis = build_basis::<f64>(&Geometry::periodic_grid(&[32.0], &[256]).unwrap());
        let rho = default_rho_spec(&basis).field(basis.clone());
        let mask = halfspace_mask(&rho);
        let fit = fit_fourier_restriction(&basis, &mask, 2.0, &rho, None, None).unwrap();
        assert!(fit.relative_residual() < 0.1);
        let kernel = CovarianceKernel::cut(basis, CutoffSpec::smooth(2.0, 0.25));
        let cert = halfspace_certificate(&fit.f, &kernel, &rho).unwrap();
        let lattice = cert.parameters["lattice_limit"];
        assert!((cert.value - lattice).abs() < 1e-3 * lattice.abs());
    }
}
