//! Importance sampling of the cut-off `Φ⁴` measure against the Gaussian.
//!
//! Samples of the cut-off free field are reweighted by
//! `G = exp(−c‖ρΦ‖⁴_{L⁴} − c a ‖ρΦ‖²_{L²})`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{
    covariance_pairing, sample_coefficients, CovarianceKernel, CutoffSpec, Field, RhoSpec, SpectralBasis,
};

pub const MIN_ESS: f64 = 10.0;

#[derive(Clone, Debug)]
pub struct Phi4Config<T: Real> {
    pub coupling: f64,
    pub counterterm: f64,
    pub rho: Field<T>,
    pub core_mask: Vec<bool>,
    pub support_mask: Vec<bool>,
    pub cutoff: CutoffSpec,
    pub num_samples: usize,
    pub seed: u64,
}

impl<T: Real> Phi4Config<T> {
    /// Builds `ρ` from a radial plateau; `counterterm = None` selects
    /// [`default_counterterm`].
    pub fn new(
        basis: &Arc<SpectralBasis<T>>,
        rho: RhoSpec,
        cutoff: CutoffSpec,
        coupling: f64,
        counterterm: Option<f64>,
        num_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        rho.validate()?;
        cutoff.validate()?;
        let field = rho.field(basis.clone());
        let counterterm = match counterterm {
            Some(a) => a,
            None => to_f64(default_counterterm(
                &CovarianceKernel::cut(basis.clone(), cutoff),
                &field,
            )),
        };
        let config = Phi4Config {
            coupling,
            counterterm,
            core_mask: rho.core_mask(basis),
            support_mask: field.values().iter().map(|&r| r > T::zero()).collect(),
            rho: field,
            cutoff,
            num_samples,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(Error::config("phi4.coupling", "must be a nonnegative real"));
        }
        if !self.counterterm.is_finite() {
            return Err(Error::config("phi4.counterterm", "must be finite"));
        }
        if self.num_samples == 0 {
            return Err(Error::config("phi4.num_samples", "must be positive"));
        }
        for (v, &r) in self.rho.values().iter().enumerate() {
            let r = to_f64(r);
            let ok = (0.0..=1.0).contains(&r) && (!self.core_mask[v] || r == 1.0) && (self.support_mask[v] || r == 0.0);
            if !ok {
                return Err(Error::config(
                    "phi4.rho",
                    format!("ρ = {r} at node {v} violates its masks"),
                ));
            }
        }
        Ok(())
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        Phi4Config {
            coupling,
            ..self.clone()
        }
    }

    /// Quadrature volume of `supp ρ`.
    pub fn support_volume(&self) -> f64 {
        let w = to_f64(self.rho.basis().weight());
        self.support_mask.iter().filter(|&&m| m).count() as f64 * w
    }
}

/// `c‖ρΦ‖⁴ + c a ‖ρΦ‖²` over the region, nodes weighted by `region_fraction`.
pub fn interaction_exponent<T: Real>(values: &[T], config: &Phi4Config<T>, region_fraction: &[f64]) -> T {
    let w = config.rho.basis().weight();
    let mut quartic = T::zero();
    let mut quadratic = T::zero();
    for ((&phi, &r), &frac) in values.iter().zip(config.rho.values()).zip(region_fraction) {
        if frac == 0.0 || r == T::zero() {
            continue;
        }
        let u = r * phi;
        let u2 = u * u;
        let q = w * lit::<T>(frac);
        quartic += q * u2 * u2;
        quadratic += q * u2;
    }
    let c: T = lit(config.coupling);
    c * quartic + c * lit::<T>(config.counterterm) * quadratic
}

/// `G_{A,ρ,Λ}` for the region described by `region_fraction` (1 inside, 0
/// outside, ½ on a shared interface). Modes above the cutoff are projected
/// out first.
pub fn interaction_weight<T: Real>(field: &Field<T>, config: &Phi4Config<T>, region_fraction: &[f64]) -> T {
    let active = field.basis().count_at_most(lit(config.cutoff.lambda_sq()));
    let projected;
    let values = match field.top_mode() {
        Some(k) if k >= active => {
            projected = field.apply_cutoff(&config.cutoff);
            projected.values().to_vec()
        }
        _ => field.values().to_vec(),
    };
    (-interaction_exponent(&values, config, region_fraction)).exp()
}

/// Young splitting of the quadratic term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YoungBound {
    /// `δ` with `|a|δ²/2 = 1/3`; `None` when `a ≥ 0`.
    pub delta: Option<f64>,
    /// `K = 3a²Vol(supp ρ)/4` for `a < 0`, else 0.
    pub k: f64,
    /// `cK`: the exponent is at least `(2c/3)‖ρΦ‖⁴ − cK`.
    pub shift: f64,
    /// Largest possible weight, `exp(c a² Vol/4)` for `a < 0`, else 1.
    pub max_weight: f64,
}

pub fn weight_lower_bound<T: Real>(config: &Phi4Config<T>) -> YoungBound {
    let a = config.counterterm;
    let vol = config.support_volume();
    let c = config.coupling;
    if a >= 0.0 {
        return YoungBound {
            delta: None,
            k: 0.0,
            shift: 0.0,
            max_weight: 1.0,
        };
    }
    let delta = (2.0 / (3.0 * a.abs())).sqrt();
    let k = a.abs() / (2.0 * delta * delta) * vol;
    YoungBound {
        delta: Some(delta),
        k,
        shift: c * k,
        max_weight: (c * a * a * vol / 4.0).exp(),
    }
}

/// `−3 × mean over supp ρ of Σ_k m_k e_k(x)²`.
pub fn default_counterterm<T: Real>(kernel: &CovarianceKernel<T>, rho: &Field<T>) -> T {
    let nodes: Vec<usize> = (0..rho.values().len())
        .filter(|&v| rho.values()[v] > T::zero())
        .collect();
    if nodes.is_empty() {
        return T::zero();
    }
    let total = nodes
        .iter()
        .fold(T::zero(), |acc, &v| acc + kernel.pointwise_variance(v));
    -lit::<T>(3.0) * total / lit(nodes.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    /// Control-variate estimate `gaussian + (ratio − mean X)`.
    pub value: f64,
    /// Delta-method standard error of the self-normalised ratio.
    pub std_error: f64,
    /// Self-normalised ratio `Σ X G / Σ G`.
    pub ratio: f64,
    /// Influence-function standard error of `value`.
    pub control_variate_std_error: f64,
    /// Exact Gaussian pairing `⟨ρΘf, C_Λ ρf⟩`.
    pub gaussian_value: f64,
    pub num_samples: usize,
    /// Estimate of `Z = E[G]`.
    pub weight_mean: f64,
    pub effective_sample_size: f64,
    pub max_weight: f64,
    pub coupling: f64,
    pub counterterm: f64,
}

/// Self-normalised importance estimate of `E_ν[(ρΦ)(Θf)·(ρΦ)(f)]`.
pub fn estimate_rp_pairing<T: Real + Send + Sync>(f: &Field<T>, config: &Phi4Config<T>) -> Result<MCEstimate> {
    config.validate()?;
    let basis = config.rho.basis();
    if !f.same_basis(basis) {
        return Err(Error::GeometryMismatch);
    }
    let plus = basis.geometry().partition().plus;
    let norm = to_f64(f.norm());
    let leak = to_f64(f.norm_outside(&plus));
    if leak > 1e-12 * norm {
        return Err(Error::Support(format!("f leaks {leak:e} outside the plus region")));
    }
    let kernel = CovarianceKernel::cut(basis.clone(), config.cutoff);
    let rf = config.rho.multiply(f)?;
    let rtf = config.rho.multiply(&f.reflect())?;
    let gaussian = to_f64(covariance_pairing(&rtf, &rf, &kernel)?);
    let active = kernel.active_modes();
    let full = vec![1.0; basis.num_nodes()];

    let draws: Vec<(f64, f64)> = (0..config.num_samples as u64)
        .into_par_iter()
        .map(|i| {
            let z = sample_coefficients(&kernel, config.seed, i);
            let (mut pf, mut pt) = (T::zero(), T::zero());
            for &k in &active {
                pf += z[k] * rf.coeffs()[k];
                pt += z[k] * rtf.coeffs()[k];
            }
            let v = if config.coupling == 0.0 {
                T::zero()
            } else {
                interaction_exponent(&basis.synthesize(&z), config, &full)
            };
            (to_f64(pt * pf), to_f64(v))
        })
        .collect();

    let n = draws.len() as f64;
    let v_min = draws.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    let g: Vec<f64> = draws.iter().map(|d| (-(d.1 - v_min)).exp()).collect();
    let x: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let sum_g: f64 = g.iter().sum();
    let sum_g2: f64 = g.iter().map(|w| w * w).sum();
    let ess = sum_g * sum_g / sum_g2;
    if !(ess >= MIN_ESS) {
        return Err(Error::DegenerateWeights { ess });
    }
    let ratio = x.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / sum_g;
    let mean_x = x.iter().sum::<f64>() / n;
    let se_ratio = x
        .iter()
        .zip(&g)
        .map(|(a, b)| (b * (a - ratio)).powi(2))
        .sum::<f64>()
        .sqrt()
        / sum_g;
    let mean_g = sum_g / n;
    let se_cv = (x
        .iter()
        .zip(&g)
        .map(|(a, b)| ((a - ratio) * b / mean_g - (a - mean_x)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / n.sqrt();
    Ok(MCEstimate {
        value: gaussian + (ratio - mean_x),
        std_error: se_ratio,
        ratio,
        control_variate_std_error: se_cv,
        gaussian_value: gaussian,
        num_samples: config.num_samples,
        weight_mean: (-v_min).exp() * mean_g,
        effective_sample_size: ess,
        max_weight: (-v_min).exp() * g.iter().copied().fold(0.0, f64::max),
        coupling: config.coupling,
        counterterm: config.counterterm,
    })
}

/// Estimates at each coupling with common random numbers.
pub fn coupling_sweep<T: Real + Send + Sync>(
    f: &Field<T>,
    config: &Phi4Config<T>,
    couplings: &[f64],
) -> Result<Vec<MCEstimate>> {
    couplings
        .iter()
        .map(|&c| estimate_rp_pairing(f, &config.with_coupling(c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_basis, Geometry};

    fn config(coupling: f64, a: f64) -> Phi4Config<f64> {
        let basis = build_basis::<f64>(&Geometry::circle(32).unwrap());
        Phi4Config::new(
            &basis,
            RhoSpec::new(2.4, 3.0),
            CutoffSpec::sharp(3.0),
            coupling,
            Some(a),
            100,
            0,
        )
        .unwrap()
    }

    #[test]
    fn zero_coupling_weight_is_one() {
        let cfg = config(0.0, -1.0);
        let f = Field::from_fn(cfg.rho.basis().clone(), |x| x[0].cos());
        assert_eq!(interaction_weight(&f, &cfg, &[1.0; 32]), 1.0);
    }

    #[test]
    fn constant_field_on_flat_rho() {
        let basis = build_basis::<f64>(&Geometry::circle(32).unwrap());
        let mut cfg = config(1.0, 0.0);
        cfg.rho = Field::from_values(basis.clone(), vec![1.0; 32]);
        cfg.core_mask = vec![true; 32];
        cfg.support_mask = vec![true; 32];
        let one = Field::from_values(basis, vec![1.0; 32]);
        let w = interaction_weight(&one, &cfg, &[1.0; 32]);
        assert!((w - (-std::f64::consts::TAU).exp()).abs() < 1e-14);
    }

    #[test]
    fn young_bound_for_unit_parameters() {
        let mut cfg = config(1.0, -1.0);
        cfg.support_mask = vec![false; 32];
        for v in 0..32 {
            cfg.support_mask[v] = v < 5;
        }
        let b = weight_lower_bound(&cfg);
        let d = b.delta.unwrap();
        assert!((d * d / 2.0 - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.k - 0.75 * cfg.support_volume()).abs() < 1e-14);
    }

    #[test]
    fn nonnegative_counterterm_has_zero_shift() {
        let b = weight_lower_bound(&config(0.5, 0.0));
        assert_eq!(b.k, 0.0);
        assert_eq!(b.max_weight, 1.0);
    }

    #[test]
    fn zero_kernel_counterterm_vanishes() {
        let cfg = config(0.0, 0.0);
        let k = CovarianceKernel::zero(cfg.rho.basis().clone());
        assert_eq!(default_counterterm(&k, &cfg.rho), 0.0);
    }
}
