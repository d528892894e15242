//! Half-line witness: `h = φ^(2n)` with a negative `κ`-integral on `[1, 2]`.

use std::sync::Arc;

use super::bump::BumpSpec;
use super::certificate::{WitnessCertificate, WitnessKind};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{build_basis, Field, Geometry, GeometryKind, SpectralBasis};

pub const DEFAULT_POINTS: usize = 16384;
/// Half-extent of the grid in units of the bump's right end.
pub const HALF_EXTENT_FACTOR: f64 = 2.0;
pub const KAPPA_MIN: f64 = 1.0;
pub const KAPPA_MAX: f64 = 2.0;
pub const KAPPA_POINTS: usize = 21;
const XI_NODES: usize = 64;
const AGREEMENT: f64 = 1e-3;

/// The 21 equispaced values of `κ` in `[1, 2]`.
pub fn kappa_grid() -> Vec<f64> {
    (0..KAPPA_POINTS)
        .map(|i| KAPPA_MIN + (KAPPA_MAX - KAPPA_MIN) * i as f64 / (KAPPA_POINTS - 1) as f64)
        .collect()
}

/// Periodic grid centred on 0 with half-extent `2(center + width)`.
pub fn halfline_geometry(spec: &BumpSpec, points: usize) -> Result<Geometry> {
    let half = HALF_EXTENT_FACTOR * (spec.center + spec.width);
    Geometry::periodic_grid(&[2.0 * half], &[points])
}

/// Cosine and sine transforms `A(ξ) = ∫h cos ξx`, `B(ξ) = ∫h sin ξx` on
/// Gauss–Legendre nodes of `[0, 1]`, from which the `κ`-integral follows.
#[derive(Clone, Debug)]
pub struct KappaIntegrand {
    xi: Vec<f64>,
    weights: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl KappaIntegrand {
    pub fn new<T: Real>(h: &Field<T>) -> Result<Self> {
        let geom = h.geometry();
        if !matches!(geom.kind(), GeometryKind::PeriodicGrid { .. }) || geom.dim() != 1 {
            return Err(Error::Precondition(
                "h must live on a one-dimensional periodic grid".into(),
            ));
        }
        let n = geom.num_nodes();
        let dx = geom.axes()[0].spacing();
        let mut support = Vec::new();
        for (i, &v) in h.values().iter().enumerate() {
            if v == T::zero() {
                continue;
            }
            let x = geom.coordinates(i)[0];
            if x <= 0.0 {
                return Err(Error::Support(format!("h is nonzero at x = {x} ≤ 0")));
            }
            if i + 1 >= n / 2 {
                return Err(Error::Support(format!("h reaches the grid end at x = {x}")));
            }
            support.push((x, to_f64(v)));
        }
        let (xi, weights) = gauss_legendre(XI_NODES, 0.0, 1.0);
        let a = xi
            .iter()
            .map(|&s| support.iter().map(|&(x, v)| v * (s * x).cos()).sum::<f64>() * dx)
            .collect();
        let b = xi
            .iter()
            .map(|&s| support.iter().map(|&(x, v)| v * (s * x).sin()).sum::<f64>() * dx)
            .collect();
        Ok(KappaIntegrand { xi, weights, a, b })
    }

    /// `∫_{−1}^{1} ĥ(−ξ)* ĥ(ξ) / (ξ² + κ) dξ`.
    pub fn evaluate(&self, kappa: f64) -> f64 {
        2.0 * (0..self.xi.len())
            .map(|i| {
                let (a, b) = (self.a[i], self.b[i]);
                self.weights[i] * (a * a - b * b) / (self.xi[i] * self.xi[i] + kappa)
            })
            .sum::<f64>()
    }
}

/// `∫_{−1}^{1} ĥ(−ξ)* ĥ(ξ) dξ / (ξ² + κ)` by quadrature of the grid transform.
pub fn kappa_integral<T: Real>(h: &Field<T>, kappa: f64) -> Result<f64> {
    Ok(KappaIntegrand::new(h)?.evaluate(kappa))
}

/// Transforms of the closed-form bump, accurate to near rounding.
pub fn bump_transform(spec: &BumpSpec, xi: f64) -> (f64, f64) {
    let (lo, hi) = spec.support();
    let a = integrate(|x| spec.value(x) * (xi * x).cos(), lo, hi, 16, 64);
    let b = integrate(|x| spec.value(x) * (xi * x).sin(), lo, hi, 16, 64);
    (a, b)
}

/// `∫₀¹ ξ^{4n}(A_φ² − B_φ²)/(ξ²+κ) dξ ÷ ∫₀¹ ξ^{4n}/(ξ²+κ) dξ`.
///
/// As `n → ∞` this tends to `A_φ(1)² − B_φ(1)²`.
pub fn weighted_ratio(spec: &BumpSpec, n: u32, kappa: f64) -> f64 {
    let (xi, w) = gauss_legendre(256, 0.0, 1.0);
    let mut num = 0.0;
    let mut den = 0.0;
    for (&s, &wt) in xi.iter().zip(&w) {
        let (a, b) = bump_transform(spec, s);
        let p = (4.0 * n as f64 * s.ln()).exp() / (s * s + kappa);
        num += wt * p * (a * a - b * b);
        den += wt * p;
    }
    num / den
}

/// Predicted `κ`-integral of `S·φ^(2n)` with `ln S = log_scale`.
pub fn predicted_integral(spec: &BumpSpec, n: u32, log_scale: f64, kappa: f64) -> f64 {
    let (xi, w) = gauss_legendre(XI_NODES, 0.0, 1.0);
    2.0 * xi
        .iter()
        .zip(&w)
        .map(|(&s, &wt)| {
            let (a, b) = bump_transform(spec, s);
            let p = (2.0 * log_scale + 4.0 * n as f64 * s.ln()).exp();
            wt * p * (a * a - b * b) / (s * s + kappa)
        })
        .sum::<f64>()
}

#[derive(Clone, Debug)]
pub struct HalflineWitness<T> {
    /// `h = S·φ^(2n)`, unit `L²` norm.
    pub h: Field<T>,
    pub certificate: WitnessCertificate,
    pub bump: BumpSpec,
    pub n: u32,
    /// `ln S`.
    pub log_scale: f64,
}

/// `S·φ^(2n)` on the grid of `basis`, truncated to the bump support and
/// normalised; returns the field and `ln S`.
pub fn bump_derivative<T: Real>(basis: &Arc<SpectralBasis<T>>, spec: &BumpSpec, n: u32) -> (Field<T>, f64) {
    derivative_from(basis, spec, &bump_coefficients(basis, spec), n)
}

fn bump_coefficients<T: Real>(basis: &SpectralBasis<T>, spec: &BumpSpec) -> Vec<T> {
    let geom = basis.geometry();
    let phi: Vec<T> = (0..geom.num_nodes())
        .map(|v| lit(spec.value(geom.coordinates(v)[0])))
        .collect();
    basis.analyze(&phi)
}

fn derivative_from<T: Real>(basis: &Arc<SpectralBasis<T>>, spec: &BumpSpec, c: &[T], n: u32) -> (Field<T>, f64) {
    let geom = basis.geometry();
    let logs: Vec<Option<f64>> = c
        .iter()
        .zip(basis.eigenvalues())
        .map(|(&ck, &lk)| {
            let (ck, lk) = (to_f64(ck), to_f64(lk));
            if ck == 0.0 || (lk == 0.0 && n > 0) {
                None
            } else {
                Some(ck.abs().ln() + n as f64 * lk.ln())
            }
        })
        .collect();
    let top = logs.iter().flatten().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let d: Vec<T> = logs
        .iter()
        .zip(c)
        .map(|(l, &ck)| match l {
            Some(l) => lit(sign * to_f64(ck).signum() * (l - top).exp()),
            None => T::zero(),
        })
        .collect();
    let raw = Field::from_coeffs(basis.clone(), d);
    let mask: Vec<bool> = (0..geom.num_nodes())
        .map(|v| spec.contains(geom.coordinates(v)[0]))
        .collect();
    let cut = raw.restrict(&mask);
    let norm = to_f64(cut.norm());
    (cut.scale(lit(1.0 / norm)), -top - norm.ln())
}

/// Builds `h = φ^(2n)` with `n` doubling from 2 until the `κ`-integral is
/// negative on the whole `κ` grid and agrees with the closed-form
/// prediction, on the default grid.
pub fn build_halfline_witness<T: Real>(spec: &BumpSpec) -> Result<HalflineWitness<T>> {
    build_halfline_witness_on(spec, DEFAULT_POINTS)
}

pub fn build_halfline_witness_on<T: Real>(spec: &BumpSpec, points: usize) -> Result<HalflineWitness<T>> {
    spec.validate()?;
    let basis = build_basis::<T>(&halfline_geometry(spec, points)?);
    let kappas = kappa_grid();
    let coeffs = bump_coefficients(&basis, spec);
    let mut best = f64::INFINITY;
    let mut n = 2u32;
    while n <= spec.derivative_order_cap {
        let (h, log_scale) = derivative_from(&basis, spec, &coeffs, n);
        let integrand = KappaIntegrand::new(&h)?;
        let values: Vec<f64> = kappas.iter().map(|&k| integrand.evaluate(k)).collect();
        let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        best = best.min(worst);
        if worst < 0.0 {
            let predicted: Vec<f64> = kappas
                .iter()
                .map(|&k| predicted_integral(spec, n, log_scale, k))
                .collect();
            let agree = values
                .iter()
                .zip(&predicted)
                .all(|(v, p)| (v - p).abs() <= AGREEMENT * p.abs());
            if agree {
                let at = values.iter().position(|&v| v == worst).unwrap_or(0);
                let mut certificate = WitnessCertificate::new(WitnessKind::Halfline, worst)
                    .param("kappa_min", KAPPA_MIN)
                    .param("kappa_max", KAPPA_MAX)
                    .param("kappa_points", KAPPA_POINTS as f64)
                    .param("kappa_at_value", kappas[at])
                    .param("grid_points", points as f64)
                    .param("most_negative", values.iter().copied().fold(f64::INFINITY, f64::min));
                certificate.predicted = Some(predicted[at]);
                certificate.n = Some(n);
                return Ok(HalflineWitness {
                    h,
                    certificate,
                    bump: *spec,
                    n,
                    log_scale,
                });
            }
        }
        n *= 2;
    }
    Err(Error::ConstructionFailed {
        reason: format!(
            "no n ≤ {} gave a certified negative κ-integral on [1, 2]; refine the grid or narrow the bump",
            spec.derivative_order_cap
        ),
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_grid_has_21_points() {
        let k = kappa_grid();
        assert_eq!(k.len(), 21);
        assert_eq!(k[0], 1.0);
        assert_eq!(k[20], 2.0);
    }

    #[test]
    fn plain_bump_has_positive_integral() {
        let spec = BumpSpec::default();
        let basis = build_basis::<f64>(&halfline_geometry(&spec, 1024).unwrap());
        let phi = Field::from_fn(basis, |x| spec.value(x[0]));
        assert!(kappa_integral(&phi, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn support_at_origin_is_rejected() {
        let spec = BumpSpec::default();
        let basis = build_basis::<f64>(&halfline_geometry(&spec, 256).unwrap());
        let bad = Field::from_fn(basis, |x| if x[0].abs() < 0.5 { 1.0 } else { 0.0 });
        assert!(matches!(kappa_integral(&bad, 1.0), Err(Error::Support(_))));
    }

    #[test]
    fn weighted_ratio_tends_to_endpoint_sign() {
        let spec = BumpSpec::default();
        let (a, b) = bump_transform(&spec, 1.0);
        let limit = a * a - b * b;
        assert!(limit < 0.0);
        let r = weighted_ratio(&spec, 64, 1.0);
        assert!(r < 0.0);
        assert!((r - limit).abs() < 0.1 * limit.abs());
    }
}
