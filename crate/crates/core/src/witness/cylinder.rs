//! Cylinder witness `f(t, y) = Λ g(t) χ̃(y)` with `g` the `n`-th lattice
//! second difference of `φ(Λt)` and `χ̃` the low-frequency part of a slice
//! function.

use std::sync::Arc;

use super::bump::BumpSpec;
use super::certificate::{WitnessCertificate, WitnessKind};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{build_basis, CovarianceKernel, CutoffSpec, Field, Geometry, GeometryKind, SpectralBasis};

pub const DEFAULT_TIME_POINTS: usize = 128;
pub const DEFAULT_TIME_EXTENT: f64 = 2.0 * std::f64::consts::PI;
pub const DEFAULT_SLICE_POINTS: usize = 32;
/// Slice eigenvalues kept in `χ̃`.
pub const SLICE_BAND: f64 = 1.0;
pub const MIN_SLICE_MASS: f64 = 1e-8;

pub fn default_cylinder() -> Result<Geometry> {
    Geometry::cylinder(DEFAULT_TIME_POINTS, DEFAULT_TIME_EXTENT, DEFAULT_SLICE_POINTS)
}

#[derive(Clone, Debug)]
pub struct CylinderWitness<T> {
    pub f: Field<T>,
    pub certificate: WitnessCertificate,
    /// Pairing of the same `f` under the uncut kernel.
    pub uncut_pairing: T,
}

/// Time profile: `n` applications of the periodic second difference to
/// `φ(Λt)` on the nodes of a time axis of `points` nodes and spacing `dt`.
pub fn time_profile(bump: &BumpSpec, n: u32, lambda: f64, points: usize, dt: f64) -> Vec<f64> {
    let t = |i: usize| {
        if 2 * i > points {
            (i as f64 - points as f64) * dt
        } else {
            i as f64 * dt
        }
    };
    let mut g: Vec<f64> = (0..points).map(|i| bump.value(lambda * t(i))).collect();
    for _ in 0..n {
        g = (0..points)
            .map(|i| {
                let prev = g[(i + points - 1) % points];
                let next = g[(i + 1) % points];
                (prev - 2.0 * g[i] + next) / (dt * dt)
            })
            .collect();
    }
    g
}

/// Builds the witness on `cylinder` for cutoff `lambda`, using the bump and
/// derivative order of a half-line witness. `chi` gives slice values
/// (default: the constant slice mode).
pub fn build_cylinder_witness<T: Real>(
    lambda: f64,
    cylinder: &Geometry,
    bump: &BumpSpec,
    n: u32,
    chi: Option<&[T]>,
) -> Result<CylinderWitness<T>> {
    let (time_points, time_extent, slice_points) = match cylinder.kind() {
        GeometryKind::Cylinder {
            time_points,
            time_extent,
            slice_points,
        } => (*time_points, *time_extent, *slice_points),
        _ => return Err(Error::Precondition("geometry must be a cylinder".into())),
    };
    if cylinder.reflection_axis() != 0 {
        return Err(Error::Precondition("the reflection must act on the time axis".into()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::config("cutoff.lambda", "must be a positive real"));
    }
    bump.validate()?;

    let slice_basis: Arc<SpectralBasis<T>> = build_basis(&Geometry::circle(slice_points)?);
    let chi_values: Vec<T> = match chi {
        Some(v) if v.len() != slice_points => {
            return Err(Error::config(
                "chi",
                format!("expected {slice_points} slice values, got {}", v.len()),
            ))
        }
        Some(v) => v.to_vec(),
        None => vec![T::one(); slice_points],
    };
    let chi_field = Field::from_values(slice_basis.clone(), chi_values);
    let band = slice_basis.count_at_most(lit(SLICE_BAND));
    let low = chi_field.map_spectrum(|k| if k < band { T::one() } else { T::zero() });
    let mass = to_f64(low.coeff_norm()).powi(2);
    if mass < MIN_SLICE_MASS {
        return Err(Error::Precondition(format!(
            "slice function has spectral mass {mass:e} below {MIN_SLICE_MASS:e} in the band [0, {SLICE_BAND}]"
        )));
    }

    let dt = time_extent / time_points as f64;
    let g = time_profile(bump, n, lambda, time_points, dt);
    for (i, &v) in g.iter().enumerate() {
        if v != 0.0 && !(2 * i < time_points && i > 0) {
            return Err(Error::Support(format!(
                "time profile is nonzero at node {i}, outside t > 0; refine the time grid or lower n"
            )));
        }
    }

    let basis = build_basis::<T>(cylinder);
    let values: Vec<T> = (0..cylinder.num_nodes())
        .map(|v| {
            let idx = cylinder.multi_index(v);
            lit::<T>(lambda * g[idx[0]]) * low.values()[idx[1]]
        })
        .collect();
    let raw = Field::from_values(basis.clone(), values);
    let f = raw.scale(T::one() / raw.norm());

    let cut = CovarianceKernel::cut(basis.clone(), CutoffSpec::sharp(lambda));
    let reflected = f.reflect();
    let value = to_f64(cut.pairing(&reflected, &f)?);
    let uncut_pairing = CovarianceKernel::uncut(basis).pairing(&reflected, &f)?;
    if !(value < 0.0) {
        return Err(Error::ConstructionFailed {
            reason: "reflected cut-off pairing of the cylinder function is not negative".into(),
            best: value,
        });
    }
    let mut certificate = WitnessCertificate::new(WitnessKind::Cylinder, value)
        .param("lambda", lambda)
        .param("slice_spectral_mass", mass)
        .param("time_points", time_points as f64)
        .param("time_extent", time_extent)
        .param("slice_points", slice_points as f64)
        .param("uncut_pairing", to_f64(uncut_pairing));
    certificate.n = Some(n);
    Ok(CylinderWitness {
        f,
        certificate,
        uncut_pairing,
    })
}
