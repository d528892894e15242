//! Spectrally cut-off Gaussian free fields on compact and periodic
//! geometries, with explicit witnesses that the cutoff destroys reflection
//! positivity and the spatial Markov property.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`); the
//! aliases at the bottom of this module fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod markov;
pub mod phi4;
pub mod quadrature;
pub mod rp;
pub mod scalar;
pub mod spectral;
pub mod witness;

pub use error::{Error, Result};
pub use markov::{
    build_discrete_gff, conditional_predictor, markov_discrepancy, GaussianModel, MarkovReport, MarkovVerdict,
};
pub use phi4::{
    coupling_sweep, default_counterterm, estimate_rp_pairing, interaction_weight, weight_lower_bound, MCEstimate,
    Phi4Config, YoungBound,
};
pub use rp::{assemble_rp_gram, certify_rp, RPReport, RpVerdict};
pub use scalar::Real;
pub use spectral::{
    apply_cutoff, build_basis, covariance_pairing, reflect, sample_gff, CovarianceKernel, CutoffKind, CutoffSpec,
    Field, Geometry, GeometryKind, RegionPartition, RhoSpec, SpectralBasis,
};
pub use witness::{
    build_compact_witness, build_cylinder_witness, build_halfline_witness, fit_fourier_restriction,
    halfspace_certificate, kappa_integral, BumpSpec, WitnessCertificate, WitnessKind,
};

pub type Basis64 = SpectralBasis<f64>;
pub type Field64 = Field<f64>;
pub type Kernel64 = CovarianceKernel<f64>;
pub type Model64 = GaussianModel<f64>;
pub type Phi4Config64 = Phi4Config<f64>;
