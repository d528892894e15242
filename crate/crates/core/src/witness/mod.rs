pub mod bump;
pub mod certificate;
pub mod compact;
pub mod cylinder;
pub mod halfline;
pub mod halfspace;

pub use bump::BumpSpec;
pub use certificate::{WitnessCertificate, WitnessKind};
pub use compact::{build_compact_witness, build_compact_witness_within, CompactWitness};
pub use cylinder::{build_cylinder_witness, CylinderWitness};
pub use halfline::{
    build_halfline_witness, build_halfline_witness_on, kappa_integral, weighted_ratio, HalflineWitness,
};
pub use halfspace::{
    fit_fourier_restriction, halfspace_certificate, halfspace_pairing, limit_integral, RestrictionFit,
};
