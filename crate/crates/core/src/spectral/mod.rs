pub mod basis;
pub mod cutoff;
pub mod field;
pub mod geometry;
pub mod kernel;
pub mod rho;
pub mod sampling;

pub use basis::{build_basis, AxisMode, SpectralBasis, Trig};
pub use cutoff::{plateau, smooth_step, CutoffKind, CutoffSpec};
pub use field::{apply_cutoff, reflect, Field};
pub use geometry::{Axis, Geometry, GeometryKind, RegionPartition, Side};
pub use kernel::{covariance_pairing, CovarianceKernel, KernelKind, MASS};
pub use rho::RhoSpec;
pub use sampling::{keyed_normal, sample_coefficient_batch, sample_coefficients, sample_gff};
