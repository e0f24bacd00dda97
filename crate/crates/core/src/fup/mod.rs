//! Numerical fractal uncertainty: the operators B_χ(h) and B(s) on the
//! circle, their norms on limit-set neighbourhoods, and diagnostics.

pub mod circulant;
pub mod cutoff;
pub mod equivariance;
pub mod fourier;
pub mod grid;
pub mod kernel;
pub mod localization;
pub mod norm;
pub mod stationary;

pub use circulant::Circulant;
pub use cutoff::{smooth_step, Bump, KernelCutoff, PowerCutoff, RadialCutoff};
pub use equivariance::{equivariance_residual, equivariance_residual_for_word, EquivarianceResult};
pub use fourier::{semiclassical_fourier, FourierTransform, SampledFunction};
pub use grid::{grid_size_for, CircleGrid};
pub use kernel::{build_b_chi, build_b_s, FupKind, FupOperator};
pub use localization::{
    eigenfunction_localization, fourier_localization, LetterProfile, LocalizationProfile,
};
pub use norm::{
    circulant_b_chi, circulant_b_s, fit_beta, limit_set_mask, norm_scan, restricted_norm,
    restricted_norm_certified, restricted_norm_on, separated_norm, ExponentFit, NormMeasurement,
};
pub use stationary::{stationary_point_check, StationaryCheck};
