//! Transfer operators on Chebyshev collocation grids, the Fredholm
//! determinant det(I − L_s), its zeros, and the Bowen dimension.

pub mod chebyshev;
pub mod dimension;
pub mod eigen;
pub mod operator;
pub mod zeros;
pub mod zeta;

pub use chebyshev::{ChebyshevNodes, CollocationGrid};
pub use dimension::{bowen_dimension, bowen_dimension_with, DimensionEstimate, DIMENSION_NODES};
pub use eigen::{eigenfunction_at_zero, smallest_singular_values, EigenSummary, Eigenfunction};
pub use operator::{assemble_transfer, complex_power, TransferMatrix, TransferOperator};
pub use zeros::{find_zeros, Rect, Zero, ZeroList, ZeroSearchOptions};
pub use zeta::{zeta_det, zeta_grid, CertifiedDet, ZetaEvaluator};
