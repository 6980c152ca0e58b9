//! Dense complex linear algebra: matrices, norms, decompositions, normal
//! operators in spectral form and block lifts.

pub mod class;
pub mod decomp;
pub mod lift;
pub mod matrix;
pub mod norm;
pub mod normal;

pub use class::OperatorClass;
pub use decomp::{haar_unitary, hermitian_eigen, jacobi_svd, qr, singular_values, HermitianEigen, Svd};
pub use lift::{antidiag_sym, corner, diag2, swap, unitary_dilation};
pub use matrix::ComplexMatrix;
pub use norm::{operator_norm, power_norm, LinearOperator, PowerResult};
pub use normal::{apply_function, conjugate_diag, hermitian_function, make_normal, NormalOperator};
