pub mod dense;
pub mod mm;
pub mod norms;
pub mod operator;
pub mod tridiag;

pub use dense::{dense_sym_eigh, EighResult};
pub use mm::{format_matrix_market, parse_matrix_market, read_matrix_market, write_matrix_market};
pub use norms::{weighted_norm, weighted_norm_complex, NormKind};
pub use operator::{OperatorKind, Spectrum, SymmetricOperator};
pub use tridiag::{det_ratio_from_ritz, Tridiagonal};

/// Eigenvalues of a symmetric tridiagonal matrix, ascending.
pub fn tridiag_eigvals(t: &Tridiagonal) -> crate::error::Result<Vec<f64>> {
    t.eigvals()
}

/// `det(T - wI) / det(T - zI)`.
pub fn det_ratio(t: &Tridiagonal, w: num_complex::Complex64, z: num_complex::Complex64) -> crate::error::Result<num_complex::Complex64> {
    t.det_ratio(w, z)
}
