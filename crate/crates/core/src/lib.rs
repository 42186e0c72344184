//! Choi operators, map-dependent characteristic functions, and Gram-matrix
//! diagnostics of complete positivity and CP-divisibility.
//!
//! Every numerical type is generic over a [`Real`] scalar (`f32` or `f64`).
//! The `*64` aliases below fix the scalar to `f64`, which is what the
//! command-line driver and all default tolerances are tuned for.

// `!(x > 0)` style checks are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod channels;
pub mod charfunc;
pub mod dynamics;
pub mod error;
pub mod scalar;

pub use algebra::{hermitian_eigen, hermitian_eigenvalues, invert, invert_with_condition, kron, trace_norm, ComplexMatrix, HermitianMatrix};
pub use channels::{
    choi_from_superop, compose, is_completely_positive, is_trace_preserving, kraus_to_superop, max_entangled_state,
    normalize_choi, random_cp_channel, superop_from_choi, Channel, ChannelFile, ChoiOperator, CpVerdict, KrausChannel,
    Superoperator,
};
pub use charfunc::{
    bochner_choi_check, char_function, gram_matrix, pauli_basis, quadratic_form, weyl_basis, BasisKind,
    BochnerChoiReport, CharFunctionTable, GramMatrix, UnitaryBasis,
};
pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;
pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type HermitianMatrix64 = HermitianMatrix<f64>;
pub type KrausChannel64 = KrausChannel<f64>;
pub type Superoperator64 = Superoperator<f64>;
pub type Superoperator32 = Superoperator<f32>;
pub type ChoiOperator64 = ChoiOperator<f64>;
pub type UnitaryBasis64 = UnitaryBasis<f64>;
pub type GramMatrix64 = GramMatrix<f64>;
pub type RateProfile64 = dynamics::RateProfile<f64>;
pub type DivisibilityReport64 = dynamics::DivisibilityReport<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
