//! Numerical toolkit for Grand Lebesgue spaces on finite measure spaces.
//!
//! Covers Lebesgue-Riesz and GLS norms, fundamental functions, Young-Fenchel
//! tail bounds, `L_q → L_p` operator norms of matrices, magic squares, and
//! numerical checks of the GLS extrapolation inequalities.

pub mod error;
pub mod fenchel;
pub mod genfun;
pub mod gls;
pub mod grid;
pub mod magic;
pub mod measure;
pub mod mri;
pub mod opnorm;
pub mod sampling;

pub use error::{GlsError, Result};
pub use genfun::{
    make_boundary, make_classical_grand, make_degenerate, make_power, natural_function, ExponentInterval,
    GenSpec, GeneratingFunction,
};
pub use gls::{classical_grand_norm, fundamental_function, gls_norm};
pub use grid::{sup_over_grid, GridConfig, PGrid, SupResult};
pub use measure::{lp_norm, tail_function, Exponent, GridFunction, MeasureSpace};
pub use fenchel::{h_of_p, tail_bound_check, young_fenchel, FenchelData, TailReport, TailRow};
pub use opnorm::{
    check_sigma_condition, minimal_constant, op_norm_lower, op_norm_oracle, verify_theorem1, MatrixOperator,
    OperatorBoundCertificate, TheoremOptions,
};
pub use magic::{
    check_super_exact, magic_norm_formula, make_doubly_even, make_siamese, make_uniform_magic, validate_magic,
    Convention, MagicSquare,
};
pub use mri::{mri_fundamental, mri_norm, supp_ordering, verify_theorem2, MRINorm, MriSpec, Weight};
