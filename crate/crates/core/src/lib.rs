//! Hilbert C*-modules over matrix algebras, viewed as JB*-triples.
//!
//! The model is `A = M_n(C)` acting on `E = M_{m×n}(C)` from the right, with
//! A-valued inner product `⟨x, y⟩ = x*y`. On top of it the crate provides the
//! canonical triple product `2{x,y,z} = x⟨y,z⟩ + z⟨y,x⟩`, the Bergmann operator
//! and its square root, explicit transvections of the open unit ball, the
//! extreme-point classification, and a seeded verification harness
//! ([`suites`]) that checks all of the above on random instances.

pub mod ball_geometry;
pub mod cstar_algebra;
pub mod error;
pub mod extremal;
pub mod fixture;
pub mod hilbert_module;
pub mod jb_triple;
pub mod sampling;
pub mod suites;
pub mod tolerance;

pub use ball_geometry::{
    apply_automorphism, bergmann, bergmann_factored, bergmann_sqrt, mobius_denominator, transvect,
    transvect_inverse_check, BallPoint, Transvection,
};
pub use cstar_algebra::{
    adjoint, c64, invert, loewner_geq, op_norm, spectrum_hermitian, sqrt_psd, unitary_exp,
    AlgebraElement, Inverse, Mat, C64,
};
pub use error::{Error, Result};
pub use extremal::{classify, is_tripotent, search_outside_families, ExtremeClassification};
pub use hilbert_module::{
    a_valued_norm, adjoint_op, cauchy_schwarz_residual, inner, is_a_linear, is_positive_op,
    module_action, module_norm, right_mult, theta, ModuleElement, ModuleOperator, ModuleSpace,
    OperatorTag,
};
pub use jb_triple::{Axiom3Report, Mutation, TripleSystem};
pub use tolerance::ToleranceConfig;
