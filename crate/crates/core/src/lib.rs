//! Exact Fadell–Husseini index computations for the Grassmannians
//! `G_n(R^2n)` and `~G_n(R^2n)` under `V -> V^⊥`, and a numerical solver
//! that finds subspaces whose complementary shadows, sections or inertia
//! spectra agree.
//!
//! The algebraic half works entirely over F_2:
//!
//! * [`f2`] packs bit matrices and eliminates them;
//! * [`monomial`] provides graded monomials and polynomials;
//! * [`grassmann`] models Borel's presentation of `H*(G_n(R^{n+k}))`;
//! * [`wreath`] does arithmetic in the cohomology of wreath squares and
//!   produces their Stiefel–Whitney classes;
//! * [`index`] decides when `t^d` falls into the ideal those classes generate.
//!
//! The geometric half ([`geometry`], [`solver`]) is floating point.

// `!(x > tol)` style comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod f2;
pub mod geometry;
pub mod grassmann;
pub mod index;
pub mod monomial;
pub mod solver;
pub mod wreath;

pub use error::{Error, Result};
pub use f2::{in_rowspace, row_reduce, BitMatrix, BitVector, EchelonBasis};

pub use index::{
    closed_form_power, ideal_slice, index_power, kernel_generators, verify_prop_relations,
    verify_t_vanishing, DegreeSliceMatrix, IndexCertificate, Variant,
};
pub use geometry::{
    functional_vector, inertia_char_coeffs, k_map, shadow_functionals, ConvexBody, Functional,
    GrassmannFrame, PlanarValues, PointCloud, Projector, SectionBody,
};
pub use grassmann::{borel_e2_dimension, dual_classes, GrassmannRing, Z2ModuleDecomposition};

pub use monomial::{poly_mul, Alphabet, F2Poly, Monomial};

pub use solver::{
    random_frame, solve_equal_shadows, solve_inertia_split, solve_sections, SolverConfig,
    SolverResult,
};
pub use wreath::{binom_mod2, tensor_expand, TensorForm, WreathBasis, WreathContext, WreathElement};
