//! Exact q-expansions: Eisenstein series, the discriminant form, level-one
//! cusp form bases, Hecke matrices and eigenform extraction.

mod arith;
mod basis;
mod eigenform;
mod linalg;
mod poly;
mod series;

pub use arith::{bernoulli, cusp_dimension, exponent_pairs, is_prime, next_prime, primes, sigma, sigma_table};
pub use basis::{cusp_basis, hecke_matrix, CuspBasis};
pub use eigenform::{
    eigenform_coeffs, CoefficientSource, EigenformHandle, Level1Eigenform, MAX_DOUBLINGS, MAX_GENERATOR_PRIMES,
};
pub use linalg::{charpoly_adjugate, IntMatrix};
pub use poly::{isolate_real_roots, refine_root, IntPoly, RootInterval, Sturm};
pub use series::{delta_qexp, eisenstein_qexp, eta_delta_oracle, QExpansion};
