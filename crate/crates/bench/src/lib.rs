//! Shared workloads for the criterion benches.

use heckeval::hecke::{eigenvalue_numerical, HeckeEigenvalue, Method};
use heckeval::qexp::EigenformHandle;
use rug::Float;

/// `10^-digits` as a 64-bit float.
pub fn eps(digits: u32) -> Float {
    Float::with_val(64, Float::i_pow_u(10, digits)).recip()
}

/// One eigenvalue of the first level-one eigenform of weight `k`,
/// building the form from scratch.
pub fn level1_eigenvalue(k: u32, p: u64, digits: u32, method: Method) -> HeckeEigenvalue {
    let f = EigenformHandle::level1(k, 0).expect("nonzero cusp space");
    eigenvalue_numerical(&f, p, &eps(digits), None, None, method).expect("eigenvalue")
}

/// Rows of the timing table: `(weight, prime)`.
pub const TABLE: [(u32, u64); 6] = [(12, 101), (12, 1009), (12, 10007), (24, 101), (100, 101), (200, 101)];
