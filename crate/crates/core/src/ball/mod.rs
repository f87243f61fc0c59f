//! Midpoint-radius ("ball") arithmetic over arbitrary-precision reals and
//! complex numbers.
//!
//! Midpoints are MPFR floats rounded to nearest at the working precision;
//! radii are low-precision floats that are only ever rounded upward, so every
//! operation returns a ball containing the exact result for every choice of
//! operands inside the input balls. Working precision travels with the
//! values; there is no ambient precision state.

mod complex;
mod decimal;
mod mag;
mod real;

pub use complex::BallComplex;
pub use decimal::parse_decimal;
pub use real::BallReal;

use rug::float::{Round, Special};
use rug::Float;

/// Precision of radius values.
pub const RAD_PREC: u32 = 32;

/// Smallest working precision accepted by the transcendental operations.
pub const MIN_PREC: u32 = 2;

pub(crate) fn mag_zero() -> Float {
    Float::new(RAD_PREC)
}

pub(crate) fn mag_inf() -> Float {
    Float::with_val(RAD_PREC, Special::Infinity)
}

/// `|v|` rounded up to a radius value.
pub(crate) fn mag_of(v: &Float) -> Float {
    if v.is_nan() {
        return mag_inf();
    }
    Float::with_val_round(RAD_PREC, v.abs_ref(), Round::Up).0
}

/// `|v|` rounded down to a radius value.
pub(crate) fn mag_lower_of(v: &Float) -> Float {
    if v.is_nan() {
        return mag_zero();
    }
    Float::with_val_round(RAD_PREC, v.abs_ref(), Round::Down).0
}

pub(crate) fn add_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a + b, Round::Up).0
}

pub(crate) fn mul_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a * b, Round::Up).0
}

pub(crate) fn div_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a / b, Round::Up).0
}

/// `sqrt(a^2 + b^2)` rounded up; used to turn a rectangle into a disc.
pub(crate) fn hypot_up(a: &Float, b: &Float) -> Float {
    let aa = mul_up(a, a);
    let bb = mul_up(b, b);
    let s = add_up(&aa, &bb);
    Float::with_val_round(RAD_PREC, s.sqrt_ref(), Round::Up).0
}
