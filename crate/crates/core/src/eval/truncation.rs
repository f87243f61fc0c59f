use rug::Float;

use crate::ball::BallReal;
use crate::error::{Error, Result};

/// Truncation length used when a single term would already meet the tail
/// condition.
pub const FALLBACK_TERMS: u64 = 100;

const BOUND_PREC: u32 = 64;

/// `(k+1)/2` for odd `k`, `(k+2)/2` for even `k`.
pub fn truncation_d(k: u32) -> u32 {
    if k % 2 == 1 {
        (k + 1) / 2
    } else {
        (k + 2) / 2
    }
}

/// Coefficient growth `|a_n| <= scale * n^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailModel {
    pub scale: u32,
    pub exponent: u32,
}

impl TailModel {
    /// Deligne's bound for a normalized cusp eigenform of weight `k`.
    pub fn cusp_form(k: u32) -> Self {
        TailModel { scale: 1, exponent: truncation_d(k) }
    }

    /// `240 σ_3(n) <= 240 ζ(3) n^3` and `504 σ_5(n) <= 504 ζ(5) n^5`.
    pub fn eisenstein(k: u32) -> Option<Self> {
        match k {
            4 => Some(TailModel { scale: 289, exponent: 3 }),
            6 => Some(TailModel { scale: 523, exponent: 5 }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub terms: u64,
    pub tail_bound: Float,
}

/// The bound `C (D+1)/(2πy) e^{-2πyT} T^D` on `|Σ_{n>T} a_n q^n|`, rounded
/// up, or `None` when `T < D/(2πy)` cannot be excluded.
pub fn tail_bound(y: &Float, model: TailModel, t: u64) -> Option<Float> {
    let prec = BOUND_PREC;
    let y = BallReal::exact(Float::with_val(prec, y));
    let two_pi_y = BallReal::pi(prec).mul_2si(1).mul(&y);
    let tb = BallReal::from_integer(&t.into(), prec);
    let d = model.exponent;
    if tb.mul(&two_pi_y).lower() < d {
        return None;
    }
    let lead = BallReal::from_i64(model.scale as i64 * (d as i64 + 1), prec);
    let decay = two_pi_y.mul(&tb).neg().exp();
    let bound = lead.div(&two_pi_y).ok()?.mul(&decay).mul(&tb.pow_u(d as u64));
    bound.is_finite().then(|| bound.upper())
}

/// Approximate smallest qualifying `T`, from `f64` logarithms.
fn estimate(y: f64, model: TailModel, eps: f64) -> u64 {
    let two_pi_y = 2.0 * std::f64::consts::PI * y;
    let d = model.exponent as f64;
    let log_eps = if eps > 0.0 { eps.ln() } else { -745.0 };
    let log_bound = |t: f64| (model.scale as f64 * (d + 1.0) / two_pi_y).ln() - two_pi_y * t + d * t.ln();
    let mut lo = (d / two_pi_y).ceil().max(1.0);
    if !lo.is_finite() || log_bound(lo) < log_eps {
        return if lo.is_finite() { lo as u64 } else { 1 };
    }
    let mut hi = lo * 2.0;
    while log_bound(hi) >= log_eps {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return u64::MAX / 4;
        }
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if log_bound(mid) < log_eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi as u64
}

fn qualifies(y: &Float, model: TailModel, t: u64, eps: &Float) -> bool {
    tail_bound(y, model, t).is_some_and(|b| b < *eps)
}

/// Smallest `T` satisfying both tail conditions for `y = Im z` (a lower
/// bound) and accuracy `eps`; `T = 1` is replaced by [`FALLBACK_TERMS`].
pub fn choose_truncation_with(y: &Float, model: TailModel, eps: &Float) -> Result<Truncation> {
    if !(eps.is_finite() && *eps > 0) {
        return Err(Error::NonPositiveAccuracy);
    }
    if !(y.is_finite() && *y > 0) {
        return Err(Error::NonPositiveImaginaryPart);
    }
    // locate T with a floating-point estimate, then settle it rigorously;
    // the predicate is monotone in T
    let mut hi = estimate(y.to_f64(), model, eps.to_f64()).max(1);
    while !qualifies(y, model, hi, eps) {
        hi = hi.checked_add(1 + hi / 64).ok_or(Error::PrecisionExhausted(crate::error::Stage::Evaluation))?;
    }
    while hi > 1 && qualifies(y, model, hi - 1, eps) {
        hi -= 1;
    }
    let terms = if hi == 1 { FALLBACK_TERMS } else { hi };
    let tail_bound = tail_bound(y, model, terms).expect("qualifying truncation has a finite bound");
    Ok(Truncation { terms, tail_bound })
}

/// Truncation for a cusp eigenform of weight `k`.
pub fn choose_truncation(y: &Float, k: u32, eps: &Float) -> Result<Truncation> {
    choose_truncation_with(y, TailModel::cusp_form(k), eps)
}
