use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::ball::BallComplex;
use crate::error::{Error, Result};

/// Ladder length of the coarse estimate: `0.1, 0.01, ..., 10^-30`.
pub const COARSE_STEPS: u32 = 30;

const BUDGET_PREC: u32 = 64;

/// Budgets are kept this fraction below the strict bounds they must respect.
fn margin(x: Float) -> Float {
    let shrink = Float::with_val(BUDGET_PREC, 1) - (Float::with_val(BUDGET_PREC, 1) >> 10);
    Float::with_val_round(BUDGET_PREC, x * shrink, Round::Down).0
}

fn min(a: Float, b: Float) -> Float {
    if a < b {
        a
    } else {
        b
    }
}

/// Accuracy targets for the numerator `x = T_p f(z0)` and the denominator
/// `y = f(z0)` that make `|x/y - x_A/y_A| < eps`.
#[derive(Clone, Debug)]
pub struct ErrorBudget {
    pub eps: Float,
    pub h: f64,
    pub eps_x: Float,
    pub eps_y: Float,
    pub per_term: Vec<Float>,
}

impl ErrorBudget {
    /// `y_lower <= |y_A|` and `z_upper >= |x_A / y_A|`. The coarse accuracies
    /// `tilde_x` and `tilde_y` cap the respective budgets.
    pub fn new(eps: &Float, h: f64, y_lower: &Float, z_upper: &Float, tilde_x: &Float, tilde_y: &Float) -> Result<Self> {
        if !(eps.is_finite() && *eps > 0) {
            return Err(Error::NonPositiveAccuracy);
        }
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidInput(format!("split parameter h = {h} is not in (0, 1)")));
        }
        if !(y_lower.is_finite() && *y_lower > 0) {
            return Err(Error::ProbablyZero);
        }
        let down = |x: Float| Float::with_val_round(BUDGET_PREC, x, Round::Down).0;
        let eps = Float::with_val(BUDGET_PREC, eps);
        let ey = down(Float::with_val(BUDGET_PREC, &eps * y_lower));
        let hx = down(Float::with_val(BUDGET_PREC, &ey * h) / 2u32);
        let eps_x = margin(min(hx, Float::with_val(BUDGET_PREC, tilde_x)));
        let z_up = Float::with_val_round(BUDGET_PREC, z_upper, Round::Up).0.max(&Float::with_val(BUDGET_PREC, 1e-300));
        let hy = down(Float::with_val(BUDGET_PREC, &ey * (1.0 - h)) / 2u32);
        let hy = down(hy / z_up);
        let half_y = down(Float::with_val(BUDGET_PREC, y_lower) / 2u32);
        let eps_y = margin(min(min(hy, half_y), Float::with_val(BUDGET_PREC, tilde_y)));
        Ok(ErrorBudget { eps, h, eps_x, eps_y, per_term: Vec::new() })
    }

    /// Splits `eps_x` over summands of the given weights so that
    /// `Σ |w_j| budget_j < eps_x`.
    pub fn allocate(&mut self, weights: &[Rational]) {
        self.per_term = split_budget(&self.eps_x, weights);
    }

    /// Halves both budgets, for a retry.
    pub fn tighten(&mut self) {
        self.eps_x >>= 1;
        self.eps_y >>= 1;
        for b in &mut self.per_term {
            *b >>= 1;
        }
    }
}

/// Per-summand accuracies `eps (1 - 2^-10) / (count |w_j|)`.
pub fn split_budget(eps: &Float, weights: &[Rational]) -> Vec<Float> {
    let count = weights.len().max(1) as u64;
    let base = margin(Float::with_val(BUDGET_PREC, eps)) / count;
    weights
        .iter()
        .map(|w| {
            let w = Float::with_val_round(BUDGET_PREC, &Rational::from(w.abs_ref()), Round::Up).0;
            Float::with_val_round(BUDGET_PREC, &base / w, Round::Down).0
        })
        .collect()
}

/// Outcome of the coarse estimate: `lower <= |x| <= upper`, obtained from
/// an approximation of accuracy `eps_tilde`.
#[derive(Clone, Debug)]
pub struct CoarseBounds {
    pub lower: Float,
    pub upper: Float,
    pub eps_tilde: Float,
    pub estimate: BallComplex,
}

/// Bounds on `|x|` from `x̃` with `|x - x̃| < ε̃`: `(|x̃| - 2ε̃, |x̃| + 2ε̃)`.
pub fn coarse_from_estimate(estimate: BallComplex, eps_tilde: &Float) -> CoarseBounds {
    let mid = BallComplex::new(
        crate::ball::BallReal::exact(estimate.re.mid().clone()),
        crate::ball::BallReal::exact(estimate.im.mid().clone()),
    );
    let (lo, hi) = mid.abs_bounds();
    let two = Float::with_val_round(BUDGET_PREC, eps_tilde * 2u32, Round::Up).0;
    let lower = Float::with_val_round(BUDGET_PREC, &lo - &two, Round::Down).0;
    let upper = Float::with_val_round(BUDGET_PREC, &hi + &two, Round::Up).0;
    CoarseBounds { lower, upper, eps_tilde: Float::with_val(BUDGET_PREC, eps_tilde), estimate }
}

/// Evaluates at `ε̃ = 0.1, 0.01, ...` until `|x̃| - 2ε̃ > 0`.
pub fn coarse_nonzero_bounds<F>(mut evaluate: F) -> Result<CoarseBounds>
where
    F: FnMut(&Float) -> Result<BallComplex>,
{
    let mut eps = Float::with_val(BUDGET_PREC, 0.1);
    for _ in 0..COARSE_STEPS {
        let x = evaluate(&eps)?;
        let bounds = coarse_from_estimate(x, &eps);
        if bounds.lower > 0 {
            return Ok(bounds);
        }
        eps /= 10u32;
    }
    Err(Error::ProbablyZero)
}

/// Smallest member of the coarse ladder.
pub fn coarse_floor() -> Float {
    Float::with_val(BUDGET_PREC, 10u32).pow(-(COARSE_STEPS as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::BallReal;
    use proptest::prelude::*;

    fn real(x: f64) -> BallComplex {
        BallComplex::from_real(BallReal::from_f64(x, 64))
    }

    #[test]
    fn coarse_ladder() {
        let b = coarse_nonzero_bounds(|_| Ok(real(0.5))).unwrap();
        assert_eq!(b.eps_tilde, Float::with_val(64, 0.1));
        assert!(b.lower > 0.29 && b.lower < 0.31);
        assert!(b.upper > 0.69 && b.upper < 0.71);
        let b = coarse_nonzero_bounds(|_| Ok(real(-3.0))).unwrap();
        assert!(b.lower >= 2.79);
        let tiny = coarse_nonzero_bounds(|_| Ok(real(1e-40)));
        assert_eq!(tiny.unwrap_err(), Error::ProbablyZero);
        let mut calls = 0;
        let b = coarse_nonzero_bounds(|_| {
            calls += 1;
            Ok(real(0.00178))
        })
        .unwrap();
        assert_eq!(calls, 4);
        assert!(b.lower > 0);
    }

    #[test]
    fn budget_respects_all_caps() {
        let eps = Float::with_val(64, 1e-3);
        let y = Float::with_val(64, 0.0017);
        let z = Float::with_val(64, 6e21);
        let b = ErrorBudget::new(&eps, 0.5, &y, &z, &Float::with_val(64, 0.1), &Float::with_val(64, 1e-4)).unwrap();
        assert!(b.eps_x < 0.5 * 1e-3 * 0.0017 / 2.0);
        assert!(b.eps_y < 0.5 * 1e-3 * 0.0017 / (2.0 * 6e21));
        let small = ErrorBudget::new(&eps, 0.5, &y, &z, &Float::with_val(64, 1e-9), &Float::with_val(64, 1e-4)).unwrap();
        assert!(small.eps_x < 1e-9);
        assert!(ErrorBudget::new(&eps, 1.0, &y, &z, &eps, &eps).is_err());
    }

    #[test]
    fn weighted_split() {
        let eps = Float::with_val(64, 1.0);
        let w = [Rational::from(2048), Rational::from((1, 2)), Rational::from((1, 2))];
        let parts = split_budget(&eps, &w);
        let total: f64 = parts.iter().zip(&w).map(|(b, w)| b.to_f64() * w.to_f64()).sum();
        assert!(total < 1.0);
        assert!(total > 0.99);
    }

    fn nonzero() -> impl Strategy<Value = Rational> {
        (-1000i64..=1000, 1i64..=97).prop_filter_map("nonzero", |(a, b)| (a != 0).then(|| Rational::from((a, b))))
    }

    proptest! {
        #[test]
        fn quotient_lemma_identity(x in nonzero(), y in nonzero(), xa in nonzero(), ya in nonzero()) {
            let ex = Rational::from(&x - &xa);
            let ey = Rational::from(&y - &ya);
            prop_assume!(Rational::from(&ya + &ey) != 0);
            let z = Rational::from(&x / &y);
            let za = Rational::from(&xa / &ya);
            let rhs = (ex - Rational::from(&ey * &za)) / (ya + ey);
            prop_assert_eq!(z - za, rhs);
        }

        #[test]
        fn quotient_budget_is_sound(
            xa in nonzero(),
            ya in nonzero(),
            h in prop::sample::select(vec![0.1, 0.5, 0.9]),
            digits in 1u32..12,
            ux in -1.0f64..1.0,
            uy in -1.0f64..1.0,
        ) {
            let eps = Float::with_val(64, 10f64.powi(-(digits as i32)));
            let y_lower = Float::with_val_round(64, &Rational::from(ya.abs_ref()), Round::Down).0;
            let za = Rational::from(&xa / &ya);
            let z_upper = Float::with_val_round(64, &Rational::from(za.abs_ref()), Round::Up).0;
            let inf = Float::with_val(64, rug::float::Special::Infinity);
            let b = ErrorBudget::new(&eps, h, &y_lower, &z_upper, &inf, &inf).unwrap();
            let ex = Rational::from_f64(ux).unwrap() * Rational::from_f64(b.eps_x.to_f64()).unwrap();
            let ey = Rational::from_f64(uy).unwrap() * Rational::from_f64(b.eps_y.to_f64()).unwrap();
            let x = Rational::from(&xa + &ex);
            let y = Rational::from(&ya + &ey);
            let err = Rational::from(Rational::from(&x / &y) - &za).abs();
            prop_assert!(err < Rational::from_f64(eps.to_f64()).unwrap());
        }
    }
}
