use std::sync::{Arc, Mutex};

use rug::Float;

use crate::ball::{BallComplex, BallReal};
use crate::error::{Error, Result, Stage};
use rug::Integer;

use crate::eval::{nome, reduce_point, tail_bound, EvalPoint, Evaluation, FormEvaluator, TailModel};
use crate::qexp::{eisenstein_qexp, EigenformHandle, MAX_DOUBLINGS};

fn log2_f(x: &Float) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else if x.is_infinite() || x.is_nan() {
        f64::INFINITY
    } else {
        Float::with_val(64, x.log2_ref()).to_f64()
    }
}

fn first_delta_log2(eps_log2: f64, factor_log2: f64, gain: f64) -> f64 {
    eps_log2 - factor_log2 - gain - 8.0
}

fn weight_bits(delta_log2: f64) -> u32 {
    (-delta_log2).ceil().max(8.0) as u32 + 8
}

/// Evaluates a level-one eigenform as a polynomial in `E_4` and `E_6`.
#[derive(Debug)]
pub struct EisensteinEvaluator {
    form: EigenformHandle,
    pairs: Vec<(u32, u32)>,
    e4: FormEvaluator,
    e6: FormEvaluator,
    weights: Mutex<Option<(u32, Arc<Vec<BallReal>>)>>,
    series: Mutex<Arc<(Vec<Integer>, Vec<Integer>)>>,
    /// Largest observed `log2` gain from errors in `E_4, E_6` to errors in `P`.
    gain: Mutex<f64>,
}

impl EisensteinEvaluator {
    pub fn new(form: &EigenformHandle) -> Result<Self> {
        if form.level != 1 {
            return Err(Error::UnsupportedLevel(form.level));
        }
        let level1 = form
            .as_level1()
            .ok_or_else(|| Error::InvalidInput("the Eisenstein method needs a computed level-one form".into()))?;
        let pairs = level1.basis(0)?.exponent_pairs.clone();
        Ok(EisensteinEvaluator {
            form: form.clone(),
            pairs,
            e4: FormEvaluator::eisenstein(4)?,
            e6: FormEvaluator::eisenstein(6)?,
            weights: Mutex::new(None),
            series: Mutex::new(Arc::new((Vec::new(), Vec::new()))),
            gain: Mutex::new(0.0),
        })
    }

    pub fn form(&self) -> &EigenformHandle {
        &self.form
    }

    /// `w_j` with `f = Σ_j w_j Δ E_4^{a_j} E_6^{b_j}`.
    pub fn generator_weights(&self, bits: u32) -> Result<Arc<Vec<BallReal>>> {
        let mut guard = self.weights.lock().unwrap();
        if let Some((b, w)) = guard.as_ref() {
            if *b >= bits {
                return Ok(w.clone());
            }
        }
        let bits = bits.next_multiple_of(64);
        let w = Arc::new(self.form.as_level1().expect("checked in new").generator_weights(bits)?);
        *guard = Some((bits, w.clone()));
        Ok(w)
    }

    /// Integer coefficients of `E_4` and `E_6` to at least `q^len`.
    fn series(&self, len: usize) -> Arc<(Vec<Integer>, Vec<Integer>)> {
        let mut guard = self.series.lock().unwrap();
        if guard.0.len() <= len {
            let len = len.max(2 * guard.0.len());
            let ints = |k| eisenstein_qexp(k, len).coeffs().iter().map(|c| c.numer().clone()).collect();
            *guard = Arc::new((ints(4), ints(6)));
        }
        guard.clone()
    }

    /// `E_4(w)` and `E_6(w)`, each within `delta`, from one pass over the
    /// powers of `q`.
    pub fn eisenstein_pair(&self, w: &EvalPoint, delta: &Float) -> Result<(BallComplex, BallComplex, u64)> {
        let plan4 = self.e4.plan(w, delta, false)?;
        let plan6 = self.e6.plan(w, delta, false)?;
        let t = plan4.truncation.terms.max(plan6.truncation.terms);
        let y = w.im_lower();
        let bound = |k| tail_bound(&y, TailModel::eisenstein(k).expect("weights 4 and 6"), t).expect("past the peak");
        let (tail4, tail6) = (bound(4), bound(6));
        let series = self.series(t as usize);
        let (c4, c6) = (&series.0, &series.1);
        let mut prec = plan4.prec.max(plan6.prec);
        for _ in 0..=MAX_DOUBLINGS {
            let q = nome(&w.ball(prec), prec);
            let mut qn = q.clone();
            let mut s4 = BallComplex::one(prec);
            let mut s6 = BallComplex::one(prec);
            for n in 1..=t as usize {
                s4 = s4.add(&qn.mul_integer(&c4[n]));
                s6 = s6.add(&qn.mul_integer(&c6[n]));
                if n < t as usize {
                    qn = qn.mul(&q);
                }
            }
            let s4 = s4.add_error(&tail4);
            let s6 = s6.add_error(&tail6);
            if s4.is_finite() && s6.is_finite() && s4.disc_radius() < *delta && s6.disc_radius() < *delta {
                return Ok((s4, s6, t));
            }
            prec *= 2;
        }
        Err(Error::PrecisionExhausted(Stage::Evaluation))
    }

    /// Weight accuracy a first attempt at `f(z)` to within `eps` asks for.
    pub fn required_bits(&self, z: &EvalPoint, eps: &Float) -> Result<u32> {
        let reduction = reduce_point(z, 1, self.form.weight)?;
        Ok(weight_bits(first_delta_log2(log2_f(eps), reduction.factor_log2(), *self.gain.lock().unwrap())))
    }

    /// Makes the generator weights available to `bits` ahead of a batch.
    pub fn warm(&self, bits: u32) -> Result<()> {
        self.generator_weights(bits).map(|_| ())
    }

    /// `P(E_4(w), E_6(w))` from the two values.
    ///
    /// Consecutive pairs differ by `(-3, +2)`, so the sum is
    /// `E_4^{a_m} E_6^{b_0} Σ_j w_j X^{m-j} Y^j` with `X = E_4^3`, `Y = E_6^2`,
    /// evaluated by Horner in `X`.
    fn polynomial(&self, e4: &BallComplex, e6: &BallComplex, weights: &[BallReal], prec: u32) -> BallComplex {
        let e4 = e4.with_prec(prec);
        let e6 = e6.with_prec(prec);
        let x = e4.pow_u(3);
        let y = e6.sqr();
        let delta = x.sub(&y).mul_rational(&rug::Rational::from((1, 1728)));
        let (Some(&(_, b0)), Some(&(a_m, _))) = (self.pairs.first(), self.pairs.last()) else {
            return BallComplex::zero(prec);
        };
        let mut acc = BallComplex::from_real(weights[0].with_prec(prec));
        let mut y_pow = BallComplex::one(prec);
        for w in &weights[1..] {
            y_pow = y_pow.mul(&y);
            acc = acc.mul(&x).add(&y_pow.mul_real(&w.with_prec(prec)));
        }
        if a_m > 0 {
            acc = acc.mul(&e4.pow_u(a_m as u64));
        }
        if b0 > 0 {
            acc = acc.mul(&e6.pow_u(b0 as u64));
        }
        acc.mul(&delta)
    }

    /// `f(z)` with radius below `eps`.
    pub fn evaluate(&self, z: &EvalPoint, eps: &Float) -> Result<Evaluation> {
        if !(eps.is_finite() && *eps > 0) {
            return Err(Error::NonPositiveAccuracy);
        }
        let reduction = reduce_point(z, 1, self.form.weight)?;
        let w = &reduction.point;
        let eps_log2 = log2_f(eps);
        let factor_log2 = reduction.factor_log2();
        let mut delta_log2 = first_delta_log2(eps_log2, factor_log2, *self.gain.lock().unwrap());
        for _ in 0..=MAX_DOUBLINGS {
            let delta = Float::with_val(64, delta_log2).exp2();
            let (e4, e6, terms) = self.eisenstein_pair(w, &delta)?;
            let bits = weight_bits(delta_log2);
            let weights = self.generator_weights(bits)?;
            let prec = (bits + 64).max(e4.prec()).max(e6.prec());
            let mut value = self.polynomial(&e4, &e6, &weights, prec);
            if reduction.inversions > 0 {
                value = value.mul(&reduction.factor(prec, None)?);
            }
            if value.is_finite() && value.disc_radius() < *eps {
                return Ok(Evaluation { value, terms });
            }
            let rad_log2 = log2_f(&value.disc_radius());
            if rad_log2.is_finite() {
                let mut gain = self.gain.lock().unwrap();
                *gain = gain.max(rad_log2 - delta_log2 - factor_log2);
            }
            let step = if rad_log2.is_finite() { (rad_log2 - eps_log2).max(1.0) + 4.0 } else { 64.0 };
            delta_log2 -= step;
        }
        Err(Error::PrecisionExhausted(Stage::Evaluation))
    }
}

/// `f(z)` for a level-one eigenform via `E_4` and `E_6`.
pub fn eisenstein_path_value(f: &EigenformHandle, z: &EvalPoint, eps: &Float) -> Result<BallComplex> {
    Ok(EisensteinEvaluator::new(f)?.evaluate(z, eps)?.value)
}
