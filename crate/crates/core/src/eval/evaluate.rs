use std::sync::{Arc, Mutex};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::point::EvalPoint;
use super::reduce::{reduce_point, AtkinLehnerSign, Reduction};
use super::truncation::{choose_truncation_with, TailModel, Truncation};
use crate::ball::{BallComplex, BallReal};
use crate::error::{Error, Result, Stage};
use crate::qexp::{eisenstein_qexp, EigenformHandle, MAX_DOUBLINGS};

/// A reduced point with its chosen truncation, ready to be summed.
#[derive(Clone, Debug)]
pub struct EvalPlan {
    pub reduction: Reduction,
    pub truncation: Truncation,
    /// Working precision of the first attempt.
    pub prec: u32,
    /// Coefficient radii must stay below `2^-coeff_bits`.
    pub coeff_bits: u32,
    pub eps: Float,
}

impl EvalPlan {
    pub fn reduced_point(&self) -> &EvalPoint {
        &self.reduction.point
    }

    pub fn used_wn(&self) -> bool {
        self.reduction.used_wn()
    }
}

/// A value of the form together with the truncation that produced it.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: BallComplex,
    pub terms: u64,
}

/// `q = e^{2πiz}` at `prec` bits, with a real ball when `Re z` is exactly
/// `0` or `±1/2`.
pub fn nome(z: &BallComplex, prec: u32) -> BallComplex {
    let two_pi = BallReal::pi(prec).mul_2si(1);
    let z = z.with_prec(prec);
    let decay = two_pi.mul(&z.im).neg().exp();
    let x = &z.re;
    if x.is_exact() && x.mid().is_zero() {
        BallComplex::from_real(decay)
    } else if x.is_exact() && Float::with_val(prec, x.mid().abs_ref()) == 0.5 {
        BallComplex::from_real(decay.neg())
    } else {
        let angle = two_pi.mul(x);
        BallComplex::new(decay.mul(&angle.cos()), decay.mul(&angle.sin()))
    }
}

/// `Σ_{n<=T} a_n q^n` by Horner's scheme in `q = e^{2πiz}`, with
/// `tail_bound` added to both radii. `coeffs` holds `a_0 ..= a_T`.
pub fn evaluate_truncated(coeffs: &[BallReal], z: &BallComplex, tail_bound: &Float, prec: u32) -> BallComplex {
    let q = nome(z, prec);
    let sum = if q.is_real() {
        let q = &q.re;
        let mut acc = BallReal::zero(prec);
        for a in coeffs.iter().rev() {
            acc = acc.mul(q).add(a);
        }
        BallComplex::from_real(acc)
    } else {
        let mut acc = BallComplex::zero(prec);
        for a in coeffs.iter().rev() {
            acc = acc.mul(&q).add_real(a);
        }
        acc
    };
    if tail_bound.is_zero() {
        sum
    } else {
        sum.add_error(tail_bound)
    }
}

#[derive(Debug)]
enum Source {
    Form(EigenformHandle),
    Eisenstein(u32),
}

#[derive(Debug)]
struct CoeffTable {
    bits: u32,
    coeffs: Arc<Vec<BallReal>>,
}

/// Evaluates one fixed modular form at many points, sharing a coefficient
/// table that grows on demand.
#[derive(Debug)]
pub struct FormEvaluator {
    source: Source,
    level: u64,
    weight: u32,
    model: TailModel,
    sign: Option<AtkinLehnerSign>,
    cache: Mutex<Option<CoeffTable>>,
}

fn log2_f(x: &Float) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        Float::with_val(64, x.log2_ref()).to_f64()
    }
}

impl FormEvaluator {
    /// Evaluator for an eigenform. At levels 2 and 3 the Atkin–Lehner sign
    /// is certified first.
    pub fn new(form: EigenformHandle) -> Result<Self> {
        let sign = match form.level {
            2 | 3 => Some(atkin_lehner_sign(&form, &Float::with_val(64, 1e-10))?),
            _ => None,
        };
        Ok(FormEvaluator::with_sign(form, sign))
    }

    pub fn with_sign(form: EigenformHandle, sign: Option<AtkinLehnerSign>) -> Self {
        FormEvaluator {
            level: form.level,
            weight: form.weight,
            model: TailModel::cusp_form(form.weight),
            source: Source::Form(form),
            sign,
            cache: Mutex::new(None),
        }
    }

    /// Evaluator for `E_4` or `E_6`.
    pub fn eisenstein(k: u32) -> Result<Self> {
        let model = TailModel::eisenstein(k)
            .ok_or_else(|| Error::InvalidInput(format!("no Eisenstein evaluator for weight {k}")))?;
        Ok(FormEvaluator {
            source: Source::Eisenstein(k),
            level: 1,
            weight: k,
            model,
            sign: None,
            cache: Mutex::new(None),
        })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn sign(&self) -> Option<&AtkinLehnerSign> {
        self.sign.as_ref()
    }

    pub fn form(&self) -> Option<&EigenformHandle> {
        match &self.source {
            Source::Form(f) => Some(f),
            Source::Eisenstein(_) => None,
        }
    }

    fn fetch(&self, len: usize, bits: u32) -> Result<Vec<BallReal>> {
        match &self.source {
            Source::Form(f) => f.coefficients(len, bits),
            Source::Eisenstein(k) => Ok(eisenstein_qexp(*k, len)
                .coeffs()
                .iter()
                .map(|c| BallReal::from_integer(c.numer(), c.numer().significant_bits().max(64)))
                .collect()),
        }
    }

    /// A shared table covering `a_0 ..= a_len` with radii at most
    /// `2^-bits`; it may be longer than requested.
    pub fn coefficients(&self, len: usize, bits: u32) -> Result<Arc<Vec<BallReal>>> {
        let mut guard = self.cache.lock().unwrap();
        if let Some(t) = guard.as_ref() {
            if t.coeffs.len() > len && t.bits >= bits {
                return Ok(t.coeffs.clone());
            }
        }
        let (len_all, bits_all) = match guard.as_ref() {
            Some(t) => (len.max(t.coeffs.len() - 1), bits.max(t.bits)),
            None => (len, bits),
        };
        let coeffs = Arc::new(self.fetch(len_all, bits_all)?);
        *guard = Some(CoeffTable { bits: bits_all, coeffs: coeffs.clone() });
        Ok(coeffs)
    }

    /// Makes sure later requests up to `(len, bits)` are served from cache.
    pub fn warm(&self, len: usize, bits: u32) -> Result<()> {
        self.coefficients(len, bits).map(|_| ())
    }

    /// Reduces `z` (unless `reduce` is false), chooses the truncation and a
    /// starting precision for a result of radius below `eps`.
    pub fn plan(&self, z: &EvalPoint, eps: &Float, reduce: bool) -> Result<EvalPlan> {
        if !(eps.is_finite() && *eps > 0) {
            return Err(Error::NonPositiveAccuracy);
        }
        let reduction = if reduce {
            reduce_point(z, self.level, self.weight)?
        } else {
            Reduction::identity(z, self.level, self.weight)
        };
        let f_log2 = reduction.factor_log2();
        let eps_log2 = log2_f(eps);
        let y = reduction.point.im_lower();
        // a quarter of the budget for the tail, a quarter for coefficients
        let shift = (f_log2.ceil() + 2.0).clamp(-1e6, 1e6) as i32;
        let tail_eps = Float::with_val(64, eps) >> shift;
        let truncation = choose_truncation_with(&y, self.model, &tail_eps)?;
        let t = truncation.terms as f64;
        let yf = y.to_f64();
        let two_pi_y = 2.0 * std::f64::consts::PI * yf;
        // log2 of Σ_{n<=T} C n^D e^{-2πyn}, dominated by its largest term
        let d = self.model.exponent as f64;
        let peak = (d / two_pi_y).clamp(1.0, t);
        let mut s_log2 = f64::NEG_INFINITY;
        for n in [1.0, peak.floor().max(1.0), peak.ceil(), t] {
            let v = (self.model.scale as f64).log2() + d * n.log2() - two_pi_y * n * std::f64::consts::LOG2_E;
            s_log2 = s_log2.max(v);
        }
        let s_log2 = s_log2.max(0.0) + t.log2();
        let growth = (two_pi_y * t).max(1.0).log2();
        let needed = f_log2 - eps_log2 + s_log2 + t.log2() + growth + 32.0;
        let prec = needed.ceil().max(64.0) as u32;
        let q_gap = -(-(two_pi_y.min(700.0))).exp_m1().log2();
        let coeff_bits = (f_log2 - eps_log2 + 3.0 + q_gap).ceil().max(8.0) as u32;
        Ok(EvalPlan { reduction, truncation, prec, coeff_bits, eps: Float::with_val(64, eps) })
    }

    /// Sums a planned evaluation, doubling the precision until the radius
    /// is below the target.
    pub fn run(&self, plan: &EvalPlan) -> Result<Evaluation> {
        let t = plan.truncation.terms as usize;
        let mut prec = plan.prec;
        let mut bits = plan.coeff_bits;
        for _ in 0..=MAX_DOUBLINGS {
            let coeffs = self.coefficients(t, bits)?;
            let w = plan.reduction.point.ball(prec);
            let sum = evaluate_truncated(&coeffs[..=t], &w, &plan.truncation.tail_bound, prec);
            let value = if plan.reduction.inversions == 0 {
                sum
            } else {
                sum.mul(&plan.reduction.factor(prec, self.sign.as_ref())?)
            };
            if value.is_finite() && value.disc_radius() < plan.eps {
                return Ok(Evaluation { value, terms: plan.truncation.terms });
            }
            prec *= 2;
            bits *= 2;
        }
        Err(Error::PrecisionExhausted(Stage::Evaluation))
    }

    /// `f(z)` with a disc radius below `eps`.
    pub fn evaluate(&self, z: &EvalPoint, eps: &Float) -> Result<Evaluation> {
        self.run(&self.plan(z, eps, true)?)
    }

    /// `f(z)` summed directly at `z`, without moving the point.
    pub fn evaluate_unreduced(&self, z: &EvalPoint, eps: &Float) -> Result<Evaluation> {
        self.run(&self.plan(z, eps, false)?)
    }
}

/// `f(z)` with radius below `eps`. Levels 2 and 3 need the Atkin–Lehner
/// sign whenever the point is inverted; it is certified here if absent.
pub fn evaluate_form(
    f: &EigenformHandle,
    z: &EvalPoint,
    eps: &Float,
    sign: Option<&AtkinLehnerSign>,
) -> Result<BallComplex> {
    let ev = match (f.level, sign) {
        (2 | 3, None) => FormEvaluator::new(f.clone())?,
        (_, s) => FormEvaluator::with_sign(f.clone(), s.copied()),
    };
    Ok(ev.evaluate(z, eps)?.value)
}

/// Certifies the sign `s` in `W_N f = s f` for `N ∈ {2, 3}` by evaluating
/// both `f(2i)` and `N^{-k/2} (2i)^{-k} f(i/(2N))` directly.
pub fn atkin_lehner_sign(f: &EigenformHandle, eps: &Float) -> Result<AtkinLehnerSign> {
    let n = f.level;
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedLevel(n));
    }
    let k = f.weight;
    let ev = FormEvaluator::with_sign(f.clone(), None);
    let star = EvalPoint::exact(Rational::new(), Rational::from(2))?;
    let image = EvalPoint::exact(Rational::new(), Rational::from((1, 2 * n)))?;
    let mut eps = Float::with_val(64, eps);
    for _ in 0..4 {
        let direct = ev.evaluate_unreduced(&star, &eps)?.value;
        let raw = ev.evaluate_unreduced(&image, &eps)?.value;
        let prec = direct.prec().max(raw.prec()).max(64);
        // N^{-k/2} (2i)^{-k}
        let mut scale = BallComplex::new(BallReal::zero(prec), BallReal::from_i64(2, prec)).pow_i(-(k as i64))?;
        let nk = Integer::from(n).pow(k);
        scale = scale.mul_real(&BallReal::from_integer(&nk, prec).sqrt().inv()?);
        let transformed = raw.mul(&scale);
        let plus = direct.overlaps(&transformed);
        let minus = direct.overlaps(&transformed.neg());
        let found = match (plus, minus) {
            (true, false) => Some(1),
            (false, true) => Some(-1),
            (false, false) => return Err(Error::IndeterminateSign),
            (true, true) => None,
        };
        if let Some(s) = found {
            if f.supplied_sign().is_some_and(|given| given != s) {
                return Err(Error::InvalidInput(format!(
                    "supplied Atkin-Lehner sign contradicts the certified sign {s:+}"
                )));
            }
            return Ok(AtkinLehnerSign { level: n, sign: s, certified: true });
        }
        eps >>= 32;
    }
    Err(Error::IndeterminateSign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::eta_delta_oracle;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    /// Long high-precision summation of Δ at `z`, as plain floats.
    fn delta_oracle(re: &Rational, im: &Rational, terms: usize) -> (Float, Float) {
        let p = 512;
        let d = eta_delta_oracle(terms);
        let pi2 = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
        let decay = Float::with_val(p, -Float::with_val(p, &pi2 * im)).exp();
        let ang = Float::with_val(p, &pi2 * re);
        let (qr, qi) = (Float::with_val(p, &decay * Float::with_val(p, ang.cos_ref())), Float::with_val(p, &decay * Float::with_val(p, ang.sin_ref())));
        let (mut ar, mut ai) = (Float::new(p), Float::new(p));
        for n in (0..=terms).rev() {
            let nr = Float::with_val(p, &ar * &qr) - Float::with_val(p, &ai * &qi);
            let ni = Float::with_val(p, &ar * &qi) + Float::with_val(p, &ai * &qr);
            ar = nr + d.coeff(n);
            ai = ni;
        }
        (ar, ai)
    }

    #[test]
    fn delta_at_i() {
        let f = EigenformHandle::level1(12, 0).unwrap();
        let eps = Float::with_val(64, 1e-20);
        let v = evaluate_form(&f, &EvalPoint::i(), &eps, None).unwrap();
        let (re, _) = delta_oracle(&q(0, 1), &q(1, 1), 2000);
        assert!(v.re.contains_float(&re));
        assert!(v.im.contains_zero());
        assert!(v.disc_radius() < eps);
        assert!(v.re.overlaps(&BallReal::from_f64(0.00178537, 64).add_error(&Float::with_val(32, 1e-7))));
        let shifted = evaluate_form(&f, &EvalPoint::exact(q(1, 1), q(1, 1)).unwrap(), &eps, None).unwrap();
        assert!(shifted.overlaps(&v));
    }

    #[test]
    fn delta_near_real_axis() {
        let f = EigenformHandle::level1(12, 0).unwrap();
        let eps = Float::with_val(64, 1e-10);
        let z = EvalPoint::exact(q(0, 1), q(1, 20)).unwrap();
        let v = evaluate_form(&f, &z, &eps, None).unwrap();
        let (re, _) = delta_oracle(&q(0, 1), &q(1, 20), 5000);
        // the true value is far below eps, so compare absolutely
        assert!(v.re.add_error(&Float::with_val(64, 1e-30)).contains_float(&re));
    }

    #[test]
    fn truncated_sum_with_zero_terms() {
        let c = vec![BallReal::from_i64(3, 64)];
        let tail = Float::with_val(64, 0.25);
        let v = evaluate_truncated(&c, &EvalPoint::i().ball(64), &tail, 64);
        assert!(v.re.contains_integer(&Integer::from(3)));
        assert!(v.re.rad() >= 0.25);
    }

    #[test]
    fn e4_at_i() {
        // E_4(i) = 3 Γ(1/4)^8 / (2π)^6
        let ev = FormEvaluator::eisenstein(4).unwrap();
        let eps = Float::with_val(64, 1e-30);
        let v = ev.evaluate(&EvalPoint::i(), &eps).unwrap().value;
        let p = 256;
        let g = Float::with_val(p, 0.25f64).gamma();
        let two_pi = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
        let closed = Float::with_val(p, g.pow(8u32)) * 3u32 / two_pi.pow(6u32);
        assert!(v.re.contains_float(&closed));
    }

    #[test]
    fn conjugate_symmetry() {
        let f = EigenformHandle::level1(16, 0).unwrap();
        let ev = FormEvaluator::new(f).unwrap();
        let eps = Float::with_val(64, 1e-15);
        let a = ev.evaluate(&EvalPoint::exact(q(-2, 7), q(1, 7)).unwrap(), &eps).unwrap().value;
        let b = ev.evaluate(&EvalPoint::exact(q(2, 7), q(1, 7)).unwrap(), &eps).unwrap().value;
        assert!(a.overlaps(&b.conj()));
        let r = ev.evaluate(&EvalPoint::exact(q(0, 1), q(1, 3)).unwrap(), &eps).unwrap().value;
        assert!(r.im.contains_zero());
    }
}
