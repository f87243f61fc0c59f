use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rug::{Float, Integer};

use super::budget::{coarse_floor, coarse_from_estimate, coarse_nonzero_bounds, split_budget, ErrorBudget};
use super::eisenstein::EisensteinEvaluator;
use super::points::{hecke_terms, HeckeTerm};
use crate::ball::{BallComplex, BallReal};
use crate::error::{Error, Result, Stage};
use crate::eval::{AtkinLehnerSign, EvalPoint, Evaluation, FormEvaluator};
use crate::qexp::{is_prime, EigenformHandle, MAX_DOUBLINGS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Eisenstein,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Eisenstein => "eisenstein",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "eisenstein" => Ok(Method::Eisenstein),
            other => Err(Error::InvalidInput(format!("unknown method `{other}`"))),
        }
    }
}

/// How values of the form are obtained.
#[derive(Debug)]
pub enum FormRoute {
    Direct(FormEvaluator),
    Eisenstein(EisensteinEvaluator),
}

impl FormRoute {
    pub fn new(f: &EigenformHandle, method: Method) -> Result<Self> {
        match method {
            Method::Direct => Ok(FormRoute::Direct(FormEvaluator::new(f.clone())?)),
            Method::Eisenstein => {
                if f.level != 1 {
                    return Err(Error::InvalidInput("the Eisenstein method requires level 1".into()));
                }
                Ok(FormRoute::Eisenstein(EisensteinEvaluator::new(f)?))
            }
        }
    }

    pub fn with_sign(f: &EigenformHandle, sign: Option<AtkinLehnerSign>) -> Self {
        FormRoute::Direct(FormEvaluator::with_sign(f.clone(), sign))
    }

    pub fn method(&self) -> Method {
        match self {
            FormRoute::Direct(_) => Method::Direct,
            FormRoute::Eisenstein(_) => Method::Eisenstein,
        }
    }

    fn level(&self) -> u64 {
        match self {
            FormRoute::Direct(e) => e.level(),
            FormRoute::Eisenstein(e) => e.form().level,
        }
    }

    fn weight(&self) -> u32 {
        match self {
            FormRoute::Direct(e) => e.weight(),
            FormRoute::Eisenstein(e) => e.form().weight,
        }
    }

    pub fn evaluate(&self, z: &EvalPoint, eps: &Float) -> Result<Evaluation> {
        match self {
            FormRoute::Direct(e) => e.evaluate(z, eps),
            FormRoute::Eisenstein(e) => e.evaluate(z, eps),
        }
    }

    /// Evaluates every term at its own accuracy, in parallel.
    fn evaluate_terms(&self, terms: &[HeckeTerm], budgets: &[Float]) -> Result<Vec<Evaluation>> {
        match self {
            FormRoute::Direct(e) => {
                let plans = terms
                    .par_iter()
                    .zip(budgets)
                    .map(|(t, b)| e.plan(&t.point, b, true))
                    .collect::<Result<Vec<_>>>()?;
                let len = plans.iter().map(|p| p.truncation.terms).max().unwrap_or(0);
                let bits = plans.iter().map(|p| p.coeff_bits).max().unwrap_or(0);
                e.warm(len as usize, bits)?;
                plans.par_iter().map(|p| e.run(p)).collect()
            }
            FormRoute::Eisenstein(e) => {
                let bits = terms
                    .par_iter()
                    .zip(budgets)
                    .map(|(t, b)| e.required_bits(&t.point, b))
                    .collect::<Result<Vec<_>>>()?;
                e.warm(bits.into_iter().max().unwrap_or(0))?;
                terms.par_iter().zip(budgets).map(|(t, b)| e.evaluate(&t.point, b)).collect()
            }
        }
    }
}

/// `T_p f(z0)` with the number of form evaluations it took.
#[derive(Clone, Debug)]
pub struct HeckeSum {
    pub value: BallComplex,
    pub term_count: usize,
    /// Largest truncation used by any summand.
    pub truncation: u64,
}

impl FormRoute {
    /// `T_p f(z0)` with disc radius below `eps_x`.
    pub fn apply_hecke(&self, p: u64, z0: &EvalPoint, eps_x: &Float) -> Result<HeckeSum> {
        if !is_prime(p) {
            return Err(Error::CompositeIndex(p));
        }
        let terms = hecke_terms(z0, p, self.level(), self.weight())?;
        let weights: Vec<_> = terms.iter().map(|t| t.weight.clone()).collect();
        let mut budgets = split_budget(eps_x, &weights);
        for _ in 0..=MAX_DOUBLINGS {
            let values = self.evaluate_terms(&terms, &budgets)?;
            let prec = values.iter().map(|v| v.value.prec()).max().unwrap_or(64);
            let mut acc = BallComplex::zero(prec);
            for (t, v) in terms.iter().zip(&values) {
                let part = if t.real_part { BallComplex::from_real(v.value.re.clone()) } else { v.value.clone() };
                acc = acc.add(&part.mul_rational(&t.weight));
            }
            if acc.is_finite() && acc.disc_radius() < *eps_x {
                let truncation = values.iter().map(|v| v.terms).max().unwrap_or(0);
                return Ok(HeckeSum { value: acc, term_count: terms.len(), truncation });
            }
            for b in &mut budgets {
                *b >>= 1;
            }
        }
        Err(Error::PrecisionExhausted(Stage::HeckeSum))
    }
}

/// `T_p f(z0)` for an eigenform, summed directly, with radius below `eps_x`.
pub fn apply_hecke(
    f: &EigenformHandle,
    p: u64,
    z0: &EvalPoint,
    eps_x: &Float,
    sign: Option<&AtkinLehnerSign>,
) -> Result<HeckeSum> {
    let route = match (f.level, sign) {
        (2 | 3, None) => FormRoute::new(f, Method::Direct)?,
        (_, s) => FormRoute::with_sign(f, s.copied()),
    };
    route.apply_hecke(p, z0, eps_x)
}

/// A certified Hecke eigenvalue and how it was obtained.
#[derive(Clone, Debug)]
pub struct HeckeEigenvalue {
    pub p: u64,
    pub value: BallReal,
    pub exact: Option<Integer>,
    pub method: Method,
    pub z0: EvalPoint,
    pub truncation: u64,
    pub term_count: usize,
    pub wall_time: Duration,
}

/// The unique integer in `value`, provided the space is one-dimensional,
/// the radius is below `1/2` and the whole ball rounds to that integer.
pub fn round_eigenvalue(value: &BallReal, space_dimension: usize) -> Option<Integer> {
    if space_dimension != 1 || !value.is_finite() || value.rad() >= 0.5 {
        return None;
    }
    let lo = value.lower().ceil().to_integer()?;
    let hi = value.upper().floor().to_integer()?;
    if lo != hi {
        return None;
    }
    let prec = value.prec().max(64) + lo.significant_bits() + 64;
    let n = Float::with_val(prec, &lo);
    let below = Float::with_val(prec, &n - value.lower());
    let above = Float::with_val(prec, value.upper() - &n);
    (below < 0.5 && above < 0.5).then_some(lo)
}

/// `λ_p = T_p f(z0) / f(z0)` as a real ball of radius below `eps`.
pub fn eigenvalue_numerical(
    f: &EigenformHandle,
    p: u64,
    eps: &Float,
    z0: Option<&EvalPoint>,
    h: Option<f64>,
    method: Method,
) -> Result<HeckeEigenvalue> {
    let start = Instant::now();
    if !is_prime(p) {
        return Err(Error::CompositeIndex(p));
    }
    if !(eps.is_finite() && *eps > 0) {
        return Err(Error::NonPositiveAccuracy);
    }
    let route = FormRoute::new(f, method)?;
    let mut out = eigenvalue_with_route(&route, p, eps, z0, h)?;
    out.exact = round_eigenvalue(&out.value, f.dimension());
    out.wall_time = start.elapsed();
    Ok(out)
}

impl FormRoute {
    /// The eigenvalue pipeline on an already built route.
    pub fn eigenvalue(&self, p: u64, eps: &Float, z0: Option<&EvalPoint>, h: Option<f64>) -> Result<HeckeEigenvalue> {
        let start = Instant::now();
        let mut out = eigenvalue_with_route(self, p, eps, z0, h)?;
        let dim = match self {
            FormRoute::Direct(e) => e.form().map_or(1, EigenformHandle::dimension),
            FormRoute::Eisenstein(e) => e.form().dimension(),
        };
        out.exact = round_eigenvalue(&out.value, dim);
        out.wall_time = start.elapsed();
        Ok(out)
    }
}

fn eigenvalue_with_route(
    route: &FormRoute,
    p: u64,
    eps: &Float,
    z0: Option<&EvalPoint>,
    h: Option<f64>,
) -> Result<HeckeEigenvalue> {
    if !is_prime(p) {
        return Err(Error::CompositeIndex(p));
    }
    let h = h.unwrap_or(0.5);
    match z0 {
        Some(z0) => eigenvalue_at(route, p, eps, z0.clone(), h),
        // forms of weight 2 mod 4 vanish at i; step up the imaginary axis
        None => match eigenvalue_at(route, p, eps, EvalPoint::i(), h) {
            Err(Error::ProbablyZero) => eigenvalue_at(route, p, eps, fallback_point(), h),
            r => r,
        },
    }
}

/// Used when `f(i)` is too close to zero.
pub fn fallback_point() -> EvalPoint {
    EvalPoint::exact(rug::Rational::new(), rug::Rational::from((6, 5))).expect("in the upper half plane")
}

fn eigenvalue_at(route: &FormRoute, p: u64, eps: &Float, z0: EvalPoint, h: f64) -> Result<HeckeEigenvalue> {
    let den = coarse_nonzero_bounds(|e| Ok(route.evaluate(&z0, e)?.value))?;
    let num = match coarse_nonzero_bounds(|e| Ok(route.apply_hecke(p, &z0, e)?.value)) {
        Ok(b) => b,
        // λ_p may vanish; only an upper bound on the numerator is needed
        Err(Error::ProbablyZero) => {
            let floor = coarse_floor();
            coarse_from_estimate(route.apply_hecke(p, &z0, &floor)?.value, &floor)
        }
        Err(e) => return Err(e),
    };
    let z_upper = Float::with_val_round(64, &num.upper / &den.lower, rug::float::Round::Up).0;
    let mut budget = ErrorBudget::new(eps, h, &den.lower, &z_upper, &num.eps_tilde, &den.eps_tilde)?;
    for _ in 0..=MAX_DOUBLINGS {
        let x = route.apply_hecke(p, &z0, &budget.eps_x)?;
        let y = route.evaluate(&z0, &budget.eps_y)?;
        let q = x.value.safe_div(&y.value)?;
        if q.im.contains_zero() && q.re.is_finite() && q.re.rad() < *eps {
            return Ok(HeckeEigenvalue {
                p,
                value: q.re,
                exact: None,
                method: route.method(),
                z0,
                truncation: x.truncation.max(y.terms),
                term_count: x.term_count,
                wall_time: Duration::ZERO,
            });
        }
        budget.tighten();
    }
    Err(Error::PrecisionExhausted(Stage::Quotient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate_form;
    use crate::qexp::{eta_delta_oracle, primes};
    use rug::Rational;

    fn f64_ball(mid: f64, rad: f64) -> BallReal {
        BallReal::from_f64(mid, 64).add_error(&Float::with_val(32, rad))
    }

    #[test]
    fn rounding_rule() {
        assert_eq!(round_eigenvalue(&f64_ball(-24.0, 1e-9), 1), Some(Integer::from(-24)));
        assert_eq!(round_eigenvalue(&f64_ball(0.4, 0.45), 1), None);
        assert_eq!(round_eigenvalue(&f64_ball(-24.0, 1e-9), 2), None);
        assert_eq!(round_eigenvalue(&f64_ball(0.5, 0.1), 1), None);
    }

    #[test]
    fn delta_small_primes() {
        let f = EigenformHandle::level1(12, 0).unwrap();
        let eps = Float::with_val(64, 1e-10);
        let l2 = eigenvalue_numerical(&f, 2, &eps, None, None, Method::Direct).unwrap();
        assert_eq!(l2.exact, Some(Integer::from(-24)));
        assert_eq!(l2.term_count, 3);
        let l5 = eigenvalue_numerical(&f, 5, &eps, None, None, Method::Direct).unwrap();
        assert_eq!(l5.exact, Some(Integer::from(4830)));
        assert_eq!(l5.term_count, 4);
        assert_eq!(eigenvalue_numerical(&f, 4, &eps, None, None, Method::Direct).unwrap_err(), Error::CompositeIndex(4));
    }

    #[test]
    fn eigen_equation_at_i() {
        let f = EigenformHandle::level1(12, 0).unwrap();
        let tau = eta_delta_oracle(100);
        let eps = Float::with_val(64, 1e-12);
        let fi = evaluate_form(&f, &EvalPoint::i(), &eps, None).unwrap();
        for p in primes().take_while(|&p| p <= 97) {
            let s = apply_hecke(&f, p, &EvalPoint::i(), &eps, None).unwrap();
            let expect = fi.mul_rational(tau.coeff(p as usize));
            assert!(s.value.overlaps(&expect), "p = {p}");
        }
    }

    #[test]
    fn point_independence_and_weight_16() {
        let f = EigenformHandle::level1(16, 0).unwrap();
        let eps = Float::with_val(64, 1e-10);
        let points = [
            EvalPoint::i(),
            EvalPoint::exact(Rational::from((3, 10)), Rational::from((11, 10))).unwrap(),
            EvalPoint::exact(Rational::new(), Rational::from((6, 5))).unwrap(),
        ];
        let values: Vec<_> = points
            .iter()
            .map(|z| eigenvalue_numerical(&f, 2, &eps, Some(z), None, Method::Direct).unwrap())
            .collect();
        for v in &values {
            assert!(v.value.contains_integer(&Integer::from(216)));
        }
        for a in &values {
            for b in &values {
                assert!(a.value.overlaps(&b.value));
            }
        }
    }

    #[test]
    fn routes_agree() {
        let eps = Float::with_val(64, 1e-8);
        for k in [12, 24] {
            let f = EigenformHandle::level1(k, 0).unwrap();
            for p in [2, 5] {
                let a = eigenvalue_numerical(&f, p, &eps, None, None, Method::Direct).unwrap();
                let b = eigenvalue_numerical(&f, p, &eps, None, None, Method::Eisenstein).unwrap();
                assert!(a.value.overlaps(&b.value), "k = {k}, p = {p}");
            }
        }
    }

    #[test]
    fn default_point_moves_off_zeros() {
        let eps = Float::with_val(64, 1e-8);
        let f = EigenformHandle::level1(18, 0).unwrap();
        assert!(matches!(
            eigenvalue_numerical(&f, 3, &eps, Some(&EvalPoint::i()), None, Method::Direct),
            Err(Error::ProbablyZero)
        ));
        let v = eigenvalue_numerical(&f, 3, &eps, None, None, Method::Direct).unwrap();
        assert_eq!(v.z0.to_string(), fallback_point().to_string());
        assert_eq!(v.term_count, 3);
        let a = f.exact_coefficients(3).unwrap().unwrap();
        assert!(v.value.contains_integer(&a[3]));
    }
}
