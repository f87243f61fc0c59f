use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};

use super::mag::Mag;
use super::{add_up, div_up, mag_inf, mag_lower_of, mag_of, mag_zero, mul_up, parse_decimal, RAD_PREC};
use crate::error::{Error, Result};

/// A real interval `[mid - rad, mid + rad]`.
#[derive(Clone, Debug)]
pub struct BallReal {
    mid: Float,
    rad: Mag,
}

fn finish(mid: Float, ord: Ordering, rad: Mag) -> BallReal {
    if ord == Ordering::Equal {
        BallReal::from_parts(mid, rad)
    } else {
        let err = Mag::rounding_error(&mid);
        BallReal::from_parts(mid, rad.add(err))
    }
}

impl BallReal {
    /// Builds a ball from a midpoint and a radius. Negative radii are
    /// replaced by their magnitude and a non-finite midpoint produces the
    /// whole real line.
    pub fn new(mid: Float, rad: Float) -> Self {
        BallReal::from_parts(mid, Mag::up(&rad))
    }

    pub(crate) fn from_parts(mid: Float, rad: Mag) -> Self {
        if !mid.is_finite() {
            let prec = mid.prec();
            return BallReal { mid: Float::new(prec), rad: Mag::INF };
        }
        BallReal { mid, rad }
    }

    pub fn exact(mid: Float) -> Self {
        BallReal::from_parts(mid, Mag::ZERO)
    }

    pub fn zero(prec: u32) -> Self {
        BallReal::exact(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        BallReal::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        finish(mid, ord, Mag::ZERO)
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        finish(mid, ord, Mag::ZERO)
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        finish(mid, ord, Mag::ZERO)
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        finish(mid, ord, Mag::ZERO)
    }

    /// The smallest ball at `prec` bits containing `[lo, hi]`.
    pub fn from_endpoints(lo: &Float, hi: &Float, prec: u32) -> Self {
        let mid = Float::with_val(prec, lo + hi) / 2u32;
        let up = Float::with_val_round(RAD_PREC, hi - &mid, Round::Up).0;
        let down = Float::with_val_round(RAD_PREC, &mid - lo, Round::Up).0;
        BallReal::new(mid, if up > down { up } else { down })
    }

    pub fn pi(prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, Constant::Pi, Round::Nearest);
        finish(mid, ord, Mag::ZERO)
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> Float {
        self.rad.to_float()
    }

    /// `log2` of the radius; `-inf` for exact balls.
    pub fn rad_log2(&self) -> f64 {
        self.rad.log2()
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    /// The same ball with `extra` added to its radius.
    pub fn add_error(&self, extra: &Float) -> Self {
        BallReal::from_parts(self.mid.clone(), self.rad.add(Mag::up(extra)))
    }

    /// Re-rounds the midpoint to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, &self.mid, Round::Nearest);
        finish(mid, ord, self.rad)
    }

    pub fn is_finite(&self) -> bool {
        !self.rad.is_inf()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Lower endpoint, rounded down.
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid - &self.rad.to_float(), Round::Down).0
    }

    /// Upper endpoint, rounded up.
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid + &self.rad.to_float(), Round::Up).0
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> Float {
        Mag::up(&self.mid).add(self.rad).to_float()
    }

    /// Lower bound on `|x|` over the ball; zero when the ball contains zero.
    pub fn abs_lower(&self) -> Float {
        let m = Float::with_val(self.prec().max(RAD_PREC), self.mid.abs_ref());
        let d = Float::with_val_round(RAD_PREC, &m - &self.rad.to_float(), Round::Down).0;
        if d.is_sign_negative() || d.is_nan() {
            mag_zero()
        } else {
            d
        }
    }

    pub fn contains_zero(&self) -> bool {
        // exact comparison of |mid| against rad
        if self.rad.is_zero() {
            return self.mid.is_zero();
        }
        self.mid.cmp_abs(&self.rad.to_float()) != Some(Ordering::Greater)
    }

    pub fn is_positive(&self) -> bool {
        self.mid.is_sign_positive() && !self.contains_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mid.is_sign_negative() && !self.mid.is_zero() && !self.contains_zero()
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        if !self.is_finite() {
            return true;
        }
        let m = self.mid.to_rational().expect("finite midpoint");
        let r = self.rad.to_float().to_rational().expect("finite radius");
        Rational::from(x - m).abs() <= r
    }

    pub fn contains_integer(&self, x: &Integer) -> bool {
        self.contains_rational(&Rational::from(x))
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        match x.to_rational() {
            Some(q) => self.contains_rational(&q),
            None => false,
        }
    }

    /// True when `other` lies entirely inside `self`.
    pub fn contains(&self, other: &BallReal) -> bool {
        if !self.is_finite() {
            return true;
        }
        if !other.is_finite() {
            return false;
        }
        let d = Rational::from(
            other.mid.to_rational().expect("finite") - self.mid.to_rational().expect("finite"),
        )
        .abs();
        d + other.rad.to_float().to_rational().expect("finite") <= self.rad.to_float().to_rational().expect("finite")
    }

    /// True when the two balls share at least one point.
    pub fn overlaps(&self, other: &BallReal) -> bool {
        if !self.is_finite() || !other.is_finite() {
            return true;
        }
        let d = Rational::from(
            other.mid.to_rational().expect("finite") - self.mid.to_rational().expect("finite"),
        )
        .abs();
        d <= Rational::from(
            self.rad.to_float().to_rational().expect("finite") + other.rad.to_float().to_rational().expect("finite"),
        )
    }

    pub fn neg(&self) -> Self {
        BallReal {
            mid: Float::with_val(self.prec(), -&self.mid),
            rad: self.rad,
        }
    }

    pub fn add(&self, other: &BallReal) -> Self {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid + &other.mid, Round::Nearest);
        finish(mid, ord, self.rad.add(other.rad))
    }

    pub fn sub(&self, other: &BallReal) -> Self {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid - &other.mid, Round::Nearest);
        finish(mid, ord, self.rad.add(other.rad))
    }

    pub fn mul(&self, other: &BallReal) -> Self {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid * &other.mid, Round::Nearest);
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            Mag::ZERO
        } else {
            let a = Mag::up(&self.mid).mul(other.rad);
            let b = Mag::up(&other.mid).mul(self.rad);
            a.add(b).add(self.rad.mul(other.rad))
        };
        finish(mid, ord, rad)
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn mul_integer(&self, k: &Integer) -> Self {
        let (mid, ord) = Float::with_val_round(self.prec(), &self.mid * k, Round::Nearest);
        let rad = self.rad.mul(Mag::from_integer(k));
        finish(mid, ord, rad)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul_integer(&Integer::from(k))
    }

    /// Multiplication by `2^e`; exact.
    pub fn mul_2si(&self, e: i32) -> Self {
        let mut mid = self.mid.clone();
        mid <<= e;
        BallReal::from_parts(mid, self.rad.mul_2exp(e as i64))
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self.mul(&BallReal::from_rational(q, self.prec()))
    }

    /// `self / other`; fails unless the divisor ball excludes zero.
    pub fn div(&self, other: &BallReal) -> Result<Self> {
        if other.contains_zero() || !other.is_finite() {
            return Err(Error::DivisionByPossibleZero);
        }
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid / &other.mid, Round::Nearest);
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            Mag::ZERO
        } else {
            // |x/y - xm/ym| <= (|xm| ry + |ym| rx) / (|ym| (|ym| - ry))
            let ym = mag_lower_of(&other.mid);
            let gap = other.abs_lower();
            let num = add_up(
                &mul_up(&mag_of(&self.mid), &other.rad.to_float()),
                &mul_up(&mag_of(&other.mid), &self.rad.to_float()),
            );
            let den = Float::with_val_round(RAD_PREC, &ym * &gap, Round::Down).0;
            if den.is_zero() {
                Mag::INF
            } else {
                Mag::up(&div_up(&num, &den))
            }
        };
        Ok(finish(mid, ord, rad))
    }

    pub fn inv(&self) -> Result<Self> {
        BallReal::one(self.prec()).div(self)
    }

    /// Integer power by binary exponentiation; negative exponents invert.
    pub fn pow_i(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        Ok(base.pow_u(n.unsigned_abs()))
    }

    pub fn pow_u(&self, mut n: u64) -> Self {
        let mut acc = BallReal::one(self.prec());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec();
        let (mid, ord) = Float::with_val_round(prec, self.mid.exp_ref(), Round::Nearest);
        if !mid.is_finite() {
            return BallReal::new(mid, mag_inf());
        }
        let mut rad = if ord == Ordering::Equal {
            Mag::ZERO
        } else {
            Mag::rounding_error(&mid)
        };
        if !self.rad.is_zero() {
            // e^(m+d) - e^m = e^m (e^d - 1), |e^d - 1| <= e^r - 1
            let em = Mag::up(&mid).add(rad);
            let growth = Float::with_val_round(RAD_PREC, self.rad.to_float().exp_m1_ref(), Round::Up).0;
            rad = rad.add(em.mul(Mag::up(&growth)));
        }
        BallReal::from_parts(mid, rad)
    }

    pub fn cos(&self) -> Self {
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.cos_ref(), Round::Nearest);
        self.lipschitz_one(mid, ord)
    }

    pub fn sin(&self) -> Self {
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.sin_ref(), Round::Nearest);
        self.lipschitz_one(mid, ord)
    }

    fn lipschitz_one(&self, mid: Float, ord: Ordering) -> Self {
        let two = Mag::up(&Float::with_val(RAD_PREC, 2));
        let spread = if self.rad.log2() > 1.0 { two } else { self.rad };
        finish(mid, ord, spread)
    }

    /// Square root of the non-negative part of the ball.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        let lo = self.lower();
        let hi = self.upper();
        let lo = if lo.is_sign_negative() { Float::new(prec) } else { lo };
        let hi = if hi.is_sign_negative() { Float::new(prec) } else { hi };
        let s_lo = Float::with_val_round(prec, lo.sqrt_ref(), Round::Down).0;
        let s_hi = Float::with_val_round(prec, hi.sqrt_ref(), Round::Up).0;
        BallReal::from_endpoints(&s_lo, &s_hi, prec)
    }

    pub fn abs(&self) -> Self {
        if self.contains_zero() {
            let hi = self.abs_upper();
            BallReal::from_endpoints(&Float::new(self.prec()), &hi, self.prec())
        } else if self.mid.is_sign_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Decimal rendering `mid ± rad` with `digits` significant midpoint
    /// digits. The printed radius absorbs the decimal rounding of the
    /// midpoint, so the printed ball contains this one.
    pub fn to_decimal(&self, digits: usize) -> String {
        if !self.is_finite() {
            return "0 ± inf".to_string();
        }
        let digits = digits.max(1);
        let m = if self.mid.is_zero() {
            "0".to_string()
        } else {
            self.mid.to_string_radix(10, Some(digits))
        };
        let printed = parse_decimal(&m).expect("rug renders parseable decimals");
        let exact_mid = self.mid.to_rational().expect("finite");
        let shift = Rational::from(&printed - &exact_mid).abs();
        let mut total = Float::with_val_round(RAD_PREC, &shift, Round::Up).0;
        total = add_up(&total, &self.rad.to_float());
        let r = if total.is_zero() {
            "0".to_string()
        } else {
            total.to_string_radix_round(10, Some(4), Round::Up)
        };
        format!("{m} ± {r}")
    }
}

impl fmt::Display for BallReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        f.write_str(&self.to_decimal(f.precision().unwrap_or(digits)))
    }
}

/// Parses `mid ± rad`, `mid +/- rad` or a bare decimal midpoint. The result
/// contains the decimal ball; precision is chosen from the digit count.
impl FromStr for BallReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (m, r) = match s.split_once('±').or_else(|| s.split_once("+/-")) {
            Some((m, r)) => (m.trim(), Some(r.trim())),
            None => (s.trim(), None),
        };
        let bad = || Error::InvalidInput(format!("not a ball: {s:?}"));
        let mq = parse_decimal(m).ok_or_else(bad)?;
        let digits = m.chars().filter(|c| c.is_ascii_digit()).count() as f64;
        let prec = ((digits * std::f64::consts::LOG2_10).ceil() as u32 + 16).max(64);
        let ball = BallReal::from_rational(&mq, prec);
        match r {
            None => Ok(ball),
            Some(r) if r == "inf" => Ok(BallReal::new(ball.mid, mag_inf())),
            Some(r) => {
                let rq = parse_decimal(r).ok_or_else(bad)?;
                if rq < 0 {
                    return Err(bad());
                }
                let rf = Float::with_val_round(RAD_PREC, &rq, Round::Up).0;
                Ok(ball.add_error(&rf))
            }
        }
    }
}

impl PartialEq for BallReal {
    /// Structural equality of midpoint and radius, not set equality.
    fn eq(&self, other: &Self) -> bool {
        self.mid == other.mid && self.rad == other.rad
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&BallReal> for &BallReal {
            type Output = BallReal;
            fn $method(self, rhs: &BallReal) -> BallReal {
                BallReal::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &BallReal {
    type Output = BallReal;
    fn neg(self) -> BallReal {
        BallReal::neg(self)
    }
}
