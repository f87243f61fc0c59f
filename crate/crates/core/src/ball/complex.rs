use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Round;
use rug::{Float, Integer, Rational};

use super::{add_up, div_up, hypot_up, mag_inf, mag_of, mul_up, BallReal, RAD_PREC};
use crate::error::{Error, Result};

/// A complex rectangle `re × im` of real balls.
#[derive(Clone, Debug, PartialEq)]
pub struct BallComplex {
    pub re: BallReal,
    pub im: BallReal,
}

impl BallComplex {
    pub fn new(re: BallReal, im: BallReal) -> Self {
        BallComplex { re, im }
    }

    pub fn from_real(re: BallReal) -> Self {
        let prec = re.prec();
        BallComplex {
            re,
            im: BallReal::zero(prec),
        }
    }

    pub fn zero(prec: u32) -> Self {
        BallComplex::from_real(BallReal::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        BallComplex::from_real(BallReal::one(prec))
    }

    pub fn i(prec: u32) -> Self {
        BallComplex::new(BallReal::zero(prec), BallReal::one(prec))
    }

    pub fn from_rationals(re: &Rational, im: &Rational, prec: u32) -> Self {
        BallComplex::new(BallReal::from_rational(re, prec), BallReal::from_rational(im, prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Both components have exactly zero midpoint and radius in the
    /// imaginary part.
    pub fn is_real(&self) -> bool {
        self.im.is_exact() && self.im.mid().is_zero()
    }

    /// Radius of a disc around the midpoint that contains the rectangle.
    pub fn disc_radius(&self) -> Float {
        hypot_up(&self.re.rad(), &self.im.rad())
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, other: &BallComplex) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn contains(&self, other: &BallComplex) -> bool {
        self.re.contains(&other.re) && self.im.contains(&other.im)
    }

    pub fn contains_rationals(&self, re: &Rational, im: &Rational) -> bool {
        self.re.contains_rational(re) && self.im.contains_rational(im)
    }

    /// Adds `r` to the radius of both components, which encloses the disc of
    /// radius `r` around every point of the rectangle.
    pub fn add_error(&self, r: &Float) -> Self {
        BallComplex::new(self.re.add_error(r), self.im.add_error(r))
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BallComplex::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    /// Lower and upper bounds on `|v|` over the rectangle.
    pub fn abs_bounds(&self) -> (Float, Float) {
        let lo_re = self.re.abs_lower();
        let lo_im = self.im.abs_lower();
        let hi_re = self.re.abs_upper();
        let hi_im = self.im.abs_upper();
        let lo_sq = Float::with_val_round(
            RAD_PREC,
            Float::with_val_round(RAD_PREC, &lo_re * &lo_re, Round::Down).0
                + Float::with_val_round(RAD_PREC, &lo_im * &lo_im, Round::Down).0,
            Round::Down,
        )
        .0;
        let lower = Float::with_val_round(RAD_PREC, lo_sq.sqrt_ref(), Round::Down).0;
        (lower, hypot_up(&hi_re, &hi_im))
    }

    pub fn conj(&self) -> Self {
        BallComplex::new(self.re.clone(), self.im.neg())
    }

    pub fn neg(&self) -> Self {
        BallComplex::new(self.re.neg(), self.im.neg())
    }

    pub fn add(&self, other: &BallComplex) -> Self {
        BallComplex::new(self.re.add(&other.re), self.im.add(&other.im))
    }

    pub fn sub(&self, other: &BallComplex) -> Self {
        BallComplex::new(self.re.sub(&other.re), self.im.sub(&other.im))
    }

    pub fn add_real(&self, x: &BallReal) -> Self {
        BallComplex::new(self.re.add(x), self.im.clone())
    }

    pub fn mul(&self, other: &BallComplex) -> Self {
        if other.is_real() {
            return self.mul_real(&other.re);
        }
        if self.is_real() {
            return other.mul_real(&self.re);
        }
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        BallComplex::new(re, im)
    }

    pub fn sqr(&self) -> Self {
        if self.is_real() {
            return BallComplex::from_real(self.re.sqr());
        }
        let re = self.re.sqr().sub(&self.im.sqr());
        let im = self.re.mul(&self.im).mul_2si(1);
        BallComplex::new(re, im)
    }

    pub fn mul_real(&self, x: &BallReal) -> Self {
        if self.is_real() {
            return BallComplex::from_real(self.re.mul(x));
        }
        BallComplex::new(self.re.mul(x), self.im.mul(x))
    }

    pub fn mul_integer(&self, k: &Integer) -> Self {
        BallComplex::new(self.re.mul_integer(k), self.im.mul_integer(k))
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        let x = BallReal::from_rational(q, self.prec());
        self.mul_real(&x)
    }

    /// Multiplication by `i`; exact.
    pub fn mul_i(&self) -> Self {
        BallComplex::new(self.im.neg(), self.re.clone())
    }

    /// `x / y` for complex balls. Fails with `DivisionByPossibleZero` unless
    /// the disc enclosing `y` excludes the origin.
    ///
    /// The midpoint quotient is computed in ball arithmetic from the exact
    /// midpoints, then widened by
    /// `(|xm| ry + |ym| rx) / (|ym| (|ym| - ry))`.
    pub fn safe_div(&self, y: &BallComplex) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::DivisionByPossibleZero);
        }
        let prec = self.prec().max(y.prec());
        let xm = BallComplex::new(
            BallReal::exact(self.re.mid().clone()),
            BallReal::exact(self.im.mid().clone()),
        );
        let ym = BallComplex::new(
            BallReal::exact(y.re.mid().clone()),
            BallReal::exact(y.im.mid().clone()),
        );
        let ry = y.disc_radius();
        let (ym_lo, ym_hi) = ym.abs_bounds_precise(prec);
        if ym_lo <= ry || ym_lo.is_zero() {
            return Err(Error::DivisionByPossibleZero);
        }
        let norm = ym.re.sqr().add(&ym.im.sqr());
        let q = xm.mul(&ym.conj());
        let q = BallComplex::new(q.re.div(&norm)?, q.im.div(&norm)?);
        if !self.re.is_exact() || !self.im.is_exact() || !ry.is_zero() {
            let rx = self.disc_radius();
            let (_, xm_hi) = xm.abs_bounds_precise(prec);
            let num = add_up(&mul_up(&xm_hi, &ry), &mul_up(&ym_hi, &rx));
            let gap = Float::with_val_round(RAD_PREC, &ym_lo - &ry, Round::Down).0;
            let den = Float::with_val_round(RAD_PREC, &ym_lo * &gap, Round::Down).0;
            let spread = if den.is_zero() { mag_inf() } else { div_up(&num, &den) };
            return Ok(q.add_error(&spread));
        }
        Ok(q)
    }

    /// Modulus bounds computed at working precision before rounding to a
    /// radius value; used when the divisor midpoint is close to its radius.
    fn abs_bounds_precise(&self, prec: u32) -> (Float, Float) {
        let p = prec.max(64);
        let sq_lo = Float::with_val_round(
            p,
            Float::with_val_round(p, self.re.mid() * self.re.mid(), Round::Down).0
                + Float::with_val_round(p, self.im.mid() * self.im.mid(), Round::Down).0,
            Round::Down,
        )
        .0;
        let sq_hi = Float::with_val_round(
            p,
            Float::with_val_round(p, self.re.mid() * self.re.mid(), Round::Up).0
                + Float::with_val_round(p, self.im.mid() * self.im.mid(), Round::Up).0,
            Round::Up,
        )
        .0;
        let lo = Float::with_val_round(p, sq_lo.sqrt_ref(), Round::Down).0;
        let hi = Float::with_val_round(p, sq_hi.sqrt_ref(), Round::Up).0;
        (
            Float::with_val_round(RAD_PREC, &lo, Round::Down).0,
            mag_of(&hi),
        )
    }

    pub fn inv(&self) -> Result<Self> {
        BallComplex::one(self.prec()).safe_div(self)
    }

    pub fn pow_u(&self, mut n: u64) -> Self {
        let mut acc = BallComplex::one(self.prec());
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

    pub fn pow_i(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        Ok(base.pow_u(n.unsigned_abs()))
    }

    /// `e^z` with working precision `prec`.
    pub fn exp(&self, prec: u32) -> Self {
        let prec = prec.max(super::MIN_PREC);
        let modulus = self.re.with_prec(prec).exp();
        if self.im.is_exact() && self.im.mid().is_zero() {
            return BallComplex::from_real(modulus);
        }
        let im = self.im.with_prec(prec);
        BallComplex::new(modulus.mul(&im.cos()), modulus.mul(&im.sin()))
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        format!("({}) + ({})i", self.re.to_decimal(digits), self.im.to_decimal(digits))
    }
}

impl fmt::Display for BallComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => f.write_str(&self.to_decimal(d)),
            None => write!(f, "({}) + ({})i", self.re, self.im),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&BallComplex> for &BallComplex {
            type Output = BallComplex;
            fn $method(self, rhs: &BallComplex) -> BallComplex {
                BallComplex::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &BallComplex {
    type Output = BallComplex;
    fn neg(self) -> BallComplex {
        BallComplex::neg(self)
    }
}
