use std::fmt;

use rug::float::Round;
use rug::{Float, Integer, Rational};

use crate::ball::{BallComplex, BallReal};
use crate::error::{Error, Result};

/// A point of the upper half plane, optionally known exactly as a pair of
/// rationals so it can be re-rounded at any precision.
#[derive(Clone, Debug)]
pub struct EvalPoint {
    ball: BallComplex,
    exact: Option<(Rational, Rational)>,
}

impl EvalPoint {
    pub fn exact(re: Rational, im: Rational) -> Result<Self> {
        if im <= 0 {
            return Err(Error::NonPositiveImaginaryPart);
        }
        let ball = BallComplex::from_rationals(&re, &im, 64);
        Ok(EvalPoint { ball, exact: Some((re, im)) })
    }

    /// A point known only as a ball; the whole ball must lie above the real
    /// axis.
    pub fn from_ball(z: BallComplex) -> Result<Self> {
        if !z.is_finite() || !z.im.lower().is_sign_positive() || z.im.lower().is_zero() {
            return Err(Error::NonPositiveImaginaryPart);
        }
        Ok(EvalPoint { ball: z, exact: None })
    }

    pub fn i() -> Self {
        EvalPoint::exact(Rational::new(), Rational::from(1)).unwrap()
    }

    pub fn as_exact(&self) -> Option<(&Rational, &Rational)> {
        self.exact.as_ref().map(|(a, b)| (a, b))
    }

    /// The point as a ball at `prec` bits; inexact points keep their own
    /// enclosure.
    pub fn ball(&self, prec: u32) -> BallComplex {
        match &self.exact {
            Some((re, im)) => BallComplex::from_rationals(re, im, prec),
            None => self.ball.clone(),
        }
    }

    pub fn im_lower(&self) -> Float {
        match &self.exact {
            Some((_, im)) => Float::with_val_round(64, im, Round::Down).0,
            None => self.ball.im.lower(),
        }
    }

    pub fn im_upper(&self) -> Float {
        match &self.exact {
            Some((_, im)) => Float::with_val_round(64, im, Round::Up).0,
            None => self.ball.im.upper(),
        }
    }

    /// True when the real part is exactly zero.
    pub fn is_purely_imaginary(&self) -> bool {
        match &self.exact {
            Some((re, _)) => *re == 0,
            None => self.ball.re.is_exact() && self.ball.re.mid().is_zero(),
        }
    }

    /// True when the real part is exactly `0` or `±1/2`, where `q` is real.
    pub fn has_real_q(&self) -> bool {
        let half = Rational::from((1, 2));
        match &self.exact {
            Some((re, _)) => *re == 0 || Rational::from(re.abs_ref()) == half,
            None => {
                self.ball.re.is_exact() && {
                    let m = self.ball.re.mid();
                    m.is_zero() || Float::with_val(m.prec(), m.abs_ref()) == 0.5
                }
            }
        }
    }

    /// `(self + j) / p`, exactly when possible.
    pub fn hecke_image(&self, j: i64, p: u64) -> Result<EvalPoint> {
        match &self.exact {
            Some((re, im)) => EvalPoint::exact(
                Rational::from(re + j) / Integer::from(p),
                Rational::from(im / Integer::from(p)),
            ),
            None => {
                let prec = self.ball.prec();
                let pq = Rational::from((1, p));
                let re = self.ball.re.add(&BallReal::from_i64(j, prec)).mul_rational(&pq);
                EvalPoint::from_ball(BallComplex::new(re, self.ball.im.mul_rational(&pq)))
            }
        }
    }

    /// `p * self`.
    pub fn scaled(&self, p: u64) -> Result<EvalPoint> {
        match &self.exact {
            Some((re, im)) => EvalPoint::exact(Rational::from(re * p), Rational::from(im * p)),
            None => EvalPoint::from_ball(self.ball.mul_integer(&Integer::from(p))),
        }
    }

    /// `(a z + b) / (c z + d)` for an exact point.
    pub fn mobius(&self, a: i64, b: i64, c: i64, d: i64) -> Result<EvalPoint> {
        let (x, y) = self
            .as_exact()
            .ok_or_else(|| Error::InvalidInput("Mobius images need an exact point".into()))?;
        // (az+b)/(cz+d) = (az+b)(c zbar + d) / |cz+d|^2
        let ux = Rational::from(x * a) + b;
        let uy = Rational::from(y * a);
        let vx = Rational::from(x * c) + d;
        let vy = Rational::from(y * c);
        let norm = Rational::from(&vx * &vx) + Rational::from(&vy * &vy);
        if norm == 0 {
            return Err(Error::InvalidInput("degenerate Mobius transformation".into()));
        }
        let re = (Rational::from(&ux * &vx) + Rational::from(&uy * &vy)) / &norm;
        let im = (Rational::from(&uy * &vx) - Rational::from(&ux * &vy)) / &norm;
        EvalPoint::exact(re, im)
    }
}

fn fmt_rational(q: &Rational) -> String {
    let mut den = q.denom().clone();
    let twos = den.find_one(0).unwrap_or(0);
    den >>= twos;
    let mut fives = 0u32;
    while den.is_divisible_u(5) {
        den /= 5u32;
        fives += 1;
    }
    if den != 1 {
        return q.to_string();
    }
    let places = twos.max(fives);
    let scaled = Rational::from(q * Integer::from(Integer::u_pow_u(10, places)));
    let digits = scaled.numer().clone().abs().to_string();
    let sign = if *q < 0 { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let places = places as usize;
    let padded = format!("{:0>width$}", digits, width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    format!("{sign}{int}.{frac}")
}

impl fmt::Display for EvalPoint {
    /// Renders as `re+imi`, with terminating decimals where possible.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some((re, im)) => write!(f, "{}+{}i", fmt_rational(re), fmt_rational(im)),
            None => write!(f, "{}", self.ball),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_lower_half_plane() {
        assert!(EvalPoint::exact(Rational::new(), Rational::new()).is_err());
        assert!(EvalPoint::exact(Rational::new(), Rational::from(-1)).is_err());
        let straddle = BallComplex::new(BallReal::zero(64), BallReal::from_f64(0.0, 64).add_error(&Float::with_val(32, 0.1)));
        assert_eq!(EvalPoint::from_ball(straddle).unwrap_err(), Error::NonPositiveImaginaryPart);
    }

    #[test]
    fn literal_rendering() {
        assert_eq!(EvalPoint::i().to_string(), "0+1i");
        let z = EvalPoint::exact(Rational::from((3, 10)), Rational::from((11, 10))).unwrap();
        assert_eq!(z.to_string(), "0.3+1.1i");
        let w = EvalPoint::exact(Rational::from((-1, 3)), Rational::from((1, 8))).unwrap();
        assert_eq!(w.to_string(), "-1/3+0.125i");
    }

    #[test]
    fn mobius_images() {
        let z = EvalPoint::i();
        let w = z.mobius(0, -1, 1, 0).unwrap();
        assert_eq!(w.as_exact().unwrap(), (&Rational::new(), &Rational::from(1)));
        let h = z.hecke_image(1, 2).unwrap();
        assert_eq!(h.as_exact().unwrap(), (&Rational::from((1, 2)), &Rational::from((1, 2))));
        assert!(h.has_real_q());
        assert!(z.is_purely_imaginary());
    }
}
