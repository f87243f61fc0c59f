use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::point::EvalPoint;
use crate::ball::{BallComplex, BallReal};
use crate::error::{Error, Result};

/// Iteration cap of the translate/invert loop.
pub const MAX_REDUCTION_STEPS: usize = 64;

/// Sign of a newform under the Atkin–Lehner involution `W_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtkinLehnerSign {
    pub level: u64,
    pub sign: i8,
    pub certified: bool,
}

#[derive(Clone, Debug)]
enum Multiplier {
    /// Product of the points that were inverted, as an exact Gaussian
    /// rational.
    Exact(Rational, Rational),
    Ball(BallComplex),
}

/// Outcome of moving a point up the upper half plane with translations and
/// inversions `z -> -1/(Nz)`:
/// `f(z) = sign^m N^{-km/2} (z_1 ... z_m)^{-k} f(reduced)` where `z_j` are
/// the points that were inverted (for level 1 the `N` and sign factors are
/// absent).
#[derive(Clone, Debug)]
pub struct Reduction {
    pub point: EvalPoint,
    pub level: u64,
    pub weight: u32,
    pub inversions: u32,
    multiplier: Multiplier,
}

impl Reduction {
    pub fn identity(point: &EvalPoint, level: u64, weight: u32) -> Self {
        Reduction {
            point: point.clone(),
            level,
            weight,
            inversions: 0,
            multiplier: Multiplier::Exact(Rational::from(1), Rational::new()),
        }
    }

    pub fn used_wn(&self) -> bool {
        self.level > 1 && self.inversions > 0
    }

    /// The multiplier as a ball at `prec` bits. Needs the Atkin–Lehner sign
    /// whenever an odd number of `W_N` steps was taken.
    pub fn factor(&self, prec: u32, sign: Option<&AtkinLehnerSign>) -> Result<BallComplex> {
        if self.inversions == 0 {
            return Ok(BallComplex::one(prec));
        }
        let m = match &self.multiplier {
            Multiplier::Exact(re, im) => BallComplex::from_rationals(re, im, prec),
            Multiplier::Ball(b) => b.with_prec(prec),
        };
        let mut f = m.pow_i(-(self.weight as i64))?;
        if self.level > 1 {
            let e = self.weight as u64 * self.inversions as u64;
            let n = Integer::from(self.level);
            let whole = Rational::from((Integer::from(1), Integer::from((&n).pow((e / 2) as u32))));
            f = f.mul_rational(&whole);
            if e % 2 == 1 {
                let root = BallReal::from_integer(&n, prec).sqrt().inv()?;
                f = f.mul_real(&root);
            }
            if self.inversions % 2 == 1 {
                match sign {
                    Some(s) if s.sign == -1 => f = f.neg(),
                    Some(_) => {}
                    None => return Err(Error::IndeterminateSign),
                }
            }
        }
        Ok(f)
    }

    /// Rough `log2 |factor|`, an overestimate by at most a couple of bits.
    pub fn factor_log2(&self) -> f64 {
        if self.inversions == 0 {
            return 0.0;
        }
        let k = self.weight as f64;
        let modulus_log2 = match &self.multiplier {
            Multiplier::Exact(re, im) => {
                let sq = Rational::from(re * re) + Rational::from(im * im);
                Float::with_val(64, &sq).log2().to_f64() / 2.0
            }
            Multiplier::Ball(b) => Float::with_val(64, b.abs_bounds().0.log2_ref()).to_f64(),
        };
        let level_part = if self.level > 1 {
            (self.level as f64).log2() * k * self.inversions as f64 / 2.0
        } else {
            0.0
        };
        -k * modulus_log2 - level_part + 1.0
    }
}

fn inverts(level: u64) -> bool {
    level <= 3
}

fn round_nearest(q: &Rational) -> Integer {
    let (_, floor) = Rational::from(q + Rational::from((1, 2))).fract_floor(Integer::new());
    floor
}

/// Translates and inverts `z` until no step raises its imaginary part.
///
/// Level 1 uses `z -> -1/z` inside the unit circle, levels 2 and 3 use
/// `z -> -1/(Nz)` inside the circle of radius `1/sqrt(N)`; higher levels are
/// only translated. Exact points are reduced in exact arithmetic; ball
/// points decide each branch on the midpoint.
pub fn reduce_point(z: &EvalPoint, level: u64, weight: u32) -> Result<Reduction> {
    match z.as_exact() {
        Some((x, y)) => reduce_exact(x.clone(), y.clone(), level, weight),
        None => reduce_ball(z, level, weight),
    }
}

fn reduce_exact(mut x: Rational, mut y: Rational, level: u64, weight: u32) -> Result<Reduction> {
    let n = Rational::from(level);
    let (mut mre, mut mim) = (Rational::from(1), Rational::new());
    let mut inversions = 0;
    for _ in 0..MAX_REDUCTION_STEPS {
        x -= round_nearest(&x);
        let norm = Rational::from(&x * &x) + Rational::from(&y * &y);
        if !inverts(level) || Rational::from(&norm * &n) >= 1 {
            let point = EvalPoint::exact(x, y)?;
            return Ok(Reduction {
                point,
                level,
                weight,
                inversions,
                multiplier: Multiplier::Exact(mre, mim),
            });
        }
        // accumulate the inverted point, then z -> -zbar / (N |z|^2)
        let re = Rational::from(&mre * &x) - Rational::from(&mim * &y);
        let im = Rational::from(&mre * &y) + Rational::from(&mim * &x);
        mre = re;
        mim = im;
        let scale = Rational::from(&norm * &n);
        x = -x / &scale;
        y /= &scale;
        inversions += 1;
    }
    Err(Error::UncertainRegion)
}

fn reduce_ball(z: &EvalPoint, level: u64, weight: u32) -> Result<Reduction> {
    let mut w = z.ball(0);
    let prec = w.prec().max(64);
    let n = BallReal::from_integer(&Integer::from(level), prec);
    // inversion only when the midpoint is clearly inside the circle
    let threshold = {
        let mut t = Float::with_val(prec, 1) / Float::with_val(prec, level);
        let slack = Float::with_val(prec, 1) - (Float::with_val(prec, 1) >> (prec / 2));
        t *= slack;
        t
    };
    let mut mult = BallComplex::one(prec);
    let mut inversions = 0;
    for _ in 0..MAX_REDUCTION_STEPS {
        let shift = w.re.mid().to_integer_round(Round::Nearest).map(|(i, _)| i).unwrap_or_default();
        if shift != 0 {
            w = BallComplex::new(w.re.sub(&BallReal::from_integer(&shift, prec)), w.im.clone());
        }
        let norm_mid = Float::with_val(prec, w.re.mid() * w.re.mid()) + Float::with_val(prec, w.im.mid() * w.im.mid());
        if !w.im.is_positive() {
            return Err(Error::UncertainRegion);
        }
        if !inverts(level) || norm_mid >= threshold {
            let point = EvalPoint::from_ball(w).map_err(|_| Error::UncertainRegion)?;
            return Ok(Reduction { point, level, weight, inversions, multiplier: Multiplier::Ball(mult) });
        }
        mult = mult.mul(&w);
        let nz = w.mul_real(&n);
        w = nz.inv().map_err(|_| Error::UncertainRegion)?.neg();
        inversions += 1;
    }
    Err(Error::UncertainRegion)
}
