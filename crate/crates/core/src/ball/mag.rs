use rug::float::{Round, Special};
use rug::{Float, Integer};

use super::RAD_PREC;

const BITS: u32 = 30;
const INF_EXP: i64 = i64::MAX;
const EXP_LIMIT: i64 = 1 << 40;

/// Unsigned upper bound `man · 2^exp` with a 30-bit mantissa. Every
/// operation rounds up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };
    pub const INF: Mag = Mag { man: 1 << (BITS - 1), exp: INF_EXP };

    fn norm_up(man: u64, exp: i64) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        let bits = 64 - man.leading_zeros();
        let (mut m, mut e) = if bits > BITS {
            let s = bits - BITS;
            let mut m = man >> s;
            if m << s != man {
                m += 1;
            }
            (m, exp + s as i64)
        } else {
            let s = BITS - bits;
            (man << s, exp - s as i64)
        };
        if m == 1 << BITS {
            m >>= 1;
            e += 1;
        }
        if e > EXP_LIMIT {
            Mag::INF
        } else {
            Mag { man: m, exp: e.max(-EXP_LIMIT) }
        }
    }

    pub fn is_zero(self) -> bool {
        self.man == 0
    }

    pub fn is_inf(self) -> bool {
        self.exp == INF_EXP
    }

    pub fn add(self, o: Mag) -> Mag {
        if self.is_inf() || o.is_inf() {
            return Mag::INF;
        }
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (a, b) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let d = a.exp - b.exp;
        if d > 32 {
            // b < 2^(a.exp - 3), under one unit of a
            Mag::norm_up(a.man + 1, a.exp)
        } else {
            Mag::norm_up((a.man << d) + b.man, b.exp)
        }
    }

    pub fn mul(self, o: Mag) -> Mag {
        if self.is_inf() || o.is_inf() {
            return Mag::INF;
        }
        if self.is_zero() || o.is_zero() {
            return Mag::ZERO;
        }
        Mag::norm_up(self.man * o.man, self.exp + o.exp)
    }

    /// Exact scaling by `2^e`.
    pub fn mul_2exp(self, e: i64) -> Mag {
        if self.is_zero() || self.is_inf() {
            return self;
        }
        Mag::norm_up(self.man, self.exp + e)
    }

    /// From `f · 2^e` with `f` in `[0.5, 1]`, rounding up.
    fn from_f64_exp(f: f64, e: i64) -> Mag {
        Mag::norm_up((f * (1u64 << BITS) as f64).ceil() as u64, e - BITS as i64)
    }

    /// Upper bound on `|x|`.
    pub fn up(x: &Float) -> Mag {
        if x.is_nan() || x.is_infinite() {
            return Mag::INF;
        }
        if x.is_zero() {
            return Mag::ZERO;
        }
        let round = if x.is_sign_negative() { Round::Down } else { Round::Up };
        let (f, e) = x.to_f64_exp_round(round);
        Mag::from_f64_exp(f.abs(), e as i64)
    }

    /// Upper bound on `|k|`.
    pub fn from_integer(k: &Integer) -> Mag {
        if k.is_zero() {
            return Mag::ZERO;
        }
        // mantissa truncated toward zero
        let (f, e) = k.to_f64_exp();
        let m = (f.abs() * (1u64 << BITS) as f64).floor() as u64 + 1;
        Mag::norm_up(m, e as i64 - BITS as i64)
    }

    /// Bound on the error of a midpoint `v` rounded to nearest at its
    /// precision.
    pub fn rounding_error(v: &Float) -> Mag {
        Mag::up(v).mul_2exp(1 - v.prec() as i64)
    }

    pub fn to_float(self) -> Float {
        if self.is_inf() {
            return Float::with_val(RAD_PREC, Special::Infinity);
        }
        let mut f = Float::with_val(RAD_PREC, self.man);
        if !self.is_zero() {
            f <<= self.exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        }
        f
    }

    /// `log2` of the value as an `f64`, `-inf` for zero.
    pub fn log2(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else if self.is_inf() {
            f64::INFINITY
        } else {
            (self.man as f64).log2() + self.exp as f64
        }
    }
}
