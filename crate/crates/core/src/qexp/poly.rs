//! Dense univariate polynomials over the integers, with Sturm-sequence real
//! root isolation.

use std::cmp::Ordering;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::ball::BallReal;

/// Coefficients from the constant term upward. Never has a zero leading
/// coefficient, the zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(Vec<Integer>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Integer> {
        self.0.last()
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Integer::from(c * i as u64))
                .collect(),
        )
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.0.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Sign of `p(x)`, from the integer `b^n p(a/b)` with `x = a/b`, `b > 0`.
    pub fn sign_at(&self, x: &Rational) -> Ordering {
        let Some(n) = self.degree() else {
            return Ordering::Equal;
        };
        let (a, b) = (x.numer(), x.denom());
        let mut bpow = Integer::from(1);
        let mut acc = self.0[n].clone();
        for i in (0..n).rev() {
            bpow *= b;
            acc *= a;
            acc += Integer::from(&self.0[i] * &bpow);
        }
        acc.cmp0()
    }

    fn sign_at_pos_infinity(&self) -> Ordering {
        self.leading().map_or(Ordering::Equal, |c| c.cmp0())
    }

    fn sign_at_neg_infinity(&self) -> Ordering {
        match self.degree() {
            None => Ordering::Equal,
            Some(d) if d % 2 == 0 => self.sign_at_pos_infinity(),
            Some(_) => self.sign_at_pos_infinity().reverse(),
        }
    }

    pub fn eval_ball(&self, x: &BallReal) -> BallReal {
        let prec = x.prec();
        let mut acc = BallReal::zero(prec);
        for c in self.0.iter().rev() {
            acc = acc.mul(x).add(&BallReal::from_integer(c, prec));
        }
        acc
    }

    /// Content made positive; the zero polynomial has content 0.
    fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in &self.0 {
            g.gcd_mut(c);
        }
        g
    }

    /// Divides out the content, keeping the sign of every coefficient.
    pub fn primitive(&self) -> IntPoly {
        let g = self.content();
        if g <= 1 {
            return self.clone();
        }
        IntPoly(self.0.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect())
    }

    /// Clears denominators of a rational polynomial by a positive factor.
    fn from_rationals(coeffs: &[Rational]) -> IntPoly {
        let mut l = Integer::from(1);
        for c in coeffs {
            l.lcm_mut(c.denom());
        }
        let ints = coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
            .collect();
        IntPoly::new(ints).primitive()
    }

    /// Remainder of `self` modulo `other` over the rationals, scaled by a
    /// positive constant to a primitive integer polynomial.
    pub fn rem_positive(&self, other: &IntPoly) -> IntPoly {
        let db = other.degree().expect("division by the zero polynomial");
        let lead = Rational::from(other.leading().unwrap());
        let mut r: Vec<Rational> = self.0.iter().map(Rational::from).collect();
        while r.len() > db {
            let top = r.len() - 1;
            let q = Rational::from(&r[top] / &lead);
            if q != 0 {
                for (i, c) in other.0.iter().enumerate() {
                    r[top - db + i] -= Rational::from(&q * c);
                }
            }
            r.pop();
        }
        IntPoly::from_rationals(&r)
    }

    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        while !b.is_zero() {
            let r = a.rem_positive(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree().unwrap_or(0) == 0
    }

    /// An integer strictly above the absolute value of every complex root,
    /// from Fujiwara's bound `2 max_i |a_{n-i} / a_n|^{1/i}`.
    pub fn root_bound(&self) -> Integer {
        let n = self.degree().expect("zero polynomial");
        let lead = Integer::from(self.0[n].abs_ref());
        let mut m = Integer::from(1);
        for i in 1..=n {
            let c = Integer::from(self.0[n - i].abs_ref());
            if c.is_zero() {
                continue;
            }
            // ceil(|a_{n-i}| / |a_n|), then the ceiling of its i-th root
            let q = c.div_rem_ceil(lead.clone()).0;
            let mut r = Integer::from(q.root_ref(i as u32));
            if Integer::from((&r).pow(i as u32)) < q {
                r += 1;
            }
            if r > m {
                m = r;
            }
        }
        2 * m + 1
    }
}

/// The Sturm sequence of a squarefree polynomial.
pub struct Sturm {
    seq: Vec<IntPoly>,
}

impl Sturm {
    pub fn new(p: &IntPoly) -> Sturm {
        let mut seq = vec![p.primitive(), p.derivative().primitive()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            if seq[n - 1].degree() == Some(0) {
                break;
            }
            let r = seq[n - 2].rem_positive(&seq[n - 1]);
            seq.push(IntPoly::new(r.0.into_iter().map(|c| -c).collect()));
        }
        Sturm { seq }
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs.filter(|s| *s != Ordering::Equal) {
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Sturm::variations(self.seq.iter().map(|p| p.sign_at(x)))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    pub fn count_real(&self) -> usize {
        let neg = Sturm::variations(self.seq.iter().map(|p| p.sign_at_neg_infinity()));
        let pos = Sturm::variations(self.seq.iter().map(|p| p.sign_at_pos_infinity()));
        neg - pos
    }
}

/// A half-open interval `(lo, hi]` holding exactly one root of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Isolates all real roots of a squarefree polynomial, in ascending order.
pub fn isolate_real_roots(p: &IntPoly) -> Vec<RootInterval> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sturm = Sturm::new(p);
    let b = Rational::from(p.root_bound());
    let a = Rational::from(-&b);
    let mut out = Vec::new();
    let mut stack = vec![(a, b)];
    // explore right half first so roots pop off in ascending order
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count_in(&lo, &hi) {
            0 => {}
            1 => out.push(RootInterval { lo, hi }),
            _ => {
                let mid = Rational::from(&lo + &hi) / 2u32;
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out
}

/// Shrinks an isolating interval of a squarefree `p` until its width is at
/// most `2^-bits`, or the root is found exactly.
pub fn refine_root(p: &IntPoly, iv: &RootInterval, bits: u32) -> RootInterval {
    let mut iv = iv.clone();
    if p.degree() == Some(1) {
        let r = Rational::from((-p.0[0].clone(), p.0[1].clone()));
        return RootInterval { lo: r.clone(), hi: r };
    }
    if p.sign_at(&iv.hi) == Ordering::Equal {
        return RootInterval { lo: iv.hi.clone(), hi: iv.hi };
    }
    let target = Rational::from((Integer::from(1), Integer::from(1) << bits));
    let hi_sign = p.sign_at(&iv.hi);
    let dp = p.derivative();
    let coeff_bits = p.0.iter().map(Integer::significant_bits).max().unwrap_or(1);
    let degree = p.degree().unwrap_or(1) as u32;
    while !iv.is_exact() && iv.width() > target {
        if let Some(next) = newton_step(p, &dp, &iv, hi_sign, coeff_bits, degree, bits) {
            iv = next;
            continue;
        }
        let mid = Rational::from(&iv.lo + &iv.hi) / 2u32;
        match p.sign_at(&mid) {
            Ordering::Equal => return RootInterval { lo: mid.clone(), hi: mid },
            s if s == hi_sign => iv.hi = mid,
            _ => iv.lo = mid,
        }
    }
    iv
}

/// One Newton step from the midpoint of `iv`, accepted only when the sign
/// change confirms a root inside the much smaller interval it proposes.
fn newton_step(
    p: &IntPoly,
    dp: &IntPoly,
    iv: &RootInterval,
    hi_sign: Ordering,
    coeff_bits: u32,
    degree: u32,
    bits: u32,
) -> Option<RootInterval> {
    let width = iv.width();
    let width_bits = Float::with_val(64, &width).log2().to_f64();
    if !width_bits.is_finite() {
        return None;
    }
    let current = (-width_bits).max(0.0) as u32;
    let goal = (2 * current + 8).min(bits + 2);
    let magnitude = {
        let m = Float::with_val(64, &iv.hi).abs().max(&Float::with_val(64, &iv.lo).abs());
        m.log2().to_f64().max(0.0).ceil() as u32
    };
    let prec = goal + coeff_bits + degree * (magnitude + 1) + 64;
    let x = Float::with_val(prec, Rational::from(&iv.lo + &iv.hi) / 2u32);
    let horner = |q: &IntPoly| {
        let mut acc = Float::new(prec);
        for c in q.0.iter().rev() {
            acc *= &x;
            acc += c;
        }
        acc
    };
    let d = horner(dp);
    if d.is_zero() {
        return None;
    }
    let next = Float::with_val(prec, &x - horner(p) / d);
    let delta = Float::with_val(prec, 1) >> goal as i32;
    let lo = Float::with_val(prec, &next - &delta).to_rational()?;
    let hi = Float::with_val(prec, &next + &delta).to_rational()?;
    if lo <= iv.lo || hi >= iv.hi {
        return None;
    }
    let (sl, sh) = (p.sign_at(&lo), p.sign_at(&hi));
    if sl == Ordering::Equal {
        return Some(RootInterval { lo: lo.clone(), hi: lo });
    }
    if sh == Ordering::Equal {
        return Some(RootInterval { lo: hi.clone(), hi });
    }
    (sh == hi_sign && sl != hi_sign).then_some(RootInterval { lo, hi })
}

/// Ball enclosing the root held in `iv`.
pub fn interval_ball(iv: &RootInterval, prec: u32) -> BallReal {
    if iv.is_exact() {
        BallReal::from_rational(&iv.lo, prec)
    } else {
        let lo = Float::with_val_round(prec, &iv.lo, Round::Down).0;
        let hi = Float::with_val_round(prec, &iv.hi, Round::Up).0;
        BallReal::from_endpoints(&lo, &hi, prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::new(c.iter().map(|&x| Integer::from(x)).collect())
    }

    #[test]
    fn basic_ops() {
        let p = poly(&[-2, 0, 1]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.derivative(), poly(&[0, 2]));
        assert_eq!(p.eval_rational(&Rational::from(3)), 7);
        assert!(p.is_squarefree());
        assert!(!poly(&[1, 2, 1]).is_squarefree());
        assert_eq!(poly(&[0, 0, 0]).degree(), None);
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (x - 1)(x + 2) and (x - 1)(x - 5)
        let a = poly(&[-2, 1, 1]);
        let b = poly(&[5, -6, 1]);
        let g = a.gcd(&b);
        assert_eq!(g.degree(), Some(1));
        assert_eq!(g.eval_rational(&Rational::from(1)), 0);
    }

    #[test]
    fn isolates_sqrt_two() {
        let p = poly(&[-2, 0, 1]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 2);
        let r = refine_root(&p, &roots[1], 60);
        assert!(r.width() <= Rational::from((1, 1u64 << 60)));
        let ball = interval_ball(&r, 128);
        let s = BallReal::from_i64(2, 128).sqrt();
        assert!(ball.overlaps(&s));
        assert!(interval_ball(&refine_root(&p, &roots[0], 60), 128).is_negative());
    }

    #[test]
    fn exact_roots_are_found() {
        // (x - 1) x (x + 1)
        let p = poly(&[0, -1, 0, 1]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 3);
        let vals: Vec<RootInterval> = roots
            .iter()
            .map(|iv| refine_root(&p, iv, 80))
            .collect();
        for (iv, r) in vals.iter().zip([-1, 0, 1]) {
            assert!(iv.lo <= r && r <= iv.hi);
        }
        let lin = refine_root(&poly(&[6, -4]), &isolate_real_roots(&poly(&[6, -4]))[0], 10);
        assert!(lin.is_exact());
        assert_eq!(lin.lo, Rational::from((3, 2)));
    }

    #[test]
    fn sturm_counts_complex_free_roots() {
        assert_eq!(Sturm::new(&poly(&[1, 0, 1])).count_real(), 0);
        assert_eq!(Sturm::new(&poly(&[-20468736, -1080, 1])).count_real(), 2);
        // x^5 - x has three real roots
        assert_eq!(Sturm::new(&poly(&[0, -1, 0, 0, 0, 1])).count_real(), 3);
    }
}
