use rug::{Integer, Rational};

use super::arith::{bernoulli, sigma_table};

/// Exact Fourier coefficients `a_0..=a_M` of a modular form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub level: u64,
    pub weight: u32,
    coeffs: Vec<Rational>,
}

impl QExpansion {
    /// Panics if `coeffs` is empty.
    pub fn new(level: u64, weight: u32, coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a q-expansion has at least a_0");
        QExpansion { level, weight, coeffs }
    }

    pub fn from_integers(level: u64, weight: u32, coeffs: &[Integer]) -> Self {
        QExpansion::new(level, weight, coeffs.iter().map(Rational::from).collect())
    }

    /// Truncation length `M`; there are `M + 1` coefficients.
    pub fn length(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn is_cusp(&self) -> bool {
        self.coeffs[0] == 0
    }

    /// Coefficients as integers, or `None` if any is not integral.
    pub fn to_integers(&self) -> Option<Vec<Integer>> {
        self.coeffs
            .iter()
            .map(|c| (*c.denom() == 1).then(|| c.numer().clone()))
            .collect()
    }

    pub fn truncate(&self, m: usize) -> QExpansion {
        let m = m.min(self.length());
        QExpansion::new(self.level, self.weight, self.coeffs[..=m].to_vec())
    }
}

/// Product of two integer power series truncated after `q^len`.
pub(crate) fn mul_trunc(a: &[Integer], b: &[Integer], len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len + 1];
    for (i, ai) in a.iter().enumerate().take(len + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += Integer::from(ai * bj);
        }
    }
    out
}

/// `(E_4, E_6)` as integer series to `q^len`.
pub(crate) fn e4_e6_integers(len: usize) -> (Vec<Integer>, Vec<Integer>) {
    let s3 = sigma_table(len, 3);
    let s5 = sigma_table(len, 5);
    let mut e4 = Vec::with_capacity(len + 1);
    let mut e6 = Vec::with_capacity(len + 1);
    e4.push(Integer::from(1));
    e6.push(Integer::from(1));
    for n in 1..=len {
        e4.push(Integer::from(&s3[n] * 240u32));
        e6.push(Integer::from(&s5[n] * -504i32));
    }
    (e4, e6)
}

/// `Δ = (E_4^3 - E_6^2) / 1728` as integers to `q^len`.
pub(crate) fn delta_integers(len: usize) -> Vec<Integer> {
    let (e4, e6) = e4_e6_integers(len);
    let e4sq = mul_trunc(&e4, &e4, len);
    let e4cube = mul_trunc(&e4sq, &e4, len);
    let e6sq = mul_trunc(&e6, &e6, len);
    e4cube
        .into_iter()
        .zip(e6sq)
        .map(|(a, b)| {
            let d = a - b;
            debug_assert!(d.is_divisible_u(1728));
            d.div_exact_u(1728)
        })
        .collect()
}

/// Normalised Eisenstein series `E_k = 1 - (2k / B_k) Σ σ_{k-1}(n) q^n`
/// truncated after `q^m`.
pub fn eisenstein_qexp(k: u32, m: usize) -> QExpansion {
    assert!(k >= 4 && k % 2 == 0, "Eisenstein series need even weight >= 4");
    let scale = Rational::from(-2 * k as i64) / bernoulli(k);
    let sig = sigma_table(m, k - 1);
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(Rational::from(1));
    for s in sig.iter().skip(1) {
        coeffs.push(Rational::from(&scale * s));
    }
    QExpansion::new(1, k, coeffs)
}

/// The discriminant form `Δ = (E_4^3 - E_6^2)/1728` to `q^m`.
pub fn delta_qexp(m: usize) -> QExpansion {
    QExpansion::from_integers(1, 12, &delta_integers(m))
}

/// `Δ = q Π (1 - q^n)^24` to `q^m`, computed from the Euler product.
///
/// The product is expanded factor by factor; its 24th power uses the
/// recurrence `n g_n = Σ_{j=1}^{n} (25 j - n) h_j g_{n-j}` for `g = h^24`,
/// skipping the (many) zero coefficients of `h`.
pub fn eta_delta_oracle(m: usize) -> QExpansion {
    let len = m.saturating_sub(1);
    let mut h = vec![Integer::new(); len + 1];
    h[0] = Integer::from(1);
    for n in 1..=len {
        for i in (n..=len).rev() {
            let t = h[i - n].clone();
            h[i] -= t;
        }
    }
    let support: Vec<usize> = (1..=len).filter(|&j| !h[j].is_zero()).collect();
    let mut g = vec![Integer::new(); len + 1];
    g[0] = Integer::from(1);
    for n in 1..=len {
        let mut acc = Integer::new();
        for &j in support.iter().take_while(|&&j| j <= n) {
            let w = 25 * j as i64 - n as i64;
            acc += Integer::from(&h[j] * &g[n - j]) * w;
        }
        g[n] = acc.div_exact_u(n as u32);
    }
    let mut coeffs = vec![Integer::new(); m + 1];
    for (n, c) in g.into_iter().enumerate() {
        if n + 1 <= m {
            coeffs[n + 1] = c;
        }
    }
    QExpansion::from_integers(1, 12, &coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn eisenstein_examples() {
        assert_eq!(eisenstein_qexp(4, 2).coeffs(), ints(&[1, 240, 2160]).as_slice());
        assert_eq!(eisenstein_qexp(6, 1).coeffs(), ints(&[1, -504]).as_slice());
        assert_eq!(eisenstein_qexp(4, 0).coeffs(), ints(&[1]).as_slice());
        // E_12 has the rational constant 65520/691
        assert_eq!(*eisenstein_qexp(12, 1).coeff(1), Rational::from((65520, 691)));
    }

    #[test]
    fn delta_examples() {
        let d = delta_qexp(5);
        assert_eq!(d.coeffs(), ints(&[0, 1, -24, 252, -1472, 4830]).as_slice());
        assert_eq!(delta_qexp(2).coeffs(), ints(&[0, 1, -24]).as_slice());
    }

    #[test]
    fn eta_oracle_examples() {
        let d = eta_delta_oracle(3);
        assert_eq!(d.coeffs(), ints(&[0, 1, -24, 252]).as_slice());
        assert_eq!(eta_delta_oracle(1).coeffs(), ints(&[0, 1]).as_slice());
    }

    #[test]
    fn two_routes_to_delta_agree() {
        assert_eq!(delta_qexp(200), eta_delta_oracle(200));
    }

    #[test]
    fn eta_product_by_plain_multiplication() {
        // naive 24-fold product as a cross-check of the power recurrence
        let len = 30;
        let mut h = vec![Integer::new(); len + 1];
        h[0] = Integer::from(1);
        for n in 1..=len {
            for i in (n..=len).rev() {
                let t = h[i - n].clone();
                h[i] -= t;
            }
        }
        let mut g = vec![Integer::new(); len + 1];
        g[0] = Integer::from(1);
        for _ in 0..24 {
            g = mul_trunc(&g, &h, len);
        }
        let oracle = eta_delta_oracle(len + 1);
        for n in 0..=len {
            assert_eq!(*oracle.coeff(n + 1), g[n]);
        }
    }
}
