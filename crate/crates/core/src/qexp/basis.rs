use rug::ops::Pow;
use rug::{Integer, Rational};

use super::arith::{exponent_pairs, is_prime};
use super::linalg::{invert, IntMatrix};
use super::series::{delta_integers, e4_e6_integers, mul_trunc, QExpansion};
use crate::error::{Error, Result};

/// Echelonized basis of `S_k(1)` built from the products `Δ E_4^a E_6^b`.
#[derive(Clone, Debug)]
pub struct CuspBasis {
    pub weight: u32,
    pub length: usize,
    pub elements: Vec<QExpansion>,
    pub exponent_pairs: Vec<(u32, u32)>,
    /// `elements[i] = Σ_j transform[i][j] Δ E_4^{a_j} E_6^{b_j}`.
    pub transform: Vec<Vec<Rational>>,
    ints: Vec<Vec<Integer>>,
}

/// The series `Δ E_4^a E_6^b` for each pair, to `q^len`.
pub(crate) fn generator_series(pairs: &[(u32, u32)], len: usize) -> Vec<Vec<Integer>> {
    let max_a = pairs.iter().map(|p| p.0).max().unwrap_or(0) as usize;
    let max_b = pairs.iter().map(|p| p.1).max().unwrap_or(0) as usize;
    let (e4, e6) = e4_e6_integers(len);
    let delta = delta_integers(len);
    let mut one = vec![Integer::new(); len + 1];
    one[0] = Integer::from(1);
    let powers = |base: &Vec<Integer>, top: usize| {
        let mut out = vec![one.clone()];
        for i in 1..=top {
            out.push(mul_trunc(&out[i - 1], base, len));
        }
        out
    };
    let e4p = powers(&e4, max_a);
    let e6p = powers(&e6, max_b);
    pairs
        .iter()
        .map(|&(a, b)| {
            let ab = mul_trunc(&e4p[a as usize], &e6p[b as usize], len);
            mul_trunc(&delta, &ab, len)
        })
        .collect()
}

/// Echelonized basis of `S_k(1)` to `q^m`, pivoted on `q^1 .. q^dim`.
pub fn cusp_basis(k: u32, m: usize) -> Result<CuspBasis> {
    let pairs = if k % 2 == 0 && k >= 12 { exponent_pairs(k as i64 - 12) } else { Vec::new() };
    let dim = pairs.len();
    if dim == 0 {
        return Err(Error::EmptySpace { weight: k });
    }
    let len = m.max(dim);
    let gens = generator_series(&pairs, len);
    let block: Vec<Vec<Rational>> = gens
        .iter()
        .map(|g| (1..=dim).map(|n| Rational::from(&g[n])).collect())
        .collect();
    // rows of `block` are generators; we need R with R * block = I
    let transform = invert(&block).expect("pivot block of the generators is invertible");
    let mut ints = Vec::with_capacity(dim);
    for row in &transform {
        let mut acc = vec![Rational::new(); len + 1];
        for (r, g) in row.iter().zip(&gens) {
            if *r == 0 {
                continue;
            }
            for (a, c) in acc.iter_mut().zip(g) {
                *a += Rational::from(r * c);
            }
        }
        let v: Vec<Integer> = acc
            .into_iter()
            .map(|c| {
                assert!(*c.denom() == 1, "echelonized level-one basis is integral");
                c.into_numer_denom().0
            })
            .collect();
        ints.push(v);
    }
    let ints: Vec<Vec<Integer>> = ints.into_iter().map(|mut v| {
        v.truncate(m + 1);
        v
    }).collect();
    let elements = ints.iter().map(|v| QExpansion::from_integers(1, k, v)).collect();
    Ok(CuspBasis { weight: k, length: m, elements, exponent_pairs: pairs, transform, ints })
}

impl CuspBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Integer coefficients of element `i`.
    pub fn integers(&self, i: usize) -> &[Integer] {
        &self.ints[i]
    }

    /// Matrix of `T_p` on this basis: column `j` holds the coordinates of
    /// `T_p b_j`, read off at the pivots.
    pub fn hecke_matrix(&self, p: u64) -> Result<IntMatrix> {
        if !is_prime(p) {
            return Err(Error::CompositeIndex(p));
        }
        let dim = self.dim();
        let needed = p as usize * dim;
        if needed > self.length {
            return Err(Error::InsufficientLength { needed, available: self.length });
        }
        let pk = Integer::from(p).pow(self.weight - 1);
        let mut a = vec![vec![Integer::new(); dim]; dim];
        for (j, b) in self.ints.iter().enumerate() {
            for i in 0..dim {
                let n = i + 1;
                let mut v = b[p as usize * n].clone();
                if n as u64 % p == 0 {
                    v += Integer::from(&pk * &b[n / p as usize]);
                }
                a[i][j] = v;
            }
        }
        Ok(a)
    }
}

/// Matrix of `T_p` on `S_k(1)` from a basis of length `p * m`.
pub fn hecke_matrix(k: u32, p: u64, m: usize) -> Result<IntMatrix> {
    let basis = cusp_basis(k, p as usize * m)?;
    if m < basis.dim() {
        return Err(Error::InsufficientLength { needed: p as usize * basis.dim(), available: p as usize * m });
    }
    basis.hecke_matrix(p)
}
