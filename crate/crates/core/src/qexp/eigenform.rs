use std::sync::{Arc, Mutex};

use rug::{Integer, Rational};

use super::arith::primes;
use super::basis::{cusp_basis, CuspBasis};
use super::linalg::{charpoly_adjugate, IntMatrix};
use super::poly::{interval_ball, isolate_real_roots, refine_root, IntPoly, RootInterval};
use crate::ball::BallReal;
use crate::error::{Error, Result, Stage};

/// How many generating primes are tried before giving up on a degenerate
/// Hecke operator.
pub const MAX_GENERATOR_PRIMES: usize = 10;

/// Number of precision doublings allowed before `PrecisionExhausted`.
pub const MAX_DOUBLINGS: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientSource {
    ComputedLevel1,
    File,
    Remote,
}

/// A normalized eigenform of `S_k(1)`, selected as the eigenvector of `T_p`
/// for the `embedding`-th real root of its characteristic polynomial.
#[derive(Debug)]
pub struct Level1Eigenform {
    weight: u32,
    embedding: usize,
    dim: usize,
    hecke_prime: u64,
    hecke_matrix: IntMatrix,
    charpoly: IntPoly,
    adjugate: Vec<IntMatrix>,
    root: Mutex<RootInterval>,
    basis: Mutex<Arc<CuspBasis>>,
}

fn bits_of(x: &Integer) -> u32 {
    x.significant_bits()
}

impl Level1Eigenform {
    pub fn new(weight: u32, embedding: usize) -> Result<Self> {
        let mut basis = Arc::new(cusp_basis(weight, 2)?);
        let dim = basis.dim();
        if embedding >= dim {
            return Err(Error::EmbeddingOutOfRange { embedding, count: dim });
        }
        let mut tried = Vec::new();
        for p in primes().take(MAX_GENERATOR_PRIMES) {
            let needed = p as usize * dim;
            if basis.length < needed {
                basis = Arc::new(cusp_basis(weight, needed.max(2 * basis.length))?);
            }
            let a = basis.hecke_matrix(p)?;
            let (charpoly, adjugate) = charpoly_adjugate(&a);
            tried.push(p);
            if !charpoly.is_squarefree() {
                continue;
            }
            let roots = isolate_real_roots(&charpoly);
            if roots.len() != dim {
                // a self-adjoint operator cannot have non-real eigenvalues
                return Err(Error::InvalidInput(format!(
                    "T_{p} on weight {weight} has {} real eigenvalues, expected {dim}",
                    roots.len()
                )));
            }
            return Ok(Level1Eigenform {
                weight,
                embedding,
                dim,
                hecke_prime: p,
                hecke_matrix: a,
                charpoly,
                adjugate,
                root: Mutex::new(roots[embedding].clone()),
                basis: Mutex::new(basis),
            });
        }
        Err(Error::NonSquarefreeCharPoly { tried: tried.len() })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn embedding(&self) -> usize {
        self.embedding
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// The prime whose Hecke operator separates the eigenforms.
    pub fn hecke_prime(&self) -> u64 {
        self.hecke_prime
    }

    pub fn hecke_matrix(&self) -> &IntMatrix {
        &self.hecke_matrix
    }

    pub fn charpoly(&self) -> &IntPoly {
        &self.charpoly
    }

    /// Basis to at least `q^len`, extending the cached one when needed.
    pub fn basis(&self, len: usize) -> Result<Arc<CuspBasis>> {
        let mut guard = self.basis.lock().unwrap();
        if guard.length < len {
            let target = len.max(guard.length + guard.length / 2);
            *guard = Arc::new(cusp_basis(self.weight, target)?);
        }
        Ok(guard.clone())
    }

    /// Eigenvalue of `T_p` (for the separating `p`) as a ball of width at
    /// most `2^-bits`.
    pub fn eigenvalue(&self, bits: u32) -> BallReal {
        let iv = {
            let mut guard = self.root.lock().unwrap();
            if !guard.is_exact() && guard.width() > Rational::from((1, Integer::from(1) << bits)) {
                *guard = refine_root(&self.charpoly, &guard, bits);
            }
            guard.clone()
        };
        let mag = bits_of(&iv.hi.numer().clone().abs()).max(bits_of(&iv.lo.numer().clone().abs()));
        interval_ball(&iv, bits + mag + 8)
    }

    /// Coordinates `c` of the eigenform in the echelonized basis, with
    /// `c[0] = 1` and every radius at most `2^-bits`.
    pub fn eigenvector(&self, bits: u32) -> Result<Vec<BallReal>> {
        let n = self.dim;
        if n == 1 {
            return Ok(vec![BallReal::one(64)]);
        }
        let entry_bits = self
            .adjugate
            .iter()
            .flatten()
            .flatten()
            .map(bits_of)
            .max()
            .unwrap_or(1);
        let mut w = bits + 32;
        for _ in 0..=MAX_DOUBLINGS {
            let theta = self.eigenvalue(w);
            let theta_bits = theta.abs_upper().get_exp().unwrap_or(1).max(1) as u32;
            let prec = w + entry_bits + theta_bits * n as u32 + 64;
            let theta = theta.with_prec(prec);
            let mut powers = vec![BallReal::one(prec)];
            for k in 1..n {
                powers.push(powers[k - 1].mul(&theta));
            }
            // adj(θI - A) = Σ_{k=1}^{n} θ^{n-k} M_k
            let adj = |i: usize, j: usize| {
                let mut acc = BallReal::zero(prec);
                for (k, m) in self.adjugate.iter().enumerate() {
                    acc = acc.add(&powers[n - 1 - k].mul_integer(&m[i][j]));
                }
                acc
            };
            let mut best: Option<(usize, BallReal)> = None;
            for j in 0..n {
                let e = adj(0, j);
                let better = match &best {
                    None => true,
                    Some((_, b)) => e.abs_lower() > b.abs_lower(),
                };
                if better {
                    best = Some((j, e));
                }
            }
            let (col, head) = best.unwrap();
            if !head.contains_zero() {
                let mut c = vec![BallReal::one(prec)];
                let mut ok = true;
                for i in 1..n {
                    let ci = adj(i, col).div(&head)?;
                    ok &= ci.rad().get_exp().map_or(true, |e| e <= -(bits as i32));
                    c.push(ci);
                }
                if ok {
                    return Ok(c);
                }
            }
            w *= 2;
        }
        Err(Error::PrecisionExhausted(Stage::Eigenvector))
    }

    /// `a_0 ..= a_len` with radii at most `2^-bits`.
    pub fn coefficients(&self, len: usize, bits: u32) -> Result<Vec<BallReal>> {
        let basis = self.basis(len)?;
        if self.dim == 1 {
            return Ok(basis.integers(0)[..=len]
                .iter()
                .map(|v| BallReal::from_integer(v, bits_of(v).max(64)))
                .collect());
        }
        let mag = (0..self.dim)
            .flat_map(|i| basis.integers(i)[..=len].iter().map(bits_of))
            .max()
            .unwrap_or(1);
        let extra = mag + 2 + usize::BITS - (self.dim as usize).leading_zeros();
        let c = self.eigenvector(bits + extra)?;
        let prec = c[0].prec().max(c.last().unwrap().prec()) + mag;
        Ok((0..=len)
            .map(|n| {
                let mut acc = BallReal::zero(prec);
                for (i, ci) in c.iter().enumerate() {
                    let b = &basis.integers(i)[n];
                    if !b.is_zero() {
                        acc = acc.add(&ci.with_prec(prec).mul_integer(b));
                    }
                }
                acc
            })
            .collect())
    }

    /// Weights `w` with `f = Σ_j w_j Δ E_4^{a_j} E_6^{b_j}` over the basis'
    /// exponent pairs, radii at most `2^-bits`.
    pub fn generator_weights(&self, bits: u32) -> Result<Vec<BallReal>> {
        let basis = self.basis(0)?;
        let r = &basis.transform;
        let mag = r
            .iter()
            .flatten()
            .map(|q| bits_of(q.numer()) + 1)
            .max()
            .unwrap_or(1);
        let extra = mag + 2 + usize::BITS - self.dim.leading_zeros();
        let c = self.eigenvector(bits + extra)?;
        let prec = c.iter().map(BallReal::prec).max().unwrap() + mag;
        Ok((0..self.dim)
            .map(|j| {
                let mut acc = BallReal::zero(prec);
                for (i, ci) in c.iter().enumerate() {
                    if r[i][j] != 0 {
                        acc = acc.add(&ci.with_prec(prec).mul_rational(&r[i][j]));
                    }
                }
                acc
            })
            .collect())
    }

    /// Exact integer coefficients, available only when the space is
    /// one-dimensional.
    pub fn exact_coefficients(&self, len: usize) -> Result<Option<Vec<Integer>>> {
        if self.dim != 1 {
            return Ok(None);
        }
        let basis = self.basis(len)?;
        Ok(Some(basis.integers(0)[..=len].to_vec()))
    }
}

#[derive(Debug)]
enum FormData {
    Level1(Level1Eigenform),
    Exact { coeffs: Vec<Rational>, sign: Option<i8> },
}

/// Shared, cheaply clonable handle on an eigenform.
#[derive(Clone, Debug)]
pub struct EigenformHandle {
    pub level: u64,
    pub weight: u32,
    pub embedding: usize,
    pub source: CoefficientSource,
    data: Arc<FormData>,
}

impl EigenformHandle {
    /// Eigenform of `S_k(1)` computed from the basis engine.
    pub fn level1(weight: u32, embedding: usize) -> Result<Self> {
        let form = Level1Eigenform::new(weight, embedding)?;
        Ok(EigenformHandle {
            level: 1,
            weight,
            embedding,
            source: CoefficientSource::ComputedLevel1,
            data: Arc::new(FormData::Level1(form)),
        })
    }

    /// Eigenform given by exact coefficients `a_1, a_2, ...`.
    pub fn from_coefficients(
        level: u64,
        weight: u32,
        coeffs: &[Rational],
        atkin_lehner_sign: Option<i8>,
        source: CoefficientSource,
    ) -> Result<Self> {
        if coeffs.first().map_or(true, |a| *a != 1) {
            return Err(Error::InvalidInput("eigenform must have a_1 = 1".into()));
        }
        if level == 0 || weight == 0 {
            return Err(Error::InvalidInput("level and weight must be positive".into()));
        }
        if atkin_lehner_sign.is_some_and(|s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("Atkin-Lehner sign must be +1 or -1".into()));
        }
        let mut all = vec![Rational::new()];
        all.extend_from_slice(coeffs);
        Ok(EigenformHandle {
            level,
            weight,
            embedding: 0,
            source,
            data: Arc::new(FormData::Exact { coeffs: all, sign: atkin_lehner_sign }),
        })
    }

    pub fn as_level1(&self) -> Option<&Level1Eigenform> {
        match &*self.data {
            FormData::Level1(f) => Some(f),
            FormData::Exact { .. } => None,
        }
    }

    /// Largest `n` for which `a_n` is known, `None` when unbounded.
    pub fn available_length(&self) -> Option<usize> {
        match &*self.data {
            FormData::Level1(_) => None,
            FormData::Exact { coeffs, .. } => Some(coeffs.len() - 1),
        }
    }

    /// Atkin–Lehner sign supplied with the coefficients, if any.
    pub fn supplied_sign(&self) -> Option<i8> {
        match &*self.data {
            FormData::Level1(_) => None,
            FormData::Exact { sign, .. } => *sign,
        }
    }

    /// Dimension of the Galois orbit: the degree of the coefficient field
    /// as far as this crate can tell.
    pub fn dimension(&self) -> usize {
        match &*self.data {
            FormData::Level1(f) => f.dimension(),
            FormData::Exact { .. } => 1,
        }
    }

    /// `a_0 ..= a_len` as balls of radius at most `2^-bits`.
    pub fn coefficients(&self, len: usize, bits: u32) -> Result<Vec<BallReal>> {
        match &*self.data {
            FormData::Level1(f) => f.coefficients(len, bits),
            FormData::Exact { coeffs, .. } => {
                if len >= coeffs.len() {
                    return Err(Error::InsufficientCoefficients { needed: len, available: coeffs.len() - 1 });
                }
                Ok(coeffs[..=len]
                    .iter()
                    .map(|q| {
                        if *q.denom() == 1 {
                            BallReal::from_integer(q.numer(), bits_of(q.numer()).max(64))
                        } else {
                            BallReal::from_rational(q, bits + bits_of(q.numer()) + 8)
                        }
                    })
                    .collect())
            }
        }
    }

    /// Exact coefficients `a_0 ..= a_len` when they are rational integers.
    pub fn exact_coefficients(&self, len: usize) -> Result<Option<Vec<Integer>>> {
        match &*self.data {
            FormData::Level1(f) => f.exact_coefficients(len),
            FormData::Exact { coeffs, .. } => {
                if len >= coeffs.len() {
                    return Ok(None);
                }
                Ok(coeffs[..=len]
                    .iter()
                    .map(|q| (*q.denom() == 1).then(|| q.numer().clone()))
                    .collect())
            }
        }
    }
}

/// Balls for `a_1 ..= a_m` with radii at most `2^{-prec/2}`.
pub fn eigenform_coeffs(handle: &EigenformHandle, m: usize, prec: u32) -> Result<Vec<BallReal>> {
    let mut all = handle.coefficients(m, prec.div_ceil(2))?;
    all.remove(0);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::arith::is_prime;
    use rug::ops::Pow;
    use crate::qexp::series::eta_delta_oracle;

    #[test]
    fn weight_12_matches_eta() {
        let f = EigenformHandle::level1(12, 0).unwrap();
        let a = eigenform_coeffs(&f, 3, 64).unwrap();
        let eta = eta_delta_oracle(3);
        for n in 1..=3 {
            assert!(a[n - 1].contains_rational(eta.coeff(n)));
        }
        assert!(a[0].is_exact());
    }

    #[test]
    fn weight_16() {
        let f = EigenformHandle::level1(16, 0).unwrap();
        let a = eigenform_coeffs(&f, 2, 64).unwrap();
        assert!(a[1].contains_integer(&Integer::from(216)));
    }

    #[test]
    fn weight_24_smaller_root() {
        let f = EigenformHandle::level1(24, 0).unwrap();
        let lvl = f.as_level1().unwrap();
        assert_eq!(lvl.hecke_prime(), 2);
        let a = eigenform_coeffs(&f, 2, 128).unwrap();
        assert!(a[0].contains_integer(&Integer::from(1)));
        // roots of x^2 - 1080x - 20468736 are 540 ± 12 sqrt(144169)
        let p = 128;
        let root = BallReal::from_i64(540, p)
            .sub(&BallReal::from_i64(144169, p).sqrt().mul_i64(12));
        assert!(a[1].overlaps(&root));
        assert!(a[1].rad().get_exp().unwrap_or(i32::MIN) <= -64);
        let other = EigenformHandle::level1(24, 1).unwrap();
        let b = eigenform_coeffs(&other, 2, 128).unwrap();
        assert!(b[1].lower() > a[1].upper());
    }

    #[test]
    fn embedding_out_of_range() {
        assert_eq!(
            EigenformHandle::level1(24, 2).unwrap_err(),
            Error::EmbeddingOutOfRange { embedding: 2, count: 2 }
        );
        assert_eq!(EigenformHandle::level1(14, 0).unwrap_err(), Error::EmptySpace { weight: 14 });
    }

    #[test]
    fn eigen_equation_residual() {
        for k in [24u32, 36, 48] {
            let f = EigenformHandle::level1(k, 0).unwrap();
            let lvl = f.as_level1().unwrap();
            let c = lvl.eigenvector(80).unwrap();
            let theta = lvl.eigenvalue(200);
            let a = lvl.hecke_matrix();
            for i in 0..c.len() {
                let prec = 400;
                let mut av = BallReal::zero(prec);
                for (j, cj) in c.iter().enumerate() {
                    av = av.add(&cj.with_prec(prec).mul_integer(&a[i][j]));
                }
                let r = av.sub(&theta.with_prec(prec).mul(&c[i]));
                assert!(r.contains_zero(), "k = {k}, row {i}");
            }
        }
    }

    #[test]
    fn deligne_and_multiplicativity() {
        for (k, e) in [(24u32, 0usize), (24, 1), (32, 1), (48, 2)] {
            let f = EigenformHandle::level1(k, e).unwrap();
            let a = f.coefficients(40, 40).unwrap();
            for p in (2..=40u64).filter(|&p| is_prime(p)) {
                let bound = rug::Float::with_val(128, p).pow(rug::Float::with_val(128, k - 1) / 2u32) * 2u32;
                assert!(a[p as usize].abs_upper() <= bound, "k = {k} p = {p}");
            }
            let prod = a[2].mul(&a[3]);
            assert!(a[6].overlaps(&prod));
            let prod = a[4].mul(&a[5]);
            assert!(a[20].overlaps(&prod));
        }
    }

    #[test]
    fn exact_handles() {
        let coeffs: Vec<Rational> = [1, -24, 252].iter().map(|&x| Rational::from(x)).collect();
        let f = EigenformHandle::from_coefficients(1, 12, &coeffs, None, CoefficientSource::File).unwrap();
        assert_eq!(f.available_length(), Some(3));
        assert!(f.coefficients(3, 64).is_ok());
        assert_eq!(
            f.coefficients(4, 64).unwrap_err(),
            Error::InsufficientCoefficients { needed: 4, available: 3 }
        );
        let bad: Vec<Rational> = vec![Rational::from(2)];
        assert!(EigenformHandle::from_coefficients(1, 12, &bad, None, CoefficientSource::File).is_err());
    }
}
