//! Small exact matrix routines.

use rug::{Integer, Rational};

use super::poly::IntPoly;

pub type IntMatrix = Vec<Vec<Integer>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| Integer::from((i == j) as u32)).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![Integer::new(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += Integer::from(&a[i][k] * &bk[j]);
            }
        }
    }
    out
}

pub fn trace(a: &IntMatrix) -> Integer {
    a.iter().enumerate().map(|(i, row)| row[i].clone()).sum()
}

/// Characteristic polynomial `det(xI - A)` together with the matrices `M_1..M_n`
/// of the Faddeev–LeVerrier recursion, which satisfy
/// `adj(xI - A) = Σ_{k=1}^{n} x^{n-k} M_k`.
pub fn charpoly_adjugate(a: &IntMatrix) -> (IntPoly, Vec<IntMatrix>) {
    let n = a.len();
    let mut coeffs = vec![Integer::new(); n + 1];
    coeffs[n] = Integer::from(1);
    let mut ms = Vec::with_capacity(n);
    let mut m = identity(n);
    for k in 1..=n {
        let am = mat_mul(a, &m);
        let c = -trace(&am).div_exact(&Integer::from(k));
        coeffs[n - k] = c.clone();
        ms.push(m);
        m = am;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    debug_assert!(m.iter().flatten().all(|x| x.is_zero()), "Cayley-Hamilton");
    (IntPoly::new(coeffs), ms)
}

/// Inverse of a square rational matrix, or `None` if it is singular.
pub fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut work: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Rational::from((i == j) as u32)));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| work[r][col] != 0)?;
        work.swap(col, pivot);
        let inv = Rational::from(work[col][col].recip_ref());
        for x in work[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r == col || work[r][col] == 0 {
                continue;
            }
            let f = work[r][col].clone();
            let (src, dst) = if r < col {
                let (lo, hi) = work.split_at_mut(col);
                (&hi[0], &mut lo[r])
            } else {
                let (lo, hi) = work.split_at_mut(r);
                (&lo[col], &mut hi[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d -= Rational::from(&f * s);
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}
