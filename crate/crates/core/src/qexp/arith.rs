use rug::integer::IsPrime;
use rug::ops::Pow;
use rug::{Integer, Rational};

/// Bernoulli number `B_n` with the convention `B_1 = -1/2`.
///
/// Uses the Akiyama–Tanigawa transform, which produces `B_1 = +1/2`; the
/// sign of that single term is flipped afterwards.
pub fn bernoulli(n: u32) -> Rational {
    if n == 1 {
        return Rational::from((-1, 2));
    }
    if n > 1 && n % 2 == 1 {
        return Rational::new();
    }
    let n = n as usize;
    let mut row: Vec<Rational> = (0..=n).map(|m| Rational::from((1, m as u32 + 1))).collect();
    for m in 0..=n {
        row[m] = Rational::from((1, m as u32 + 1));
        for j in (1..=m).rev() {
            let diff = Rational::from(&row[j - 1] - &row[j]);
            row[j - 1] = diff * j as u32;
        }
    }
    row.swap_remove(0)
}

/// Divisor power sum `σ_r(n) = Σ_{d | n} d^r`.
pub fn sigma(n: u64, r: u32) -> Integer {
    assert!(n >= 1, "sigma is defined for n >= 1");
    let mut total = Integer::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += Integer::from(d).pow(r);
            let e = n / d;
            if e != d {
                total += Integer::from(e).pow(r);
            }
        }
        d += 1;
    }
    total
}

/// `σ_r(n)` for every `n` in `1..=m`, by a divisor sieve. Index 0 is zero.
pub fn sigma_table(m: usize, r: u32) -> Vec<Integer> {
    let mut table = vec![Integer::new(); m + 1];
    for d in 1..=m {
        let pw = Integer::from(d as u64).pow(r);
        let mut k = d;
        while k <= m {
            table[k] += &pw;
            k += d;
        }
    }
    table
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 1 << 20 {
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        return true;
    }
    // BPSW has no known counterexample below 2^64
    Integer::from(n).is_probably_prime(32) != IsPrime::No
}

/// Primes in increasing order starting from 2.
pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| is_prime(n))
}

pub fn next_prime(n: u64) -> u64 {
    (n + 1..).find(|&m| is_prime(m)).expect("primes are unbounded")
}

/// All `(a, b)` with `a, b >= 0` and `4a + 6b = target`, ordered by `b`.
pub fn exponent_pairs(target: i64) -> Vec<(u32, u32)> {
    if target < 0 {
        return Vec::new();
    }
    (0..=target / 6)
        .filter(|b| (target - 6 * b) % 4 == 0)
        .map(|b| (((target - 6 * b) / 4) as u32, b as u32))
        .collect()
}

/// Dimension of `S_k(1)`.
pub fn cusp_dimension(k: u32) -> usize {
    if k < 12 || k % 2 == 1 {
        return 0;
    }
    exponent_pairs(k as i64 - 12).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: `Σ_{j=0}^{n} C(n+1, j) B_j = 0` solved for `B_n`.
    fn bernoulli_by_recurrence(n: usize) -> Vec<Rational> {
        let mut b: Vec<Rational> = vec![Rational::from(1)];
        for m in 1..=n {
            let mut s = Rational::new();
            for (j, bj) in b.iter().enumerate() {
                s += Rational::from(Integer::from(Integer::binomial_u(m as u32 + 1, j as u32)) * bj);
            }
            b.push(-s / (m as u32 + 1));
        }
        b
    }

    #[test]
    fn bernoulli_matches_recurrence() {
        let oracle = bernoulli_by_recurrence(40);
        for (n, expected) in oracle.iter().enumerate() {
            assert_eq!(&bernoulli(n as u32), expected, "B_{n}");
        }
        assert_eq!(bernoulli(0), 1);
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(1, 3), 1);
        assert_eq!(sigma(2, 3), 9);
        assert_eq!(sigma(6, 1), 12);
        let table = sigma_table(60, 3);
        for n in 1..=60u64 {
            let brute: Integer = (1..=n).filter(|d| n % d == 0).map(|d| Integer::from(d).pow(3)).sum();
            assert_eq!(table[n as usize], brute);
            assert_eq!(sigma(n, 3), brute);
        }
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = primes().take(10).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(10007));
        assert!(!is_prime(4));
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001));
        assert_eq!(next_prime(10000), 10007);
    }

    #[test]
    fn dimensions() {
        assert_eq!(cusp_dimension(12), 1);
        assert_eq!(cusp_dimension(14), 0);
        assert_eq!(cusp_dimension(24), 2);
        assert_eq!(cusp_dimension(200), 16);
        assert_eq!(exponent_pairs(12), vec![(3, 0), (0, 2)]);
        assert_eq!(exponent_pairs(4), vec![(1, 0)]);
    }
}
