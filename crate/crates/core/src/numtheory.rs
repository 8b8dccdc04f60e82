//! Small-integer number theory used throughout: primality, factoring,
//! valuations, modular inverses.

use num_bigint::BigUint;
use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Exponent of the prime `l` in `n` (`n > 0`).
pub fn valuation(mut n: u64, l: u64) -> u32 {
    assert!(n > 0, "valuation of zero");
    let mut v = 0;
    while n.is_multiple_of(l) {
        n /= l;
        v += 1;
    }
    v
}

pub fn valuation_big(n: &BigUint, l: u64) -> u32 {
    let l = BigUint::from(l);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&l);
        if r != BigUint::from(0u32) || q == BigUint::from(0u32) {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// The largest power of `l` dividing `n`.
pub fn l_part(n: u64, l: u64) -> u64 {
    l.pow(valuation(n, l))
}

/// `n` with every factor of `l` removed.
pub fn l_prime_part(n: u64, l: u64) -> u64 {
    n / l_part(n, l)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(1, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let g = a.rem_euclid(m).extended_gcd(&m);
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_and_valuations() {
        assert_eq!(factorize(480), vec![(2, 5), (3, 1), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(valuation(48, 2), 4);
        assert_eq!(l_part(180, 3), 9);
        assert_eq!(l_prime_part(180, 3), 20);
        assert_eq!(valuation_big(&BigUint::from(324u32), 3), 4);
    }

    #[test]
    fn small_helpers() {
        assert!(is_prime(2) && is_prime(7) && !is_prime(1) && !is_prime(9));
        assert_eq!(euler_phi(8), 4);
        assert_eq!(euler_phi(6), 2);
        assert_eq!(mod_inverse(2, 9), Some(5));
        assert_eq!(mod_inverse(3, 9), None);
        assert_eq!(binomial(7, 4), 35);
        assert_eq!(factorial(5), 120);
    }
}
