//! Divisor sums and the small amount of integer factoring the checks need.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QmxError, Result};

/// `sigma_k(n)`, the sum of the k-th powers of the positive divisors of `n`.
pub fn sigma_k(k: u32, n: i64) -> Result<BigInt> {
    if n <= 0 {
        return Err(QmxError::OutOfRange(format!("sigma_{k}({n}): n must be positive")));
    }
    let n = n as u64;
    let mut total = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                total += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    Ok(total)
}

/// `[sigma_k(0)=0, sigma_k(1), ..., sigma_k(n_max)]` by a divisor sieve.
pub fn sigma_table(k: u32, n_max: usize) -> Vec<BigInt> {
    let mut table = vec![BigInt::zero(); n_max + 1];
    for d in 1..=n_max {
        let p = BigInt::from(d).pow(k);
        let mut m = d;
        while m <= n_max {
            table[m] += &p;
            m += d;
        }
    }
    table
}

pub fn primes_below(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(p, &is_p)| is_p.then_some(p as u64))
        .collect()
}

/// Removes every prime factor `< bound` from `n` and returns the cofactor.
pub fn strip_primes_below(n: &BigInt, bound: u64) -> BigInt {
    let mut m = n.abs();
    for p in primes_below(bound) {
        let p = BigInt::from(p);
        while !m.is_zero() && (&m % &p).is_zero() {
            m /= &p;
        }
    }
    m
}

/// Prime factors of a (possibly huge) integer.
///
/// Trial division first, then Miller-Rabin and Pollard-Brent on the remainder.
/// Pieces that resist factoring within the iteration budget are returned in
/// `unfactored`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub primes: BTreeSet<BigInt>,
    pub unfactored: Vec<BigInt>,
}

impl Factorization {
    pub fn max_prime(&self) -> Option<&BigInt> {
        self.primes.iter().next_back()
    }
}

const TRIAL_BOUND: u64 = 20_000;

pub fn factor(n: &BigInt) -> Factorization {
    let mut out = Factorization::default();
    let mut m = n.abs();
    if m.is_zero() {
        return out;
    }
    for p in primes_below(TRIAL_BOUND) {
        let bp = BigInt::from(p);
        if (&m % &bp).is_zero() {
            out.primes.insert(bp.clone());
            while (&m % &bp).is_zero() {
                m /= &bp;
            }
        }
        if m.is_one() {
            return out;
        }
    }
    let mut stack = vec![m];
    while let Some(x) = stack.pop() {
        if x.is_one() {
            continue;
        }
        if is_probable_prime(&x) {
            out.primes.insert(x);
            continue;
        }
        match pollard_brent(&x, 200_000) {
            Some(d) => {
                let e = &x / &d;
                stack.push(d);
                stack.push(e);
            }
            None => out.unfactored.push(x),
        }
    }
    out
}

pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let bp = BigInt::from(p);
        if *n == bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigInt, budget: u64) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    for c in 1u32..20 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r = 1u64;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut steps = 0u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..(128.min(r - k)) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
            steps += r;
            if steps > budget {
                break;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
        if steps > budget {
            return None;
        }
    }
    None
}

pub fn to_u64(n: &BigInt) -> Option<u64> {
    n.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_k(1, 1).unwrap(), BigInt::from(1));
        assert_eq!(sigma_k(3, 2).unwrap(), BigInt::from(9));
        assert_eq!(sigma_k(5, 3).unwrap(), BigInt::from(244));
        assert_eq!(sigma_k(11, 2).unwrap(), BigInt::from(2049));
        assert!(sigma_k(1, 0).is_err());
        assert!(sigma_k(1, -4).is_err());
    }

    #[test]
    fn sieve_matches_direct() {
        let t = sigma_table(3, 60);
        for n in 1..=60 {
            assert_eq!(t[n], sigma_k(3, n as i64).unwrap());
        }
    }

    #[test]
    fn factoring() {
        let f = factor(&BigInt::from(393120));
        let want: BTreeSet<BigInt> = [2, 3, 5, 7, 13].into_iter().map(BigInt::from).collect();
        assert_eq!(f.primes, want);
        // product of two primes beyond the trial bound
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(998_244_353u64);
        let f = factor(&(&p * &q * 12));
        assert!(f.primes.contains(&p) && f.primes.contains(&q));
        assert!(f.unfactored.is_empty());
        assert_eq!(strip_primes_below(&BigInt::from(720), 6), BigInt::from(1));
        assert_eq!(strip_primes_below(&BigInt::from(7 * 720), 6), BigInt::from(7));
    }
}
