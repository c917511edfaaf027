//! Prime sieves, deterministic primality, primitive roots, and discrete-log
//! tables mod an odd prime.

use crate::error::{CoreError, Result};

/// Default ceiling on sieve allocations (one u32 per integer below the limit).
pub const DEFAULT_SIEVE_CAP: u64 = 100_000_000;

/// Linear sieve up to `limit`, keeping the primes and a smallest-prime-factor
/// table (the latter makes factoring and the von Mangoldt function O(log n)).
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    primes: Vec<u64>,
    smallest_factor: Vec<u32>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit < 2 {
            return Err(CoreError::invalid(format!(
                "sieve limit must be >= 2, got {limit}"
            )));
        }
        if limit > cap {
            return Err(CoreError::SieveLimit { limit, cap });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u64> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            // Each composite i*p is struck exactly once, by its smallest
            // prime factor p <= spf[i].
            for pi in 0..primes.len() {
                let p = primes[pi] as usize;
                if p > spf[i] as usize || p > n / i {
                    break;
                }
                spf[i * p] = p as u32;
            }
        }
        Ok(PrimeSieve {
            limit,
            primes,
            smallest_factor: spf,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes p <= x as a prefix slice.
    pub fn primes_upto(&self, x: f64) -> &[u64] {
        if x < 2.0 {
            return &self.primes[..0];
        }
        let bound = if x >= self.limit as f64 {
            self.limit
        } else {
            x.floor() as u64
        };
        let k = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..k]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.smallest_factor[n as usize] as u64 == n
    }

    /// Smallest prime factor of n (n >= 2, n <= limit).
    pub fn smallest_factor(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit {
            return Err(CoreError::invalid(format!(
                "smallest_factor defined for 2 <= n <= {}, got {n}",
                self.limit
            )));
        }
        Ok(self.smallest_factor[n as usize] as u64)
    }

    /// Von Mangoldt: log p when n = p^k, else 0. n = 0, 1 give 0.
    pub fn mangoldt(&self, n: u64) -> Result<f64> {
        if n < 2 {
            return Ok(0.0);
        }
        if n > self.limit {
            return Err(CoreError::invalid(format!(
                "mangoldt beyond sieve limit {}: {n}",
                self.limit
            )));
        }
        let p = self.smallest_factor[n as usize] as u64;
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            Ok((p as f64).ln())
        } else {
            Ok(0.0)
        }
    }

    /// Prime factorization as (p, multiplicity) pairs, p ascending.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 || n > self.limit {
            return Err(CoreError::invalid(format!(
                "factorize defined for 1 <= n <= {}, got {n}",
                self.limit
            )));
        }
        let mut out = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.smallest_factor[m] as usize;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    debug_assert!(m >= 2);
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin. The fixed witness set below decides primality
/// correctly for every n < 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime >= n.
pub fn next_prime_at_least(n: u64) -> u64 {
    if n <= 2 {
        return 2;
    }
    let mut c = n | 1; // first odd >= n
    while !is_prime_u64(c) {
        c += 2;
    }
    c
}

fn distinct_prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Smallest primitive root mod the odd prime q, verified by checking
/// g^((q-1)/p) != 1 for every prime p | q-1.
pub fn primitive_root(q: u64) -> Result<u64> {
    if q == 2 || !is_prime_u64(q) {
        return Err(CoreError::invalid(format!(
            "primitive_root needs an odd prime, got {q}"
        )));
    }
    let m = q - 1;
    let factors = distinct_prime_factors(m);
    for g in 2..q {
        if factors.iter().all(|&p| pow_mod(g, m / p, q) != 1) {
            return Ok(g);
        }
    }
    unreachable!("odd prime {q} has a primitive root below q");
}

/// Discrete logarithm base g mod the odd prime q, as a pair of O(q) tables:
/// `ind` sends n in [1, q-1] to k in [0, q-2] with g^k = n, and `pow` is its
/// inverse. Built in one O(q) pass over the powers of g.
#[derive(Debug, Clone)]
pub struct DiscreteLogTable {
    q: u64,
    g: u64,
    ind: Vec<u32>,
    pow: Vec<u32>,
}

impl DiscreteLogTable {
    pub fn new(q: u64) -> Result<Self> {
        if q == 2 || !is_prime_u64(q) {
            return Err(CoreError::invalid(format!(
                "discrete log table needs an odd prime modulus, got {q}"
            )));
        }
        if q > u32::MAX as u64 {
            return Err(CoreError::invalid(format!(
                "discrete log table capped at 32-bit moduli, got {q}"
            )));
        }
        let g = primitive_root(q)?;
        let m = (q - 1) as usize;
        let mut ind = vec![u32::MAX; q as usize];
        let mut pow = vec![0u32; m];
        let mut x = 1u64;
        for (k, slot) in pow.iter_mut().enumerate() {
            *slot = x as u32;
            ind[x as usize] = k as u32;
            x = x * g % q;
        }
        debug_assert_eq!(x, 1, "g^(q-1) must return to 1");
        Ok(DiscreteLogTable { q, g, ind, pow })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    /// Group order m = q - 1.
    pub fn m(&self) -> usize {
        self.pow.len()
    }

    /// ind(n) for n not divisible by q; None when q | n.
    pub fn ind(&self, n: u64) -> Option<u32> {
        let r = (n % self.q) as usize;
        if r == 0 {
            None
        } else {
            Some(self.ind[r])
        }
    }

    /// ind of an already-reduced residue r in [1, q-1].
    #[inline]
    pub fn ind_residue(&self, r: usize) -> u32 {
        debug_assert!(r >= 1 && r < self.q as usize);
        self.ind[r]
    }

    /// g^k mod q for k in [0, q-2].
    #[inline]
    pub fn pow_g(&self, k: usize) -> u64 {
        self.pow[k] as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_rejects_degenerate_limits() {
        assert!(PrimeSieve::new(0).is_err());
        assert!(PrimeSieve::new(1).is_err());
        assert!(matches!(
            PrimeSieve::with_cap(100, 50),
            Err(CoreError::SieveLimit { limit: 100, cap: 50 })
        ));
    }

    #[test]
    fn sieve_small_primes() {
        let s = PrimeSieve::new(100).unwrap();
        let expect: Vec<u64> = vec![
            2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
            83, 89, 97,
        ];
        assert_eq!(s.primes(), expect.as_slice());
    }

    #[test]
    fn sieve_prime_count_at_one_million() {
        let s = PrimeSieve::new(1_000_000).unwrap();
        assert_eq!(s.primes().len(), 78_498);
    }

    #[test]
    fn smallest_factor_is_a_prime_divisor() {
        let s = PrimeSieve::new(10_000).unwrap();
        for n in 2..=10_000u64 {
            let p = s.smallest_factor(n).unwrap();
            assert!(s.is_prime(p));
            assert_eq!(n % p, 0);
            // nothing smaller divides n
            for d in 2..p.min(60) {
                assert_ne!(n % d, 0, "n={n} p={p} d={d}");
            }
        }
    }

    #[test]
    fn primes_upto_is_a_prefix() {
        let s = PrimeSieve::new(1000).unwrap();
        assert_eq!(s.primes_upto(1.9), &[] as &[u64]);
        assert_eq!(s.primes_upto(2.0), &[2]);
        assert_eq!(s.primes_upto(10.0), &[2, 3, 5, 7]);
        assert_eq!(s.primes_upto(11.0), &[2, 3, 5, 7, 11]);
        assert_eq!(s.primes_upto(1e18), s.primes());
    }

    #[test]
    fn mangoldt_values() {
        let s = PrimeSieve::new(10_000).unwrap();
        assert_eq!(s.mangoldt(1).unwrap(), 0.0);
        assert_eq!(s.mangoldt(8).unwrap(), 2f64.ln());
        assert_eq!(s.mangoldt(12).unwrap(), 0.0);
        assert_eq!(s.mangoldt(97).unwrap(), 97f64.ln());
        assert_eq!(s.mangoldt(9409).unwrap(), 97f64.ln()); // 97^2
        // Chebyshev psi(x) stays within a few percent of x at x = 10^4.
        let psi: f64 = (1..=10_000).map(|n| s.mangoldt(n).unwrap()).sum();
        assert!((psi / 1e4 - 1.0).abs() < 0.02, "psi(1e4) = {psi}");
    }

    #[test]
    fn factorize_roundtrip() {
        let s = PrimeSieve::new(100_000).unwrap();
        for n in [1u64, 2, 360, 1024, 99_991, 65_536, 99_999] {
            let f = s.factorize(n).unwrap();
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            for w in f.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let s = PrimeSieve::new(20_000).unwrap();
        for n in 0..=20_000u64 {
            assert_eq!(is_prime_u64(n), s.is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn miller_rabin_large_cases() {
        assert!(is_prime_u64(2_147_483_647)); // 2^31 - 1
        assert!(is_prime_u64(998_244_353));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime_u64(18_446_744_073_709_551_615));
    }

    #[test]
    fn next_prime_walks_up() {
        assert_eq!(next_prime_at_least(0), 2);
        assert_eq!(next_prime_at_least(2), 2);
        assert_eq!(next_prime_at_least(3), 3);
        assert_eq!(next_prime_at_least(4), 5);
        assert_eq!(next_prime_at_least(90), 97);
        assert_eq!(next_prime_at_least(1000), 1009);
    }

    #[test]
    fn primitive_root_is_smallest_generator() {
        // brute force the smallest generator for every odd prime below 300
        let s = PrimeSieve::new(300).unwrap();
        for &q in s.primes().iter().skip(1) {
            let g = primitive_root(q).unwrap();
            let order = |a: u64| {
                let mut x = a;
                let mut k = 1u64;
                while x != 1 {
                    x = x * a % q;
                    k += 1;
                }
                k
            };
            assert_eq!(order(g), q - 1, "q = {q}");
            for h in 2..g {
                assert_ne!(order(h), q - 1, "q = {q}: {h} generates but {g} was returned");
            }
        }
    }

    #[test]
    fn primitive_root_rejects_bad_moduli() {
        assert!(primitive_root(2).is_err());
        assert!(primitive_root(9).is_err());
        assert!(primitive_root(1).is_err());
    }

    #[test]
    fn discrete_log_q7() {
        let t = DiscreteLogTable::new(7).unwrap();
        assert_eq!(t.g(), 3);
        assert_eq!(t.m(), 6);
        // powers of 3 mod 7: 1, 3, 2, 6, 4, 5
        let expect = [(1u64, 0u32), (3, 1), (2, 2), (6, 3), (4, 4), (5, 5)];
        for (n, k) in expect {
            assert_eq!(t.ind(n), Some(k));
            assert_eq!(t.pow_g(k as usize), n);
        }
        assert_eq!(t.ind(7), None);
        assert_eq!(t.ind(14), None);
        assert_eq!(t.ind(8), Some(0)); // 8 = 1 mod 7
    }

    #[test]
    fn discrete_log_is_a_homomorphism() {
        for q in [5u64, 7, 11, 61, 1009] {
            let t = DiscreteLogTable::new(q).unwrap();
            let m = t.m() as u64;
            assert_eq!(t.ind(1), Some(0));
            assert_eq!(t.ind(t.g()), Some(1));
            // all pairs for tiny q, a fixed stride sample for q = 1009
            let step = if q <= 61 { 1 } else { 13 };
            let mut a = 1;
            while a < q {
                let mut b = 1;
                while b < q {
                    let lhs = t.ind(a * b % q).unwrap() as u64;
                    let rhs = (t.ind(a).unwrap() as u64 + t.ind(b).unwrap() as u64) % m;
                    assert_eq!(lhs, rhs, "q={q} a={a} b={b}");
                    b += step;
                }
                a += step;
            }
        }
    }

    #[test]
    fn discrete_log_rejects_q2_and_composites() {
        assert!(DiscreteLogTable::new(2).is_err());
        assert!(DiscreteLogTable::new(15).is_err());
        assert!(DiscreteLogTable::new(3).is_ok());
    }
}
