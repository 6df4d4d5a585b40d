//! Exact arithmetic in (ℤ/qℤ)* for prime q: primality testing, orders,
//! primitive roots, inverses, and a one-time discrete-log table.
//!
//! [`PrimeModulus`] fixes a prime q together with its smallest primitive
//! root g and the full index table k = dlog(r) with g^k ≡ r (mod q).
//! Everything downstream (characters, Kloosterman sums, central-value
//! scans) shares one immutable `PrimeModulus` per modulus.

use std::sync::Arc;

use crate::{Error, Result};

/// Deterministic primality check by trial division; adequate for the
/// desk-scale moduli this crate targets (q < 2^31).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// (a * b) mod m without overflow for any u64 inputs.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a^e mod m by binary exponentiation.
pub fn mod_pow(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Modular inverse by the extended Euclidean algorithm; `None` when
/// gcd(a, m) ≠ 1.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    let m = m as i128;
    Some((((old_s % m) + m) % m) as u64)
}

/// Prime factorization by trial division, as (prime, exponent) pairs in
/// ascending prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0u32;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn distinct_prime_factors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factorize(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// Möbius function: 0 on non-squarefree n, otherwise (−1)^(number of
/// prime factors).
pub fn moebius(n: u64) -> i64 {
    let factors = factorize(n);
    if factors.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All positive divisors of n, sorted ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Smallest primitive root of the prime q ≥ 3.
pub fn primitive_root(q: u64) -> Result<u64> {
    if q < 3 {
        return Err(Error::ModulusTooSmall(q));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let factors = distinct_prime_factors(q - 1);
    'outer: for g in 2..q {
        for &p in &factors {
            if mod_pow(g, (q - 1) / p, q) == 1 {
                continue 'outer;
            }
        }
        return Ok(g);
    }
    unreachable!("every prime has a primitive root")
}

/// A prime q with its smallest primitive root and the full discrete-log
/// table for (ℤ/qℤ)*. Immutable after construction.
pub struct PrimeModulus {
    q: u64,
    g: u64,
    dlog: Vec<u32>,
    qm1_factorization: Vec<(u64, u32)>,
}

impl PrimeModulus {
    /// Builds the modulus: checks primality, finds the smallest primitive
    /// root, and fills the index table in one O(q) pass.
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 {
            return Err(Error::ModulusTooSmall(q));
        }
        if q >= (1 << 31) {
            return Err(Error::InvalidParameters(format!(
                "modulus {q} is not below 2^31"
            )));
        }
        let g = primitive_root(q)?;
        let mut dlog = vec![u32::MAX; q as usize];
        let mut val = 1u64;
        for k in 0..(q - 1) {
            debug_assert_eq!(dlog[val as usize], u32::MAX);
            dlog[val as usize] = k as u32;
            val = val * g % q;
        }
        debug_assert_eq!(val, 1, "powers of g must cycle back to 1");
        Ok(Self {
            q,
            g,
            dlog,
            qm1_factorization: factorize(q - 1),
        })
    }

    /// `new` wrapped in an `Arc`, for the shared read-only use the rest of
    /// the crate expects.
    pub fn shared(q: u64) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(q)?))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The smallest primitive root mod q.
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the unit group, q − 1.
    pub fn group_order(&self) -> u64 {
        self.q - 1
    }

    /// Reduce a signed integer into the canonical residue range [0, q).
    pub fn reduce(&self, n: i64) -> u64 {
        let q = self.q as i64;
        (((n % q) + q) % q) as u64
    }

    /// Multiplicative order of n mod q: the least t ≥ 1 with n^t ≡ 1.
    pub fn mul_order(&self, n: u64) -> Result<u64> {
        let r = n % self.q;
        if r == 0 {
            return Err(Error::ZeroResidue { q: self.q });
        }
        let mut t = self.q - 1;
        for &(p, _) in &self.qm1_factorization {
            while t % p == 0 && mod_pow(r, t / p, self.q) == 1 {
                t /= p;
            }
        }
        Ok(t)
    }

    /// The index k in [0, q−2] with g^k ≡ r (mod q), by table lookup.
    pub fn discrete_log(&self, r: u64) -> Result<u64> {
        let r = r % self.q;
        if r == 0 {
            return Err(Error::ZeroResidue { q: self.q });
        }
        Ok(self.dlog[r as usize] as u64)
    }

    pub fn inv(&self, n: u64) -> Result<u64> {
        mod_inv(n % self.q, self.q).ok_or(Error::ZeroResidue { q: self.q })
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        mod_pow(base % self.q, exp, self.q)
    }

    /// Sorted divisors of the group order q − 1.
    pub fn group_order_divisors(&self) -> Vec<u64> {
        divisors(self.q - 1)
    }
}

impl std::fmt::Debug for PrimeModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeModulus")
            .field("q", &self.q)
            .field("g", &self.g)
            .finish()
    }
}
