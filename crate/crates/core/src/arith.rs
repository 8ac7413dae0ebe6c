//! Arithmetic in the prime field F_p and binomial coefficients modulo p.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimeError {
    #[error("{0} is even; only odd primes are supported")]
    Even(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is too large")]
    TooLarge(u64),
}

/// An odd prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    /// Largest accepted modulus; products of two residues must fit in a `u64`.
    pub const MAX: u32 = 1 << 20;

    pub fn new(p: u64) -> Result<Self, PrimeError> {
        if p > Self::MAX as u64 {
            return Err(PrimeError::TooLarge(p));
        }
        if p.is_multiple_of(2) {
            return Err(PrimeError::Even(p));
        }
        if p < 3 || (3..).step_by(2).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(PrimeError::NotPrime(p));
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_u64(self) -> u64 {
        self.0 as u64
    }

    /// `p^e`, or `None` on overflow.
    pub fn checked_pow(self, e: u32) -> Option<u64> {
        (self.0 as u64).checked_pow(e)
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.0 as u64 - b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn pow(self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        base %= self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "inverse of zero mod {}", self.0);
        self.pow(a, self.0 as u64 - 2)
    }

    /// Base-p digits of `n`, least significant first.
    pub fn digits(self, mut n: u64) -> Vec<u64> {
        let p = self.0 as u64;
        let mut out = Vec::new();
        while n > 0 {
            out.push(n % p);
            n /= p;
        }
        out
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u32> for Prime {
    type Error = PrimeError;
    fn try_from(value: u32) -> Result<Self, Self::Error> {
        Prime::new(value as u64)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

// C(n, k) mod p for 0 <= k <= n < p.
fn small_binom(n: u64, k: u64, p: Prime) -> u32 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let (mut num, mut den) = (1u32, 1u32);
    for i in 0..k {
        num = p.mul(num, ((n - i) % p.as_u64()) as u32);
        den = p.mul(den, ((i + 1) % p.as_u64()) as u32);
    }
    p.mul(num, p.inv(den))
}

/// `C(n, k) mod p` by Lucas' theorem; zero when `k > n`.
pub fn binom_mod_p(n: u64, k: u64, p: Prime) -> u32 {
    if k > n {
        return 0;
    }
    let pp = p.as_u64();
    let (mut n, mut k) = (n, k);
    let mut acc = 1u32;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % pp, k % pp);
        if kd > nd {
            return 0;
        }
        acc = p.mul(acc, small_binom(nd, kd, p));
        n /= pp;
        k /= pp;
    }
    acc
}

/// Multinomial coefficient `(Σ parts)! / Π parts!` mod p.
///
/// Nonzero exactly when the parts add without carries in base p.
pub fn multinomial_mod_p(parts: &[u64], p: Prime) -> u32 {
    let mut acc = 1u32;
    let mut running = 0u64;
    for &part in parts {
        running += part;
        acc = p.mul(acc, binom_mod_p(running, part, p));
        if acc == 0 {
            return 0;
        }
    }
    acc
}
