//! Elements of Z_p known modulo p^K.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{ordp_int, Rat};
use crate::error::{Error, Result};

/// A p-adic integer represented by its residue in [0, p^K). Equality is
/// congruence modulo the smaller of the two precisions.
#[derive(Debug, Clone)]
pub struct PadicInt {
    p: u64,
    prec: u32,
    value: BigInt,
}

pub fn p_pow(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

impl PadicInt {
    pub fn new(p: u64, prec: u32, value: &BigInt) -> Self {
        PadicInt {
            p,
            prec,
            value: value.mod_floor(&p_pow(p, prec)),
        }
    }

    pub fn from_i64(p: u64, prec: u32, value: i64) -> Self {
        Self::new(p, prec, &BigInt::from(value))
    }

    /// Image of a p-integral rational.
    pub fn from_rat(p: u64, prec: u32, x: &Rat) -> Result<Self> {
        if x.denom().is_one() {
            return Ok(Self::new(p, prec, x.numer()));
        }
        let modulus = p_pow(p, prec);
        let den = x.denom().mod_floor(&modulus);
        let inv = mod_inverse(&den, &modulus)
            .ok_or_else(|| Error::InvalidArgument(format!("{x} is not {p}-integral")))?;
        Ok(Self::new(p, prec, &(x.numer() * inv)))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Representative in [0, p^K).
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    /// Representative in (−p^K/2, p^K/2].
    pub fn centered(&self) -> BigInt {
        let m = p_pow(self.p, self.prec);
        if &self.value * 2 > m {
            &self.value - m
        } else {
            self.value.clone()
        }
    }

    /// Valuation if known, `None` when the element is 0 mod p^K.
    pub fn ord(&self) -> Option<u32> {
        ordp_int(&self.value, self.p).map(|v| v as u32)
    }

    pub fn is_unit(&self) -> bool {
        self.ord() == Some(0)
    }

    pub fn reduce(&self, prec: u32) -> Self {
        Self::new(self.p, prec.min(self.prec), &self.value)
    }

    /// Residue modulo p.
    pub fn residue(&self) -> u64 {
        use num_traits::ToPrimitive;
        (&self.value % self.p).to_u64().expect("small")
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixing p-adic integers of different primes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, self.prec.min(other.prec), &(&self.value + &other.value))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, self.prec.min(other.prec), &(&self.value - &other.value))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, self.prec.min(other.prec), &(&self.value * &other.value))
    }

    pub fn pow(&self, e: u32) -> Self {
        PadicInt {
            p: self.p,
            prec: self.prec,
            value: self.value.modpow(&BigInt::from(e), &p_pow(self.p, self.prec)),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = p_pow(self.p, self.prec);
        let inv = mod_inverse(&self.value, &m).ok_or(Error::NotInvertible)?;
        Ok(Self::new(self.p, self.prec, &inv))
    }

    /// Congruence modulo p^k, which must not exceed either precision.
    pub fn congruent(&self, other: &Self, k: u32) -> bool {
        self.check(other);
        assert!(k <= self.prec.min(other.prec), "comparison beyond known precision");
        let m = p_pow(self.p, k);
        self.value.mod_floor(&m) == other.value.mod_floor(&m)
    }

    /// ord_p(self − other), capped at the common precision.
    pub fn distance(&self, other: &Self) -> u32 {
        let d = self.sub(other);
        d.ord().unwrap_or(d.prec)
    }
}

impl PartialEq for PadicInt {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.congruent(other, self.prec.min(other.prec))
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.centered(), self.p, self.prec)
    }
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Exact division of an integer by p^k, failing when p^k does not divide it.
pub fn div_p_pow(n: &BigInt, p: u64, k: u32) -> Option<BigInt> {
    let d = p_pow(p, k);
    let (q, r) = n.div_rem(&d);
    if r.is_zero() {
        Some(q)
    } else {
        None
    }
}
