//! Exact rational arithmetic, p-adic valuations on Q, the Kronecker symbol and
//! the multiplicative functions used throughout (σ1, d, Dirichlet convolution).

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

/// `num/den` with an explicit denominator, even when it is 1.
pub fn fmt_frac(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Serde helper writing a rational as its display string.
pub fn ser_rat<S: Serializer>(x: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Parses `a`, `a/b` or `-a/b`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A valuation value in Q ∪ {+∞}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Finite(Rat),
    Infinite,
}

impl Val {
    pub fn zero() -> Self {
        Val::Finite(Rat::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Val::Finite(int(n))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Val::Finite(x) => Some(x),
            Val::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Val::Infinite)
    }

    /// Multiply by a positive rational; ∞ stays ∞.
    pub fn scale(&self, c: &Rat) -> Val {
        match self {
            Val::Finite(x) => Val::Finite(x * c),
            Val::Infinite => Val::Infinite,
        }
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinite,
        }
    }
}

impl<'a> Add<&'a Val> for &'a Val {
    type Output = Val;
    fn add(self, rhs: &Val) -> Val {
        self.clone() + rhs.clone()
    }
}

/// Serialized as its display string, `inf` for ∞.
impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(x) => write!(f, "{x}"),
            Val::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer; `None` for zero.
pub fn ordp_int(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(k);
        }
        n = q;
        k += 1;
    }
}

/// The p-adic valuation on Q: ord_p(0) = ∞, ord_p(a/b) = ord_p(a) − ord_p(b).
pub fn ordp(x: &Rat, p: u64) -> Val {
    match ordp_int(x.numer(), p) {
        None => Val::Infinite,
        Some(a) => {
            let b = ordp_int(x.denom(), p).unwrap_or(0);
            Val::Finite(int(a as i64 - b as i64))
        }
    }
}

/// Integer p-adic valuation of a nonzero rational.
pub fn ordp_i64(x: &Rat, p: u64) -> Option<i64> {
    match ordp(x, p) {
        Val::Finite(v) => v.to_integer().to_i64(),
        Val::Infinite => None,
    }
}

/// |x|_p as an exact rational (p^{-ord_p x}); 0 for x = 0.
pub fn abs_p(x: &Rat, p: u64) -> Rat {
    match ordp_i64(x, p) {
        None => Rat::zero(),
        Some(v) => pow_rat(&int(p as i64), -v),
    }
}

pub fn pow_rat(x: &Rat, e: i64) -> Rat {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Reduction of a p-integral rational modulo p, or `None` if p divides the
/// denominator.
pub fn residue_mod_p(x: &Rat, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let num = x.numer().mod_floor(&pb).to_u64()?;
    let den = den.to_u64()?;
    Some(num * mod_inverse(den, p)? % p)
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
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

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn sigma1(n: u64) -> Result<u64> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("sigma1 needs n >= 1, got {n}")));
    }
    Ok(factorize(n)
        .into_iter()
        .map(|(q, e)| (q.pow(e + 1) - 1) / (q - 1))
        .product())
}

/// Number of positive divisors, d(n).
pub fn numdiv(n: u64) -> Result<u64> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("numdiv needs n >= 1, got {n}")));
    }
    Ok(factorize(n).into_iter().map(|(_, e)| e as u64 + 1).product())
}

/// σ_k(n) = Σ_{d|n} d^k as a big integer.
pub fn sigma_k(k: u32, n: u64) -> BigInt {
    divisors(n).into_iter().map(|d| num_traits::pow(BigInt::from(d), k as usize)).sum()
}

/// σ1(p^m) = (p^{m+1} − 1)/(p − 1), exact for large m.
pub fn sigma1_prime_power(p: u64, m: u32) -> BigInt {
    let pb = BigInt::from(p);
    (num_traits::pow(pb.clone(), m as usize + 1) - 1) / (pb - 1)
}

/// Kronecker symbol (d/n).
pub fn kronecker(d: i64, n: i64) -> i8 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    n >>= twos;
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (d/n) for odd n > 0.
    let mut a = d.rem_euclid(n);
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// An arithmetic function tabulated on 1..=N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithFn {
    values: Vec<Rat>,
}

impl ArithFn {
    pub fn from_fn(n: usize, f: impl Fn(u64) -> Rat) -> Self {
        ArithFn {
            values: (1..=n as u64).map(f).collect(),
        }
    }

    pub fn from_values(values: Vec<Rat>) -> Self {
        ArithFn { values }
    }

    /// The constant function 1.
    pub fn one(n: usize) -> Self {
        Self::from_fn(n, |_| Rat::one())
    }

    /// The Dirichlet unit: 1 at n = 1, 0 elsewhere.
    pub fn unit(n: usize) -> Self {
        Self::from_fn(n, |k| if k == 1 { Rat::one() } else { Rat::zero() })
    }

    /// ψ_d(n) = (d/n).
    pub fn psi(d: i64, n: usize) -> Self {
        Self::from_fn(n, |k| int(kronecker(d, k as i64) as i64))
    }

    /// R_d = ψ_d ∗ 1: number of ideals of norm n in the maximal order of Q(√d).
    pub fn ideal_count(d: i64, n: usize) -> Self {
        dirichlet_conv(&Self::psi(d, n), &Self::one(n), n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at n (1-based).
    pub fn at(&self, n: u64) -> &Rat {
        &self.values[n as usize - 1]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }
}

/// (g ∗ h)(n) = Σ_{d|n} g(d) h(n/d) for n ≤ N.
pub fn dirichlet_conv(g: &ArithFn, h: &ArithFn, n: usize) -> ArithFn {
    let n = n.min(g.len()).min(h.len());
    let mut out = vec![Rat::zero(); n];
    for a in 1..=n {
        if g.values[a - 1].is_zero() {
            continue;
        }
        let mut b = 1;
        while a * b <= n {
            out[a * b - 1] += &g.values[a - 1] * &h.values[b - 1];
            b += 1;
        }
    }
    ArithFn { values: out }
}

/// Dirichlet inverse through N via g⁻¹(1) = 1/g(1),
/// g⁻¹(n) = −(1/g(1)) Σ_{d|n, d>1} g(d) g⁻¹(n/d).
pub fn dirichlet_inverse(g: &ArithFn, n: usize) -> Result<ArithFn> {
    let n = n.min(g.len());
    if n == 0 {
        return Ok(ArithFn { values: vec![] });
    }
    if g.values[0].is_zero() {
        return Err(Error::NotInvertible);
    }
    let inv1 = g.values[0].recip();
    let mut out = vec![Rat::zero(); n];
    out[0] = inv1.clone();
    for m in 2..=n as u64 {
        let mut acc = Rat::zero();
        for d in divisors(m).into_iter().skip(1) {
            acc += &g.values[d as usize - 1] * &out[(m / d) as usize - 1];
        }
        out[m as usize - 1] = -(&inv1 * acc);
    }
    Ok(ArithFn { values: out })
}

/// Total order on rationals usable in `sort_by`.
pub fn cmp_rat(a: &Rat, b: &Rat) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordp_examples() {
        assert_eq!(ordp(&int(1728), 2), Val::from_int(6));
        assert_eq!(ordp(&int(0), 5), Val::Infinite);
        assert_eq!(ordp(&rat(3, 8), 2), Val::from_int(-3));
        assert_eq!(ordp(&int(-1728), 3), Val::from_int(3));
    }

    #[test]
    fn val_rules() {
        let two = Val::from_int(2);
        assert_eq!(two.clone() + Val::Infinite, Val::Infinite);
        assert_eq!(std::cmp::min(two.clone(), Val::Infinite), two);
        assert!(Val::Finite(rat(-1, 2)) < Val::zero());
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(-5, -1), -1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(4, 0), 0);
    }

    #[test]
    fn sigma_and_numdiv() {
        assert_eq!(sigma1(6).unwrap(), 12);
        assert_eq!(numdiv(6).unwrap(), 4);
        assert_eq!(sigma1(1).unwrap(), 1);
        assert!(sigma1(0).is_err());
        assert!(numdiv(0).is_err());
        assert_eq!(sigma_k(3, 2), BigInt::from(9));
        assert_eq!(sigma1_prime_power(2, 3), BigInt::from(15));
    }

    #[test]
    fn ideal_counts_for_gaussian_integers() {
        let r = ArithFn::ideal_count(-4, 10);
        assert_eq!(*r.at(5), int(2));
        assert_eq!(*r.at(3), int(0));
        assert_eq!(*r.at(2), int(1));
        let rinv = dirichlet_inverse(&r, 10).unwrap();
        assert_eq!(*rinv.at(5), int(-2));
    }

    #[test]
    fn inverse_requires_nonzero_head() {
        let g = ArithFn::from_fn(5, |n| if n == 1 { Rat::zero() } else { Rat::one() });
        assert_eq!(dirichlet_inverse(&g, 5), Err(Error::NotInvertible));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("7").unwrap(), int(7));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
        assert_eq!(fmt_frac(&int(3)), "3/1");
    }

    #[test]
    fn residues() {
        assert_eq!(residue_mod_p(&rat(1, 3), 7), Some(5));
        assert_eq!(residue_mod_p(&rat(1, 7), 7), None);
        assert_eq!(residue_mod_p(&int(-1), 5), Some(4));
        assert_eq!(abs_p(&int(-4), 2), rat(1, 4));
    }
}
