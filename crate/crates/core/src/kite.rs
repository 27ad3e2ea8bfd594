//! Katz valuations and the kite correspondences τ_m on [0, p/(p+1)].

use std::fmt;

use num_traits::{One, Signed};
use serde::{Serialize, Serializer};

use crate::arith::{int, ordp, pow_rat, rat, sigma1, Rat, Val};
use crate::cm::{reduction_type, split_discriminant, ReductionType};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::qexp::supersingular_data;

/// A point of the kite, i.e. a value of v̂_p in (0, p/(p+1)].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KitePoint(pub Rat);

impl KitePoint {
    pub fn value(&self) -> &Rat {
        &self.0
    }
}

impl fmt::Display for KitePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for KitePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

pub type KiteDivisor = Divisor<KitePoint>;

/// p/(p+1), the top of the kite.
pub fn kite_top(p: u64) -> Rat {
    rat(p as i64, p as i64 + 1)
}

/// x_k = (p/(p+1))·p^{−k}.
pub fn breakpoint(p: u64, k: i64) -> Rat {
    kite_top(p) * pow_rat(&int(p as i64), -k)
}

fn check_point(p: u64, x: &Rat) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("p = {p}")));
    }
    if !x.is_positive() || *x > kite_top(p) {
        return Err(Error::OutsideKite(x.to_string()));
    }
    Ok(())
}

/// The smallest k with x ∈ I_k = [x_{k+1}, x_k].
pub fn level(p: u64, x: &Rat) -> Result<u32> {
    check_point(p, x)?;
    let mut k = 0u32;
    while *x < breakpoint(p, k as i64 + 1) {
        k += 1;
    }
    Ok(k)
}

/// The affine bijection I_k → I_{k′}, orientation preserving (`sign = 1`) or
/// reversing (`sign = −1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineLeg {
    pub from: i64,
    pub to: i64,
    pub sign: i8,
}

impl AffineLeg {
    pub fn eval(&self, p: u64, x: &Rat) -> Rat {
        let scaled = pow_rat(&int(p as i64), self.from - self.to) * x;
        if self.sign > 0 {
            scaled
        } else {
            breakpoint(p, self.to) + breakpoint(p, self.to + 1) - scaled
        }
    }
}

pub fn tau1(p: u64, x: &Rat) -> Result<KiteDivisor> {
    check_point(p, x)?;
    let pr = int(p as i64);
    let mut d = Divisor::new();
    if *x <= rat(1, p as i64 + 1) {
        d.add_point(KitePoint(&pr * x), Rat::one());
    } else {
        d.add_point(KitePoint(Rat::one() - x), Rat::one());
    }
    d.add_point(KitePoint(x / &pr), pr);
    Ok(d)
}

/// τ_0 = id, τ_m = τ_1 ∘ τ_{m−1} − p·τ_{m−2}.
pub fn tau_m_recursive(p: u64, m: u32, x: &Rat) -> Result<KiteDivisor> {
    check_point(p, x)?;
    let mut prev = Divisor::point(KitePoint(x.clone()), Rat::one());
    if m == 0 {
        return Ok(prev);
    }
    let mut cur = tau1(p, x)?;
    let neg_p = int(-(p as i64));
    for _ in 1..m {
        let mut next = Divisor::new();
        for (y, mult) in cur.iter() {
            next = crate::divisor::axpy(mult, &tau1(p, y.value())?, &next);
        }
        next = crate::divisor::axpy(&neg_p, &prev, &next);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Closed form of τ_m evaluated with x regarded as a point of I_k.
pub fn tau_m_closed_in(p: u64, m: u32, x: &Rat, k: u32) -> Result<KiteDivisor> {
    check_point(p, x)?;
    if *x < breakpoint(p, k as i64 + 1) || *x > breakpoint(p, k as i64) {
        return Err(Error::InvalidArgument(format!("{x} is not in I_{k}")));
    }
    let (m, k) = (m as i64, k as i64);
    let pr = int(p as i64);
    let mut d = Divisor::new();
    let plus = |to: i64| AffineLeg { from: k, to, sign: 1 };
    let first = if m <= k { 0 } else { m - k };
    for i in 0..first {
        let sign = if (m - k - i) % 2 == 0 { 1 } else { -1 };
        let leg = AffineLeg { from: k, to: i, sign };
        d.add_point(KitePoint(leg.eval(p, x)), pow_rat(&pr, i));
    }
    for i in first..=m {
        d.add_point(KitePoint(plus(2 * i - (m - k)).eval(p, x)), pow_rat(&pr, i));
    }
    Ok(d)
}

pub fn tau_m_closed(p: u64, m: u32, x: &Rat) -> Result<KiteDivisor> {
    tau_m_closed_in(p, m, x, level(p, x)?)
}

/// σ1(n0)·τ_m(x): the image of a kite point under T_{p^m n0}.
pub fn hecke_pushforward(p: u64, m: u32, n0: u64, x: &Rat) -> Result<KiteDivisor> {
    if n0 == 0 || n0.is_multiple_of(p) {
        return Err(Error::InvalidArgument(format!("n0 = {n0} must be a positive integer prime to {p}")));
    }
    Ok(tau_m_closed(p, m, x)?.scale(&int(sigma1(n0)? as i64)))
}

/// v_p(j) = Σ_e ord_p(j − 𝔧_e)/δ_e for p-integral j, and 0 when ord_p(j) < 0.
pub fn katz_valuation(p: u64, j: &Rat) -> Result<Val> {
    let data = supersingular_data(p)?;
    if ordp(j, p) < Val::zero() {
        return Ok(Val::zero());
    }
    let mut v = Val::zero();
    for c in &data.centers {
        v = v + ordp(&(j - &c.j), p).scale(&rat(1, c.delta as i64));
    }
    Ok(v)
}

/// min(v_p(j), p/(p+1)).
pub fn vhat(p: u64, j: &Rat) -> Result<Rat> {
    Ok(cap(p, &katz_valuation(p, j)?))
}

pub fn cap(p: u64, v: &Val) -> Rat {
    let top = kite_top(p);
    match v {
        Val::Finite(x) if *x < top => x.clone(),
        _ => top,
    }
}

/// v̂_p at the CM points of discriminant D, for D supersingular at p:
/// (1/2)p^{−m} if p ramifies, (p/(p+1))p^{−m} if p is inert, where p^m ‖ f.
pub fn cm_sups_valuation(p: u64, disc: i64) -> Result<Rat> {
    let (d, f) = split_discriminant(disc)?;
    let m = crate::arith::ordp_i64(&int(f), p).expect("f >= 1");
    let scale = pow_rat(&int(p as i64), -m);
    match reduction_type(p, disc)? {
        ReductionType::Ordinary => Err(Error::InvalidArgument(format!("{disc} is ordinary at {p}"))),
        ReductionType::Supersingular { .. } => {
            if d % p as i64 == 0 {
                Ok(rat(1, 2) * scale)
            } else {
                Ok(kite_top(p) * scale)
            }
        }
    }
}

/// One CSV row of a kite divisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KiteRow {
    pub x_num: String,
    pub x_den: String,
    pub mult: String,
}

/// Rows in descending x.
pub fn kite_rows(d: &KiteDivisor) -> Vec<KiteRow> {
    let mut rows: Vec<KiteRow> = d
        .iter()
        .map(|(x, m)| KiteRow {
            x_num: x.0.numer().to_string(),
            x_den: x.0.denom().to_string(),
            mult: m.to_string(),
        })
        .collect();
    rows.reverse();
    rows
}

/// `x:m, ...` in descending x.
pub fn format_kite(d: &KiteDivisor) -> String {
    let parts: Vec<String> = d.iter().rev().map(|(x, m)| format!("{x}:{m}")).collect();
    parts.join(", ")
}
