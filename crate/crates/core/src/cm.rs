//! Imaginary quadratic discriminants: fundamental part and conductor, reduction
//! type at p, class numbers by two routes, and Zhang's degree identities.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{
    abs_p, dirichlet_inverse, divisors, factorize, int, kronecker, ordp_i64, rat, sigma1, ArithFn, Rat,
};
use crate::error::{Error, Result};

/// Forms enumeration refuses |D| above this unless a larger bound is passed.
pub const DEFAULT_FORMS_BOUND: u64 = 10_000_000;

pub fn is_discriminant(disc: i64) -> bool {
    disc < 0 && matches!(disc.rem_euclid(4), 0 | 1)
}

fn squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn is_fundamental(d: i64) -> bool {
    if !is_discriminant(d) {
        return false;
    }
    let a = d.unsigned_abs();
    if d.rem_euclid(4) == 1 {
        squarefree(a)
    } else {
        let m = d / 4;
        matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
    }
}

/// D = d·f² with d fundamental.
pub fn split_discriminant(disc: i64) -> Result<(i64, i64)> {
    if !is_discriminant(disc) {
        return Err(Error::NotDiscriminant(disc));
    }
    let mut s: i64 = -1;
    let mut g: i64 = 1;
    for (q, e) in factorize(disc.unsigned_abs()) {
        g *= (q as i64).pow(e / 2);
        if e % 2 == 1 {
            s *= q as i64;
        }
    }
    if s.rem_euclid(4) == 1 {
        Ok((s, g))
    } else {
        Ok((4 * s, g / 2))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ReductionType {
    Ordinary,
    /// `supsn` is |D|_p.
    Supersingular {
        #[serde(serialize_with = "crate::arith::ser_rat")]
        supsn: Rat,
    },
}

impl ReductionType {
    pub fn is_ordinary(&self) -> bool {
        matches!(self, ReductionType::Ordinary)
    }

    /// |D|_p for supersingular D, 0 otherwise.
    pub fn supsn(&self) -> Rat {
        match self {
            ReductionType::Ordinary => Rat::zero(),
            ReductionType::Supersingular { supsn } => supsn.clone(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ReductionType::Ordinary => "ordinary",
            ReductionType::Supersingular { .. } => "supersingular",
        }
    }
}

/// Ordinary iff p splits in Q(√D).
pub fn reduction_type(p: u64, disc: i64) -> Result<ReductionType> {
    let (d, _) = split_discriminant(disc)?;
    if kronecker(d, p as i64) == 1 {
        Ok(ReductionType::Ordinary)
    } else {
        Ok(ReductionType::Supersingular {
            supsn: abs_p(&int(disc), p),
        })
    }
}

/// Counts reduced primitive forms (a, b, c) of discriminant D.
pub fn class_number_forms(disc: i64) -> Result<u64> {
    class_number_forms_bounded(disc, DEFAULT_FORMS_BOUND)
}

pub fn class_number_forms_bounded(disc: i64, bound: u64) -> Result<u64> {
    if !is_discriminant(disc) {
        return Err(Error::NotDiscriminant(disc));
    }
    let n = disc.unsigned_abs();
    if n > bound {
        return Err(Error::BoundExceeded(format!("|D| = {n} > {bound}")));
    }
    let n = n as i64;
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = -a + 1;
        while b <= a {
            let num = b * b + n;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a && !(b < 0 && a == c) && a.gcd(&b).gcd(&c) == 1 {
                    h += 1;
                }
            }
            b += 1;
        }
        a += 1;
    }
    Ok(h)
}

/// Half the number of units of the order of discriminant d·f².
pub fn unit_weight(d: i64, f: i64) -> u64 {
    match (d, f) {
        (-3, 1) => 3,
        (-4, 1) => 2,
        _ => 1,
    }
}

/// h(d) for fundamental d, from −(w/|d|) Σ_{a<|d|} a·ψ_d(a).
fn class_number_fundamental(d: i64) -> u64 {
    let n = d.abs();
    let s: i64 = (1..n).map(|a| a * kronecker(d, a) as i64).sum();
    let h = -(unit_weight(d, 1) as i64) * s;
    debug_assert!(h % n == 0);
    (h / n) as u64
}

/// h(df²) = (w_{d,f}/w_d)·h(d)·f·∏_{q|f} (1 − ψ_d(q)/q).
pub fn class_number_formula(disc: i64) -> Result<u64> {
    let (d, f) = split_discriminant(disc)?;
    let mut h = rat(unit_weight(d, f) as i64, unit_weight(d, 1) as i64) * int(class_number_fundamental(d) as i64);
    h *= int(f);
    for (q, _) in factorize(f as u64) {
        h *= rat(q as i64 - kronecker(d, q as i64) as i64, q as i64);
    }
    if !h.is_integer() {
        return Err(Error::Invariant(format!("class number formula gave {h} for D = {disc}")));
    }
    Ok(h.to_integer().to_u64().expect("positive"))
}

/// h(df²)/w_{d,f}.
pub fn weighted_class_number(d: i64, f: i64) -> Result<Rat> {
    Ok(rat(class_number_formula(d * f * f)? as i64, unit_weight(d, f) as i64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZhangReport {
    pub d: i64,
    pub f: i64,
    pub ftilde: i64,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub lhs: Rat,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub rhs: Rat,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub inverse_lhs: Rat,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub inverse_rhs: Rat,
}

impl ZhangReport {
    pub fn ok(&self) -> bool {
        self.lhs == self.rhs && self.inverse_lhs == self.inverse_rhs
    }
}

fn require_fundamental(d: i64) -> Result<()> {
    if is_fundamental(d) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{d} is not a fundamental discriminant")))
    }
}

/// σ1(f)·g(f̃) = Σ_{f0|f} R_d(f/f0)·g(f0 f̃) and its inverse
/// g(f f̃) = Σ_{f0|f} R_d⁻¹(f/f0)·σ1(f0)·g(f̃), with g(c) = h(dc²)/w_{d,c}.
pub fn zhang_degree_check(d: i64, f: i64, ftilde: i64) -> Result<ZhangReport> {
    require_fundamental(d)?;
    if f < 1 || ftilde < 1 || f.gcd(&ftilde) != 1 {
        return Err(Error::InvalidArgument(format!("need coprime f, f~ >= 1; got {f}, {ftilde}")));
    }
    let n = f as usize;
    let r = ArithFn::ideal_count(d, n);
    let rinv = dirichlet_inverse(&r, n)?;
    let g_t = weighted_class_number(d, ftilde)?;
    let lhs = int(sigma1(f as u64)? as i64) * &g_t;
    let mut rhs = Rat::zero();
    let mut inverse_rhs = Rat::zero();
    for f0 in divisors(f as u64) {
        let q = f as u64 / f0;
        rhs += r.at(q) * weighted_class_number(d, f0 as i64 * ftilde)?;
        inverse_rhs += rinv.at(q) * int(sigma1(f0)? as i64) * &g_t;
    }
    Ok(ZhangReport {
        d,
        f,
        ftilde,
        lhs,
        rhs,
        inverse_lhs: weighted_class_number(d, f * ftilde)?,
        inverse_rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Splitting {
    Split,
    Ramified,
    Inert,
}

pub fn splitting(p: u64, d: i64) -> Splitting {
    match kronecker(d, p as i64) {
        1 => Splitting::Split,
        0 => Splitting::Ramified,
        _ => Splitting::Inert,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PPowerReport {
    pub p: u64,
    pub d: i64,
    pub f: i64,
    pub m: u32,
    pub splitting: Splitting,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub actual: Rat,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub predicted: Rat,
}

impl PPowerReport {
    pub fn ok(&self) -> bool {
        self.actual == self.predicted
    }
}

/// h(d(p^m f)²)/w against the split/ramified/inert formulas in terms of
/// g = h(df²)/w_{d,f}.
pub fn zhang_p_power_degree_check(p: u64, d: i64, f: i64, m: u32) -> Result<PPowerReport> {
    require_fundamental(d)?;
    if f < 1 || f % p as i64 == 0 {
        return Err(Error::InvalidArgument(format!("f = {f} must be positive and prime to {p}")));
    }
    let g = weighted_class_number(d, f)?;
    let s = |k: u32| int(sigma1((p as i64).pow(k) as u64).expect("positive") as i64);
    let kind = splitting(p, d);
    let predicted = match (m, kind) {
        (0, _) => g.clone(),
        (1, Splitting::Split) => (s(1) - int(2)) * &g,
        (1, Splitting::Ramified) => (s(1) - int(1)) * &g,
        (1, Splitting::Inert) => s(1) * &g,
        (_, Splitting::Split) => (s(m) - int(2) * s(m - 1) + s(m - 2)) * &g,
        (_, Splitting::Ramified) => (s(m) - s(m - 1)) * &g,
        (_, Splitting::Inert) => (s(m) - s(m - 2)) * &g,
    };
    Ok(PPowerReport {
        p,
        d,
        f,
        m,
        splitting: kind,
        actual: weighted_class_number(d, (p as i64).pow(m) * f)?,
        predicted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiegelReport {
    pub count: usize,
    pub min_ratio: f64,
    pub argmin: i64,
}

/// min over valid D in [lo, hi] of h(D)/|D|^{1/2−ε}.
pub fn siegel_report(lo: i64, hi: i64, eps: f64) -> Result<SiegelReport> {
    let discs: Vec<i64> = (lo.min(hi)..=hi.max(lo)).filter(|&d| is_discriminant(d)).collect();
    if discs.is_empty() || lo > hi {
        return Err(Error::InvalidArgument(format!("no discriminants in [{lo}, {hi}]")));
    }
    let mut best: Option<(f64, i64)> = None;
    for &disc in &discs {
        let h = class_number_formula(disc)? as f64;
        let ratio = h / (disc.unsigned_abs() as f64).powf(0.5 - eps);
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, disc));
        }
    }
    let (min_ratio, argmin) = best.expect("nonempty");
    Ok(SiegelReport {
        count: discs.len(),
        min_ratio,
        argmin,
    })
}

/// One CSV row of a class-number sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    #[serde(rename = "D")]
    pub disc: i64,
    pub d: i64,
    pub f: i64,
    pub h_forms: u64,
    pub h_formula: u64,
    #[serde(rename = "type")]
    pub kind: String,
}

pub fn class_row(p: u64, disc: i64) -> Result<ClassRow> {
    let (d, f) = split_discriminant(disc)?;
    Ok(ClassRow {
        disc,
        d,
        f,
        h_forms: class_number_forms(disc)?,
        h_formula: class_number_formula(disc)?,
        kind: reduction_type(p, disc)?.label().to_string(),
    })
}

/// ord_p of the conductor.
pub fn conductor_exponent(p: u64, disc: i64) -> Result<i64> {
    let (_, f) = split_discriminant(disc)?;
    Ok(ordp_i64(&int(f), p).expect("f >= 1"))
}
