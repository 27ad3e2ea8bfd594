//! Series construction, p-adic evaluation and orbit dynamics of t.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{int, ordp_int, rat, Rat};
use crate::canonical::mestre::mestre_maps;
use crate::canonical::{center, center_weight, max_evaluable_distance, supported, tail_bound};
use crate::error::{Error, Result};
use crate::padic::{div_p_pow, p_pow, PadicInt};
use crate::qexp::QSeries;

/// Given f(z) = z(1 + δ(z)) with δ = Σ_{k≥1} δ_k z^{−k} (a Laurent polynomial
/// with integer coefficients), returns Δ_1..Δ_n with F(z) = z(1 + Σ Δ_k z^{−k})
/// and F(f(z)) = z.
pub fn laurent_invert(delta: &[Rat], n: usize) -> Result<Vec<BigInt>> {
    if delta.iter().any(|c| !c.is_integer()) {
        return Err(Error::InvalidArgument("δ must have integer coefficients".into()));
    }
    // Work in u = 1/z: f = u^{−1}(1 + Σ δ_k u^k).
    let prec = n as i64 + 1;
    let f = QSeries::from_fn(-1, prec, |e| {
        if e == -1 {
            int(1)
        } else {
            delta.get(e as usize).cloned().unwrap_or_else(Rat::zero)
        }
    });
    let f_inv = f.inverse()?;
    let mut g = f.clone();
    let mut f_pow = QSeries::one(prec + 1);
    let mut out = Vec::with_capacity(n);
    for k in 0..n as i64 {
        let a = g.coeff(k);
        out.push(-a.to_integer());
        if !a.is_zero() {
            g = &g - &f_pow.scale(&a);
        }
        f_pow = &f_pow * &f_inv;
    }
    Ok(out)
}

/// t(z) = Σ_{i=0}^{p} c_i w^i + Σ_{n≥1} A_n w^{−n}, w = z − 𝔧_p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LaurentMap {
    pub p: u64,
    pub center: i64,
    #[serde(serialize_with = "ser_bigs")]
    pub poly: Vec<BigInt>,
    #[serde(serialize_with = "ser_bigs")]
    pub tail: Vec<BigInt>,
}

fn ser_bigs<S: serde::Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl LaurentMap {
    /// ǩ_p, i.e. the polynomial part minus w^p + 𝔧_p, lowest degree first.
    pub fn kcheck(&self) -> Vec<BigInt> {
        let mut k = self.poly[..self.p as usize].to_vec();
        k[0] -= self.center;
        k
    }

    /// A_n for n ≥ 1.
    pub fn a(&self, n: usize) -> &BigInt {
        &self.tail[n - 1]
    }

    pub fn ord_a(&self, n: usize) -> Option<u64> {
        ordp_int(self.a(n), self.p)
    }

    /// `poly: c_0 .. c_p` then `tail: n A_n` per line.
    pub fn dump(&self) -> String {
        let mut out = String::from("poly:");
        for c in &self.poly {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
        for (i, a) in self.tail.iter().enumerate() {
            let _ = writeln!(out, "tail: {} {a}", i + 1);
        }
        out
    }
}

/// Laurent expansion of t through A_n, computed as α̂_p ∘ F_p with F_p the
/// inverse of β̂_p − 𝔧_p.
pub fn t_series(p: u64, n: usize) -> Result<LaurentMap> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one tail coefficient".into()));
    }
    let maps = mestre_maps(p)?;
    let c = center(p)?;
    // β̌ = β̂ − 𝔧 = w(1 + δ(w)); δ_k is the coefficient of w^{1−k}.
    let top = maps.beta.max_exp().expect("nonzero");
    debug_assert_eq!(top, 1);
    let lowest = maps.beta.min_exp().expect("nonzero");
    let delta: Vec<Rat> = (1..=(1 - lowest))
        .map(|k| {
            let e = 1 - k;
            if e == 0 {
                maps.beta.coeff(0) - &c
            } else {
                maps.beta.coeff(e)
            }
        })
        .collect();
    let m = n + p as usize + 2;
    let big_delta = laurent_invert(&delta, m)?;
    let f = QSeries::from_fn(-1, m as i64, |e| {
        if e == -1 {
            int(1)
        } else {
            Rat::from_integer(big_delta[e as usize].clone())
        }
    });
    let f_inv = f.inverse()?;
    let mut t: Option<QSeries> = None;
    for (e, a) in maps.alpha.terms() {
        let power = if e >= 0 { f.pow(e as u32) } else { f_inv.pow((-e) as u32) };
        let term = power.scale(a);
        t = Some(match t {
            None => term,
            Some(s) => &s + &term,
        });
    }
    let t = t.expect("α̂ is nonzero");
    if t.prec() <= n as i64 {
        return Err(Error::Invariant("series precision shortfall".into()));
    }
    let to_int = |x: Rat| -> Result<BigInt> {
        if x.is_integer() {
            Ok(x.to_integer())
        } else {
            Err(Error::Invariant(format!("non-integral coefficient {x}")))
        }
    };
    let poly = (0..=p as i64).map(|i| to_int(t.coeff(-i))).collect::<Result<Vec<_>>>()?;
    let tail = (1..=n as i64).map(|k| to_int(t.coeff(k))).collect::<Result<Vec<_>>>()?;
    let center_int = c.to_integer().to_i64().expect("small");
    Ok(LaurentMap {
        p,
        center: center_int,
        poly,
        tail,
    })
}

/// A certified value of t(j).
#[derive(Debug, Clone, PartialEq)]
pub struct TEval {
    pub value: PadicInt,
    /// Center distance s = ord_p(j − 𝔧_p).
    pub distance: u32,
    /// Number of tail terms summed.
    pub terms: usize,
}

/// Holds a precomputed Laurent expansion of t.
#[derive(Debug, Clone)]
pub struct CanonicalBranch {
    map: LaurentMap,
}

impl CanonicalBranch {
    pub fn new(p: u64, n_terms: usize) -> Result<Self> {
        Ok(CanonicalBranch {
            map: t_series(p, n_terms)?,
        })
    }

    /// Enough terms to evaluate anywhere in the evaluable region at
    /// precision K.
    pub fn for_precision(p: u64, k: u32) -> Result<Self> {
        let s = max_evaluable_distance(p)?;
        Self::new(p, terms_needed(p, k, s)?.max(1))
    }

    pub fn map(&self) -> &LaurentMap {
        &self.map
    }

    pub fn p(&self) -> u64 {
        self.map.p
    }

    pub fn eval(&self, j: &PadicInt) -> Result<TEval> {
        let p = self.map.p;
        if j.p() != p {
            return Err(Error::InvalidArgument(format!("input is a {}-adic number, branch is {p}-adic", j.p())));
        }
        let k = j.prec();
        let w = j.sub(&PadicInt::from_i64(p, k, self.map.center));
        let s = w.ord().ok_or_else(|| {
            Error::InsufficientPrecision(format!("j ≡ 𝔧_{p} mod {p}^{k}; center distance unknown"))
        })?;
        if s > max_evaluable_distance(p)? {
            return Err(Error::TooSupersingular(format!("ord_{p}(j − 𝔧_{p}) = {s}")));
        }
        let wanted = terms_needed(p, k, s)?;
        let n_max = wanted.min(self.map.tail.len());
        // Certified precision: the discarded tail, and each kept term's
        // sensitivity to the unknown digits of w.
        let tail_floor = (tail_bound(p, n_max as u64 + 1)? - int(((n_max + 1) as u64 * s as u64) as i64)).ceil();
        let mut cert = (k as i64).min(tail_floor.to_integer().to_i64().expect("small"));
        let modulus = p_pow(p, k);
        let w_val = w.value().clone();
        let u = div_p_pow(&w_val, p, s).expect("s = ord(w)");
        let u_inv = PadicInt::new(p, k, &u).inverse()?.value().clone();
        let mut acc = BigInt::zero();
        for c in self.map.poly.iter().rev() {
            acc = (acc * &w_val + c).mod_floor(&modulus);
        }
        let mut u_pow = BigInt::from(1);
        for n in 1..=n_max {
            u_pow = (u_pow * &u_inv).mod_floor(&modulus);
            let a = self.map.a(n);
            let Some(ord) = ordp_int(a, p) else { continue };
            let shift = (n as u64) * s as u64;
            let scaled = div_p_pow(a, p, shift as u32)
                .ok_or_else(|| Error::Invariant(format!("A_{n} not divisible by {p}^{shift}")))?;
            acc = (acc + scaled * &u_pow).mod_floor(&modulus);
            cert = cert.min(ord as i64 - shift as i64 + k as i64 - s as i64);
        }
        if cert < 1 {
            return Err(Error::InsufficientPrecision(format!("certified precision {cert} < 1")));
        }
        Ok(TEval {
            value: PadicInt::new(p, cert as u32, &acc),
            distance: s,
            terms: n_max,
        })
    }
}

/// Minimal n_max with b(n_max+1) − (n_max+1)s ≥ K.
fn terms_needed(p: u64, k: u32, s: u32) -> Result<usize> {
    let mut n = 0u64;
    loop {
        let bound = tail_bound(p, n + 1)? - int(((n + 1) * s as u64) as i64);
        if bound >= int(k as i64) {
            return Ok(n as usize);
        }
        n += 1;
    }
}

/// t(j) with a series sized for this input.
pub fn t_eval(p: u64, j: &PadicInt) -> Result<TEval> {
    supported(p)?;
    let k = j.prec();
    let w = j.sub(&PadicInt::from_i64(p, k, center(p)?.to_integer().to_i64().expect("small")));
    let s = w.ord().unwrap_or(k).min(max_evaluable_distance(p)?);
    CanonicalBranch::new(p, terms_needed(p, k, s)?.max(1))?.eval(j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitClass {
    Periodic { r: usize },
    Preperiodic { m: usize, r: usize },
    Undecided,
}

impl std::fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrbitClass::Periodic { r } => write!(f, "periodic r={r}"),
            OrbitClass::Preperiodic { m, r } => write!(f, "preperiodic m={m} r={r}"),
            OrbitClass::Undecided => write!(f, "undecided"),
        }
    }
}

/// Comparisons below this many digits are not trusted.
pub const MIN_DECISION_PRECISION: u32 = 8;

/// First repeat of the orbit j0, t(j0), ... modulo the certified precision,
/// confirmed by rerunning at half precision.
pub fn orbit_classify(branch: &CanonicalBranch, j0: &PadicInt, max_iter: usize) -> Result<OrbitClass> {
    let p = branch.p();
    let c = PadicInt::from_i64(p, j0.prec(), branch.map.center);
    if j0.sub(&c).residue() == 0 {
        return Err(Error::InvalidArgument(format!("j0 has supersingular residue at {p}")));
    }
    let full = first_repeat(branch, j0, max_iter)?;
    let half = first_repeat(branch, &j0.reduce(j0.prec() / 2), max_iter)?;
    Ok(match (full, half) {
        (Some(a), Some(b)) if a == b => {
            let (m, r) = a;
            if m == 0 {
                OrbitClass::Periodic { r }
            } else {
                OrbitClass::Preperiodic { m, r }
            }
        }
        _ => OrbitClass::Undecided,
    })
}

fn first_repeat(branch: &CanonicalBranch, j0: &PadicInt, max_iter: usize) -> Result<Option<(usize, usize)>> {
    let mut orbit = vec![j0.clone()];
    for _ in 0..max_iter {
        let next = branch.eval(orbit.last().expect("nonempty"))?.value;
        let prec = orbit.iter().map(PadicInt::prec).min().unwrap_or(0).min(next.prec());
        if prec < MIN_DECISION_PRECISION {
            return Ok(None);
        }
        if let Some(i) = orbit.iter().position(|x| x.congruent(&next, prec)) {
            return Ok(Some((i, orbit.len() - i)));
        }
        orbit.push(next);
    }
    Ok(None)
}

/// Period of x = a + bθ under Frobenius in F_{p²}, where θ² + θ + 1 = 0 for
/// p = 2 and θ² = ν (the least non-residue) for odd p.
pub fn frobenius_period(p: u64, a: u64, b: u64) -> Result<u32> {
    if !crate::arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let x = (a % p, b % p);
    let mut y = fp2_pow(p, x, p);
    let mut r = 1;
    while y != x {
        y = fp2_pow(p, y, p);
        r += 1;
    }
    Ok(r)
}

fn fp2_mul(p: u64, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
    let (a, b) = x;
    let (c, d) = y;
    if p == 2 {
        // θ² = θ + 1 over F_2.
        let bd = b * d;
        ((a * c + bd) % 2, (a * d + b * c + bd) % 2)
    } else {
        let nu = (2..p).find(|&n| crate::arith::kronecker(n as i64, p as i64) == -1).expect("p odd");
        ((a * c + b * d % p * nu) % p, (a * d + b * c) % p)
    }
}

fn fp2_pow(p: u64, x: (u64, u64), e: u64) -> (u64, u64) {
    let mut out = (1, 0);
    let mut base = x;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            out = fp2_mul(p, out, base);
        }
        base = fp2_mul(p, base, base);
        e >>= 1;
    }
    out
}

/// Degrees p^{m−i} of the terms of T_{p^m}(E) on the ordinary locus, i = 0..m.
pub fn tpm_degree_profile(p: u64, m: u32) -> Vec<u64> {
    (0..=m).map(|i| p.pow(m - i)).collect()
}

/// ord_p(t(j) − j^p) known to the certified precision, with the lower bound
/// 1 − v_p(j) it must meet.
pub fn frobenius_defect(branch: &CanonicalBranch, j: &PadicInt) -> Result<(u32, Rat)> {
    let p = branch.p();
    let t = branch.eval(j)?;
    let jp = j.pow(p as u32).reduce(t.value.prec());
    let d = t.value.distance(&jp);
    let v = rat(t.distance as i64, center_weight(p)? as i64);
    Ok((d, int(1) - v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_identity_and_shift() {
        assert_eq!(laurent_invert(&[], 5).unwrap(), vec![BigInt::zero(); 5]);
        let d = laurent_invert(&[int(7)], 5).unwrap();
        assert_eq!(d[0], BigInt::from(-7));
        assert!(d[1..].iter().all(Zero::is_zero));
        assert!(laurent_invert(&[rat(1, 2)], 3).is_err());
    }

    #[test]
    fn leading_delta_p2() {
        let d = laurent_invert(&[int(768), int(196608), int(1 << 24)], 4).unwrap();
        assert_eq!(d[0], BigInt::from(-768));
        assert_eq!(d[1], BigInt::from(-196608));
        assert_eq!(d[2], BigInt::from(-167772160));
    }

    #[test]
    fn series_constants() {
        let t2 = t_series(2, 4).unwrap();
        assert_eq!(t2.kcheck(), vec![BigInt::from(627 * 256), BigInt::from(-93 * 16)]);
        assert_eq!(t2.a(1), &BigInt::from(-42987520));
        assert_eq!(t2.ord_a(1), Some(12));
        let t3 = t_series(3, 4).unwrap();
        assert_eq!(
            t3.kcheck(),
            vec![BigInt::from(1263704 * 243), BigInt::from(85708 * 27), BigInt::from(328 * 9)]
        );
        assert_eq!(t3.ord_a(1), Some(6));
        assert!(t_series(5, 3).is_err());
    }

    #[test]
    fn dump_format() {
        let t2 = t_series(2, 2).unwrap();
        let text = t2.dump();
        assert!(text.starts_with("poly: 160512 -1488 1\ntail: 1 -42987520\n"));
    }

    #[test]
    fn fixed_point_of_j_minus_7() {
        let j = PadicInt::from_i64(2, 64, -3375);
        let t = t_eval(2, &j).unwrap();
        assert_eq!(t.value.prec(), 64);
        assert_eq!(t.value, j);
    }

    #[test]
    fn too_supersingular_rejected() {
        let j = PadicInt::from_i64(2, 64, 256);
        assert!(matches!(t_eval(2, &j), Err(Error::TooSupersingular(_))));
        let j = PadicInt::from_i64(2, 64, 0);
        assert!(matches!(t_eval(2, &j), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn profiles() {
        assert_eq!(tpm_degree_profile(2, 1), vec![2, 1]);
        assert_eq!(tpm_degree_profile(2, 3), vec![8, 4, 2, 1]);
        assert_eq!(tpm_degree_profile(3, 2), vec![9, 3, 1]);
    }

    #[test]
    fn frobenius_periods() {
        assert_eq!(frobenius_period(2, 0, 1).unwrap(), 2);
        assert_eq!(frobenius_period(2, 1, 1).unwrap(), 2);
        assert_eq!(frobenius_period(2, 1, 0).unwrap(), 1);
        assert_eq!(frobenius_period(3, 2, 0).unwrap(), 1);
        assert_eq!(frobenius_period(3, 0, 1).unwrap(), 2);
    }
}
