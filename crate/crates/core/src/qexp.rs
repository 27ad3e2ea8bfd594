//! Truncated q-expansions over Q: Eisenstein series, Δ, j and G₂, plus the
//! decomposition of E_{p−1} that locates the supersingular j-invariants.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{big, fmt_frac, int, rat, is_prime, kronecker, ordp, residue_mod_p, sigma1, sigma_k, Rat, Val};
use crate::error::{Error, Result};

/// Σ_{n ≥ start} c_n qⁿ, with coefficients known for exponents `< prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    start: i64,
    coeffs: Vec<Rat>,
    prec: i64,
}

impl QSeries {
    /// Coefficients for q^start, q^{start+1}, ..., valid below `prec`.
    pub fn new(start: i64, coeffs: Vec<Rat>, prec: i64) -> Self {
        let mut coeffs = coeffs;
        coeffs.resize((prec - start).max(0) as usize, Rat::zero());
        QSeries { start, coeffs, prec }
    }

    pub fn from_fn(start: i64, prec: i64, f: impl Fn(i64) -> Rat) -> Self {
        QSeries {
            start,
            coeffs: (start..prec).map(f).collect(),
            prec,
        }
    }

    pub fn one(prec: i64) -> Self {
        Self::from_fn(0, prec, |n| if n == 0 { Rat::one() } else { Rat::zero() })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// First exponent whose coefficient is not known.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Coefficient of qⁿ; panics if n is at or beyond the precision.
    pub fn coeff(&self, n: i64) -> Rat {
        assert!(n < self.prec, "coefficient q^{n} beyond precision {}", self.prec);
        if n < self.start {
            Rat::zero()
        } else {
            self.coeffs[(n - self.start) as usize].clone()
        }
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        Self::from_fn(self.start.min(prec), prec, |n| self.coeff(n))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        QSeries {
            start: self.start,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            prec: self.prec,
        }
    }

    /// Lowest exponent with nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.start + i as i64)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = QSeries::one(self.prec - self.start);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse; the lowest known coefficient must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let s = self.valuation().ok_or(Error::NotInvertible)?;
        let len = (self.prec - s) as usize;
        let u: Vec<Rat> = (s..self.prec).map(|n| self.coeff(n)).collect();
        let inv_lead = u[0].recip();
        let mut v = vec![Rat::zero(); len];
        v[0] = inv_lead.clone();
        for n in 1..len {
            let mut acc = Rat::zero();
            for i in 1..=n {
                if !u[i].is_zero() {
                    acc += &u[i] * &v[n - i];
                }
            }
            v[n] = -(&inv_lead * acc);
        }
        Ok(QSeries {
            start: -s,
            coeffs: v,
            prec: -s + len as i64,
        })
    }

    /// `n num/den` per coefficient from the start to the precision.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{} {}", self.start + i as i64, fmt_frac(c));
        }
        out
    }

    /// Parses the format written by [`QSeries::dump`]; precision is one past
    /// the last line.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (n, c) = line
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("bad series line {line:?}")))?;
            let n: i64 = n.parse().map_err(|_| Error::Parse(format!("bad exponent {n:?}")))?;
            rows.push((n, crate::arith::parse_rat(c)?));
        }
        let Some(first) = rows.first().map(|r| r.0) else {
            return Err(Error::Parse("empty series".into()));
        };
        for (i, (n, _)) in rows.iter().enumerate() {
            if *n != first + i as i64 {
                return Err(Error::Parse(format!("exponents not contiguous at {n}")));
            }
        }
        let prec = first + rows.len() as i64;
        Ok(QSeries::new(first, rows.into_iter().map(|r| r.1).collect(), prec))
    }

    fn combine(&self, other: &Self, f: impl Fn(Rat, Rat) -> Rat) -> Self {
        let prec = self.prec.min(other.prec);
        let start = self.start.min(other.start).min(prec);
        QSeries::from_fn(start, prec, |n| f(self.coeff(n), other.coeff(n)))
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scale(&int(-1))
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let start = self.start + rhs.start;
        let prec = (self.prec + rhs.start).min(rhs.prec + self.start);
        let len = (prec - start).max(0) as usize;
        let mut out = vec![Rat::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (k, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + k] += a * b;
                }
            }
        }
        QSeries { start, coeffs: out, prec }
    }
}

/// Bernoulli numbers B_0..B_n with B_1 = −1/2.
pub fn bernoulli(n: usize) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for m in 1..=n {
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += big(binomial(BigInt::from(m + 1), BigInt::from(j))) * bj;
        }
        b.push(-acc / big(BigInt::from(m + 1)));
    }
    b
}

/// Normalized E_k through q^n.
pub fn eisenstein(k: u32, n: usize) -> Result<QSeries> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("Eisenstein weight must be even and >= 4, got {k}")));
    }
    let bk = bernoulli(k as usize).pop().expect("nonempty");
    let c = -int(2 * k as i64) / bk;
    Ok(QSeries::from_fn(0, n as i64 + 1, |m| {
        if m == 0 {
            Rat::one()
        } else {
            &c * big(sigma_k(k - 1, m as u64))
        }
    }))
}

/// Δ = q ∏ (1 − qⁿ)²⁴ through q^n.
pub fn delta_series(n: usize) -> QSeries {
    let prec = n as i64 + 1;
    // Build ∏ (1 − q^m) through q^{n−1}, then raise to the 24th power.
    let len = n.max(1);
    let mut eta = vec![BigInt::zero(); len];
    eta[0] = BigInt::one();
    for m in 1..len {
        for i in (m..len).rev() {
            let t = eta[i - m].clone();
            eta[i] -= t;
        }
    }
    let eta = QSeries::from_fn(0, len as i64, |i| big(eta[i as usize].clone()));
    let e24 = eta.pow(24);
    QSeries::from_fn(1, prec, |m| e24.coeff(m - 1))
}

/// j = E₄³/Δ, coefficients q^{−1}..q^n.
pub fn j_series(n: usize) -> QSeries {
    let e4 = eisenstein(4, n + 2).expect("weight 4 is valid");
    let d = delta_series(n + 2);
    let j = &e4.pow(3) * &d.inverse().expect("Δ has leading coefficient 1");
    j.truncate(n as i64 + 1)
}

/// G₂ = 1 + 24 Σ (σ1(n) − 2σ1(n/2)) qⁿ through q^n.
pub fn g2_series(n: usize) -> QSeries {
    QSeries::from_fn(0, n as i64 + 1, |m| {
        if m == 0 {
            return Rat::one();
        }
        let m = m as u64;
        let mut c = sigma1(m).expect("m >= 1") as i64;
        if m.is_multiple_of(2) {
            c -= 2 * sigma1(m / 2).expect("m/2 >= 1") as i64;
        }
        int(24 * c)
    })
}

/// Outcome of checking one identity through a truncation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Check {
    Ok,
    /// First exponent with a nonzero residual coefficient.
    FailsAt(i64),
}

impl Check {
    pub fn is_ok(&self) -> bool {
        matches!(self, Check::Ok)
    }

    fn of(residual: &QSeries) -> Check {
        match residual.valuation() {
            None => Check::Ok,
            Some(n) => Check::FailsAt(n),
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Check::Ok => write!(f, "ok"),
            Check::FailsAt(n) => write!(f, "fail@{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub order: usize,
    /// E₄³ − E₆² = 1728Δ
    pub discriminant: Check,
    /// 4G₂³ = E₆ + 3E₄G₂
    pub g2_cubic: Check,
    /// E₄ ≡ 1 mod 2⁴ and E_{p−1} ≡ 1 mod p for 5 ≤ p ≤ 13, termwise
    pub congruences: Check,
}

impl IdentityReport {
    pub fn all_ok(&self) -> bool {
        self.discriminant.is_ok() && self.g2_cubic.is_ok() && self.congruences.is_ok()
    }
}

pub fn verify_identities(n: usize) -> IdentityReport {
    let e4 = eisenstein(4, n).expect("valid weight");
    let e6 = eisenstein(6, n).expect("valid weight");
    let d = delta_series(n);
    let g2 = g2_series(n);

    let r1 = &(&e4.pow(3) - &e6.pow(2)) - &d.scale(&int(1728));
    let r2 = &(&g2.pow(3).scale(&int(4)) - &e6) - &(&e4 * &g2).scale(&int(3));

    let mut congruences = Check::Ok;
    let mut note = |m: i64| {
        congruences = match &congruences {
            Check::FailsAt(k) if *k <= m => Check::FailsAt(*k),
            _ => Check::FailsAt(m),
        }
    };
    if let Some(m) = first_noncongruent(&e4, 2, 4) {
        note(m);
    }
    for p in [5u64, 7, 11, 13] {
        let e = eisenstein(p as u32 - 1, n).expect("valid weight");
        if let Some(m) = first_noncongruent(&e, p, 1) {
            note(m);
        }
    }
    IdentityReport {
        order: n,
        discriminant: Check::of(&r1),
        g2_cubic: Check::of(&r2),
        congruences,
    }
}

/// First exponent where f − 1 is not ≡ 0 mod p^e.
fn first_noncongruent(f: &QSeries, p: u64, e: i64) -> Option<i64> {
    (f.start()..f.prec()).find(|&m| {
        let c = if m == 0 { f.coeff(m) - Rat::one() } else { f.coeff(m) };
        ordp(&c, p) < Val::from_int(e)
    })
}

/// A supersingular center 𝔧_e with weight δ_e.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Center {
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub j: Rat,
    pub delta: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupersingularData {
    pub p: u64,
    pub centers: Vec<Center>,
    /// (m, δ, ε) with p − 1 = 12m + 4δ + 6ε; absent for p ∈ {2, 3}.
    pub decomposition: Option<(u32, u32, u32)>,
    /// Coefficients a_0..a_m of P with E_{p−1} = Δ^m E₄^δ E₆^ε P(j).
    #[serde(skip)]
    pub p_coeffs: Vec<Rat>,
}

impl SupersingularData {
    pub fn center_nearest(&self, j: &Rat) -> Option<&Center> {
        self.centers.iter().max_by(|a, b| ordp(&(j - &a.j), self.p).cmp(&ordp(&(j - &b.j), self.p)))
    }
}

pub fn supersingular_data(p: u64) -> Result<SupersingularData> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if p > 23 {
        return Err(Error::Unsupported(format!(
            "supersingular centers for p = {p} are not rational"
        )));
    }
    match p {
        2 => {
            return Ok(SupersingularData {
                p,
                centers: vec![Center { j: int(0), delta: 12 }],
                decomposition: None,
                p_coeffs: vec![],
            })
        }
        3 => {
            return Ok(SupersingularData {
                p,
                centers: vec![Center { j: int(1728), delta: 6 }],
                decomposition: None,
                p_coeffs: vec![],
            })
        }
        _ => {}
    }
    let w = (p - 1) as u32;
    let (m, d, e) = decompose_weight(w);
    let n = 3 * m as usize + 10;

    let mut denom = QSeries::one(n as i64 + 1);
    denom = &denom * &delta_series(n + m as usize + 1).pow(m);
    if d > 0 {
        denom = &denom * &eisenstein(4, n + m as usize).expect("valid").pow(d);
    }
    if e > 0 {
        denom = &denom * &eisenstein(6, n + m as usize).expect("valid");
    }
    let ratio = &eisenstein(w, n + 2 * m as usize + 1).expect("valid") * &denom.inverse()?;
    let j = j_series(n + m as usize);

    // Triangular solve: the leading term of j^i is q^{−i}.
    let mut residual = ratio;
    let mut coeffs = vec![Rat::zero(); m as usize + 1];
    for i in (0..=m).rev() {
        let a = residual.coeff(-(i as i64));
        let ji = j.pow(i);
        residual = &residual - &ji.scale(&a);
        coeffs[i as usize] = a;
    }
    if let Some(bad) = residual.valuation() {
        return Err(Error::Invariant(format!(
            "E_{w} is not a polynomial in j of degree {m}: residual at q^{bad}"
        )));
    }

    let mut centers = Vec::new();
    if d > 0 {
        centers.push(Center { j: int(0), delta: 3 });
    }
    if e > 0 {
        centers.push(Center { j: int(1728), delta: 2 });
    }
    if m == 1 {
        centers.push(Center {
            j: -&coeffs[0] / &coeffs[1],
            delta: 1,
        });
    } else if m > 1 {
        return Err(Error::Unsupported(format!("degree {m} supersingular factor")));
    }
    Ok(SupersingularData {
        p,
        centers,
        decomposition: Some((m, d, e)),
        p_coeffs: coeffs,
    })
}

/// w = 12m + 4δ + 6ε with δ ∈ {0,1,2}, ε ∈ {0,1}.
pub fn decompose_weight(w: u32) -> (u32, u32, u32) {
    let e = if w % 4 == 2 { 1 } else { 0 };
    let r = (w - 6 * e) % 12;
    let d = r / 4;
    (((w - 6 * e - 4 * d) / 12), d, e)
}

/// Supersingular j-invariants of F_p that lie in F_p, found by point counting
/// (#E(F_p) = p + 1) for p ≥ 5, and {0} for p ∈ {2, 3}.
pub fn supersingular_residues(p: u64) -> Vec<u64> {
    if p < 5 {
        return vec![0];
    }
    (0..p).filter(|&j| is_supersingular_residue(p, j)).collect()
}

pub fn is_supersingular_residue(p: u64, j: u64) -> bool {
    if p < 5 {
        return j.is_multiple_of(p);
    }
    let (a, b) = if j == 0 {
        (0, 1)
    } else if j == 1728 % p {
        (1, 0)
    } else {
        let inv = residue_mod_p(&rat(1, ((1728 % p + p - j) % p) as i64), p).expect("1728 − j is a unit");
        let k = j * inv % p;
        (3 * k % p, 2 * k % p)
    };
    let mut count = 1i64;
    for x in 0..p {
        let rhs = ((x * x % p) * x + a * x + b) % p;
        count += 1 + kronecker(rhs as i64, p as i64) as i64;
    }
    count == p as i64 + 1
}

/// Whether the rational j is p-integral with supersingular residue. Exact for
/// all p ≤ 23 (every supersingular j lies in F_p there).
pub fn has_supersingular_residue(p: u64, j: &Rat) -> bool {
    match residue_mod_p(j, p) {
        None => false,
        Some(r) => is_supersingular_residue(p, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small() {
        let b = bernoulli(12);
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[12], rat(-691, 2730));
        assert!(b[5].is_zero());
    }

    #[test]
    fn e4_head() {
        let e4 = eisenstein(4, 3).unwrap();
        assert_eq!(e4.coeff(0), int(1));
        assert_eq!(e4.coeff(1), int(240));
        assert_eq!(e4.coeff(2), int(2160));
        assert!(eisenstein(5, 3).is_err());
        assert!(eisenstein(2, 3).is_err());
    }

    #[test]
    fn delta_head_matches_ramanujan() {
        let d = delta_series(6);
        let tau = [1, -24, 252, -1472, 4830, -6048];
        for (i, t) in tau.iter().enumerate() {
            assert_eq!(d.coeff(i as i64 + 1), int(*t));
        }
    }

    #[test]
    fn j_head() {
        let j = j_series(3);
        assert_eq!(j.coeff(-1), int(1));
        assert_eq!(j.coeff(0), int(744));
        assert_eq!(j.coeff(1), int(196884));
        assert_eq!(j.coeff(2), int(21493760));
        assert_eq!(j.prec(), 4);
    }

    #[test]
    fn j_agrees_with_e6_route() {
        // j − 1728 = E₆²/Δ is an independent expansion.
        let n = 20;
        let e6 = eisenstein(6, n + 2).unwrap();
        let alt = &e6.pow(2) * &delta_series(n + 2).inverse().unwrap();
        let diff = &(&j_series(n) - &alt) - &QSeries::one(n as i64 + 1).scale(&int(1728));
        assert_eq!(diff.valuation(), None);
    }

    #[test]
    fn g2_head() {
        let g = g2_series(4);
        assert_eq!(g.coeff(1), int(24));
        assert_eq!(g.coeff(2), int(24));
        assert_eq!(g.coeff(3), int(96));
    }

    #[test]
    fn identities_small_orders() {
        assert!(verify_identities(30).all_ok());
        assert!(verify_identities(2).all_ok());
    }

    #[test]
    fn weight_decomposition() {
        assert_eq!(decompose_weight(4), (0, 1, 0));
        assert_eq!(decompose_weight(6), (0, 0, 1));
        assert_eq!(decompose_weight(12), (1, 0, 0));
        assert_eq!(decompose_weight(22), (1, 1, 1));
        for w in (4..60).step_by(2) {
            let (m, d, e) = decompose_weight(w);
            assert_eq!(12 * m + 4 * d + 6 * e, w);
        }
    }

    #[test]
    fn small_prime_centers() {
        let c = |p| supersingular_data(p).unwrap().centers;
        assert_eq!(c(2), vec![Center { j: int(0), delta: 12 }]);
        assert_eq!(c(3), vec![Center { j: int(1728), delta: 6 }]);
        assert_eq!(c(5), vec![Center { j: int(0), delta: 3 }]);
        assert_eq!(c(7), vec![Center { j: int(1728), delta: 2 }]);
        assert_eq!(c(13)[0].j, rat(432000, 691));
        assert_eq!(supersingular_data(13).unwrap().p_coeffs[0], rat(-432000, 691));
        assert!(matches!(supersingular_data(29), Err(Error::Unsupported(_))));
        assert!(supersingular_data(9).is_err());
    }

    #[test]
    fn centers_reduce_to_supersingular_residues() {
        for p in [5u64, 7, 11, 13, 17, 19, 23] {
            let data = supersingular_data(p).unwrap();
            let mut residues: Vec<u64> = data.centers.iter().map(|c| residue_mod_p(&c.j, p).unwrap()).collect();
            residues.sort();
            let before = residues.len();
            residues.dedup();
            assert_eq!(residues.len(), before, "p={p}: reduction not squarefree");
            assert_eq!(residues, supersingular_residues(p), "p={p}");
        }
    }

    #[test]
    fn dump_roundtrip() {
        let j = j_series(5);
        let text = j.dump();
        assert!(text.starts_with("-1 1/1\n0 744/1\n1 196884/1\n"));
        assert_eq!(QSeries::parse_dump(&text).unwrap(), j);
        assert!(QSeries::parse_dump("0 1\n2 3\n").is_err());
    }
}
