//! Hecke orbits at the level of valuations: Tate curves, window masses around
//! the Gauss point, and the CM-sequence and Hecke-orbit experiments.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{divisors, int, numdiv, ordp, parse_rat, rat, residue_mod_p, sigma1, Rat, Val};
use crate::cm::{class_number_formula, reduction_type};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kite::{cap, cm_sups_valuation, kite_top, tau_m_closed};
use crate::qexp::{has_supersingular_residue, supersingular_data};

/// Distance data of a supersingular point to its center 𝔧_e.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RadialData {
    /// ord_p(j − 𝔧_e) is known exactly.
    Exact(Val),
    /// Only ord_p(j − 𝔧_e) ≥ r is known.
    AtLeast(Rat),
}

impl fmt::Display for RadialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialData::Exact(v) => write!(f, "{v}"),
            RadialData::AtLeast(r) => write!(f, ">={r}"),
        }
    }
}

impl Serialize for RadialData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AnnularPoint {
    /// |j|_p = p^{−ord_j} > 1.
    Bad { ord_j: Rat },
    /// Integral j with ordinary reduction; the residue mod p if known.
    Ordinary { residue: Option<u64> },
    SupsAt { center: Rat, radial: RadialData },
}

impl AnnularPoint {
    pub fn bad(ord_j: Rat) -> Result<Self> {
        if !ord_j.is_negative() {
            return Err(Error::InvalidArgument(format!("bad point needs ord_j < 0, got {ord_j}")));
        }
        Ok(AnnularPoint::Bad { ord_j })
    }

    pub fn sups(center: Rat, radial: RadialData) -> Result<Self> {
        let positive = match &radial {
            RadialData::Exact(v) => *v > Val::zero(),
            RadialData::AtLeast(r) => r.is_positive(),
        };
        if !positive {
            return Err(Error::InvalidArgument(format!("radial {radial} must be > 0")));
        }
        Ok(AnnularPoint::SupsAt { center, radial })
    }
}

impl fmt::Display for AnnularPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnularPoint::Bad { ord_j } => write!(f, "bad({ord_j})"),
            AnnularPoint::Ordinary { residue: Some(r) } => write!(f, "ordinary({r})"),
            AnnularPoint::Ordinary { residue: None } => write!(f, "ordinary"),
            AnnularPoint::SupsAt { center, radial } => write!(f, "sups({center},{radial})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WindowKind {
    /// D(a, p^{−ρ}) = {ord_p(x − a) > ρ}.
    Inner,
    /// D^∞(0, p^ρ) = {ord_p(x) < −ρ}.
    Outer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassWindow {
    pub kind: WindowKind,
    pub center: Rat,
    pub rho: Rat,
}

impl MassWindow {
    pub fn inner(center: Rat, rho: Rat) -> Result<Self> {
        Self::checked(WindowKind::Inner, center, rho)
    }

    pub fn outer(rho: Rat) -> Result<Self> {
        Self::checked(WindowKind::Outer, Rat::zero(), rho)
    }

    fn checked(kind: WindowKind, center: Rat, rho: Rat) -> Result<Self> {
        if !rho.is_positive() {
            return Err(Error::InvalidArgument(format!("window exponent must be > 0, got {rho}")));
        }
        Ok(MassWindow { kind, center, rho })
    }
}

impl fmt::Display for MassWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WindowKind::Inner => write!(f, "inner({},{})", self.center, self.rho),
            WindowKind::Outer => write!(f, "outer({})", self.rho),
        }
    }
}

/// `inner:a:rho` or `outer:rho`.
impl FromStr for MassWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["inner", a, rho] => MassWindow::inner(parse_rat(a)?, parse_rat(rho)?),
            ["outer", rho] => MassWindow::outer(parse_rat(rho)?),
            _ => Err(Error::Parse(format!("window {s:?}: expected inner:a:rho or outer:rho"))),
        }
    }
}

impl Serialize for MassWindow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

// Membership of one point as (lower, upper) ∈ {0, 1}².
type Membership = (bool, bool);

const IN: Membership = (true, true);
const OUT: Membership = (false, false);
const UNKNOWN: Membership = (false, true);

/// ord(x − a) > ρ given only ord(x − a) ≥ r.
fn at_least(r: &Rat, rho: &Rat) -> Membership {
    if r > rho {
        IN
    } else {
        UNKNOWN
    }
}

fn exact(v: &Val, rho: &Rat) -> Membership {
    if *v > Val::Finite(rho.clone()) {
        IN
    } else {
        OUT
    }
}

fn membership(p: u64, x: &AnnularPoint, w: &MassWindow) -> Membership {
    let a = &w.center;
    let ord_a = ordp(a, p);
    match (x, w.kind) {
        (AnnularPoint::Bad { ord_j }, WindowKind::Outer) => {
            if *ord_j < -&w.rho {
                IN
            } else {
                OUT
            }
        }
        (_, WindowKind::Outer) => OUT,
        (AnnularPoint::Bad { ord_j }, WindowKind::Inner) => {
            if ord_a == Val::Finite(ord_j.clone()) {
                UNKNOWN
            } else {
                // ord(x − a) = min(ord_j, ord a) < 0 < ρ
                OUT
            }
        }
        (AnnularPoint::Ordinary { residue }, WindowKind::Inner) => {
            if ord_a < Val::zero() || has_supersingular_residue(p, a) {
                return OUT;
            }
            match residue {
                Some(r) if Some(*r) != residue_mod_p(a, p) => OUT,
                _ => UNKNOWN,
            }
        }
        (AnnularPoint::SupsAt { center, radial }, WindowKind::Inner) => {
            let da = ordp(&(a - center), p);
            match radial {
                RadialData::Exact(r) => {
                    if *r != da {
                        exact(r.min(&da), &w.rho)
                    } else {
                        // finite tie: ord(x − a) ≥ r
                        at_least(r.finite().expect("finite tie"), &w.rho)
                    }
                }
                RadialData::AtLeast(r) => match &da {
                    Val::Finite(d) if d < r => exact(&da, &w.rho),
                    _ => at_least(r, &w.rho),
                },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowMass {
    pub window: MassWindow,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub lower: Rat,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub upper: Rat,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub lower_fraction: Rat,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub upper_fraction: Rat,
}

impl WindowMass {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The fraction if exact.
    pub fn fraction(&self) -> Option<&Rat> {
        self.is_exact().then_some(&self.lower_fraction)
    }

    /// `a` when exact, `[a,b]` otherwise.
    pub fn fraction_label(&self) -> String {
        match self.fraction() {
            Some(f) => f.to_string(),
            None => format!("[{},{}]", self.lower_fraction, self.upper_fraction),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MassReport {
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub degree: Rat,
    pub windows: Vec<WindowMass>,
}

/// Window masses of an effective divisor. Fractions are relative to its degree.
pub fn gauss_mass_report(p: u64, points: &Divisor<AnnularPoint>, windows: &[MassWindow]) -> Result<MassReport> {
    if !points.is_effective() {
        return Err(Error::InvalidArgument("mass report needs an effective divisor".into()));
    }
    let degree = points.degree();
    let frac = |m: &Rat| if degree.is_zero() { Rat::zero() } else { m / &degree };
    let windows = windows
        .iter()
        .map(|w| {
            let mut lower = Rat::zero();
            let mut upper = Rat::zero();
            for (x, mult) in points.iter() {
                let (lo, hi) = membership(p, x, w);
                if lo {
                    lower += mult;
                }
                if hi {
                    upper += mult;
                }
            }
            WindowMass {
                window: w.clone(),
                lower_fraction: frac(&lower),
                upper_fraction: frac(&upper),
                lower,
                upper,
            }
        })
        .collect();
    Ok(MassReport { degree, windows })
}

/// Σ_{k|n} k·[(n/k²)·ordz] over ord_p(1/j) of T_n(Tate(z)), ord_p z = ordz.
pub fn tate_hecke_valuations(ordz: &Rat, n: u64) -> Result<Divisor<Val>> {
    if !ordz.is_positive() {
        return Err(Error::InvalidArgument(format!("ord z must be > 0, got {ordz}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let mut d = Divisor::new();
    for k in divisors(n) {
        let k2 = (k as i64).pow(2);
        d.add_point(Val::Finite(ordz * rat(n as i64, k2)), int(k as i64));
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TateMass {
    pub n: u64,
    pub mass: u64,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub fraction: Rat,
    /// √(ordz/ρ)·√n·d(n)
    pub bound: f64,
    /// mass < bound, decided exactly.
    pub within_bound: bool,
}

pub fn tate_mass_outside(ordz: &Rat, n: u64, rho: &Rat) -> Result<TateMass> {
    if !rho.is_positive() {
        return Err(Error::InvalidArgument(format!("rho must be > 0, got {rho}")));
    }
    let vals = tate_hecke_valuations(ordz, n)?;
    let rho_val = Val::Finite(rho.clone());
    let mass: Rat = vals.iter().filter(|(v, _)| **v > rho_val).map(|(_, m)| m.clone()).sum();
    let mass_int = mass.to_integer().to_u64().expect("nonnegative");
    let dn = numdiv(n)?;
    let c2 = ordz / rho;
    let within_bound = &mass * &mass < &c2 * int(n as i64) * int(dn as i64) * int(dn as i64);
    Ok(TateMass {
        n,
        mass: mass_int,
        fraction: mass / int(sigma1(n)? as i64),
        bound: c2.to_f64().unwrap_or(f64::NAN).sqrt() * (n as f64).sqrt() * dn as f64,
        within_bound,
    })
}

pub fn tate_sweep(ordz: &Rat, rho: &Rat, ns: &[u64], exec: Exec) -> Result<Vec<TateMass>> {
    exec.try_map(ns, |&n| tate_mass_outside(ordz, n, rho))
}

/// Vanishing and monotonicity of one window along an experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowVerdict {
    pub window: MassWindow,
    /// Upper fractions never increase.
    pub nonincreasing: bool,
    /// All fractions are exact and equal.
    pub constant: bool,
    /// First index from which every upper fraction is 0.
    pub vanishes_from: Option<usize>,
}

fn verdicts(windows: &[MassWindow], rows: &[&[WindowMass]]) -> Vec<WindowVerdict> {
    windows
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let col: Vec<&WindowMass> = rows.iter().map(|r| &r[i]).collect();
            let nonincreasing = col.windows(2).all(|pair| pair[1].upper_fraction <= pair[0].upper_fraction);
            let constant = col.iter().all(|m| m.is_exact()) && col.windows(2).all(|pair| pair[0].lower_fraction == pair[1].lower_fraction);
            let tail = col.iter().rev().take_while(|m| m.upper.is_zero()).count();
            let vanishes_from = (tail > 0).then_some(col.len() - tail);
            WindowVerdict {
                window: w.clone(),
                nonincreasing,
                constant,
                vanishes_from,
            }
        })
        .collect()
}

fn single_center(p: u64) -> Result<(Rat, u32)> {
    if p != 2 && p != 3 {
        return Err(Error::Unsupported(format!("exact window masses need a single supersingular center; p = {p}")));
    }
    let data = supersingular_data(p)?;
    let c = &data.centers[0];
    Ok((c.j.clone(), c.delta))
}

/// The point over a kite value y at the center 𝔧 of weight δ.
fn kite_to_annular(p: u64, center: &Rat, delta: u32, y: &Rat) -> AnnularPoint {
    let r = y * int(delta as i64);
    let radial = if *y >= kite_top(p) { RadialData::AtLeast(r) } else { RadialData::Exact(Val::Finite(r)) };
    AnnularPoint::SupsAt { center: center.clone(), radial }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CmRow {
    pub disc: i64,
    pub reduction: &'static str,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub supsn: Rat,
    pub h: u64,
    #[serde(serialize_with = "ser_opt_rat")]
    pub vhat: Option<Rat>,
    pub radial: Option<RadialData>,
    pub masses: Vec<WindowMass>,
}

fn ser_opt_rat<S: Serializer>(x: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CmExperiment {
    pub p: u64,
    pub windows: Vec<MassWindow>,
    pub rows: Vec<CmRow>,
    /// Taken along the supersingular discriminants, in input order.
    pub verdicts: Vec<WindowVerdict>,
}

fn cm_row(p: u64, center: &Rat, delta: u32, disc: i64, windows: &[MassWindow]) -> Result<CmRow> {
    let red = reduction_type(p, disc)?;
    let h = class_number_formula(disc)?;
    let (vhat, point) = if red.is_ordinary() {
        (None, AnnularPoint::Ordinary { residue: None })
    } else {
        let v = cm_sups_valuation(p, disc)?;
        let pt = kite_to_annular(p, center, delta, &v);
        (Some(v), pt)
    };
    let radial = match &point {
        AnnularPoint::SupsAt { radial, .. } => Some(radial.clone()),
        _ => None,
    };
    let report = gauss_mass_report(p, &Divisor::point(point, int(h as i64)), windows)?;
    Ok(CmRow {
        disc,
        reduction: red.label(),
        supsn: red.supsn(),
        h,
        vhat,
        radial,
        masses: report.windows,
    })
}

/// Λ_D sits at a single radius around 𝔧_p when D is supersingular, so each
/// window holds all of it or none of it.
pub fn cm_sequence_experiment(p: u64, discs: &[i64], windows: &[MassWindow], exec: Exec) -> Result<CmExperiment> {
    let (center, delta) = single_center(p)?;
    let rows = exec.try_map(discs, |&d| cm_row(p, &center, delta, d, windows))?;
    let sups: Vec<&[WindowMass]> = rows.iter().filter(|r| r.vhat.is_some()).map(|r| r.masses.as_slice()).collect();
    Ok(CmExperiment {
        p,
        windows: windows.to_vec(),
        verdicts: verdicts(windows, &sups),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRow {
    pub n: u64,
    pub m: u32,
    pub n0: u64,
    pub masses: Vec<WindowMass>,
    /// (m+1)·d(n0)/σ1(n), reported for ordinary starts.
    #[serde(serialize_with = "ser_opt_rat")]
    pub bound: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitExperiment {
    pub p: u64,
    pub start: String,
    pub windows: Vec<MassWindow>,
    pub rows: Vec<OrbitRow>,
    pub verdicts: Vec<WindowVerdict>,
}

fn split_p(p: u64, n: u64) -> (u32, u64) {
    let mut m = 0;
    let mut n0 = n;
    while n0.is_multiple_of(p) {
        n0 /= p;
        m += 1;
    }
    (m, n0)
}

fn start_vhat(p: u64, center: &Rat, delta: u32, start_center: &Rat, radial: &RadialData) -> Result<Rat> {
    if start_center != center {
        return Err(Error::InvalidArgument(format!("start center {start_center} is not 𝔧_{p} = {center}")));
    }
    let d = rat(1, delta as i64);
    match radial {
        RadialData::Exact(v) => Ok(cap(p, &v.scale(&d))),
        RadialData::AtLeast(r) if r * &d >= kite_top(p) => Ok(kite_top(p)),
        RadialData::AtLeast(r) => Err(Error::InvalidArgument(format!("radial >= {r} does not determine v̂"))),
    }
}

/// Window fractions of T_n(start) for each n.
pub fn hecke_orbit_experiment(
    p: u64,
    start: &AnnularPoint,
    ns: &[u64],
    windows: &[MassWindow],
    exec: Exec,
) -> Result<OrbitExperiment> {
    if ns.contains(&0) {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let rows: Vec<OrbitRow> = match start {
        AnnularPoint::SupsAt { center: c, radial } => {
            let (center, delta) = single_center(p)?;
            let v = start_vhat(p, &center, delta, c, radial)?;
            exec.try_map(ns, |&n| {
                let (m, n0) = split_p(p, n);
                // σ1(n0) cancels in the fractions.
                let kite = tau_m_closed(p, m, &v)?;
                let pts = kite.pushforward(|y| kite_to_annular(p, &center, delta, y.value()));
                Ok(OrbitRow {
                    n,
                    m,
                    n0,
                    masses: gauss_mass_report(p, &pts, windows)?.windows,
                    bound: None,
                })
            })?
        }
        AnnularPoint::Bad { ord_j } => {
            let ordz = -ord_j;
            exec.try_map(ns, |&n| {
                let (m, n0) = split_p(p, n);
                let pts = tate_hecke_valuations(&ordz, n)?.pushforward(|v| AnnularPoint::Bad {
                    ord_j: -v.finite().expect("finite").clone(),
                });
                Ok(OrbitRow {
                    n,
                    m,
                    n0,
                    masses: gauss_mass_report(p, &pts, windows)?.windows,
                    bound: None,
                })
            })?
        }
        AnnularPoint::Ordinary { .. } => {
            if !windows.is_empty() {
                return Err(Error::Unsupported("pointwise window masses for an ordinary start".into()));
            }
            exec.try_map(ns, |&n| {
                let (m, n0) = split_p(p, n);
                let bound = rat((m as i64 + 1) * numdiv(n0)? as i64, sigma1(n)? as i64);
                Ok(OrbitRow {
                    n,
                    m,
                    n0,
                    masses: Vec::new(),
                    bound: Some(bound),
                })
            })?
        }
    };
    let cols: Vec<&[WindowMass]> = rows.iter().map(|r| r.masses.as_slice()).collect();
    Ok(OrbitExperiment {
        p,
        start: start.to_string(),
        windows: windows.to_vec(),
        verdicts: verdicts(windows, &cols),
        rows,
    })
}

/// A supersingular start at 𝔧_p with v̂ = v.
pub fn sups_start(p: u64, v: &Rat) -> Result<AnnularPoint> {
    let (center, delta) = single_center(p)?;
    if !v.is_positive() || *v > kite_top(p) {
        return Err(Error::OutsideKite(v.to_string()));
    }
    Ok(kite_to_annular(p, &center, delta, v))
}

/// The annular point of a rational j.
pub fn classify_j(p: u64, j: &Rat) -> Result<AnnularPoint> {
    if let Val::Finite(o) = ordp(j, p) {
        if o.is_negative() {
            return Ok(AnnularPoint::Bad { ord_j: o });
        }
    }
    if !has_supersingular_residue(p, j) {
        return Ok(AnnularPoint::Ordinary { residue: residue_mod_p(j, p) });
    }
    let data = supersingular_data(p)?;
    for c in &data.centers {
        let r = ordp(&(j - &c.j), p);
        if r > Val::zero() {
            return Ok(AnnularPoint::SupsAt { center: c.j.clone(), radial: RadialData::Exact(r) });
        }
    }
    Err(Error::Unsupported(format!("supersingular residue of {j} has no rational center at {p}")))
}
