//! Newton polygons over Q_p and the comparison of root valuations of
//! Φ_p(j, Y + 𝔧_p) with the kite.

use crate::arith::{int, ordp, rat, Rat, Val};
use crate::canonical::modpoly::phi_modular;
use crate::canonical::{center, center_weight};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::kite::{cap, katz_valuation, tau1, KiteDivisor, KitePoint};

/// Slopes of the lower convex hull of {(i, v_i)}, with horizontal lengths.
/// Coefficients are listed lowest degree first; infinite entries (zero
/// coefficients) are skipped, and leading zeros at the bottom give no segment.
pub fn newton_polygon(coeffs: &[Val]) -> Result<Vec<(Rat, u32)>> {
    let pts: Vec<(i64, Rat)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.finite().map(|x| (i as i64, x.clone())))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidArgument("zero polynomial".into()));
    }
    if coeffs.last().is_none_or(|v| v.is_infinite()) {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    let mut out = Vec::new();
    let mut cur = 0;
    while cur + 1 < pts.len() {
        let (x0, y0) = &pts[cur];
        // Minimal slope; ties go to the farthest point.
        let mut best = cur + 1;
        let mut best_slope = slope(x0, y0, &pts[best]);
        for (k, pt) in pts.iter().enumerate().skip(cur + 2) {
            let s = slope(x0, y0, pt);
            if s <= best_slope {
                best = k;
                best_slope = s;
            }
        }
        out.push((best_slope, (pts[best].0 - x0) as u32));
        cur = best;
    }
    Ok(out)
}

fn slope(x0: &i64, y0: &Rat, pt: &(i64, Rat)) -> Rat {
    (&pt.1 - y0) / int(pt.0 - x0)
}

/// Root valuations with multiplicity; roots at 0 have valuation ∞.
pub fn root_valuations(coeffs: &[Val]) -> Result<Vec<(Val, u32)>> {
    let mut out = Vec::new();
    let zeros = coeffs.iter().take_while(|v| v.is_infinite()).count();
    let segs = newton_polygon(coeffs)?;
    if zeros > 0 {
        out.push((Val::Infinite, zeros as u32));
    }
    out.extend(segs.into_iter().map(|(s, m)| (Val::Finite(-s), m)));
    Ok(out)
}

pub fn valuations(coeffs: &[Rat], p: u64) -> Vec<Val> {
    coeffs.iter().map(|c| ordp(c, p)).collect()
}

/// Root valuations of Φ_p(j, Y + 𝔧_p), each divided by δ_p and capped at
/// p/(p+1), against τ_1(v̂_p(j)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonKiteReport {
    pub p: u64,
    pub j: Rat,
    pub roots: Vec<(Val, u32)>,
    pub from_newton: KiteDivisor,
    pub from_kite: KiteDivisor,
}

impl NewtonKiteReport {
    pub fn agree(&self) -> bool {
        self.from_newton == self.from_kite
    }
}

pub fn newton_kite_check(p: u64, j: &Rat) -> Result<NewtonKiteReport> {
    let phi = phi_modular(p)?;
    let c = center(p)?;
    let delta = rat(1, center_weight(p)? as i64);
    let v = cap(p, &katz_valuation(p, j)?);
    if ordp(&(j - &c), p) <= Val::zero() {
        return Err(Error::InvalidArgument(format!("{j} is not in the supersingular disc at {p}")));
    }
    let roots = root_valuations(&valuations(&phi.specialize(j, &c), p))?;
    let mut from_newton = Divisor::new();
    for (val, m) in &roots {
        from_newton.add_point(KitePoint(cap(p, &val.scale(&delta))), int(*m as i64));
    }
    Ok(NewtonKiteReport {
        p,
        j: j.clone(),
        roots,
        from_newton,
        from_kite: tau1(p, &v)?,
    })
}

/// Multiset of root valuations, expanded.
pub fn expand(roots: &[(Val, u32)]) -> Vec<Val> {
    let mut out: Vec<Val> = roots.iter().flat_map(|(v, m)| std::iter::repeat_n(v.clone(), *m as usize)).collect();
    out.sort();
    out
}
