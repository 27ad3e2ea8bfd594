//! The canonical branch t of T_p for p ∈ {2, 3}.

pub mod branch;
pub mod mestre;
pub mod modpoly;
pub mod newton;

pub use branch::{
    frobenius_period, laurent_invert, orbit_classify, t_eval, t_series, tpm_degree_profile, CanonicalBranch,
    LaurentMap, OrbitClass, TEval,
};
pub use mestre::{mestre_maps, LaurentPoly, MestreMaps};
pub use modpoly::{phi_modular, ModularPolynomial};
pub use newton::{newton_kite_check, newton_polygon, root_valuations};

use crate::arith::{int, rat, Rat};
use crate::error::{Error, Result};

fn supported(p: u64) -> Result<()> {
    match p {
        2 | 3 => Ok(()),
        _ => Err(Error::Unsupported(format!("canonical branch is constructed for p = 2, 3 only, not {p}"))),
    }
}

/// 𝔧_p: 0 for p = 2, 1728 for p = 3.
pub fn center(p: u64) -> Result<Rat> {
    supported(p)?;
    Ok(if p == 2 { int(0) } else { int(1728) })
}

/// δ_p, so that v_p(j) = ord_p(j − 𝔧_p)/δ_p.
pub fn center_weight(p: u64) -> Result<u32> {
    supported(p)?;
    Ok(if p == 2 { 12 } else { 6 })
}

/// (b, ρ) with ord_p(A_n) ≥ b + ρn.
pub fn tail_bound_params(p: u64) -> Result<(Rat, Rat)> {
    supported(p)?;
    Ok(if p == 2 { (int(4), int(8)) } else { (rat(3, 2), rat(9, 2)) })
}

/// Lower bound b + ρn for ord_p(A_n).
pub fn tail_bound(p: u64, n: u64) -> Result<Rat> {
    let (b, rho) = tail_bound_params(p)?;
    Ok(b + rho * int(n as i64))
}

/// Largest center distance s = ord_p(j − 𝔧_p) with s/δ_p < p/(p+1).
pub fn max_evaluable_distance(p: u64) -> Result<u32> {
    supported(p)?;
    Ok(if p == 2 { 7 } else { 4 })
}
