//! Mestre's parametrization of X_0(p) for p = 2, 3 as Laurent polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::arith::{int, pow_rat, Rat};
use crate::error::{Error, Result};

/// Finite Σ c_e z^e with e ∈ Z.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut p = LaurentPoly::default();
        for &(e, c) in terms {
            p.add_term(e, int(c));
        }
        p
    }

    pub fn monomial(e: i64, c: Rat) -> Self {
        let mut p = LaurentPoly::default();
        p.add_term(e, c);
        p
    }

    pub fn add_term(&mut self, e: i64, c: Rat) {
        let entry = self.terms.entry(e).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> Rat {
        self.terms.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = LaurentPoly::monomial(0, int(1));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// f(c·z^{−1}).
    pub fn compose_inversion(&self, c: &Rat) -> Self {
        let mut out = LaurentPoly::default();
        for (e, x) in &self.terms {
            out.add_term(-e, x * pow_rat(c, *e));
        }
        out
    }

    pub fn eval(&self, z: &Rat) -> Rat {
        self.terms.iter().map(|(e, c)| c * pow_rat(z, *e)).sum()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(e, c)| format!("({c})z^{e}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// α̂_p, the Fricke constant c (ŵ_p(z) = c/z), and β̂_p = α̂_p ∘ ŵ_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MestreMaps {
    pub p: u64,
    pub alpha: LaurentPoly,
    pub fricke: Rat,
    pub beta: LaurentPoly,
}

impl MestreMaps {
    /// β̂_p as printed, compared against α̂_p(ŵ_p(z)).
    pub fn composition_holds(&self) -> bool {
        self.alpha.compose_inversion(&self.fricke) == self.beta
    }
}

fn linear(c: i64) -> LaurentPoly {
    LaurentPoly::from_terms(&[(1, 1), (0, c)])
}

pub fn mestre_maps(p: u64) -> Result<MestreMaps> {
    let inv_z = LaurentPoly::from_terms(&[(-1, 1)]);
    match p {
        2 => Ok(MestreMaps {
            p,
            alpha: linear(16).pow(3).mul(&inv_z),
            fricke: int(4096),
            beta: linear(256).pow(3).mul(&inv_z.pow(2)),
        }),
        3 => Ok(MestreMaps {
            p,
            alpha: linear(27).mul(&linear(3).pow(3)).mul(&inv_z),
            fricke: int(729),
            beta: linear(27).mul(&linear(243).pow(3)).mul(&inv_z.pow(3)),
        }),
        _ => Err(Error::Unsupported(format!("Mestre maps are tabulated for p = 2, 3 only, not {p}"))),
    }
}
