//! Classical modular polynomials Φ_2 and Φ_3, loaded from data files and
//! checked against q-expansions of j.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{big, Rat};
use crate::error::{Error, Result};
use crate::padic::PadicInt;
use crate::qexp::{j_series, Check, QSeries};

const PHI2: &str = include_str!("../../data/phi2.txt");
const PHI3: &str = include_str!("../../data/phi3.txt");

/// Default q-precision for the load-time check.
pub const DEFAULT_Q_PRECISION: usize = 60;

/// Φ_N(X, Y) = Σ c_{ij} X^i Y^j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularPolynomial {
    pub level: u64,
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl ModularPolynomial {
    /// Parses `i j c` lines with i ≥ j and fills in the symmetric half.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(level: u64, text: &str) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: {line:?}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad());
            }
            let i: u32 = fields[0].parse().map_err(|_| bad())?;
            let j: u32 = fields[1].parse().map_err(|_| bad())?;
            let c: BigInt = fields[2].parse().map_err(|_| bad())?;
            if i < j {
                return Err(bad());
            }
            if c.is_zero() {
                continue;
            }
            coeffs.insert((i, j), c.clone());
            coeffs.insert((j, i), c);
        }
        Ok(ModularPolynomial { level, coeffs })
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.coeffs.iter()
    }

    pub fn degree_y(&self) -> u32 {
        self.coeffs.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn degree_x(&self) -> u32 {
        self.coeffs.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(&(i, j), c)| self.coeff(j, i) == *c)
    }

    /// Monic of degree N+1 in each variable.
    pub fn is_monic(&self) -> bool {
        let n = self.level as u32 + 1;
        self.degree_x() == n && self.degree_y() == n && self.coeff(n, 0).is_one() && self.coeff(0, n).is_one()
    }

    /// Φ_N(j(q), j(q^N)) through q^m.
    pub fn verify_q_expansion(&self, m: usize) -> Check {
        let n = self.level as usize;
        let x = j_series(m + n * (n + 1));
        let y = QSeries::from_fn(-(n as i64), x.prec() * n as i64, |e| {
            if e % n as i64 == 0 {
                x.coeff(e / n as i64)
            } else {
                Rat::zero()
            }
        });
        let deg = self.level as u32 + 1;
        let xs: Vec<QSeries> = (0..=deg).map(|k| x.pow(k)).collect();
        let ys: Vec<QSeries> = (0..=deg).map(|k| y.pow(k)).collect();
        let mut total: Option<QSeries> = None;
        for (&(i, j), c) in &self.coeffs {
            let term = (&xs[i as usize] * &ys[j as usize]).scale(&big(c.clone()));
            total = Some(match total {
                None => term,
                Some(t) => &t + &term,
            });
        }
        let total = total.expect("nonzero polynomial").truncate(m as i64 + 1);
        assert!(total.prec() > m as i64, "internal q-precision too small");
        match total.valuation() {
            None => Check::Ok,
            Some(e) => Check::FailsAt(e),
        }
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        self.coeffs
            .iter()
            .map(|(&(i, j), c)| big(c.clone()) * num_traits::pow(x.clone(), i as usize) * num_traits::pow(y.clone(), j as usize))
            .sum()
    }

    pub fn eval_padic(&self, x: &PadicInt, y: &PadicInt) -> PadicInt {
        let p = x.p();
        let prec = x.prec().min(y.prec());
        let mut acc = PadicInt::from_i64(p, prec, 0);
        for (&(i, j), c) in &self.coeffs {
            let term = PadicInt::new(p, prec, c).mul(&x.pow(i)).mul(&y.pow(j));
            acc = acc.add(&term);
        }
        acc
    }

    /// Coefficients of Φ_N(x, Y + shift) as a polynomial in Y, lowest first.
    pub fn specialize(&self, x: &Rat, shift: &Rat) -> Vec<Rat> {
        let deg = self.degree_y() as usize;
        let mut in_y = vec![Rat::zero(); deg + 1];
        for (&(i, j), c) in &self.coeffs {
            in_y[j as usize] += big(c.clone()) * num_traits::pow(x.clone(), i as usize);
        }
        taylor_shift(&in_y, shift)
    }
}

/// Coefficients of P(Y + c) from those of P(Y).
pub fn taylor_shift(coeffs: &[Rat], c: &Rat) -> Vec<Rat> {
    let mut out = coeffs.to_vec();
    let n = out.len();
    // Repeated synthetic division by (Y − c) in reverse, i.e. Horner's shift.
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            let t = &out[k + 1] * c;
            out[k] += t;
        }
    }
    out
}

/// Φ_N for N ∈ {2, 3}, verified through q^60 on first load.
pub fn phi_modular(level: u64) -> Result<ModularPolynomial> {
    static PHI: [OnceLock<Result<ModularPolynomial>>; 2] = [OnceLock::new(), OnceLock::new()];
    match level {
        2 | 3 => PHI[level as usize - 2]
            .get_or_init(|| phi_modular_checked(level, DEFAULT_Q_PRECISION))
            .clone(),
        _ => phi_modular_checked(level, DEFAULT_Q_PRECISION),
    }
}

pub fn phi_modular_checked(level: u64, q_precision: usize) -> Result<ModularPolynomial> {
    let text = match level {
        2 => PHI2,
        3 => PHI3,
        _ => return Err(Error::Unsupported(format!("modular polynomial of level {level}"))),
    };
    let phi = ModularPolynomial::parse(level, text)?;
    if !phi.is_symmetric() || !phi.is_monic() {
        return Err(Error::Invariant(format!("Φ_{level} data is not symmetric and monic")));
    }
    match phi.verify_q_expansion(q_precision) {
        Check::Ok => Ok(phi),
        Check::FailsAt(e) => Err(Error::Invariant(format!("Φ_{level}(j(q), j(q^{level})) ≠ 0 at q^{e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn phi2_loads_and_verifies() {
        let phi = phi_modular(2).unwrap();
        assert_eq!(phi.coeff(0, 0), BigInt::from(-157464000000000i64));
        assert_eq!(phi.degree_y(), 3);
        assert!(phi.is_symmetric());
        assert_eq!(phi.coeff(1, 2), BigInt::from(1488));
    }

    #[test]
    fn phi3_loads_and_verifies() {
        let phi = phi_modular(3).unwrap();
        assert_eq!(phi.degree_y(), 4);
        assert_eq!(phi.coeff(0, 0), BigInt::zero());
    }

    #[test]
    fn corrupted_data_is_caught() {
        let text = PHI2.replace("1 1 40773375", "1 1 40773376");
        let phi = ModularPolynomial::parse(2, &text).unwrap();
        assert!(!phi.verify_q_expansion(20).is_ok());
        assert!(ModularPolynomial::parse(2, "0 1 5").is_err());
        assert!(ModularPolynomial::parse(2, "1 x 5").is_err());
        assert!(matches!(phi_modular(5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn cm_points_are_isogenous() {
        // T_2 of j(−7) contains j(−28) and j(−7) itself.
        let phi = phi_modular(2).unwrap();
        assert!(phi.eval(&int(-3375), &int(16581375)).is_zero());
        assert!(phi.eval(&int(-3375), &int(-3375)).is_zero());
    }

    #[test]
    fn shift() {
        // (Y+1)^2 = Y^2 + 2Y + 1
        let s = taylor_shift(&[int(0), int(0), int(1)], &int(1));
        assert_eq!(s, vec![int(1), int(2), int(1)]);
    }
}
