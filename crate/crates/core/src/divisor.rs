//! Finite formal sums Σ m_P [P] with rational multiplicities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::Rat;

/// A divisor on an ordered point set. Zero multiplicities are never stored,
/// so two divisors are equal iff their maps are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Divisor<P: Ord> {
    terms: BTreeMap<P, Rat>,
}

impl<P: Ord> Default for Divisor<P> {
    fn default() -> Self {
        Divisor { terms: BTreeMap::new() }
    }
}

impl<P: Ord + Clone> Divisor<P> {
    pub fn new() -> Self {
        Self::default()
    }

    /// The divisor m·[p].
    pub fn point(p: P, m: Rat) -> Self {
        let mut d = Self::new();
        d.add_point(p, m);
        d
    }

    pub fn add_point(&mut self, p: P, m: Rat) {
        if m.is_zero() {
            return;
        }
        let entry = self.terms.entry(p.clone()).or_insert_with(Rat::zero);
        *entry += m;
        if entry.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn multiplicity(&self, p: &P) -> Rat {
        self.terms.get(p).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn degree(&self) -> Rat {
        self.terms.values().sum()
    }

    pub fn support(&self) -> BTreeSet<P> {
        self.terms.keys().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|m| !m.is_negative())
    }

    /// Terms in ascending point order.
    pub fn iter(&self) -> std::collections::btree_map::Iter<'_, P, Rat> {
        self.terms.iter()
    }

    pub fn restrict(&self, keep: impl Fn(&P) -> bool) -> Self {
        Divisor {
            terms: self.terms.iter().filter(|(p, _)| keep(p)).map(|(p, m)| (p.clone(), m.clone())).collect(),
        }
    }

    pub fn pushforward<Q: Ord + Clone>(&self, f: impl Fn(&P) -> Q) -> Divisor<Q> {
        let mut out = Divisor::new();
        for (p, m) in &self.terms {
            out.add_point(f(p), m.clone());
        }
        out
    }

    /// Linear extension of a correspondence P → Div(Q).
    pub fn apply<Q: Ord + Clone>(&self, f: impl Fn(&P) -> Divisor<Q>) -> Divisor<Q> {
        let mut out = Divisor::new();
        for (p, m) in &self.terms {
            out = axpy(m, &f(p), &out);
        }
        out
    }

    pub fn scale(&self, a: &Rat) -> Self {
        axpy(a, self, &Divisor::new())
    }

    /// Sorted list of `{point, multiplicity: {num, den}}`.
    pub fn to_json(&self) -> Value
    where
        P: Serialize,
    {
        Value::Array(
            self.terms
                .iter()
                .map(|(p, m)| {
                    json!({
                        "point": p,
                        "multiplicity": {"num": m.numer().to_string(), "den": m.denom().to_string()},
                    })
                })
                .collect(),
        )
    }
}

/// a·D1 + D2.
pub fn axpy<P: Ord + Clone>(a: &Rat, d1: &Divisor<P>, d2: &Divisor<P>) -> Divisor<P> {
    let mut out = d2.clone();
    if a.is_zero() {
        return out;
    }
    for (p, m) in &d1.terms {
        out.add_point(p.clone(), a * m);
    }
    out
}

impl<P: Ord + Clone> FromIterator<(P, Rat)> for Divisor<P> {
    fn from_iter<I: IntoIterator<Item = (P, Rat)>>(iter: I) -> Self {
        let mut d = Divisor::new();
        for (p, m) in iter {
            d.add_point(p, m);
        }
        d
    }
}

impl<P: Ord + fmt::Display> fmt::Display for Divisor<P> {
    /// `p:m, q:n` in point order; an empty divisor prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}:{m}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn xy() -> Divisor<char> {
        [('x', int(1)), ('y', int(2))].into_iter().collect()
    }

    #[test]
    fn degree_support_restrict() {
        let d = xy();
        assert_eq!(d.degree(), int(3));
        assert_eq!(d.restrict(|p| *p == 'y'), Divisor::point('y', int(2)));
        assert_eq!(Divisor::<char>::new().degree(), int(0));
        assert_eq!(d.support().len(), 2);
    }

    #[test]
    fn pushforward_merges() {
        let d = xy();
        assert_eq!(d.pushforward(|_| 0u8), Divisor::point(0u8, int(3)));
        assert_eq!(d.pushforward(|c| c.to_ascii_uppercase()).len(), 2);
    }

    #[test]
    fn axpy_cases() {
        let d = xy();
        assert!(axpy(&int(-1), &d, &d).is_empty());
        let x = Divisor::point('x', int(1));
        assert_eq!(axpy(&int(2), &x, &x), Divisor::point('x', int(3)));
        assert_eq!(axpy(&rat(1, 2), &x, &Divisor::new()), Divisor::point('x', rat(1, 2)));
    }

    #[test]
    fn json_is_sorted() {
        let d: Divisor<i32> = [(5, rat(1, 2)), (-1, int(3))].into_iter().collect();
        let s = d.to_json().to_string();
        assert_eq!(
            s,
            r#"[{"multiplicity":{"den":"1","num":"3"},"point":-1},{"multiplicity":{"den":"2","num":"1"},"point":5}]"#
        );
    }

    #[test]
    fn effectivity() {
        let mut d = xy();
        assert!(d.is_effective());
        d.add_point('z', int(-1));
        assert!(!d.is_effective());
        assert_eq!(d.to_string(), "x:1, y:2, z:-1");
    }
}
