//! Sparse Laurent polynomials in `x` with exact rational coefficients.
//!
//! These are the per-`t`-order coefficients of the truncated series ring.
//! No zero coefficient is ever stored. Window clipping (dropping degrees
//! outside `[-Dx, Dx]`) is the responsibility of the series layer; the
//! polynomial itself is an ordinary sparse map from degree to coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::number::{format_rat, Rat};

/// Laurent polynomial `sum c_d x^d` with integer (possibly negative) degrees.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(degree: i64, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(degree, c);
        }
        Self { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (d, c) in iter {
            p.add_term(d, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, degree: i64) -> Rat {
        self.terms.get(&degree).cloned().unwrap_or_else(Rat::zero)
    }

    /// Lowest stored degree, `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.terms.iter().map(|(&d, c)| (d, c))
    }

    pub fn add_term(&mut self, degree: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(degree) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in other.iter() {
            out.add_term(d, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in other.iter() {
            out.add_term(d, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&d, c)| (d, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&d, v)| (d, v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Full product; the caller clips to a window if one applies.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (da, ca) in self.iter() {
            for (db, cb) in other.iter() {
                out.add_term(da + db, ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Product with every output degree outside `[lo, hi]` discarded.
    pub fn mul_clipped(&self, other: &Self, lo: i64, hi: i64) -> Self {
        let mut out = Self::zero();
        for (da, ca) in self.iter() {
            for (db, cb) in other.iter() {
                let d = da + db;
                if d >= lo && d <= hi {
                    out.add_term(d, ca.clone() * cb.clone());
                }
            }
        }
        out
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&d, c)| (d + k, c.clone())).collect(),
        }
    }

    /// Drop degrees outside `[lo, hi]`; returns the clipped polynomial and
    /// whether anything nonzero was dropped below/above.
    pub fn clip(&self, lo: i64, hi: i64) -> (Self, bool, bool) {
        let mut dropped_lo = false;
        let mut dropped_hi = false;
        let mut terms = BTreeMap::new();
        for (&d, c) in &self.terms {
            if d < lo {
                dropped_lo = true;
            } else if d > hi {
                dropped_hi = true;
            } else {
                terms.insert(d, c.clone());
            }
        }
        (Self { terms }, dropped_lo, dropped_hi)
    }

    /// Keep only degrees for which `pred` holds.
    pub fn filter<F: Fn(i64) -> bool>(&self, pred: F) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&d, _)| pred(d))
                .map(|(&d, c)| (d, c.clone()))
                .collect(),
        }
    }

    /// Degreewise (Hadamard) product `sum f_i g_i x^i`.
    pub fn hadamard(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (&d, c) in &self.terms {
            if let Some(o) = other.terms.get(&d) {
                let p = c.clone() * o.clone();
                if !p.is_zero() {
                    terms.insert(d, p);
                }
            }
        }
        Self { terms }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if d == 0 {
                write!(f, "{}", format_rat(c))?;
            } else if d == 1 {
                write!(f, "{}·x", format_rat(c))?;
            } else {
                write!(f, "{}·x^{}", format_rat(c), d)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    #[test]
    fn zero_coefficients_never_stored() {
        let mut p = LaurentPoly::monomial(2, rat(3));
        p.add_term(2, rat(-3));
        assert!(p.is_zero());
        assert_eq!(LaurentPoly::monomial(5, rat(0)), LaurentPoly::zero());
    }

    #[test]
    fn mul_and_shift() {
        // (1 + x)(1 - x) = 1 - x^2
        let a = LaurentPoly::from_terms([(0, rat(1)), (1, rat(1))]);
        let b = LaurentPoly::from_terms([(0, rat(1)), (1, rat(-1))]);
        let p = a.mul(&b);
        assert_eq!(p, LaurentPoly::from_terms([(0, rat(1)), (2, rat(-1))]));
        assert_eq!(
            p.shift(-2),
            LaurentPoly::from_terms([(-2, rat(1)), (0, rat(-1))])
        );
    }

    #[test]
    fn hadamard_is_degreewise() {
        // (1 + 2x) * (3 + 5x) -> 3 + 10x
        let a = LaurentPoly::from_terms([(0, rat(1)), (1, rat(2))]);
        let b = LaurentPoly::from_terms([(0, rat(3)), (1, rat(5))]);
        assert_eq!(
            a.hadamard(&b),
            LaurentPoly::from_terms([(0, rat(3)), (1, rat(10))])
        );
        assert!(a.hadamard(&LaurentPoly::zero()).is_zero());
    }

    #[test]
    fn clip_reports_drops() {
        let p = LaurentPoly::from_terms([(-3, rat(1)), (0, rat(2)), (4, rat(1))]);
        let (q, lo, hi) = p.clip(-2, 2);
        assert_eq!(q, LaurentPoly::from_terms([(0, rat(2))]));
        assert!(lo && hi);
    }

    #[test]
    fn display_ascending() {
        let p = LaurentPoly::from_terms([(-1, rat(2)), (0, ratio_half()), (3, rat(-1))]);
        assert_eq!(p.to_string(), "2·x^-1 + 1/2 + -1·x^3");
    }

    fn ratio_half() -> Rat {
        crate::number::ratio(1, 2)
    }
}
