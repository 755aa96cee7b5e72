//! Exact Laurent polynomials in `(x, y, t)` with finite support.
//!
//! These carry the step generators `S(x,y)`, the kernels `K(x,y) = 1 - tS`,
//! the denominator-cleared coefficients of the functional equation, and the
//! symbolic side of orbit elimination. No truncation ever happens here; the
//! windowed series ring only enters when `y` is substituted by a kernel root.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::laurent::LaurentPoly;
use crate::number::{format_rat, Rat};
use crate::series::TSeries;
use crate::{Error, Result};

/// Finite-support Laurent polynomial in `x`, `y`, `t`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivarLaurent {
    terms: BTreeMap<(i64, i64, i64), Rat>,
}

impl BivarLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 0, Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(0, 0, 0, c)
    }

    pub fn var_x() -> Self {
        Self::monomial(1, 0, 0, Rat::one())
    }

    pub fn var_y() -> Self {
        Self::monomial(0, 1, 0, Rat::one())
    }

    pub fn var_t() -> Self {
        Self::monomial(0, 0, 1, Rat::one())
    }

    pub fn monomial(dx: i64, dy: i64, dt: i64, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((dx, dy, dt), c);
        }
        Self { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, i64, i64), Rat)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in iter {
            p.add_term(k.0, k.1, k.2, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, dx: i64, dy: i64, dt: i64) -> Rat {
        self.terms
            .get(&(dx, dy, dt))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64, i64), &Rat)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, dx: i64, dy: i64, dt: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((dx, dy, dt)) {
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
        for ((dx, dy, dt), c) in other.iter() {
            out.add_term(dx, dy, dt, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
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
                .map(|(&k, v)| (k, v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((ax, ay, at), ca) in self.iter() {
            for ((bx, by, bt), cb) in other.iter() {
                out.add_term(ax + bx, ay + by, at + bt, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn mul_monomial(&self, dx: i64, dy: i64, dt: i64, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(ax, ay, at), v)| ((ax + dx, ay + dy, at + dt), v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn x_range(&self) -> Option<(i64, i64)> {
        range_of(self.terms.keys().map(|k| k.0))
    }

    pub fn y_range(&self) -> Option<(i64, i64)> {
        range_of(self.terms.keys().map(|k| k.1))
    }

    pub fn t_range(&self) -> Option<(i64, i64)> {
        range_of(self.terms.keys().map(|k| k.2))
    }

    /// Swap the roles of `x` and `y`.
    pub fn swap_xy(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(dx, dy, dt), c)| ((dy, dx, dt), c.clone()))
                .collect(),
        }
    }

    /// Decompose by y-degree: returns `(j, slice)` pairs with y-free slices.
    pub fn y_slices(&self) -> BTreeMap<i64, BivarLaurent> {
        let mut out: BTreeMap<i64, BivarLaurent> = BTreeMap::new();
        for ((dx, dy, dt), c) in self.iter() {
            out.entry(dy)
                .or_default()
                .add_term(dx, 0, dt, c.clone());
        }
        out
    }

    /// Divide all exponents' common monomial factor and the rational content
    /// out, leaving a primitive polynomial whose first term has coefficient 1.
    /// Returns the primitive part. Used to normalize eliminated equations.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let min_x = self.terms.keys().map(|k| k.0).min().unwrap();
        let min_y = self.terms.keys().map(|k| k.1).min().unwrap();
        let min_t = self.terms.keys().map(|k| k.2).min().unwrap();
        let lead = self.terms.values().next().unwrap().clone();
        self.mul_monomial(-min_x, -min_y, -min_t, &lead.recip())
    }

    /// Evaluate with `y -> arg` in the windowed series ring. The result is a
    /// series in `(x, t)`. Negative y-powers invert `arg`, so `arg` must be a
    /// unit there; positive t-valuation of `arg` is the composition-law
    /// precondition.
    pub fn eval_y(&self, arg: &TSeries) -> Result<TSeries> {
        let cap = arg.cap();
        let window = arg.window();
        if self.is_zero() {
            return Ok(TSeries::zero(cap, window));
        }
        let needs_y = self.y_range().map(|(lo, hi)| lo != 0 || hi != 0).unwrap_or(false);
        if needs_y && arg.val_t() < 1 {
            return Err(Error::InvalidSubstitution(format!(
                "substituted root has t-valuation {} < 1",
                arg.val_t()
            )));
        }
        let slices = self.y_slices();
        let inv = if slices.keys().any(|&j| j < 0) {
            Some(arg.invert()?)
        } else {
            None
        };
        let mut acc = TSeries::zero(cap, window);
        // positive powers ascending, negative powers via the inverse
        let mut pow_cache: BTreeMap<i64, TSeries> = BTreeMap::new();
        pow_cache.insert(0, TSeries::one(cap, window));
        let get_pow = |j: i64, cache: &mut BTreeMap<i64, TSeries>| -> TSeries {
            if let Some(p) = cache.get(&j) {
                return p.clone();
            }
            let step = if j > 0 {
                arg.clone()
            } else {
                inv.clone().expect("inverse prepared")
            };
            let prev = if j > 0 { j - 1 } else { j + 1 };
            let prev_pow = if let Some(p) = cache.get(&prev) {
                p.clone()
            } else {
                // fill recursively toward zero
                let mut p = cache.get(&0).unwrap().clone();
                let dir = if prev >= 0 { 1 } else { -1 };
                let mut i = 0;
                while i != prev {
                    i += dir;
                    p = p.mul(if dir > 0 { arg } else { inv.as_ref().unwrap() });
                    cache.insert(i, p.clone());
                }
                p
            };
            let p = prev_pow.mul(&step);
            cache.insert(j, p.clone());
            p
        };
        for (j, slice) in &slices {
            let xt = slice.as_xt_series(cap, window);
            let term = if *j == 0 {
                xt
            } else {
                let p = get_pow(*j, &mut pow_cache);
                xt.mul(&p)
            };
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Interpret a y-free polynomial as a windowed series in `(x, t)`.
    /// Panics if any y-degree is present.
    pub fn as_xt_series(&self, cap: i64, window: i64) -> TSeries {
        let mut by_order: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for ((dx, dy, dt), c) in self.iter() {
            assert_eq!(dy, 0, "as_xt_series on a polynomial with y-degree {dy}");
            by_order.entry(dt).or_default().add_term(dx, c.clone());
        }
        TSeries::from_t_coeffs(by_order, cap, window)
    }

    /// Substitute `(x, y) -> (gx, gy)` where the images are fractions.
    pub fn compose_map(&self, gx: &Frac, gy: &Frac) -> Frac {
        let mut acc = Frac::zero();
        for ((dx, dy, dt), c) in self.iter() {
            let mut term = Frac::from_poly(BivarLaurent::monomial(0, 0, dt, c.clone()));
            term = term.mul(&gx.pow_i(dx));
            term = term.mul(&gy.pow_i(dy));
            acc = acc.add(&term);
        }
        acc
    }
}

fn range_of<I: Iterator<Item = i64>>(iter: I) -> Option<(i64, i64)> {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for v in iter {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

impl fmt::Display for BivarLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((dx, dy, dt), c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", format_rat(c))?;
            for (name, d) in [("x", dx), ("y", dy), ("t", dt)] {
                if d == 1 {
                    write!(f, "·{name}")?;
                } else if d != 0 {
                    write!(f, "·{name}^{d}")?;
                }
            }
        }
        Ok(())
    }
}

/// Fraction of two exact polynomials, without gcd reduction. Enough for
/// group-element algebra, where everything stays small.
#[derive(Debug, Clone)]
pub struct Frac {
    pub num: BivarLaurent,
    pub den: BivarLaurent,
}

impl Frac {
    pub fn zero() -> Self {
        Frac {
            num: BivarLaurent::zero(),
            den: BivarLaurent::one(),
        }
    }

    pub fn from_poly(p: BivarLaurent) -> Self {
        Frac {
            num: p,
            den: BivarLaurent::one(),
        }
    }

    pub fn new(num: BivarLaurent, den: BivarLaurent) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Frac { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Frac {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Frac {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.num.is_zero(), "reciprocal of zero");
        Frac {
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    pub fn pow_i(&self, e: i64) -> Self {
        let base = if e >= 0 { self.clone() } else { self.recip() };
        let mut acc = Frac::from_poly(BivarLaurent::one());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Equality as rational functions, by cross-multiplication.
    pub fn eq_frac(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Normalize the representation so equal fractions hash/display alike:
    /// divide both parts by the denominator's leading monomial and content.
    pub fn normalized(&self) -> Self {
        if self.num.is_zero() {
            return Frac::zero();
        }
        let d = self.den.primitive_part();
        // primitive_part scaled by (lead, monomial); apply the same scaling to num
        let min_x = self.den.iter().map(|(k, _)| k.0).min().unwrap();
        let min_y = self.den.iter().map(|(k, _)| k.1).min().unwrap();
        let min_t = self.den.iter().map(|(k, _)| k.2).min().unwrap();
        let lead = self.den.iter().next().map(|(_, c)| c.clone()).unwrap();
        let n = self
            .num
            .mul_monomial(-min_x, -min_y, -min_t, &lead.recip());
        Frac { num: n, den: d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    #[test]
    fn polynomial_ring_ops() {
        let x = BivarLaurent::var_x();
        let y = BivarLaurent::var_y();
        let p = x.add(&y); // x + y
        let q = x.sub(&y); // x - y
        let prod = p.mul(&q);
        assert_eq!(prod.coeff(2, 0, 0), rat(1));
        assert_eq!(prod.coeff(0, 2, 0), rat(-1));
        assert_eq!(prod.coeff(1, 1, 0), rat(0));
    }

    #[test]
    fn y_slices_split() {
        // S = x + 1/x + y + 1/y
        let s = BivarLaurent::from_terms([
            ((1, 0, 0), rat(1)),
            ((-1, 0, 0), rat(1)),
            ((0, 1, 0), rat(1)),
            ((0, -1, 0), rat(1)),
        ]);
        let slices = s.y_slices();
        assert_eq!(slices.len(), 3);
        assert_eq!(slices[&0].coeff(1, 0, 0), rat(1));
        assert_eq!(slices[&1], BivarLaurent::one());
    }

    #[test]
    fn eval_y_at_kernel_root_prefix() {
        // y evaluated at t + (x + 1/x) t² returns the argument
        let arg = TSeries::from_t_coeffs(
            [
                (1, LaurentPoly::constant(rat(1))),
                (
                    2,
                    LaurentPoly::from_terms([(-1, rat(1)), (1, rat(1))]),
                ),
            ],
            4,
            4,
        );
        let y = BivarLaurent::var_y();
        let r = y.eval_y(&arg).unwrap();
        assert!(r.same_values(&arg));
        // 1/y picks up the inverse: leading term 1/t
        let inv = BivarLaurent::monomial(0, -1, 0, rat(1));
        let r = inv.eval_y(&arg).unwrap();
        assert_eq!(r.val_t(), -1);
        assert_eq!(r.coeff(-1, 0), rat(1));
        assert_eq!(
            r.coeff_t(0),
            LaurentPoly::from_terms([(-1, rat(-1)), (1, rat(-1))])
        );
    }

    #[test]
    fn eval_y_rejects_invalid_substitution() {
        let arg = TSeries::from_t_coeffs([(0, LaurentPoly::constant(rat(1)))], 4, 4);
        let inv = BivarLaurent::monomial(0, -1, 0, rat(1));
        assert!(matches!(
            inv.eval_y(&arg),
            Err(Error::InvalidSubstitution(_))
        ));
    }

    #[test]
    fn frac_algebra() {
        let x = BivarLaurent::var_x();
        let y = BivarLaurent::var_y();
        // (y/x) composed into x + y: y/x + y
        let gx = Frac::new(y.clone(), x.clone());
        let gy = Frac::from_poly(y.clone());
        let composed = x.add(&y).compose_map(&gx, &gy);
        let expected = Frac::new(y.mul(&BivarLaurent::one().add(&x)), x.clone());
        assert!(composed.eq_frac(&expected));
    }
}
