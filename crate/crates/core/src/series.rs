//! Truncated bivariate series: Laurent in `t` up to a cap, with windowed
//! Laurent-polynomial coefficients in `x`.
//!
//! A [`TSeries`] models an element of `C((x))((t))` restricted to the box
//! `t`-order ≤ `cap` and `x`-degree in `[-window, +window]`. Ring operations
//! are exact inside the box; inversion, square root, log and exp of units are
//! computed by power sums whose window spill is controlled by internal
//! padding.
//!
//! Exactness bookkeeping: truncating an object with infinite `x`-support can
//! pollute coefficients near the window edges in later multiplications. Each
//! series therefore carries an [`Exactness`] record: margins describing how
//! far suspicion reaches in from each window edge, and cleanliness flags that
//! say whether the true object has any support beyond the stored window.
//! Coefficient extraction checks the certified inner window and fails loudly
//! instead of returning silently-truncated values.
//!
//! By convention the identically-zero series has `min_order = cap + 1`, so
//! valuation queries are total.

use std::fmt;

use num_traits::{One, Zero};

use crate::laurent::LaurentPoly;
use crate::number::{binomial_half, format_rat, rat, sqrt_exact, Rat};
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum number of result t-orders before a product is parallelized.
const PAR_MIN_ORDERS: i64 = 8;

/// Inactive-suspicion sentinel: margins with this level never activate.
const INACTIVE: i64 = i64::MIN / 4;

/// Certified-exactness metadata for a windowed series, graded by t-order.
///
/// Window truncation can only corrupt stored coefficients near the window
/// edges, and only as far as dropped terms can travel back in through
/// multiplications; that travel is paid for in t-orders. Both effects are
/// affine in the t-order `n`:
///
/// - the stored coefficient at `(n, d)` is certified exact unless
///   `d > window - margin_hi(n)` or `d < -window + margin_lo(n)`, where
///   `margin(n) = max(0, alpha + beta·n)`;
/// - the true (unwindowed) object's support at order `n` is certified to
///   lie inside `[floor_alpha - floor_beta·n, ceil_alpha + ceil_beta·n]`.
///
/// Slopes are stable under ring operations (they combine by `max`, not by
/// sum), which keeps the certified inner window useful through long chains
/// of inversions and exponentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exactness {
    pub lo_alpha: i64,
    pub lo_beta: i64,
    pub hi_alpha: i64,
    pub hi_beta: i64,
    pub floor_alpha: i64,
    pub floor_beta: i64,
    pub ceil_alpha: i64,
    pub ceil_beta: i64,
}

impl Exactness {
    /// Fully exact object supported inside `[floor, ceil]` at every order.
    pub fn exact_with_bounds(floor: i64, ceil: i64) -> Self {
        Exactness {
            lo_alpha: INACTIVE,
            lo_beta: 0,
            hi_alpha: INACTIVE,
            hi_beta: 0,
            floor_alpha: floor,
            floor_beta: 0,
            ceil_alpha: ceil,
            ceil_beta: 0,
        }
    }

    pub fn exact() -> Self {
        Self::exact_with_bounds(0, 0)
    }

    pub fn margin_lo_at(&self, n: i64) -> i64 {
        affine_margin(self.lo_alpha, self.lo_beta, n)
    }

    pub fn margin_hi_at(&self, n: i64) -> i64 {
        affine_margin(self.hi_alpha, self.hi_beta, n)
    }

    pub fn floor_at(&self, n: i64) -> i64 {
        self.floor_alpha.saturating_sub(self.floor_beta.saturating_mul(n.max(0)))
    }

    pub fn ceil_at(&self, n: i64) -> i64 {
        self.ceil_alpha.saturating_add(self.ceil_beta.saturating_mul(n.max(0)))
    }

    /// Worst-case (largest) margins over orders up to `cap`.
    fn worst_margins(&self, cap: i64) -> (i64, i64) {
        (self.margin_lo_at(cap.max(0)), self.margin_hi_at(cap.max(0)))
    }

    /// Pointwise majorant: valid for a sum of the two objects.
    fn join(self, other: Self) -> Self {
        Exactness {
            lo_alpha: self.lo_alpha.max(other.lo_alpha),
            lo_beta: self.lo_beta.max(other.lo_beta),
            hi_alpha: self.hi_alpha.max(other.hi_alpha),
            hi_beta: self.hi_beta.max(other.hi_beta),
            floor_alpha: self.floor_alpha.min(other.floor_alpha),
            floor_beta: self.floor_beta.max(other.floor_beta),
            ceil_alpha: self.ceil_alpha.max(other.ceil_alpha),
            ceil_beta: self.ceil_beta.max(other.ceil_beta),
        }
    }
}

fn affine_margin(alpha: i64, beta: i64, n: i64) -> i64 {
    if alpha <= INACTIVE / 2 {
        return 0;
    }
    (alpha.saturating_add(beta.saturating_mul(n.max(0)))).max(0)
}

/// Certified support bounds of raw coefficient data, before any clipping.
fn bounds_of_data<'a, I: Iterator<Item = (i64, &'a LaurentPoly)>>(iter: I) -> (i64, i64, i64, i64) {
    let (mut fa, mut fb, mut ca, mut cb) = (0i64, 0i64, 0i64, 0i64);
    for (n, p) in iter {
        if p.is_zero() {
            continue;
        }
        let lo = p.min_degree().unwrap();
        let hi = p.max_degree().unwrap();
        if n <= 0 {
            fa = fa.min(lo);
            ca = ca.max(hi);
        } else {
            // deg ≥ -fb·n and deg ≤ cb·n with integral slopes
            if lo < 0 {
                fb = fb.max((-lo + n - 1) / n);
            }
            if hi > 0 {
                cb = cb.max((hi + n - 1) / n);
            }
        }
    }
    (fa, fb, ca, cb)
}

/// Truncated Laurent series in `t` with windowed Laurent coefficients in `x`.
#[derive(Debug, Clone)]
pub struct TSeries {
    /// t-order of the first stored coefficient; `cap + 1` for the zero series.
    min_order: i64,
    /// Highest t-order known (inclusive).
    cap: i64,
    /// x-degrees are confined to `[-window, window]`.
    window: i64,
    /// Coefficient polynomials for orders `min_order ..= cap`.
    coeffs: Vec<LaurentPoly>,
    exact: Exactness,
}

impl TSeries {
    pub fn zero(cap: i64, window: i64) -> Self {
        TSeries {
            min_order: cap + 1,
            cap,
            window,
            coeffs: Vec::new(),
            exact: Exactness::exact(),
        }
    }

    pub fn constant(c: Rat, cap: i64, window: i64) -> Self {
        Self::monomial(0, 0, c, cap, window)
    }

    pub fn one(cap: i64, window: i64) -> Self {
        Self::constant(Rat::one(), cap, window)
    }

    /// `c · x^xdeg · t^torder`. The monomial must fit the window.
    pub fn monomial(xdeg: i64, torder: i64, c: Rat, cap: i64, window: i64) -> Self {
        assert!(xdeg.abs() <= window, "monomial degree outside window");
        if c.is_zero() || torder > cap {
            return Self::zero(cap, window);
        }
        let mut coeffs = vec![LaurentPoly::zero(); (cap - torder + 1) as usize];
        coeffs[0] = LaurentPoly::monomial(xdeg, c);
        TSeries {
            min_order: torder,
            cap,
            window,
            coeffs,
            exact: Exactness::exact_with_bounds(xdeg, xdeg),
        }
    }

    /// Build from `(t-order, coefficient)` pairs. Degrees outside the window
    /// are discarded and the clipped side is marked unclean.
    pub fn from_t_coeffs<I: IntoIterator<Item = (i64, LaurentPoly)>>(
        pairs: I,
        cap: i64,
        window: i64,
    ) -> Self {
        let mut items: Vec<(i64, LaurentPoly)> =
            pairs.into_iter().filter(|(n, p)| *n <= cap && !p.is_zero()).collect();
        if items.is_empty() {
            return Self::zero(cap, window);
        }
        items.sort_by_key(|(n, _)| *n);
        let min_order = items[0].0;
        let len = (cap - min_order + 1) as usize;
        let mut coeffs = vec![LaurentPoly::zero(); len];
        let (fa, fb, ca, cb) = bounds_of_data(items.iter().map(|(n, p)| (*n, p)));
        let mut exact = Exactness::exact();
        exact.floor_alpha = fa;
        exact.floor_beta = fb;
        exact.ceil_alpha = ca;
        exact.ceil_beta = cb;
        for (n, p) in items {
            let (clipped, _dlo, _dhi) = p.clip(-window, window);
            coeffs[(n - min_order) as usize] = coeffs[(n - min_order) as usize].add(&clipped);
        }
        let mut s = TSeries {
            min_order,
            cap,
            window,
            coeffs,
            exact,
        };
        s.normalize();
        s
    }

    pub fn cap(&self) -> i64 {
        self.cap
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn exactness(&self) -> Exactness {
        self.exact
    }

    /// Lower edge of the certified-exact x-degree window (worst t-order).
    pub fn exact_lo(&self) -> i64 {
        -self.window + self.exact.margin_lo_at(self.cap)
    }

    /// Upper edge of the certified-exact x-degree window (worst t-order).
    pub fn exact_hi(&self) -> i64 {
        self.window - self.exact.margin_hi_at(self.cap)
    }

    /// Certified-exact degree range at one t-order.
    pub fn exact_range_at(&self, n: i64) -> (i64, i64) {
        (
            -self.window + self.exact.margin_lo_at(n),
            self.window - self.exact.margin_hi_at(n),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|p| p.is_zero())
    }

    /// t-valuation; `cap + 1` for the zero series so the query is total.
    pub fn val_t(&self) -> i64 {
        for (i, p) in self.coeffs.iter().enumerate() {
            if !p.is_zero() {
                return self.min_order + i as i64;
            }
        }
        self.cap + 1
    }

    /// Stored coefficient of `t^n` (zero for orders below the valuation).
    /// Panics if `n` exceeds the cap: that coefficient is unknown.
    pub fn coeff_t(&self, n: i64) -> LaurentPoly {
        assert!(n <= self.cap, "t-order {n} beyond cap {}", self.cap);
        if n < self.min_order {
            return LaurentPoly::zero();
        }
        self.coeffs[(n - self.min_order) as usize].clone()
    }

    /// Stored coefficient of `x^k t^n`, without exactness checking.
    pub fn coeff(&self, n: i64, k: i64) -> Rat {
        if n > self.cap || n < self.min_order {
            return Rat::zero();
        }
        self.coeffs[(n - self.min_order) as usize].coeff(k)
    }

    /// Coefficient of `x^k t^n`, verified against the exact inner window.
    pub fn coeff_checked(&self, n: i64, k: i64) -> Result<Rat> {
        self.check_degree_exact(k)?;
        if n > self.cap {
            return Err(Error::Internal(format!(
                "t-order {n} beyond cap {}",
                self.cap
            )));
        }
        Ok(self.coeff(n, k))
    }

    fn check_degree_exact(&self, k: i64) -> Result<()> {
        if k.abs() <= self.window {
            if k >= self.exact_lo() && k <= self.exact_hi() {
                return Ok(());
            }
        } else if (k > self.window
            && self.exact.ceil_at(self.cap) <= self.window
            && self.exact.margin_hi_at(self.cap) == 0)
            || (k < -self.window
                && self.exact.floor_at(self.cap) >= -self.window
                && self.exact.margin_lo_at(self.cap) == 0)
        {
            // beyond the window on a side with no true support: exactly zero
            return Ok(());
        }
        Err(Error::WindowExceeded {
            degree: k,
            lo: self.exact_lo(),
            hi: self.exact_hi(),
        })
    }

    /// The slice `[x^k] f` as an x-free series in `t`, checked for exactness.
    pub fn coeff_x(&self, k: i64) -> Result<TSeries> {
        self.check_degree_exact(k)?;
        let mut out = Vec::new();
        for (i, p) in self.coeffs.iter().enumerate() {
            let c = p.coeff(k);
            if !c.is_zero() {
                out.push((self.min_order + i as i64, LaurentPoly::constant(c)));
            }
        }
        Ok(TSeries::from_t_coeffs(out, self.cap, self.window))
    }

    fn normalize(&mut self) {
        let mut first = 0usize;
        while first < self.coeffs.len() && self.coeffs[first].is_zero() {
            first += 1;
        }
        if first == self.coeffs.len() {
            self.min_order = self.cap + 1;
            self.coeffs.clear();
        } else if first > 0 {
            self.coeffs.drain(..first);
            self.min_order += first as i64;
        }
    }

    /// Stored support bounds over all orders, `None` for the zero series.
    pub fn stored_span(&self) -> Option<(i64, i64)> {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for p in &self.coeffs {
            if let (Some(a), Some(b)) = (p.min_degree(), p.max_degree()) {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }

    /// Restrict to a lower cap. Knowledge of low orders is unaffected.
    pub fn truncate_t(&self, new_cap: i64) -> Self {
        if new_cap >= self.cap {
            return self.clone();
        }
        let mut s = self.clone();
        s.cap = new_cap;
        if s.min_order > new_cap {
            return Self::zero(new_cap, self.window);
        }
        s.coeffs.truncate((new_cap - s.min_order + 1) as usize);
        s.normalize();
        s
    }

    /// Restrict to a smaller window, re-anchoring the exactness margins.
    pub fn shrink_window(&self, new_window: i64) -> Self {
        if new_window >= self.window {
            return self.clone();
        }
        let shrink = self.window - new_window;
        let mut exact = self.exact;
        // suspicion depth is measured from the edge; the edge moved inward
        if exact.lo_alpha > INACTIVE / 2 {
            exact.lo_alpha -= shrink;
        }
        if exact.hi_alpha > INACTIVE / 2 {
            exact.hi_alpha -= shrink;
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for p in &self.coeffs {
            coeffs.push(p.clip(-new_window, new_window).0);
        }
        let mut s = TSeries {
            min_order: self.min_order,
            cap: self.cap,
            window: new_window,
            coeffs,
            exact,
        };
        s.normalize();
        s
    }

    /// Widen the window. The widened band stores zeros; that is exact
    /// wherever the certified support bound rules true terms out, and
    /// suspect (margin bumped) wherever it does not.
    fn widen_window(&self, new_window: i64) -> Self {
        if new_window <= self.window {
            return self.clone();
        }
        let grow = new_window - self.window;
        let mut exact = self.exact;
        let hidden_lo = exact.floor_at(self.cap) < -self.window
            || exact.margin_lo_at(self.cap) > 0;
        let hidden_hi = exact.ceil_at(self.cap) > self.window
            || exact.margin_hi_at(self.cap) > 0;
        if hidden_lo {
            exact.lo_alpha = exact.lo_alpha.max(0) + grow;
        }
        if hidden_hi {
            exact.hi_alpha = exact.hi_alpha.max(0) + grow;
        }
        TSeries {
            min_order: self.min_order,
            cap: self.cap,
            window: new_window,
            coeffs: self.coeffs.clone(),
            exact,
        }
    }

    /// Bring two operands to a shared cap and window (the smaller of each).
    fn align(&self, other: &Self) -> (Self, Self) {
        let cap = self.cap.min(other.cap);
        let window = self.window.min(other.window);
        let a = self.truncate_t(cap).shrink_window(window);
        let b = other.truncate_t(cap).shrink_window(window);
        (a, b)
    }

    pub fn neg(&self) -> Self {
        TSeries {
            min_order: self.min_order,
            cap: self.cap,
            window: self.window,
            coeffs: self.coeffs.iter().map(|p| p.neg()).collect(),
            exact: self.exact,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.cap, self.window);
        }
        TSeries {
            min_order: self.min_order,
            cap: self.cap,
            window: self.window,
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
            exact: self.exact,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        if a.is_zero() {
            let mut r = b;
            r.exact = r.exact.join(a.exact);
            return r;
        }
        if b.is_zero() {
            let mut r = a;
            r.exact = r.exact.join(b.exact);
            return r;
        }
        let min_order = a.min_order.min(b.min_order);
        let len = (a.cap - min_order + 1) as usize;
        let mut coeffs = vec![LaurentPoly::zero(); len];
        for (i, p) in a.coeffs.iter().enumerate() {
            coeffs[(a.min_order - min_order) as usize + i] = p.clone();
        }
        for (i, p) in b.coeffs.iter().enumerate() {
            let idx = (b.min_order - min_order) as usize + i;
            coeffs[idx] = coeffs[idx].add(p);
        }
        let mut s = TSeries {
            min_order,
            cap: a.cap,
            window: a.window,
            coeffs,
            exact: a.exact.join(b.exact),
        };
        s.normalize();
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        #[cfg(feature = "parallel")]
        {
            self.mul_impl(other, true)
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.mul_impl(other, false)
        }
    }

    /// Sequential product; the fallback used when the `parallel` feature is
    /// disabled, kept public so benchmarks can compare both code paths.
    pub fn mul_seq(&self, other: &Self) -> Self {
        self.mul_impl(other, false)
    }

    fn mul_impl(&self, other: &Self, parallel: bool) -> Self {
        let (a, b) = self.align(other);
        let window = a.window;
        if a.is_zero() || b.is_zero() {
            let mut z = Self::zero(a.cap.min(b.cap), window);
            z.exact = a.exact.join(b.exact);
            return z;
        }
        let va = a.val_t();
        let vb = b.val_t();
        let min_order = va + vb;
        let cap = (a.cap + vb).min(b.cap + va);
        if cap < min_order {
            return Self::zero(cap, window);
        }
        let exact = mul_exactness(&a, &b, window);
        let len = cap - min_order + 1;
        let compute = |o: i64| -> LaurentPoly {
            let mut acc = LaurentPoly::zero();
            for (i, pa) in a.coeffs.iter().enumerate() {
                let na = a.min_order + i as i64;
                let nb = o - na;
                if nb < b.min_order || nb > b.cap {
                    continue;
                }
                if pa.is_zero() {
                    continue;
                }
                let pb = &b.coeffs[(nb - b.min_order) as usize];
                if pb.is_zero() {
                    continue;
                }
                acc = acc.add(&pa.mul_clipped(pb, -window, window));
            }
            acc
        };
        let coeffs: Vec<LaurentPoly>;
        #[cfg(feature = "parallel")]
        {
            if parallel && len >= PAR_MIN_ORDERS {
                coeffs = (0..len)
                    .into_par_iter()
                    .map(|i| compute(min_order + i))
                    .collect();
            } else {
                coeffs = (0..len).map(|i| compute(min_order + i)).collect();
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = parallel;
            coeffs = (0..len).map(|i| compute(min_order + i)).collect();
        }
        let mut s = TSeries {
            min_order,
            cap,
            window,
            coeffs,
            exact,
        };
        s.normalize();
        s
    }

    /// Exact multiplication by `c · x^k · t^l`; the cap shifts with `l` and
    /// no t-order knowledge is lost (the monomial is exact at every order).
    pub fn mul_monomial(&self, xdeg: i64, torder: i64, c: &Rat) -> Self {
        let new_cap = self.cap + torder;
        if c.is_zero() || self.is_zero() {
            return Self::zero(new_cap, self.window);
        }
        let w = self.window;
        let mut exact = self.exact;
        // suspicion depth shifts against the monomial; support bounds shift
        // with it (the t-exponent does not change degree bookkeeping because
        // the true object's orders shift together with the stored ones)
        if exact.hi_alpha > INACTIVE / 2 {
            exact.hi_alpha -= xdeg;
        }
        if exact.lo_alpha > INACTIVE / 2 {
            exact.lo_alpha += xdeg;
        }
        exact.floor_alpha += xdeg;
        exact.ceil_alpha += xdeg;
        if torder != 0 {
            // re-anchor slope-graded quantities: order n of the result
            // corresponds to order n - torder of the operand
            exact.floor_alpha += exact.floor_beta.saturating_mul(torder);
            exact.ceil_alpha -= exact.ceil_beta.saturating_mul(torder);
            if exact.lo_alpha > INACTIVE / 2 {
                exact.lo_alpha -= exact.lo_beta.saturating_mul(torder);
            }
            if exact.hi_alpha > INACTIVE / 2 {
                exact.hi_alpha -= exact.hi_beta.saturating_mul(torder);
            }
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|p| p.shift(xdeg).clip(-w, w).0.scale(c))
            .collect();
        let mut s = TSeries {
            min_order: self.min_order + torder,
            cap: new_cap,
            window: w,
            coeffs,
            exact,
        };
        s.normalize();
        s
    }

    /// Multiply by `t^l` exactly: orders and cap both shift.
    pub fn shift_t(&self, l: i64) -> Self {
        let mut s = self.clone();
        s.min_order += l;
        s.cap += l;
        s
    }

    /// `1/f`. Requires the leading structure `b·x^k·t^l·(1 + r(x) + t·…)`
    /// with `r` of strictly positive x-valuation.
    pub fn invert(&self) -> Result<Self> {
        let (b, k, l, u) = self.split_unit(|msg| Error::NotAUnit(msg))?;
        let inv_unit = power_sum(&u, &mut |_m| None, SumKind::Invert)?;
        Ok(inv_unit.mul_monomial(-k, -l, &b.recip()))
    }

    /// Square root with the positive-leading-coefficient branch. Requires the
    /// leading monomial `b·x^{2m}·t^{2l}` with `b` a rational square.
    pub fn sqrt(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let (b, k, l, u) = self.split_unit(|msg| Error::NotASquare(msg))?;
        if k % 2 != 0 || l % 2 != 0 {
            return Err(Error::NotASquare(format!(
                "leading monomial x^{k}·t^{l} has odd exponents"
            )));
        }
        let sb = sqrt_exact(&b)
            .ok_or_else(|| Error::NotASquare(format!("leading coefficient {} is not a square", format_rat(&b))))?;
        let root_unit = power_sum(&u, &mut |m| Some(binomial_half(m)), SumKind::CustomAscending)?;
        Ok(root_unit.mul_monomial(k / 2, l / 2, &sb))
    }

    /// `log f` for `f` with leading monomial exactly 1 and ascending
    /// remainder; the result has zero constant term.
    pub fn log_unit(&self) -> Result<Self> {
        let (b, k, l, u) = self.split_unit(|msg| Error::NotNormalized(msg))?;
        if !b.is_one() || k != 0 || l != 0 {
            return Err(Error::NotNormalized(format!(
                "leading monomial {}·x^{k}·t^{l} is not 1; factor it out first",
                format_rat(&b)
            )));
        }
        power_sum(
            &u,
            &mut |m| {
                if m == 0 {
                    Some(Rat::zero())
                } else {
                    let sign = if m % 2 == 1 { 1 } else { -1 };
                    Some(rat(sign) / rat(m as i64))
                }
            },
            SumKind::CustomAscending,
        )
    }

    /// `exp g` for `g` with zero constant term whose t⁰ slice has uniformly
    /// positive or uniformly negative x-valuation (or is absent).
    pub fn exp_series(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::one(self.cap, self.window));
        }
        if !self.coeff(0, 0).is_zero() {
            return Err(Error::Divergent("nonzero constant term".into()));
        }
        let t0 = if self.min_order <= 0 && self.cap >= 0 {
            self.coeff_t(0)
        } else {
            LaurentPoly::zero()
        };
        let kind = if t0.is_zero() {
            SumKind::CustomPureT
        } else if t0.min_degree().unwrap() >= 1 {
            SumKind::CustomAscending
        } else if t0.max_degree().unwrap() <= -1 {
            SumKind::CustomDescending
        } else {
            return Err(Error::Divergent(
                "t⁰ slice mixes positive and negative x-degrees".into(),
            ));
        };
        if self.min_order < 0 {
            return Err(Error::Divergent("negative t-valuation".into()));
        }
        let mut fact = Rat::one();
        power_sum(
            self,
            &mut move |m| {
                if m > 1 {
                    fact = fact.clone() / rat(m as i64);
                } else if m == 1 {
                    fact = Rat::one();
                }
                Some(fact.clone())
            },
            kind,
        )
    }

    /// Factor off the leading monomial: returns `(b, k, l, u)` with
    /// `self = b·x^k·t^l·(1 + u)` and `u` checked to have an ascending
    /// (strictly positive x-valuation) t-leading slice.
    fn split_unit(&self, mk_err: impl Fn(String) -> Error) -> Result<(Rat, i64, i64, Self)> {
        if self.is_zero() {
            return Err(mk_err("zero series".into()));
        }
        let l = self.val_t();
        let lead = self.coeff_t(l);
        let k = lead.min_degree().expect("nonzero leading poly");
        let b = lead.coeff(k);
        let unit = self.mul_monomial(-k, -l, &b.recip());
        let u = unit.sub(&TSeries::one(unit.cap, unit.window));
        if !u.is_zero() && u.val_t() == 0 {
            let r = u.coeff_t(0);
            if r.min_degree().unwrap() < 1 {
                return Err(mk_err(format!(
                    "t-leading coefficient is not of the form b·x^k·(1 + ascending): residue {r}"
                )));
            }
        }
        Ok((b, k, l, u))
    }

    /// Strictly positive x-degree part.
    pub fn x_pos(&self) -> Self {
        let mut ex = self.exact;
        ex.lo_alpha = INACTIVE;
        ex.lo_beta = 0;
        ex.floor_alpha = ex.floor_alpha.max(1);
        ex.floor_beta = 0;
        self.x_part(|d| d > 0, ex)
    }

    /// Strictly negative x-degree part.
    pub fn x_neg(&self) -> Self {
        let mut ex = self.exact;
        ex.hi_alpha = INACTIVE;
        ex.hi_beta = 0;
        ex.ceil_alpha = ex.ceil_alpha.min(-1);
        ex.ceil_beta = 0;
        self.x_part(|d| d < 0, ex)
    }

    /// x-degree-zero part.
    pub fn x_zero(&self) -> Self {
        let mut ex = self.exact;
        ex.lo_alpha = INACTIVE;
        ex.lo_beta = 0;
        ex.hi_alpha = INACTIVE;
        ex.hi_beta = 0;
        ex.floor_alpha = 0;
        ex.floor_beta = 0;
        ex.ceil_alpha = 0;
        ex.ceil_beta = 0;
        // the x⁰ column itself must be certified before it is trusted
        self.x_part(|d| d == 0, ex)
    }

    /// Non-negative x-degree part.
    pub fn x_geq(&self) -> Self {
        let mut ex = self.exact;
        ex.lo_alpha = INACTIVE;
        ex.lo_beta = 0;
        ex.floor_alpha = ex.floor_alpha.max(0);
        ex.floor_beta = 0;
        self.x_part(|d| d >= 0, ex)
    }

    fn x_part<F: Fn(i64) -> bool>(&self, pred: F, exact: Exactness) -> Self {
        let mut s = TSeries {
            min_order: self.min_order,
            cap: self.cap,
            window: self.window,
            coeffs: self.coeffs.iter().map(|p| p.filter(&pred)).collect(),
            exact,
        };
        s.normalize();
        s
    }

    /// Substitute `x -> arg` into a series with only non-negative x-degrees.
    /// Valid when `arg` either has t-valuation ≥ 1 or is a pure monomial.
    pub fn eval_at_x(&self, arg: &TSeries) -> Result<TSeries> {
        let span = self.stored_span();
        if let Some((lo, _)) = span {
            if lo < 0 {
                return Err(Error::InvalidSubstitution(
                    "eval_at_x requires non-negative x-degrees".into(),
                ));
            }
        }
        let is_monomial = arg.coeffs.iter().filter(|p| !p.is_zero()).count() == 1
            && arg
                .coeffs
                .iter()
                .find(|p| !p.is_zero())
                .map(|p| p.len() == 1)
                .unwrap_or(false);
        // composition is finite per coefficient when the argument gains
        // t-orders, or gains x-degrees (positive x-valuation), or is a
        // single monomial
        let x_adic = arg.exact.floor_alpha >= 1 && arg.exact.floor_beta == 0;
        if arg.val_t() < 1 && !is_monomial && !x_adic {
            return Err(Error::InvalidSubstitution(format!(
                "argument has t-valuation {} < 1, mixed x-degrees, and is not a monomial",
                arg.val_t()
            )));
        }
        let cap = self.cap.min(arg.cap);
        let window = self.window.min(arg.window);
        let hi = span.map(|(_, h)| h).unwrap_or(0);
        let mut acc = TSeries::zero(cap, window);
        let mut power = TSeries::one(cap, window);
        for k in 0..=hi {
            if k > 0 {
                power = power.mul(arg);
                if power.is_zero() {
                    break;
                }
            }
            let slice = self.coeff_x_unchecked_series(k);
            if !slice.is_zero() {
                acc = acc.add(&slice.mul(&power));
            }
        }
        // suspect slices of the composed series spread suspicion to every
        // output degree their argument powers can reach
        let suspect_hi =
            self.exact.margin_hi_at(cap) > 0 || self.exact.ceil_at(cap) > self.window;
        if suspect_hi {
            let start = (self.exact_hi().max(0) + 1).min(self.window + 1);
            let mut ex = acc.exactness();
            if arg.exact.floor_alpha >= 1 && arg.exact.floor_beta == 0 {
                // ascending argument: suspect slice k only touches degrees ≥ k
                ex.hi_alpha = ex.hi_alpha.max(window - start + 1);
            } else if arg.exact.ceil_alpha <= -1 && arg.exact.ceil_beta == 0 {
                ex.lo_alpha = ex.lo_alpha.max(window - start + 1);
            } else {
                // mixed-direction argument: no one-sided bound
                ex.lo_alpha = ex.lo_alpha.max(2 * window + 2);
                ex.hi_alpha = ex.hi_alpha.max(2 * window + 2);
            }
            acc.set_exactness(ex);
        }
        Ok(acc)
    }

    pub(crate) fn set_exactness(&mut self, ex: Exactness) {
        self.exact = ex;
    }

    fn coeff_x_unchecked_series(&self, k: i64) -> TSeries {
        let mut out = Vec::new();
        for (i, p) in self.coeffs.iter().enumerate() {
            let c = p.coeff(k);
            if !c.is_zero() {
                out.push((self.min_order + i as i64, LaurentPoly::constant(c)));
            }
        }
        TSeries::from_t_coeffs(out, self.cap, self.window)
    }

    /// Structural equality of the stored values (ignores exactness metadata).
    pub fn same_values(&self, other: &Self) -> bool {
        self.min_order == other.min_order
            && self.cap == other.cap
            && self.window == other.window
            && self.coeffs == other.coeffs
    }

    /// True when the two series agree coefficientwise on the shared box.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// True when every coefficient inside the certified-exact inner window
    /// vanishes. This is the right zero test for residuals of computations
    /// that involve window-clipped units: stored values in the suspect
    /// margins may be truncation junk and are ignored.
    pub fn is_zero_on_exact_window(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, p)| {
            let (lo, hi) = self.exact_range_at(self.min_order + i as i64);
            p.iter().all(|(d, _)| d < lo || d > hi)
        })
    }
}

impl PartialEq for TSeries {
    fn eq(&self, other: &Self) -> bool {
        self.same_values(other)
    }
}

fn mul_exactness(a: &TSeries, b: &TSeries, window: i64) -> Exactness {
    let cap = a.cap.min(b.cap);
    let ea = a.exact;
    let eb = b.exact;
    // suspicion of one factor (in-window margins, or true support beyond
    // the window) lands in the product shifted by the partner's certified
    // support bound; slopes combine by max, so chains stay affine
    let hi_source = |f: &Exactness, fw: i64, g: &Exactness| -> (i64, i64) {
        let hidden = f.ceil_at(cap) > fw;
        let active = f.margin_hi_at(cap) > 0 || hidden;
        if !active {
            return (INACTIVE, 0);
        }
        let level = if hidden { f.hi_alpha.max(0) } else { f.hi_alpha };
        (
            level.saturating_sub(g.floor_alpha),
            f.hi_beta.max(g.floor_beta),
        )
    };
    let lo_source = |f: &Exactness, fw: i64, g: &Exactness| -> (i64, i64) {
        let hidden = f.floor_at(cap) < -fw;
        let active = f.margin_lo_at(cap) > 0 || hidden;
        if !active {
            return (INACTIVE, 0);
        }
        let level = if hidden { f.lo_alpha.max(0) } else { f.lo_alpha };
        (
            level.saturating_add(g.ceil_alpha),
            f.lo_beta.max(g.ceil_beta),
        )
    };
    let (h1, h1b) = hi_source(&ea, a.window, &eb);
    let (h2, h2b) = hi_source(&eb, b.window, &ea);
    let (l1, l1b) = lo_source(&ea, a.window, &eb);
    let (l2, l2b) = lo_source(&eb, b.window, &ea);
    Exactness {
        lo_alpha: l1.max(l2),
        lo_beta: l1b.max(l2b),
        hi_alpha: h1.max(h2),
        hi_beta: h1b.max(h2b),
        floor_alpha: ea.floor_alpha.saturating_add(eb.floor_alpha),
        floor_beta: ea.floor_beta.max(eb.floor_beta),
        ceil_alpha: ea.ceil_alpha.saturating_add(eb.ceil_alpha),
        ceil_beta: ea.ceil_beta.max(eb.ceil_beta),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum SumKind {
    /// Geometric sum Σ (-u)^m for inversion; requires ascending u.
    Invert,
    /// Σ c_m u^m with ascending u (t⁰ slice has positive x-valuation).
    CustomAscending,
    /// Σ c_m u^m with descending u (t⁰ slice has negative x-valuation).
    CustomDescending,
    /// Σ c_m u^m with val_t(u) ≥ 1.
    CustomPureT,
}

/// Power sum engine for invert/sqrt/log/exp. The sum is evaluated at an
/// internally padded window so that every coefficient inside the caller's
/// window is exact; the padded spill is then clipped off and recorded in the
/// cleanliness flags.
///
/// Padding bound: every u-term with a negative x-degree (ascending case)
/// carries t-order ≥ 1, so across the whole sum the reach below the window is
/// at most `cap · S` where `S` is the worst degree-per-t-order slope. With
/// that much padding nothing real is ever dropped on the window side facing
/// the sum's drift, and dropped terms on the far side can never drift back in.
fn power_sum(
    u: &TSeries,
    coeff: &mut dyn FnMut(u64) -> Option<Rat>,
    kind: SumKind,
) -> Result<TSeries> {
    let cap = u.cap;
    let window = u.window;
    if u.is_zero() {
        // Σ c_m u^m collapses to c_0
        let c0 = match kind {
            SumKind::Invert => Rat::one(),
            _ => coeff(0).unwrap_or_else(Rat::zero),
        };
        return Ok(TSeries::constant(c0, cap, window));
    }
    // check the direction invariant on the t⁰ slice
    if u.val_t() == 0 {
        let t0 = u.coeff_t(0);
        match kind {
            SumKind::Invert | SumKind::CustomAscending => {
                if t0.min_degree().unwrap() < 1 {
                    return Err(Error::Internal(
                        "power_sum: ascending sum with non-ascending t⁰ slice".into(),
                    ));
                }
            }
            SumKind::CustomDescending => {
                if t0.max_degree().unwrap() > -1 {
                    return Err(Error::Internal(
                        "power_sum: descending sum with non-descending t⁰ slice".into(),
                    ));
                }
            }
            SumKind::CustomPureT => {
                return Err(Error::Internal(
                    "power_sum: pure-t sum with a t⁰ slice".into(),
                ));
            }
        }
    }
    // worst drift slope against the sum's natural direction
    let mut slope: i64 = 0;
    for (i, p) in u.coeffs.iter().enumerate() {
        let n = u.min_order + i as i64;
        if n < 1 {
            continue;
        }
        for (d, _) in p.iter() {
            let against = match kind {
                SumKind::Invert | SumKind::CustomAscending => (-d).max(0),
                SumKind::CustomDescending => d.max(0),
                SumKind::CustomPureT => d.abs(),
            };
            slope = slope.max((against + n - 1) / n);
        }
    }
    let pad = slope.saturating_mul(cap.max(0)).max(0) + 1;
    let work_window = window + pad;
    let u_wide = u.widen_window(work_window);
    let m_limit = (cap.max(0) + 2) * (slope + 2) + work_window + 8;

    let c0 = match kind {
        SumKind::Invert => Rat::one(),
        _ => coeff(0).unwrap_or_else(Rat::zero),
    };
    let mut acc = TSeries::constant(c0, cap, work_window);
    let mut power = TSeries::one(cap, work_window);
    let mut m: u64 = 0;
    loop {
        m += 1;
        if m as i64 > m_limit {
            return Err(Error::Internal(format!(
                "power sum failed to terminate within {m_limit} terms"
            )));
        }
        power = power.mul(&u_wide);
        if power.is_zero() {
            break;
        }
        let c = match kind {
            SumKind::Invert => {
                if m % 2 == 0 {
                    Rat::one()
                } else {
                    -Rat::one()
                }
            }
            _ => match coeff(m) {
                Some(c) => c,
                None => break,
            },
        };
        if !c.is_zero() {
            acc = acc.add(&power.scale(&c));
        }
    }
    Ok(acc.shrink_window(window))
}

impl fmt::Display for TSeries {
    /// Fixed debug rendering: terms ascending in `t` then `x`, each as
    /// `c·x^k·t^l` with zero exponents omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, p) in self.coeffs.iter().enumerate() {
            let n = self.min_order + i as i64;
            for (d, c) in p.iter() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "{}", format_rat(c))?;
                if d == 1 {
                    write!(f, "·x")?;
                } else if d != 0 {
                    write!(f, "·x^{d}")?;
                }
                if n == 1 {
                    write!(f, "·t")?;
                } else if n != 0 {
                    write!(f, "·t^{n}")?;
                }
            }
        }
        Ok(())
    }
}
