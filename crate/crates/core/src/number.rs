//! Arbitrary-precision rational coefficients.
//!
//! Every numeric coefficient in the engine is a `BigRational`: always stored
//! in lowest terms with a positive denominator, so arithmetic never rounds
//! and never overflows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational coefficient type.
pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parse a rational from `"p"` or `"p/q"` decimal strings.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let make_err = || Error::Parse(format!("invalid rational literal {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num.parse().map_err(|_| make_err())?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| make_err())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Render a rational as `"p"` or `"p/q"`, the exact inverse of [`parse_rat`].
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Binomial coefficient with the walk-counting convention: zero whenever the
/// lower index is negative or exceeds the upper index.
pub fn binomial(n: i64, k: i64) -> Rat {
    if k < 0 || k > n || n < 0 {
        return Rat::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rat::from_integer(acc)
}

/// Generalized binomial `C(1/2, m)`, the coefficients of `sqrt(1 + u)`.
pub fn binomial_half(m: u64) -> Rat {
    let mut acc = Rat::one();
    let half = ratio(1, 2);
    for i in 0..m {
        let factor = &half - rat(i as i64);
        acc = acc * factor / rat((i + 1) as i64);
    }
    acc
}

/// Exact square root of a rational, if it is a perfect square.
pub fn sqrt_exact(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}
