//! Canonical factorization `f = b·x^k·t^l·e^{F-}·e^{F0}·e^{F+}`, the
//! winding-number index `χ = -k`, Weierstrass small factors by t-adic Hensel
//! lifting, and the normalization that makes an eliminated orbit equation
//! splittable into positive / zero / negative x-degree rows.
//!
//! The factorization is computed combinatorially: strip the leading monomial
//! of the t-leading coefficient, take the log of the remaining unit, and
//! split the log by x-degree sign. Denominator roots are never computed as
//! algebraic numbers; Weierstrass preparation classifies them purely by
//! t-valuation, with the small factor collecting exactly the roots that
//! vanish at t = 0.

use num_traits::{One, Zero};

use crate::bivar::BivarLaurent;
use crate::kernel::{y_slices_of_steps, Model};
use crate::laurent::LaurentPoly;
use crate::number::{format_rat, Rat};
use crate::orbit::{OrbitEquation, UnknownTag};
use crate::series::TSeries;
use crate::{Error, Result};

/// The unique multiplicative splitting of a series into a monomial, a
/// negative-degree exponential, a degree-zero exponential, and a
/// positive-degree exponential.
#[derive(Debug, Clone)]
pub struct CanonicalFactors {
    pub b: Rat,
    pub k: i64,
    pub l: i64,
    pub f_minus: TSeries,
    pub f_zero: TSeries,
    pub f_plus: TSeries,
}

impl CanonicalFactors {
    /// Index `χ = -k`: additive under multiplication, `-m` for `x^m`.
    pub fn index(&self) -> i64 {
        -self.k
    }

    /// Multiply the four factors back together.
    pub fn reconstruct(&self) -> Result<TSeries> {
        let em = self.f_minus.exp_series()?;
        let e0 = self.f_zero.exp_series()?;
        let ep = self.f_plus.exp_series()?;
        Ok(em.mul(&e0).mul(&ep).mul_monomial(self.k, self.l, &self.b))
    }

    pub fn describe(&self) -> String {
        format!("b={}, k={}, l={}", format_rat(&self.b), self.k, self.l)
    }
}

/// Canonical factorization of a nonzero series whose t-leading coefficient
/// has the shape `b·x^k·(1 + ascending)`.
pub fn canonical_factorize(f: &TSeries) -> Result<CanonicalFactors> {
    if f.is_zero() {
        return Err(Error::NotNormalized("zero series".into()));
    }
    let l = f.val_t();
    let lead = f.coeff_t(l);
    let k = lead.min_degree().expect("nonzero leading coefficient");
    let b = lead.coeff(k);
    let unit = f.mul_monomial(-k, -l, &b.recip());
    let log = unit.log_unit()?;
    Ok(CanonicalFactors {
        b,
        k,
        l,
        f_minus: log.x_neg(),
        f_zero: log.x_zero(),
        f_plus: log.x_pos(),
    })
}

/// Index of a series: `χ = -k` with `k` the canonical monomial exponent.
pub fn index(f: &TSeries) -> Result<i64> {
    canonical_factorize(f).map(|c| c.index())
}

/// Polynomial in `x` whose coefficients are x-free truncated t-series.
#[derive(Debug, Clone)]
pub struct XPoly {
    coeffs: Vec<TSeries>,
    cap: i64,
}

impl XPoly {
    pub fn new(coeffs: Vec<TSeries>, cap: i64) -> Self {
        XPoly { coeffs, cap }
    }

    pub fn cap(&self) -> i64 {
        self.cap
    }

    /// Build from a y-free Laurent polynomial after shifting its lowest
    /// x-degree to zero and stripping its t-valuation and content; those
    /// trivial monomial factors carry no root information.
    pub fn from_bivar_stripped(p: &BivarLaurent, cap: i64) -> Result<XPoly> {
        if p.is_zero() {
            return Err(Error::DegenerateAtTZero);
        }
        if let Some((ylo, yhi)) = p.y_range() {
            if ylo != 0 || yhi != 0 {
                return Err(Error::Internal(
                    "XPoly from a polynomial with y-degrees".into(),
                ));
            }
        }
        let prim = p.primitive_part();
        let (_, xhi) = prim.x_range().expect("nonzero");
        let mut coeffs = vec![TSeries::zero(cap, 0); (xhi + 1) as usize];
        for ((dx, _, dt), c) in prim.iter() {
            if dt > cap {
                continue;
            }
            coeffs[dx as usize] =
                coeffs[dx as usize].add(&TSeries::monomial(0, dt, c.clone(), cap, 0));
        }
        Ok(XPoly { coeffs, cap })
    }

    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len();
        while d > 0 && self.coeffs[d - 1].is_zero() {
            d -= 1;
        }
        d.saturating_sub(1)
    }

    pub fn coeff(&self, j: usize) -> TSeries {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| TSeries::zero(self.cap, 0))
    }

    pub fn is_one(&self) -> bool {
        self.degree() == 0 && self.coeff(0).agrees_with(&TSeries::one(self.cap, 0))
    }

    pub fn mul(&self, other: &XPoly) -> XPoly {
        let cap = self.cap.min(other.cap);
        let n = self.coeffs.len() + other.coeffs.len();
        let mut out = vec![TSeries::zero(cap, 0); n.max(1) - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if !a.is_zero() && !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        XPoly { coeffs: out, cap }
    }

    pub fn sub(&self, other: &XPoly) -> XPoly {
        let cap = self.cap.min(other.cap);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.coeff(j).sub(&other.coeff(j)));
        }
        XPoly { coeffs: out, cap }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Render as a windowed series in `(x, t)`.
    pub fn as_series(&self, window: i64) -> TSeries {
        let mut acc = TSeries::zero(self.cap, window);
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let wide = TSeries::from_t_coeffs(
                    (c.val_t()..=c.cap()).map(|n| (n, c.coeff_t(n))),
                    self.cap,
                    window,
                );
                acc = acc.add(&wide.mul_monomial(j as i64, 0, &Rat::one()));
            }
        }
        acc
    }
}

/// Weierstrass preparation `P = small · unit`: `small` is monic of degree
/// `m` with `small(x, 0) = x^m`, so it carries exactly the roots of positive
/// t-valuation; `unit` is a unit at `(x, t) = (0, 0)`.
#[derive(Debug, Clone)]
pub struct WeierstrassFactor {
    pub small: XPoly,
    pub unit: XPoly,
    pub multiplicity: usize,
}

impl WeierstrassFactor {
    /// The single small root `X(t)` when the small factor is linear:
    /// `small = x - X`.
    pub fn single_root(&self) -> Option<TSeries> {
        if self.multiplicity == 1 {
            Some(self.small.coeff(0).neg())
        } else {
            None
        }
    }
}

/// t-adic Hensel lifting of the factorization `P(x,0) = x^m · u0(x)`,
/// one t-order at a time; exact arithmetic makes every step an identity.
pub fn weierstrass_factor(p: &XPoly, cap: i64) -> Result<WeierstrassFactor> {
    let deg = p.degree();
    let cap = cap.min(p.cap);
    let grid = |c: &TSeries, n: i64| -> Rat { c.coeff(n, 0) };
    let p0: Vec<Rat> = (0..=deg).map(|j| grid(&p.coeff(j), 0)).collect();
    let m = match p0.iter().position(|c| !c.is_zero()) {
        Some(m) => m,
        None => return Err(Error::DegenerateAtTZero),
    };
    if m == 0 {
        return Ok(WeierstrassFactor {
            small: XPoly::new(vec![TSeries::one(cap, 0)], cap),
            unit: p.clone(),
            multiplicity: 0,
        });
    }
    let u_deg = deg - m;
    // u0 = P(x,0) / x^m, invertible at x = 0
    let u0: Vec<Rat> = (0..=u_deg).map(|j| p0[j + m].clone()).collect();
    // power-series inverse of u0 modulo x^m
    let mut inv0 = vec![Rat::zero(); m];
    inv0[0] = u0[0].clone().recip();
    for j in 1..m {
        let mut s = Rat::zero();
        for i in 1..=j {
            if i <= u_deg {
                s += u0[i].clone() * inv0[j - i].clone();
            }
        }
        inv0[j] = -s * inv0[0].clone();
    }
    let poly_mul = |a: &[Rat], b: &[Rat]| -> Vec<Rat> {
        let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x.clone() * y.clone();
                }
            }
        }
        out
    };
    // s_layers[n] has degree < m; u_layers[n] has degree ≤ u_deg
    let mut s_layers: Vec<Vec<Rat>> = vec![vec![Rat::zero(); m]];
    let mut u_layers: Vec<Vec<Rat>> = vec![u0.clone()];
    for n in 1..=cap {
        // R_n = P_n - Σ_{0<i<n} S_i * U_{n-i}
        let mut r = vec![Rat::zero(); deg + 1];
        for (j, rj) in r.iter_mut().enumerate() {
            *rj = grid(&p.coeff(j), n);
        }
        for i in 1..n {
            let prod = poly_mul(&s_layers[i as usize], &u_layers[(n - i) as usize]);
            for (j, v) in prod.into_iter().enumerate() {
                if j <= deg {
                    r[j] -= v;
                }
            }
        }
        // S_n = (R_n · inv0) mod x^m
        let mut s_n = vec![Rat::zero(); m];
        for (j, sj) in s_n.iter_mut().enumerate() {
            let mut acc = Rat::zero();
            for (i, ri) in r.iter().enumerate().take(j + 1) {
                acc += ri.clone() * inv0[j - i].clone();
            }
            *sj = acc;
        }
        // U_n = (R_n - u0 * S_n) / x^m, exact by construction
        let correction = poly_mul(&u0, &s_n);
        let mut t_n = r.clone();
        for (j, v) in correction.into_iter().enumerate() {
            if j <= deg {
                t_n[j] -= v;
            }
        }
        for (j, v) in t_n.iter().take(m).enumerate() {
            if !v.is_zero() {
                return Err(Error::Internal(format!(
                    "Hensel step left residue at x^{j} t^{n}"
                )));
            }
        }
        let mut u_n = vec![Rat::zero(); u_deg + 1];
        for (j, un) in u_n.iter_mut().enumerate() {
            if j + m <= deg {
                *un = t_n[j + m].clone();
            }
        }
        s_layers.push(s_n);
        u_layers.push(u_n);
    }
    let assemble = |layers: &[Vec<Rat>], width: usize| -> Vec<TSeries> {
        (0..width)
            .map(|j| {
                TSeries::from_t_coeffs(
                    layers
                        .iter()
                        .enumerate()
                        .map(|(n, l)| (n as i64, LaurentPoly::constant(l[j].clone()))),
                    cap,
                    0,
                )
            })
            .collect()
    };
    let mut small_coeffs = assemble(&s_layers, m);
    small_coeffs.push(TSeries::one(cap, 0));
    let unit_coeffs = assemble(&u_layers, u_deg + 1);
    Ok(WeierstrassFactor {
        small: XPoly::new(small_coeffs, cap),
        unit: XPoly::new(unit_coeffs, cap),
        multiplicity: m,
    })
}

/// Product of a block over both kernel roots, cleared by the quadratic's
/// leading coefficient: the rational norm whose polynomial form is the
/// denominator factor contributed by that block.
pub fn kernel_norm(model: &Model, block: &BivarLaurent) -> Result<BivarLaurent> {
    // y·K(x,y) = a·y² + b·y + c with a = -t·A1, b = 1 - t·A0, c = -t·A_{-1}
    let sl = y_slices_of_steps(model);
    let lift = |p: &LaurentPoly| -> BivarLaurent {
        let mut out = BivarLaurent::zero();
        for (d, c) in p.iter() {
            out.add_term(d, 0, 1, -c.clone());
        }
        out
    };
    let a_hat = lift(&sl.a_1);
    let b_hat = BivarLaurent::one().add(&lift(&sl.a_0));
    let c_hat = lift(&sl.a_m1);
    let (ylo, yhi) = block.y_range().unwrap_or((0, 0));
    let shifted = block.mul_monomial(0, -ylo, 0, &Rat::one());
    let deg = (yhi - ylo) as usize;
    let slices = shifted.y_slices();
    let get = |j: i64| -> BivarLaurent { slices.get(&j).cloned().unwrap_or_default() };
    let c0 = get(0);
    match deg {
        0 => Ok(c0),
        1 => {
            let c1 = get(1);
            // a·(c0 + c1·Y0)(c0 + c1·Y1) = c0²·a - c0·c1·b + c1²·c
            Ok(c0
                .mul(&c0)
                .mul(&a_hat)
                .sub(&c0.mul(&c1).mul(&b_hat))
                .add(&c1.mul(&c1).mul(&c_hat)))
        }
        2 => {
            let c1 = get(1);
            let c2 = get(2);
            // a²·Π(c0 + c1·Y + c2·Y²) over both roots, by symmetric functions
            let two = Rat::from_integer(2.into());
            let t1 = c0.mul(&c0).mul(&a_hat).mul(&a_hat);
            let t2 = c0.mul(&c1).mul(&a_hat).mul(&b_hat);
            let t3 = c1.mul(&c1).mul(&a_hat).mul(&c_hat);
            let t4 = c0
                .mul(&c2)
                .mul(&b_hat.mul(&b_hat).sub(&a_hat.mul(&c_hat).scale(&two)));
            let t5 = c1.mul(&c2).mul(&b_hat).mul(&c_hat);
            let t6 = c2.mul(&c2).mul(&c_hat).mul(&c_hat);
            Ok(t1.sub(&t2).add(&t3).add(&t4).sub(&t5).add(&t6))
        }
        d => Err(Error::Internal(format!(
            "kernel norm of a block with y-degree {d} is not supported"
        ))),
    }
}

/// Index branch of a normalized equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The x⁰ row determines `Q(0,0)`: index -1.
    Solvable,
    /// The x⁰ row degenerates to 0 = 0: index 0, reverse-walk detour needed.
    Degenerate,
}

impl Branch {
    pub fn chi(self) -> i64 {
        match self {
            Branch::Solvable => -1,
            Branch::Degenerate => 0,
        }
    }
}

/// An orbit equation multiplied into split-ready form: the `Q(x,0)`
/// coefficient has only x-degrees ≥ 0, the inverse-type coefficient only
/// x-degrees ≤ ρ, and the x⁰ row has been isolated.
#[derive(Debug)]
pub struct SplitReady {
    /// Multiplied coefficient of `Q(x,0)`: `e^{F0}·e^{F+}`, degrees ≥ 0.
    pub e_pos: TSeries,
    /// `[x⁰] e_pos` as an x-free series.
    pub e_zero: TSeries,
    pub inv_tag: UnknownTag,
    /// Multiplied coefficient of the inverse-type unknown, degrees ≤ ρ.
    pub c_inv: TSeries,
    /// Multiplied explicit `Q(0,0)` coefficient.
    pub c_q00: TSeries,
    /// Multiplied constant part.
    pub rhs: TSeries,
    /// Degree offset of the inverse side after normalization.
    pub rho: i64,
    pub branch: Branch,
    /// x⁰ row: `q00_coeff·Q(0,0) + q00_rhs = 0`.
    pub q00_coeff: TSeries,
    pub q00_rhs: TSeries,
    /// Canonical factors of the rescaled `Q(x,0)` coefficient.
    pub factors: CanonicalFactors,
    /// Weierstrass preparations of the supplied denominator blocks.
    pub denominators: Vec<WeierstrassFactor>,
    /// Small roots extracted from multiplicity-one denominators.
    pub small_roots: Vec<TSeries>,
}

/// Rescale and factor an eliminated orbit equation so its rows split by
/// x-degree sign. `denominator_blocks` are the symbolic pivot blocks whose
/// kernel norms are the coefficient denominators; they are prepared by
/// Weierstrass factorization for provenance and paper-value regressions.
pub fn normalize_equation(
    model: &Model,
    eq: &OrbitEquation,
    denominator_blocks: &[BivarLaurent],
) -> Result<SplitReady> {
    let inv_tag = if eq.coeff(UnknownTag::QInvX0).is_some() {
        UnknownTag::QInvX0
    } else if eq.coeff(UnknownTag::Q0InvX).is_some() {
        UnknownTag::Q0InvX
    } else {
        return Err(Error::Internal(
            "normalized equation needs an inverse-type unknown".into(),
        ));
    };
    let c_x_raw = eq
        .coeff(UnknownTag::Qx0)
        .ok_or_else(|| Error::Internal("normalized equation needs Q(x,0)".into()))?
        .clone();
    let c_inv_raw = eq.coeff(inv_tag).unwrap().clone();
    let zero = TSeries::zero(c_x_raw.cap(), c_x_raw.window());
    let c_q00_raw = eq
        .coeff(UnknownTag::Q00)
        .cloned()
        .unwrap_or_else(|| zero.clone());
    let rhs_raw = eq.rhs.clone();

    // 1. rescale so the inverse-type coefficient is the exact monomial
    //    x^κ·t^λ (the unit part and scalar are divided out of the equation)
    let inv_fact = canonical_factorize(&c_inv_raw)
        .map_err(|e| Error::PivotNotUnit(format!("inverse coefficient: {e}")))?;
    let inv_inverse = c_inv_raw
        .invert()
        .map_err(|e| Error::PivotNotUnit(e.to_string()))?;
    let scale = inv_inverse.mul_monomial(inv_fact.k, inv_fact.l, &Rat::one());
    let c_x = c_x_raw.mul(&scale);
    let c_q00_scaled = c_q00_raw.mul(&scale);
    let rhs_scaled = rhs_raw.mul(&scale);
    let kappa = inv_fact.k;
    let lambda = inv_fact.l;

    // 2. canonical factorization of the Q(x,0) coefficient; the multiplier
    //    x^{-k}·t^{-l}·e^{-F-}/b turns it into e^{F0}·e^{F+}
    let factors = canonical_factorize(&c_x)?;
    let multiplier = factors
        .f_minus
        .neg()
        .exp_series()?
        .mul_monomial(-factors.k, -factors.l, &factors.b.recip());
    let e_pos = factors
        .f_zero
        .exp_series()?
        .mul(&factors.f_plus.exp_series()?);
    let c_inv = multiplier.mul_monomial(kappa, lambda, &Rat::one());
    let c_q00 = c_q00_scaled.mul(&multiplier);
    let rhs = rhs_scaled.mul(&multiplier);
    let rho = kappa - factors.k;
    if rho >= 1 {
        return Err(Error::IndexObstruction { extra: rho });
    }

    // 3. the x⁰ row: contributions from e_pos·Q(x,0) through its x⁰ slice,
    //    the inverse unknown's constant column when ρ = 0, and Q(0,0)
    let e_zero = e_pos.coeff_x(0)?;
    let mut q00_coeff = e_zero.add(&c_q00.coeff_x(0)?);
    if rho == 0 {
        q00_coeff = q00_coeff.add(&c_inv.coeff_x(0)?);
    }
    let q00_rhs = rhs.coeff_x(0)?;
    let branch = if q00_coeff.is_zero_on_exact_window() {
        if !q00_rhs.is_zero_on_exact_window() {
            return Err(Error::Internal(
                "x⁰ row has no unknown but a nonzero constant".into(),
            ));
        }
        Branch::Degenerate
    } else {
        Branch::Solvable
    };

    // 4. Weierstrass preparation of the denominator blocks
    let mut denominators = Vec::new();
    let mut small_roots = Vec::new();
    for block in denominator_blocks {
        let norm = kernel_norm(model, block)?;
        let xp = XPoly::from_bivar_stripped(&norm, c_x.cap())?;
        let w = weierstrass_factor(&xp, c_x.cap())?;
        if let Some(r) = w.single_root() {
            small_roots.push(r);
        }
        denominators.push(w);
    }

    Ok(SplitReady {
        e_pos,
        e_zero,
        inv_tag,
        c_inv,
        c_q00,
        rhs,
        rho,
        branch,
        q00_coeff,
        q00_rhs,
        factors,
        denominators,
        small_roots,
    })
}

impl SplitReady {
    /// Solve the x⁰ row for `Q(0,0)`; only valid on the solvable branch.
    pub fn solve_q00(&self) -> Result<TSeries> {
        if self.branch != Branch::Solvable {
            return Err(Error::Internal(
                "degenerate x⁰ row cannot determine Q(0,0)".into(),
            ));
        }
        let inv = self
            .q00_coeff
            .invert()
            .map_err(|e| Error::PivotNotUnit(format!("x⁰-row coefficient: {e}")))?;
        Ok(self.q00_rhs.neg().mul(&inv))
    }

    /// Solve the strictly-positive rows for `Q(x,0)` given `Q(0,0)`.
    ///
    /// From `rhs + e_pos·Q(x,0) + c_inv·Q_inv + c_q00·q00 = 0` the `[x^>]`
    /// part drops the inverse unknown, and the x⁰ slice of `e_pos·Q(x,0)`
    /// is `[x⁰]e_pos · q00`; together `e_pos·Q(x,0) = e_zero·q00 -
    /// [x^>](rhs + c_q00·q00)`.
    pub fn solve_qx0(&self, q00: &TSeries) -> Result<TSeries> {
        let known = self.rhs.add(&self.c_q00.mul(q00));
        let target = self.e_zero.mul(q00).sub(&known.x_pos());
        let inv = self.e_pos.invert()?;
        Ok(inv.mul(&target))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{rat, ratio};

    fn ts(pairs: &[(i64, &[(i64, i64)])], cap: i64, window: i64) -> TSeries {
        TSeries::from_t_coeffs(
            pairs.iter().map(|&(n, terms)| {
                (
                    n,
                    LaurentPoly::from_terms(terms.iter().map(|&(d, c)| (d, rat(c)))),
                )
            }),
            cap,
            window,
        )
    }

    #[test]
    fn monomial_factorization() {
        let f = TSeries::monomial(1, 1, rat(1), 6, 4);
        let c = canonical_factorize(&f).unwrap();
        assert_eq!((c.k, c.l), (1, 1));
        assert_eq!(c.b, rat(1));
        assert!(c.f_minus.is_zero() && c.f_zero.is_zero() && c.f_plus.is_zero());
        assert_eq!(c.index(), -1);
        assert_eq!(index(&TSeries::monomial(3, 0, rat(2), 4, 4)).unwrap(), -3);
    }

    #[test]
    fn derived_golden_factorization() {
        // f = 1 + x + t/x at N=2, Dx=4, split by hand via the log expansion
        let f = ts(&[(0, &[(0, 1), (1, 1)]), (1, &[(-1, 1)])], 2, 4);
        let c = canonical_factorize(&f).unwrap();
        assert_eq!((c.k, c.l), (0, 0));
        assert_eq!(c.b, rat(1));
        // F- = t/x + t²(1/x - 1/(2x²))
        assert_eq!(c.f_minus.coeff(1, -1), rat(1));
        assert_eq!(c.f_minus.coeff(2, -1), rat(1));
        assert_eq!(c.f_minus.coeff(2, -2), ratio(-1, 2));
        // F0 = -t - 3t²/2
        assert_eq!(c.f_zero.coeff(1, 0), rat(-1));
        assert_eq!(c.f_zero.coeff(2, 0), ratio(-3, 2));
        // F+ rows: t⁰: x - x²/2 + x³/3 - x⁴/4; t¹: x - x² + x³ - x⁴;
        // t²: 2x - 5x²/2 + 3x³ - 7x⁴/2
        assert_eq!(c.f_plus.coeff(0, 1), rat(1));
        assert_eq!(c.f_plus.coeff(0, 2), ratio(-1, 2));
        assert_eq!(c.f_plus.coeff(0, 3), ratio(1, 3));
        assert_eq!(c.f_plus.coeff(0, 4), ratio(-1, 4));
        for (d, v) in [(1, 1), (2, -1), (3, 1), (4, -1)] {
            assert_eq!(c.f_plus.coeff(1, d), rat(v));
        }
        assert_eq!(c.f_plus.coeff(2, 1), rat(2));
        assert_eq!(c.f_plus.coeff(2, 2), ratio(-5, 2));
        assert_eq!(c.f_plus.coeff(2, 3), rat(3));
        assert_eq!(c.f_plus.coeff(2, 4), ratio(-7, 2));
        // sign purity
        assert!(c
            .f_minus
            .stored_span()
            .map(|(_, hi)| hi <= -1)
            .unwrap_or(true));
        assert!(c
            .f_plus
            .stored_span()
            .map(|(lo, _)| lo >= 1)
            .unwrap_or(true));
        assert!(c.f_zero.stored_span().map(|(lo, hi)| lo == 0 && hi == 0).unwrap_or(true));
        // reconstruction on the exact window
        let back = c.reconstruct().unwrap();
        assert!(back.sub(&f).is_zero_on_exact_window());
    }

    #[test]
    fn weierstrass_linear_examples() {
        // P = x - t: already prepared
        let p = XPoly::new(
            vec![TSeries::monomial(0, 1, rat(-1), 8, 0), TSeries::one(8, 0)],
            8,
        );
        let w = weierstrass_factor(&p, 8).unwrap();
        assert_eq!(w.multiplicity, 1);
        assert!(w.unit.is_one());
        let root = w.single_root().unwrap();
        assert!(root.same_values(&TSeries::monomial(0, 1, rat(1), 8, 0)));
        // P = x² - t²: both roots small, m = 2
        let p2 = XPoly::new(
            vec![
                TSeries::monomial(0, 2, rat(-1), 8, 0),
                TSeries::zero(8, 0),
                TSeries::one(8, 0),
            ],
            8,
        );
        let w2 = weierstrass_factor(&p2, 8).unwrap();
        assert_eq!(w2.multiplicity, 2);
        assert!(w2.unit.is_one());
        assert!(w2.single_root().is_none());
        assert!(w2.small.mul(&w2.unit).sub(&p2).is_zero());
        // degenerate at t = 0
        let bad = XPoly::new(vec![TSeries::monomial(0, 1, rat(1), 8, 0)], 8);
        assert!(matches!(
            weierstrass_factor(&bad, 8),
            Err(Error::DegenerateAtTZero)
        ));
    }

    #[test]
    fn weierstrass_model5_denominator() {
        // 4t² - x + x³ at b = 2: small root X3 = 4t² + 64t⁶ + 3072t¹⁰ + …
        let cap = 12;
        let p = XPoly::new(
            vec![
                TSeries::monomial(0, 2, rat(4), cap, 0),
                TSeries::constant(rat(-1), cap, 0),
                TSeries::zero(cap, 0),
                TSeries::one(cap, 0),
            ],
            cap,
        );
        let w = weierstrass_factor(&p, cap).unwrap();
        assert_eq!(w.multiplicity, 1);
        let x3 = w.single_root().unwrap();
        assert_eq!(x3.coeff(2, 0), rat(4));
        assert_eq!(x3.coeff(6, 0), rat(64));
        assert_eq!(x3.coeff(10, 0), rat(3072));
        for n in [0, 1, 3, 4, 5, 7, 8, 9, 11] {
            assert!(x3.coeff(n, 0).is_zero(), "unexpected term at t^{n}");
        }
        assert!(w.small.mul(&w.unit).sub(&p).is_zero());
    }

    #[test]
    fn weierstrass_model18_denominator_roots() {
        // the three boundary-coefficient denominator cubics at (a,b) = (2,3):
        // prepared roots must match the closed-form prefixes
        // X1 = at/(a-1) + a²t²/(a-1) + a³t³/(a-1)² = 2t + 4t² + 8t³ + …
        // X3 = bt/(b-1) + b²t²/(b-1) + b³t³/(b-1)² = 3t/2 + 9t²/2 + 27t³/4 + …
        // X5 = bt + b²t²/(b-1) + b³(b+1)t³/(b-1) = 3t + 9t²/2 + 54t³ + …
        let cap = 6;
        let a = rat(2);
        let b = rat(3);
        let factor_one = |w: Rat| -> BivarLaurent {
            // 2w²t² + w²tx² - 2w²tx + w²x² - wtx² + 2wtx + wt - 2wx² - wx + x² + x
            let w2 = w.clone() * w.clone();
            BivarLaurent::from_terms([
                ((0, 0, 2), rat(2) * w2.clone()),
                ((2, 0, 1), w2.clone() - w.clone()),
                ((1, 0, 1), rat(-2) * w2.clone() + rat(2) * w.clone()),
                ((0, 0, 1), w.clone()),
                ((2, 0, 0), w2.clone() - rat(2) * w.clone() + rat(1)),
                ((1, 0, 0), rat(1) - w.clone()),
            ])
        };
        let factor_three = |w: Rat| -> BivarLaurent {
            // w²t²x² + 2w²t²x + w²t² + w²tx² + w²t - wtx² - wt - wx + x
            let w2 = w.clone() * w.clone();
            BivarLaurent::from_terms([
                ((2, 0, 2), w2.clone()),
                ((1, 0, 2), rat(2) * w2.clone()),
                ((0, 0, 2), w2.clone()),
                ((2, 0, 1), w2.clone() - w.clone()),
                ((0, 0, 1), w2.clone() - w.clone()),
                ((1, 0, 0), rat(1) - w.clone()),
            ])
        };
        let cases: Vec<(BivarLaurent, Vec<Rat>)> = vec![
            (factor_one(a), vec![rat(2), rat(4), rat(8)]),
            (
                factor_one(b.clone()),
                vec![ratio(3, 2), ratio(9, 2), ratio(27, 4)],
            ),
            (factor_three(b), vec![rat(3), ratio(9, 2), rat(54)]),
        ];
        for (poly, prefix) in cases {
            let xp = XPoly::from_bivar_stripped(&poly, cap).unwrap();
            let w = weierstrass_factor(&xp, cap).unwrap();
            assert_eq!(w.multiplicity, 1, "one small root per cubic");
            let root = w.single_root().unwrap();
            for (i, want) in prefix.iter().enumerate() {
                assert_eq!(root.coeff(i as i64 + 1, 0), *want, "t^{}", i + 1);
            }
            assert!(w.small.mul(&w.unit).sub(&xp).is_zero());
        }
    }

    #[test]
    fn index_additivity_on_samples() {
        let f = ts(&[(0, &[(1, 1), (2, 1)]), (1, &[(0, 2)])], 6, 8);
        let g = ts(&[(1, &[(-2, 3), (-1, 1)])], 6, 8);
        let fi = index(&f).unwrap();
        let gi = index(&g).unwrap();
        let fg = index(&f.mul(&g)).unwrap();
        assert_eq!(fg, fi + gi);
    }
}
