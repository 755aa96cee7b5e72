//! End-to-end solver pipelines: the algebraic and obstinate kernel methods
//! for the simple walk, the conformal-mapping route, the interacting
//! half-symmetric models, the six-step interacting model, decoupling checks,
//! and the one-variable kernel-method demonstration.
//!
//! Every pipeline returns the boundary generating functions as truncated
//! series; callers compare them against the DP oracle, which is the master
//! invariant for the whole engine.

use num_traits::{One, Zero};

use crate::bivar::BivarLaurent;
use crate::catalog::Catalog;
use crate::factor::{normalize_equation, Branch, SplitReady};
use crate::kernel::{
    build_functional_equation, kernel_root_x0, kernel_root_y0, model_from_tokens, FuncEq,
    GroupElement, Model,
};
use crate::number::{format_rat, rat, Rat};
use crate::orbit::{orbit_eliminate, substitute_orbit, OrbitEquation, UnknownTag};
use crate::series::TSeries;
use crate::{Error, Result};

/// Extra t-orders carried internally so divisions cannot eat into the
/// requested precision.
const CAP_SLACK: i64 = 4;

/// Interacting pipelines run at a padded x-window: inverses and
/// exponentials of window-clipped units spread suspicion inward from the
/// edges, and the padding keeps every degree the user asked for inside the
/// certified-exact region. Final results are clipped back down.
fn padded_window(window: i64, cap: i64) -> i64 {
    window + 8 * (cap + 2) + 8
}

/// How a pipeline arrived at its answer.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub pipeline: String,
    pub model: String,
    pub weights: (Rat, Rat, Rat),
    pub n: i64,
    pub dx: i64,
    /// Branch index of the x⁰ row: -1 solvable, 0 degenerate; absent when
    /// the pipeline has no interacting normalization step.
    pub index: Option<i64>,
    /// "direct", "reverse-walk", or the route name for the simple walk.
    pub branch: String,
    /// Canonical-factor exponents and Weierstrass small roots, rendered.
    pub factors: Vec<String>,
}

/// Boundary generating functions of one solved model.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// `Q(x, 0)`.
    pub qx0: TSeries,
    /// `Q(0, y)`, stored in the same windowed ring with the roles of the
    /// variables swapped (the series variable is `y`).
    pub q0y: TSeries,
    /// `Q(0, 0)` as an x-free series.
    pub q00: TSeries,
    pub provenance: Provenance,
}

impl SolveResult {
    /// Counting interpretation: every solved coefficient must be a
    /// nonnegative rational when the weights are positive.
    pub fn check_nonnegative(&self) -> Result<()> {
        for (name, s) in [
            ("Q(x,0)", &self.qx0),
            ("Q(0,y)", &self.q0y),
            ("Q(0,0)", &self.q00),
        ] {
            for n in 0..=s.cap() {
                let p = s.coeff_t(n);
                for (d, c) in p.iter() {
                    if d >= s.exact_lo() && d <= s.exact_hi() && c < &Rat::zero() {
                        return Err(Error::Internal(format!(
                            "{name} has negative coefficient {} at t^{n} x^{d}",
                            format_rat(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn simple_model() -> Model {
    model_from_tokens("simple", "N,W,S,E").expect("simple walk")
}

/// Algebraic kernel method for the simple walk: expand the alternating
/// orbit sum `(x - 1/x)(y - 1/y)/K` exactly as `Σ tⁿ·(x-1/x)(y-1/y)·Sⁿ`,
/// keep the strictly positive bidegrees, divide by `xy`. The alternating
/// sum over the four group images of `xy` is what makes the positive part
/// pick out exactly the quadrant-confined walks.
pub fn solve_simple_algebraic(n: i64, dx: i64) -> SolveResult {
    let model = simple_model();
    let s = crate::kernel::step_generator(&model);
    let mut power = BivarLaurent::one();
    let mut series = BivarLaurent::one(); // Σ tⁿ Sⁿ
    for k in 1..=n {
        power = power.mul(&s);
        series = series.add(&power.mul_monomial(0, 0, k, &Rat::one()));
    }
    // (x - 1/x)(y - 1/y) = Σ_{g} sign(g)·g(xy) over the symmetry group
    let orbit_sum = BivarLaurent::from_terms([
        ((1, 1, 0), rat(1)),
        ((1, -1, 0), rat(-1)),
        ((-1, 1, 0), rat(-1)),
        ((-1, -1, 0), rat(1)),
    ]);
    let numer = series.mul(&orbit_sum);
    // strictly positive bidegrees, then divide by xy
    let mut q = BivarLaurent::zero();
    for ((dxv, dyv, dt), c) in numer.iter() {
        if dxv >= 1 && dyv >= 1 && dt <= n {
            q.add_term(dxv - 1, dyv - 1, dt, c.clone());
        }
    }
    let mut qx0 = BivarLaurent::zero();
    let mut q0y = BivarLaurent::zero();
    let mut q00 = BivarLaurent::zero();
    for ((dxv, dyv, dt), c) in q.iter() {
        if dyv == 0 {
            qx0.add_term(dxv, 0, dt, c.clone());
        }
        if dxv == 0 {
            q0y.add_term(dyv, 0, dt, c.clone());
        }
        if dxv == 0 && dyv == 0 {
            q00.add_term(0, 0, dt, c.clone());
        }
    }
    SolveResult {
        qx0: qx0.as_xt_series(n, dx),
        q0y: q0y.as_xt_series(n, dx),
        q00: q00.as_xt_series(n, dx),
        provenance: Provenance {
            pipeline: "algebraic".into(),
            model: "simple".into(),
            weights: (Rat::one(), Rat::one(), Rat::one()),
            n,
            dx,
            index: None,
            branch: "positive-part extraction".into(),
            factors: Vec::new(),
        },
    }
}

/// Obstinate kernel method for the simple walk: orbit pair, elimination of
/// `Q(0,Y0)`, positive-part split, and recovery of `Q(0,y)` by substituting
/// the small root in the other variable.
pub fn solve_simple_obstinate(n: i64, dx: i64) -> Result<SolveResult> {
    let model = simple_model();
    let cap = n + CAP_SLACK;
    let eq = build_functional_equation(&model);
    let y0 = kernel_root_y0(&model, cap, dx);
    let e1 = substitute_orbit(&model, &eq, &GroupElement::identity(), &y0)?;
    let mirror = GroupElement::new(
        crate::expr::parse_frac("1/x")?,
        crate::expr::parse_frac("y")?,
    );
    let e2 = substitute_orbit(&model, &eq, &mirror, &y0)?;
    let elim = orbit_eliminate(&[e1, e2], &[UnknownTag::Q0Y0])?;
    let eqn = &elim.equation;
    // rescale so the Q(x,0) coefficient is exactly -t·x, the usual anchor
    let cx = eqn
        .coeff(UnknownTag::Qx0)
        .ok_or_else(|| Error::Internal("missing Q(x,0) after elimination".into()))?;
    let target = TSeries::monomial(1, 1, rat(-1), cx.cap(), cx.window());
    let scale = target.mul(&cx.invert()?);
    let rhs = eqn.rhs.mul(&scale);
    // t·x·Q(x,0) = [x^>] rhs  (the mirrored unknown carries only degrees ≤ 0)
    let qx0 = rhs.x_pos().mul_monomial(-1, -1, &Rat::one()).truncate_t(n);
    let q00 = qx0.coeff_x(0)?;
    let q0y = transfer_q0y(&model, &eq, &qx0, &q00, cap, dx)?.truncate_t(n);
    Ok(SolveResult {
        qx0,
        q0y,
        q00: q00.truncate_t(n),
        provenance: Provenance {
            pipeline: "obstinate".into(),
            model: "simple".into(),
            weights: (Rat::one(), Rat::one(), Rat::one()),
            n,
            dx,
            index: None,
            branch: "orbit elimination + positive-part split".into(),
            factors: Vec::new(),
        },
    })
}

/// Conformal-mapping route for the simple walk. The substitution
/// `z = x + 1/x` sends `x` to a series in `1/z` and `Y0(x(z))` to a series
/// with polynomial-in-`z` coefficients, so positive and negative `z`-degrees
/// separate the two boundary unknowns. Internally the series variable is
/// `w = 1/z`, which fits the windowed ring unchanged.
pub fn solve_conformal_d2(n: i64, dz: i64) -> Result<SolveResult> {
    if dz < 2 * n {
        return Err(Error::WindowTooSmall(format!(
            "need Dz ≥ 2N = {} to recover x-degrees up to N, got {dz}",
            2 * n
        )));
    }
    let cap = n + CAP_SLACK;
    // x(z) = (z - sqrt(z² - 4))/2 as a series in w = 1/z
    let one = TSeries::one(cap, dz);
    let root = one
        .add(&TSeries::monomial(2, 0, rat(-4), cap, dz))
        .sqrt()?; // sqrt(1 - 4w²)
    let xz = one
        .sub(&root)
        .mul_monomial(-1, 0, &Rat::new(1.into(), 2.into()));
    // Y0(x(z)) by the fixed point Y <- t(1 + z·Y + Y²), z = 1/w
    let mut y0z = TSeries::zero(cap, dz);
    for _ in 0..=cap {
        let zy = y0z.mul_monomial(-1, 0, &Rat::one());
        let rhs = TSeries::one(cap, dz).add(&zy).add(&y0z.mul(&y0z));
        let next = rhs.mul_monomial(0, 1, &Rat::one()).truncate_t(cap);
        if next.same_values(&y0z) {
            break;
        }
        y0z = next;
    }
    let u = xz.mul(&y0z);
    // the strictly positive w-part is the [z^<] part: t·x(z)·Q(x(z),0)
    let f_neg_z = u.x_pos();
    // map back through w = x/(1 + x²) expanded in x
    let w_of_x = TSeries::monomial(1, 0, rat(1), cap, dz).mul(
        &TSeries::one(cap, dz)
            .add(&TSeries::monomial(2, 0, rat(1), cap, dz))
            .invert()?,
    );
    let txq = f_neg_z.eval_at_x(&w_of_x)?;
    let qx0 = txq.mul_monomial(-1, -1, &Rat::one()).truncate_t(n);
    let q00 = qx0.coeff_x(0)?;
    let model = simple_model();
    let eq = build_functional_equation(&model);
    let q0y = transfer_q0y(&model, &eq, &qx0, &q00, cap, dz)?.truncate_t(n);
    Ok(SolveResult {
        qx0,
        q0y,
        q00: q00.truncate_t(n),
        provenance: Provenance {
            pipeline: "conformal".into(),
            model: "simple".into(),
            weights: (Rat::one(), Rat::one(), Rat::one()),
            n,
            dx: dz,
            index: None,
            branch: "z = x + 1/x gluing".into(),
            factors: Vec::new(),
        },
    })
}

/// Recover `Q(0, y)` by substituting the small root in the other variable:
/// with `x -> X0(y)` the kernel side vanishes and the functional equation
/// becomes linear in `Q(0, y)`.
pub fn transfer_q0y(
    model: &Model,
    eq: &FuncEq,
    qx0: &TSeries,
    q00: &TSeries,
    cap: i64,
    window: i64,
) -> Result<TSeries> {
    let x0 = kernel_root_x0(model, cap, window);
    let cc = eq.coeff_const.swap_xy().eval_y(&x0)?;
    let cx = eq.coeff_qx0.swap_xy().eval_y(&x0)?;
    let cy = eq.coeff_q0y.swap_xy().eval_y(&x0)?;
    let c0 = eq.coeff_q00.swap_xy().eval_y(&x0)?;
    let qx0_at_root = qx0.eval_at_x(&x0)?;
    let num = cc.add(&cx.mul(&qx0_at_root)).add(&c0.mul(q00));
    Ok(num.neg().mul(&cy.invert()?))
}

/// Outcome of the shared interacting driver.
struct InteractingOutcome {
    split: SplitReady,
    q00: TSeries,
    branch_label: String,
}

/// Shared driver for the interacting pipelines: transport the functional
/// equation along the listed elements, eliminate the dropped unknowns,
/// normalize with canonical factorization, then solve the x⁰ row directly
/// or through the reverse walk.
fn interacting_driver(
    model: &Model,
    elements: &[GroupElement],
    drops: &[UnknownTag],
    denominator_picks: &[(usize, UnknownTag)],
    cap: i64,
    window: i64,
    allow_reverse: bool,
) -> Result<InteractingOutcome> {
    let eq = build_functional_equation(model);
    let y0 = kernel_root_y0(model, cap, window);
    let mut orbit_eqs: Vec<OrbitEquation> = Vec::new();
    for g in elements {
        orbit_eqs.push(substitute_orbit(model, &eq, g, &y0)?);
    }
    let denominator_blocks: Vec<BivarLaurent> = denominator_picks
        .iter()
        .filter_map(|(i, tag)| orbit_eqs[*i].block(*tag).cloned())
        .collect();
    let elim = orbit_eliminate(&orbit_eqs, drops)?;
    let split = normalize_equation(model, &elim.equation, &denominator_blocks)?;
    match split.branch {
        Branch::Solvable => {
            let q00 = split.solve_q00()?;
            Ok(InteractingOutcome {
                split,
                q00,
                branch_label: "direct".into(),
            })
        }
        Branch::Degenerate => {
            if !allow_reverse {
                return Err(Error::Internal(
                    "reverse-walk fallback looped: both directions degenerate".into(),
                ));
            }
            // the x⁰ row reads 0 = 0; transfer Q(0,0) from the reverse walk,
            // whose origin-return weights agree configuration by
            // configuration
            let rev = model.reversed();
            let rev_out =
                interacting_driver(&rev, elements, drops, denominator_picks, cap, window, false)?;
            Ok(InteractingOutcome {
                split,
                q00: rev_out.q00,
                branch_label: "reverse-walk".into(),
            })
        }
    }
}

fn describe_split(split: &SplitReady) -> Vec<String> {
    let mut out = vec![format!("canonical {}", split.factors.describe())];
    for (i, w) in split.denominators.iter().enumerate() {
        out.push(format!(
            "denominator {}: weierstrass multiplicity {}",
            i + 1,
            w.multiplicity
        ));
    }
    for r in &split.small_roots {
        out.push(format!("small root {}", r.truncate_t(4)));
    }
    out
}

/// Half-symmetric interacting pipeline. The same recipe serves the mutually
/// reverse three-step models: orbit pair under `(1/x, y)`, elimination of
/// `Q(0,Y0)`, canonical normalization, then the x⁰ row decides between the
/// direct solve (index -1) and the reverse-walk detour (index 0).
pub fn solve_half_symmetric_interacting(model: &Model, n: i64, dx: i64) -> Result<SolveResult> {
    let cap = n + CAP_SLACK;
    let work = padded_window(dx, cap);
    let mirror = GroupElement::new(
        crate::expr::parse_frac("1/x")?,
        crate::expr::parse_frac("y")?,
    );
    let elements = [GroupElement::identity(), mirror];
    let out = interacting_driver(
        model,
        &elements,
        &[UnknownTag::Q0Y0],
        &[(0, UnknownTag::Q0Y0), (1, UnknownTag::QInvX0)],
        cap,
        work,
        true,
    )?;
    let qx0_wide = out.split.solve_qx0(&out.q00)?;
    let eq = build_functional_equation(model);
    let q0y_wide = transfer_q0y(model, &eq, &qx0_wide, &out.q00, cap, work)?;
    let qx0 = qx0_wide.shrink_window(dx).truncate_t(n);
    let q0y = q0y_wide.shrink_window(dx).truncate_t(n);
    Ok(SolveResult {
        qx0,
        q0y,
        q00: out.q00.shrink_window(dx.min(out.q00.window())).truncate_t(n),
        provenance: Provenance {
            pipeline: "half-symmetric".into(),
            model: model.name.clone(),
            weights: (model.a.clone(), model.b.clone(), model.c.clone()),
            n,
            dx,
            index: Some(out.split.branch.chi()),
            branch: out.branch_label,
            factors: describe_split(&out.split),
        },
    })
}

/// Six-step interacting pipeline: three orbit equations from the elements
/// `(x,y)`, `(y/x,y)`, `(y/x,1/x)` with the small root substituted,
/// elimination of `Q(0,Y0)` and `Q(Y0/x,0)`, canonical normalization with
/// the three Weierstrass denominators, then the split rows.
pub fn solve_model18(model: &Model, n: i64, dx: i64) -> Result<SolveResult> {
    let cap = n + CAP_SLACK;
    let phi = GroupElement::new(
        crate::expr::parse_frac("y/x")?,
        crate::expr::parse_frac("y")?,
    );
    let chi_el = GroupElement::new(
        crate::expr::parse_frac("y/x")?,
        crate::expr::parse_frac("1/x")?,
    );
    let elements = [GroupElement::identity(), phi, chi_el];
    let work = padded_window(dx, cap);
    let out = interacting_driver(
        model,
        &elements,
        &[UnknownTag::Q0Y0, UnknownTag::QY0OverX0],
        &[
            (0, UnknownTag::Q0Y0),
            (1, UnknownTag::QY0OverX0),
            (2, UnknownTag::Q0InvX),
        ],
        cap,
        work,
        true,
    )?;
    let qx0_wide = out.split.solve_qx0(&out.q00)?;
    let eq = build_functional_equation(model);
    let q0y_wide = transfer_q0y(model, &eq, &qx0_wide, &out.q00, cap, work)?;
    let qx0 = qx0_wide.shrink_window(dx).truncate_t(n);
    let q0y = q0y_wide.shrink_window(dx).truncate_t(n);
    Ok(SolveResult {
        qx0,
        q0y,
        q00: out.q00.shrink_window(dx.min(out.q00.window())).truncate_t(n),
        provenance: Provenance {
            pipeline: "six-step".into(),
            model: model.name.clone(),
            weights: (model.a.clone(), model.b.clone(), model.c.clone()),
            n,
            dx,
            index: Some(out.split.branch.chi()),
            branch: out.branch_label,
            factors: describe_split(&out.split),
        },
    })
}

/// Branch index of the normalized boundary coefficient for the
/// half-symmetric models, as reported by the x⁰-row rank: -1 when the row
/// determines `Q(0,0)`, 0 when it degenerates. Also returns the canonical
/// exponents of the normalized coefficient.
pub fn half_symmetric_index(model: &Model, n: i64, dx: i64) -> Result<(i64, String)> {
    let cap = n + CAP_SLACK;
    let dx = padded_window(dx, cap);
    let mirror = GroupElement::new(
        crate::expr::parse_frac("1/x")?,
        crate::expr::parse_frac("y")?,
    );
    let eq = build_functional_equation(model);
    let y0 = kernel_root_y0(model, cap, dx);
    let e1 = substitute_orbit(model, &eq, &GroupElement::identity(), &y0)?;
    let e2 = substitute_orbit(model, &eq, &mirror, &y0)?;
    let blocks: Vec<BivarLaurent> = [
        e1.block(UnknownTag::Q0Y0).cloned(),
        e2.block(UnknownTag::QInvX0).cloned(),
    ]
    .into_iter()
    .flatten()
    .collect();
    let elim = orbit_eliminate(&[e1, e2], &[UnknownTag::Q0Y0])?;
    let split = normalize_equation(model, &elim.equation, &blocks)?;
    Ok((split.branch.chi(), split.factors.describe()))
}

/// Models with a hard-coded decoupling of `x·y` (or `1/(x·y)`) on the
/// kernel curve; the identity is checked exactly in the windowed ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecouplingCase {
    Kreweras,
    Gessel,
    ReverseKreweras,
}

impl DecouplingCase {
    pub fn parse(name: &str) -> Result<DecouplingCase> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "kreweras" | "model19" => DecouplingCase::Kreweras,
            "gessel" | "model23" => DecouplingCase::Gessel,
            "reverse-kreweras" | "model20" => DecouplingCase::ReverseKreweras,
            other => {
                return Err(Error::Parse(format!(
                    "no decoupling identity recorded for {other:?}"
                )))
            }
        })
    }
}

/// Verify the decoupling identity for the given model to order `n`.
pub fn check_decoupling(case: DecouplingCase, n: i64, dx: i64) -> Result<bool> {
    let cap = n;
    let cat = Catalog::builtin();
    let residual: TSeries = match case {
        DecouplingCase::Kreweras => {
            // on the kernel: x·Y0 = 1/t - 1/x - 1/Y0
            let m = cat.get("kreweras").unwrap().model();
            let y0 = kernel_root_y0(&m, cap, dx);
            let x = TSeries::monomial(1, 0, rat(1), cap, dx);
            let f = TSeries::monomial(0, -1, rat(1), cap, dx)
                .sub(&TSeries::monomial(-1, 0, rat(1), cap, dx));
            let g = y0.invert()?.neg();
            x.mul(&y0).sub(&f).sub(&g)
        }
        DecouplingCase::Gessel => {
            // x·Y0 = -1/(t(1+Y0)) + 1/t - 1/x
            let m = cat.get("gessel").unwrap().model();
            let y0 = kernel_root_y0(&m, cap, dx);
            let x = TSeries::monomial(1, 0, rat(1), cap, dx);
            let g = TSeries::one(cap, dx)
                .add(&y0)
                .mul_monomial(0, 1, &Rat::one())
                .invert()?
                .neg();
            let f = TSeries::monomial(0, -1, rat(1), cap, dx)
                .sub(&TSeries::monomial(-1, 0, rat(1), cap, dx));
            x.mul(&y0).sub(&f).sub(&g)
        }
        DecouplingCase::ReverseKreweras => {
            // on the kernel: 1/(x·Y0) = 1/t - x - Y0
            let m = cat.get("reverse-kreweras").unwrap().model();
            let y0 = kernel_root_y0(&m, cap, dx);
            let x = TSeries::monomial(1, 0, rat(1), cap, dx);
            let lhs = x.mul(&y0).invert()?;
            let rhs = TSeries::monomial(0, -1, rat(1), cap, dx).sub(&x).sub(&y0);
            lhs.sub(&rhs)
        }
    };
    Ok(residual.is_zero_on_exact_window())
}

/// One-variable kernel method demonstration: the small root of
/// `t·x² - x + t` gives the generating function of nonnegative one-step
/// paths, whose even coefficients are the Catalan numbers.
pub fn dyck_kernel_demo(n: i64) -> Result<TSeries> {
    let x1 = dyck_small_root(n + 1)?;
    Ok(x1.mul_monomial(0, -1, &Rat::one()).truncate_t(n))
}

/// The small root `x1 = t + t³ + 2t⁵ + …` itself, for prefix checks.
pub fn dyck_small_root(n: i64) -> Result<TSeries> {
    // x1 = (1 - sqrt(1 - 4t²)) / (2t)
    let one = TSeries::one(n + 1, 0);
    let inner = one.sub(&TSeries::monomial(0, 2, rat(4), n + 1, 0));
    Ok(one
        .sub(&inner.sqrt()?)
        .mul_monomial(0, -1, &Rat::new(1.into(), 2.into()))
        .truncate_t(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::ratio;
    use crate::oracle::{compare_with_oracle, count_walks, Slice};

    #[test]
    fn algebraic_pipeline_prefix() {
        let r = solve_simple_algebraic(6, 8);
        assert_eq!(r.qx0.coeff(0, 0), rat(1)); // the empty walk
        assert_eq!(r.q00.coeff(2, 0), rat(2));
        let table = count_walks(&simple_model(), 6);
        for (slice, series) in [
            (Slice::Qx0, &r.qx0),
            (Slice::Q0y, &r.q0y),
            (Slice::Q00, &r.q00),
        ] {
            assert_eq!(compare_with_oracle(series, &table, slice, 6, 6), None);
        }
    }

    #[test]
    fn obstinate_pipeline_matches_oracle_and_algebraic() {
        let r = solve_simple_obstinate(6, 16).unwrap();
        let table = count_walks(&simple_model(), 6);
        // [t¹] Q(x,0) = x ; [t²] Q(x,0) = x² + 2
        assert_eq!(r.qx0.coeff(1, 1), rat(1));
        assert_eq!(r.qx0.coeff(2, 2), rat(1));
        assert_eq!(r.qx0.coeff(2, 0), rat(2));
        assert_eq!(compare_with_oracle(&r.qx0, &table, Slice::Qx0, 6, 6), None);
        assert_eq!(compare_with_oracle(&r.q0y, &table, Slice::Q0y, 6, 6), None);
        let alg = solve_simple_algebraic(6, 16);
        assert!(r.qx0.sub(&alg.qx0).is_zero_on_exact_window());
    }

    #[test]
    fn conformal_pipeline_agrees() {
        let r = solve_conformal_d2(6, 16).unwrap();
        let alg = solve_simple_algebraic(6, 16);
        assert!(r.qx0.sub(&alg.qx0).is_zero_on_exact_window());
        let table = count_walks(&simple_model(), 6);
        assert_eq!(compare_with_oracle(&r.qx0, &table, Slice::Qx0, 6, 6), None);
        assert!(matches!(
            solve_conformal_d2(6, 4),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn conformal_intermediates_match_catalan_pattern() {
        // x(z) = 1/z + 1/z³ + 2/z⁵ + … and Y0 = t + z·t² + (1+z²)t³ + …
        let cap = 6;
        let dz = 16;
        let one = TSeries::one(cap, dz);
        let root = one
            .add(&TSeries::monomial(2, 0, rat(-4), cap, dz))
            .sqrt()
            .unwrap();
        let xz = one
            .sub(&root)
            .mul_monomial(-1, 0, &Rat::new(1.into(), 2.into()));
        // in the internal w = 1/z variable, positive degrees are 1/z powers
        assert_eq!(xz.coeff(0, 1), rat(1));
        assert_eq!(xz.coeff(0, 3), rat(1));
        assert_eq!(xz.coeff(0, 5), rat(2));
        assert_eq!(xz.coeff(0, 7), rat(5));
        assert_eq!(xz.coeff(0, 2), rat(0));
        let mut y0z = TSeries::zero(cap, dz);
        for _ in 0..=cap {
            let zy = y0z.mul_monomial(-1, 0, &Rat::one());
            let rhs = TSeries::one(cap, dz).add(&zy).add(&y0z.mul(&y0z));
            y0z = rhs.mul_monomial(0, 1, &Rat::one()).truncate_t(cap);
        }
        assert_eq!(y0z.coeff(1, 0), rat(1));
        assert_eq!(y0z.coeff(2, -1), rat(1)); // z·t²
        assert_eq!(y0z.coeff(3, 0), rat(1));
        assert_eq!(y0z.coeff(3, -2), rat(1)); // (1 + z²)·t³
    }

    #[test]
    fn dyck_demo_catalan_numbers() {
        let f = dyck_kernel_demo(11).unwrap();
        let catalan = [1i64, 1, 2, 5, 14, 42];
        for (i, c) in catalan.iter().enumerate() {
            assert_eq!(f.coeff(2 * i as i64, 0), rat(*c), "Catalan {i}");
            if 2 * i + 1 <= 11 {
                assert!(f.coeff(2 * i as i64 + 1, 0).is_zero(), "odd orders vanish");
            }
        }
        let x1 = dyck_small_root(6).unwrap();
        assert_eq!(x1.coeff(1, 0), rat(1));
        assert_eq!(x1.coeff(3, 0), rat(1));
        assert_eq!(x1.coeff(5, 0), rat(2));
    }

    #[test]
    fn decoupling_identities() {
        assert!(check_decoupling(DecouplingCase::Kreweras, 10, 24).unwrap());
        assert!(check_decoupling(DecouplingCase::Gessel, 10, 24).unwrap());
        assert!(check_decoupling(DecouplingCase::ReverseKreweras, 10, 24).unwrap());
        // the simple walk does not satisfy the three-step identity: the
        // analogous residual is nonzero
        let m = simple_model();
        let y0 = kernel_root_y0(&m, 8, 16);
        let x = TSeries::monomial(1, 0, rat(1), 8, 16);
        let f = TSeries::monomial(0, -1, rat(1), 8, 16)
            .sub(&TSeries::monomial(-1, 0, rat(1), 8, 16));
        let residual = x.mul(&y0).sub(&f).add(&y0.invert().unwrap());
        assert!(!residual.is_zero_on_exact_window());
    }

    #[test]
    fn model15_direct_branch() {
        let cat = Catalog::builtin();
        let m = cat
            .get("model15")
            .unwrap()
            .model()
            .with_weights(rat(1), rat(2), rat(1))
            .unwrap();
        let r = solve_half_symmetric_interacting(&m, 6, 16).unwrap();
        assert_eq!(r.provenance.index, Some(-1));
        assert_eq!(r.provenance.branch, "direct");
        let table = count_walks(&m, 8);
        assert_eq!(compare_with_oracle(&r.q00, &table, Slice::Q00, 6, 0), None);
        assert_eq!(compare_with_oracle(&r.qx0, &table, Slice::Qx0, 6, 6), None);
        assert_eq!(compare_with_oracle(&r.q0y, &table, Slice::Q0y, 6, 6), None);
        r.check_nonnegative().unwrap();
    }

    #[test]
    fn model5_reverse_branch() {
        let cat = Catalog::builtin();
        let m = cat
            .get("model05")
            .unwrap()
            .model()
            .with_weights(rat(1), rat(2), rat(1))
            .unwrap();
        let r = solve_half_symmetric_interacting(&m, 6, 16).unwrap();
        assert_eq!(r.provenance.index, Some(0));
        assert_eq!(r.provenance.branch, "reverse-walk");
        let table = count_walks(&m, 8);
        assert_eq!(compare_with_oracle(&r.q00, &table, Slice::Q00, 6, 0), None);
        assert_eq!(compare_with_oracle(&r.qx0, &table, Slice::Qx0, 6, 6), None);
    }

    #[test]
    fn model15_weighted_matches_oracle() {
        let cat = Catalog::builtin();
        let m = cat
            .get("model15")
            .unwrap()
            .model()
            .with_weights(ratio(1, 2), rat(1), ratio(1, 3))
            .unwrap();
        let r = solve_half_symmetric_interacting(&m, 6, 16).unwrap();
        let table = count_walks(&m, 8);
        assert_eq!(compare_with_oracle(&r.qx0, &table, Slice::Qx0, 6, 6), None);
        assert_eq!(compare_with_oracle(&r.q00, &table, Slice::Q00, 6, 0), None);
    }

    #[test]
    fn model18_small_case() {
        let cat = Catalog::builtin();
        let m = cat.get("model18").unwrap().model();
        let r = solve_model18(&m, 4, 16).unwrap();
        let table = count_walks(&m, 6);
        assert_eq!(compare_with_oracle(&r.q00, &table, Slice::Q00, 4, 0), None);
        assert_eq!(compare_with_oracle(&r.qx0, &table, Slice::Qx0, 4, 4), None);
        assert_eq!(compare_with_oracle(&r.q0y, &table, Slice::Q0y, 4, 4), None);
    }

    #[test]
    fn index_values_pin_the_branches() {
        let cat = Catalog::builtin();
        for b in [rat(2), rat(3), ratio(1, 2)] {
            let m5 = cat
                .get("model05")
                .unwrap()
                .model()
                .with_weights(rat(1), b.clone(), rat(1))
                .unwrap();
            let (chi5, _) = half_symmetric_index(&m5, 6, 16).unwrap();
            assert_eq!(chi5, 0, "three-step model at b={}", format_rat(&b));
            let m15 = cat
                .get("model15")
                .unwrap()
                .model()
                .with_weights(rat(1), b.clone(), rat(1))
                .unwrap();
            let (chi15, _) = half_symmetric_index(&m15, 6, 16).unwrap();
            assert_eq!(chi15, -1, "reverse model at b={}", format_rat(&b));
        }
    }
}
