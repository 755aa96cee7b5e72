//! Step sets, kernels, functional equations, kernel roots, and symmetry
//! groups of quarter-plane walk models.
//!
//! The functional equation is stored denominator-cleared: every coefficient
//! block is an exact Laurent polynomial in `(x, y, t)`, obtained from the
//! boundary-interaction equation by multiplying through with `abc·xy`.

use num_traits::{One, Zero};

use crate::bivar::{BivarLaurent, Frac};
use crate::laurent::LaurentPoly;
use crate::number::{rat, Rat};
use crate::series::TSeries;
use crate::{Error, Result};

/// One of the eight small steps, by compass direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Step {
    pub fn delta(self) -> (i64, i64) {
        match self {
            Step::N => (0, 1),
            Step::NE => (1, 1),
            Step::E => (1, 0),
            Step::SE => (1, -1),
            Step::S => (0, -1),
            Step::SW => (-1, -1),
            Step::W => (-1, 0),
            Step::NW => (-1, 1),
        }
    }

    pub fn from_delta(d: (i64, i64)) -> Option<Step> {
        Some(match d {
            (0, 1) => Step::N,
            (1, 1) => Step::NE,
            (1, 0) => Step::E,
            (1, -1) => Step::SE,
            (0, -1) => Step::S,
            (-1, -1) => Step::SW,
            (-1, 0) => Step::W,
            (-1, 1) => Step::NW,
            _ => return None,
        })
    }

    pub fn token(self) -> &'static str {
        match self {
            Step::N => "N",
            Step::NE => "NE",
            Step::E => "E",
            Step::SE => "SE",
            Step::S => "S",
            Step::SW => "SW",
            Step::W => "W",
            Step::NW => "NW",
        }
    }

    pub fn parse(tok: &str) -> Result<Step> {
        Ok(match tok {
            "N" => Step::N,
            "NE" => Step::NE,
            "E" => Step::E,
            "SE" => Step::SE,
            "S" => Step::S,
            "SW" => Step::SW,
            "W" => Step::W,
            "NW" => Step::NW,
            other => return Err(Error::Parse(format!("unknown step token {other:?}"))),
        })
    }
}

/// Nonempty set of small steps; `(0,0)` is excluded by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepSet {
    steps: Vec<Step>,
}

impl StepSet {
    pub fn new(mut steps: Vec<Step>) -> Result<Self> {
        steps.sort();
        steps.dedup();
        if steps.is_empty() {
            return Err(Error::Parse("empty step set".into()));
        }
        Ok(StepSet { steps })
    }

    pub fn parse(tokens: &str) -> Result<Self> {
        let steps = tokens
            .split(|c| c == ',' || c == ' ')
            .filter(|s| !s.is_empty())
            .map(Step::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn deltas(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.steps.iter().map(|s| s.delta())
    }

    pub fn contains(&self, s: Step) -> bool {
        self.steps.contains(&s)
    }

    /// Reversed step set: every `(dx, dy)` becomes `(-dx, -dy)`.
    pub fn reversed(&self) -> StepSet {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let (dx, dy) = s.delta();
                Step::from_delta((-dx, -dy)).expect("reversal of a small step")
            })
            .collect();
        StepSet::new(steps).expect("nonempty")
    }

    pub fn tokens(&self) -> String {
        self.steps
            .iter()
            .map(|s| s.token())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A walk model: step set plus the three boundary interaction weights.
/// `a` weights steps landing on the x-axis (origin excluded), `b` the
/// y-axis (origin excluded), `c` the origin itself.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub steps: StepSet,
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl Model {
    pub fn new(name: impl Into<String>, steps: StepSet, a: Rat, b: Rat, c: Rat) -> Result<Self> {
        for (label, w) in [("a", &a), ("b", &b), ("c", &c)] {
            if *w <= Rat::zero() {
                return Err(Error::Parse(format!("weight {label} must be positive")));
            }
        }
        Ok(Model {
            name: name.into(),
            steps,
            a,
            b,
            c,
        })
    }

    pub fn unweighted(name: impl Into<String>, steps: StepSet) -> Self {
        Model {
            name: name.into(),
            steps,
            a: Rat::one(),
            b: Rat::one(),
            c: Rat::one(),
        }
    }

    pub fn with_weights(&self, a: Rat, b: Rat, c: Rat) -> Result<Self> {
        Model::new(self.name.clone(), self.steps.clone(), a, b, c)
    }

    /// Same weights, reversed steps.
    pub fn reversed(&self) -> Model {
        Model {
            name: format!("{}-reversed", self.name),
            steps: self.steps.reversed(),
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }
}

/// Step generator `S(x, y) = Σ x^i y^j` over the step set.
pub fn step_generator(model: &Model) -> BivarLaurent {
    let mut s = BivarLaurent::zero();
    for (dx, dy) in model.steps.deltas() {
        s.add_term(dx, dy, 0, Rat::one());
    }
    s
}

/// The kernel `K(x, y) = 1 - t·S(x, y)`.
pub fn kernel(model: &Model) -> BivarLaurent {
    BivarLaurent::one().sub(&step_generator(model).mul_monomial(0, 0, 1, &Rat::one()))
}

/// Row decomposition `S = A_{-1}(x)/y + A_0(x) + A_1(x)·y` (and the
/// column version with the roles of x and y swapped).
pub struct StepSlices {
    pub a_m1: LaurentPoly,
    pub a_0: LaurentPoly,
    pub a_1: LaurentPoly,
}

fn slice_by_y(s: &BivarLaurent, j: i64) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for ((dx, dy, dt), c) in s.iter() {
        debug_assert_eq!(dt, 0);
        if dy == j {
            p.add_term(dx, c.clone());
        }
    }
    p
}

pub fn y_slices_of_steps(model: &Model) -> StepSlices {
    let s = step_generator(model);
    StepSlices {
        a_m1: slice_by_y(&s, -1),
        a_0: slice_by_y(&s, 0),
        a_1: slice_by_y(&s, 1),
    }
}

pub fn x_slices_of_steps(model: &Model) -> StepSlices {
    let s = step_generator(model).swap_xy();
    StepSlices {
        a_m1: slice_by_y(&s, -1),
        a_0: slice_by_y(&s, 0),
        a_1: slice_by_y(&s, 1),
    }
}

/// Denominator-cleared functional equation
/// `abc·xy·K(x,y)·Q(x,y) = const + cx0·Q(x,0) + c0y·Q(0,y) + c00·Q(0,0)`.
#[derive(Debug, Clone)]
pub struct FuncEq {
    pub lhs: BivarLaurent,
    pub coeff_const: BivarLaurent,
    pub coeff_qx0: BivarLaurent,
    pub coeff_q0y: BivarLaurent,
    pub coeff_q00: BivarLaurent,
}

/// Build the boundary-interaction functional equation with the weights
/// specialized, all four coefficient blocks cleared to Laurent polynomials.
pub fn build_functional_equation(model: &Model) -> FuncEq {
    let (a, b, c) = (&model.a, &model.b, &model.c);
    let abc = a.clone() * b.clone() * c.clone();
    let xy = BivarLaurent::monomial(1, 1, 0, Rat::one());
    let s = step_generator(model);
    let ys = y_slices_of_steps(model);
    let xs = x_slices_of_steps(model);

    // lhs = abc·xy·K(x,y)
    let lhs = xy.mul(&kernel(model)).scale(&abc);

    // coefficient of Q(x,0): bc·xy·(a - 1 - t·a·A_{-1}(x)/y)
    let bc = b.clone() * c.clone();
    let mut cx0 = xy.scale(&(bc.clone() * (a.clone() - Rat::one())));
    for (d, v) in ys.a_m1.iter() {
        // -t·a·A_{-1}(x)·x  (the 1/y cancels one y)
        cx0.add_term(d + 1, 0, 1, -(bc.clone() * a.clone() * v.clone()));
    }

    // coefficient of Q(0,y): ac·xy·(b - 1 - t·b·B_{-1}(y)/x)
    let ac = a.clone() * c.clone();
    let mut c0y = xy.scale(&(ac.clone() * (b.clone() - Rat::one())));
    for (d, v) in xs.a_m1.iter() {
        c0y.add_term(0, d + 1, 1, -(ac.clone() * b.clone() * v.clone()));
    }

    // coefficient of Q(0,0): xy·(ac + bc - ab - abc)/1 + t·[x^{-1}y^{-1}]S
    let corner = s.coeff(-1, -1, 0);
    let mut c00 = xy.scale(
        &(ac.clone() + bc.clone() - a.clone() * b.clone() - abc.clone()),
    );
    c00.add_term(0, 0, 1, corner * abc.clone());

    // constant term: abc·xy·(1/c) = ab·xy
    let coeff_const = xy.scale(&(a.clone() * b.clone()));

    FuncEq {
        lhs,
        coeff_const,
        coeff_qx0: cx0,
        coeff_q0y: c0y,
        coeff_q00: c00,
    }
}

/// Small kernel root `Y0`: the unique solution of `K(x, Y) = 0` with
/// t-valuation 1, computed by the fixed point `Y <- t(A_{-1} + A_0·Y + A_1·Y²)`.
pub fn kernel_root_y0(model: &Model, cap: i64, window: i64) -> TSeries {
    let ys = y_slices_of_steps(model);
    root_from_slices(&ys, cap, window)
}

/// Small root in the other variable: `X0` with `K(X0, y) = 0`, `val_t = 1`.
pub fn kernel_root_x0(model: &Model, cap: i64, window: i64) -> TSeries {
    let xs = x_slices_of_steps(model);
    root_from_slices(&xs, cap, window)
}

fn root_from_slices(sl: &StepSlices, cap: i64, window: i64) -> TSeries {
    let am1 = TSeries::from_t_coeffs([(0, sl.a_m1.clone())], cap, window);
    let a0 = TSeries::from_t_coeffs([(0, sl.a_0.clone())], cap, window);
    let a1 = TSeries::from_t_coeffs([(0, sl.a_1.clone())], cap, window);
    let mut y = TSeries::zero(cap, window);
    // each pass fixes one more t-order; val_t(Y) = 1 throughout
    for _ in 0..=cap {
        let y2 = y.mul(&y);
        let rhs = am1.add(&a0.mul(&y)).add(&a1.mul(&y2));
        let next = rhs.mul_monomial(0, 1, &Rat::one()).truncate_t(cap);
        if next.same_values(&y) {
            break;
        }
        y = next;
    }
    y
}

/// Element of the kernel symmetry group: a pair of rational maps.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub map_x: Frac,
    pub map_y: Frac,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            map_x: Frac::from_poly(BivarLaurent::var_x()),
            map_y: Frac::from_poly(BivarLaurent::var_y()),
        }
    }

    pub fn new(map_x: Frac, map_y: Frac) -> Self {
        GroupElement { map_x, map_y }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let cx = frac_compose(&self.map_x, &other.map_x, &other.map_y);
        let cy = frac_compose(&self.map_y, &other.map_x, &other.map_y);
        GroupElement {
            map_x: cx,
            map_y: cy,
        }
    }

    pub fn eq_element(&self, other: &Self) -> bool {
        self.map_x.eq_frac(&other.map_x) && self.map_y.eq_frac(&other.map_y)
    }

    pub fn is_identity(&self) -> bool {
        self.eq_element(&GroupElement::identity())
    }
}

fn frac_compose(f: &Frac, gx: &Frac, gy: &Frac) -> Frac {
    let num = f.num.compose_map(gx, gy);
    let den = f.den.compose_map(gx, gy);
    num.mul(&den.recip())
}

/// True iff `K(g(x,y))` equals `K(x,y)` as an exact rational function.
pub fn check_kernel_invariance(model: &Model, g: &GroupElement) -> bool {
    let k = kernel(model);
    let composed = k.compose_map(&g.map_x, &g.map_y);
    composed.eq_frac(&Frac::from_poly(k))
}

/// Result of closing a generator set.
#[derive(Debug, Clone)]
pub enum Closure {
    Group(Vec<GroupElement>),
    InfiniteOrUnknown,
}

/// Close the generators under composition, up to `cap` elements.
pub fn group_closure(generators: &[GroupElement], cap: usize) -> Closure {
    let mut elems: Vec<GroupElement> = vec![GroupElement::identity()];
    let mut frontier: Vec<GroupElement> = vec![GroupElement::identity()];
    while let Some(g) = frontier.pop() {
        for gen in generators {
            let h = gen.compose(&g);
            if !elems.iter().any(|e| e.eq_element(&h)) {
                if elems.len() + 1 > cap {
                    return Closure::InfiniteOrUnknown;
                }
                elems.push(h.clone());
                frontier.push(h);
            }
        }
    }
    Closure::Group(elems)
}

/// Build a model from step tokens with unit weights; used by tests and the
/// inline `--steps` CLI path.
pub fn model_from_tokens(name: &str, tokens: &str) -> Result<Model> {
    Ok(Model::unweighted(name, StepSet::parse(tokens)?))
}

/// Verify `A_1·Y0·Ŷ1 = A_{-1}` with `Ŷ1 = (1/t - A_0)/A_1 - Y0`, the Vieta
/// identity that avoids materializing the large root. Only meaningful when
/// `A_1` is not identically zero.
pub fn vieta_residual(model: &Model, cap: i64, window: i64) -> Result<TSeries> {
    let sl = y_slices_of_steps(model);
    if sl.a_1.is_zero() {
        return Err(Error::Internal("A_1 vanishes; Vieta check not applicable".into()));
    }
    let y0 = kernel_root_y0(model, cap, window);
    let a1 = TSeries::from_t_coeffs([(0, sl.a_1.clone())], cap, window);
    let a0 = TSeries::from_t_coeffs([(0, sl.a_0.clone())], cap, window);
    let am1 = TSeries::from_t_coeffs([(0, sl.a_m1.clone())], cap, window);
    let inv_t = TSeries::monomial(0, -1, rat(1), cap, window);
    let y1_hat = inv_t.sub(&a0).mul(&a1.invert()?).sub(&y0);
    Ok(a1.mul(&y0).mul(&y1_hat).sub(&am1))
}
