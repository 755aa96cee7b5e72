use qwalks::catalog::Catalog;
use qwalks::factor::*;
use qwalks::kernel::*;
use qwalks::number::rat;
use qwalks::orbit::*;
use qwalks::series::TSeries;
use num_traits::One;

fn info(name: &str, s: &TSeries) {
    let ex = s.exactness();
    println!(
        "{name}: val_t={} cap={} span={:?} margins=({},{}) clean=({},{}) exact=[{},{}]",
        s.val_t(), s.cap(), s.stored_span(), ex.margin_lo, ex.margin_hi, ex.clean_lo, ex.clean_hi,
        s.exact_lo(), s.exact_hi()
    );
}

fn main() {
    let cap = 8i64;
    let window = 80i64;
    let cat = Catalog::builtin();
    let m = cat.get("model18").unwrap().model();
    let eq = build_functional_equation(&m);
    let y0 = kernel_root_y0(&m, cap, window);
    info("y0", &y0);
    let phi = GroupElement::new(qwalks::expr::parse_frac("y/x").unwrap(), qwalks::expr::parse_frac("y").unwrap());
    let chi = GroupElement::new(qwalks::expr::parse_frac("y/x").unwrap(), qwalks::expr::parse_frac("1/x").unwrap());
    let e1 = substitute_orbit(&m, &eq, &GroupElement::identity(), &y0).unwrap();
    let e2 = substitute_orbit(&m, &eq, &phi, &y0).unwrap();
    let e3 = substitute_orbit(&m, &eq, &chi, &y0).unwrap();
    let elim = orbit_eliminate(&[e1, e2, e3], &[UnknownTag::Q0Y0, UnknownTag::QY0OverX0]).unwrap();
    let eqn = &elim.equation;
    for (t, s, _) in &eqn.terms { info(t.label(), s); }
    info("rhs", &eqn.rhs);
    let c_inv_raw = eqn.coeff(UnknownTag::Q0InvX).unwrap().clone();
    let inv_fact = canonical_factorize(&c_inv_raw).unwrap();
    println!("inv_fact: {}", inv_fact.describe());
    let inv_inverse = c_inv_raw.invert().unwrap();
    info("inv_inverse", &inv_inverse);
    let scale = inv_inverse.mul_monomial(inv_fact.k, inv_fact.l, &rat(1));
    let c_x = eqn.coeff(UnknownTag::Qx0).unwrap().mul(&scale);
    info("c_x scaled", &c_x);
    let factors = canonical_factorize(&c_x).unwrap();
    println!("factors: {}", factors.describe());
    info("F-", &factors.f_minus);
    info("F0", &factors.f_zero);
    info("F+", &factors.f_plus);
    let expm = factors.f_minus.neg().exp_series().unwrap();
    info("exp(-F-)", &expm);
    let multiplier = expm.mul_monomial(-factors.k, -factors.l, &rat(1).recip());
    info("multiplier", &multiplier);
    let rhs_m = eqn.rhs.mul(&scale).mul(&multiplier);
    info("rhs_m", &rhs_m);
    let e_pos = factors.f_zero.exp_series().unwrap().mul(&factors.f_plus.exp_series().unwrap());
    info("e_pos", &e_pos);
    let one = TSeries::one(cap, window); let _ = one; let _ = Rat_one();
}
fn Rat_one() -> qwalks::number::Rat { qwalks::number::Rat::one() }
