//! Ground truth: dynamic-programming enumeration of interacting
//! quarter-plane walks, the closed form for the simple walk, and the
//! reverse-model construction.
//!
//! Every solver pipeline is checked against these tables. The DP attaches
//! the boundary weights to the vertex a step lands on: `a` on the x-axis
//! (origin excluded), `b` on the y-axis (origin excluded), `c` at the
//! origin. The empty walk has weight 1.

use num_traits::{One, Zero};

use crate::kernel::{build_functional_equation, Model};
use crate::laurent::LaurentPoly;
use crate::number::{binomial, format_rat, Rat};
use crate::series::TSeries;
use crate::BivarLaurent;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum grid size before a DP layer is parallelized.
#[cfg(feature = "parallel")]
const PAR_MIN_CELLS: usize = 256;

/// Exact weighted counts `W(n, k, l)` for walks of length `n` from the
/// origin to `(k, l)`, confined to the quadrant.
#[derive(Debug, Clone)]
pub struct CountTable {
    n_max: i64,
    /// `layers[n]` is the `(n_max+1) × (n_max+1)` grid at length `n`,
    /// indexed `k * (n_max+1) + l`.
    layers: Vec<Vec<Rat>>,
}

impl CountTable {
    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn get(&self, n: i64, k: i64, l: i64) -> Rat {
        let side = self.n_max + 1;
        if n < 0 || n > self.n_max || k < 0 || k >= side || l < 0 || l >= side {
            return Rat::zero();
        }
        self.layers[n as usize][(k * side + l) as usize].clone()
    }

    /// CSV export: header `n,k,l,weight_num,weight_den`, rows ascending by
    /// `n`, then `k`, then `l`; zero entries are omitted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,l,weight_num,weight_den\n");
        for n in 0..=self.n_max {
            for k in 0..=self.n_max {
                for l in 0..=self.n_max {
                    let w = self.get(n, k, l);
                    if !w.is_zero() {
                        out.push_str(&format!("{n},{k},{l},{},{}\n", w.numer(), w.denom()));
                    }
                }
            }
        }
        out
    }
}

/// Boundary weight picked up by landing on `(k, l)`.
fn landing_weight(model: &Model, k: i64, l: i64) -> Option<Rat> {
    if k == 0 && l == 0 {
        Some(model.c.clone())
    } else if l == 0 {
        Some(model.a.clone())
    } else if k == 0 {
        Some(model.b.clone())
    } else {
        None
    }
}

pub fn count_walks(model: &Model, n_max: i64) -> CountTable {
    #[cfg(feature = "parallel")]
    {
        count_walks_impl(model, n_max, true)
    }
    #[cfg(not(feature = "parallel"))]
    {
        count_walks_impl(model, n_max, false)
    }
}

/// Sequential DP; the fallback used when the `parallel` feature is off,
/// public so benchmarks can compare both code paths.
pub fn count_walks_seq(model: &Model, n_max: i64) -> CountTable {
    count_walks_impl(model, n_max, false)
}

fn count_walks_impl(model: &Model, n_max: i64, parallel: bool) -> CountTable {
    assert!(n_max >= 0);
    let side = (n_max + 1) as usize;
    let mut layers = Vec::with_capacity(side);
    let mut prev = vec![Rat::zero(); side * side];
    prev[0] = Rat::one(); // the empty walk
    layers.push(prev.clone());
    let deltas: Vec<(i64, i64)> = model.steps.deltas().collect();
    for _n in 1..=n_max {
        let cell = |idx: usize| -> Rat {
            let k = (idx / side) as i64;
            let l = (idx % side) as i64;
            let mut acc = Rat::zero();
            for &(dx, dy) in &deltas {
                let pk = k - dx;
                let pl = l - dy;
                if pk < 0 || pl < 0 || pk >= side as i64 || pl >= side as i64 {
                    continue;
                }
                let w = &prev[(pk as usize) * side + pl as usize];
                if !w.is_zero() {
                    acc += w;
                }
            }
            if acc.is_zero() {
                return acc;
            }
            match landing_weight(model, k, l) {
                Some(w) => acc * w,
                None => acc,
            }
        };
        let next: Vec<Rat>;
        #[cfg(feature = "parallel")]
        {
            if parallel && side * side >= PAR_MIN_CELLS {
                next = (0..side * side).into_par_iter().map(cell).collect();
            } else {
                next = (0..side * side).map(cell).collect();
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = parallel;
            next = (0..side * side).map(cell).collect();
        }
        layers.push(next.clone());
        prev = next;
    }
    CountTable { n_max, layers }
}

/// Which generating-function slice to assemble from a count table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slice {
    /// `Q(x, 0) = Σ_n t^n Σ_k W(n,k,0) x^k`
    Qx0,
    /// `Q(0, y)` with the roles of the axes swapped into the x-window.
    Q0y,
    /// `Q(0, 0) = Σ_n t^n W(n,0,0)`
    Q00,
    /// Walks ending on the horizontal line `y = i`.
    QLine(i64),
}

pub fn oracle_series(table: &CountTable, slice: Slice, cap: i64, window: i64) -> TSeries {
    let n_hi = table.n_max.min(cap);
    let mut pairs = Vec::new();
    for n in 0..=n_hi {
        let mut p = LaurentPoly::zero();
        match slice {
            Slice::Qx0 => {
                for k in 0..=table.n_max {
                    p.add_term(k, table.get(n, k, 0));
                }
            }
            Slice::Q0y => {
                for l in 0..=table.n_max {
                    p.add_term(l, table.get(n, 0, l));
                }
            }
            Slice::Q00 => {
                p.add_term(0, table.get(n, 0, 0));
            }
            Slice::QLine(i) => {
                for k in 0..=table.n_max {
                    p.add_term(k, table.get(n, k, i));
                }
            }
        }
        pairs.push((n, p));
    }
    TSeries::from_t_coeffs(pairs, cap, window)
}

/// The full generating function `Q(x, y)` up to length `n_max`, as an exact
/// polynomial; used for functional-equation residual checks.
pub fn oracle_bivariate(table: &CountTable) -> BivarLaurent {
    let mut q = BivarLaurent::zero();
    for n in 0..=table.n_max {
        for k in 0..=table.n_max {
            for l in 0..=table.n_max {
                q.add_term(k, l, n, table.get(n, k, l));
            }
        }
    }
    q
}

/// Closed form for the unweighted simple walk: the number of `n`-step
/// quadrant walks from the origin to `(i, j)` as a binomial difference.
pub fn closed_form_simple(n: i64, i: i64, j: i64) -> Rat {
    if n < 0 || (n + i - j) % 2 != 0 {
        return Rat::zero();
    }
    let up = (n + i - j) / 2;
    let dn = (n - i - j) / 2;
    binomial(n, up) * binomial(n + 2, dn) - binomial(n + 2, up + 1) * binomial(n, dn - 1)
}

/// Reverse every step; weights are unchanged.
pub fn reverse_model(model: &Model) -> Model {
    model.reversed()
}

/// Brute-force path enumerator (exponential); cross-checks the DP for
/// small lengths.
pub fn enumerate_naive(model: &Model, n: i64) -> Rat {
    fn go(model: &Model, deltas: &[(i64, i64)], pos: (i64, i64), left: i64) -> Rat {
        if left == 0 {
            return Rat::one();
        }
        let mut acc = Rat::zero();
        for &(dx, dy) in deltas {
            let nk = pos.0 + dx;
            let nl = pos.1 + dy;
            if nk < 0 || nl < 0 {
                continue;
            }
            let w = landing_weight(model, nk, nl).unwrap_or_else(Rat::one);
            acc += w * go(model, deltas, (nk, nl), left - 1);
        }
        acc
    }
    let deltas: Vec<(i64, i64)> = model.steps.deltas().collect();
    go(model, &deltas, (0, 0), n)
}

/// Residual of the boundary-interaction functional equation with every
/// unknown replaced by oracle data, as an exact polynomial truncated to the
/// table's certified t-range. Zero certifies the equation end to end.
pub fn functional_equation_residual(model: &Model, table: &CountTable) -> BivarLaurent {
    let eq = build_functional_equation(model);
    let q = oracle_bivariate(table);
    let mut qx0 = BivarLaurent::zero();
    let mut q0y = BivarLaurent::zero();
    let mut q00 = BivarLaurent::zero();
    for ((dx, dy, dt), c) in q.iter() {
        if dy == 0 {
            qx0.add_term(dx, 0, dt, c.clone());
        }
        if dx == 0 {
            q0y.add_term(0, dy, dt, c.clone());
        }
        if dx == 0 && dy == 0 {
            q00.add_term(0, 0, dt, c.clone());
        }
    }
    let residual = eq
        .lhs
        .mul(&q)
        .sub(&eq.coeff_const)
        .sub(&eq.coeff_qx0.mul(&qx0))
        .sub(&eq.coeff_q0y.mul(&q0y))
        .sub(&eq.coeff_q00.mul(&q00));
    let mut out = BivarLaurent::zero();
    for ((dx, dy, dt), c) in residual.iter() {
        if dt <= table.n_max {
            out.add_term(dx, dy, dt, c.clone());
        }
    }
    out
}

/// Mismatch report between a solved series and the oracle slice, or `None`
/// if they agree for all orders ≤ `n_hi` and degrees `0..=deg_hi` within
/// the series' certified window.
pub fn compare_with_oracle(
    series: &TSeries,
    table: &CountTable,
    slice: Slice,
    n_hi: i64,
    deg_hi: i64,
) -> Option<String> {
    let n_hi = n_hi.min(series.cap()).min(table.n_max);
    for n in 0..=n_hi {
        for k in 0..=deg_hi.min(series.exact_hi()) {
            let got = series.coeff(n, k);
            let want = match slice {
                Slice::Qx0 => table.get(n, k, 0),
                Slice::Q0y => table.get(n, 0, k),
                Slice::Q00 => {
                    if k == 0 {
                        table.get(n, 0, 0)
                    } else {
                        Rat::zero()
                    }
                }
                Slice::QLine(i) => table.get(n, k, i),
            };
            if got != want {
                return Some(format!(
                    "mismatch at t^{n} x^{k}: engine {} vs oracle {}",
                    format_rat(&got),
                    format_rat(&want)
                ));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::model_from_tokens;
    use crate::number::{rat, ratio};

    fn simple() -> Model {
        model_from_tokens("simple", "N,W,S,E").unwrap()
    }

    #[test]
    fn simple_walk_small_counts() {
        let t = count_walks(&simple(), 4);
        assert_eq!(t.get(0, 0, 0), rat(1));
        // length 2 back at the origin: {EW, NS}
        assert_eq!(t.get(2, 0, 0), rat(2));
        // single east step lands on the x-axis: weight a
        let m = simple().with_weights(rat(2), rat(3), rat(5)).unwrap();
        let tw = count_walks(&m, 2);
        assert_eq!(tw.get(1, 1, 0), rat(2));
        assert_eq!(tw.get(1, 0, 1), rat(3));
    }

    #[test]
    fn closed_form_matches_dp_for_simple_walk() {
        let t = count_walks(&simple(), 12);
        for n in 0..=12 {
            for i in 0..=n {
                for j in 0..=n {
                    assert_eq!(
                        closed_form_simple(n, i, j),
                        t.get(n, i, j),
                        "disagreement at (n,i,j)=({n},{i},{j})"
                    );
                }
            }
        }
        assert_eq!(closed_form_simple(0, 0, 0), rat(1));
        assert_eq!(closed_form_simple(2, 0, 0), rat(2));
        assert_eq!(closed_form_simple(3, 0, 0), rat(0)); // parity
    }

    #[test]
    fn naive_enumeration_matches_column_sums() {
        for tokens in ["N,W,S,E", "NW,S,NE", "N,SW,SE"] {
            let m = model_from_tokens("m", tokens).unwrap();
            let t = count_walks(&m, 8);
            for n in 0..=8 {
                let mut sum = Rat::zero();
                for k in 0..=8 {
                    for l in 0..=8 {
                        sum += t.get(n, k, l);
                    }
                }
                assert_eq!(sum, enumerate_naive(&m, n), "{tokens} at n={n}");
            }
        }
    }

    #[test]
    fn model15_first_return_and_weights() {
        // steps N,SW,SE: returns to the origin need n ≡ 0 (mod 4);
        // the first nonzero return is W(4,0,0) = b²c + abc.
        let m15 = model_from_tokens("model15", "N,SW,SE").unwrap();
        let t = count_walks(&m15, 8);
        for n in 1..4 {
            assert!(t.get(n, 0, 0).is_zero());
        }
        assert_eq!(t.get(4, 0, 0), rat(2));
        assert!(t.get(5, 0, 0).is_zero());
        let w = m15.with_weights(rat(2), rat(3), rat(5)).unwrap();
        let tw = count_walks(&w, 4);
        // b²c + abc = 9·5 + 2·3·5 = 75
        assert_eq!(tw.get(4, 0, 0), rat(75));
    }

    #[test]
    fn reverse_walk_origin_identity() {
        let cat = crate::catalog::Catalog::builtin();
        let weights = [
            (rat(1), rat(1), rat(1)),
            (ratio(1, 2), rat(1), ratio(1, 3)),
            (rat(2), rat(3), rat(5)),
        ];
        for entry in cat.entries() {
            for (a, b, c) in weights.clone() {
                let m = entry.model().with_weights(a, b, c).unwrap();
                let t = count_walks(&m, 10);
                let tr = count_walks(&reverse_model(&m), 10);
                for n in 0..=10 {
                    assert_eq!(
                        t.get(n, 0, 0),
                        tr.get(n, 0, 0),
                        "reverse-walk identity fails for {} at n={n}",
                        entry.name
                    );
                }
            }
        }
    }

    #[test]
    fn oracle_series_simple_prefix() {
        // Q(x,0) = 1 + x·t + (x²+2)·t² + …
        let t = count_walks(&simple(), 6);
        let qx0 = oracle_series(&t, Slice::Qx0, 6, 8);
        assert_eq!(qx0.coeff(0, 0), rat(1));
        assert_eq!(qx0.coeff(1, 1), rat(1));
        assert_eq!(qx0.coeff(1, 0), rat(0));
        assert_eq!(qx0.coeff(2, 2), rat(1));
        assert_eq!(qx0.coeff(2, 0), rat(2));
        // empty table: constant series 1
        let t0 = count_walks(&simple(), 0);
        let q = oracle_series(&t0, Slice::Q00, 0, 2);
        assert!(q.same_values(&TSeries::one(0, 2)));
    }

    #[test]
    fn functional_equation_residual_vanishes() {
        let cat = crate::catalog::Catalog::builtin();
        let weights = [
            (rat(1), rat(1), rat(1)),
            (rat(2), rat(3), rat(5)),
            (ratio(1, 2), rat(1), ratio(1, 3)),
        ];
        for name in ["simple", "model05", "model15", "model18", "kreweras", "gessel"] {
            let entry = cat.get(name).unwrap();
            for (a, b, c) in weights.clone() {
                let m = entry.model().with_weights(a, b, c).unwrap();
                let table = count_walks(&m, 8);
                let r = functional_equation_residual(&m, &table);
                assert!(r.is_zero(), "residual nonzero for {name}: {r}");
            }
        }
    }

    #[test]
    fn csv_export_shape() {
        let t = count_walks(&simple(), 4);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,k,l,weight_num,weight_den"));
        assert!(csv.lines().any(|l| l == "2,0,0,2,1"));
        // deterministic ordering: (n, k, l) ascending
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        let mut sorted = rows.clone();
        sorted.sort_by_key(|r| {
            let mut it = r.split(',').map(|v| v.parse::<i64>().unwrap_or(0));
            (it.next(), it.next(), it.next())
        });
        assert_eq!(rows, sorted);
    }

    #[test]
    fn count_walks_seq_matches_parallel() {
        let m = model_from_tokens("m", "N,NW,W,S,SE,E").unwrap();
        let a = count_walks(&m, 9);
        let b = count_walks_seq(&m, 9);
        for n in 0..=9 {
            for k in 0..=9 {
                for l in 0..=9 {
                    assert_eq!(a.get(n, k, l), b.get(n, k, l));
                }
            }
        }
    }
}
