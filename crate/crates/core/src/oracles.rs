//! Exhaustive checks of the combinatorial lemmas behind the bounds. Each one
//! enumerates its own lattice box and does not reuse the pipeline's search.

use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::blowup::{lambda_d, lambda_leading_form};
use crate::bounds::s1_value;
use crate::series::{LaurentPoly, Rat};
use crate::wallcross::compositions;

fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl OracleReport {
    fn new(name: &str) -> Self {
        OracleReport {
            name: name.into(),
            passed: true,
            ..Default::default()
        }
    }

    fn fail(&mut self, msg: String) {
        self.passed = false;
        self.failures.push(msg);
    }

    fn merge(&mut self, other: OracleReport) {
        self.checked += other.checked;
        self.passed &= other.passed;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} {} ({} checked)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checked
        )?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        for e in &self.failures {
            writeln!(f, "  failure: {e}")?;
        }
        Ok(())
    }
}

/// Calls `f` on every integer vector of length `n` in `[lo, hi]^n`.
fn for_box(n: usize, lo: i64, hi: i64, f: &mut dyn FnMut(&[i64])) {
    let mut v = vec![lo; n];
    if n == 0 {
        f(&v);
        return;
    }
    loop {
        f(&v);
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            if v[k] < hi {
                v[k] += 1;
                break;
            }
            v[k] = lo;
            k += 1;
        }
    }
}

fn quad_f(y: &[Rat], a: Rat) -> Rat {
    let mut s = a;
    let mut sq = Rat::zero();
    for &v in y {
        s += v;
        sq += v * v;
    }
    sq + s * s
}

/// `y_1^2 + ... + y_n^2 + (A + sum y)^2 >= A^2/(n+1)` on integer boxes, with
/// the value `A^2/(n+1)` attained at `y_i = -A/(n+1)` and larger nearby.
pub fn check_lowerbound2(n_max: usize, grid: &[Rat]) -> OracleReport {
    let mut rep = OracleReport::new("lowerbound2");
    for n in 1..=n_max {
        for &a in grid {
            let floor = a * a / rat(n as i64 + 1);
            let radius = a.abs().ceil().to_integer() + 3;
            let mut int_min: Option<Rat> = None;
            for_box(n, -radius, radius, &mut |y| {
                let yr: Vec<Rat> = y.iter().map(|&v| rat(v)).collect();
                let v = quad_f(&yr, a);
                rep.checked += 1;
                if v < floor {
                    rep.failures
                        .push(format!("n={n} A={a} y={y:?}: {v} < {floor}"));
                }
                if int_min.is_none_or(|m| v < m) {
                    int_min = Some(v);
                }
            });
            let star = vec![-a / rat(n as i64 + 1); n];
            if quad_f(&star, a) != floor {
                rep.fail(format!(
                    "n={n} A={a}: value at the critical point is not A^2/(n+1)"
                ));
            }
            for k in 0..n {
                for t in [
                    Rat::new(-1, 2),
                    Rat::new(1, 2),
                    rat(-1),
                    rat(1),
                    Rat::new(1, 7),
                ] {
                    let mut p = star.clone();
                    p[k] += t;
                    rep.checked += 1;
                    if quad_f(&p, a) <= floor {
                        rep.fail(format!("n={n} A={a}: no strict growth along e_{k} by {t}"));
                    }
                }
            }
            if n == 1 && a == rat(1) {
                rep.notes.push(format!(
                    "n=1 A=1 integer minimum {}",
                    int_min.unwrap_or_default()
                ));
            }
        }
    }
    if !rep.failures.is_empty() {
        rep.passed = false;
    }
    rep
}

/// Brute-force `Lambda_d` for one `(r, m_bar)` over a plain box.
pub fn brute_lambda(r: u32, m_bar: u32, d: i64) -> LaurentPoly {
    let m = m_bar as i64;
    let n = (r - 1) as usize;
    let bound = ((2 * d + m * m) as f64).sqrt().ceil() as i64 + 1;
    let mut p = LaurentPoly::zero();
    for_box(n, -bound, bound, &mut |b| {
        let sum: i64 = b.iter().sum();
        let sq: i64 = b.iter().map(|v| v * v).sum();
        if m * m + sq + (m + sum).pow(2) == 2 * d {
            let e: i64 = b
                .iter()
                .enumerate()
                .map(|(j, &v)| (r as i64 - 1 - j as i64) * v)
                .sum();
            p.add_term(e, &1.into());
        }
    });
    p
}

/// First nonzero `Lambda_d` sits at `d = (m^2+m)/2` and equals
/// `L^{-r m} sum rho_nu L^nu`.
pub fn check_clm9(r_max: u32) -> OracleReport {
    let cases: Vec<(u32, u32)> = (1..=r_max)
        .flat_map(|r| (0..r).map(move |m| (r, m)))
        .collect();
    let parts: Vec<OracleReport> = cases
        .into_par_iter()
        .map(|(r, m)| {
            let mut rep = OracleReport::new("clm9");
            let d_min = (m * m + m) as i64 / 2;
            for d in 0..d_min {
                rep.checked += 1;
                if !brute_lambda(r, m, d).is_zero() {
                    rep.fail(format!("r={r} m={m}: Lambda_{d} is nonzero"));
                }
            }
            let first = brute_lambda(r, m, d_min);
            rep.checked += 1;
            if first != lambda_leading_form(r, m) {
                rep.fail(format!(
                    "r={r} m={m}: Lambda_{d_min} = {first}, closed form {}",
                    lambda_leading_form(r, m)
                ));
            }
            for d in 0..=d_min + 2 {
                rep.checked += 1;
                match lambda_d(r, m, d) {
                    Ok(p) if p == brute_lambda(r, m, d) => {}
                    Ok(p) => rep.fail(format!(
                        "r={r} m={m} d={d}: table {p} differs from brute force"
                    )),
                    Err(e) => rep.fail(format!("r={r} m={m} d={d}: {e}")),
                }
            }
            rep.notes.push(format!("r={r} m={m}: d_min = {d_min}"));
            rep
        })
        .collect();
    let mut rep = OracleReport::new("clm9");
    for p in parts {
        rep.merge(p);
    }
    rep
}

/// For every `b` with `m^2 + |b|^2 + (m + sum b)^2 = 2d + m^2 + m`, `d <= d_max`:
/// `sum (r-j) b_j <= (r-1) d`, and with `+ (m^2-m)/2` on the left when
/// `r >= 3`, `2 <= m <= r-1`.
pub fn check_clm12(r_max: u32, d_max: i64) -> OracleReport {
    let cases: Vec<(u32, u32)> = (1..=r_max)
        .flat_map(|r| (0..r).map(move |m| (r, m)))
        .collect();
    let parts: Vec<OracleReport> = cases
        .into_par_iter()
        .map(|(r, m)| {
            let mut rep = OracleReport::new("clm12");
            let mi = m as i64;
            let n = (r - 1) as usize;
            let top = 2 * d_max + mi * mi + mi;
            let bound = (top as f64).sqrt().ceil() as i64 + 1;
            let strong = r >= 3 && m >= 2;
            let extra = (mi * mi - mi) / 2;
            let mut tight = Vec::new();
            for_box(n, -bound, bound, &mut |b| {
                let sum: i64 = b.iter().sum();
                let sq: i64 = b.iter().map(|v| v * v).sum();
                let lhs = mi * mi + sq + (mi + sum).pow(2) - mi * mi - mi;
                if lhs < 0 || lhs % 2 != 0 || lhs / 2 > d_max {
                    return;
                }
                let d = lhs / 2;
                let w: i64 = b
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| (r as i64 - 1 - j as i64) * v)
                    .sum();
                rep.checked += 1;
                if w > (r as i64 - 1) * d {
                    rep.failures
                        .push(format!("r={r} m={m} b={b:?}: {w} > (r-1) {d}"));
                }
                if strong {
                    rep.checked += 1;
                    if w + extra > (r as i64 - 1) * d {
                        rep.failures
                            .push(format!("r={r} m={m} b={b:?}: {w} + {extra} > (r-1) {d}"));
                    } else if w + extra == (r as i64 - 1) * d && tight.len() < 8 {
                        tight.push(format!("{b:?}@d={d}"));
                    }
                }
            });
            if !rep.failures.is_empty() {
                rep.passed = false;
            }
            if r == 3 && m == 2 {
                rep.notes
                    .push(format!("r=3 m=2 boundary points: {}", tight.join(" ")));
            }
            rep
        })
        .collect();
    let mut rep = OracleReport::new("clm12");
    for p in parts {
        rep.merge(p);
    }
    rep
}

/// `S_1 >= -r + 3 - 4/r` over every shape and every `a` with
/// `|a_i - alpha/r| <= 5/2`, all residues `alpha`.
pub fn check_s1_bound(r_max: u32) -> OracleReport {
    let mut rep = OracleReport::new("S1_bound");
    for r in 2..=r_max {
        let floor = rat(3 - r as i64) - Rat::new(4, r as i64);
        let mut worst: Option<(Rat, Vec<u32>, Vec<i64>)> = None;
        for comp in compositions(r) {
            for alpha in 0..r as i64 {
                let center = Rat::new(alpha, r as i64);
                let lo = (center - Rat::new(5, 2)).ceil().to_integer();
                let hi = (center + Rat::new(5, 2)).floor().to_integer();
                for_box(comp.len(), lo, hi, &mut |a| {
                    let total: i64 = comp.iter().zip(a).map(|(&ri, &ai)| ri as i64 * ai).sum();
                    if total != alpha {
                        return;
                    }
                    let v = s1_value(&comp, a);
                    rep.checked += 1;
                    if v < floor {
                        rep.failures
                            .push(format!("r={r} shape={comp:?} a={a:?}: S1 = {v} < {floor}"));
                    }
                    if worst.as_ref().is_none_or(|(w, _, _)| v < *w) {
                        worst = Some((v, comp.clone(), a.to_vec()));
                    }
                });
            }
        }
        if let Some((v, c, a)) = worst {
            rep.notes.push(format!(
                "r={r}: min S1 = {v} at shape {c:?}, a = {a:?} (bound {floor})"
            ));
        }
    }
    rep.passed = rep.failures.is_empty();
    rep
}

/// `g(x, y, z, w)` as the right side of the estimate, before simplification.
pub fn g_value(r: i64, m: i64, x: i64, y: i64, z: i64, w: i64) -> Rat {
    let s = x - y + z - w;
    let first = Rat::new((r - 1) * (s * s + 3 * x - y + z + w), 2);
    let second = rat(r * x - m * y + m * z)
        - Rat::new(x * x + x, 2)
        - Rat::new(y * y - y, 2)
        - Rat::new(z * z + z, 2)
        - Rat::new(w * w + w, 2);
    first - second
}

/// `2g = (r-1)(x-y+z-w)^2 + x^2+y^2+z^2+w^2 + (r-2)x + (2m-r)y + (r-2m)z + rw`.
pub fn two_g_closed(r: i64, m: i64, x: i64, y: i64, z: i64, w: i64) -> i64 {
    let s = x - y + z - w;
    (r - 1) * s * s
        + x * x
        + y * y
        + z * z
        + w * w
        + (r - 2) * x
        + (2 * m - r) * y
        + (r - 2 * m) * z
        + r * w
}

/// `g >= 0` for `r <= 6`, every `m`, and `x + y + z + w <= r - 1`.
pub fn check_g_nonneg() -> OracleReport {
    let mut rep = OracleReport::new("g_nonneg");
    for r in 2..=6i64 {
        for m in 0..r {
            for_box(4, 0, r, &mut |v| {
                let (x, y, z, w) = (v[0], v[1], v[2], v[3]);
                if x + y + z + w > r - 1 {
                    return;
                }
                rep.checked += 1;
                let g = g_value(r, m, x, y, z, w);
                if g * 2 != rat(two_g_closed(r, m, x, y, z, w)) {
                    rep.failures
                        .push(format!("r={r} m={m} {v:?}: 2g identity fails ({g})"));
                }
                if g.is_negative() {
                    rep.failures.push(format!("r={r} m={m} {v:?}: g = {g} < 0"));
                }
            });
        }
    }
    rep.passed = rep.failures.is_empty();
    rep
}

/// Every lemma suite at its default size.
pub fn run_lemma_suites() -> Vec<OracleReport> {
    let grid: Vec<Rat> = [-3, -2, -1, 0, 1, 2, 3]
        .iter()
        .flat_map(|&k| [rat(k), Rat::new(2 * k + 1, 2), Rat::new(k, 3)])
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    vec![
        check_lowerbound2(3, &grid),
        check_clm9(5),
        check_clm12(5, 8),
        check_s1_bound(4),
        check_g_nonneg(),
    ]
}
