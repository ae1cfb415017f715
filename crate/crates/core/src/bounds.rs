//! Stabilization constants: the generic `C_0 = (r^2+1)/2` and `C`, and a
//! refined `C_0` from exact minimization of
//! `2(r-1)(r Delta - sum r_i Delta_i) + sum_{i<j} r_i r_j (mu_j - mu_i).K`
//! over each decomposition shape.
//!
//! That quantity splits as `S_1(a) + S_2(a, s)` with
//! `S_1 = 2(r-1) Q(a) + sum_{i<j} r_i r_j (a_i - a_j)` and
//! `S_2 = -2 sum_i X_i sigma_i`, `X_i = (r-1)(a_i - a_{i-1}) + r_i + r_{i-1}`.
//! The `s_i` are free integers, so `S_2` is minimized index by index.

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::chern::ChernP2;
use crate::error::{Error, Result};
use crate::series::Rat;
use crate::wallcross::compositions;

fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

fn frac(x: Rat) -> Rat {
    x - x.floor()
}

/// `(r^2 + 1) / 2`.
pub fn bound_c0(r: u32) -> Result<Rat> {
    if r < 2 {
        return Err(Error::InvalidArgument(
            "the bound is stated for r >= 2".into(),
        ));
    }
    Ok(Rat::new((r * r + 1) as i64, 2))
}

/// `floor((r-1) a^2 / 2r + C_0)` for a given `C_0`.
pub fn c_from_c0(r: u32, a: i64, c0: Rat) -> i64 {
    (ChernP2::c1_shift(r, a) + c0).floor().to_integer()
}

/// `floor((r-1) a^2 / 2r + (r^2+1)/2)`.
pub fn bound_c(r: u32, a: i64) -> Result<i64> {
    Ok(c_from_c0(r, a, bound_c0(r)?))
}

/// `S_1` at integer `a_i` for ranks `comp`.
pub fn s1_value(comp: &[u32], a: &[i64]) -> Rat {
    let r: i64 = comp.iter().map(|&x| x as i64).sum();
    let mut q = Rat::zero();
    let mut lin = 0i64;
    for i in 0..comp.len() {
        for j in i + 1..comp.len() {
            let w = comp[i] as i64 * comp[j] as i64;
            let d = a[i] - a[j];
            q += Rat::new(w * d * d, 2 * r);
            lin += w * d;
        }
    }
    q * rat(2 * (r - 1)) + rat(lin)
}

/// Smallest `S_2` over the `s_i` compatible with a nonzero sign.
pub fn s2_min(comp: &[u32], a: &[i64], beta: i64) -> Rat {
    let r: i64 = comp.iter().map(|&x| x as i64).sum();
    let mut tail = r;
    let mut total = Rat::zero();
    for i in 1..comp.len() {
        tail -= comp[i - 1] as i64;
        let d = a[i] - a[i - 1];
        let x = (r - 1) * d + comp[i] as i64 + comp[i - 1] as i64;
        let f = frac(-Rat::new(beta * tail, r));
        // case A (d < 0): sigma >= 0, smallest is {-x_i}
        // case B (d >= 0): sigma < 0, smallest |sigma| is 1 - {-x_i}
        let sigma = if d < 0 { f } else { Rat::from_integer(1) - f };
        total += rat(2 * x.abs()) * sigma;
    }
    total
}

fn is_excluded(comp: &[u32], a: &[i64]) -> bool {
    comp.len() == 2 && a[1] - a[0] == -1
}

/// `S_1 + min S_2` at one point.
pub fn kappa_at(comp: &[u32], a: &[i64], beta: i64) -> Result<Rat> {
    if comp.len() < 2 || comp.len() != a.len() {
        return Err(Error::InvalidArgument(
            "need at least two parts with matching a_i".into(),
        ));
    }
    if is_excluded(comp, a) {
        return Err(Error::ExcludedCase(format!(
            "two parts with a_2 - a_1 = -1 at {a:?}"
        )));
    }
    Ok(s1_value(comp, a) + s2_min(comp, a, beta))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KappaWitness {
    pub value: String,
    pub minimizer: Vec<i64>,
    #[serde(skip)]
    pub exact: Rat,
}

fn each_point(
    comp: &[u32],
    alpha: i64,
    ranges: &[(i64, i64)],
    i: usize,
    partial: i64,
    a: &mut Vec<i64>,
    f: &mut dyn FnMut(&[i64]),
) {
    let l = comp.len();
    if i == l - 1 {
        let rest = alpha - partial;
        let rl = comp[l - 1] as i64;
        if rest.rem_euclid(rl) == 0 {
            let v = rest / rl;
            if v >= ranges[i].0 && v <= ranges[i].1 {
                a[i] = v;
                f(a);
            }
        }
        return;
    }
    for v in ranges[i].0..=ranges[i].1 {
        a[i] = v;
        each_point(
            comp,
            alpha,
            ranges,
            i + 1,
            partial + comp[i] as i64 * v,
            a,
            f,
        );
    }
}

/// Exact minimum of `S_1 + S_2` over integer `a` with `sum r_i a_i = alpha`,
/// excluding the two-part `a_2 - a_1 = -1` family. `None` if no point exists.
///
/// The search box `|a_i - alpha/r| <= U` starts at `U = 2` and grows until
/// `S_1 > (r-1)(U^2 - U - (r-1)/4)` outside the box exceeds the best value.
pub fn kappa(comp: &[u32], alpha: i64, beta: i64) -> Option<KappaWitness> {
    if comp.len() < 2 {
        return None;
    }
    let r: i64 = comp.iter().map(|&x| x as i64).sum();
    if alpha.rem_euclid(comp.iter().fold(0i64, |g, &x| g.gcd(&(x as i64)))) != 0 {
        return None;
    }
    let center = Rat::new(alpha, r);
    let mut u = 2i64;
    loop {
        let lo = (center - rat(u)).ceil().to_integer();
        let hi = (center + rat(u)).floor().to_integer();
        let ranges = vec![(lo, hi); comp.len()];
        let mut best: Option<(Rat, Vec<i64>)> = None;
        let mut a = vec![0i64; comp.len()];
        each_point(comp, alpha, &ranges, 0, 0, &mut a, &mut |pt| {
            if is_excluded(comp, pt) {
                return;
            }
            let v = s1_value(comp, pt) + s2_min(comp, pt, beta);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, pt.to_vec()));
            }
        });
        let outside = rat(r - 1) * (rat(u * u - u) - Rat::new(r - 1, 4));
        match best {
            Some((v, m)) if outside >= v => {
                return Some(KappaWitness {
                    value: v.to_string(),
                    minimizer: m,
                    exact: v,
                })
            }
            _ if u > 64 => return None,
            _ => u += 1,
        }
    }
}

/// `1 + (r^2 - sum r_i^2)/2 - kappa/2` for one shape.
pub fn shape_term(comp: &[u32], kappa: Rat) -> Rat {
    let r: i64 = comp.iter().map(|&x| x as i64).sum();
    let sq: i64 = comp.iter().map(|&x| (x as i64).pow(2)).sum();
    rat(1) + Rat::new(r * r - sq, 2) - kappa / 2
}

/// `r_1 r_2 / 2r + ceil(beta r_2 / r) - beta r_2 / r`, when some `a` gives
/// `a_2 - a_1 = -1`, i.e. `r | alpha + r_2`.
pub fn special_term(r: u32, r2: u32, alpha: i64, beta: i64) -> Option<Rat> {
    let (r, r2) = (r as i64, r2 as i64);
    if r2 <= 0 || r2 >= r || (alpha + r2).rem_euclid(r) != 0 {
        return None;
    }
    let x = Rat::new(beta * r2, r);
    Some(Rat::new((r - r2) * r2, 2 * r) + x.ceil() - x)
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaTerm {
    pub composition: Vec<u32>,
    pub kappa: Option<KappaWitness>,
    pub term: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinedC0 {
    pub value: String,
    #[serde(skip)]
    pub exact: Rat,
    pub shapes: Vec<KappaTerm>,
    pub special: Vec<(u32, String)>,
}

/// Refined `C_0` for `c = alpha E + beta F` on `F_1`.
pub fn refined_c0_detail(r: u32, alpha: i64, beta: i64) -> Result<RefinedC0> {
    if r < 2 {
        return Err(Error::InvalidArgument(
            "the bound is stated for r >= 2".into(),
        ));
    }
    let mut best = Rat::zero();
    let mut shapes = Vec::new();
    for comp in compositions(r).into_iter().filter(|c| c.len() >= 2) {
        let k = kappa(&comp, alpha, beta);
        let term = k.as_ref().map(|w| shape_term(&comp, w.exact));
        if let Some(t) = term {
            best = best.max(t);
        }
        shapes.push(KappaTerm {
            composition: comp,
            kappa: k,
            term: term.map(|t| t.to_string()),
        });
    }
    let mut special = Vec::new();
    for r2 in 1..r {
        if let Some(t) = special_term(r, r2, alpha, beta) {
            best = best.max(t);
            special.push((r2, t.to_string()));
        }
    }
    Ok(RefinedC0 {
        value: best.to_string(),
        exact: best,
        shapes,
        special,
    })
}

pub fn refined_c0(r: u32, alpha: i64, beta: i64) -> Result<Rat> {
    Ok(refined_c0_detail(r, alpha, beta)?.exact)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub r: u32,
    pub a: i64,
    pub c0_generic: String,
    pub c0_refined: String,
    #[serde(rename = "C")]
    pub c: i64,
    #[serde(rename = "C_refined")]
    pub c_refined: i64,
    pub kappa_terms: Vec<KappaTerm>,
    pub special_terms: Vec<(u32, String)>,
}

/// Constants for `M(r, aH, c_2)`, taking the class `a(E + F)` on `F_1`.
pub fn bound_report(r: u32, a: i64) -> Result<BoundReport> {
    let c0 = bound_c0(r)?;
    let (alpha, beta) = (a.rem_euclid(r as i64), a.rem_euclid(r as i64));
    let refined = refined_c0_detail(r, alpha, beta)?;
    Ok(BoundReport {
        r,
        a,
        c0_generic: c0.to_string(),
        c0_refined: refined.value.clone(),
        c: c_from_c0(r, a, c0),
        c_refined: c_from_c0(r, a, refined.exact),
        kappa_terms: refined.shapes,
        special_terms: refined.special,
    })
}
