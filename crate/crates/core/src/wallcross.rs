//! Wall-crossing from the `mu_F` chamber to the `mu_{E+F}` chamber on `F_1`.
//!
//! `G~_{r,c}(q)` is a signed sum over ordered decompositions
//! `(r_i, c_i = r_i a_i E + b_i F)` of
//! `L^{prefactor} (L^-r q)^{defect} prod_i L^{r_i^2} H_{r_i}(L^{-(r+r_i)} q)`.
//!
//! Write `s_i = b_i + ... + b_l`, `R_i = r_i + ... + r_l`, `d_i = a_i - a_{i-1}`
//! and `sigma_i = s_i - beta R_i / r`. Index `i >= 2` is in case A when
//! `d_i < 0, sigma_i >= 0` and in case B when `d_i >= 0, sigma_i < 0`; the
//! sign is `(-1)^{#B}` and other terms vanish. With
//! `Q(a) = sum_{i<j} r_i r_j (a_i - a_j)^2 / 2r` one has
//!
//! ```text
//! defect = Q(a) - sum_i d_i sigma_i
//! t      = prefactor - r defect
//!        = sum_{i<j} r_i r_j (1 - (a_i - a_j)/2) - r Q(a)
//!          + sum_i (r_i + r_{i-1} + r d_i) sigma_i
//! ```
//!
//! and every `sigma` contribution raises the defect and lowers `t`. Since each
//! `H` factor has `L`-degree at most zero, a term only matters when
//! `defect <= q_max` and `t >= -W`, which bounds the search.

use std::collections::BTreeMap;
use std::io::Write;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::chern::{prefactor_l, suffix_sums, yoshioka_defect, DecompPart};
use crate::error::{Error, Result};
use crate::mozgovoy::{check_vanishing, normalized_h_cached, HKey, VanishingReport};
use crate::series::{LaurentPoly, QLSeries, Rat, TruncationConfig};

/// One contributing ordered decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompTerm {
    pub parts: Vec<DecompPart>,
    pub sign: i8,
    pub defect: Rat,
    pub prefactor_l: Rat,
    pub s_list: Vec<i64>,
    /// Some `s_i` sits exactly on `beta R_i / r`.
    pub boundary: bool,
}

impl DecompTerm {
    pub fn rank(&self) -> u32 {
        self.parts.iter().map(|p| p.r).sum()
    }

    pub fn composition(&self) -> Vec<u32> {
        self.parts.iter().map(|p| p.r).collect()
    }

    /// Highest `L`-power the term can reach.
    pub fn l_exponent(&self) -> Rat {
        self.prefactor_l - self.defect * Rat::from_integer(self.rank() as i64)
    }

    pub fn parts_label(&self) -> String {
        self.parts
            .iter()
            .map(|p| format!("{}:{}:{}", p.r, p.a, p.b))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// `+1` for one part; otherwise `(-1)^{#B}` if every index is in case A or B.
pub fn smu_sign(parts: &[DecompPart], b_total: i64) -> i8 {
    if parts.len() <= 1 {
        return 1;
    }
    let r: i64 = parts.iter().map(|p| p.r as i64).sum();
    let s = suffix_sums(parts);
    let mut tail: i64 = parts.iter().map(|p| p.r as i64).sum();
    let mut sign = 1;
    for i in 1..parts.len() {
        tail -= parts[i - 1].r as i64;
        let d = parts[i].a - parts[i - 1].a;
        // s_i >= b R_i / r  <=>  r s_i >= b R_i
        let above = r * s[i] >= b_total * tail;
        match (d < 0, above) {
            (true, true) => {}
            (false, false) => sign = -sign,
            _ => return 0,
        }
    }
    sign
}

/// All ordered compositions of `r`.
pub fn compositions(r: u32) -> Vec<Vec<u32>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=r {
        for mut rest in compositions(r - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Integers `a` with `r_i (r a - alpha)^2 <= 2 r^2 q` (from `Q <= q`).
fn a_range(ri: i64, r: i64, alpha: i64, q: Rat) -> (i64, i64) {
    let ok = |a: i64| rat(ri * (r * a - alpha).pow(2)) <= q * rat(2 * r * r);
    let center = alpha.div_euclid(r);
    if !ok(center) && !ok(center + 1) {
        return (center + 1, center);
    }
    let mut lo = if ok(center) { center } else { center + 1 };
    while ok(lo - 1) {
        lo -= 1;
    }
    let mut hi = lo;
    while ok(hi + 1) {
        hi += 1;
    }
    (lo, hi)
}

struct Bounds {
    window: i64,
    q_max: Rat,
}

/// Enumerate every term with `defect <= q_max` and `t >= -W`.
pub fn enumerate_terms(r: u32, alpha: i64, beta: i64, cfg: &TruncationConfig) -> Vec<DecompTerm> {
    enumerate_terms_with(r, alpha, beta, cfg, false)
}

/// As [`enumerate_terms`]; with `doubled` the search is run with twice the
/// window and `q` range before the same final filter, to confirm that the
/// pruning never drops a contributing term.
pub fn enumerate_terms_with(
    r: u32,
    alpha: i64,
    beta: i64,
    cfg: &TruncationConfig,
    doubled: bool,
) -> Vec<DecompTerm> {
    let search = if doubled {
        Bounds {
            window: 2 * cfg.window as i64 + 2,
            q_max: cfg.q_max * 2 + 2,
        }
    } else {
        Bounds {
            window: cfg.window as i64,
            q_max: cfg.q_max,
        }
    };
    let mut terms: Vec<DecompTerm> = compositions(r)
        .into_par_iter()
        .flat_map_iter(|comp| enumerate_composition(&comp, alpha, beta, &search))
        .filter(|t| t.defect <= cfg.q_max && t.l_exponent() >= rat(-(cfg.window as i64)))
        .collect();
    terms.sort_by(|x, y| {
        (x.composition(), &x.parts, &x.s_list).cmp(&(y.composition(), &y.parts, &y.s_list))
    });
    terms
}

fn enumerate_composition(comp: &[u32], alpha: i64, beta: i64, b: &Bounds) -> Vec<DecompTerm> {
    let r: i64 = comp.iter().map(|&x| x as i64).sum();
    let l = comp.len();
    let mut out = Vec::new();
    if l == 1 {
        if alpha.rem_euclid(r) == 0 {
            out.push(DecompTerm {
                parts: vec![DecompPart::new(comp[0], alpha / r, beta)],
                sign: 1,
                defect: Rat::zero(),
                prefactor_l: Rat::zero(),
                s_list: vec![beta],
                boundary: false,
            });
        }
        return out;
    }
    let ranges: Vec<(i64, i64)> = comp
        .iter()
        .map(|&ri| a_range(ri as i64, r, alpha, b.q_max))
        .collect();
    let mut a = vec![0i64; l];
    enumerate_a(comp, alpha, beta, b, &ranges, 0, 0, &mut a, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate_a(
    comp: &[u32],
    alpha: i64,
    beta: i64,
    b: &Bounds,
    ranges: &[(i64, i64)],
    i: usize,
    partial: i64,
    a: &mut [i64],
    out: &mut Vec<DecompTerm>,
) {
    let l = comp.len();
    if i == l - 1 {
        let rest = alpha - partial;
        let rl = comp[l - 1] as i64;
        if rest.rem_euclid(rl) != 0 {
            return;
        }
        let al = rest / rl;
        if al < ranges[l - 1].0 || al > ranges[l - 1].1 {
            return;
        }
        a[l - 1] = al;
        enumerate_s(comp, beta, b, a, out);
        return;
    }
    for ai in ranges[i].0..=ranges[i].1 {
        a[i] = ai;
        enumerate_a(
            comp,
            alpha,
            beta,
            b,
            ranges,
            i + 1,
            partial + comp[i] as i64 * ai,
            a,
            out,
        );
    }
}

fn enumerate_s(comp: &[u32], beta: i64, b: &Bounds, a: &[i64], out: &mut Vec<DecompTerm>) {
    let l = comp.len();
    let r: i64 = comp.iter().map(|&x| x as i64).sum();
    let rr: Vec<i64> = comp.iter().map(|&x| x as i64).collect();
    let mut q = Rat::zero();
    let mut t = Rat::zero();
    for i in 0..l {
        for j in i + 1..l {
            let w = rr[i] * rr[j];
            let diff = a[i] - a[j];
            q += Rat::new(w * diff * diff, 2 * r);
            t += rat(w) - Rat::new(w * diff, 2);
        }
    }
    t -= q * rat(r);
    let floor = rat(-b.window);
    if q > b.q_max || t < floor {
        return;
    }
    // tails[i] = r_i + ... + r_l
    let mut tails = vec![0i64; l + 1];
    for i in (0..l).rev() {
        tails[i] = tails[i + 1] + rr[i];
    }
    let mut s = vec![0i64; l];
    s[0] = beta;
    walk_s(comp, a, &rr, &tails, r, beta, b, 1, q, t, &mut s, out);
}

#[allow(clippy::too_many_arguments)]
fn walk_s(
    comp: &[u32],
    a: &[i64],
    rr: &[i64],
    tails: &[i64],
    r: i64,
    beta: i64,
    b: &Bounds,
    i: usize,
    defect: Rat,
    t: Rat,
    s: &mut [i64],
    out: &mut Vec<DecompTerm>,
) {
    let l = comp.len();
    if i == l {
        emit(comp, a, beta, s, out);
        return;
    }
    let floor = rat(-b.window);
    let x = Rat::new(beta * tails[i], r);
    let d = a[i] - a[i - 1];
    let coeff = rat(rr[i] + rr[i - 1] + r * d);
    let start = x.ceil().to_integer();
    let (mut si, step) = if d < 0 { (start, 1) } else { (start - 1, -1) };
    loop {
        let sigma = rat(si) - x;
        let nd = defect - rat(d) * sigma;
        let nt = t + coeff * sigma;
        if nd > b.q_max || nt < floor {
            // Both quantities move monotonically with |sigma|. The one
            // exception is case A with d = -1 and two parts, where the
            // coefficient of t vanishes and only the defect bounds the walk.
            break;
        }
        s[i] = si;
        walk_s(comp, a, rr, tails, r, beta, b, i + 1, nd, nt, s, out);
        si += step;
    }
}

fn emit(comp: &[u32], a: &[i64], beta: i64, s: &[i64], out: &mut Vec<DecompTerm>) {
    let l = comp.len();
    let parts: Vec<DecompPart> = (0..l)
        .map(|i| {
            let next = if i + 1 < l { s[i + 1] } else { 0 };
            DecompPart::new(comp[i], a[i], s[i] - next)
        })
        .collect();
    let sign = smu_sign(&parts, beta);
    debug_assert_ne!(sign, 0);
    let defect = yoshioka_defect(&parts).expect("non-empty");
    let prefactor = prefactor_l(&parts).expect("non-empty");
    let r: i64 = comp.iter().map(|&x| x as i64).sum();
    let mut tail = r;
    let mut boundary = false;
    for i in 1..l {
        tail -= comp[i - 1] as i64;
        if r * s[i] == beta * tail {
            boundary = true;
        }
    }
    out.push(DecompTerm {
        parts,
        sign,
        defect,
        prefactor_l: prefactor,
        s_list: s.to_vec(),
        boundary,
    });
}

/// Assembly switches.
#[derive(Clone, Copy, Debug)]
pub struct AssembleOptions {
    /// Reduce `alpha`, `beta` modulo `r` first.
    pub normalize: bool,
    /// Search with doubled bounds (validation only).
    pub doubled: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            normalize: true,
            doubled: false,
        }
    }
}

/// `G~_{r, alpha E + beta F}(q)` within `cfg`.
pub fn assemble_gtilde(r: u32, alpha: i64, beta: i64, cfg: &TruncationConfig) -> Result<QLSeries> {
    assemble_gtilde_with(r, alpha, beta, cfg, &AssembleOptions::default())
}

pub fn assemble_gtilde_with(
    r: u32,
    alpha: i64,
    beta: i64,
    cfg: &TruncationConfig,
    opts: &AssembleOptions,
) -> Result<QLSeries> {
    if r == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let (alpha, beta) = if opts.normalize {
        (alpha.rem_euclid(r as i64), beta.rem_euclid(r as i64))
    } else {
        (alpha, beta)
    };
    let terms = enumerate_terms_with(r, alpha, beta, cfg, opts.doubled);
    assemble_from_terms(r, &terms, cfg)
}

/// Sum the given terms against their `H` factors.
pub fn assemble_from_terms(
    r: u32,
    terms: &[DecompTerm],
    cfg: &TruncationConfig,
) -> Result<QLSeries> {
    let mut groups: BTreeMap<Vec<u32>, Vec<&DecompTerm>> = BTreeMap::new();
    for t in terms {
        groups.entry(t.composition()).or_default().push(t);
    }
    let pieces: Vec<Result<QLSeries>> = groups
        .into_par_iter()
        .map(|(comp, ts)| assemble_group(r, &comp, &ts, cfg))
        .collect();
    let mut total = QLSeries::zero(cfg);
    for p in pieces {
        total = total.add(&p?)?;
    }
    Ok(total)
}

fn assemble_group(
    r: u32,
    comp: &[u32],
    terms: &[&DecompTerm],
    cfg: &TruncationConfig,
) -> Result<QLSeries> {
    let mut top = 0i64;
    let mut monomials = Vec::with_capacity(terms.len());
    for t in terms {
        let e = t.l_exponent();
        if !e.is_integer() {
            return Err(Error::FractionalShift(format!(
                "term {} has L-exponent {e}",
                t.parts_label()
            )));
        }
        let e = e.to_integer();
        top = top.max(e);
        monomials.push((e, t.defect, t.sign));
    }
    let ext = cfg.with_window(cfg.window + top as u32);
    let mut signed = QLSeries::zero(&ext);
    for (e, defect, sign) in monomials {
        signed.add_term(defect, LaurentPoly::monomial(sign, e));
    }
    let mut factor = QLSeries::one(&ext);
    for &ri in comp {
        let h = normalized_h_cached(
            HKey {
                r: ri,
                divisible: true,
            },
            &ext,
        )?;
        factor = factor.mul(&h.scale_q(-((r - ri) as i64))?)?;
    }
    signed.mul(&factor)?.retruncate(cfg.window, cfg.q_max)
}

/// `(1 - q) G~` has no `L^-N q^Delta` term for `Delta > N + bound`.
pub fn verify_gtilde_vanishing(
    r: u32,
    alpha: i64,
    beta: i64,
    n_max: u32,
    d_max: i64,
    bound: Rat,
) -> Result<VanishingReport> {
    let cfg = TruncationConfig::new(n_max, rat(d_max), 2 * r as i64)?;
    let g = assemble_gtilde(r, alpha, beta, &cfg)?.mul_one_minus(0, Rat::one());
    Ok(check_vanishing(
        format!("G~ r={r} c={alpha}E+{beta}F"),
        &g,
        n_max,
        rat(d_max),
        bound,
    ))
}

/// CSV audit trail: `parts,sign,defect,prefactor_l,boundary`.
pub fn write_ledger<W: Write>(terms: &[DecompTerm], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("ledger write failed: {e}"));
    w.write_record(["parts", "sign", "defect", "prefactor_l", "boundary"])
        .map_err(io)?;
    for t in terms {
        w.write_record([
            t.parts_label(),
            t.sign.to_string(),
            t.defect.to_string(),
            t.prefactor_l.to_string(),
            t.boundary.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("ledger write failed: {e}")))?;
    Ok(())
}

/// Largest absolute `a_i` among the terms, for box diagnostics.
pub fn max_abs_a(terms: &[DecompTerm]) -> i64 {
    terms
        .iter()
        .flat_map(|t| t.parts.iter().map(|p| p.a.abs()))
        .max()
        .unwrap_or(0)
}

/// `sigma_i` values of a term, as rationals.
pub fn sigmas(term: &DecompTerm, beta: i64) -> Vec<Rat> {
    let r = term.rank() as i64;
    let mut tail = r;
    let mut out = Vec::new();
    for i in 1..term.parts.len() {
        tail -= term.parts[i - 1].r as i64;
        out.push(rat(term.s_list[i]) - Rat::new(beta * tail, r));
    }
    out
}

/// Smallest `|sigma|` over a term's indices, zero when on the boundary.
pub fn min_abs_sigma(term: &DecompTerm, beta: i64) -> Option<Rat> {
    sigmas(term, beta).into_iter().map(|s| s.abs()).min()
}
