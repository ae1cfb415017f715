//! Betti numbers of `M(r, aH, c_2)` on `P^2` and their stabilization in `c_2`.
//!
//! The space series `q^{(r-1)a^2/2r} (1 - L^-1)(1 - q) G_{r,aH}` carries
//! `[M] L^{-dim}` at `q^{c_2}`, differenced in `c_2`. Its `L^-N` coefficients
//! summed up to `c_2` give `b_2N` by Poincaré duality.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::blowup::assemble_g;
use crate::chern::ChernP2;
use crate::error::{Error, Result};
use crate::series::{LaurentPoly, QLSeries, Rat, TruncationConfig};

fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

pub fn check_coprime(r: u32, a: i64) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    if (r as i64).gcd(&a) != 1 {
        return Err(Error::NotCoprime { r, a });
    }
    Ok(())
}

/// Truncation for `G` so that the space series reaches `q^{c2_max}`.
pub fn config_for(r: u32, a: i64, window: u32, c2_max: i64) -> Result<TruncationConfig> {
    let shift = ChernP2::c1_shift(r, a);
    TruncationConfig::new(window, rat(c2_max) - shift, 2 * r as i64)
}

/// Space-level series, with `q`-exponents equal to `c_2`.
pub fn space_series(r: u32, a: i64, cfg: &TruncationConfig) -> Result<QLSeries> {
    check_coprime(r, a)?;
    let g = assemble_g(r, a, cfg)?;
    let s = g
        .mul_one_minus(-1, Rat::zero())
        .mul_one_minus(0, Rat::one())
        .mul_monomial(0, ChernP2::c1_shift(r, a), cfg.window)?;
    if let Some((q, _)) = s.iter().find(|(q, _)| !q.is_integer()) {
        return Err(Error::NonIntegralExponent(q.to_string()));
    }
    Ok(s)
}

/// Running sums over `c_2` of each `L^-N` coefficient, for `N <= n_max`.
pub fn cumulative(space: &QLSeries, n_max: u32, c2_max: i64) -> BTreeMap<i64, Vec<BigInt>> {
    let mut acc = vec![BigInt::zero(); n_max as usize + 1];
    let mut out = BTreeMap::new();
    let mut last: Option<i64> = None;
    for (q, p) in space.iter() {
        let c2 = q.to_integer();
        if c2 > c2_max {
            break;
        }
        if let Some(l) = last {
            for c in l + 1..c2 {
                out.insert(c, acc.clone());
            }
        }
        for (n, slot) in acc.iter_mut().enumerate() {
            *slot += p.coeff(-(n as i64));
        }
        out.insert(c2, acc.clone());
        last = Some(c2);
    }
    if let Some(l) = last {
        for c in l + 1..=c2_max {
            out.insert(c, acc.clone());
        }
    }
    out
}

/// `b_0, b_2, ..., b_{2 n_max}` of `M(r, aH, c_2)`.
pub fn betti_numbers(
    r: u32,
    a: i64,
    c2: i64,
    n_max: u32,
    cfg: &TruncationConfig,
) -> Result<Vec<BigInt>> {
    if n_max > cfg.window {
        return Err(Error::WindowExhausted(format!(
            "N_max = {n_max} exceeds W = {}",
            cfg.window
        )));
    }
    let top = cfg.q_max + ChernP2::c1_shift(r, a);
    if rat(c2) > top {
        return Err(Error::WindowExhausted(format!("c2 = {c2} beyond q_max")));
    }
    let space = space_series(r, a, cfg)?;
    Ok(cumulative(&space, n_max, c2)
        .remove(&c2)
        .unwrap_or_else(|| vec![BigInt::zero(); n_max as usize + 1]))
}

/// Poincaré polynomial `sum_N b_2N L^-N` of `M(r, aH, c_2)` inside the window.
pub fn poincare_polynomial(r: u32, a: i64, c2: i64, cfg: &TruncationConfig) -> Result<LaurentPoly> {
    let b = betti_numbers(r, a, c2, cfg.window, cfg)?;
    Ok(LaurentPoly::from_terms(
        b.into_iter().enumerate().map(|(n, c)| (-(n as i64), c)),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiRow {
    pub c2: i64,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(serialize_with = "ser_big")]
    pub b: BigInt,
}

fn ser_big<S: serde::Serializer>(b: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match i64::try_from(b) {
        Ok(v) => s.serialize_i64(v),
        Err(_) => s.collect_str(b),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BettiTable {
    pub r: u32,
    pub a: i64,
    pub window: u32,
    pub q_max: String,
    pub horizon: i64,
    pub rows: Vec<BettiRow>,
    /// Observed onsets only; they are not proven bounds.
    pub onsets: BTreeMap<u32, i64>,
}

impl BettiTable {
    pub fn get(&self, c2: i64, n: u32) -> Option<&BigInt> {
        self.rows
            .iter()
            .find(|row| row.c2 == c2 && row.n == n)
            .map(|row| &row.b)
    }

    /// Values of `b_2N` by `c_2`.
    pub fn column(&self, n: u32) -> Vec<(i64, BigInt)> {
        self.rows
            .iter()
            .filter(|row| row.n == n)
            .map(|row| (row.c2, row.b.clone()))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("c2,N,b\n");
        for row in &self.rows {
            s.push_str(&format!("{},{},{}\n", row.c2, row.n, row.b));
        }
        s
    }
}

/// Smallest `c_2` with `Delta >= 0`.
pub fn first_c2(r: u32, a: i64) -> i64 {
    ChernP2::c1_shift(r, a).ceil().to_integer()
}

/// Table of `b_2N` for `N <= n_max` and `c_2` up to `horizon`.
pub fn betti_table(r: u32, a: i64, n_max: u32, horizon: i64, window: u32) -> Result<BettiTable> {
    check_coprime(r, a)?;
    if n_max > window {
        return Err(Error::WindowExhausted(format!(
            "N_max = {n_max} exceeds W = {window}"
        )));
    }
    let cfg = config_for(r, a, window, horizon)?;
    let space = space_series(r, a, &cfg)?;
    Ok(table_from_series(r, a, &cfg, &space, n_max, horizon))
}

pub fn table_from_series(
    r: u32,
    a: i64,
    cfg: &TruncationConfig,
    space: &QLSeries,
    n_max: u32,
    horizon: i64,
) -> BettiTable {
    let cum = cumulative(space, n_max, horizon);
    let start = first_c2(r, a);
    let mut rows = Vec::new();
    for c2 in start..=horizon {
        let zero = vec![BigInt::zero(); n_max as usize + 1];
        let col = cum.get(&c2).unwrap_or(&zero);
        for (n, b) in col.iter().enumerate() {
            rows.push(BettiRow {
                c2,
                n: n as u32,
                b: b.clone(),
            });
        }
    }
    let onsets = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let col: Vec<(i64, BigInt)> = rows
                .iter()
                .filter(|row| row.n == n)
                .map(|row| (row.c2, row.b.clone()))
                .collect();
            (n, onset_of(&col, start))
        })
        .collect();
    BettiTable {
        r,
        a,
        window: cfg.window,
        q_max: cfg.q_max.to_string(),
        horizon,
        rows,
        onsets,
    }
}

/// Smallest `c_2` from which the column is constant through its end.
pub fn onset_of(col: &[(i64, BigInt)], start: i64) -> i64 {
    let Some((_, last)) = col.last() else {
        return start;
    };
    let mut onset = col.last().map(|(c, _)| *c).unwrap_or(start);
    for (c2, b) in col.iter().rev() {
        if b != last {
            break;
        }
        onset = *c2;
    }
    onset
}

/// Observed stabilization onset of `b_2N(M(r, aH, c_2))` up to `horizon`.
pub fn detect_onset(r: u32, a: i64, n: u32, horizon: i64, window: u32) -> Result<i64> {
    let t = betti_table(r, a, n, horizon, window.max(n))?;
    Ok(t.onsets[&n])
}

/// Coefficients of `L^-N`, `N <= n_max`, in `(1 - L^-1) prod_i (1 - L^-i)^-3`.
pub fn stable_limit(n_max: u32) -> Vec<BigInt> {
    let n = n_max as usize;
    let mut c = vec![BigInt::zero(); n + 1];
    c[0] = BigInt::one();
    for i in 1..=n {
        for _ in 0..3 {
            for k in i..=n {
                let prev = c[k - i].clone();
                c[k] += prev;
            }
        }
    }
    let mut out = c.clone();
    for k in 1..=n {
        out[k] -= &c[k - 1];
    }
    out
}

/// First index where `b` differs from the stable limit, if any.
pub fn differs_from_stable(b: &[BigInt]) -> Option<usize> {
    let s = stable_limit(b.len().saturating_sub(1) as u32);
    b.iter().zip(&s).position(|(x, y)| x != y)
}

/// `true` if every `b_2N` in the table is non-negative.
pub fn nonnegative(t: &BettiTable) -> bool {
    t.rows.iter().all(|row| !row.b.is_negative())
}
