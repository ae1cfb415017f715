//! Rank one: Hilbert schemes of points via Göttsche's products.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::series::{QLSeries, Rat, TruncationConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Surface {
    P2,
    F1,
}

impl Surface {
    /// Multiplicity of the middle factor `1/(1 - L^m q^m)`.
    fn middle_power(self) -> u32 {
        match self {
            Surface::P2 => 1,
            Surface::F1 => 2,
        }
    }
}

fn q_terms(cfg: &TruncationConfig) -> i64 {
    cfg.q_max.floor().to_integer()
}

/// `sum_n [X^[n]] q^n`. All `L`-exponents are non-negative, so the window
/// never cuts anything here.
pub fn goettsche_series(surface: Surface, cfg: &TruncationConfig) -> Result<QLSeries> {
    let mut s = QLSeries::one(cfg);
    for m in 1..=q_terms(cfg) {
        let q = Rat::from_integer(m);
        s = s.div_one_minus(m - 1, q, 1)?;
        s = s.div_one_minus(m, q, surface.middle_power())?;
        s = s.div_one_minus(m + 1, q, 1)?;
    }
    Ok(s)
}

/// `G_1(q) = (1 - L^-1)^-1 sum_n [X^[n]] L^-2n q^n`.
pub fn rank_one_g(surface: Surface, cfg: &TruncationConfig) -> Result<QLSeries> {
    goettsche_series(surface, cfg)?
        .scale_q(-2)?
        .div_one_minus(-1, Rat::zero(), 1)
}

/// `(1 - L^-1)(1 - q) G_1`: Hilbert scheme Poincaré polynomials, differenced in `n`.
pub fn rank_one_space_series(surface: Surface, cfg: &TruncationConfig) -> Result<QLSeries> {
    Ok(rank_one_g(surface, cfg)?
        .mul_one_minus(0, Rat::from_integer(1))
        .mul_one_minus(-1, Rat::zero()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Rank1Onset {
    pub n: u32,
    pub onset: i64,
    pub bound: i64,
    pub stable_value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rank1Report {
    pub horizon: i64,
    pub rows: Vec<Rank1Onset>,
    pub passed: bool,
}

/// Observed onsets for `b_2N(Hilb^n P^2)` against the bound `2N`.
pub fn verify_rank1_stabilization(n_max: u32, c2_max: i64) -> Result<Rank1Report> {
    let cfg = TruncationConfig::integral(n_max, c2_max);
    let s = rank_one_space_series(Surface::P2, &cfg)?;
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let mut onset = 0;
        let mut total = BigInt::zero();
        for c2 in 0..=c2_max {
            let c = s.coeff(n, Rat::from_integer(c2))?;
            if !c.is_zero() {
                onset = c2;
            }
            total += c;
        }
        rows.push(Rank1Onset {
            n,
            onset,
            bound: 2 * n as i64,
            stable_value: total.to_string(),
        });
    }
    let passed = rows.iter().all(|r| r.onset <= r.bound);
    Ok(Rank1Report {
        horizon: c2_max,
        rows,
        passed,
    })
}
