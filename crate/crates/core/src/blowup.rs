//! The blow-up factor `F_m(L^-2r q)` and the passage from `F_1` back to `P^2`.
//!
//! Writing `m_bar = m mod r`,
//!
//! ```text
//! F(L^-2r q) = prod_k (1 - L^-rk q^k)^-r  (L^-r q)^{-(r+1) m_bar^2 / 2r}
//!              L^{(r-1) m_bar / 2}  sum_d Lambda_d (L^-r q)^d
//! ```
//!
//! where `Lambda_d = sum L^{sum_j (r-j) b_j}` over `b in Z^{r-1}` with
//! `(m_bar^2 + |b|^2 + (m_bar + sum b)^2) / 2 = d`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{LaurentPoly, QLSeries, Rat, TruncationConfig};
use crate::wallcross::assemble_gtilde;

fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// `Lambda_d^{(m_bar)}` for `d <= d_max`.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaTable {
    pub r: u32,
    pub m_bar: u32,
    pub d_max: i64,
    values: BTreeMap<i64, LaurentPoly>,
}

impl LambdaTable {
    /// Enumerate the lattice points with `|b|^2 <= 2 d_max - m_bar^2`.
    pub fn build(r: u32, m_bar: u32, d_max: i64) -> Result<Self> {
        if r == 0 || m_bar >= r {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= m_bar < r, got r = {r}, m_bar = {m_bar}"
            )));
        }
        let mut values: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        let m = m_bar as i64;
        let budget = 2 * d_max - m * m;
        if budget >= 0 {
            let n = (r - 1) as usize;
            let mut b = vec![0i64; n];
            walk(r as i64, m, d_max, budget, 0, 0, 0, &mut b, &mut values);
        }
        Ok(LambdaTable {
            r,
            m_bar,
            d_max,
            values,
        })
    }

    pub fn get(&self, d: i64) -> LaurentPoly {
        self.values.get(&d).cloned().unwrap_or_default()
    }

    /// Nonzero entries in increasing `d`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &LaurentPoly)> + '_ {
        self.values.iter().map(|(&d, p)| (d, p))
    }

    pub fn first_nonzero(&self) -> Option<i64> {
        self.values.keys().next().copied()
    }
}

#[allow(clippy::too_many_arguments)]
fn walk(
    r: i64,
    m: i64,
    d_max: i64,
    budget: i64,
    j: usize,
    sq: i64,
    sum: i64,
    b: &mut [i64],
    out: &mut BTreeMap<i64, LaurentPoly>,
) {
    if j == b.len() {
        let twice = m * m + sq + (m + sum).pow(2);
        debug_assert_eq!(twice % 2, 0);
        let d = twice / 2;
        if d <= d_max {
            let e: i64 = b
                .iter()
                .enumerate()
                .map(|(i, &bi)| (r - 1 - i as i64) * bi)
                .sum();
            out.entry(d).or_default().add_term(e, &1.into());
        }
        return;
    }
    let rad = ((budget - sq) as f64).sqrt().floor() as i64 + 1;
    for v in -rad..=rad {
        let nsq = sq + v * v;
        if nsq > budget {
            continue;
        }
        b[j] = v;
        walk(r, m, d_max, budget, j + 1, nsq, sum + v, b, out);
    }
    b[j] = 0;
}

type TableKey = (u32, u32);

fn tables() -> &'static Mutex<HashMap<TableKey, Arc<LambdaTable>>> {
    static T: OnceLock<Mutex<HashMap<TableKey, Arc<LambdaTable>>>> = OnceLock::new();
    T.get_or_init(Default::default)
}

/// Shared table covering at least `d_max`; grown on demand.
pub fn lambda_table(r: u32, m_bar: u32, d_max: i64) -> Result<Arc<LambdaTable>> {
    let mut map = tables().lock().expect("lambda table lock poisoned");
    if let Some(t) = map.get(&(r, m_bar)) {
        if t.d_max >= d_max {
            return Ok(t.clone());
        }
    }
    let t = Arc::new(LambdaTable::build(r, m_bar, d_max)?);
    map.insert((r, m_bar), t.clone());
    Ok(t)
}

pub fn lambda_d(r: u32, m_bar: u32, d: i64) -> Result<LaurentPoly> {
    if d < 0 {
        return Ok(LaurentPoly::zero());
    }
    Ok(lambda_table(r, m_bar, d)?.get(d))
}

/// `#{1 <= j_1 < ... < j_m <= r : sum j = nu}`, with `rho_0 = 1` for `m = 0`.
pub fn rho_counts(r: u32, m_bar: u32, nu: i64) -> u64 {
    // dp[k][s]: k-subsets of the integers seen so far with sum s
    let m = m_bar as usize;
    if nu < 0 {
        return 0;
    }
    let nu = nu as usize;
    let mut dp = vec![vec![0u64; nu + 1]; m + 1];
    dp[0][0] = 1;
    for j in 1..=r as usize {
        for k in (1..=m).rev() {
            for s in (j..=nu).rev() {
                dp[k][s] += dp[k - 1][s - j];
            }
        }
    }
    dp[m][nu]
}

/// `L^{-r m_bar} sum_nu rho_nu L^nu`, the first nonzero `Lambda`.
pub fn lambda_leading_form(r: u32, m_bar: u32) -> LaurentPoly {
    let lo = (m_bar * (m_bar + 1) / 2) as i64;
    let hi = (r * m_bar) as i64 - (m_bar as i64 * (m_bar as i64 - 1)) / 2;
    let mut p = LaurentPoly::zero();
    for nu in lo..=hi {
        let c = rho_counts(r, m_bar, nu);
        if c > 0 {
            p.add_term(nu - (r * m_bar) as i64, &c.into());
        }
    }
    p
}

/// `L`-power of the monomial prefactor: `(r+1) m^2 / 2 + (r-1) m / 2`.
fn prefactor_l(r: i64, m: i64) -> i64 {
    ((r + 1) * m * m + (r - 1) * m) / 2
}

/// `q`-power of the monomial prefactor: `-(r+1) m^2 / 2r`.
fn prefactor_q(r: i64, m: i64) -> Rat {
    Rat::new(-(r + 1) * m * m, 2 * r)
}

/// Lowest `q`-exponent of `F`, `m (r - m) / 2r`.
pub fn leading_q(r: u32, m_bar: u32) -> Rat {
    let (r, m) = (r as i64, m_bar as i64);
    Rat::new(m * (r - m), 2 * r)
}

/// `prod_k (1 - L^-rk q^k)^-r` within `cfg`.
pub fn eta_factor(r: u32, cfg: &TruncationConfig) -> Result<QLSeries> {
    let r = r as i64;
    let mut s = QLSeries::one(cfg);
    for k in 1..=cfg.q_max.floor().to_integer() {
        s = s.div_one_minus(-r * k, rat(k), r as u32)?;
    }
    Ok(s)
}

/// `F_{m_bar}(L^-2r q)` within `cfg`.
pub fn f_normalized(r: u32, m_bar: u32, cfg: &TruncationConfig) -> Result<QLSeries> {
    if r == 0 || m_bar >= r {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= m_bar < r, got r = {r}, m_bar = {m_bar}"
        )));
    }
    let (ri, m) = (r as i64, m_bar as i64);
    let e_l = prefactor_l(ri, m);
    let e_q = prefactor_q(ri, m);
    let inner = TruncationConfig::new(cfg.window + e_l as u32, cfg.q_max - e_q, cfg.denom)?;
    let table = lambda_table(r, m_bar, (cfg.q_max - e_q).floor().to_integer())?;
    let mut sum = QLSeries::zero(&inner);
    for (d, p) in table.iter() {
        sum.add_term(rat(d), p.shift(-ri * d));
    }
    let sum = sum.mul_monomial(e_l, e_q, cfg.window)?;
    let eta = eta_factor(r, &sum.config())?;
    eta.mul(&sum)
}

/// `F_{m_bar}(L^-2r q)^-1` within `cfg`, by generic series inversion.
pub fn f_inverse(r: u32, m_bar: u32, cfg: &TruncationConfig) -> Result<QLSeries> {
    let y0 = leading_q(r, m_bar);
    let f = f_normalized(r, m_bar, &cfg.with_q_max(cfg.q_max + y0 * 2))?;
    f.invert()?.retruncate(cfg.window, cfg.q_max)
}

/// `G_{r, aH}` through the blow-up, lifting with `m = a mod r`.
pub fn assemble_g(r: u32, a: i64, cfg: &TruncationConfig) -> Result<QLSeries> {
    if r == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    assemble_g_with_lift(r, a, a.rem_euclid(r as i64), cfg)
}

/// As [`assemble_g`] with an explicit multiplicity `m` at the blown-up point.
pub fn assemble_g_with_lift(r: u32, a: i64, m: i64, cfg: &TruncationConfig) -> Result<QLSeries> {
    if r == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let m_bar = m.rem_euclid(r as i64) as u32;
    let y0 = leading_q(r, m_bar);
    let wide = cfg.with_q_max(cfg.q_max + y0);
    let finv = f_inverse(r, m_bar, &wide)?;
    let gt = assemble_gtilde(r, a - m, a, &wide)?;
    finv.mul(&gt)?.retruncate(cfg.window, cfg.q_max)
}

/// `F * F^-1`, which should be exactly one inside `cfg`.
pub fn f_roundtrip(r: u32, m_bar: u32, cfg: &TruncationConfig) -> Result<QLSeries> {
    let y0 = leading_q(r, m_bar);
    let wide = cfg.with_q_max(cfg.q_max + y0);
    let f = f_normalized(r, m_bar, &wide)?;
    let finv = f_inverse(r, m_bar, &wide)?;
    f.mul(&finv)?.retruncate(cfg.window, cfg.q_max)
}

/// Whether `s` is exactly `1`.
pub fn is_one(s: &QLSeries) -> bool {
    let mut it = s.iter();
    match it.next() {
        Some((q, p)) => q.is_zero() && *p == LaurentPoly::one() && it.next().is_none(),
        None => false,
    }
}
