//! Stack generating function of `mu_F`-semistable sheaves on `F_1`, normalized
//! as `L^{r^2} H_r(L^{-2r} q)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{QLSeries, Rat, TruncationConfig};

/// `H` only depends on the rank and on whether `r | c.F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HKey {
    pub r: u32,
    pub divisible: bool,
}

impl HKey {
    /// Key for `c = alpha E + beta F`, where `c.F = alpha`.
    pub fn for_class(r: u32, alpha: i64) -> Self {
        HKey {
            r,
            divisible: alpha.rem_euclid(r as i64) == 0,
        }
    }
}

/// Motivic zeta function of `P^1`, `1/((1 - x)(1 - L x))`, at `x = L^l q^q`.
pub fn zeta_p1(l: i64, q: Rat, cfg: &TruncationConfig) -> Result<QLSeries> {
    if q.is_zero() && l + 1 >= 0 {
        return Err(Error::Divergent {
            l: l.max(l + 1),
            q: q.to_string(),
        });
    }
    QLSeries::one(cfg)
        .div_one_minus(l, q, 1)?
        .div_one_minus(l + 1, q, 1)
}

fn multiply_zeta(s: QLSeries, l: i64, q: Rat) -> Result<QLSeries> {
    s.div_one_minus(l, q, 1)?.div_one_minus(l + 1, q, 1)
}

/// `L^{r^2} H_r(L^{-2r} q)`, or zero when `r` does not divide `c.F`.
pub fn normalized_h(key: HKey, cfg: &TruncationConfig) -> Result<QLSeries> {
    if key.r == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    if !key.divisible {
        return Ok(QLSeries::zero(cfg));
    }
    let r = key.r as i64;
    let mut s = QLSeries::one(cfg).div_one_minus(-r, Rat::zero(), 1)?;
    for i in 1..r {
        s = s.div_one_minus(-i, Rat::zero(), 2)?;
    }
    for k in 1..=cfg.q_max.floor().to_integer() {
        let q = Rat::from_integer(k);
        for i in -r..r {
            s = multiply_zeta(s, -r * k + i, q)?;
        }
    }
    Ok(s)
}

type CacheKey = (HKey, u32, Rat, i64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<OnceLock<QLSeries>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<OnceLock<QLSeries>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized [`normalized_h`]; each key is computed once even under contention.
pub fn normalized_h_cached(key: HKey, cfg: &TruncationConfig) -> Result<QLSeries> {
    let slot = {
        let mut map = cache().lock().expect("cache lock poisoned");
        map.entry((key, cfg.window, cfg.q_max, cfg.denom))
            .or_default()
            .clone()
    };
    if let Some(s) = slot.get() {
        return Ok(s.clone());
    }
    let s = normalized_h(key, cfg)?;
    Ok(slot.get_or_init(|| s).clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    pub label: String,
    pub n_max: u32,
    pub d_max: String,
    pub checked: u64,
    pub violations: Vec<String>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that `L^-N q^Delta` vanishes in `series` whenever `Delta > N + shift`.
pub fn check_vanishing(
    label: impl Into<String>,
    series: &QLSeries,
    n_max: u32,
    d_max: Rat,
    shift: Rat,
) -> VanishingReport {
    let mut checked = 0;
    let mut violations = Vec::new();
    for (d, p) in series.iter() {
        if d > d_max {
            break;
        }
        for n in 0..=n_max {
            if d > Rat::from_integer(n as i64) + shift {
                checked += 1;
                let c = p.coeff(-(n as i64));
                if !c.is_zero() {
                    violations.push(format!("L^-{n} q^{d}: {c}"));
                }
            }
        }
    }
    VanishingReport {
        label: label.into(),
        n_max,
        d_max: d_max.to_string(),
        checked,
        violations,
    }
}

/// `(1 - q) L^{r^2} H_r(L^{-2r} q)` has no `L^-N q^Delta` term for `Delta > N`.
pub fn verify_stack_vanishing(r: u32, n_max: u32, d_max: i64) -> Result<VanishingReport> {
    if r < 2 {
        return Err(Error::InvalidArgument(
            "stack vanishing is stated for r >= 2".into(),
        ));
    }
    let cfg = TruncationConfig::integral(n_max, d_max);
    let h = normalized_h(HKey { r, divisible: true }, &cfg)?.mul_one_minus(0, Rat::from_integer(1));
    Ok(check_vanishing(
        format!("stack r={r}"),
        &h,
        n_max,
        Rat::from_integer(d_max),
        Rat::zero(),
    ))
}
