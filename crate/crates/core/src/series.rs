//! Truncated series in two variables: Laurent polynomials in `L`, cut off below
//! `L^-W`, with rational powers of `q`, cut off above `q_max`.
//!
//! Dropping everything below the floor is the intended quotient, not an
//! approximation. Products stay exact as long as every factor has `L`-degree
//! at most zero in each `q`-coefficient; callers that multiply by positive
//! powers of `L` compute the other factor in a deeper window first.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound::{Excluded, Unbounded};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rat = Ratio<i64>;

/// Finite sum of `c_e L^e` with big-integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let mut p = LaurentPoly {
            lo: e,
            coeffs: vec![c.into()],
        };
        p.normalize();
        p
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, &c.into());
        }
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    /// Grow storage so that exponents `lo..=hi` are addressable.
    fn reserve_range(&mut self, lo: i64, hi: i64) {
        if lo > hi {
            return;
        }
        if self.coeffs.is_empty() {
            self.lo = lo;
            self.coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
            return;
        }
        if lo < self.lo {
            let extra = (self.lo - lo) as usize;
            let mut v = vec![BigInt::zero(); extra];
            v.append(&mut self.coeffs);
            self.coeffs = v;
            self.lo = lo;
        }
        let top = self.lo + self.coeffs.len() as i64 - 1;
        if hi > top {
            self.coeffs
                .resize(self.coeffs.len() + (hi - top) as usize, BigInt::zero());
        }
    }

    fn slot_mut(&mut self, e: i64) -> &mut BigInt {
        &mut self.coeffs[(e - self.lo) as usize]
    }

    pub fn add_term(&mut self, e: i64, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        self.reserve_range(e, e);
        *self.slot_mut(e) += c;
        self.normalize();
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree_hi(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.lo + self.coeffs.len() as i64 - 1)
    }

    pub fn degree_lo(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lo)
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        if e < self.lo {
            return BigInt::zero();
        }
        self.coeffs
            .get((e - self.lo) as usize)
            .cloned()
            .unwrap_or_default()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lo + i as i64, c))
    }

    pub fn shift(&self, k: i64) -> Self {
        let mut p = self.clone();
        if !p.is_zero() {
            p.lo += k;
        }
        p
    }

    pub fn truncate_below(&mut self, floor: i64) {
        if self.is_zero() || floor <= self.lo {
            return;
        }
        let cut = ((floor - self.lo) as usize).min(self.coeffs.len());
        self.coeffs.drain(..cut);
        self.lo = floor;
        self.normalize();
    }

    pub fn truncated(mut self, floor: i64) -> Self {
        self.truncate_below(floor);
        self
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut p = LaurentPoly {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        };
        p.normalize();
        p
    }

    /// `self += a * b`, keeping only exponents `>= floor`.
    pub fn add_product(&mut self, a: &LaurentPoly, b: &LaurentPoly, floor: i64) {
        let (Some(ahi), Some(bhi)) = (a.degree_hi(), b.degree_hi()) else {
            return;
        };
        let hi = ahi + bhi;
        let lo = (a.lo + b.lo).max(floor);
        if lo > hi {
            return;
        }
        self.reserve_range(lo, hi);
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ea = a.lo + i as i64;
            let jstart = (floor - ea - b.lo).max(0) as usize;
            for (j, cb) in b.coeffs.iter().enumerate().skip(jstart) {
                if cb.is_zero() {
                    continue;
                }
                let e = ea + b.lo + j as i64;
                *self.slot_mut(e) += ca * cb;
            }
        }
        self.normalize();
    }

    pub fn mul_truncated(&self, other: &LaurentPoly, floor: i64) -> Self {
        let mut out = LaurentPoly::zero();
        out.add_product(self, other, floor);
        out
    }

    /// `self / (1 - L^l)^power` for `l < 0`, expanded in descending powers of
    /// `L` down to `floor`.
    pub fn div_one_minus(&self, l: i64, power: u32, floor: i64) -> Self {
        debug_assert!(l < 0);
        let mut p = self.clone().truncated(floor);
        let step = (-l) as usize;
        for _ in 0..power {
            let Some(hi) = p.degree_hi() else {
                return p;
            };
            p.reserve_range(floor, hi);
            // c_e = a_e + c_{e + step}, walking down from the top.
            let n = p.coeffs.len();
            for idx in (0..n.saturating_sub(step)).rev() {
                let add = p.coeffs[idx + step].clone();
                p.coeffs[idx] += add;
            }
            p.normalize();
        }
        p
    }

    /// Inverse of `±L^k (1 + lower terms)` down to `floor`.
    pub fn inverse(&self, floor: i64) -> Result<Self> {
        let k = self
            .degree_hi()
            .ok_or_else(|| Error::NotInvertible("zero Laurent polynomial".into()))?;
        let c = self.coeff(k);
        if c.abs() != BigInt::one() {
            return Err(Error::NotInvertible(format!(
                "leading coefficient {c} is not a unit"
            )));
        }
        // v = (c L^-k self)^{-1} = 1 + v_{-1} L^-1 + ..., needed down to floor + k.
        let depth = (-k - floor).max(-1);
        if depth < 0 {
            return Ok(LaurentPoly::zero());
        }
        let depth = depth as usize;
        let t: Vec<BigInt> = (0..=depth).map(|n| &c * self.coeff(k - n as i64)).collect();
        let mut v: Vec<BigInt> = Vec::with_capacity(depth + 1);
        v.push(BigInt::one());
        for n in 1..=depth {
            let mut s = BigInt::zero();
            for j in 1..=n {
                if !t[j].is_zero() && !v[n - j].is_zero() {
                    s += &t[j] * &v[n - j];
                }
            }
            v.push(-s);
        }
        v.reverse();
        let mut out = LaurentPoly {
            lo: -k - depth as i64,
            coeffs: v.into_iter().map(|x| x * &c).collect(),
        };
        out.normalize();
        Ok(out)
    }

    /// Sum of all coefficients (value at `L = 1`).
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// True when the coefficient list reads the same in both directions.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}:{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::ops::Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl std::ops::AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        let Some(hi) = rhs.degree_hi() else {
            return;
        };
        self.reserve_range(rhs.lo, hi);
        for (i, c) in rhs.coeffs.iter().enumerate() {
            *self.slot_mut(rhs.lo + i as i64) += c;
        }
        self.normalize();
    }
}

impl std::ops::SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        *self += &(-rhs);
    }
}

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Floor low enough that untruncated products never reach it.
const NO_FLOOR: i64 = i64::MIN / 4;

impl std::ops::Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.mul_truncated(rhs, NO_FLOOR)
    }
}

/// Window depth `W`, `q` cutoff and the base `q` denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub window: u32,
    pub q_max: Rat,
    pub denom: i64,
}

impl TruncationConfig {
    pub fn new(window: u32, q_max: Rat, denom: i64) -> Result<Self> {
        if q_max < Rat::zero() {
            return Err(Error::InvalidArgument(format!("q_max = {q_max} < 0")));
        }
        if denom < 1 {
            return Err(Error::InvalidArgument(format!("D = {denom} < 1")));
        }
        Ok(TruncationConfig {
            window,
            q_max,
            denom,
        })
    }

    pub fn integral(window: u32, q_max: i64) -> Self {
        TruncationConfig {
            window,
            q_max: Rat::from_integer(q_max.max(0)),
            denom: 1,
        }
    }

    pub fn floor(&self) -> i64 {
        -(self.window as i64)
    }

    pub fn with_window(self, window: u32) -> Self {
        TruncationConfig { window, ..self }
    }

    pub fn with_q_max(self, q_max: Rat) -> Self {
        TruncationConfig { q_max, ..self }
    }
}

/// Element of the completed ring, stored as `q`-numerators over a common
/// denominator mapped to Laurent coefficients.
#[derive(Clone, Debug)]
pub struct QLSeries {
    denom: i64,
    q_max: Rat,
    window: u32,
    terms: BTreeMap<i64, LaurentPoly>,
}

impl PartialEq for QLSeries {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len() && self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }
}

impl Eq for QLSeries {}

fn num_of(q: Rat, denom: i64) -> Option<i64> {
    let x = q * Rat::from_integer(denom);
    x.is_integer().then(|| x.to_integer())
}

impl QLSeries {
    pub fn zero(cfg: &TruncationConfig) -> Self {
        QLSeries {
            denom: cfg.denom.max(1),
            q_max: cfg.q_max,
            window: cfg.window,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cfg: &TruncationConfig) -> Self {
        Self::constant(LaurentPoly::one(), cfg)
    }

    pub fn constant(p: LaurentPoly, cfg: &TruncationConfig) -> Self {
        let mut s = Self::zero(cfg);
        s.add_at(0, p);
        s
    }

    /// `c L^l q^q`, empty if it falls outside the window.
    pub fn monomial(c: impl Into<BigInt>, l: i64, q: Rat, cfg: &TruncationConfig) -> Self {
        let mut s = Self::zero(cfg);
        s.add_term(q, LaurentPoly::monomial(c, l));
        s
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn floor(&self) -> i64 {
        -(self.window as i64)
    }

    pub fn q_max(&self) -> Rat {
        self.q_max
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn config(&self) -> TruncationConfig {
        TruncationConfig {
            window: self.window,
            q_max: self.q_max,
            denom: self.denom,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn num_max(&self) -> i64 {
        (self.q_max * Rat::from_integer(self.denom))
            .floor()
            .to_integer()
    }

    fn exponent(&self, num: i64) -> Rat {
        Rat::new(num, self.denom)
    }

    fn rescale(&mut self, denom: i64) {
        if denom == self.denom {
            return;
        }
        debug_assert_eq!(denom % self.denom, 0);
        let f = denom / self.denom;
        let terms = std::mem::take(&mut self.terms);
        self.terms = terms.into_iter().map(|(k, p)| (k * f, p)).collect();
        self.denom = denom;
    }

    fn ensure_denom_for(&mut self, q: Rat) {
        let d = *q.denom();
        if self.denom % d != 0 {
            self.rescale(self.denom.lcm(&d));
        }
    }

    fn add_at(&mut self, num: i64, mut p: LaurentPoly) {
        if num > self.num_max() {
            return;
        }
        p.truncate_below(self.floor());
        if p.is_zero() {
            return;
        }
        match self.terms.entry(num) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &p;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Add `p q^q` in place, respecting both truncations.
    pub fn add_term(&mut self, q: Rat, p: LaurentPoly) {
        self.ensure_denom_for(q);
        let num = num_of(q, self.denom).expect("denominator was aligned");
        self.add_at(num, p);
    }

    /// Terms as `(q-exponent, coefficient)` in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (Rat, &LaurentPoly)> + '_ {
        self.terms.iter().map(|(&k, p)| (self.exponent(k), p))
    }

    pub fn lowest_q(&self) -> Option<Rat> {
        self.terms.keys().next().map(|&k| self.exponent(k))
    }

    /// Largest `L`-degree over all coefficients.
    pub fn degree_hi(&self) -> Option<i64> {
        self.terms.values().filter_map(LaurentPoly::degree_hi).max()
    }

    pub fn coeff_poly(&self, q: Rat) -> LaurentPoly {
        match num_of(q, self.denom) {
            Some(n) => self.terms.get(&n).cloned().unwrap_or_default(),
            None => LaurentPoly::zero(),
        }
    }

    /// Coefficient of `L^-n q^d`.
    pub fn coeff(&self, n: u32, d: Rat) -> Result<BigInt> {
        if n > self.window || d > self.q_max {
            return Err(Error::OutOfWindow {
                n,
                d: d.to_string(),
                window: self.window,
                q_max: self.q_max.to_string(),
            });
        }
        Ok(self.coeff_poly(d).coeff(-(n as i64)))
    }

    fn check_window(&self, other: &Self) -> Result<()> {
        if self.window != other.window {
            return Err(Error::WindowMismatch(self.window, other.window));
        }
        Ok(())
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let d = a.denom.lcm(&b.denom);
        let mut a = a.clone();
        let mut b = b.clone();
        a.rescale(d);
        b.rescale(d);
        (a, b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_window(other)?;
        let (mut a, b) = Self::aligned(self, other);
        a.q_max = a.q_max.min(b.q_max);
        let nm = a.num_max();
        a.terms.retain(|&k, _| k <= nm);
        for (k, p) in b.terms {
            a.add_at(k, p);
        }
        Ok(a)
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for p in s.terms.values_mut() {
            *p = -&*p;
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Cauchy product. The result's `q_max` also accounts for factors that
    /// start at negative `q`-order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_window(other)?;
        let (a, b) = Self::aligned(self, other);
        let mut q_max = a.q_max.min(b.q_max);
        if let Some(lb) = b.lowest_q() {
            q_max = q_max.min(a.q_max + lb);
        }
        if let Some(la) = a.lowest_q() {
            q_max = q_max.min(b.q_max + la);
        }
        let mut out = QLSeries {
            denom: a.denom,
            q_max,
            window: a.window,
            terms: BTreeMap::new(),
        };
        let nm = out.num_max();
        let floor = out.floor();
        for (&ka, pa) in &a.terms {
            for (&kb, pb) in b.terms.range(..=nm - ka) {
                out.terms
                    .entry(ka + kb)
                    .or_default()
                    .add_product(pa, pb, floor);
            }
        }
        out.terms.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    /// Multiply by `(1 - L^l q^q)`.
    pub fn mul_one_minus(&self, l: i64, q: Rat) -> Self {
        let mut out = self.clone();
        out.ensure_denom_for(q);
        let e = num_of(q, out.denom).expect("aligned");
        let src: Vec<(i64, LaurentPoly)> =
            out.terms.iter().map(|(&k, p)| (k, p.shift(l))).collect();
        for (k, p) in src {
            out.add_at(k + e, -&p);
        }
        out
    }

    /// Multiply by `(1 - L^l q^q)^-power`.
    pub fn div_one_minus(&self, l: i64, q: Rat, power: u32) -> Result<Self> {
        if q < Rat::zero() || (q.is_zero() && l >= 0) {
            return Err(Error::Divergent {
                l,
                q: q.to_string(),
            });
        }
        let mut out = self.clone();
        if q.is_zero() {
            let floor = out.floor();
            for p in out.terms.values_mut() {
                *p = p.div_one_minus(l, power, floor);
            }
            out.terms.retain(|_, p| !p.is_zero());
            return Ok(out);
        }
        out.ensure_denom_for(q);
        let e = num_of(q, out.denom).expect("aligned");
        let nm = out.num_max();
        for _ in 0..power {
            let mut cur = match out.terms.keys().next() {
                Some(&k) => k,
                None => break,
            };
            loop {
                if cur + e <= nm {
                    if let Some(p) = out.terms.get(&cur) {
                        let shifted = p.shift(l);
                        out.add_at(cur + e, shifted);
                    }
                }
                match out.terms.range((Excluded(cur), Unbounded)).next() {
                    Some((&k, _)) => cur = k,
                    None => break,
                }
            }
        }
        Ok(out)
    }

    /// Substitute `q -> L^e q`.
    pub fn scale_q(&self, e: i64) -> Result<Self> {
        let mut out = QLSeries {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (&k, p) in &self.terms {
            let s = e * k;
            if s % self.denom != 0 {
                return Err(Error::FractionalShift(format!("{}/{}", s, self.denom)));
            }
            out.add_at(k, p.shift(s / self.denom));
        }
        Ok(out)
    }

    /// Multiply by `L^l q^q` and re-truncate into `window`. Exact when
    /// `window <= self.window - l`.
    pub fn mul_monomial(&self, l: i64, q: Rat, window: u32) -> Result<Self> {
        if window as i64 > self.window as i64 - l {
            return Err(Error::WindowExhausted(format!(
                "shifting by L^{l} from W = {} cannot fill W = {window}",
                self.window
            )));
        }
        let mut out = QLSeries {
            terms: BTreeMap::new(),
            window,
            ..self.clone()
        };
        out.ensure_denom_for(q);
        out.q_max += q;
        let e = num_of(q, out.denom).expect("aligned");
        let f = out.denom / self.denom;
        for (&k, p) in &self.terms {
            out.add_at(k * f + e, p.shift(l));
        }
        Ok(out)
    }

    /// Narrow the window and/or the `q` cutoff.
    pub fn retruncate(&self, window: u32, q_max: Rat) -> Result<Self> {
        if window > self.window || q_max > self.q_max {
            return Err(Error::WindowExhausted(format!(
                "cannot widen (W = {}, q_max = {}) to (W = {window}, q_max = {q_max})",
                self.window, self.q_max
            )));
        }
        let mut out = QLSeries {
            terms: BTreeMap::new(),
            window,
            q_max,
            ..self.clone()
        };
        for (&k, p) in &self.terms {
            out.add_at(k, p.clone());
        }
        Ok(out)
    }

    /// Inverse by the triangular recursion on `q`-order.
    ///
    /// Needs the lowest coefficient to be `±L^k (1 + lower)` and every other
    /// coefficient to have `L`-degree at most `k`. For `k < 0` the result is
    /// only exact in the shallower window `W + 2k`.
    pub fn invert(&self) -> Result<Self> {
        let (&k0, p0) = self
            .terms
            .iter()
            .next()
            .ok_or_else(|| Error::NotInvertible("zero series".into()))?;
        let k = p0.degree_hi().expect("stored coefficients are nonzero");
        if let Some((&bad, _)) = self
            .terms
            .iter()
            .find(|(_, p)| p.degree_hi().is_some_and(|h| h > k))
        {
            return Err(Error::NotInvertible(format!(
                "coefficient at q^{} has L-degree above the leading L^{k}",
                self.exponent(bad)
            )));
        }
        let window = if k < 0 {
            let w = self.window as i64 + 2 * k;
            if w < 0 {
                return Err(Error::WindowExhausted(format!(
                    "leading L^{k} leaves no exact window inside W = {}",
                    self.window
                )));
            }
            w as u32
        } else {
            self.window
        };
        let floor = -(window as i64);
        let inv0 = p0.inverse(floor)?;
        let y0 = self.exponent(k0);
        let q_max = self.q_max - y0 * 2;
        let zmax = self.num_max() - k0;
        let rel: Vec<(i64, &LaurentPoly)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(&k, p)| (k - k0, p))
            .collect();

        let mut b: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        b.insert(0, inv0.clone());
        for z in 1..=zmax {
            let mut acc = LaurentPoly::zero();
            for &(j, pj) in &rel {
                if j > z {
                    break;
                }
                if let Some(bz) = b.get(&(z - j)) {
                    acc.add_product(pj, bz, floor + k);
                }
            }
            if acc.is_zero() {
                continue;
            }
            let bz = -&inv0.mul_truncated(&acc, floor);
            if !bz.is_zero() {
                b.insert(z, bz);
            }
        }
        let mut out = QLSeries {
            denom: self.denom,
            q_max,
            window,
            terms: BTreeMap::new(),
        };
        for (z, p) in b {
            out.add_at(z - k0, p);
        }
        Ok(out)
    }

    /// One line per `q`-exponent: `q^{p/D}: [exp:coeff, ...]`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (&k, p) in &self.terms {
            s.push_str(&format!("q^{{{}/{}}}: {}\n", k, self.denom, p));
        }
        s
    }

    /// Product of many series; reduction order does not affect the result.
    pub fn product<'a, I>(cfg: &TruncationConfig, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a QLSeries>,
    {
        let mut acc = QLSeries::one(cfg);
        for f in factors {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for QLSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Expansion of `(1 - L^l q^q)^-power` within `cfg`.
pub fn geometric_factor(l: i64, q: Rat, power: u32, cfg: &TruncationConfig) -> Result<QLSeries> {
    QLSeries::one(cfg).div_one_minus(l, q, power)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn cfg(w: u32, q: i64) -> TruncationConfig {
        TruncationConfig::integral(w, q)
    }

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn add_cancels() {
        let c = cfg(4, 3);
        let a = QLSeries::one(&c)
            .add(&QLSeries::monomial(1, -1, r(1, 1), &c))
            .unwrap();
        let b = a.add(&QLSeries::monomial(-1, 0, r(0, 1), &c)).unwrap();
        assert_eq!(b, QLSeries::monomial(1, -1, r(1, 1), &c));
        assert_eq!(b.add(&QLSeries::zero(&c)).unwrap(), b);
    }

    #[test]
    fn add_half_powers() {
        let c = cfg(2, 2);
        let h = QLSeries::monomial(1, 0, r(1, 2), &c);
        let s = h.add(&h).unwrap();
        assert_eq!(s.denom(), 2);
        assert_eq!(s.coeff(0, r(1, 2)).unwrap(), BigInt::from(2));
    }

    #[test]
    fn mul_examples() {
        let c = cfg(4, 3);
        let one = QLSeries::one(&c);
        let a = one.add(&QLSeries::monomial(1, 0, r(1, 1), &c)).unwrap();
        let b = one.sub(&QLSeries::monomial(1, 0, r(1, 1), &c)).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p, one.sub(&QLSeries::monomial(1, 0, r(2, 1), &c)).unwrap());

        let x = QLSeries::monomial(1, -1, r(1, 1), &c);
        assert_eq!(x.mul(&x).unwrap(), QLSeries::monomial(1, -2, r(2, 1), &c));
        let c1 = cfg(1, 3);
        let x1 = QLSeries::monomial(1, -1, r(1, 1), &c1);
        assert!(x1.mul(&x1).unwrap().is_zero());

        let u = one.add(&QLSeries::monomial(1, 1, r(1, 1), &c)).unwrap();
        let v = one.add(&QLSeries::monomial(1, -1, r(1, 1), &c)).unwrap();
        let uv = u.mul(&v).unwrap();
        assert_eq!(uv.coeff_poly(r(1, 1)), lp(&[(-1, 1), (1, 1)]));
        assert_eq!(uv.coeff_poly(r(2, 1)), LaurentPoly::one());
    }

    #[test]
    fn mismatched_windows_refused() {
        let a = QLSeries::one(&cfg(2, 2));
        let b = QLSeries::one(&cfg(3, 2));
        assert_eq!(
            a.mul(&b),
            Err(Error::WindowMismatch(2, 3)).map(|_: ()| a.clone())
        );
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn geometric_examples() {
        let g = geometric_factor(-1, r(1, 1), 1, &cfg(5, 2)).unwrap();
        assert_eq!(g.coeff_poly(r(1, 1)), lp(&[(-1, 1)]));
        assert_eq!(g.coeff_poly(r(2, 1)), lp(&[(-2, 1)]));
        assert_eq!(g.iter().count(), 3);

        let g = geometric_factor(0, r(1, 1), 2, &cfg(5, 2)).unwrap();
        let coeffs: Vec<_> = g.iter().map(|(_, p)| p.coeff(0)).collect();
        assert_eq!(coeffs, vec![1.into(), 2.into(), BigInt::from(3)]);

        let g = geometric_factor(-2, r(1, 1), 1, &cfg(1, 5)).unwrap();
        assert_eq!(g, QLSeries::one(&cfg(1, 5)));

        assert!(geometric_factor(0, r(0, 1), 1, &cfg(3, 3)).is_err());
        let g = geometric_factor(-3, r(0, 1), 1, &cfg(7, 0)).unwrap();
        assert_eq!(g.coeff_poly(r(0, 1)), lp(&[(-6, 1), (-3, 1), (0, 1)]));
    }

    #[test]
    fn invert_examples() {
        let c = cfg(6, 4);
        let a = QLSeries::one(&c)
            .sub(&QLSeries::monomial(1, -1, r(1, 1), &c))
            .unwrap();
        let inv = a.invert().unwrap();
        assert_eq!(inv, geometric_factor(-1, r(1, 1), 1, &c).unwrap());

        let c2 = cfg(3, 2);
        let mut b = QLSeries::one(&c2);
        b.add_term(r(1, 1), LaurentPoly::one());
        b.add_term(r(2, 1), LaurentPoly::one());
        let inv = b.invert().unwrap();
        let want = QLSeries::one(&c2)
            .sub(&QLSeries::monomial(1, 0, r(1, 1), &c2))
            .unwrap();
        assert_eq!(inv, want);
        assert_eq!(b.mul(&inv).unwrap(), QLSeries::one(&c2));
    }

    #[test]
    fn invert_shifted_leading_term() {
        let c = TruncationConfig::new(6, r(3, 1), 4).unwrap();
        let mut a = QLSeries::zero(&c);
        a.add_term(r(1, 4), lp(&[(-2, 3), (-1, 1), (0, 1)]));
        a.add_term(r(5, 4), lp(&[(-1, 2), (0, 1)]));
        a.add_term(r(3, 2), lp(&[(-3, -1)]));
        let inv = a.invert().unwrap();
        assert_eq!(inv.lowest_q(), Some(r(-1, 4)));
        assert_eq!(inv.q_max(), r(5, 2));
        let p = a.mul(&inv).unwrap();
        assert_eq!(p, QLSeries::one(&c));
    }

    #[test]
    fn scale_q_examples() {
        let c = cfg(10, 3);
        let a = QLSeries::monomial(1, 0, r(2, 1), &c);
        assert_eq!(
            a.scale_q(-4).unwrap(),
            QLSeries::monomial(1, -8, r(2, 1), &c)
        );
        assert_eq!(QLSeries::one(&c).scale_q(7).unwrap(), QLSeries::one(&c));
        let h = QLSeries::monomial(1, 0, r(1, 2), &c);
        assert!(h.scale_q(1).is_err());
    }

    #[test]
    fn coeff_queries() {
        let c = cfg(3, 2);
        let a = QLSeries::one(&c)
            .add(&QLSeries::monomial(2, -1, r(1, 1), &c))
            .unwrap();
        assert_eq!(a.coeff(1, r(1, 1)).unwrap(), BigInt::from(2));
        assert_eq!(a.coeff(0, r(2, 1)).unwrap(), BigInt::zero());
        assert!(a.coeff(4, r(1, 1)).is_err());
        assert!(a.coeff(0, r(3, 1)).is_err());
    }

    #[test]
    fn text_dump() {
        let c = TruncationConfig::new(3, r(2, 1), 2).unwrap();
        let mut a = QLSeries::one(&c);
        a.add_term(r(1, 2), lp(&[(-1, 2), (0, -1)]));
        assert_eq!(a.to_text(), "q^{0/2}: [0:1]\nq^{1/2}: [-1:2, 0:-1]\n");
    }

    #[test]
    fn laurent_inverse() {
        let p = lp(&[(-2, 1), (-1, -1), (0, 1)]);
        let inv = p.inverse(-8).unwrap();
        let prod = p.mul_truncated(&inv, -8);
        assert_eq!(prod, LaurentPoly::one());

        let p = lp(&[(1, -1), (0, 3)]);
        let inv = p.inverse(-6).unwrap();
        assert_eq!(p.mul_truncated(&inv, -5), LaurentPoly::one());
        assert!(lp(&[(0, 2)]).inverse(-3).is_err());
    }

    #[test]
    fn laurent_geometric_division() {
        let p = LaurentPoly::one().div_one_minus(-1, 2, -3);
        assert_eq!(p, lp(&[(0, 1), (-1, 2), (-2, 3), (-3, 4)]));
    }
}
