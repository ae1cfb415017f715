//! Chern data on `P^2` and on the blow-up `F_1`, intersection numbers, and the
//! discriminant bookkeeping for ordered decompositions.
//!
//! On `F_1` classes are written `c = alpha E + beta F` with `E^2 = -1`,
//! `F^2 = 0`, `E.F = 1` and canonical class `K = -2E - 3F`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Rat;

fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// `(r, aH, Delta)` on the projective plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernP2 {
    pub r: u32,
    pub a: i64,
    pub delta: Rat,
}

impl ChernP2 {
    pub fn new(r: u32, a: i64, delta: Rat) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("rank must be positive".into()));
        }
        Ok(ChernP2 { r, a, delta })
    }

    /// The character with given `c_2`.
    pub fn from_c2(r: u32, a: i64, c2: i64) -> Result<Self> {
        let rr = rat(r as i64);
        let delta = (rat(c2) - Self::c1_shift(r, a)) / rr;
        Self::new(r, a, delta)
    }

    /// `(r-1) a^2 / 2r`, the gap between `c_2` and `r Delta`.
    pub fn c1_shift(r: u32, a: i64) -> Rat {
        Rat::new((r as i64 - 1) * a * a, 2 * r as i64)
    }

    pub fn c2(&self) -> Rat {
        rat(self.r as i64) * self.delta + Self::c1_shift(self.r, self.a)
    }

    pub fn slope(&self) -> Rat {
        Rat::new(self.a, self.r as i64)
    }

    /// `ch_2 = c_1^2 / 2r - r Delta`.
    pub fn ch2(&self) -> Rat {
        Rat::new(self.a * self.a, 2 * self.r as i64) - rat(self.r as i64) * self.delta
    }

    /// Expected dimension `2 r^2 Delta - r^2 + 1` of the moduli space.
    pub fn dim_moduli(&self) -> Rat {
        let r2 = rat((self.r * self.r) as i64);
        r2 * self.delta * 2 - r2 + 1
    }

    /// `chi(self, other)` by Riemann-Roch with `K = -3H`, `chi(O) = 1`.
    pub fn euler_pairing(&self, other: &ChernP2) -> Rat {
        let (r1, r2) = (rat(self.r as i64), rat(other.r as i64));
        let (c1, c2) = (rat(self.a), rat(other.a));
        let minus_half_k = Rat::new(3, 2);
        r1 * r2 + (r1 * c2 - r2 * c1) * minus_half_k + r1 * other.ch2() + r2 * self.ch2() - c1 * c2
    }
}

/// A divisor class `alpha E + beta F` on `F_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorF1 {
    pub e: i64,
    pub f: i64,
}

impl DivisorF1 {
    pub const K: DivisorF1 = DivisorF1 { e: -2, f: -3 };

    pub fn new(e: i64, f: i64) -> Self {
        DivisorF1 { e, f }
    }

    pub fn dot(&self, other: &DivisorF1) -> i64 {
        -self.e * other.e + self.e * other.f + self.f * other.e
    }

    pub fn square(&self) -> i64 {
        self.dot(self)
    }
}

/// `(r, alpha E + beta F, Delta)` on the blow-up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernF1 {
    pub r: u32,
    pub alpha: i64,
    pub beta: i64,
    pub delta: Rat,
}

impl ChernF1 {
    pub fn new(r: u32, alpha: i64, beta: i64, delta: Rat) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("rank must be positive".into()));
        }
        Ok(ChernF1 {
            r,
            alpha,
            beta,
            delta,
        })
    }

    pub fn c1(&self) -> DivisorF1 {
        DivisorF1::new(self.alpha, self.beta)
    }

    pub fn c2(&self) -> Rat {
        rat(self.r as i64) * self.delta
            + Rat::new((self.r as i64 - 1) * self.c1().square(), 2 * self.r as i64)
    }

    pub fn ch2(&self) -> Rat {
        Rat::new(self.c1().square(), 2 * self.r as i64) - rat(self.r as i64) * self.delta
    }

    /// `chi(self, other)` by Riemann-Roch with `K = -2E - 3F`, `chi(O) = 1`.
    pub fn euler_pairing(&self, other: &ChernF1) -> Rat {
        let (r1, r2) = (self.r as i64, other.r as i64);
        let twist = DivisorF1::new(
            r1 * other.alpha - r2 * self.alpha,
            r1 * other.beta - r2 * self.beta,
        );
        let k_term = Rat::new(-twist.dot(&DivisorF1::K), 2);
        rat(r1 * r2) + k_term + rat(r1) * other.ch2() + rat(r2) * self.ch2()
            - rat(self.c1().dot(&other.c1()))
    }
}

/// One summand `(r_i, c_i = r_i a_i E + b_i F)` of an ordered decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecompPart {
    pub r: u32,
    pub a: i64,
    pub b: i64,
}

impl DecompPart {
    pub fn new(r: u32, a: i64, b: i64) -> Self {
        DecompPart { r, a, b }
    }

    pub fn c1(&self) -> DivisorF1 {
        DivisorF1::new(self.r as i64 * self.a, self.b)
    }
}

fn totals(parts: &[DecompPart]) -> Result<(i64, DivisorF1)> {
    if parts.is_empty() {
        return Err(Error::EmptyDecomposition);
    }
    let r = parts.iter().map(|p| p.r as i64).sum();
    let c = parts.iter().fold(DivisorF1::new(0, 0), |acc, p| {
        let ci = p.c1();
        DivisorF1::new(acc.e + ci.e, acc.f + ci.f)
    });
    Ok((r, c))
}

/// `r Delta - sum r_i Delta_i = c^2/2r - sum c_i^2/2r_i`.
pub fn yoshioka_defect(parts: &[DecompPart]) -> Result<Rat> {
    let (r, c) = totals(parts)?;
    let mut d = Rat::new(c.square(), 2 * r);
    for p in parts {
        d -= Rat::new(p.c1().square(), 2 * p.r as i64);
    }
    Ok(d)
}

/// Suffix sums `s_i = b_i + ... + b_l`.
pub fn suffix_sums(parts: &[DecompPart]) -> Vec<i64> {
    let mut s = vec![0; parts.len()];
    let mut acc = 0;
    for (i, p) in parts.iter().enumerate().rev() {
        acc += p.b;
        s[i] = acc;
    }
    s
}

/// `sum_{i<j} r_i r_j (mu_j - mu_i).K`, by the closed form in `a_i`, `s_i`.
pub fn k_pairing(parts: &[DecompPart]) -> Result<i64> {
    let (r, c) = totals(parts)?;
    let b = c.f;
    let s = suffix_sums(parts);
    let mut k = 0;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            k += parts[i].r as i64 * parts[j].r as i64 * (parts[i].a - parts[j].a);
        }
    }
    for i in 1..parts.len() {
        k -= 2 * (parts[i].r as i64 + parts[i - 1].r as i64) * s[i];
    }
    k += 2 * (r - parts[0].r as i64) * b;
    Ok(k)
}

/// Same quantity from `(r_i c_j - r_j c_i).K`, used to cross-check.
pub fn k_pairing_direct(parts: &[DecompPart]) -> Result<i64> {
    totals(parts)?;
    let mut k = 0;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let (ri, rj) = (parts[i].r as i64, parts[j].r as i64);
            let (ci, cj) = (parts[i].c1(), parts[j].c1());
            let d = DivisorF1::new(ri * cj.e - rj * ci.e, ri * cj.f - rj * ci.f);
            k += d.dot(&DivisorF1::K);
        }
    }
    Ok(k)
}

/// `(r^2 - sum r_i^2)/2 - k_pairing/2`.
pub fn prefactor_l(parts: &[DecompPart]) -> Result<Rat> {
    let (r, _) = totals(parts)?;
    let sq: i64 = parts.iter().map(|p| (p.r as i64).pow(2)).sum();
    Ok(Rat::new(r * r - sq - k_pairing(parts)?, 2))
}
