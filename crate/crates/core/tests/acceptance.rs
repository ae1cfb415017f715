//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;

use moduli_betti::betti::{
    betti_table, config_for, poincare_polynomial, space_series, stable_limit,
};
use moduli_betti::blowup::{assemble_g, f_inverse, f_roundtrip, is_one, leading_q};
use moduli_betti::bounds::{bound_c, kappa, refined_c0};
use moduli_betti::mozgovoy::{check_vanishing, verify_stack_vanishing};
use moduli_betti::oracles::run_lemma_suites;
use moduli_betti::rank1::{goettsche_series, rank_one_g, verify_rank1_stabilization, Surface};
use moduli_betti::series::{QLSeries, Rat, TruncationConfig};
use moduli_betti::wallcross::{
    assemble_gtilde, assemble_gtilde_with, enumerate_terms, enumerate_terms_with,
    verify_gtilde_vanishing, AssembleOptions,
};

fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: vec![],
            notes: vec![],
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn expect_ok<T>(&mut self, r: moduli_betti::Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }
}

/// Coefficients of `L^-N q^d` that should vanish for `d > 2N`.
fn vanish_above_twice(s: &QLSeries, n_max: u32, d_max: i64) -> Vec<String> {
    let mut bad = vec![];
    for (d, p) in s.iter() {
        if d > rat(d_max) {
            break;
        }
        for n in 0..=n_max {
            if d > rat(2 * n as i64) && !p.coeff(-(n as i64)).is_zero() {
                bad.push(format!("L^-{n} q^{d}"));
            }
        }
    }
    bad
}

fn c1_rank_one_vanishing() -> Outcome {
    let mut o = Outcome::new();
    let cfg = TruncationConfig::integral(8, 20);
    if let Some(g) = o.expect_ok(rank_one_g(Surface::P2, &cfg), "G_1") {
        let bad = vanish_above_twice(&g.mul_one_minus(0, rat(1)), 8, 20);
        o.check(bad.is_empty(), format!("(1-q)G_1 nonzero at {bad:?}"));
    }
    for (alpha, beta) in [(0, 0), (1, 0), (0, 1), (-1, 2)] {
        if let Some(g) = o.expect_ok(assemble_gtilde(1, alpha, beta, &cfg), "G~_1") {
            let bad = vanish_above_twice(&g.mul_one_minus(0, rat(1)), 8, 20);
            o.check(
                bad.is_empty(),
                format!("(1-q)G~_1 ({alpha},{beta}) nonzero at {bad:?}"),
            );
        }
    }
    o
}

/// `prod_m (1 - t^{m-1} x^m)^-1 (1 - t^m x^m)^-1 (1 - t^{m+1} x^m)^-1` on plain arrays.
fn hilbert_by_product(n_max: usize) -> Vec<Vec<i64>> {
    let deg = 2 * n_max + 1;
    let mut c = vec![vec![0i64; deg]; n_max + 1];
    c[0][0] = 1;
    for m in 1..=n_max {
        for shift in [m - 1, m, m + 1] {
            for n in m..=n_max {
                for e in shift..deg {
                    let add = c[n - m][e - shift];
                    c[n][e] += add;
                }
            }
        }
    }
    c
}

fn c2_hilbert_stabilization() -> Outcome {
    let mut o = Outcome::new();
    if let Some(rep) = o.expect_ok(verify_rank1_stabilization(8, 20), "rank-1 report") {
        for row in &rep.rows {
            o.check(
                row.onset <= row.bound,
                format!("N={} onset {}", row.n, row.onset),
            );
        }
        o.notes.push(format!(
            "onsets {:?}",
            rep.rows.iter().map(|r| r.onset).collect::<Vec<_>>()
        ));
    }
    let oracle = hilbert_by_product(6);
    o.check(
        oracle[2][..5] == [1, 2, 3, 2, 1],
        "oracle Hilb^2 is not 1,2,3,2,1",
    );
    if let Some(g) = o.expect_ok(
        goettsche_series(Surface::P2, &TruncationConfig::integral(0, 6)),
        "Göttsche",
    ) {
        for (n, row) in oracle.iter().enumerate() {
            let p = g.coeff_poly(rat(n as i64));
            for (e, &c) in row.iter().enumerate() {
                o.check(
                    p.coeff(e as i64) == BigInt::from(c),
                    format!("Hilb^{n} L^{e}"),
                );
            }
        }
    }
    o
}

fn c3_stack_vanishing() -> Outcome {
    let mut o = Outcome::new();
    for r in [2, 3] {
        if let Some(rep) = o.expect_ok(verify_stack_vanishing(r, 8, 12), "stack") {
            o.check(rep.passed(), format!("r={r}: {:?}", rep.violations));
            o.notes.push(format!("r={r}: {} coefficients", rep.checked));
        }
    }
    o
}

fn c4_wallcross_vanishing() -> Outcome {
    let mut o = Outcome::new();
    for r in [2u32, 3] {
        let bound = Rat::new((r * r + 1) as i64, 2);
        let cfg = TruncationConfig::new(6, rat(12), 2 * r as i64).unwrap();
        for alpha in 0..r as i64 {
            for beta in 0..r as i64 {
                if let Some(rep) =
                    o.expect_ok(verify_gtilde_vanishing(r, alpha, beta, 6, 12, bound), "G~")
                {
                    o.check(rep.passed(), format!("{}: {:?}", rep.label, rep.violations));
                }
                let plain = enumerate_terms(r, alpha, beta, &cfg);
                let wide = enumerate_terms_with(r, alpha, beta, &cfg, true);
                o.check(
                    plain == wide,
                    format!("r={r} ({alpha},{beta}): doubled box changes the terms"),
                );
            }
        }
    }
    o
}

fn c5_blowup_inversion() -> Outcome {
    let mut o = Outcome::new();
    for r in 1..=4u32 {
        for m in 0..r {
            let cfg = TruncationConfig::new(6, rat(8), 2 * r as i64).unwrap();
            if let Some(finv) = o.expect_ok(f_inverse(r, m, &cfg), "F^-1") {
                let rep = check_vanishing(
                    format!("F^-1 r={r} m={m}"),
                    &finv,
                    6,
                    rat(8),
                    -leading_q(r, m),
                );
                o.check(rep.passed(), format!("{}: {:?}", rep.label, rep.violations));
            }
            let cfg = TruncationConfig::new(10, rat(8), 2 * r as i64).unwrap();
            if let Some(one) = o.expect_ok(f_roundtrip(r, m, &cfg), "F F^-1") {
                o.check(is_one(&one), format!("F F^-1 != 1 for r={r} m={m}"));
            }
        }
    }
    o
}

fn c6_final_bounds() -> Outcome {
    let mut o = Outcome::new();
    for (r, a, want) in [(2u32, -1i64, 2i64), (3, -1, 5), (4, 1, 8)] {
        let got = bound_c(r, a);
        o.check(
            got == Ok(want),
            format!("bound_C({r},{a}) = {got:?}, expected {want}"),
        );
    }
    let got = refined_c0(2, -1, -1);
    o.check(
        got == Ok(Rat::new(3, 4)),
        format!("refined_C0(2, -H) = {got:?}, expected 3/4"),
    );
    let got = refined_c0(4, 1, 1).map(|v| v.to_string());
    o.check(
        got.as_deref() == Ok("19/4"),
        format!("refined_C0(4, 1, 1) = {got:?}, expected 19/4"),
    );
    let cases: [(&[u32], i64, Rat); 7] = [
        (&[1, 1], -1, Rat::new(5, 2)),
        (&[3, 1], 1, Rat::new(11, 4)),
        (&[1, 3], 1, Rat::new(25, 4)),
        (&[2, 1, 1], 1, Rat::new(5, 2)),
        (&[1, 2, 1], 1, Rat::new(21, 4)),
        (&[1, 1, 2], 1, Rat::new(25, 4)),
        (&[1, 1, 1, 1], 1, Rat::new(21, 4)),
    ];
    for (comp, ab, want) in cases {
        match kappa(comp, ab, ab) {
            Some(k) if k.exact == want => {}
            Some(k) => {
                o.check(
                    false,
                    format!(
                        "kappa{comp:?} = {} at {:?}, expected {want}",
                        k.value, k.minimizer
                    ),
                );
                if k.exact > want {
                    o.notes.push(format!(
                        "kappa{comp:?}: {want} is a valid but not sharp lower bound"
                    ));
                }
            }
            None => o.check(false, format!("kappa{comp:?}: no integer points")),
        }
    }
    o
}

fn c7_onsets() -> Outcome {
    let mut o = Outcome::new();
    for (r, a, n_max, horizon, slack) in [(2u32, -1i64, 6u32, 14i64, 1i64), (4, 1, 4, 12, 5)] {
        let w = n_max + 2 * r * r;
        if let Some(t) = o.expect_ok(betti_table(r, a, n_max, horizon, w), "table") {
            for n in 0..=n_max {
                let onset = t.onsets[&n];
                o.check(
                    onset <= n as i64 + slack,
                    format!("({r},{a}) N={n}: onset {onset} > N+{slack}"),
                );
            }
            o.notes.push(format!(
                "({r},{a}) onsets {:?}",
                t.onsets.values().collect::<Vec<_>>()
            ));
        }
    }
    o
}

/// Triples of partitions of `n`, then the first difference.
fn stable_by_partitions(n_max: usize) -> Vec<i64> {
    fn parts(n: usize, largest: usize) -> i64 {
        if n == 0 {
            return 1;
        }
        (1..=largest.min(n)).map(|k| parts(n - k, k)).sum()
    }
    let p: Vec<i64> = (0..=n_max).map(|n| parts(n, n)).collect();
    let p3: Vec<i64> = (0..=n_max)
        .map(|n| {
            let mut s = 0;
            for i in 0..=n {
                for j in 0..=n - i {
                    s += p[i] * p[j] * p[n - i - j];
                }
            }
            s
        })
        .collect();
    (0..=n_max)
        .map(|n| p3[n] - if n > 0 { p3[n - 1] } else { 0 })
        .collect()
}

fn c8_stable_limit() -> Outcome {
    let mut o = Outcome::new();
    let oracle: Vec<BigInt> = stable_by_partitions(4)
        .into_iter()
        .map(BigInt::from)
        .collect();
    let literal: Vec<BigInt> = [1, 2, 6, 13, 29].into_iter().map(BigInt::from).collect();
    o.check(
        oracle == literal,
        format!("partition oracle gives {oracle:?}"),
    );
    o.check(stable_limit(4) == literal, "stable_limit(4)");
    for (r, a, horizon) in [(1u32, 0i64, 12i64), (2, -1, 10), (3, -1, 10)] {
        if let Some(t) = o.expect_ok(betti_table(r, a, 4, horizon, 4 + 2 * r * r), "table") {
            for n in 0..=4u32 {
                let onset = t.onsets[&n];
                o.check(
                    onset < horizon,
                    format!("({r},{a}) N={n} not yet stable at c2={horizon}"),
                );
                let got = t.get(horizon, n).cloned().unwrap_or_default();
                o.check(
                    got == literal[n as usize],
                    format!("({r},{a}) N={n}: stable value {got}"),
                );
            }
        }
    }
    o
}

fn c9_lemmas() -> Outcome {
    let mut o = Outcome::new();
    for rep in run_lemma_suites() {
        o.check(rep.passed, format!("{}: {:?}", rep.name, rep.failures));
        o.notes
            .push(format!("{} ({} checked)", rep.name, rep.checked));
    }
    o
}

fn stable_in_window(
    o: &mut Outcome,
    what: &str,
    f: impl Fn(u32) -> moduli_betti::Result<QLSeries>,
    w: u32,
) {
    let (Some(a), Some(b)) = (o.expect_ok(f(w), what), o.expect_ok(f(w + 10), what)) else {
        return;
    };
    let b = b.retruncate(w, a.q_max());
    match b {
        Ok(b) => o.check(a == b, format!("{what}: W={w} and W={} disagree", w + 10)),
        Err(e) => o.check(false, format!("{what}: {e}")),
    }
}

fn c10_structural() -> Outcome {
    let mut o = Outcome::new();
    for (r, alpha, beta) in [(2u32, 1i64, 1i64), (2, 0, 1), (3, 1, 2), (3, 0, 1)] {
        let q = rat(8);
        stable_in_window(
            &mut o,
            &format!("G~ r={r} ({alpha},{beta})"),
            |w| assemble_gtilde(r, alpha, beta, &TruncationConfig::new(w, q, 2 * r as i64)?),
            6,
        );
        let ri = r as i64;
        let cfg = TruncationConfig::new(6, q, 2 * ri).unwrap();
        let raw = AssembleOptions {
            normalize: false,
            doubled: false,
        };
        let base = assemble_gtilde_with(r, alpha, beta, &cfg, &raw);
        for (da, db) in [(ri, 0), (0, ri), (-ri, ri), (2 * ri, -ri)] {
            let moved = assemble_gtilde_with(r, alpha + da, beta + db, &cfg, &raw);
            o.check(
                base.is_ok() && base == moved,
                format!("G~ r={r} ({alpha},{beta}) not invariant under ({da},{db})"),
            );
        }
    }
    for (r, m) in [(2u32, 1u32), (3, 1), (3, 2), (4, 1)] {
        stable_in_window(
            &mut o,
            &format!("F^-1 r={r} m={m}"),
            |w| f_inverse(r, m, &TruncationConfig::new(w, rat(6), 2 * r as i64)?),
            6,
        );
    }
    for (r, a) in [(2u32, -1i64), (3, -1), (4, 1)] {
        stable_in_window(
            &mut o,
            &format!("G r={r} a={a}"),
            |w| assemble_g(r, a, &config_for(r, a, w, 8)?),
            6,
        );
        stable_in_window(
            &mut o,
            &format!("space r={r} a={a}"),
            |w| space_series(r, a, &config_for(r, a, w, 8)?),
            6,
        );
    }
    for (r, a, n_max, horizon) in [(2u32, -1i64, 6u32, 14i64), (4, 1, 4, 12)] {
        let w = n_max + 2 * r * r;
        let (Some(t0), Some(t1)) = (
            o.expect_ok(betti_table(r, a, n_max, horizon, w), "table"),
            o.expect_ok(betti_table(r, a, n_max, horizon, w + 10), "table"),
        ) else {
            continue;
        };
        o.check(
            t0.rows == t1.rows && t0.onsets == t1.onsets,
            format!("table ({r},{a}) changes with the window"),
        );
    }
    for c2 in [2, 3] {
        let cfg = config_for(2, -1, 10, c2).unwrap();
        if let Some(p) = o.expect_ok(poincare_polynomial(2, -1, c2, &cfg), "Poincaré") {
            o.check(
                p.is_palindromic(),
                format!("P(M(2,-H,{c2})) = {p} is not palindromic"),
            );
            o.notes.push(format!("P(M(2,-H,{c2})) = {p}"));
        }
    }
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("rank-one vanishing", c1_rank_one_vanishing),
        ("Hilbert scheme stabilization", c2_hilbert_stabilization),
        ("stack vanishing", c3_stack_vanishing),
        ("wall-crossing vanishing", c4_wallcross_vanishing),
        ("blow-up inversion", c5_blowup_inversion),
        ("final bounds", c6_final_bounds),
        ("stabilization onsets", c7_onsets),
        ("stable limit", c8_stable_limit),
        ("lemma suites", c9_lemmas),
        ("structural", c10_structural),
    ];
    let verbose = std::env::args().any(|a| a == "--verbose" || a == "-v");
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let ok = out.failures.is_empty();
        all &= ok;
        println!(
            "{} {:>2} {name} ({:.2?})",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed()
        );
        for f in &out.failures {
            println!("     - {f}");
        }
        if verbose || !ok {
            for n in &out.notes {
                println!("     note: {n}");
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
