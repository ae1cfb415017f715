use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use moduli_betti::betti::{self, BettiTable};
use moduli_betti::blowup::leading_q;
use moduli_betti::bounds::bound_report;
use moduli_betti::error::Error;
use moduli_betti::mozgovoy::verify_stack_vanishing;
use moduli_betti::oracles::{run_lemma_suites, OracleReport};
use moduli_betti::rank1::verify_rank1_stabilization;
use moduli_betti::series::Rat;
use moduli_betti::wallcross::{enumerate_terms, verify_gtilde_vanishing, write_ledger};
use moduli_betti::{bound_c0, stable_limit};

const EXIT_MATH: u8 = 2;
const EXIT_WINDOW: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Betti numbers of moduli spaces of sheaves on the projective plane.
#[derive(Parser, Debug)]
#[command(name = "moduli-betti", version)]
struct Cli {
    /// Worker threads (defaults to available parallelism).
    #[arg(long, global = true, env = "MODULI_BETTI_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Table of b_2N(M(r, aH, c2)) with observed stabilization onsets.
    Betti {
        #[arg(long)]
        rank: u32,
        #[arg(long, allow_hyphen_values = true)]
        c1: i64,
        #[arg(long)]
        c2_max: i64,
        #[arg(long)]
        n_max: u32,
        /// Depth of the L-window (default n_max + 2 r^2).
        #[arg(long)]
        window: Option<u32>,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        /// Skip the comparison against a window ten deeper.
        #[arg(long)]
        no_recheck: bool,
        /// Write the wall-crossing terms used to this CSV file.
        #[arg(long)]
        ledger: Option<String>,
    },
    /// Limiting Betti numbers from (1 - L^-1) prod (1 - L^-i)^-3.
    Stable {
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        json: bool,
    },
    /// Stabilization constants C0, refined C0, C and the kappa terms.
    Bounds {
        #[arg(long)]
        rank: u32,
        #[arg(long, allow_hyphen_values = true)]
        c1: i64,
        #[arg(long)]
        json: bool,
    },
    /// Lemma suites, and with --all the vanishing and stabilization checks.
    Verify {
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::WindowExhausted(_) | Error::OutOfWindow { .. } | Error::WindowMismatch(..) => {
            EXIT_WINDOW
        }
        Error::NotCoprime { .. }
        | Error::InvalidArgument(_)
        | Error::ExcludedCase(_)
        | Error::Divergent { .. }
        | Error::EmptyDecomposition => EXIT_MATH,
        _ => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_for(&e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let out = match cli.cmd {
        Cmd::Betti {
            rank,
            c1,
            c2_max,
            n_max,
            window,
            json,
            csv,
            no_recheck,
            ledger,
        } => cmd_betti(
            rank,
            c1,
            c2_max,
            n_max,
            window,
            json,
            csv,
            !no_recheck,
            ledger,
        ),
        Cmd::Stable { n_max, json } => cmd_stable(n_max, json),
        Cmd::Bounds { rank, c1, json } => cmd_bounds(rank, c1, json),
        Cmd::Verify { all, json } => return cmd_verify(all, json),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_betti(
    r: u32,
    a: i64,
    c2_max: i64,
    n_max: u32,
    window: Option<u32>,
    json: bool,
    csv: bool,
    recheck: bool,
    ledger: Option<String>,
) -> moduli_betti::Result<()> {
    betti::check_coprime(r, a)?;
    let w = window.unwrap_or(n_max + 2 * r * r);
    let table = betti::betti_table(r, a, n_max, c2_max, w)?;
    if recheck {
        let deeper = betti::betti_table(r, a, n_max, c2_max, w + 10)?;
        if deeper.rows != table.rows {
            return Err(Error::WindowExhausted(format!(
                "table changed between W = {w} and W = {}",
                w + 10
            )));
        }
    }
    if let Some(path) = ledger {
        let cfg = betti::config_for(r, a, w, c2_max)?;
        let ri = r as i64;
        let m = a.rem_euclid(ri);
        let wide = cfg.with_q_max(cfg.q_max + leading_q(r, m as u32));
        let terms = enumerate_terms(r, (a - m).rem_euclid(ri), a.rem_euclid(ri), &wide);
        let f = File::create(&path)
            .map_err(|e| Error::InvalidArgument(format!("cannot create {path}: {e}")))?;
        write_ledger(&terms, f)?;
    }
    let text = if json {
        table_json(&table)
    } else if csv {
        table.to_csv()
    } else {
        table_text(&table, n_max)
    };
    print_out(&text);
    Ok(())
}

fn table_json(t: &BettiTable) -> String {
    let onsets: serde_json::Map<String, serde_json::Value> = t
        .onsets
        .iter()
        .map(|(n, c)| (n.to_string(), json!(c)))
        .collect();
    let v = json!({
        "meta": {"r": t.r, "a": t.a, "W": t.window, "q_max": t.q_max},
        "rows": t.rows,
        "onsets": onsets,
    });
    serde_json::to_string_pretty(&v).expect("table serializes") + "\n"
}

fn table_text(t: &BettiTable, n_max: u32) -> String {
    let mut s = format!(
        "# M(r={}, a={}, c2)  W={}  horizon c2={}\n",
        t.r, t.a, t.window, t.horizon
    );
    s.push_str(&format!("{:>4}", "c2"));
    for n in 0..=n_max {
        s.push_str(&format!(" {:>10}", format!("b{}", 2 * n)));
    }
    s.push('\n');
    let first = betti::first_c2(t.r, t.a);
    for c2 in first..=t.horizon {
        s.push_str(&format!("{c2:>4}"));
        for n in 0..=n_max {
            let b = t.get(c2, n).map(|b| b.to_string()).unwrap_or_default();
            s.push_str(&format!(" {b:>10}"));
        }
        s.push('\n');
    }
    s.push_str("onset");
    for n in 0..=n_max {
        s.push_str(&format!(" {:>10}", t.onsets[&n]));
    }
    s.push_str("\n# onsets are observed up to the horizon, not proven\n");
    s
}

fn cmd_stable(n_max: u32, json: bool) -> moduli_betti::Result<()> {
    let v = stable_limit(n_max);
    let text = if json {
        let vals: Vec<String> = v.iter().map(|b| b.to_string()).collect();
        serde_json::to_string(&json!({ "n_max": n_max, "stable": vals })).expect("serializes")
            + "\n"
    } else {
        v.iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(" ")
            + "\n"
    };
    print_out(&text);
    Ok(())
}

fn cmd_bounds(r: u32, a: i64, json: bool) -> moduli_betti::Result<()> {
    betti::check_coprime(r, a)?;
    let rep = bound_report(r, a)?;
    let text = if json {
        serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"
    } else {
        let mut s = format!(
            "C0={} refined_C0={} C={} refined_C={}\n",
            rep.c0_generic, rep.c0_refined, rep.c, rep.c_refined
        );
        for k in &rep.kappa_terms {
            match &k.kappa {
                Some(w) => s.push_str(&format!(
                    "  shape {:?}: kappa={} at a={:?}, term={}\n",
                    k.composition,
                    w.value,
                    w.minimizer,
                    k.term.as_deref().unwrap_or("-")
                )),
                None => s.push_str(&format!("  shape {:?}: no integer points\n", k.composition)),
            }
        }
        for (r2, t) in &rep.special_terms {
            s.push_str(&format!(
                "  two parts, a_2 - a_1 = -1, r_2={r2}: term={t}\n"
            ));
        }
        s
    };
    print_out(&text);
    Ok(())
}

fn from_vanishing(
    r: moduli_betti::Result<moduli_betti::mozgovoy::VanishingReport>,
) -> OracleReport {
    match r {
        Ok(v) => OracleReport {
            name: v.label.clone(),
            passed: v.passed(),
            checked: v.checked,
            failures: v.violations,
            notes: vec![],
        },
        Err(e) => OracleReport {
            name: "vanishing".into(),
            passed: false,
            failures: vec![e.to_string()],
            ..Default::default()
        },
    }
}

fn pipeline_checks() -> Vec<OracleReport> {
    let mut out = Vec::new();
    match verify_rank1_stabilization(8, 20) {
        Ok(rep) => out.push(OracleReport {
            name: "rank-1 onsets <= 2N".into(),
            passed: rep.passed,
            checked: rep.rows.len() as u64,
            failures: rep
                .rows
                .iter()
                .filter(|r| r.onset > r.bound)
                .map(|r| format!("N={} onset {}", r.n, r.onset))
                .collect(),
            notes: vec![],
        }),
        Err(e) => out.push(OracleReport {
            name: "rank-1 onsets <= 2N".into(),
            failures: vec![e.to_string()],
            ..Default::default()
        }),
    }
    for r in [2, 3] {
        out.push(from_vanishing(verify_stack_vanishing(r, 8, 12)));
    }
    for (r, alpha, beta) in [(2u32, 1i64, 1i64), (2, 0, 1), (3, 1, 1), (3, 0, 2)] {
        let c0 = bound_c0(r).unwrap_or_else(|_| Rat::from_integer(0));
        out.push(from_vanishing(verify_gtilde_vanishing(
            r, alpha, beta, 6, 12, c0,
        )));
    }
    let expect = stable_limit(4);
    for (r, a, horizon) in [(1u32, 0i64, 12i64), (2, -1, 10), (3, -1, 10)] {
        let name = format!("stable limit r={r} a={a}");
        match betti::betti_table(r, a, 4, horizon, 4 + 2 * r * r) {
            Ok(t) => {
                let got: Vec<_> = (0..=4)
                    .map(|n| t.get(horizon, n).cloned().unwrap_or_default())
                    .collect();
                out.push(OracleReport {
                    name,
                    passed: got == expect,
                    checked: 5,
                    failures: if got == expect {
                        vec![]
                    } else {
                        vec![format!("{got:?} vs {expect:?}")]
                    },
                    notes: vec![],
                });
            }
            Err(e) => out.push(OracleReport {
                name,
                failures: vec![e.to_string()],
                ..Default::default()
            }),
        }
    }
    out
}

fn cmd_verify(all: bool, json: bool) -> ExitCode {
    let mut reports = run_lemma_suites();
    if all {
        reports.extend(pipeline_checks());
    }
    let ok = reports.iter().all(|r| r.passed);
    let text = if json {
        serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n"
    } else {
        reports.iter().map(|r| r.to_string()).collect::<String>()
    };
    print_out(&text);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_out(s: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(s.as_bytes());
    let _ = out.flush();
}
