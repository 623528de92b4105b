//! Batch command line. Every invocation prints one JSON report
//! `{command, parameters, status, payload}` on standard output.
//!
//! Exit codes: 0 when the status is `ok`, 1 for `counterexample`,
//! `witness` or `exhausted`, 2 for usage errors and 3 for an unreadable or
//! malformed oracle file.

use std::collections::BTreeSet;
use std::time::Instant;

use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::encodings::{
    fin_decode, fin_encode, injseq_decode, injseq_encode, lift, seq_decode, seq_encode, Carrier,
    Direction, LiftValue, Structure,
};
use crate::hereditary::{build_level, level_report, DEFAULT_DEPTH_CAP};
use crate::mostowski::{
    check_fin_onto, check_inequality, check_seq_a_injective, cofinite_decompose, default_a24,
    enumerate_with_support, fin_map, fin_preimage, format_atom, parse_atom, rank,
    separating_automorphism, seq_a, unrank, Atom, CofinSet, SymSet,
};
use crate::ordinals::{nat_index, unindex, Ordinal};
use crate::selftest::{criterion_count, run_all, run_criterion};
use crate::specker::{
    lemma_run, thm3_fact_sweep, thm3_run, thm4_engine, thm5_run, Oracle, Run, Thm5Options,
};
use crate::starcount::{
    check_divisibility_lemma, check_identity_2_range, check_star_gap_range, check_t_parity,
    scan_pow2, scan_pow2_exact, star, star_mod, Report, Status,
};

pub const THREADS_VAR: &str = "CHOICELESS_THREADS";

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

#[derive(Parser)]
#[command(
    name = "choiceless",
    version,
    about = "Exact computations on choiceless cardinal arithmetic"
)]
struct Cli {
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = crate::selftest::SWEEP_SEED)]
    seed: u64,
    /// Add `elapsed_ms` to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ordinal notations below epsilon-zero.
    Ordinal {
        #[command(subcommand)]
        op: OrdinalOp,
    },
    /// Codes of finite sets, sequences and injective sequences.
    Encode {
        structure: StructureArg,
        /// Comma-separated entries to encode.
        #[arg(long, conflicts_with = "decode", required_unless_present = "decode")]
        encode: Option<String>,
        /// Code (or ordinal, with --alpha) to decode.
        #[arg(long)]
        decode: Option<String>,
        /// Work below this infinite ordinal instead of the naturals.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// The injective-sequence count n*.
    Star {
        #[arg(long)]
        n: u64,
        /// Report n* modulo this power of two.
        #[arg(long, conflicts_with = "parity")]
        modulus: Option<String>,
        #[arg(long)]
        parity: bool,
    },
    /// All n <= limit with n* a power of two.
    #[command(name = "scan-pow2")]
    ScanPow2 {
        #[arg(long)]
        limit: u64,
        /// Test the exact value at every n.
        #[arg(long)]
        exact: bool,
    },
    /// Arithmetic facts about n*.
    Lemmas {
        #[command(subcommand)]
        which: LemmaOp,
    },
    /// Supported sets over the rational atoms.
    Mostowski {
        #[command(subcommand)]
        op: MostowskiOp,
    },
    /// Rows of finite or cofinite atom sets.
    Cofinite {
        #[command(subcommand)]
        op: CofiniteOp,
    },
    /// Levels of the hereditary sequence model.
    Hereditary {
        #[command(subcommand)]
        op: HereditaryOp,
    },
    /// Diagonalization engines against an oracle file.
    Specker {
        #[command(subcommand)]
        op: SpeckerOp,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Run only this criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Fin,
    Seq,
    /// Injective sequences.
    #[value(name = "Seq", alias = "injseq")]
    InjSeq,
}

#[derive(Subcommand)]
enum OrdinalOp {
    Parse {
        a: String,
    },
    Compare {
        a: String,
        b: String,
    },
    Add {
        a: String,
        b: String,
    },
    /// The leading term.
    Reverse {
        a: String,
    },
    Index {
        a: String,
    },
    Unindex {
        n: String,
    },
}

#[derive(Subcommand)]
enum LemmaOp {
    /// 2^r | n* implies 2^r | (n+2^r)* and no (n+t)* in between.
    Divisibility {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 10_000)]
        limit: u64,
    },
    /// (n+2^k)* = 2^k T(n) + n* mod 2^(k+1).
    Identity2 {
        #[arg(long, default_value_t = 50)]
        n_max: u64,
        #[arg(long, default_value_t = 8)]
        k_max: u32,
    },
    /// T(n) odd for odd 3 <= n <= n_max.
    Tparity {
        #[arg(long, default_value_t = 49)]
        n_max: u64,
    },
    /// With n* = 2^k, (n+t)* a power of two forces 2^k | t.
    Gap {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        t_lo: u64,
        #[arg(long)]
        t_hi: u64,
    },
}

#[derive(Subcommand)]
enum MostowskiOp {
    /// Every set supported by the atoms, in index order.
    Enumerate {
        #[arg(long)]
        support: String,
    },
    Rank {
        #[arg(long)]
        support: String,
        #[arg(long)]
        set: String,
    },
    Unrank {
        #[arg(long)]
        support: String,
        #[arg(long)]
        index: String,
    },
    /// The |E|-th set supported by E, or an E reaching a given set.
    FinMap {
        #[arg(
            long,
            conflicts_with = "preimage",
            required_unless_present = "preimage"
        )]
        support: Option<String>,
        #[arg(long)]
        preimage: Option<String>,
    },
    SeqA {
        #[arg(long)]
        set: String,
        /// The 24 reference atoms; 0..23 by default.
        #[arg(long)]
        a24: Option<String>,
    },
    CheckInjective {
        #[arg(long, default_value = "100,101,102,103,104,105")]
        atoms: String,
        #[arg(long, default_value_t = 3)]
        max_support: usize,
    },
    CheckOnto {
        #[arg(long, default_value = "1,2,3,4,5,6")]
        atoms: String,
        #[arg(long, default_value_t = 3)]
        max_support: usize,
    },
    /// An automorphism fixing the support and moving one atom to another.
    Automorphism {
        #[arg(long)]
        support: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Atoms to map.
        #[arg(long)]
        apply: Option<String>,
    },
    /// 2*2^(2n+1) < n! over a range.
    Inequality {
        #[arg(long, default_value_t = 12)]
        lo: u64,
        #[arg(long, default_value_t = 64)]
        hi: u64,
    },
}

#[derive(Subcommand)]
enum CofiniteOp {
    /// Split rows into flags and one finite set. A row is a comma-separated
    /// atom list, prefixed with `~` for the complement.
    Decompose {
        #[arg(long = "row", required = true)]
        rows: Vec<String>,
    },
}

#[derive(Subcommand)]
enum HereditaryOp {
    Build {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum SpeckerOp {
    /// Random check that equal signatures mean equal stage membership.
    Thm3Fact {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = 6)]
        max_alpha: usize,
    },
    /// Stage diagonalization against a finite-set oracle.
    Thm3Run {
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = 16)]
        budget: usize,
    },
    /// Element diagonalization against an injective-sequence oracle.
    LemmaRun {
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = 16)]
        budget: usize,
    },
    /// Equivalence-class construction against an injective-sequence oracle.
    Thm4Run {
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = 16)]
        budget: usize,
        /// Initial elements taken from the universe.
        #[arg(long, default_value_t = 4)]
        seed_size: usize,
    },
    /// Disjoint-piece diagonalization against a sequence oracle.
    Thm5Run {
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = 16)]
        budget: usize,
        /// Token of the repeated element; the first universe token by default.
        #[arg(long)]
        s0: Option<String>,
        /// Constant sequences to probe; the universe size by default.
        #[arg(long)]
        probes: Option<usize>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Oracle(String),
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    parameters: Map<String, Value>,
    status: &'static str,
    payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

impl RunReport {
    fn new(command: &str, parameters: Value, status: &'static str, payload: Value) -> Self {
        let parameters = match parameters {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        RunReport {
            command: command.into(),
            parameters,
            status,
            payload,
            elapsed_ms: None,
        }
    }

    fn ok(command: &str, parameters: Value, payload: Value) -> Self {
        Self::new(command, parameters, "ok", payload)
    }

    fn from_report(command: &str, parameters: Value, r: &Report) -> Self {
        let status = if r.holds() { "ok" } else { "counterexample" };
        Self::new(
            command,
            parameters,
            status,
            serde_json::to_value(r).expect("serializable"),
        )
    }
}

pub fn run(args: &[String]) -> Outcome {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    stdout: text.trim_end().into(),
                    stderr: String::new(),
                    code: 0,
                },
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text.trim_end().into(),
                    code: 2,
                },
            };
        }
    };
    if let Err(e) = configure_threads() {
        return failure(e);
    }
    let start = Instant::now();
    match dispatch(&cli) {
        Ok(mut report) => {
            if cli.timing {
                report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let stdout = if cli.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            }
            .expect("serializable");
            let code = if report.status == "ok" { 0 } else { 1 };
            Outcome {
                stdout,
                stderr: String::new(),
                code,
            }
        }
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Outcome {
    let (stderr, code) = match e {
        CliError::Usage(m) => (format!("error: {m}"), 2),
        CliError::Oracle(m) => (format!("error: malformed oracle: {m}"), 3),
    };
    Outcome {
        stdout: String::new(),
        stderr,
        code,
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        usage(format!(
            "{THREADS_VAR} must be a positive integer, got {v:?}"
        ))
    })?;
    // A pool configured earlier in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<RunReport, CliError> {
    match &cli.command {
        Command::Ordinal { op } => ordinal(op),
        Command::Encode {
            structure,
            encode,
            decode,
            alpha,
        } => encode_cmd(
            *structure,
            encode.as_deref(),
            decode.as_deref(),
            alpha.as_deref(),
        ),
        Command::Star { n, modulus, parity } => star_cmd(*n, modulus.as_deref(), *parity),
        Command::ScanPow2 { limit, exact } => {
            let hits = if *exact {
                scan_pow2_exact(*limit)
            } else {
                scan_pow2(*limit)
            };
            Ok(RunReport::ok(
                "scan-pow2",
                json!({ "limit": limit, "exact": exact }),
                json!({ "hits": hits }),
            ))
        }
        Command::Lemmas { which } => lemmas(which),
        Command::Mostowski { op } => mostowski(op),
        Command::Cofinite {
            op: CofiniteOp::Decompose { rows },
        } => cofinite(rows),
        Command::Hereditary {
            op: HereditaryOp::Build { level, cap },
        } => {
            let state = build_level(*level, *cap).map_err(usage)?;
            Ok(RunReport::ok(
                "hereditary build",
                json!({ "level": level, "cap": cap }),
                level_report(&state),
            ))
        }
        Command::Specker { op } => specker(op, cli.seed),
        Command::Selftest { criterion } => selftest(*criterion),
    }
}

fn parse_ordinal(s: &str) -> Result<Ordinal, CliError> {
    s.parse().map_err(|e| usage(format!("ordinal {s:?}: {e}")))
}

fn parse_nat(s: &str) -> Result<BigUint, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{s:?} is not a natural number")))
}

/// Comma-separated items; the empty string is the empty list.
fn split_list(s: &str) -> Vec<&str> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect()
}

fn ordinal(op: &OrdinalOp) -> Result<RunReport, CliError> {
    let report = match op {
        OrdinalOp::Parse { a } => {
            let o = parse_ordinal(a)?;
            let terms: Vec<Value> = o
                .terms()
                .iter()
                .map(|t| json!({ "exponent": t.exponent.to_string(), "coefficient": t.coefficient.to_string() }))
                .collect();
            RunReport::ok(
                "ordinal parse",
                json!({ "a": a }),
                json!({ "ordinal": o.to_string(), "terms": terms, "finite": o.is_finite() }),
            )
        }
        OrdinalOp::Compare { a, b } => {
            let order = match parse_ordinal(a)?.cmp(&parse_ordinal(b)?) {
                std::cmp::Ordering::Less => "less",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Greater => "greater",
            };
            RunReport::ok(
                "ordinal compare",
                json!({ "a": a, "b": b }),
                json!({ "order": order }),
            )
        }
        OrdinalOp::Add { a, b } => {
            let sum = parse_ordinal(a)?.add(&parse_ordinal(b)?);
            RunReport::ok(
                "ordinal add",
                json!({ "a": a, "b": b }),
                json!({ "sum": sum.to_string() }),
            )
        }
        OrdinalOp::Reverse { a } => {
            let r = parse_ordinal(a)?.reverse().map_err(usage)?;
            RunReport::ok(
                "ordinal reverse",
                json!({ "a": a }),
                json!({ "reverse": r.to_string() }),
            )
        }
        OrdinalOp::Index { a } => {
            let i = nat_index(&parse_ordinal(a)?);
            RunReport::ok(
                "ordinal index",
                json!({ "a": a }),
                json!({ "index": i.to_string() }),
            )
        }
        OrdinalOp::Unindex { n } => {
            let o = unindex(&parse_nat(n)?);
            RunReport::ok(
                "ordinal unindex",
                json!({ "n": n }),
                json!({ "ordinal": o.to_string() }),
            )
        }
    };
    Ok(report)
}

fn encode_cmd(
    structure: StructureArg,
    encode: Option<&str>,
    decode: Option<&str>,
    alpha: Option<&str>,
) -> Result<RunReport, CliError> {
    let which = match structure {
        StructureArg::Fin => Structure::Fin,
        StructureArg::Seq => Structure::Seq,
        StructureArg::InjSeq => Structure::InjSeq,
    };
    let name = match which {
        Structure::Fin => "fin",
        Structure::Seq => "seq",
        Structure::InjSeq => "Seq",
    };
    let key = if which == Structure::Fin {
        "set"
    } else {
        "sequence"
    };
    let params = json!({ "structure": name, "encode": encode, "decode": decode, "alpha": alpha });
    let command = format!("encode {name}");
    if let Some(alpha) = alpha {
        let carrier = Carrier::new(parse_ordinal(alpha)?).map_err(usage)?;
        let payload = match (encode, decode) {
            (_, Some(d)) => {
                let v = lift(
                    &carrier,
                    which,
                    Direction::Decode,
                    &LiftValue::Element(parse_ordinal(d)?),
                )
                .map_err(usage)?;
                let LiftValue::Elements(items) = v else {
                    unreachable!("decode yields elements")
                };
                json!({ key: items.iter().map(ToString::to_string).collect::<Vec<_>>() })
            }
            (Some(e), None) => {
                let items = split_list(e)
                    .into_iter()
                    .map(parse_ordinal)
                    .collect::<Result<Vec<_>, _>>()?;
                let v = lift(
                    &carrier,
                    which,
                    Direction::Encode,
                    &LiftValue::Elements(items),
                )
                .map_err(usage)?;
                let LiftValue::Element(x) = v else {
                    unreachable!("encode yields an element")
                };
                json!({ "element": x.to_string() })
            }
            (None, None) => return Err(usage("one of --encode or --decode is required")),
        };
        return Ok(RunReport::ok(&command, params, payload));
    }
    let payload = match (encode, decode) {
        (_, Some(d)) => {
            let code = parse_nat(d)?;
            match which {
                Structure::Fin => json!({ "set": fin_decode(&code) }),
                Structure::Seq => json!({ "sequence": strings(&seq_decode(&code)) }),
                Structure::InjSeq => json!({ "sequence": strings(&injseq_decode(&code)) }),
            }
        }
        (Some(e), None) => {
            let items = split_list(e)
                .into_iter()
                .map(parse_nat)
                .collect::<Result<Vec<_>, _>>()?;
            let code = match which {
                Structure::Fin => {
                    let v = items
                        .iter()
                        .map(|b| u64::try_from(b).map_err(|_| usage(format!("{b} is too large"))))
                        .collect::<Result<Vec<u64>, _>>()?;
                    fin_encode(&v).map_err(usage)?
                }
                Structure::Seq => seq_encode(&items),
                Structure::InjSeq => injseq_encode(&items).map_err(usage)?,
            };
            json!({ "code": code.to_string() })
        }
        (None, None) => return Err(usage("one of --encode or --decode is required")),
    };
    Ok(RunReport::ok(&command, params, payload))
}

fn strings(v: &[BigUint]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn star_cmd(n: u64, modulus: Option<&str>, parity: bool) -> Result<RunReport, CliError> {
    let params = json!({ "n": n, "modulus": modulus, "parity": parity });
    let payload = if let Some(m) = modulus {
        let m = parse_nat(m)?;
        let r = star_mod(n, &m).map_err(usage)?;
        json!({ "modulus": m.to_string(), "residue": r.to_string() })
    } else if parity {
        let odd = star_mod(n, &BigUint::from(2u32)).map_err(usage)? == BigUint::from(1u32);
        json!({ "parity": if odd { "odd" } else { "even" } })
    } else {
        json!({ "value": star(n).to_string() })
    };
    Ok(RunReport::ok("star", params, payload))
}

fn lemmas(which: &LemmaOp) -> Result<RunReport, CliError> {
    let report = match which {
        LemmaOp::Divisibility { r, limit } => {
            let rep = check_divisibility_lemma(*r, *limit).map_err(usage)?;
            RunReport::from_report(
                "lemmas divisibility",
                json!({ "r": r, "limit": limit }),
                &rep,
            )
        }
        LemmaOp::Identity2 { n_max, k_max } => {
            if *n_max < 2 || *k_max < 2 {
                return Err(usage("need --n-max >= 2 and --k-max >= 2"));
            }
            let rep = check_identity_2_range(*n_max, *k_max);
            RunReport::from_report(
                "lemmas identity2",
                json!({ "n_max": n_max, "k_max": k_max }),
                &rep,
            )
        }
        LemmaOp::Tparity { n_max } => {
            let mut failing = None;
            let mut checked = Vec::new();
            for n in (3..=*n_max).step_by(2) {
                let rep = check_t_parity(n).map_err(usage)?;
                checked.push(n);
                if !rep.holds() {
                    failing = rep.counterexample;
                    break;
                }
            }
            let rep = Report {
                claim: "T(n) is odd for odd n".into(),
                range: format!("odd 3<=n<={n_max}"),
                status: match (&failing, checked.is_empty()) {
                    (Some(_), _) => Status::Counterexample,
                    (None, true) => Status::Vacuous,
                    (None, false) => Status::Holds,
                },
                counterexample: failing,
                details: Some(json!({ "checked": checked.len() })),
            };
            RunReport::from_report("lemmas tparity", json!({ "n_max": n_max }), &rep)
        }
        LemmaOp::Gap { n, t_lo, t_hi } => {
            let rep = check_star_gap_range(*n, *t_lo, *t_hi).map_err(usage)?;
            RunReport::from_report(
                "lemmas gap",
                json!({ "n": n, "t_lo": t_lo, "t_hi": t_hi }),
                &rep,
            )
        }
    };
    Ok(report)
}

fn parse_atoms(s: &str) -> Result<Vec<Atom>, CliError> {
    split_list(s)
        .into_iter()
        .map(|a| parse_atom(a).map_err(usage))
        .collect()
}

fn sorted_atoms(s: &str) -> Result<Vec<Atom>, CliError> {
    let mut v = parse_atoms(s)?;
    v.sort();
    v.dedup();
    Ok(v)
}

/// A set as JSON `{"support": [...], "pattern": "..."}` or `ATOMS:BITS`.
fn parse_set(s: &str) -> Result<SymSet, CliError> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| usage(format!("set {s:?}: {e}")));
    }
    let (atoms, bits) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("set {s:?}: expected ATOMS:BITS or a JSON object")))?;
    SymSet::from_bits(parse_atoms(atoms)?, bits.trim()).map_err(usage)
}

fn render_atoms(v: &[Atom]) -> Vec<String> {
    v.iter().map(format_atom).collect()
}

fn mostowski(op: &MostowskiOp) -> Result<RunReport, CliError> {
    let report = match op {
        MostowskiOp::Enumerate { support } => {
            let e = sorted_atoms(support)?;
            let sets = enumerate_with_support(&e);
            RunReport::ok(
                "mostowski enumerate",
                json!({ "support": render_atoms(&e) }),
                json!({ "count": sets.len(), "sets": sets }),
            )
        }
        MostowskiOp::Rank { support, set } => {
            let e = sorted_atoms(support)?;
            let x = parse_set(set)?;
            let r = rank(&x, &e).map_err(usage)?;
            RunReport::ok(
                "mostowski rank",
                json!({ "support": render_atoms(&e), "set": x }),
                json!({ "rank": r.to_string() }),
            )
        }
        MostowskiOp::Unrank { support, index } => {
            let e = sorted_atoms(support)?;
            let x = unrank(&e, &parse_nat(index)?).map_err(usage)?;
            RunReport::ok(
                "mostowski unrank",
                json!({ "support": render_atoms(&e), "index": index }),
                json!({ "set": x }),
            )
        }
        MostowskiOp::FinMap { support, preimage } => match (support, preimage) {
            (Some(s), _) => {
                let e = sorted_atoms(s)?;
                RunReport::ok(
                    "mostowski fin-map",
                    json!({ "support": render_atoms(&e) }),
                    json!({ "set": fin_map(&e) }),
                )
            }
            (None, Some(p)) => {
                let x = parse_set(p)?;
                let e = fin_preimage(&x);
                RunReport::ok(
                    "mostowski fin-map",
                    json!({ "preimage": x }),
                    json!({ "support": render_atoms(&e), "size": e.len() }),
                )
            }
            (None, None) => return Err(usage("one of --support or --preimage is required")),
        },
        MostowskiOp::SeqA { set, a24 } => {
            let x = parse_set(set)?;
            let reference = match a24 {
                Some(s) => parse_atoms(s)?,
                None => default_a24(),
            };
            let seq = seq_a(&x, &reference).map_err(usage)?;
            RunReport::ok(
                "mostowski seq-a",
                json!({ "set": x, "a24": render_atoms(&reference) }),
                json!({ "sequence": render_atoms(&seq), "length": seq.len() }),
            )
        }
        MostowskiOp::CheckInjective { atoms, max_support } => {
            let pool = sorted_atoms(atoms)?;
            let rep = check_seq_a_injective(&pool, *max_support, &default_a24()).map_err(usage)?;
            RunReport::from_report(
                "mostowski check-injective",
                json!({ "atoms": render_atoms(&pool), "max_support": max_support }),
                &rep,
            )
        }
        MostowskiOp::CheckOnto { atoms, max_support } => {
            let pool = sorted_atoms(atoms)?;
            let rep = check_fin_onto(&pool, *max_support);
            RunReport::from_report(
                "mostowski check-onto",
                json!({ "atoms": render_atoms(&pool), "max_support": max_support }),
                &rep,
            )
        }
        MostowskiOp::Automorphism {
            support,
            from,
            to,
            apply,
        } => {
            let e = sorted_atoms(support)?;
            let c = parse_atom(from).map_err(usage)?;
            let b = parse_atom(to).map_err(usage)?;
            let g = separating_automorphism(&e, &c, &b).map_err(usage)?;
            let points = match apply {
                Some(s) => parse_atoms(s)?,
                None => Vec::new(),
            };
            let images: Vec<Value> = points
                .iter()
                .map(|q| json!([format_atom(q), format_atom(&g.apply(q))]))
                .collect();
            RunReport::ok(
                "mostowski automorphism",
                json!({ "support": render_atoms(&e), "from": format_atom(&c), "to": format_atom(&b) }),
                json!({ "pieces": g, "fixes_support": g.fixes(&e), "images": images }),
            )
        }
        MostowskiOp::Inequality { lo, hi } => {
            let rep = check_inequality(*lo, *hi);
            RunReport::from_report("mostowski inequality", json!({ "lo": lo, "hi": hi }), &rep)
        }
    };
    Ok(report)
}

fn cofinite(rows: &[String]) -> Result<RunReport, CliError> {
    let parsed = rows
        .iter()
        .map(|r| {
            let t = r.trim();
            Ok(match t.strip_prefix('~') {
                Some(rest) => CofinSet::cofinite(parse_atoms(rest)?),
                None => CofinSet::finite(parse_atoms(t)?),
            })
        })
        .collect::<Result<Vec<CofinSet<Atom>>, CliError>>()?;
    let d = cofinite_decompose(&parsed);
    let finite: Vec<Value> = d
        .finite
        .iter()
        .map(|(i, a)| json!([i, format_atom(a)]))
        .collect();
    Ok(RunReport::ok(
        "cofinite decompose",
        json!({ "rows": rows }),
        json!({ "flags": d.flag_string(), "finite": finite }),
    ))
}

fn load_oracle(path: &str) -> Result<Oracle, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Oracle(format!("{path}: cannot read: {e}")))?;
    Oracle::from_json(&text).map_err(|e| CliError::Oracle(format!("{path}: {e}")))
}

fn run_report(command: &str, params: Value, o: &Oracle, run: &Run) -> RunReport {
    let mut payload = run.to_json(o);
    payload["extended"] = json!(run.extended_count());
    RunReport::new(command, params, run.outcome.status(), payload)
}

fn specker(op: &SpeckerOp, seed: u64) -> Result<RunReport, CliError> {
    let report = match op {
        SpeckerOp::Thm3Fact {
            trials,
            max_n,
            max_alpha,
        } => {
            if *max_n == 0 {
                return Err(usage("--max-n must be positive"));
            }
            let (pairs, failing) = thm3_fact_sweep(seed, *trials, *max_n, *max_alpha);
            let params =
                json!({ "seed": seed, "trials": trials, "max_n": max_n, "max_alpha": max_alpha });
            let counterexample = failing
                .as_ref()
                .map(|(n, stages)| json!({ "n": n, "stages": stages }));
            let status = if failing.is_some() {
                "counterexample"
            } else {
                "ok"
            };
            RunReport::new(
                "specker thm3-fact",
                params,
                status,
                json!({ "pairs": pairs, "counterexample": counterexample }),
            )
        }
        SpeckerOp::Thm3Run { oracle, budget } => {
            let o = load_oracle(oracle)?;
            let run = thm3_run(&o, *budget);
            run_report(
                "specker thm3-run",
                json!({ "oracle": oracle, "budget": budget }),
                &o,
                &run,
            )
        }
        SpeckerOp::LemmaRun { oracle, budget } => {
            let o = load_oracle(oracle)?;
            let run = lemma_run(&o, *budget);
            run_report(
                "specker lemma-run",
                json!({ "oracle": oracle, "budget": budget }),
                &o,
                &run,
            )
        }
        SpeckerOp::Thm4Run {
            oracle,
            budget,
            seed_size,
        } => {
            let o = load_oracle(oracle)?;
            let run = thm4_engine(&o, *seed_size, *budget);
            let params = json!({ "oracle": oracle, "budget": budget, "seed_size": seed_size });
            run_report("specker thm4-run", params, &o, &run)
        }
        SpeckerOp::Thm5Run {
            oracle,
            budget,
            s0,
            probes,
        } => {
            let o = load_oracle(oracle)?;
            let s0_elem = match s0 {
                Some(t) => o
                    .element(t)
                    .ok_or_else(|| usage(format!("--s0 {t:?} is not in the universe")))?,
                None => 0,
            };
            let probes = probes.unwrap_or(o.universe().len());
            let opts = Thm5Options {
                s0: s0_elem,
                budget: *budget,
                probes,
            };
            let run = thm5_run(&o, opts);
            let params = json!({
                "oracle": oracle,
                "budget": budget,
                "s0": o.universe().get(s0_elem),
                "probes": probes,
            });
            run_report("specker thm5-run", params, &o, &run)
        }
    };
    Ok(report)
}

fn selftest(criterion: Option<u8>) -> Result<RunReport, CliError> {
    let results = match criterion {
        Some(id) => vec![run_criterion(id)
            .ok_or_else(|| usage(format!("criterion must lie in 1..={}", criterion_count())))?],
        None => run_all(),
    };
    let passed = results.iter().filter(|r| r.passed).count();
    let failed: BTreeSet<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    let status = if failed.is_empty() {
        "ok"
    } else {
        "counterexample"
    };
    Ok(RunReport::new(
        "selftest",
        json!({ "criterion": criterion }),
        status,
        json!({ "passed": passed, "total": results.len(), "failed": failed, "criteria": results }),
    ))
}
