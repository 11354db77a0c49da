//! `orbitcert`: command-line front end.
//!
//! Exit codes: 0 success or verdict holds, 1 verdict fails, 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbitcert::marcinkiewicz::WeightSpec;
use orbitcert::verification::selftest;
use orbitcert::wire::{parse_certificate, parse_operator, parse_sequence, CertificateDoc, SequenceDoc};
use orbitcert::{
    check_doubling, check_orbit_criterion, check_tail_domination, e_functional, e_star,
    equiv_norm, format_rat, k_functional, k_orbit_constant, norm_alpha, orbit_constant,
    parse_rat, sandwich_check, verify_certificate, build_orbit_operator, check_tail_condition,
    FiniteSequence, OrbitVerdict, Rat,
};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "orbitcert", version, about = "Orbit certificates for the pair (l0, l1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nonincreasing rearrangement and the signed permutation that undoes it.
    Rearrange {
        #[arg(long)]
        x: PathBuf,
    },
    /// E-functional and its convex minorant; jump table if no t is given.
    Efunc {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        t: Option<String>,
    },
    /// K-functional at t, or its segments and breakpoints.
    Kfunc {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        t: Option<String>,
    },
    /// Tail domination, or the orbit criterion when a constant is given.
    Check {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        constant: Option<String>,
    },
    /// Bisection bracket for the least orbit constant.
    Constant {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "1/64")]
        precision: String,
    },
    /// Builds a certificate `T` with `Tb = a` and writes it to `--out`.
    Build {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        constant: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recomputes every claim of a certificate.
    Verify {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Applies an operator (or certificate) to a sequence.
    Apply {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        x: PathBuf,
    },
    /// Exact `sup_t K(t, a)/K(t, b)`.
    Korbit {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Marcinkiewicz norms, weight conditions and the norm sandwich.
    Marc {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        weight: PathBuf,
        /// Defaults to twice the length of x.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Randomized sweep over oracles, certificates and round trips.
    Selftest {
        /// Falls back to the SEED environment variable, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

enum Failure {
    Input(String),
    Verdict(Value),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn sequence(path: &Path) -> Result<FiniteSequence, Failure> {
    parse_sequence(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn rational(text: &str) -> Result<Rat, Failure> {
    Ok(parse_rat(text)?)
}

fn positive(text: &str, what: &str) -> Result<Rat, Failure> {
    let v = rational(text)?;
    if v <= Rat::from_integer(0.into()) {
        return Err(Failure::Input(format!("{what} must be positive")));
    }
    Ok(v)
}

fn strings(values: &[Rat]) -> Vec<String> {
    values.iter().map(format_rat).collect()
}

fn verdict_json(v: &OrbitVerdict, kind: &str) -> Value {
    json!({
        "check": kind,
        "holds": v.holds,
        "witness_k": v.witness_k,
        "constant": format_rat(&v.constant),
    })
}

fn gate(value: Value, holds: bool) -> Outcome {
    if holds {
        Ok(value)
    } else {
        Err(Failure::Verdict(value))
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Rearrange { x } => {
            let x = sequence(&x)?;
            let p = x.rearrange();
            let permutation: Vec<i64> = p
                .recover()
                .iter()
                .map(|s| if s.negative { -(s.index as i64 + 1) } else { s.index as i64 + 1 })
                .collect();
            Ok(json!({ "profile": strings(p.profile()), "permutation": permutation }))
        }
        Command::Efunc { x, t } => {
            let x = sequence(&x)?;
            match t {
                Some(t) => {
                    let t = rational(&t)?;
                    if t < Rat::from_integer(0.into()) {
                        return Err(Failure::Input("t must be nonnegative".into()));
                    }
                    Ok(json!({
                        "t": format_rat(&t),
                        "e": format_rat(&e_functional(&x, &t)),
                        "e_star": format_rat(&e_star(&x, &t)),
                    }))
                }
                None => {
                    // E is constant on [k, k+1): value tail(k+1)
                    let tails = x.rearrange().tails();
                    let jumps: Vec<Value> = (0..=tails.len())
                        .map(|k| json!({ "from": k, "e": format_rat(tails.at(k + 1)) }))
                        .collect();
                    Ok(json!({ "steps": jumps }))
                }
            }
        }
        Command::Kfunc { x, t } => {
            let x = sequence(&x)?;
            let k = k_functional(&x);
            match t {
                Some(t) => {
                    let t = positive(&t, "t")?;
                    Ok(json!({ "t": format_rat(&t), "k": format_rat(&k.eval(&t)) }))
                }
                None => {
                    let segments: Vec<Value> = k
                        .segments()
                        .iter()
                        .map(|s| json!({ "slope": format_rat(&s.slope), "intercept": format_rat(&s.intercept) }))
                        .collect();
                    Ok(json!({ "segments": segments, "breakpoints": strings(k.breakpoints()) }))
                }
            }
        }
        Command::Check { a, b, constant } => {
            let (a, b) = (sequence(&a)?, sequence(&b)?);
            let (v, kind) = match constant {
                Some(c) => (check_orbit_criterion(&a, &b, &positive(&c, "constant")?), "orbit_criterion"),
                None => (check_tail_domination(&a, &b), "tail_domination"),
            };
            gate(verdict_json(&v, kind), v.holds)
        }
        Command::Constant { a, b, precision } => {
            let (a, b) = (sequence(&a)?, sequence(&b)?);
            let iv = orbit_constant(&a, &b, &positive(&precision, "precision")?)?;
            Ok(json!({ "lo": format_rat(&iv.lo), "hi": format_rat(&iv.hi) }))
        }
        Command::Build { a, b, constant, out } => {
            let (a, b) = (sequence(&a)?, sequence(&b)?);
            let c = positive(&constant, "constant")?;
            let v = check_orbit_criterion(&a, &b, &c);
            if !v.holds {
                return Err(Failure::Verdict(verdict_json(&v, "orbit_criterion")));
            }
            let cert = build_orbit_operator(&a, &b, &c)?;
            let doc = serde_json::to_string_pretty(&CertificateDoc::from_certificate(&cert))?;
            fs::write(&out, doc + "\n").map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
            let (l1_cap, l0_cap) = cert.pipeline.ceilings();
            Ok(json!({
                "out": out.display().to_string(),
                "l1_bound": format_rat(&cert.l1_bound),
                "l0_expansion": cert.l0_expansion,
                "l1_ceiling": format_rat(&l1_cap),
                "l0_ceiling": l0_cap,
            }))
        }
        Command::Verify { op, a, b } => {
            let cert = parse_certificate(&read(&op)?)?;
            let (a, b) = (sequence(&a)?, sequence(&b)?);
            let report = verify_certificate(&cert, &a, &b);
            let passed = report.passed();
            gate(serde_json::to_value(&report)?, passed)
        }
        Command::Apply { op, x } => {
            let op = parse_operator(&read(&op)?)?;
            let image = op.apply(&sequence(&x)?)?;
            Ok(serde_json::to_value(SequenceDoc::from_sequence(&image))?)
        }
        Command::Korbit { a, b } => {
            let (a, b) = (sequence(&a)?, sequence(&b)?);
            let c = k_orbit_constant(&a, &b)?;
            Ok(json!({ "k_orbit_constant": format_rat(&c) }))
        }
        Command::Marc { x, weight, horizon } => {
            let x = sequence(&x)?;
            let spec: WeightSpec = serde_json::from_str(&read(&weight)?)?;
            let w = spec.build()?;
            let horizon = horizon.unwrap_or(2 * x.len().max(1));
            let doubling = check_doubling(&w, horizon)?;
            let tail = check_tail_condition(&w, horizon)?;
            let sandwich = sandwich_check(&x, &w)?;
            let holds = doubling.holds && tail.holds && sandwich.holds;
            let value = json!({
                "alpha_norm": format_rat(&norm_alpha(&x, &w)?),
                "equiv_norm": equiv_norm(&x, &w)?,
                "r1": format_rat(&w.r1),
                "r2": format_rat(&w.r2),
                "doubling": doubling,
                "tail_condition": tail,
                "sandwich": sandwich,
            });
            gate(value, holds)
        }
        Command::Selftest { seed, trials } => {
            let seed = match seed {
                Some(s) => s,
                None => match std::env::var("SEED") {
                    Ok(s) => s.trim().parse().map_err(|_| Failure::Input(format!("SEED={s} is not an integer")))?,
                    Err(_) => 0,
                },
            };
            let report = selftest(seed, trials);
            let passed = report.passed();
            gate(serde_json::to_value(&report)?, passed)
        }
    }
}

fn print(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(value) => {
            print(&value);
            ExitCode::SUCCESS
        }
        Err(Failure::Verdict(value)) => {
            print(&value);
            ExitCode::from(1)
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
