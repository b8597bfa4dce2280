mod fuzz;
mod report;

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use gauss_parity::diagram::{parse_code, DecoratedDiagram, Level};
use gauss_parity::invariants::{attest, minimality_certificate, BRACKET_CAP};
use gauss_parity::moves::MoveTrace;
use gauss_parity::parity::gaussian_parity;
use gauss_parity::universal::{collect_relations, explore, factor_check, local_universal_group};
use gauss_parity::Error;

use fuzz::{Counterexample, FuzzParams, ParityChoice, Suite};

const AFTER_HELP: &str = "\
Codes are whitespace-separated tokens. Free codes use any labels
(`1 2 1 2`); flat codes use H<k>/T<k> for head and tail of arrow k;
virtual codes use O<k><sign>/U<k><sign> for over and under passages.

Moves act on Gauss codes. Virtual crossings are not recorded, so the
detour move is the identity on codes and never appears in traces.

Exit status: 0 on success, 1 when a check finds a violation, 2 on bad input.
Set PARITY_THREADS to bound the number of worker threads.";

#[derive(Parser)]
#[command(name = "gparity", version, about = "Parities and parity invariants of free, flat and virtual knots", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Gauss code of the diagram.
    code: Option<String>,
    /// Read one code per line from a file (`-` for stdin) and write one JSON
    /// object per line.
    #[arg(long, conflicts_with = "code")]
    corpus: Option<PathBuf>,
    #[arg(long, default_value = "free")]
    level: Level,
    /// Treat a free diagram as oriented (no reflections).
    #[arg(long)]
    oriented: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical code.
    Canon {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Gaussian parity, parity bracket, surface data and certificate.
    Invariants {
        #[command(flatten)]
        input: Input,
        /// Largest number of even crossings the bracket will expand.
        #[arg(long, default_value_t = BRACKET_CAP)]
        bracket_cap: usize,
        #[arg(long)]
        json: bool,
        /// Print the diagram as a Graphviz graph instead.
        #[arg(long)]
        dot: bool,
    },
    /// Minimality certificate with a bounded search attestation.
    Certify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Crossing cap of the search; defaults to two more than the diagram.
        #[arg(long)]
        cap: Option<usize>,
        /// Also write the certificate to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Presentation of the parity group of a region of the move graph.
    Universal {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 6)]
        cap: usize,
    },
    /// Random move traces checked against a property suite.
    Fuzz {
        #[arg(value_enum)]
        suite: Suite,
        /// Start every trace here instead of at all small free diagrams.
        #[arg(long)]
        code: Option<String>,
        #[arg(long, default_value = "free")]
        level: Level,
        #[arg(long, value_enum, default_value = "gp")]
        parity: ParityChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        traces: usize,
        #[arg(long, default_value_t = 6)]
        length: usize,
        #[arg(long, default_value_t = 10)]
        cap: usize,
        /// Seed diagrams have at most this many chords.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        /// Write the first counterexample here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the check recorded in a counterexample file.
    Replay { file: PathBuf },
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var("PARITY_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .expect("thread pool is configured once");
            }
            _ => {
                eprintln!("error: PARITY_THREADS must be a positive integer, got `{n}`");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

enum Failure {
    Input(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn parse(input: &Input, code: &str) -> Result<DecoratedDiagram, Error> {
    let d = parse_code(code, input.level)?;
    Ok(if input.oriented { d.with_oriented(true) } else { d })
}

fn to_json<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("reports serialize")
}

fn to_json_pretty<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("reports serialize")
}

/// Runs `f` on every corpus line in parallel and prints results in input
/// order, one JSON object per line. Lines that fail to parse or evaluate are
/// reported in place and make the exit status 2.
fn corpus<F>(input: &Input, path: &PathBuf, f: F) -> Result<ExitCode, Failure>
where
    F: Fn(&str, &DecoratedDiagram) -> Result<(serde_json::Value, bool), Error> + Sync,
{
    let lines: Vec<String> = if path.as_os_str() == "-" {
        std::io::stdin().lock().lines().collect::<Result<_, _>>()?
    } else {
        std::fs::read_to_string(path)?.lines().map(str::to_string).collect()
    };
    let codes: Vec<&str> = lines
        .iter()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let results: Vec<(String, u8)> = codes
        .par_iter()
        .map(|code| match parse(input, code).and_then(|d| f(code, &d)) {
            Ok((v, ok)) => (to_json(&v), if ok { 0 } else { 1 }),
            Err(e) => (
                to_json(&serde_json::json!({ "input": code, "error": e.to_string() })),
                2,
            ),
        })
        .collect();
    let mut out = std::io::stdout().lock();
    let mut status = 0;
    for (line, s) in results {
        writeln!(out, "{line}")?;
        status = status.max(s);
    }
    Ok(ExitCode::from(status))
}

fn single(input: &Input) -> Result<(String, DecoratedDiagram), Failure> {
    let Some(code) = &input.code else {
        return Err(Failure::Input("give a code or --corpus FILE".into()));
    };
    Ok((code.clone(), parse(input, code)?))
}

fn run(cmd: Command) -> Result<ExitCode, Failure> {
    match cmd {
        Command::Canon { input, json } => {
            let canon = |code: &str, d: &DecoratedDiagram| {
                Ok((serde_json::json!({ "input": code, "canonical": d.canonical_code() }), true))
            };
            if let Some(p) = &input.corpus {
                return corpus(&input, p, canon);
            }
            let (code, d) = single(&input)?;
            if json {
                println!("{}", to_json(&canon(&code, &d)?.0));
            } else {
                println!("{}", d.canonical_code());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Invariants {
            input,
            bracket_cap,
            json,
            dot,
        } => {
            let rep = |code: &str, d: &DecoratedDiagram| {
                let r = report::invariant_report(code, d, bracket_cap)?;
                Ok((serde_json::to_value(&r).expect("reports serialize"), true))
            };
            if let Some(p) = &input.corpus {
                return corpus(&input, p, rep);
            }
            let (code, d) = single(&input)?;
            if dot {
                print!("{}", d.canonical_form().base().to_dot());
                return Ok(ExitCode::SUCCESS);
            }
            let r = report::invariant_report(&code, &d, bracket_cap)?;
            if json {
                println!("{}", to_json_pretty(&r));
            } else {
                print!("{}", r.to_text());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify {
            input,
            depth,
            cap,
            out,
        } => {
            let certify = |code: &str, d: &DecoratedDiagram| {
                let base = d.base();
                match minimality_certificate(base) {
                    None => {
                        let gp = gaussian_parity(base).bits();
                        let reason = if gp.contains(&0) {
                            "some crossing is even"
                        } else {
                            "a decreasing R2 move applies"
                        };
                        Ok((
                            serde_json::json!({ "input": code, "certified": false, "reason": reason, "gp": gp }),
                            true,
                        ))
                    }
                    Some(mut c) => {
                        let cap = cap.unwrap_or(c.n + 2);
                        attest(&mut c, depth, cap)?;
                        let ok = c.attestation.as_ref().is_some_and(|a| a.verified_strong_form);
                        Ok((serde_json::to_value(&c).expect("certificates serialize"), ok))
                    }
                }
            };
            if let Some(p) = &input.corpus {
                return corpus(&input, p, certify);
            }
            let (code, d) = single(&input)?;
            let (v, ok) = certify(&code, &d)?;
            let text = to_json_pretty(&v);
            if let Some(path) = out {
                std::fs::write(path, format!("{text}\n"))?;
            }
            println!("{text}");
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Universal { input, radius, cap } => {
            let (_, d) = single(&input)?;
            let region = explore(&d, radius, cap);
            let rs = collect_relations(&region)?;
            let g = local_universal_group(&region, &rs)?;
            let gp = |x: &DecoratedDiagram| Ok(gaussian_parity(x.base()));
            let check = factor_check(&region, &rs, &gp)?;
            let v = serde_json::json!({
                "presentation": g,
                "diagrams": region.len(),
                "relations": rs.relations.len(),
                "gp_factors": check.is_clean(),
                "gp_violations": check.violations,
            });
            println!("{}", to_json_pretty(&v));
            Ok(if check.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Fuzz {
            suite,
            code,
            level,
            parity,
            seed,
            traces,
            length,
            cap,
            max_n,
            out,
        } => {
            let given = code.map(|c| parse_code(&c, level)).transpose()?;
            let seeds = fuzz::seed_diagrams(given, max_n);
            let params = FuzzParams {
                suite,
                parity,
                traces,
                length,
                cap,
                seed,
            };
            let summary = fuzz::run(&seeds, &params)?;
            if let (Some(path), Some(c)) = (out, &summary.counterexample) {
                std::fs::write(path, format!("{}\n", to_json_pretty(c)))?;
            }
            println!("{}", to_json_pretty(&summary));
            Ok(if summary.failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Replay { file } => {
            let text = std::fs::read_to_string(&file)?;
            let c: Counterexample = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
            let trace = MoveTrace::from_json(&c.trace)?;
            let found = fuzz::check(c.suite, c.parity, &trace)?;
            let v = serde_json::json!({ "reproduced": found.is_some(), "detail": found });
            println!("{}", to_json_pretty(&v));
            Ok(if found.is_some() { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
    }
}
