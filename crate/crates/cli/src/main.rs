use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use polycat::extension::eval_obj;
use polycat::json::{eval_trace_to_json, parse, poly_from_json, poly_to_json, render, sdc_to_json};
use polycat::laws::{self, InstanceGenConfig, LAWS};
use polycat::mutation::{self, Mutant};
use polycat::poly::{compose_seq, terminal_sdc};
use polycat::symbolic::{decode, encode, eval_via_extension, parse_poly, parse_poly_with_inputs, slice_of_assignment, Assignment};
use polycat::Error;

#[derive(Parser)]
#[command(name = "polycat", version, about = "Polynomials over finite sets")]
struct Cli {
    /// Re-verify induced maps by brute force.
    #[arg(long, global = true)]
    paranoid: bool,
    /// Write the result here instead of stdout.
    #[arg(short = 'o', global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Translate a polynomial such as "x^3y + 2 ; 3x^2z + y" into a diagram.
    Encode {
        text: String,
        /// Input variables, comma separated; defaults to those occurring.
        #[arg(long = "in", value_delimiter = ',')]
        inputs: Option<Vec<String>>,
        /// Output names, comma separated; defaults to out1, out2, ...
        #[arg(long = "out", value_delimiter = ',')]
        outputs: Option<Vec<String>>,
    },
    /// Read a diagram back as a polynomial.
    Decode { file: PathBuf },
    /// Compose diagrams, first file applied first.
    Compose {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Also print the terminal subdivided composite.
        #[arg(long)]
        trace: bool,
    },
    /// Count the outputs of a diagram at an assignment of its inputs.
    Eval {
        file: PathBuf,
        /// Values as k=v,...
        #[arg(long = "assign", value_delimiter = ',')]
        assign: Vec<String>,
        /// Also print the stages of the evaluation.
        #[arg(long)]
        trace: bool,
    },
    /// Run law suites on seeded random instances.
    Check {
        #[arg(long, default_value = "all")]
        law: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Switch on a known defect: drop-pi-section,
        /// unnormalized-identity-pullback or swap-cartesian-components.
        #[arg(long)]
        mutant: Option<String>,
        /// Run cases one at a time.
        #[arg(long)]
        sequential: bool,
    },
    /// Print every law with the module it belongs to.
    ListLaws,
}

struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotComposable(_) => 3,
            Error::IncompleteAssignment(_) | Error::NotNameable(_) | Error::Overflow => 4,
            _ => 2,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn fail(code: u8, msg: impl Into<String>) -> Fail {
    Fail { code, msg: msg.into() }
}

fn read_json(path: &Path) -> Result<Value, Fail> {
    let text = fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    Ok(parse(&text)?)
}

fn parse_assignment(items: &[String]) -> Result<Assignment, Fail> {
    items
        .iter()
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (k, v) = item.split_once('=').ok_or_else(|| fail(4, format!("expected k=v, found {item}")))?;
            let v = v.trim().parse::<u64>().map_err(|e| fail(4, format!("{item}: {e}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn count_json(n: u128) -> Value {
    u64::try_from(n).map_or_else(|_| Value::String(n.to_string()), Value::from)
}

/// Runs a command, returning its output and whether every law held.
fn run(cli: &Cli) -> Result<(String, bool), Fail> {
    let out = match &cli.cmd {
        Cmd::Encode { text, inputs, outputs } => {
            let mut s = match inputs {
                Some(vars) => parse_poly_with_inputs(text, vars)?,
                None => parse_poly(text)?,
            };
            if let Some(names) = outputs {
                s = s.with_outputs(names)?;
            }
            render(&poly_to_json(&encode(&s)?))
        }
        Cmd::Decode { file } => {
            let s = decode(&poly_from_json(&read_json(file)?)?)?;
            let outputs: Vec<String> = s.to_string().split(" ; ").map(str::to_string).collect();
            render(&json!({ "in": s.in_vars, "out": s.out_vars, "outputs": outputs, "text": s.to_string() }))
        }
        Cmd::Compose { files, trace } => {
            let seq = files.iter().map(|f| Ok(poly_from_json(&read_json(f)?)?)).collect::<Result<Vec<_>, Fail>>()?;
            let start = seq[0].src().clone();
            let composite = poly_to_json(&compose_seq(&start, &seq)?);
            if *trace {
                render(&json!({ "composite": composite, "terminal": sdc_to_json(&terminal_sdc(&start, &seq)?) }))
            } else {
                render(&composite)
            }
        }
        Cmd::Eval { file, assign, trace } => {
            let p = poly_from_json(&read_json(file)?)?;
            let a = parse_assignment(assign)?;
            let counts: serde_json::Map<String, Value> =
                eval_via_extension(&p, &a)?.into_iter().map(|(k, v)| (k, count_json(v))).collect();
            if *trace {
                let (_, t) = eval_obj(&p, &slice_of_assignment(p.src(), &a)?)?;
                render(&json!({ "counts": counts, "trace": eval_trace_to_json(&t) }))
            } else {
                render(&Value::Object(counts))
            }
        }
        Cmd::Check { law, seed, size, cases, mutant, sequential } => {
            let cfg = InstanceGenConfig { seed: *seed, max_set_size: *size as usize, cases: *cases };
            let selected: Vec<_> = if law == "all" {
                LAWS.iter().collect()
            } else {
                vec![laws::find_law(law).ok_or_else(|| fail(2, format!("unknown law {law}")))?]
            };
            if let Some(name) = mutant {
                let m = Mutant::from_name(name).ok_or_else(|| fail(2, format!("unknown mutant {name}")))?;
                mutation::set_active(Some(m));
            }
            let exec = if *sequential { laws::Exec::Sequential } else { laws::Exec::default() };
            let reports: Vec<_> = selected.iter().map(|l| laws::run_law_with(l, &cfg, exec)).collect();
            mutation::set_active(None);
            let ok = reports.iter().all(|r| r.passed());
            let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
            let body = json!({
                "seed": cfg.seed,
                "size": cfg.max_set_size,
                "cases": cfg.cases,
                "failures": failures,
                "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            return Ok((render(&body), ok));
        }
        Cmd::ListLaws => {
            LAWS.iter().map(|l| format!("{}\t{}\t{}\n", l.name, l.module, l.statement)).collect::<String>()
        }
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    mutation::set_paranoid(cli.paranoid);
    match run(&cli) {
        Ok((text, ok)) => {
            let text = if text.ends_with('\n') { text } else { text + "\n" };
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        eprintln!("{}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
