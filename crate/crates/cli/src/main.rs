use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use zfree_core::{
    brute_force_min, certificate_to_json, certify_completability, check_jwp, check_zfree, complete, completable_oracle,
    completion_to_json, generate_instance, instance_to_json, minimize_zfree_with, parse_instance,
    parse_partial_matrix, report_to_json, Completability, Error, GenConfig, NotCompletable, OracleBudget,
    SolveOptions, SolveReport, Status, Validation,
};

const EXIT_USAGE: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_NOT_COMPLETABLE: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "zfree", version, about = "Exact minimization of Z-free binary valued CSPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidateMode {
    /// Scan every triple and 2x2 sub-table before solving.
    Exhaustive,
    /// Complete first; scan only to explain a failure.
    Completion,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize an instance.
    Solve {
        file: PathBuf,
        /// Write the auxiliary graph of every iteration as DOT files into DIR.
        #[arg(long, value_name = "DIR")]
        dump_aux: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Include wall-clock step timings (output is then not reproducible).
        #[arg(long)]
        timings: bool,
        #[arg(long, value_enum, default_value = "exhaustive")]
        validate: ValidateMode,
    },
    /// Report the joint winner property and Z-freeness with witnesses.
    Check { file: PathBuf },
    /// Complete a partial matrix to an anti-ultrametric one.
    Complete {
        file: PathBuf,
        /// On failure, search for a chordless-cycle certificate (exponential).
        #[arg(long)]
        cycle: bool,
        #[arg(long, default_value_t = OracleBudget::default().max_evaluations)]
        budget: u128,
    },
    /// Minimize by exhaustive enumeration.
    OracleMin {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = OracleBudget::default().max_evaluations)]
        budget: u128,
    },
    /// Print a random JWP and Z-free instance.
    Gen {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        dmax: usize,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 9)]
        unary_max: u64,
        /// Make the top level of the hierarchy infinite.
        #[arg(long)]
        infinite_top: bool,
    },
    /// Evaluate JWP, Z-freeness and completability independently.
    Certify {
        file: PathBuf,
        #[arg(long, default_value_t = OracleBudget::default().max_evaluations)]
        budget: u128,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(String, u8), Error> {
    match command {
        Command::Solve { file, dump_aux, json, timings, validate } => {
            let inst = parse_instance(&read(&file)?)?;
            let validation = match validate {
                ValidateMode::Exhaustive => Validation::Exhaustive,
                ValidateMode::Completion => Validation::ByCompletion,
            };
            if let Some(dir) = &dump_aux {
                fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
            }
            let mut dump_error = None;
            let report = minimize_zfree_with(&inst, &SolveOptions { validation }, &mut |trace| {
                if let Some(dir) = &dump_aux {
                    let dot = trace.graph.to_dot(inst.space(), trace.potential, &trace.shortest.path);
                    let path = dir.join(format!("iter-{:03}.dot", trace.iteration));
                    if let Err(e) = fs::write(&path, dot) {
                        dump_error.get_or_insert(Error::Parse(format!("{}: {e}", path.display())));
                    }
                }
            })?;
            if let Some(e) = dump_error {
                return Err(e);
            }
            let code = if report.status.is_rejected() { EXIT_REJECTED } else { 0 };
            let out = if json { report_to_json(&report, timings) } else { report_text(&report, timings) };
            Ok((out, code))
        }
        Command::Check { file } => {
            let inst = parse_instance(&read(&file)?)?;
            let mut out = String::new();
            let mut code = 0;
            for (name, verdict) in [("jwp", check_jwp(&inst)), ("zfree", check_zfree(&inst))] {
                match verdict {
                    Ok(()) => writeln!(out, "{name}: ok").unwrap(),
                    Err(w) => {
                        code = EXIT_REJECTED;
                        writeln!(out, "{name}: {w}").unwrap();
                    }
                }
            }
            Ok((out, code))
        }
        Command::Complete { file, cycle, budget } => {
            let h = parse_partial_matrix(&read(&file)?)?;
            match complete(&h) {
                Ok(m) => Ok((completion_to_json(&m), 0)),
                Err(failure) => {
                    let cert = if cycle {
                        match completable_oracle(&h, &OracleBudget { max_evaluations: budget })? {
                            Completability::No(c) => NotCompletable::Cycle(c),
                            Completability::Yes => {
                                return Err(Error::Internal(
                                    "completion failed but no chordless-cycle certificate exists".into(),
                                ))
                            }
                        }
                    } else {
                        failure
                    };
                    Ok((certificate_to_json(&cert), EXIT_NOT_COMPLETABLE))
                }
            }
        }
        Command::OracleMin { file, json, budget } => {
            let inst = parse_instance(&read(&file)?)?;
            let (x, value) = brute_force_min(&inst, &OracleBudget { max_evaluations: budget })?;
            let finite = value.is_finite();
            let report = SolveReport {
                status: if finite { Status::Optimal } else { Status::InfiniteMinimum },
                assignment: finite.then_some(x),
                value,
                violation: None,
                iterations: 0,
                timings: Default::default(),
            };
            let out = if json { report_to_json(&report, false) } else { summary_text(&report) };
            Ok((out, 0))
        }
        Command::Gen { r, dmax, levels, seed, unary_max, infinite_top } => {
            let cfg = GenConfig { r, domains: None, dmax, levels, seed, unary_max, infinite_top };
            Ok((instance_to_json(&generate_instance(&cfg)?), 0))
        }
        Command::Certify { file, budget } => {
            let inst = parse_instance(&read(&file)?)?;
            let t = certify_completability(&inst, &OracleBudget { max_evaluations: budget })?;
            let out = format!(
                "jwp: {}\nzfree: {}\ncompletable: {}\nconsistent: {}\n",
                t.jwp,
                t.zfree,
                t.completable,
                (t.jwp && t.zfree) == t.completable
            );
            Ok((out, 0))
        }
    }
}

/// The lines shared by `solve` and `oracle-min`.
fn summary_text(report: &SolveReport) -> String {
    let mut out = format!("status: {}\n", report.status.as_str());
    if let Some(x) = &report.assignment {
        writeln!(out, "assignment: {x}").unwrap();
    }
    writeln!(out, "value: {}", report.value).unwrap();
    out
}

fn report_text(report: &SolveReport, timings: bool) -> String {
    let mut out = summary_text(report);
    if let Some(v) = &report.violation {
        writeln!(out, "violation: {v}").unwrap();
    }
    writeln!(out, "iterations: {}", report.iterations).unwrap();
    if timings {
        let t = &report.timings;
        writeln!(
            out,
            "timings: validation {:?}, completion {:?}, greedy {:?}, intersection {:?}",
            t.validation, t.completion, t.greedy, t.intersection
        )
        .unwrap();
    }
    out
}
