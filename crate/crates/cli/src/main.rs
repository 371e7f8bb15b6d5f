//! Command-line front end: every library operation behind stable JSON file
//! formats, for scripted workflows.
//!
//! Exit codes: 0 success, 1 validation failed (checked and not ok),
//! 2 incoherence witnessed, 3 malformed invocation or input file. The
//! 1/2 split lets pipelines tell "checked and failed" from "found a
//! Dutch book"; 3 means the check could not run at all.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sicrep::coherence::{
    check_additivity, check_born_coherence, check_joint_conditional, validate_prices,
    CoherenceVerdict,
};
use sicrep::experiments::{
    empirical_compare, marginal_j, sample_experiment_one, sample_experiment_two,
};
use sicrep::io::{self, GeometryReport, IoError};
use sicrep::qplex;
use sicrep::repr;
use sicrep::sic;
use sicrep::{RunConfig, ValidationReport};

#[derive(Parser)]
#[command(
    name = "sicrep",
    version,
    about = "Symmetric reference measurements, probability-form Born rule, \
             qplex geometry, and Dutch-book coherence checking"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fiducial search and reference-measurement verification
    Sic {
        #[command(subcommand)]
        cmd: SicCmd,
    },
    /// Conversions between operators and probability objects
    Repr {
        #[command(subcommand)]
        cmd: ReprCmd,
    },
    /// Evaluate the Born rule q = R Phi p
    Born(BornArgs),
    /// Evaluate the Law of Total Probability s = R p
    Ltp(LtpArgs),
    /// Largest gap between the Born rule and total probability
    LtpDeviation(LtpArgs2),
    /// Print the state-space bounds and ball radii for a dimension
    Geometry(GeometryArgs),
    /// Find a maximum mutually-maximally-distant subset of states
    Mmd(MmdArgs),
    /// Test whether a probability vector is a physically valid state
    ValidState(ValidStateArgs),
    /// Test whether a row vector is a physically valid effect
    ValidEffect(ValidEffectArgs),
    /// Fit a linear functional to samples and certify consistency
    LinearExtend(LinearExtendArgs),
    /// Dutch-book coherence checks
    Coherence {
        #[command(subcommand)]
        cmd: CoherenceCmd,
    },
    /// Seeded Monte-Carlo simulation of the two experiments
    Sim {
        #[command(subcommand)]
        cmd: SimCmd,
    },
}

#[derive(Subcommand)]
enum SicCmd {
    /// Search for a fiducial by seeded multistart minimization
    Find {
        #[arg(short = 'd', long)]
        dimension: usize,
        /// Seed for the restart streams (required: no hidden randomness)
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Verify the constant-overlap condition of a built system
    Verify {
        /// Fiducial file to build and verify
        #[arg(long, conflicts_with = "sic")]
        fiducial: Option<PathBuf>,
        /// Previously exported reference-system file
        #[arg(long)]
        sic: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write the verified system export here
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReprCmd {
    /// Density operator to outcome probabilities p(i) = tr(rho E_i)
    ToProb {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        fiducial: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Probability vector back to the operator it encodes
    FromProb {
        #[arg(short = 'p', long = "prob")]
        prob: PathBuf,
        #[arg(long)]
        fiducial: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// POVM to the conditional matrix R(j|i) = tr(Pi_i D_j)
    PovmToCond {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        fiducial: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Conditional matrix back to the POVM it encodes
    CondToPovm {
        #[arg(short = 'R', long = "cond")]
        cond: PathBuf,
        #[arg(long)]
        fiducial: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BornArgs {
    #[arg(short = 'p', long = "prob")]
    prob: PathBuf,
    #[arg(short = 'R', long = "cond")]
    cond: PathBuf,
    #[arg(short = 'd', long)]
    dimension: usize,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LtpArgs {
    #[arg(short = 'p', long = "prob")]
    prob: PathBuf,
    #[arg(short = 'R', long = "cond")]
    cond: PathBuf,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LtpArgs2 {
    #[arg(short = 'p', long = "prob")]
    prob: PathBuf,
    #[arg(short = 'R', long = "cond")]
    cond: PathBuf,
    #[arg(short = 'd', long)]
    dimension: usize,
}

#[derive(Args)]
struct GeometryArgs {
    #[arg(short = 'd', long)]
    dimension: usize,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MmdArgs {
    #[arg(short = 'd', long)]
    dimension: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Probability-vector files holding the candidate states
    #[arg(required = true)]
    states: Vec<PathBuf>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ValidStateArgs {
    #[arg(short = 'p', long = "prob")]
    prob: PathBuf,
    #[arg(long)]
    fiducial: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct ValidEffectArgs {
    #[arg(short = 'r', long = "effect")]
    effect: PathBuf,
    #[arg(long)]
    fiducial: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct LinearExtendArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CoherenceCmd {
    /// Validate a price map for the basic rules
    Prices {
        /// JSON object mapping event names to prices; "!E" is the
        /// complement of "E"
        #[arg(long)]
        prices: PathBuf,
    },
    /// Check p(E or F) = p(E) + p(F) for exclusive events
    Additivity {
        #[arg(long)]
        p_e: f64,
        #[arg(long)]
        p_f: f64,
        #[arg(long = "p-or")]
        p_or: f64,
        #[arg(long, default_value_t = 1.0)]
        stake: f64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Check p(E and F) = p(E) p(F|E)
    Conditional {
        #[arg(long)]
        p_e: f64,
        #[arg(long = "p-f-given-e")]
        p_f_given_e: f64,
        #[arg(long = "p-and")]
        p_and: f64,
        #[arg(long, default_value_t = 1.0)]
        stake: f64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Check a declared distribution against the Born rule
    Born {
        #[arg(short = 'p', long = "prob")]
        prob: PathBuf,
        #[arg(short = 'R', long = "cond")]
        cond: PathBuf,
        #[arg(short = 'q', long = "dist")]
        dist: PathBuf,
        #[arg(short = 'd', long)]
        dimension: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1.0)]
        stake: f64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Sample the one-stage experiment: j ~ q
    One {
        #[arg(short = 'q', long = "dist")]
        dist: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Sample the two-stage experiment: i ~ p, then j ~ R(.|i)
    Two {
        #[arg(short = 'p', long = "prob")]
        prob: PathBuf,
        #[arg(short = 'R', long = "cond")]
        cond: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Compare a count table against a predicted distribution
    Compare {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        predicted: PathBuf,
        /// Collapse a joint "i:j" table onto j before comparing
        #[arg(long)]
        marginal_j: bool,
    },
}

/// A failed run, carrying the exit code for the taxonomy above.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn malformed(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(err: IoError) -> Self {
        match err {
            // Value-level invariant violations are semantic failures;
            // everything else means the file itself is unusable.
            IoError::Domain(e) => Failure::invalid(e.to_string()),
            other => Failure::malformed(other.to_string()),
        }
    }
}

impl From<sicrep::Error> for Failure {
    fn from(err: sicrep::Error) -> Self {
        Failure::invalid(err.to_string())
    }
}

type RunResult = Result<ExitCode, Failure>;

/// Writes pretty JSON to the path when given, otherwise to standard output.
fn emit<T: Serialize>(output: Option<&Path>, value: &T) -> Result<(), Failure> {
    match output {
        Some(path) => io::write_json(path, value).map_err(Failure::from),
        None => {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("serializable value")
            );
            Ok(())
        }
    }
}

/// Scalars print with 17 significant digits.
fn print_scalar(x: f64) {
    println!("{x:.16e}");
}

fn report_outcome(report: &ValidationReport) -> RunResult {
    emit(None, report)?;
    if report.ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn load_system(fiducial: &Path) -> Result<sicrep::SicSystem, Failure> {
    Ok(sic::build_sic(&io::load_fiducial(fiducial)?))
}

fn verdict_outcome(
    verdict: &CoherenceVerdict,
    output: Option<&Path>,
) -> RunResult {
    match verdict {
        CoherenceVerdict::Coherent => {
            println!("coherent");
            Ok(ExitCode::SUCCESS)
        }
        CoherenceVerdict::Incoherent(witness) => {
            emit(output, witness.as_ref())?;
            Ok(ExitCode::from(2))
        }
    }
}

fn run(cli: Cli) -> RunResult {
    match cli.cmd {
        Cmd::Sic { cmd } => run_sic(cmd),
        Cmd::Repr { cmd } => run_repr(cmd),
        Cmd::Born(args) => {
            let p = io::load_prob(&args.prob)?;
            let r = io::load_cond(&args.cond)?;
            let q = repr::born(&p, &r, args.dimension)?;
            if !q.valid {
                eprintln!(
                    "warning: output has entries outside the unit interval; \
                     the inputs are not jointly physically valid"
                );
            }
            match args.output {
                Some(path) => io::save_raw_dist(&path, &q.q)?,
                None => emit(None, &serde_json::json!({ "p": q.q }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Ltp(args) => {
            let p = io::load_prob(&args.prob)?;
            let r = io::load_cond(&args.cond)?;
            let s = repr::ltp(&p, &r)?;
            match args.output {
                Some(path) => io::save_dist(&path, &s)?,
                None => emit(None, &serde_json::json!({ "p": s.values() }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::LtpDeviation(args) => {
            let p = io::load_prob(&args.prob)?;
            let r = io::load_cond(&args.cond)?;
            print_scalar(repr::ltp_deviation(&p, &r, args.dimension)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Geometry(args) => {
            if args.dimension < 2 {
                return Err(Failure::invalid("dimension must be at least 2"));
            }
            let geometry = qplex::quantum_bounds(args.dimension);
            let report = GeometryReport {
                mmd_bound: qplex::mmd_bound(geometry.n, geometry.l, geometry.u)?,
                geometry,
            };
            emit(args.output.as_deref(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Mmd(args) => {
            if args.dimension < 2 {
                return Err(Failure::invalid("dimension must be at least 2"));
            }
            let states = args
                .states
                .iter()
                .map(|p| io::load_prob(p))
                .collect::<Result<Vec<_>, _>>()?;
            let geometry = qplex::quantum_bounds(args.dimension);
            let result = qplex::find_mmd(&states, &geometry, args.tol);
            emit(args.output.as_deref(), &result)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ValidState(args) => {
            let p = io::load_prob(&args.prob)?;
            let sic = load_system(&args.fiducial)?;
            report_outcome(&qplex::valid_state(&p, &sic, args.tol)?)
        }
        Cmd::ValidEffect(args) => {
            let r = io::load_effect_row(&args.effect)?;
            let sic = load_system(&args.fiducial)?;
            report_outcome(&qplex::valid_effect(&r, &sic, args.tol)?)
        }
        Cmd::LinearExtend(args) => {
            let samples = io::load_samples(&args.samples)?;
            let w = qplex::linear_extension(&samples, args.tol)?;
            let max_residual = samples
                .iter()
                .map(|(v, y)| {
                    (v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - y).abs()
                })
                .fold(0.0, f64::max);
            emit(
                args.output.as_deref(),
                &serde_json::json!({ "w": w, "max_residual": max_residual }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Coherence { cmd } => run_coherence(cmd),
        Cmd::Sim { cmd } => run_sim(cmd),
    }
}

fn run_sic(cmd: SicCmd) -> RunResult {
    match cmd {
        SicCmd::Find {
            dimension,
            seed,
            restarts,
            tol,
            output,
        } => {
            let fiducial = sic::find_fiducial(dimension, seed, restarts, tol)?;
            let error = sic::frame_potential_error(&fiducial);
            eprintln!("frame potential error: {error:.16e}");
            match output {
                Some(path) => io::save_fiducial(&path, &fiducial)?,
                None => emit(None, &io::FiducialFile::from_fiducial(&fiducial))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        SicCmd::Verify {
            fiducial,
            sic: sic_path,
            tol,
            output,
        } => {
            let system = match (fiducial, sic_path) {
                (Some(f), None) => load_system(&f)?,
                (None, Some(s)) => io::load_sic_system(&s)?,
                _ => {
                    return Err(Failure::malformed(
                        "provide exactly one of --fiducial or --sic",
                    ))
                }
            };
            let report = sic::verify_sic(&system, tol);
            if let Some(path) = output {
                io::save_sic_system(&path, &system)?;
            }
            report_outcome(&report)
        }
    }
}

fn run_repr(cmd: ReprCmd) -> RunResult {
    match cmd {
        ReprCmd::ToProb {
            rho,
            fiducial,
            output,
        } => {
            let sic = load_system(&fiducial)?;
            let rho = io::load_matrix(&rho)?;
            let p = repr::state_to_prob(&rho, &sic)?;
            match output {
                Some(path) => io::save_prob(&path, &p)?,
                None => emit(None, &serde_json::json!({ "p": p.values() }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        ReprCmd::FromProb {
            prob,
            fiducial,
            output,
        } => {
            let sic = load_system(&fiducial)?;
            let p = io::load_prob(&prob)?;
            let rho = repr::prob_to_state(&p, &sic)?;
            match output {
                Some(path) => io::save_matrix(&path, &rho)?,
                None => emit(None, &io::MatrixFile::from_matrix(&rho))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        ReprCmd::PovmToCond {
            povm,
            fiducial,
            output,
        } => {
            let sic = load_system(&fiducial)?;
            let effects = io::load_povm(&povm)?;
            let r = repr::povm_to_cond(&effects, &sic)?;
            match output {
                Some(path) => io::save_cond(&path, &r)?,
                None => emit(
                    None,
                    &io::CondFile {
                        j: r.j(),
                        n: r.n(),
                        r: (0..r.j()).map(|jj| r.row(jj)).collect(),
                    },
                )?,
            }
            Ok(ExitCode::SUCCESS)
        }
        ReprCmd::CondToPovm {
            cond,
            fiducial,
            output,
        } => {
            let sic = load_system(&fiducial)?;
            let r = io::load_cond(&cond)?;
            let povm = repr::cond_to_povm(&r, &sic)?;
            match output {
                Some(path) => io::save_povm(&path, &povm)?,
                None => {
                    let files: Vec<io::MatrixFile> =
                        povm.iter().map(io::MatrixFile::from_matrix).collect();
                    emit(None, &files)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_coherence(cmd: CoherenceCmd) -> RunResult {
    match cmd {
        CoherenceCmd::Prices { prices } => {
            let map: BTreeMap<String, f64> = io::load_prices(&prices)?;
            report_outcome(&validate_prices(&map))
        }
        CoherenceCmd::Additivity {
            p_e,
            p_f,
            p_or,
            stake,
            output,
        } => {
            check_unit_interval(&[("p-e", p_e), ("p-f", p_f), ("p-or", p_or)])?;
            verdict_outcome(&check_additivity(p_e, p_f, p_or, stake), output.as_deref())
        }
        CoherenceCmd::Conditional {
            p_e,
            p_f_given_e,
            p_and,
            stake,
            output,
        } => {
            check_unit_interval(&[
                ("p-e", p_e),
                ("p-f-given-e", p_f_given_e),
                ("p-and", p_and),
            ])?;
            verdict_outcome(
                &check_joint_conditional(p_e, p_f_given_e, p_and, stake),
                output.as_deref(),
            )
        }
        CoherenceCmd::Born {
            prob,
            cond,
            dist,
            dimension,
            tol,
            stake,
            output,
        } => {
            let p = io::load_prob(&prob)?;
            let r = io::load_cond(&cond)?;
            let q = io::load_dist(&dist)?;
            let verdict = check_born_coherence(&p, &r, &q, dimension, tol, stake)?;
            verdict_outcome(&verdict, output.as_deref())
        }
    }
}

fn check_unit_interval(values: &[(&str, f64)]) -> Result<(), Failure> {
    for (name, v) in values {
        if !v.is_finite() || *v < 0.0 || *v > 1.0 {
            return Err(Failure::invalid(format!(
                "--{name} must lie in [0, 1], got {v}"
            )));
        }
    }
    Ok(())
}

fn run_sim(cmd: SimCmd) -> RunResult {
    match cmd {
        SimCmd::One {
            dist,
            shots,
            seed,
            output,
        } => {
            let q = io::load_dist(&dist)?;
            let table = sample_experiment_one(&q, &RunConfig::new(shots, seed));
            emit_table(output.as_deref(), &table, seed)
        }
        SimCmd::Two {
            prob,
            cond,
            shots,
            seed,
            output,
        } => {
            let p = io::load_prob(&prob)?;
            let r = io::load_cond(&cond)?;
            if p.len() != r.n() {
                return Err(Failure::invalid(format!(
                    "state length {} does not match matrix N = {}",
                    p.len(),
                    r.n()
                )));
            }
            let table = sample_experiment_two(&p, &r, &RunConfig::new(shots, seed));
            emit_table(output.as_deref(), &table, seed)
        }
        SimCmd::Compare {
            table,
            predicted,
            marginal_j: collapse,
        } => {
            let mut table = io::load_count_table(&table)?;
            if collapse {
                table = marginal_j(&table)?;
            }
            let q = io::load_dist(&predicted)?;
            print_scalar(empirical_compare(&table, &q)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit_table(
    output: Option<&Path>,
    table: &sicrep::CountTable,
    seed: u64,
) -> RunResult {
    match output {
        Some(path) => io::save_count_table(path, table, seed)?,
        None => emit(
            None,
            &io::CountTableFile {
                labels: table.labels.clone(),
                counts: table.counts.clone(),
                total: table.total,
                seed,
            },
        )?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                // Unknown flags and malformed invocations share the
                // malformed-input code so 2 stays reserved for witnesses.
                _ => {
                    eprintln!("{err}");
                    ExitCode::from(3)
                }
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
