//! Command-line front end: argument parsing, the run pipeline for each
//! subcommand and the exit-code contract.
//!
//! Exit codes: 0 success, 1 usage or invalid input, 2 the instance is
//! rejected for its algebraic class, 3 a numerical or tolerance failure
//! (including a failed verification check).

pub mod report;
pub mod text;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use liespec::generate::{random_family, FamilyKind, GenOptions};
use liespec::instance::{corpus_file, InstanceFile, ToleranceOverrides, CORPUS};
use liespec::liealg::{classify, derived_series, jordan_holder_flag, lower_central_series, Classification, LieAlgebra};
use liespec::numkit::Tolerances;
use liespec::spectrum::{joint_spectrum, taylor_oracle, weights, SpectrumResult};
use liespec::verify::{component_spectra, run_checks, Check, CheckStatus, VerifyOptions};
use liespec::Error;

use report::{cx_vec, rounded_check, ConstantsSummary, ErrorSummary, FlagSummary, InstanceSummary, Report, SeriesSummary, SpectrumSummary, WeightSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CLASSIFICATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "liespec", version, about = "Joint spectra of solvable Lie algebras of matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true, value_name = "X", value_parser = positive)]
    pub tol_rank: Option<f64>,

    /// Radius under which eigenvalues and spectrum points are identified.
    #[arg(long, global = true, value_name = "X", value_parser = positive)]
    pub tol_cluster: Option<f64>,

    /// Bound on closure and identity residuals.
    #[arg(long, global = true, value_name = "X", value_parser = positive)]
    pub tol_residual: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("tolerance must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classification, series, Jordan-Hölder flag and structure constants.
    Analyze { path: PathBuf },
    /// Full analysis plus component spectra, weights and the joint spectrum.
    Spectrum { path: PathBuf },
    /// Runs structural checks against the computed spectrum.
    Verify {
        path: PathBuf,
        /// Comma-separated subset of dd, split, homotopy, thm1, thm2, projection, oracle.
        #[arg(long, value_delimiter = ',', default_value = "dd,split,homotopy,thm1,thm2,projection,oracle")]
        checks: Vec<Check>,
        /// Random characters sampled per check.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Joint eigenvalues of a commuting family by deflation.
    Oracle { path: PathBuf },
    /// The bundled example corpus and the random generator.
    Examples {
        #[command(subcommand)]
        action: ExamplesCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExamplesCommand {
    /// Names of the bundled instance files.
    List,
    /// Prints a bundled instance file.
    Emit { name: String },
    /// Prints a seeded random instance file.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::Solvable)]
        kind: Kind,
        /// Draw complex diagonal weights.
        #[arg(long)]
        complex: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Solvable,
    Nilpotent,
    Commuting,
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: EXIT_OK }
    }

    fn usage(message: String) -> Self {
        Outcome { stdout: String::new(), stderr: message, code: EXIT_USAGE }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Classification(_) | Error::NotCommuting { .. } | Error::NotClosed { .. } => EXIT_CLASSIFICATION,
        Error::Instance(_) | Error::Dimension(_) | Error::DegenerateBasis { .. } | Error::NonFinite | Error::Io(_) => {
            EXIT_USAGE
        }
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { Outcome::usage(text) } else { Outcome::ok(text) };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Examples { action } => examples(action),
        Command::Analyze { path } => with_instance(cli, path, "analyze", |ctx, report| analyze(ctx, report).map(|_| ())),
        Command::Spectrum { path } => with_instance(cli, path, "spectrum", |ctx, report| spectrum(ctx, report).map(|_| ())),
        Command::Verify { path, checks, samples, seed } => with_instance(cli, path, "verify", |ctx, report| {
            let result = spectrum(ctx, report)?;
            let opts = VerifyOptions { samples: *samples, seed: *seed };
            let results = run_checks(&ctx.family, &result, checks, &opts, &ctx.tol);
            let failed: Vec<&str> = results.iter().filter(|c| c.status == CheckStatus::Fail).map(|c| c.name.as_str()).collect();
            report.checks = Some(results.into_iter().map(rounded_check).collect());
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::Tolerance(format!("checks failed: {}", failed.join(", "))))
            }
        }),
        Command::Oracle { path } => with_instance(cli, path, "oracle", |ctx, report| {
            let alg = LieAlgebra::new(ctx.family.clone(), &ctx.tol)?;
            report.classification = Some(classify(alg.constants(), &ctx.tol));
            let points = taylor_oracle(&ctx.family, &ctx.tol)?;
            report.oracle = Some(points.iter().map(|p| cx_vec(p, ctx.tol.eig_cluster)).collect());
            Ok(())
        }),
    }
}

struct Context {
    family: liespec::liealg::OperatorFamily,
    tol: Tolerances,
}

fn cli_overrides(cli: &Cli) -> ToleranceOverrides {
    ToleranceOverrides { rank_rel: cli.tol_rank, eig_cluster: cli.tol_cluster, residual: cli.tol_residual }
}

/// Loads the instance, applies tolerances (defaults, then the file, then the
/// command line), runs `body` and renders the report.
fn with_instance(
    cli: &Cli,
    path: &PathBuf,
    command: &str,
    body: impl FnOnce(&Context, &mut Report) -> liespec::Result<()>,
) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(format!("error: cannot read {}: {e}\n", path.display())),
    };
    let mut file = match InstanceFile::from_json(&text) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(format!("error: {}: {e}\n", path.display())),
    };
    let tol = cli_overrides(cli).apply(file.tolerances.take().unwrap_or_default().apply(Tolerances::default()));
    let instance = match file.validate(tol) {
        Ok(i) => i,
        Err(e) => {
            return Outcome { stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()), code: exit_code(&e) }
        }
    };
    let ctx = Context { family: instance.family, tol: instance.tolerances };
    let summary = InstanceSummary {
        name: instance.name,
        space_dim: ctx.family.space_dim(),
        algebra_dim: ctx.family.algebra_dim(),
        labels: ctx.family.labels().to_vec(),
    };
    let mut report = Report::new(command, summary, ctx.tol);
    let (code, stderr) = match body(&ctx, &mut report) {
        Ok(()) => (EXIT_OK, String::new()),
        Err(e) => {
            let code = exit_code(&e);
            report.error = Some(ErrorSummary { exit_code: code, message: e.to_string() });
            (code, format!("error: {e}\n"))
        }
    };
    let stdout = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => text::render(&report),
    };
    Outcome { stdout, stderr, code }
}

/// Fills the structural sections; returns the algebra and its class.
fn analyze(ctx: &Context, report: &mut Report) -> liespec::Result<(LieAlgebra, Classification)> {
    let alg = LieAlgebra::new(ctx.family.clone(), &ctx.tol)?;
    let class = classify(alg.constants(), &ctx.tol);
    report.classification = Some(class);
    report.series = Some(SeriesSummary {
        derived: derived_series(alg.constants(), &ctx.tol).dims,
        lower_central: lower_central_series(alg.constants(), &ctx.tol).dims,
    });
    if class.is_solvable() {
        let flag = jordan_holder_flag(&alg, &ctx.tol)?;
        report.flag = Some(FlagSummary::new(&flag));
        report.structure_constants = Some(ConstantsSummary::new("adapted", flag.constants()));
    } else {
        report.structure_constants = Some(ConstantsSummary::new("original", alg.constants()));
    }
    Ok((alg, class))
}

fn spectrum(ctx: &Context, report: &mut Report) -> liespec::Result<SpectrumResult> {
    let (_, class) = analyze(ctx, report)?;
    if !class.is_solvable() {
        return Err(Error::Classification(class.to_string()));
    }
    let result = joint_spectrum(&ctx.family, &ctx.tol)?;
    let sc = result.adapted().constants();
    report.component_spectra =
        Some(component_spectra(&result, &ctx.tol)?.iter().map(|v| cx_vec(v, ctx.tol.eig_cluster)).collect());
    report.weights = Some(
        (0..sc.dim())
            .map(|j| weights(sc, j, &ctx.tol).map(|t| WeightSummary::new(&t)))
            .collect::<liespec::Result<Vec<_>>>()?,
    );
    report.spectrum = Some(SpectrumSummary::new(&result, &ctx.tol));
    Ok(result)
}

fn examples(action: &ExamplesCommand) -> Outcome {
    match action {
        ExamplesCommand::List => {
            let mut out = String::new();
            for (name, _) in CORPUS {
                out.push_str(name);
                out.push('\n');
            }
            Outcome::ok(out)
        }
        ExamplesCommand::Emit { name } => match corpus_file(name) {
            Some(text) => Outcome::ok(text.to_string()),
            None => {
                let names: Vec<&str> = CORPUS.iter().map(|(n, _)| *n).collect();
                Outcome::usage(format!("error: no bundled example '{name}' (available: {})\n", names.join(", ")))
            }
        },
        ExamplesCommand::Gen { seed, dim, n, kind, complex } => {
            let (family_kind, prefix) = match kind {
                Kind::Solvable => (FamilyKind::Solvable, "solvable"),
                Kind::Nilpotent => (FamilyKind::Nilpotent, "nilpotent"),
                Kind::Commuting => (FamilyKind::Commuting, "commuting"),
            };
            let opts = GenOptions { complex_diagonal: *complex, ..GenOptions::default() };
            match random_family(family_kind, *seed, *dim, *n, &opts) {
                Ok(g) => {
                    let name = format!("random_{prefix}_seed{seed}_d{dim}_n{n}");
                    let mut text = InstanceFile::from_family(&name, &g.family).to_json();
                    text.push('\n');
                    Outcome::ok(text)
                }
                Err(e) => Outcome::usage(format!("error: {e}\n")),
            }
        }
    }
}
