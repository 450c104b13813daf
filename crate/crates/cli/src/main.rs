use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hplanar_core::io::write_curve_csv;
use hplanar_core::scenario::{self, geodesic_with_curve, run_all, StructureKind};
use hplanar_core::{Error, Report, ScenarioConfig, ScenarioId};

#[derive(Parser, Debug)]
#[command(name = "hplanar", version, about = "Seeded experiments on planar curves of affinor structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose a symmetric tensor over A⁽¹⁾ (random round-trip without --tensor)
    Decompose(Common),
    /// Integrate a geodesic (the closed-form Weyl case without --connection)
    Geodesic(Common),
    /// Planarity residual of a curve (a random planar curve without --curve)
    Planarity(Common),
    /// Run one scenario: thm25, thm26, lem32, thm34, thm31, decompose, geodesic, planarity
    Experiment {
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run every theorem scenario and aggregate
    All(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Quaternionic dimension; charts are R^{4n}
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Real dimension of the projective structure (defaults to 4n)
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    tol_alg: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_ode: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol_map: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    /// quaternionic | complex | projective
    #[arg(long, default_value = "quaternionic")]
    structure: String,
    /// Second structure for thm26
    #[arg(long)]
    structure_b: Option<String>,
    #[arg(long)]
    structure_file: Option<PathBuf>,
    #[arg(long)]
    tensor: Option<PathBuf>,
    #[arg(long)]
    connection: Option<PathBuf>,
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Comma-separated initial point
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Comma-separated initial velocity
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v0: Option<Vec<f64>>,
    /// Output path; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// json reports, or csv check rows (the integrated curve for `geodesic`)
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Common {
    fn config(&self, scenario: ScenarioId) -> Result<ScenarioConfig, Error> {
        let mut c = ScenarioConfig::new(scenario, self.seed);
        c.n = self.n;
        c.dim = self.dim;
        c.structure = self.structure.parse::<StructureKind>()?;
        c.structure_b = self.structure_b.as_deref().map(str::parse).transpose()?;
        c.tol_alg = self.tol_alg;
        c.tol_ode = self.tol_ode;
        c.tol_map = self.tol_map;
        c.step = self.step;
        c.samples = self.samples;
        c.t_max = self.t_max;
        c.x0 = self.x0.clone();
        c.v0 = self.v0.clone();
        c.tensor = self.tensor.clone();
        c.structure_file = self.structure_file.clone();
        c.connection = self.connection.clone();
        c.curve = self.curve.clone();
        c.out = self.out.clone();
        Ok(c)
    }

    fn sink(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn emit(common: &Common, reports: &[Report], pass: bool) -> Result<(), Error> {
    let mut sink = common.sink()?;
    match common.format {
        Format::Json if reports.len() == 1 => writeln!(sink, "{}", reports[0].to_json()?)?,
        Format::Json => {
            let summary = scenario::Summary { reports: reports.to_vec(), pass };
            writeln!(sink, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
        Format::Csv => Report::write_csv(reports, &mut sink)?,
    }
    sink.flush()?;
    for r in reports {
        eprintln!("{}: {}", r.scenario, if r.pass { "PASS" } else { "FAIL" });
    }
    Ok(())
}

fn execute(command: Command) -> Result<bool, Error> {
    let (scenario, common) = match command {
        Command::Decompose(c) => (ScenarioId::Decompose, c),
        Command::Planarity(c) => (ScenarioId::Planarity, c),
        Command::Geodesic(c) => (ScenarioId::Geodesic, c),
        Command::Experiment { id, common } => (id.parse()?, common),
        Command::All(c) => {
            let summary = run_all(&c.config(ScenarioId::Thm25)?)?;
            emit(&c, &summary.reports, summary.pass)?;
            return Ok(summary.pass);
        }
    };
    let config = common.config(scenario)?;
    if scenario == ScenarioId::Geodesic && matches!(common.format, Format::Csv) {
        config.validate()?;
        let (report, curve) = geodesic_with_curve(&config)?;
        let mut sink = common.sink()?;
        write_curve_csv(&curve, &mut sink)?;
        sink.flush()?;
        eprintln!("{}: {}", report.scenario, if report.pass { "PASS" } else { "FAIL" });
        return Ok(report.pass);
    }
    let report = scenario::run(&config)?;
    emit(&common, std::slice::from_ref(&report), report.pass)?;
    Ok(report.pass)
}

/// Usage and input problems exit with 2, failed numerical runs with 1.
fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}
