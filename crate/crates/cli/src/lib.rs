//! Command-line driver: tables, sweeps, convergence, export and self-checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod selftest;
pub mod stability;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ifred::experiments::{
    convergence_study, format_sci, sweep_config, table_config, write_convergence, write_records, CaseId, Experiment,
    Manufactured, Resolution, RunConfig,
};
use ifred::flux::broken_hdiv_norm;
use ifred::mesh::{write_mesh, MappedMeshParams};
use ifred::reduction::{make_basis, BasisKind, ReducedRunRecord};
use ifred::{Error, Result};

/// Largest accepted interface residual in any run.
pub const RESIDUAL_CONTRACT: f64 = 1e-13;

pub const CONVERGENCE_MESHES: [usize; 4] = [16, 32, 64, 128];

#[derive(Debug, Parser)]
#[command(name = "ifred", version, about = "Elliptic interface problems with reduced interface data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reference solve of one case, optionally with a reduced run at rank m.
    Solve(SolveArgs),
    /// Reproduce one of the reference tables as CSV.
    Table(TableArgs),
    /// Errors for every rank 1..=m-max as CSV.
    Sweep(SweepArgs),
    /// Manufactured-solution convergence study as CSV.
    Convergence(ConvergenceArgs),
    /// Write a mesh or a recovered flux in plain text.
    Export(ExportArgs),
    /// Run the invariant checks and print PASS/FAIL per property.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MeshArgs {
    /// Constant source term f on both sides.
    #[arg(long)]
    pub source: Option<f64>,
    /// Cells per side of the line mesh (even).
    #[arg(long)]
    pub n: Option<usize>,
    /// Interface vertices of the circle and star meshes (multiple of 4); radial layers are n_theta/8 on each side.
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Gauss points per interface edge.
    #[arg(long)]
    pub quad_order: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_parser = parse_case)]
    pub case: CaseId,
    #[arg(long, value_parser = parse_basis)]
    pub basis: Option<BasisKind>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Allow case/basis pairs outside the reference experiments.
    #[arg(long)]
    pub allow_extra: bool,
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub id: usize,
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_case)]
    pub case: CaseId,
    #[arg(long, value_parser = parse_basis)]
    pub basis: Option<BasisKind>,
    #[arg(long, default_value_t = 10)]
    pub m_max: usize,
    #[arg(long)]
    pub allow_extra: bool,
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta_minus: f64,
    #[arg(long, default_value_t = 5.0)]
    pub beta_plus: f64,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Mesh,
    Flux,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum)]
    pub kind: ExportKind,
    #[arg(long, value_parser = parse_case)]
    pub case: CaseId,
    /// Export the flux of the reduced solve at this rank instead of the reference.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_parser = parse_basis)]
    pub basis: Option<BasisKind>,
    #[arg(long)]
    pub allow_extra: bool,
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_case(s: &str) -> std::result::Result<CaseId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_basis(s: &str) -> std::result::Result<BasisKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn resolution(mesh: &MeshArgs) -> Resolution {
    let mut r = Resolution::default();
    if let Some(n) = mesh.n {
        r.n = n;
    }
    if let Some(nt) = mesh.n_theta {
        let layers = (nt / 8).max(1);
        r.mapped = MappedMeshParams { n_theta: nt, n_radial_in: layers, n_radial_out: layers, ..r.mapped };
    }
    r
}

fn configure(mut config: RunConfig, mesh: &MeshArgs) -> Result<RunConfig> {
    config.resolution = resolution(mesh);
    if let Some(q) = mesh.quad_order {
        config.quad_order = q;
    }
    if let Some(f) = mesh.source {
        config.source = f;
    }
    config.validate()?;
    Ok(config)
}

fn emit(out: &Option<PathBuf>, text: &[u8], stdout: &mut dyn Write) -> std::result::Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => Ok(stdout.write_all(text)?),
    }
}

fn check_residuals(records: &[ReducedRunRecord]) -> std::result::Result<(), CliError> {
    match records.iter().find(|r| !(r.residual <= RESIDUAL_CONTRACT)) {
        Some(r) => Err(CliError::Numerical(format!(
            "interface residual {} at m={} exceeds {}",
            format_sci(r.residual),
            r.m,
            format_sci(RESIDUAL_CONTRACT)
        ))),
        None => Ok(()),
    }
}

fn records_csv(config: &RunConfig) -> std::result::Result<(Vec<u8>, Vec<ReducedRunRecord>), CliError> {
    let records = Experiment::build(config)?.records()?;
    let mut buf = Vec::new();
    write_records(&mut buf, &config.mesh_comment(), &records)?;
    Ok((buf, records))
}

/// CSV text of table `id` at the default resolution.
pub fn table_csv(id: usize) -> std::result::Result<Vec<u8>, CliError> {
    Ok(records_csv(&table_config(id)?)?.0)
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> std::result::Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => {
            let base = RunConfig {
                basis: a.basis.unwrap_or(a.case.default_basis()),
                ms: vec![a.m.unwrap_or(1)],
                allow_extra: a.allow_extra,
                ..RunConfig::new(a.case)
            };
            let config = configure(base, &a.mesh)?;
            let exp = Experiment::build(&config)?;
            let study = exp.study()?;
            let reference_residual = study.reference_residual();
            let mut buf = Vec::new();
            writeln!(buf, "{}", config.mesh_comment())?;
            writeln!(buf, "vertices={}", exp.mesh.n_vertices())?;
            writeln!(buf, "triangles={}", exp.mesh.n_triangles())?;
            writeln!(buf, "interface_edges={}", exp.trace.edges.len())?;
            writeln!(buf, "broken_dofs={}", exp.mesh.n_broken_dofs())?;
            writeln!(buf, "flux_hdiv_norm={}", format_sci(broken_hdiv_norm(study.reference_flux(), &exp.mesh)))?;
            writeln!(buf, "reference_residual={}", format_sci(reference_residual))?;
            let mut records = Vec::new();
            if let Some(m) = a.m {
                let r = study.run(&make_basis(config.basis, m)?)?;
                write_records(&mut buf, "# reduced", &[r])?;
                records.push(r);
            }
            emit(&a.output.out, &buf, stdout)?;
            if !(reference_residual <= RESIDUAL_CONTRACT) {
                return Err(CliError::Numerical(format!(
                    "reference interface residual {} exceeds {}",
                    format_sci(reference_residual),
                    format_sci(RESIDUAL_CONTRACT)
                )));
            }
            check_residuals(&records)
        }
        Command::Table(a) => {
            let config = configure(table_config(a.id)?, &a.mesh)?;
            let (buf, records) = records_csv(&config)?;
            emit(&a.output.out, &buf, stdout)?;
            check_residuals(&records)
        }
        Command::Sweep(a) => {
            let mut config = sweep_config(a.case, a.basis.unwrap_or(a.case.default_basis()), a.m_max)?;
            config.allow_extra = a.allow_extra;
            let config = configure(config, &a.mesh)?;
            let (buf, records) = records_csv(&config)?;
            emit(&a.output.out, &buf, stdout)?;
            check_residuals(&records)
        }
        Command::Convergence(a) => {
            if !(a.beta_minus > 0.0 && a.beta_plus > 0.0) {
                return Err(CliError::Config("diffusion coefficients must be positive".into()));
            }
            let problem = Manufactured { beta_minus: a.beta_minus, beta_plus: a.beta_plus };
            let rows = convergence_study(problem, &CONVERGENCE_MESHES)?;
            let mut buf = Vec::new();
            write_convergence(&mut buf, &problem, &rows)?;
            emit(&a.output.out, &buf, stdout)
        }
        Command::Export(a) => {
            let base = RunConfig {
                basis: a.basis.unwrap_or(a.case.default_basis()),
                allow_extra: a.allow_extra,
                ..RunConfig::new(a.case)
            };
            let config = configure(base, &a.mesh)?;
            let exp = Experiment::build(&config)?;
            let mut buf = Vec::new();
            match a.kind {
                ExportKind::Mesh => write_mesh(&exp.mesh, &exp.trace, &mut buf)?,
                ExportKind::Flux => {
                    let study = exp.study()?;
                    match a.m {
                        Some(m) => study.solve_reduced(&make_basis(config.basis, m)?)?.flux.write(&mut buf)?,
                        None => study.reference_flux().write(&mut buf)?,
                    }
                }
            }
            emit(&Some(a.out), &buf, stdout)
        }
        Command::Selftest(a) => {
            let checks = selftest::run_all(a.seed);
            let mut buf = Vec::new();
            for c in &checks {
                writeln!(buf, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            emit(&None, &buf, stdout)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                Err(CliError::Numerical(format!("{failed} selftest check(s) failed")))
            } else {
                Ok(())
            }
        }
    }
}
