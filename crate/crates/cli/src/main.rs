use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};

use thermoacoustics::harness::{compare_study, convergence_study, grid_study, run_simulation, StabilityOutcome};
use thermoacoustics::io::{
    format_value, write_convergence, write_grid_deviations, write_run, write_study_compare, CaseFile,
};
use thermoacoustics::params::MaterialTable;
use thermoacoustics::{derive_dimensionless, DimensionlessParams, Error, ViscosityPolicy};

const EXIT_IO: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_UNSTABLE: u8 = 4;
const EXIT_NO_ROW: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "thac", version, about = "One-dimensional linear thermoacoustics in a closed pipe")]
struct Cli {
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Accepted for compatibility; the simulator uses no random numbers.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one case and write probes.csv, ledger.csv and snapshot_<t>.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a numerical study built on a case file.
    Study {
        kind: StudyKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dimensionless groups of one row of a property table (SI units).
    Params {
        /// CSV with columns T,p,rho,cp,as,betap,gamma,nu,ath and an optional material label.
        #[arg(long)]
        table: PathBuf,
        /// Temperature [K] of the row.
        #[arg(long = "temperature", short = 'T')]
        temperature: f64,
        /// Pressure [Pa] of the row.
        #[arg(long = "pressure", short = 'p')]
        pressure: f64,
        /// Pipe length [m].
        #[arg(long = "length", short = 'X', default_value_t = 1.0)]
        length: f64,
        /// Material label, for rows that share temperature and pressure.
        #[arg(long)]
        material: Option<String>,
        /// Critical temperature [K]; CO2 by default.
        #[arg(long, default_value_t = 304.128)]
        tc: f64,
        /// Critical density [kg/m3]; CO2 by default.
        #[arg(long, default_value_t = 467.6)]
        rhoc: f64,
        /// Volume-to-shear viscosity ratio.
        #[arg(long, default_value_t = 0.0)]
        r_eta: f64,
        /// Accept a row with zero viscosity.
        #[arg(long)]
        inviscid: bool,
        /// Also write the groups as a one-row CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StudyKind {
    Convergence,
    Grid,
    Compare,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            Error::Instability { .. } => EXIT_UNSTABLE,
            Error::Validation { .. } | Error::Shape { .. } | Error::Config(_) | Error::Table(_) => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load_case(path: &Path) -> Result<CaseFile, Failure> {
    CaseFile::load(path).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn cmd_run(config: &Path, out: &Path) -> Result<(), Failure> {
    let case = load_case(config)?;
    let sim_config = case.to_config()?;
    info!("running `{}` with {} cells", case.name, sim_config.cells);
    let run = run_simulation(&sim_config)?;
    for path in write_run(out, &run)? {
        info!("wrote {}", path.display());
    }
    println!(
        "{}: {} steps of dt = {}, injected heat {}, max mass drift {:e}, max heat residual {:e}, {:.2?}",
        case.name,
        run.ledger.last().map_or(0, |e| e.step),
        run.dt,
        run.total_injected_heat,
        run.max_mass_drift,
        run.max_heat_residual,
        run.wall_clock
    );
    match run.outcome {
        StabilityOutcome::Stable => Ok(()),
        StabilityOutcome::Unstable { step, field, stage } => Err(Failure::from(Error::Instability { step, field, stage })),
    }
}

fn cmd_study(kind: StudyKind, config: &Path, out: &Path) -> Result<(), Failure> {
    let case = load_case(config)?;
    let base = case.to_config()?;
    let study = case.study.clone().unwrap_or_else(|| thermoacoustics::io::StudySection {
        levels: vec![],
        reference_factor: None,
        t_compare: None,
        cell_counts: vec![],
    });
    match kind {
        StudyKind::Convergence => {
            let spec = study.convergence_spec()?;
            let report = convergence_study(&base, &spec)?;
            write_convergence(out, &report)?;
            for o in &report.orders {
                match o.order {
                    Some(order) => println!("order {:>3}: {order:.3}", o.field.name()),
                    None => println!("order {:>3}: degenerate", o.field.name()),
                }
            }
        }
        StudyKind::Grid => {
            if study.cell_counts.is_empty() {
                return Err(Error::Config("[study] needs `cell_counts` for a grid study".into()).into());
            }
            let deviations = grid_study(&base, &study.cell_counts)?;
            write_grid_deviations(out, &deviations)?;
            for d in &deviations {
                println!("{:>5} cells {:>4}: {:.4}", d.cells, d.field.name(), d.deviation);
            }
        }
        StudyKind::Compare => {
            let report = compare_study(&base)?;
            write_study_compare(out, &report)?;
            for (name, m) in [("splitting", report.splitting_metrics), ("rk4", report.rk4_metrics)] {
                println!(
                    "{name:>9}: max undershoot {:e}, oscillation energy {:e}",
                    m.max_undershoot, m.oscillation_energy
                );
            }
            for run in [&report.splitting, &report.rk4] {
                if let StabilityOutcome::Unstable { step, field, stage } = run.outcome {
                    return Err(Error::Instability { step, field, stage }.into());
                }
            }
        }
    }
    info!("wrote study tables to {}", out.display());
    Ok(())
}

const PARAM_NAMES: [&str; 11] = [
    "gamma", "b", "ec_a", "pr", "re_a", "pe_a", "r_eta", "t0_hat", "rho0_hat", "p0_hat", "gamma0",
];

fn param_values(p: &DimensionlessParams) -> [f64; 11] {
    [
        p.gamma, p.b, p.ec_a, p.pr, p.re_a, p.pe_a, p.r_eta, p.t0_hat, p.rho0_hat, p.p0_hat, p.gamma0,
    ]
}

/// `inf` for the inviscid sentinel, the fixed CSV format otherwise.
fn param_text(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        format_value(x)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_params(
    table: &Path,
    temperature: f64,
    pressure: f64,
    length: f64,
    material: Option<&str>,
    tc: f64,
    rhoc: f64,
    r_eta: f64,
    inviscid: bool,
    csv: Option<&Path>,
) -> Result<(), Failure> {
    let file = File::open(table).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", table.display()),
    })?;
    let table = MaterialTable::from_reader(file)?;
    let row = table.find(temperature, pressure, material).ok_or_else(|| Failure {
        code: EXIT_NO_ROW,
        message: format!("no row with T = {temperature} K and p = {pressure} Pa"),
    })?;
    let policy = if inviscid {
        ViscosityPolicy::AllowInviscid
    } else {
        ViscosityPolicy::RequireViscous
    };
    let params = derive_dimensionless(&row.to_state(r_eta, tc, rhoc), length, policy)?;
    let values = param_values(&params);
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    for (name, x) in PARAM_NAMES.iter().zip(values) {
        writeln!(w, "{name} = {}", param_text(x)).map_err(Error::from)?;
    }
    writeln!(w, "gamma_over_pr = {}", param_text(params.gamma / params.pr)).map_err(Error::from)?;
    if let Some(path) = csv {
        let mut out = BufWriter::new(File::create(path).map_err(Error::from)?);
        let row: Vec<String> = values.iter().map(|&x| param_text(x)).collect();
        write!(out, "{}\n{}\n", PARAM_NAMES.join(","), row.join(",")).map_err(Error::from)?;
        out.flush().map_err(Error::from)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if cli.seedless {
        warn!("--seedless has no effect: the simulator is deterministic");
    }
    let result = match &cli.command {
        Command::Run { config, out } => cmd_run(config, out),
        Command::Study { kind, config, out } => cmd_study(*kind, config, out),
        Command::Params {
            table,
            temperature,
            pressure,
            length,
            material,
            tc,
            rhoc,
            r_eta,
            inviscid,
            csv,
        } => cmd_params(
            table,
            *temperature,
            *pressure,
            *length,
            material.as_deref(),
            *tc,
            *rhoc,
            *r_eta,
            *inviscid,
            csv.as_deref(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
