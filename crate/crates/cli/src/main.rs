//! `avalanche`: command-line driver for the avalanche-detector model.
//!
//! Exit codes: 0 success, 1 bad arguments, 2 I/O failure, 3 numerical failure.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use avalanche_core::analysis::{
    coherent_variational, ground_state_profile, overlap, projected_coherent_profile, quasiparticle_profile,
    CoherentReport, GroundReport,
};
use avalanche_core::dynamics::{first_integral, simulate_until, DynParams};
use avalanche_core::eigen::{eigenpairs_tridiag, Selection};
use avalanche_core::model::{
    build_reduced_hamiltonian, lower_branch_len, shifted_levels, two_species_report, FullModelParams, ModelParams,
    TwoSpeciesReport,
};
use avalanche_core::wkb::{compare_wkb_exact, reflect_upper_branch};
use avalanche_core::Error;

use output::{float, json, Csv};

const UNITS: &str = "hbar = 1; energies in units of the Omega/Lambda inputs; time in units of 1/Lambda";
/// Largest particle number accepted by `oracle` (dense diagonalization).
const ORACLE_N_LIMIT: usize = 24;

#[derive(Parser, Debug)]
#[command(name = "avalanche", version, about = "Spectra, semiclassics and dynamics of the avalanche-detector model")]
struct Cli {
    /// Worker threads for library-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log diagnostics (fit-window widening, integrator drift) to stderr.
    #[arg(long, global = true)]
    verbose: bool,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full ladder spectrum as CSV, both branches plus the decoupled s = 0 line.
    Spectrum(LadderArgs),
    /// Semiclassical levels against exact ones as CSV.
    Wkb(WkbArgs),
    /// Ground-state, coherent-state and overlap report as JSON.
    Ground(LadderArgs),
    /// Classical avalanche trajectory as CSV.
    Avalanche(AvalancheArgs),
    /// Two-species dense cross-check as JSON.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct LadderArgs {
    /// Particle number N.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
}

impl LadderArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.n, self.omega, self.lambda)
    }
}

#[derive(Args, Debug)]
struct WkbArgs {
    #[command(flatten)]
    ladder: LadderArgs,
    /// Number of deepest levels to compare.
    #[arg(long, default_value_t = 40, allow_negative_numbers = true)]
    depth: i64,
}

#[derive(Args, Debug)]
struct AvalancheArgs {
    /// Initial B fraction (default 1/N).
    #[arg(long, allow_negative_numbers = true)]
    y0: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    v0: f64,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    dt: f64,
    #[arg(long, default_value_t = 1500.0, allow_negative_numbers = true)]
    tmax: f64,
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    /// End the run after the first step with y at or above this value.
    /// The finite-N orbit overshoots y = 1 slightly, so runs meant to pass
    /// the saturation point need a threshold below 1.
    #[arg(long, default_value_t = 0.99, allow_negative_numbers = true)]
    stop_at: f64,
    /// Emit every k-th step (the final step is always emitted).
    #[arg(long, default_value_t = 1000)]
    every: usize,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    /// Inter-species repulsion; repeat to scan several values.
    #[arg(long, default_values_t = [100.0], allow_negative_numbers = true)]
    xi: Vec<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda_xi: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda_eta: f64,
}

enum Failure {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Numerical(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn };
    env_logger::Builder::new().filter_level(level).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let text = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a)?,
        Command::Wkb(a) => cmd_wkb(a)?,
        Command::Ground(a) => cmd_ground(a)?,
        Command::Avalanche(a) => cmd_avalanche(a)?,
        Command::Oracle(a) => cmd_oracle(a)?,
    };
    emit(cli.out.as_ref(), &text)
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

struct SpectrumRow {
    k_top: usize,
    k_bottom: usize,
    branch: &'static str,
    rank: u8,
    energy: f64,
}

fn cmd_spectrum(a: &LadderArgs) -> Result<String, Failure> {
    let p = a.params()?;
    let n = p.n_total();
    let center = p.band_center();
    let half = lower_branch_len(n);

    let lower: Vec<f64> =
        shifted_levels(&p, Selection::Indices { lo: 0, hi: half })?.into_iter().map(|e| center + e).collect();
    let upper = reflect_upper_branch(&lower, &p);

    // k_bottom counts from the branch extreme, k_top from the band centre.
    let mut rows = Vec::with_capacity(n + 1);
    for (j, &e) in lower.iter().enumerate() {
        rows.push(SpectrumRow { k_top: half - j, k_bottom: j, branch: "lower", rank: 0, energy: e });
    }
    if n % 2 == 1 {
        // The spectrum is symmetric under E - NΩ ↦ NΩ - E, so for odd N the
        // unpaired level sits exactly at the band centre.
        rows.push(SpectrumRow { k_top: 0, k_bottom: half, branch: "center", rank: 1, energy: center });
    }
    for (j, &e) in upper.iter().enumerate() {
        rows.push(SpectrumRow { k_top: j + 1, k_bottom: half - 1 - j, branch: "upper", rank: 3, energy: e });
    }
    rows.push(SpectrumRow { k_top: 0, k_bottom: 0, branch: "trivial", rank: 2, energy: center });
    rows.sort_by(|x, y| x.energy.total_cmp(&y.energy).then(x.rank.cmp(&y.rank)));

    let nf = n as f64;
    let mut csv = Csv::new(&["k_top", "k_bottom", "branch", "E", "E_per_particle", "epsilon"]);
    for r in rows {
        csv.row(&[
            r.k_top.to_string(),
            r.k_bottom.to_string(),
            r.branch.to_string(),
            float(r.energy),
            float(r.energy / nf),
            float(p.epsilon_of(r.energy)),
        ]);
    }
    Ok(csv.finish())
}

fn cmd_wkb(a: &WkbArgs) -> Result<String, Failure> {
    let depth = usize::try_from(a.depth)
        .map_err(|_| Failure::Usage(format!("--depth must be non-negative, got {}", a.depth)))?;
    let p = a.ladder.params()?;
    let cmp = compare_wkb_exact(&p, depth)?;
    let mut csv = Csv::new(&["k_bottom", "k_top", "epsilon_wkb", "epsilon_exact", "rel_dev"]);
    for r in &cmp.rows {
        csv.row(&[
            r.k_bottom.to_string(),
            r.k_top.to_string(),
            float(r.epsilon_wkb),
            float(r.epsilon_exact),
            float(r.rel_dev),
        ]);
    }
    Ok(csv.finish())
}

#[derive(Serialize)]
struct ParamsOut {
    n: usize,
    omega: f64,
    lambda: f64,
}

#[derive(Serialize)]
struct OverlapsOut {
    /// Projected coherent state against the exact ground state.
    projected_coherent_ground: f64,
    /// One-quasiparticle state against the exact first excited state of N + 1.
    quasiparticle_first_excited: f64,
}

#[derive(Serialize)]
struct GroundOut {
    units: &'static str,
    params: ParamsOut,
    epsilon_ground: f64,
    ground: GroundReport,
    coherent: CoherentReport,
    overlaps: OverlapsOut,
}

fn cmd_ground(a: &LadderArgs) -> Result<String, Failure> {
    let p = a.params()?;
    let n = p.n_total();
    let (ground, report) = ground_state_profile(&p)?;
    let coherent = coherent_variational(&p, 0.0)?;

    let projected = projected_coherent_profile(&p)?;
    let next = build_reduced_hamiltonian(&ModelParams::unit(n + 1)?);
    let (_, excited) = eigenpairs_tridiag(&next, Selection::Indices { lo: 1, hi: 2 })?;
    let overlaps = OverlapsOut {
        projected_coherent_ground: overlap(&projected, &ground)?,
        quasiparticle_first_excited: overlap(&quasiparticle_profile(&p)?, &excited[0])?,
    };

    Ok(json(&GroundOut {
        units: UNITS,
        params: ParamsOut { n, omega: p.omega(), lambda: p.lambda() },
        epsilon_ground: -report.e_g_per_particle / p.lambda(),
        ground: report,
        coherent,
        overlaps,
    }))
}

fn cmd_avalanche(a: &AvalancheArgs) -> Result<String, Failure> {
    if a.every == 0 {
        return Err(Failure::Usage("--every must be positive".into()));
    }
    let d = DynParams::new(a.n, a.lambda, a.dt, a.tmax)?;
    let y0 = a.y0.unwrap_or(1.0 / d.n_total);
    if a.stop_at.is_nan() || a.stop_at <= 0.0 {
        return Err(Failure::Usage(format!("--stop-at must be positive, got {}", a.stop_at)));
    }
    let traj = simulate_until(y0, a.v0, &d, a.stop_at)?;
    log::info!("max first-integral drift {:e} (relative {:e})", traj.max_abs_drift, traj.max_rel_drift);

    let last = traj.samples.len() - 1;
    let mut csv = Csv::new(&["t", "y", "ydot", "first_integral"]);
    for (i, s) in traj.samples.iter().enumerate() {
        if i % a.every == 0 || i == last {
            csv.row(&[float(s.t), float(s.y), float(s.ydot), float(first_integral(s.y, s.ydot, &d))]);
        }
    }
    Ok(csv.finish())
}

#[derive(Serialize)]
struct OracleOut {
    units: &'static str,
    reports: Vec<TwoSpeciesReport>,
}

fn cmd_oracle(a: &OracleArgs) -> Result<String, Failure> {
    if a.n > ORACLE_N_LIMIT {
        return Err(Failure::Usage(format!("oracle is limited to N ≤ {ORACLE_N_LIMIT}, got {}", a.n)));
    }
    let reports =
        a.xi.iter()
            .map(|&xi| {
                let fp = FullModelParams::new(a.n, a.omega, a.lambda_xi, a.lambda_eta, xi)?;
                two_species_report(&fp)
            })
            .collect::<Result<Vec<_>, Error>>()?;
    Ok(json(&OracleOut { units: UNITS, reports }))
}
