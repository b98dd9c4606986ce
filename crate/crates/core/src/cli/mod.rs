//! Command-line front end: scenario loading, flag overrides, artifact output.

pub mod commands;
pub mod format;
pub mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
pub use commands::Artifacts;
pub use scenario::Scenario;

/// Environment variable capping the worker threads (0 = automatic).
pub const THREADS_ENV: &str = "QHD_SHOCKKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qhd-shockkit", version, about = "Shock profiles and spectral stability for viscous-dispersive QHD")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// End states, Lax family and sonic classes.
    States(Common),
    /// Heteroclinic profile (CSV) with a JSON sidecar.
    Profile(Common),
    /// Essential-spectrum boundary curves and stability verdicts.
    Essential(EssentialArgs),
    /// Evans function along a contour and its winding number.
    Evans(EvansArgs),
    /// Energy bound and high-frequency exclusion radius.
    Bounds(Common),
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub p_minus: Option<f64>,
    #[arg(long)]
    pub p_plus: Option<f64>,
    /// Scenario file (TOML); flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct EssentialArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub xi_max: Option<f64>,
    #[arg(long)]
    pub xi_steps: Option<usize>,
    /// Analyse the state (rho, J) instead of the end states.
    #[arg(long, requires = "j")]
    pub rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "rho")]
    pub j: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct EvansArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub max_refine: Option<usize>,
    #[arg(long)]
    pub with_bounds: bool,
    #[arg(long)]
    pub constant_fixture: bool,
}

impl Common {
    /// Loads the scenario file (if any) and applies flag overrides.
    pub fn scenario(&self) -> Result<Scenario, Error> {
        let mut sc = match &self.config {
            Some(path) => Scenario::load(path)?,
            None => Scenario::default(),
        };
        let p = &mut sc.params;
        let set = |slot: &mut Option<f64>, v: Option<f64>| {
            if v.is_some() {
                *slot = v;
            }
        };
        set(&mut p.gamma, self.gamma);
        set(&mut p.mu, self.mu);
        set(&mut p.k, self.k);
        set(&mut p.s, self.s);
        // Flags of one kind replace file values of the other.
        if self.a.is_some() || self.b.is_some() {
            p.p_minus = None;
            p.p_plus = None;
        }
        if self.p_minus.is_some() || self.p_plus.is_some() {
            p.a = None;
            p.b = None;
        }
        set(&mut p.a, self.a);
        set(&mut p.b, self.b);
        set(&mut p.p_minus, self.p_minus);
        set(&mut p.p_plus, self.p_plus);
        if let Some(out) = &self.out {
            sc.output.dir = Some(out.clone());
        }
        Ok(sc)
    }
}

impl Command {
    pub fn scenario(&self) -> Result<Scenario, Error> {
        match self {
            Command::States(c) | Command::Profile(c) | Command::Bounds(c) => c.scenario(),
            Command::Essential(a) => {
                let mut sc = a.common.scenario()?;
                if let Some(x) = a.xi_max {
                    sc.essential.xi_max = Some(x);
                }
                if let Some(n) = a.xi_steps {
                    sc.essential.xi_steps = n;
                }
                if a.rho.is_some() {
                    sc.essential.rho = a.rho;
                    sc.essential.j = a.j;
                }
                Ok(sc)
            }
            Command::Evans(a) => {
                let mut sc = a.common.scenario()?;
                let e = &mut sc.evans;
                if let Some(r) = a.radius {
                    e.radius = r;
                }
                if let Some(m) = a.margin {
                    e.margin = m;
                }
                if let Some(d) = a.max_refine {
                    e.max_refine = d;
                }
                e.with_bounds |= a.with_bounds;
                e.constant_fixture |= a.constant_fixture;
                Ok(sc)
            }
        }
    }

    pub fn execute(&self, sc: &Scenario) -> Result<Artifacts, Error> {
        match self {
            Command::States(_) => commands::states(sc),
            Command::Profile(_) => commands::profile(sc),
            Command::Essential(_) => commands::essential(sc),
            Command::Evans(_) => commands::evans(sc),
            Command::Bounds(_) => commands::bounds(sc),
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidParams(_)
        | Error::Domain { .. }
        | Error::Degenerate(_)
        | Error::InfeasibleEps { .. }
        | Error::UnsupportedRegime(_) => 1,
        Error::NoShockWindow { .. } => 2,
        Error::NoConvergence { .. } | Error::VacuumHit { .. } => 3,
        Error::ResolutionFailure { .. } => 4,
        _ => 5,
    }
}

/// Configures the global thread pool from [`THREADS_ENV`].
pub fn configure_threads() -> Result<(), Error> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

/// Runs one invocation; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = configure_threads()
        .and_then(|_| cli.command.scenario())
        .and_then(|sc| {
            let art = cli.command.execute(&sc)?;
            let dir = sc.out_dir();
            for (name, body) in &art.files {
                format::write_file(&dir, name, body)?;
            }
            Ok(art)
        });
    match result {
        Ok(art) => {
            print!("{}", art.summary);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
