//! Flag parsing, config merging and process exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use coupled_logistic::preimage::SeedCurve;
use coupled_logistic::raster::Target;

use crate::commands::execute;
use crate::config::*;
use crate::error::{LabError, LabResult};
use crate::numbers::{parse_f64, parse_point, parse_range, parse_resolution, parse_u64, parse_usize, parse_window};

pub const THREADS_ENV: &str = "COUPLED_MAP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "coupled-map", version, about = "Coupled logistic map laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration; explicit flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for default starting points
    #[arg(long, value_parser = parse_u64)]
    pub seed: Option<u64>,
    /// Worker threads (default: COUPLED_MAP_THREADS, then all cores)
    #[arg(long, value_parser = parse_usize)]
    pub threads: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<ImageFormat>,
    /// Print the effective configuration as TOML and exit
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
pub struct ParamFlags {
    #[arg(long, value_parser = parse_f64, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long = "eps", value_parser = parse_f64, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RasterFlags {
    /// x_min,x_max,y_min,y_max
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<[f64; 4]>,
    /// WxH, or N for N x N
    #[arg(long, value_parser = parse_resolution)]
    pub resolution: Option<[usize; 2]>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fixed points with eigenvalues and classification
    FixedPoints {
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Bifurcation loci at one coupling, or a parameter-plane diagram
    Loci {
        #[arg(long = "eps", value_parser = parse_f64, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        eps_range: Option<[f64; 2]>,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        mu_range: Option<[f64; 2]>,
        #[arg(long, value_parser = parse_resolution)]
        resolution: Option<[usize; 2]>,
        #[command(flatten)]
        common: Common,
    },
    /// Forward orbit of one point
    Orbit {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z0: Option<[f64; 2]>,
        #[arg(long, value_parser = parse_u64)]
        n_max: Option<u64>,
        /// Iterates left out of the image
        #[arg(long, value_parser = parse_u64)]
        transient: Option<u64>,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Backward tree of one point
    Preimages {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        root: Option<[f64; 2]>,
        #[arg(long, value_parser = parse_usize)]
        depth: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        budget: Option<usize>,
        /// Drop points outside x_min,x_max,y_min,y_max
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        clip: Option<[f64; 4]>,
        /// Also write every point as CSV
        #[arg(long)]
        points_csv: bool,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Forward iterates of a point followed by their backward trees
    Cloud {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z0: Option<[f64; 2]>,
        #[arg(long, value_parser = parse_usize)]
        n_forward: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        depth: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        budget: Option<usize>,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Iterated preimages of the circle C or the square boundary
    CurvePreimage {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_seed_curve)]
        curve: Option<SeedCurve>,
        #[arg(long, value_parser = parse_usize)]
        stages: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        resample: Option<usize>,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Invariant curve bounding the immediate basin of infinity
    Gamma {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_usize)]
        grid: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        max_iters: Option<usize>,
        #[arg(long, value_parser = parse_f64)]
        tol: Option<f64>,
        /// Escape depth of the background raster
        #[arg(long, value_parser = parse_u64)]
        n_max: Option<u64>,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Stage curves past the loss of the invariant graph, with exterior witnesses
    GammaSeq {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_usize)]
        stages: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        resample: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        witness_budget: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        witness_stage: Option<usize>,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Escape-time raster, or the basins of attractors reached from given seeds
    Basin {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_u64)]
        n_max: Option<u64>,
        #[arg(long, value_parser = parse_u32)]
        supersample: Option<u32>,
        /// x,y; repeat for several attractors
        #[arg(long = "attractor-seed", value_parser = parse_point, allow_hyphen_values = true)]
        attractor_seeds: Vec<[f64; 2]>,
        #[arg(long, value_parser = parse_u64)]
        attractor_total: Option<u64>,
        #[arg(long, value_parser = parse_u64)]
        attractor_transient: Option<u64>,
        /// Draw the invariant curve when it exists
        #[arg(long)]
        overlay_gamma: bool,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Attracting set reached from one seed, with period detection
    Attractor {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z0: Option<[f64; 2]>,
        #[arg(long, value_parser = parse_u64)]
        n_total: Option<u64>,
        #[arg(long, value_parser = parse_u64)]
        n_transient: Option<u64>,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Connected components of a shallow escape raster
    Components {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_u64)]
        n_max: Option<u64>,
        #[arg(long, value_parser = parse_target)]
        target: Option<Target>,
        #[command(flatten)]
        raster: RasterFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Continue a periodic orbit in mu and bracket its Hopf crossing
    Hopf {
        /// Start of the scan
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_parser = parse_f64, allow_hyphen_values = true)]
        mu_end: Option<f64>,
        #[arg(long, value_parser = parse_usize)]
        period: Option<usize>,
        #[arg(long, value_parser = parse_f64)]
        width: Option<f64>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z0: Option<[f64; 2]>,
        #[arg(long, value_parser = parse_usize)]
        transient: Option<usize>,
        #[arg(long, value_parser = parse_usize)]
        steps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Birth of the off-diagonal fixed points at the pitchfork locus
    Pitchfork {
        #[arg(long = "eps", value_parser = parse_f64, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        #[arg(long, value_parser = parse_usize)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Local HTTP service for the explorer
    Serve {
        /// Address to bind; anything other than 127.0.0.1 exposes the service to the network
        #[arg(long)]
        host: Option<String>,
        #[arg(long, value_parser = parse_port)]
        port: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_seed_curve(s: &str) -> Result<SeedCurve, String> {
    match s {
        "circle" | "circle_c" => Ok(SeedCurve::CircleC),
        "square" | "boundary_q" => Ok(SeedCurve::BoundaryQ),
        _ => Err(format!("'{s}': expected circle or square")),
    }
}

fn parse_target(s: &str) -> Result<Target, String> {
    match s {
        "escaped" => Ok(Target::Escaped),
        "bounded" => Ok(Target::Bounded),
        _ => Err(format!("'{s}': expected escaped or bounded")),
    }
}

fn parse_u32(s: &str) -> Result<u32, String> {
    u32::try_from(parse_u64(s)?).map_err(|_| format!("'{s}' is too large"))
}

fn parse_port(s: &str) -> Result<u32, String> {
    let v = parse_u32(s)?;
    if v > u16::MAX as u32 {
        return Err(format!("'{s}' is not a port"));
    }
    Ok(v)
}

/// Copies each given flag over a record field.
macro_rules! overlay {
    ($rec:expr; $($src:expr => $field:ident),* $(,)?) => {
        $( if let Some(v) = $src { $rec.$field = v.into(); } )*
    };
}

fn base_config(common: &Common, default: Job) -> LabResult<RunConfig> {
    let Some(path) = &common.config else {
        return Ok(RunConfig::new(default));
    };
    let cfg = RunConfig::load(path)?;
    if cfg.job.command() != default.command() {
        return Err(LabError::usage(
            "--config",
            format!("{} describes a '{}' run, not '{}'", path.display(), cfg.job.command(), default.command()),
        ));
    }
    Ok(cfg)
}

/// Merges the config file (if any) with explicit flags; flags win.
pub fn build_config(command: Command) -> LabResult<(RunConfig, bool)> {
    macro_rules! record {
        ($common:expr, $variant:ident, |$j:ident| $body:block) => {{
            let mut cfg = base_config(&$common, Job::$variant(Default::default()))?;
            if let Job::$variant($j) = &mut cfg.job $body
            (cfg, $common)
        }};
    }
    let (mut cfg, common) = match command {
        Command::FixedPoints { params, common } => record!(common, FixedPoints, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon);
        }),
        Command::Loci { epsilon, eps_range, mu_range, resolution, common } => record!(common, Loci, |j| {
            overlay!(j; epsilon => epsilon, eps_range => eps_range, mu_range => mu_range, resolution => resolution);
        }),
        Command::Orbit { params, z0, n_max, transient, raster, common } => record!(common, Orbit, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, z0 => z0, n_max => n_max, transient => transient,
                raster.window => window, raster.resolution => resolution);
        }),
        Command::Preimages { params, root, depth, budget, clip, points_csv, raster, common } => record!(common, Preimages, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, root => root, depth => depth, budget => budget,
                clip => clip, points_csv.then_some(true) => points_csv, raster.window => window, raster.resolution => resolution);
        }),
        Command::Cloud { params, z0, n_forward, depth, budget, raster, common } => record!(common, Cloud, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, z0 => z0, n_forward => n_forward, depth => depth,
                budget => budget, raster.window => window, raster.resolution => resolution);
        }),
        Command::CurvePreimage { params, curve, stages, resample, raster, common } => record!(common, CurvePreimage, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, curve => curve, stages => stages, resample => resample,
                raster.window => window, raster.resolution => resolution);
        }),
        Command::Gamma { params, grid, max_iters, tol, n_max, raster, common } => record!(common, Gamma, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, grid => grid, max_iters => max_iters, tol => tol,
                n_max => n_max, raster.window => window, raster.resolution => resolution);
        }),
        Command::GammaSeq { params, stages, resample, witness_budget, witness_stage, raster, common } => record!(common, GammaSeq, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, stages => stages, resample => resample,
                witness_budget => witness_budget, witness_stage => witness_stage,
                raster.window => window, raster.resolution => resolution);
        }),
        Command::Basin {
            params,
            n_max,
            supersample,
            attractor_seeds,
            attractor_total,
            attractor_transient,
            overlay_gamma,
            raster,
            common,
        } => record!(common, Basin, |j| {
            let seeds = (!attractor_seeds.is_empty()).then_some(attractor_seeds);
            overlay!(j; params.mu => mu, params.epsilon => epsilon, n_max => n_max, supersample => supersample,
                seeds => attractor_seeds, attractor_total => attractor_total, attractor_transient => attractor_transient,
                overlay_gamma.then_some(true) => overlay_gamma, raster.window => window, raster.resolution => resolution);
        }),
        Command::Attractor { params, z0, n_total, n_transient, raster, common } => record!(common, Attractor, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, z0 => z0, n_total => n_total, n_transient => n_transient,
                raster.window => window, raster.resolution => resolution);
        }),
        Command::Components { params, n_max, target, raster, common } => record!(common, Components, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, n_max => n_max, target => target,
                raster.window => window, raster.resolution => resolution);
        }),
        Command::Hopf { params, mu_end, period, width, z0, transient, steps, common } => record!(common, Hopf, |j| {
            overlay!(j; params.mu => mu, params.epsilon => epsilon, mu_end => mu_end, period => period, width => width,
                z0 => z0, transient => transient, steps => steps);
        }),
        Command::Pitchfork { epsilon, samples, common } => record!(common, Pitchfork, |j| {
            overlay!(j; epsilon => epsilon, samples => samples);
        }),
        Command::Serve { host, port, common } => record!(common, Serve, |j| {
            overlay!(j; host => host, port => port);
        }),
    };
    overlay!(cfg.run; common.seed => seed, common.threads.map(Some) => threads, common.out.map(Some) => out,
        common.format => format);
    cfg.validate()?;
    Ok((cfg, common.print_config))
}

/// Flag, then config file, then the environment; `None` leaves rayon's default.
pub fn thread_count(configured: Option<usize>) -> LabResult<Option<usize>> {
    let n = match configured {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(parse_usize(&v).map_err(|m| LabError::usage(THREADS_ENV, m))?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(LabError::usage("--threads", "must be positive"));
    }
    Ok(n)
}

fn configure_threads(configured: Option<usize>) -> LabResult<()> {
    if let Some(n) = thread_count(configured)? {
        // a second build in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> LabResult<()> {
    let (cfg, print_config) = build_config(cli.command)?;
    if print_config {
        write!(stdout, "{}", cfg.to_toml())?;
        return Ok(());
    }
    configure_threads(cfg.run.threads)?;
    if let Job::Serve(s) = &cfg.job {
        return crate::api::serve_blocking(&s.host, s.port as u16, stdout);
    }
    let report = execute(&cfg)?;
    for line in &report.summary {
        writeln!(stdout, "{line}")?;
    }
    writeln!(stdout, "manifest: {}", report.manifest_path.display())?;
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit code:
/// 0 success, 1 usage, 2 domain error, 3 non-convergence.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
