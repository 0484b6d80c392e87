//! Run configurations: one TOML record per subcommand plus shared run settings.
//!
//! ```toml
//! [run]
//! seed = 0
//! out = "out/fig"
//!
//! [job]
//! command = "basin"
//! mu = 1.6
//! epsilon = 0.2
//! ```

use std::path::{Path, PathBuf};

use coupled_logistic::preimage::SeedCurve;
use coupled_logistic::raster::{Target, COMPONENT_DEPTH, DEFAULT_N_MAX};
use coupled_logistic::{ParamPoint, Rect};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

pub const DEFAULT_WINDOW: [f64; 4] = [-0.25, 1.25, -0.25, 1.25];
pub const DEFAULT_RESOLUTION: [usize; 2] = [512, 512];
pub const DEFAULT_OUT: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ImageFormat {
    #[default]
    Png,
    Ppm,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Ppm => "ppm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: ImageFormat,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self { seed: 0, threads: None, out: None, format: ImageFormat::Png }
    }
}

impl RunSettings {
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub run: RunSettings,
    pub job: Job,
}

macro_rules! records {
    ($(
        $(#[$meta:meta])*
        $name:ident { $($(#[$fmeta:meta])* $field:ident : $ty:ty = $default:expr),* $(,)? }
    )*) => {$(
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $($(#[$fmeta])* pub $field: $ty,)*
        }

        impl Default for $name {
            fn default() -> Self {
                Self { $($field: $default),* }
            }
        }
    )*};
}

records! {
    FixedPointsJob { mu: Option<f64> = None, epsilon: Option<f64> = None }

    /// Loci values at one coupling and/or a parameter-plane diagram.
    LociJob {
        epsilon: Option<f64> = None,
        eps_range: Option<[f64; 2]> = None,
        mu_range: Option<[f64; 2]> = None,
        resolution: [usize; 2] = [500, 500],
    }

    OrbitJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        z0: Option<[f64; 2]> = None,
        n_max: u64 = 100_000,
        transient: u64 = 1000,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    PreimagesJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        root: [f64; 2] = [0.0, 0.0],
        depth: usize = 12,
        budget: usize = 1_000_000,
        clip: Option<[f64; 4]> = None,
        points_csv: bool = false,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    CloudJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        z0: Option<[f64; 2]> = None,
        n_forward: usize = 20,
        depth: usize = 6,
        budget: usize = 1_000_000,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    CurvePreimageJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        curve: SeedCurve = SeedCurve::CircleC,
        stages: usize = 6,
        resample: usize = 1500,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    GammaJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        grid: usize = coupled_logistic::curve::DEFAULT_GRID,
        max_iters: usize = coupled_logistic::curve::DEFAULT_MAX_ITERS,
        tol: f64 = coupled_logistic::curve::DEFAULT_TOL,
        n_max: u64 = 200,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    GammaSeqJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        stages: usize = 6,
        resample: usize = 1500,
        witness_budget: usize = 0,
        /// Stage whose curve the witness search runs against; defaults to the last one.
        witness_stage: Option<usize> = None,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    BasinJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        n_max: u64 = DEFAULT_N_MAX,
        supersample: u32 = 1,
        /// One basin image per seed; without seeds the escape raster is written.
        attractor_seeds: Vec<[f64; 2]> = Vec::new(),
        attractor_total: u64 = 1_000_000,
        attractor_transient: u64 = 10_000,
        overlay_gamma: bool = false,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    AttractorJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        z0: Option<[f64; 2]> = None,
        n_total: u64 = coupled_logistic::orbit::DEFAULT_TOTAL,
        n_transient: u64 = coupled_logistic::orbit::DEFAULT_TRANSIENT,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    ComponentsJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        n_max: u64 = COMPONENT_DEPTH,
        target: Target = Target::Escaped,
        window: [f64; 4] = DEFAULT_WINDOW,
        resolution: [usize; 2] = DEFAULT_RESOLUTION,
    }

    /// `mu` is where the scan starts, `mu_end` where it stops.
    HopfJob {
        mu: Option<f64> = None,
        epsilon: Option<f64> = None,
        mu_end: Option<f64> = None,
        period: usize = 2,
        width: f64 = 1e-5,
        z0: [f64; 2] = [0.3, 0.6],
        transient: usize = 20_000,
        steps: usize = 50,
    }

    PitchforkJob { epsilon: Option<f64> = None, samples: usize = 12 }

    ServeJob { host: String = "127.0.0.1".into(), port: u32 = 8080 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    FixedPoints(FixedPointsJob),
    Loci(LociJob),
    Orbit(OrbitJob),
    Preimages(PreimagesJob),
    Cloud(CloudJob),
    CurvePreimage(CurvePreimageJob),
    Gamma(GammaJob),
    GammaSeq(GammaSeqJob),
    Basin(BasinJob),
    Attractor(AttractorJob),
    Components(ComponentsJob),
    Hopf(HopfJob),
    Pitchfork(PitchforkJob),
    Serve(ServeJob),
}

impl Job {
    pub fn command(&self) -> &'static str {
        match self {
            Job::FixedPoints(_) => "fixed-points",
            Job::Loci(_) => "loci",
            Job::Orbit(_) => "orbit",
            Job::Preimages(_) => "preimages",
            Job::Cloud(_) => "cloud",
            Job::CurvePreimage(_) => "curve-preimage",
            Job::Gamma(_) => "gamma",
            Job::GammaSeq(_) => "gamma-seq",
            Job::Basin(_) => "basin",
            Job::Attractor(_) => "attractor",
            Job::Components(_) => "components",
            Job::Hopf(_) => "hopf",
            Job::Pitchfork(_) => "pitchfork",
            Job::Serve(_) => "serve",
        }
    }

    /// The `(mu, epsilon)` pair when the record carries both.
    pub fn params(&self) -> (Option<f64>, Option<f64>) {
        match self {
            Job::FixedPoints(j) => (j.mu, j.epsilon),
            Job::Orbit(j) => (j.mu, j.epsilon),
            Job::Preimages(j) => (j.mu, j.epsilon),
            Job::Cloud(j) => (j.mu, j.epsilon),
            Job::CurvePreimage(j) => (j.mu, j.epsilon),
            Job::Gamma(j) => (j.mu, j.epsilon),
            Job::GammaSeq(j) => (j.mu, j.epsilon),
            Job::Basin(j) => (j.mu, j.epsilon),
            Job::Attractor(j) => (j.mu, j.epsilon),
            Job::Components(j) => (j.mu, j.epsilon),
            Job::Hopf(j) => (j.mu, j.epsilon),
            Job::Loci(j) => (None, j.epsilon),
            Job::Pitchfork(j) => (None, j.epsilon),
            Job::Serve(_) => (None, None),
        }
    }
}

/// Builds the parameter point, reporting the flag responsible for a rejection.
pub fn param_point(mu: Option<f64>, epsilon: Option<f64>) -> LabResult<ParamPoint> {
    let mu = mu.ok_or_else(|| LabError::usage("--mu", "required (flag or config)"))?;
    let epsilon = epsilon.ok_or_else(|| LabError::usage("--eps", "required (flag or config)"))?;
    ParamPoint::new(mu, epsilon).map_err(|e| match e {
        coupled_logistic::Error::InvalidParams { reason, .. } => {
            let flag = if reason.starts_with("mu") { "--mu" } else { "--eps" };
            LabError::usage(flag, reason)
        }
        other => other.into(),
    })
}

pub fn epsilon_of(epsilon: Option<f64>) -> LabResult<f64> {
    let e = epsilon.ok_or_else(|| LabError::usage("--eps", "required (flag or config)"))?;
    // any positive mu validates the coupling alone
    param_point(Some(1.0), Some(e))?;
    Ok(e)
}

pub fn window_rect(w: [f64; 4], flag: &str) -> LabResult<Rect> {
    Rect::new(w[0], w[1], w[2], w[3]).map_err(|e| LabError::usage(flag, e.to_string()))
}

impl RunConfig {
    pub fn new(job: Job) -> Self {
        Self { run: RunSettings::default(), job }
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text).map_err(|message| LabError::Config { path: path.display().to_string(), message })
    }

    /// Rejects parameter pairs that fail the `ParamPoint` rule when both are present.
    pub fn validate(&self) -> LabResult<()> {
        match self.job.params() {
            (Some(mu), Some(e)) => param_point(Some(mu), Some(e)).map(|_| ()),
            (None, Some(e)) => epsilon_of(Some(e)).map(|_| ()),
            _ => Ok(()),
        }
    }
}
