//! Parameter points `(mu, epsilon)` and the parameter-space loci.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Round-trip tolerance for inverse branches.
pub const TAU_ROUND: f64 = 1e-12;
/// Fixed-point residual tolerance.
pub const TAU_FIX: f64 = 1e-12;
/// Boundary classification tolerance (cone rays, critical lines).
pub const TAU_GEO: f64 = 1e-10;
/// Hyperbolicity band around the unit circle.
pub const TAU_EIG: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    /// `0 < epsilon < 1/2`
    Small,
    /// `epsilon < 0`
    Large,
    Other,
}

/// A validated pair `(mu, epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamPoint {
    mu: f64,
    epsilon: f64,
}

impl ParamPoint {
    /// Rejects non-finite values, `mu <= 0` and the degenerate couplings 0, 1/2, 1.
    pub fn new(mu: f64, epsilon: f64) -> Result<Self> {
        let invalid = |reason| Error::InvalidParams { mu, epsilon, reason };
        if !mu.is_finite() || !epsilon.is_finite() {
            return Err(invalid("parameters must be finite"));
        }
        if mu <= 0.0 {
            return Err(invalid("mu must be positive"));
        }
        if epsilon == 0.0 || epsilon == 1.0 {
            return Err(invalid("epsilon must differ from 0 and 1"));
        }
        if epsilon == 0.5 {
            return Err(invalid("epsilon must differ from 1/2"));
        }
        Ok(Self { mu, epsilon })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn strength_class(&self) -> Strength {
        strength_of(self.epsilon)
    }

    pub fn loci(&self) -> Loci {
        loci(self.epsilon)
    }

    /// `k = 1 - 1/(mu (1 - 2 epsilon))`, the shift entering the off-diagonal fixed points.
    pub fn k(&self) -> f64 {
        1.0 - 1.0 / (self.mu * (1.0 - 2.0 * self.epsilon))
    }

    /// Discriminant `2(mu-1) mu k - mu^2 k^2`; the pair `p, R(p)` exists iff it is `>= 0`.
    pub fn off_diagonal_discriminant(&self) -> f64 {
        let (mu, k) = (self.mu, self.k());
        2.0 * (mu - 1.0) * mu * k - mu * mu * k * k
    }

    /// Returns a copy with a different `mu`.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(mu, self.epsilon)
    }
}

impl<'de> Deserialize<'de> for ParamPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            mu: f64,
            epsilon: f64,
        }
        let raw = Raw::deserialize(d)?;
        ParamPoint::new(raw.mu, raw.epsilon).map_err(serde::de::Error::custom)
    }
}

pub fn strength_of(epsilon: f64) -> Strength {
    if epsilon > 0.0 && epsilon < 0.5 {
        Strength::Small
    } else if epsilon < 0.0 {
        Strength::Large
    } else {
        Strength::Other
    }
}

/// Values of the bifurcation curves at one coupling; curves off their domain are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Loci {
    pub mu0: Option<f64>,
    pub mu1: Option<f64>,
    #[serde(rename = "muPrime")]
    pub mu_prime: Option<f64>,
    #[serde(rename = "mu0Prime")]
    pub mu0_prime: Option<f64>,
    pub mu2: Option<f64>,
}

pub fn loci(epsilon: f64) -> Loci {
    let d = 1.0 - 2.0 * epsilon;
    match strength_of(epsilon) {
        Strength::Small => Loci {
            mu0: Some(1.0 / d),
            mu1: Some(4.0 * (1.0 - epsilon) / d),
            mu_prime: (epsilon <= 0.375).then(|| 1.0 + ((3.0 - 2.0 * epsilon) / d).sqrt()),
            ..Loci::default()
        },
        Strength::Large => Loci {
            mu1: Some(4.0 * (1.0 - epsilon) / d),
            mu0_prime: Some((1.0 - 4.0 * epsilon) / d),
            mu2: Some((3.0 - 4.0 * epsilon) / d),
            ..Loci::default()
        },
        Strength::Other => Loci::default(),
    }
}
