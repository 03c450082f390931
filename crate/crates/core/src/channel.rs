//! Close-in (CI) free-space reference distance path loss, log-normal shadow
//! fading and the squared urban-microcell LOS probability model.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CI model reference distance in meters.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// Coefficients of the CI path loss model for one link class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossParams {
    /// Path loss exponent.
    pub ple: f64,
    /// Standard deviation of the shadow fading term, in dB.
    pub shadow_sigma_db: f64,
    #[serde(default = "default_reference_distance")]
    pub reference_distance_m: f64,
}

fn default_reference_distance() -> f64 {
    REFERENCE_DISTANCE_M
}

impl PathLossParams {
    /// Directional LOS fit at 142 GHz.
    pub const LOS_142GHZ: Self = Self::new(2.1, 2.8);
    /// Directional NLOS-best fit at 142 GHz.
    pub const NLOS_BEST_142GHZ: Self = Self::new(3.1, 8.3);

    pub const fn new(ple: f64, shadow_sigma_db: f64) -> Self {
        Self {
            ple,
            shadow_sigma_db,
            reference_distance_m: REFERENCE_DISTANCE_M,
        }
    }

    /// Checks the invariants, reporting failures against `field`.
    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.ple > 0.0 && self.ple.is_finite()) {
            return Err(Error::config(format!("{field}.ple"), "must be > 0"));
        }
        if !(self.shadow_sigma_db >= 0.0 && self.shadow_sigma_db.is_finite()) {
            return Err(Error::config(
                format!("{field}.shadow_sigma_db"),
                "must be >= 0",
            ));
        }
        if self.reference_distance_m != REFERENCE_DISTANCE_M {
            return Err(Error::config(
                format!("{field}.reference_distance_m"),
                "the CI model is anchored at 1 m",
            ));
        }
        Ok(())
    }
}

/// Breakpoint distances of the squared LOS probability model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LosModelParams {
    pub d1_m: f64,
    pub d2_m: f64,
}

impl Default for LosModelParams {
    fn default() -> Self {
        Self {
            d1_m: 22.0,
            d2_m: 100.0,
        }
    }
}

impl LosModelParams {
    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.d1_m > 0.0 && self.d1_m.is_finite()) {
            return Err(Error::config(format!("{field}.d1_m"), "must be > 0"));
        }
        if !(self.d2_m > 0.0 && self.d2_m.is_finite()) {
            return Err(Error::config(format!("{field}.d2_m"), "must be > 0"));
        }
        Ok(())
    }
}

/// One realized BS-UE link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRealization {
    pub d2d_m: f64,
    pub d3d_m: f64,
    pub los: bool,
    pub shadow_db: f64,
    /// CI mean path loss plus any atmospheric term.
    pub mean_pl_db: f64,
    /// `mean_pl_db + shadow_db`.
    pub total_pl_db: f64,
}

/// Free-space path loss at 1 m: `32.4 + 20 log10(fc / 1 GHz)`.
pub fn fspl_1m(fc_ghz: f64) -> Result<f64> {
    if !(fc_ghz > 0.0 && fc_ghz.is_finite()) {
        return Err(Error::Domain {
            what: "carrier frequency (GHz)",
            value: fc_ghz,
        });
    }
    Ok(32.4 + 20.0 * fc_ghz.log10())
}

/// CI path loss without the shadow fading term.
///
/// Distances below the 1 m reference are rejected rather than clamped.
pub fn ci_mean_path_loss(fc_ghz: f64, d3d_m: f64, params: &PathLossParams) -> Result<f64> {
    if d3d_m.is_nan() || d3d_m < params.reference_distance_m {
        return Err(Error::Domain {
            what: "3D distance below CI reference (m)",
            value: d3d_m,
        });
    }
    Ok(fspl_1m(fc_ghz)? + 10.0 * params.ple * (d3d_m / params.reference_distance_m).log10())
}

/// Constant-rate gaseous absorption along the 3D path.
pub fn atmospheric_loss_db(db_per_km: f64, d3d_m: f64) -> f64 {
    db_per_km * d3d_m / 1000.0
}

/// Draws the zero-mean Gaussian shadow fading term in dB.
pub fn sample_shadow_fading<R: Rng + ?Sized>(params: &PathLossParams, rng: &mut R) -> f64 {
    if params.shadow_sigma_db == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, params.shadow_sigma_db)
        .expect("sigma validated finite and non-negative")
        .sample(rng)
}

/// Squared LOS probability,
/// `(min(d1/d, 1) (1 - exp(-d/d2)) + exp(-d/d2))^2`.
///
/// `d2d_m = 0` evaluates to 1 (the `min` term saturates at 1).
pub fn los_probability(d2d_m: f64, params: &LosModelParams) -> Result<f64> {
    if d2d_m.is_nan() || d2d_m < 0.0 {
        return Err(Error::Domain {
            what: "2D distance (m)",
            value: d2d_m,
        });
    }
    if d2d_m <= params.d1_m {
        return Ok(1.0);
    }
    let decay = (-d2d_m / params.d2_m).exp();
    let near = params.d1_m / d2d_m;
    let root = near * (1.0 - decay) + decay;
    Ok((root * root).clamp(0.0, 1.0))
}

/// Bernoulli LOS draw at the model probability.
pub fn sample_los_state<R: Rng + ?Sized>(
    d2d_m: f64,
    params: &LosModelParams,
    rng: &mut R,
) -> Result<bool> {
    let p = los_probability(d2d_m, params)?;
    // Always consume one draw so stream positions do not depend on distance.
    let u: f64 = rng.random();
    Ok(u < p)
}
