//! Scenario configuration and the built-in presets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{LosModelParams, PathLossParams};
use crate::deployment::{
    LayoutKind, BS_HEIGHT_M, DEFAULT_MIN_DROP_DISTANCE_M, DEFAULT_RING_RADIUS_M, UE_HEIGHT_M,
};
use crate::error::{Error, Result};
use crate::link_budget::RadioEndpoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "DL")]
    Dl,
    #[serde(rename = "UL")]
    Ul,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Dl, Direction::Ul];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Dl => "DL",
            Direction::Ul => "UL",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "DL" => Ok(Direction::Dl),
            "UL" => Ok(Direction::Ul),
            other => Err(Error::config(
                "direction",
                format!("unknown value `{other}`"),
            )),
        }
    }
}

/// How a UE picks its serving BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssociationPolicy {
    /// Strongest downlink received power, ties to the lowest BS index.
    MaxPower,
    /// Smallest 2D distance.
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "table1-single")]
    Table1Single,
    #[serde(rename = "table1-seven")]
    Table1Seven,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1Single => "table1-single",
            Preset::Table1Seven => "table1-seven",
        }
    }

    pub fn config(self) -> ScenarioConfig {
        match self {
            Preset::Table1Single => ScenarioConfig::table1_single(),
            Preset::Table1Seven => ScenarioConfig::table1_seven(),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1-single" => Ok(Preset::Table1Single),
            "table1-seven" => Ok(Preset::Table1Seven),
            other => Err(Error::config("preset", format!("unknown preset `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Scenario name written into every output row.
    pub label: String,
    pub layout: LayoutKind,
    pub ring_radius_m: f64,
    /// Radius of the UE drop disk.
    pub coverage_radius_m: f64,
    pub ue_count: usize,
    pub min_drop_distance_m: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    pub dl_carrier_ghz: f64,
    pub ul_carrier_ghz: f64,
    pub dl_bandwidth_hz: f64,
    pub ul_bandwidth_hz: f64,
    pub bs: RadioEndpoint,
    pub ue: RadioEndpoint,
    pub los_path_loss: PathLossParams,
    pub nlos_path_loss: PathLossParams,
    pub los_model: LosModelParams,
    pub association: AssociationPolicy,
    /// Subtracted from every interfering link's received power.
    pub interferer_gain_discount_db: f64,
    pub ul_interference_enabled: bool,
    pub atmospheric_db_per_km: f64,
    pub se_cap_bps_hz: Option<f64>,
    pub seed: u64,
    pub num_drops: u32,
}

impl ScenarioConfig {
    pub fn table1_single() -> Self {
        Self {
            label: Preset::Table1Single.name().to_owned(),
            layout: LayoutKind::Single,
            ring_radius_m: DEFAULT_RING_RADIUS_M,
            coverage_radius_m: 200.0,
            ue_count: 250,
            min_drop_distance_m: DEFAULT_MIN_DROP_DISTANCE_M,
            bs_height_m: BS_HEIGHT_M,
            ue_height_m: UE_HEIGHT_M,
            dl_carrier_ghz: 142.0,
            ul_carrier_ghz: 140.0,
            dl_bandwidth_hz: 1e9,
            ul_bandwidth_hz: 1e8,
            bs: RadioEndpoint::TABLE1_BS,
            ue: RadioEndpoint::TABLE1_UE,
            los_path_loss: PathLossParams::LOS_142GHZ,
            nlos_path_loss: PathLossParams::NLOS_BEST_142GHZ,
            los_model: LosModelParams::default(),
            association: AssociationPolicy::MaxPower,
            interferer_gain_discount_db: 0.0,
            ul_interference_enabled: false,
            atmospheric_db_per_km: 0.0,
            se_cap_bps_hz: None,
            seed: 1,
            num_drops: 1,
        }
    }

    pub fn table1_seven() -> Self {
        Self {
            label: Preset::Table1Seven.name().to_owned(),
            layout: LayoutKind::Seven,
            coverage_radius_m: 400.0,
            ue_count: 1000,
            ..Self::table1_single()
        }
    }

    pub fn carrier_ghz(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Dl => self.dl_carrier_ghz,
            Direction::Ul => self.ul_carrier_ghz,
        }
    }

    pub fn bandwidth_hz(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Dl => self.dl_bandwidth_hz,
            Direction::Ul => self.ul_bandwidth_hz,
        }
    }

    pub fn path_loss_params(&self, los: bool) -> &PathLossParams {
        if los {
            &self.los_path_loss
        } else {
            &self.nlos_path_loss
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be > 0, got {v}")))
            }
        }
        fn non_negative(field: &str, v: f64) -> Result<()> {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be >= 0, got {v}")))
            }
        }

        if self.label.is_empty() || self.label.contains([',', '"', '\n', '\r']) {
            return Err(Error::config(
                "label",
                "must be non-empty without commas, quotes or newlines",
            ));
        }
        if self.layout == LayoutKind::Seven {
            positive("ring_radius_m", self.ring_radius_m)?;
        }
        positive("coverage_radius_m", self.coverage_radius_m)?;
        if self.ue_count == 0 {
            return Err(Error::config("ue_count", "must be > 0"));
        }
        if self.num_drops == 0 {
            return Err(Error::config("num_drops", "must be > 0"));
        }
        non_negative("min_drop_distance_m", self.min_drop_distance_m)?;
        non_negative("bs_height_m", self.bs_height_m)?;
        non_negative("ue_height_m", self.ue_height_m)?;
        if (self.bs_height_m - self.ue_height_m).abs() < 1.0 && self.min_drop_distance_m < 1.0 {
            return Err(Error::config(
                "min_drop_distance_m",
                "links could fall below the 1 m CI reference distance",
            ));
        }
        positive("dl_carrier_ghz", self.dl_carrier_ghz)?;
        positive("ul_carrier_ghz", self.ul_carrier_ghz)?;
        positive("dl_bandwidth_hz", self.dl_bandwidth_hz)?;
        positive("ul_bandwidth_hz", self.ul_bandwidth_hz)?;
        self.bs.validate("bs")?;
        self.ue.validate("ue")?;
        self.los_path_loss.validate("los_path_loss")?;
        self.nlos_path_loss.validate("nlos_path_loss")?;
        self.los_model.validate("los_model")?;
        if !self.interferer_gain_discount_db.is_finite() {
            return Err(Error::config(
                "interferer_gain_discount_db",
                "must be finite",
            ));
        }
        non_negative("atmospheric_db_per_km", self.atmospheric_db_per_km)?;
        if let Some(cap) = self.se_cap_bps_hz {
            positive("se_cap_bps_hz", cap)?;
        }
        Ok(())
    }
}
