//! Config loading and the on-disk result formats.
//!
//! A run directory holds:
//!
//! * `config.json`: the fully resolved [`ScenarioConfig`];
//! * `ue_results.csv`: one row per UE and direction;
//! * `summary.json`: an [`SeSummary`] per direction plus the config echo;
//! * `map_snr.csv` / `map_sinr.csv` from the map command.
//!
//! Floats are written in shortest round-trip form, so re-reading a run
//! reproduces its values bit for bit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{Direction, Preset, ScenarioConfig};
use crate::deployment::Position;
use crate::error::{Error, Result};
use crate::simulation::{coverage_map, run_scenario, CoverageMap, MapMode, ScenarioRun, UeOutcome};
use crate::stats::{summarize, SeSummary};

pub const CONFIG_FILE: &str = "config.json";
pub const UE_RESULTS_FILE: &str = "ue_results.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn map_file_name(mode: MapMode) -> String {
    format!("map_{}.csv", mode.as_str())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_owned(),
        source,
    }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> Error + '_ {
    move |source| Error::Json {
        path: path.to_owned(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_owned(),
        source,
    }
}

/// Parses a config document. Fields absent from the document come from its
/// `preset` (default `table1-single`); nested objects merge key by key.
pub fn parse_config(text: &str) -> std::result::Result<ScenarioConfig, ConfigParseError> {
    let doc: Value = serde_json::from_str(text).map_err(ConfigParseError::Json)?;
    let Value::Object(mut overrides) = doc else {
        return Err(ConfigParseError::Invalid(Error::config(
            "<root>",
            "expected a JSON object",
        )));
    };
    let preset = match overrides.remove("preset") {
        None => Preset::Table1Single,
        Some(Value::String(name)) => name.parse().map_err(ConfigParseError::Invalid)?,
        Some(_) => {
            return Err(ConfigParseError::Invalid(Error::config(
                "preset",
                "expected a string",
            )))
        }
    };
    let mut merged = serde_json::to_value(preset.config()).expect("config serializes");
    for (key, value) in overrides {
        let Value::Object(base) = &mut merged else {
            unreachable!()
        };
        match (base.get_mut(&key), value) {
            (Some(Value::Object(inner)), Value::Object(patch)) => merge_shallow(inner, patch),
            (Some(slot), value) => *slot = value,
            (None, _) => {
                return Err(ConfigParseError::Invalid(Error::config(
                    key,
                    "unknown field",
                )));
            }
        }
        // Deserialize after each key so type errors name the field.
        if let Err(e) = ScenarioConfig::deserialize(&merged) {
            return Err(ConfigParseError::Invalid(Error::config(key, e.to_string())));
        }
    }
    let cfg: ScenarioConfig = serde_json::from_value(merged).map_err(ConfigParseError::Json)?;
    cfg.validate().map_err(ConfigParseError::Invalid)?;
    Ok(cfg)
}

fn merge_shallow(base: &mut Map<String, Value>, patch: Map<String, Value>) {
    for (k, v) in patch {
        base.insert(k, v);
    }
}

#[derive(Debug)]
pub enum ConfigParseError {
    Json(serde_json::Error),
    Invalid(Error),
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_config(&text).map_err(|e| match e {
        ConfigParseError::Json(source) => Error::Json {
            path: path.to_owned(),
            source,
        },
        ConfigParseError::Invalid(err) => err,
    })
}

/// One row of `ue_results.csv`. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeRecord {
    pub scenario: String,
    pub direction: Direction,
    pub drop: u64,
    pub ue_index: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub serving_bs: usize,
    pub los: bool,
    pub d2d_m: f64,
    pub d3d_m: f64,
    pub pl_db: f64,
    pub rx_dbm: f64,
    pub interference_dbm: Option<f64>,
    pub noise_dbm: f64,
    pub snr_db: f64,
    pub sinr_db: f64,
    pub se_bps_hz: f64,
    pub covered: bool,
    pub outage: bool,
}

impl UeRecord {
    pub fn from_outcome(scenario: &str, o: &UeOutcome) -> Self {
        Self {
            scenario: scenario.to_owned(),
            direction: o.direction,
            drop: o.drop,
            ue_index: o.ue_index,
            x_m: o.position.x_m,
            y_m: o.position.y_m,
            serving_bs: o.serving_bs_index,
            los: o.los_to_serving,
            d2d_m: o.d2d_m,
            d3d_m: o.d3d_m,
            pl_db: o.pl_db,
            rx_dbm: o.rx_power_dbm,
            interference_dbm: o.interference_dbm,
            noise_dbm: o.noise_dbm,
            snr_db: o.snr_db,
            sinr_db: o.sinr_db,
            se_bps_hz: o.se_bps_hz,
            covered: o.covered,
            outage: o.outage,
        }
    }

    pub fn to_outcome(&self, ue_height_m: f64) -> UeOutcome {
        UeOutcome {
            drop: self.drop,
            ue_index: self.ue_index,
            position: Position::new(self.x_m, self.y_m, ue_height_m),
            serving_bs_index: self.serving_bs,
            los_to_serving: self.los,
            d2d_m: self.d2d_m,
            d3d_m: self.d3d_m,
            pl_db: self.pl_db,
            rx_power_dbm: self.rx_dbm,
            interference_dbm: self.interference_dbm,
            noise_dbm: self.noise_dbm,
            snr_db: self.snr_db,
            sinr_db: self.sinr_db,
            se_bps_hz: self.se_bps_hz,
            covered: self.covered,
            outage: self.outage,
            direction: self.direction,
        }
    }
}

pub fn write_ue_csv<W: Write>(
    writer: W,
    scenario: &str,
    outcomes: &[UeOutcome],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for o in outcomes {
        w.serialize(UeRecord::from_outcome(scenario, o))?;
    }
    w.flush()?;
    Ok(())
}

pub fn ue_csv_bytes(run: &ScenarioRun) -> Vec<u8> {
    let mut buf = Vec::new();
    write_ue_csv(&mut buf, &run.config.label, &run.outcomes).expect("writing to memory");
    buf
}

pub fn read_ue_csv(path: &Path) -> Result<Vec<UeRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<csv::Result<Vec<_>>>()
        .map_err(csv_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub seed: u64,
    pub config: ScenarioConfig,
    pub summaries: Vec<SeSummary>,
}

pub fn write_map_csv<W: Write>(writer: W, map: &CoverageMap) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["y_m\\x_m".to_owned()];
    header.extend(map.xs.iter().map(f64::to_string));
    w.write_record(&header)?;
    for (y, row) in map.ys.iter().zip(map.rows()) {
        let mut rec = vec![y.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_map_csv(path: &Path, mode: MapMode) -> Result<CoverageMap> {
    let bad = |msg: String| Error::Csv {
        path: path.to_owned(),
        source: csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, msg)),
    };
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| bad("missing header row".into()))?
        .map_err(csv_err(path))?;
    let parse = |s: &str, row: usize| {
        s.parse::<f64>()
            .map_err(|e| bad(format!("row {row}: `{s}`: {e}")))
    };
    let xs = header
        .iter()
        .skip(1)
        .map(|s| parse(s, 0))
        .collect::<Result<Vec<_>>>()?;
    let mut ys = Vec::new();
    let mut values_db = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let mut cells = rec.iter();
        ys.push(parse(cells.next().unwrap_or(""), i + 1)?);
        for c in cells {
            values_db.push(parse(c, i + 1)?);
        }
    }
    if values_db.len() != xs.len() * ys.len() {
        return Err(bad("ragged grid".into()));
    }
    Ok(CoverageMap {
        mode,
        xs,
        ys,
        values_db,
    })
}

/// Paths written by one command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunArtifacts {
    pub config_echo: PathBuf,
    pub ue_results: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub maps: Vec<PathBuf>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(json_err(path))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn write_config_echo(cfg: &ScenarioConfig, out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let path = out_dir.join(CONFIG_FILE);
    write_json(&path, cfg)?;
    Ok(path)
}

/// Writes the artifacts of a finished Monte Carlo run.
pub fn write_run(run: &ScenarioRun, out_dir: &Path) -> Result<RunArtifacts> {
    let config_echo = write_config_echo(&run.config, out_dir)?;

    let ue_path = out_dir.join(UE_RESULTS_FILE);
    fs::write(&ue_path, ue_csv_bytes(run)).map_err(io_err(&ue_path))?;

    let summary_path = out_dir.join(SUMMARY_FILE);
    write_json(
        &summary_path,
        &SummaryFile {
            seed: run.config.seed,
            config: run.config.clone(),
            summaries: run.summaries.clone(),
        },
    )?;

    Ok(RunArtifacts {
        config_echo,
        ue_results: Some(ue_path),
        summary: Some(summary_path),
        maps: Vec::new(),
    })
}

/// `run`: simulate both directions and write the run directory.
pub fn run_command(cfg: &ScenarioConfig, out_dir: &Path) -> Result<(ScenarioRun, RunArtifacts)> {
    let run = run_scenario(cfg)?;
    let artifacts = write_run(&run, out_dir)?;
    Ok((run, artifacts))
}

/// `map`: write a downlink coverage grid.
pub fn map_command(
    cfg: &ScenarioConfig,
    grid_step_m: f64,
    mode: MapMode,
    out_dir: &Path,
) -> Result<(CoverageMap, RunArtifacts)> {
    let map = coverage_map(cfg, grid_step_m, mode)?;
    let config_echo = write_config_echo(cfg, out_dir)?;
    let path = out_dir.join(map_file_name(mode));
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    write_map_csv(std::io::BufWriter::new(file), &map).map_err(csv_err(&path))?;
    Ok((
        map,
        RunArtifacts {
            config_echo,
            maps: vec![path],
            ..Default::default()
        },
    ))
}

/// `report`: recompute the summaries from `ue_results.csv` and check them
/// against `summary.json`. Returns the recomputed summaries.
pub fn report_command(in_dir: &Path) -> Result<Vec<SeSummary>> {
    let summary_path = in_dir.join(SUMMARY_FILE);
    let text = fs::read_to_string(&summary_path).map_err(io_err(&summary_path))?;
    let stored: SummaryFile = serde_json::from_str(&text).map_err(json_err(&summary_path))?;
    let records = read_ue_csv(&in_dir.join(UE_RESULTS_FILE))?;
    let cfg = &stored.config;

    let mut recomputed = Vec::new();
    for direction in Direction::BOTH {
        let outcomes: Vec<UeOutcome> = records
            .iter()
            .filter(|r| r.direction == direction)
            .map(|r| r.to_outcome(cfg.ue_height_m))
            .collect();
        if outcomes.is_empty() {
            continue;
        }
        recomputed.push(summarize(
            &cfg.label,
            &outcomes,
            cfg.bandwidth_hz(direction),
        )?);
    }

    if recomputed != stored.summaries {
        return Err(Error::Mismatch(format!(
            "summaries recomputed from {} differ from {}",
            UE_RESULTS_FILE, SUMMARY_FILE
        )));
    }
    Ok(recomputed)
}
