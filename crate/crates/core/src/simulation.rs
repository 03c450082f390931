//! Monte Carlo engine and deterministic coverage maps.
//!
//! A drop realizes every UE x BS link once per direction. Both directions
//! share the LOS state and the shadow draw of a link (they come from the same
//! substream); only the FSPL anchor changes with the carrier. UEs associate on
//! downlink power and keep that serving cell for the uplink.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    atmospheric_loss_db, ci_mean_path_loss, sample_los_state, sample_shadow_fading,
    LinkRealization, REFERENCE_DISTANCE_M,
};
use crate::config::{AssociationPolicy, Direction, ScenarioConfig};
use crate::deployment::{
    drop_one, link_geometry, make_layout, CellLayout, DropParams, Position, UeDrop,
};
use crate::error::{Error, Result};
use crate::link_budget::{evaluate_budget, noise_power_dbm, received_power_dbm};
use crate::rng::{Purpose, RngPolicy};
use crate::stats::{spectral_efficiency, summarize, SeSummary};

/// SINR at or above which a UE counts as covered.
pub const COVERAGE_THRESHOLD_DB: f64 = 0.0;
/// SINR below which a UE is in outage.
pub const OUTAGE_THRESHOLD_DB: f64 = -10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeOutcome {
    pub drop: u64,
    pub ue_index: usize,
    pub position: Position,
    pub serving_bs_index: usize,
    pub los_to_serving: bool,
    pub d2d_m: f64,
    pub d3d_m: f64,
    /// Total (faded) path loss on the serving link.
    pub pl_db: f64,
    pub rx_power_dbm: f64,
    pub interference_dbm: Option<f64>,
    pub noise_dbm: f64,
    pub snr_db: f64,
    pub sinr_db: f64,
    pub se_bps_hz: f64,
    pub covered: bool,
    pub outage: bool,
    pub direction: Direction,
}

/// Links of one drop, row-major over UEs.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkMatrix {
    num_bs: usize,
    links: Vec<LinkRealization>,
}

impl LinkMatrix {
    pub fn num_ues(&self) -> usize {
        self.links.len() / self.num_bs
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn row(&self, ue: usize) -> &[LinkRealization] {
        &self.links[ue * self.num_bs..(ue + 1) * self.num_bs]
    }

    pub fn get(&self, ue: usize, bs: usize) -> &LinkRealization {
        &self.links[ue * self.num_bs + bs]
    }

    pub fn iter(&self) -> impl Iterator<Item = &LinkRealization> {
        self.links.iter()
    }
}

/// Layout with the configured heights and drop radius applied.
pub fn layout_for(cfg: &ScenarioConfig) -> Result<CellLayout> {
    let mut layout = make_layout(cfg.layout, cfg.ring_radius_m)?;
    for bs in &mut layout.bs_positions {
        bs.z_m = cfg.bs_height_m;
    }
    layout.coverage_radius_m = cfg.coverage_radius_m;
    Ok(layout)
}

fn drop_params(cfg: &ScenarioConfig) -> DropParams {
    DropParams {
        count: cfg.ue_count,
        radius_m: cfg.coverage_radius_m,
        ue_height_m: cfg.ue_height_m,
        min_drop_distance_m: cfg.min_drop_distance_m,
    }
}

/// UE drop for one Monte Carlo iteration, evaluated in parallel.
pub fn drop_ues_parallel(
    cfg: &ScenarioConfig,
    layout: &CellLayout,
    drop_index: u64,
) -> Result<UeDrop> {
    let policy = RngPolicy::new(cfg.seed);
    let params = drop_params(cfg);
    let ue_positions = (0..params.count)
        .into_par_iter()
        .map(|ue| drop_one(&params, &layout.bs_positions, &policy, drop_index, ue))
        .collect::<Result<Vec<_>>>()?;
    Ok(UeDrop {
        ue_positions,
        seed: cfg.seed,
        drop_index,
    })
}

/// Realizes one BS-UE link: Bernoulli LOS state, LOS-dependent shadow draw
/// and CI path loss at `fc_ghz`.
#[allow(clippy::too_many_arguments)]
pub fn realize_link(
    cfg: &ScenarioConfig,
    fc_ghz: f64,
    bs: &Position,
    ue: &Position,
    policy: &RngPolicy,
    drop: u64,
    ue_index: usize,
    bs_index: usize,
) -> Result<LinkRealization> {
    let (d2d_m, d3d_m) = link_geometry(bs, ue);
    let mut los_rng = policy.link_stream(drop, ue_index, bs_index, Purpose::LosState);
    let los = sample_los_state(d2d_m, &cfg.los_model, &mut los_rng)?;
    let params = cfg.path_loss_params(los);
    let mut shadow_rng = policy.link_stream(drop, ue_index, bs_index, Purpose::ShadowFading);
    let shadow_db = sample_shadow_fading(params, &mut shadow_rng);
    let mean_pl_db = ci_mean_path_loss(fc_ghz, d3d_m, params)?
        + atmospheric_loss_db(cfg.atmospheric_db_per_km, d3d_m);
    Ok(LinkRealization {
        d2d_m,
        d3d_m,
        los,
        shadow_db,
        mean_pl_db,
        total_pl_db: mean_pl_db + shadow_db,
    })
}

pub fn realize_links(
    layout: &CellLayout,
    drop: &UeDrop,
    cfg: &ScenarioConfig,
    fc_ghz: f64,
) -> Result<LinkMatrix> {
    let policy = RngPolicy::new(drop.seed);
    let rows = drop
        .ue_positions
        .par_iter()
        .enumerate()
        .map(|(u, ue)| {
            layout
                .bs_positions
                .iter()
                .enumerate()
                .map(|(b, bs)| realize_link(cfg, fc_ghz, bs, ue, &policy, drop.drop_index, u, b))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LinkMatrix {
        num_bs: layout.num_bs(),
        links: rows.into_iter().flatten().collect(),
    })
}

/// Index of the first maximum.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Serving BS per UE, from downlink links.
pub fn associate(links: &LinkMatrix, cfg: &ScenarioConfig) -> Vec<usize> {
    (0..links.num_ues())
        .map(|u| {
            let row = links.row(u);
            match cfg.association {
                AssociationPolicy::MaxPower => {
                    argmax(row.iter().map(|l| {
                        received_power_dbm(&cfg.bs, cfg.ue.antenna_gain_dbi, l.total_pl_db)
                    }))
                }
                AssociationPolicy::Nearest => argmax(row.iter().map(|l| -l.d2d_m)),
            }
        })
        .collect()
}

/// Everything `evaluate_ue` needs about one drop.
#[derive(Debug, Clone)]
pub struct DropState {
    pub drop: UeDrop,
    pub dl_links: LinkMatrix,
    pub ul_links: LinkMatrix,
    pub serving: Vec<usize>,
    /// UEs served by each BS, ascending.
    pub served_by: Vec<Vec<usize>>,
}

impl DropState {
    pub fn realize(cfg: &ScenarioConfig, layout: &CellLayout, drop: UeDrop) -> Result<Self> {
        let dl_links = realize_links(layout, &drop, cfg, cfg.dl_carrier_ghz)?;
        let ul_links = realize_links(layout, &drop, cfg, cfg.ul_carrier_ghz)?;
        let serving = associate(&dl_links, cfg);
        let mut served_by = vec![Vec::new(); layout.num_bs()];
        for (u, &b) in serving.iter().enumerate() {
            served_by[b].push(u);
        }
        Ok(Self {
            drop,
            dl_links,
            ul_links,
            serving,
            served_by,
        })
    }

    fn links(&self, direction: Direction) -> &LinkMatrix {
        match direction {
            Direction::Dl => &self.dl_links,
            Direction::Ul => &self.ul_links,
        }
    }
}

fn uplink_interferers(state: &DropState, cfg: &ScenarioConfig, ue: usize) -> Vec<f64> {
    if !cfg.ul_interference_enabled {
        return Vec::new();
    }
    let serving = state.serving[ue];
    let policy = RngPolicy::new(state.drop.seed);
    state
        .served_by
        .iter()
        .enumerate()
        .filter(|(cell, members)| *cell != serving && !members.is_empty())
        .map(|(cell, members)| {
            let mut rng =
                policy.link_stream(state.drop.drop_index, ue, cell, Purpose::UlInterferer);
            let other = members[rng.random_range(0..members.len())];
            let pl = state.ul_links.get(other, serving).total_pl_db;
            received_power_dbm(&cfg.ue, cfg.bs.antenna_gain_dbi, pl)
                - cfg.interferer_gain_discount_db
        })
        .collect()
}

pub fn evaluate_ue(
    state: &DropState,
    cfg: &ScenarioConfig,
    ue: usize,
    direction: Direction,
) -> Result<UeOutcome> {
    let serving = state.serving[ue];
    let links = state.links(direction);
    let row = links.row(ue);
    let link = &row[serving];

    let (signal_dbm, interferers, noise_dbm) = match direction {
        Direction::Dl => {
            let rx = |l: &LinkRealization| {
                received_power_dbm(&cfg.bs, cfg.ue.antenna_gain_dbi, l.total_pl_db)
            };
            let interferers: Vec<f64> = row
                .iter()
                .enumerate()
                .filter(|(b, _)| *b != serving)
                .map(|(_, l)| rx(l) - cfg.interferer_gain_discount_db)
                .collect();
            let noise = noise_power_dbm(cfg.dl_bandwidth_hz, cfg.ue.noise_figure_db)?;
            (rx(link), interferers, noise)
        }
        Direction::Ul => {
            let signal = received_power_dbm(&cfg.ue, cfg.bs.antenna_gain_dbi, link.total_pl_db);
            let noise = noise_power_dbm(cfg.ul_bandwidth_hz, cfg.bs.noise_figure_db)?;
            (signal, uplink_interferers(state, cfg, ue), noise)
        }
    };

    let budget = evaluate_budget(signal_dbm, &interferers, noise_dbm);
    Ok(UeOutcome {
        drop: state.drop.drop_index,
        ue_index: ue,
        position: state.drop.ue_positions[ue],
        serving_bs_index: serving,
        los_to_serving: link.los,
        d2d_m: link.d2d_m,
        d3d_m: link.d3d_m,
        pl_db: link.total_pl_db,
        rx_power_dbm: budget.rx_power_dbm,
        interference_dbm: budget.interference_dbm,
        noise_dbm: budget.noise_dbm,
        snr_db: budget.snr_db,
        sinr_db: budget.sinr_db,
        se_bps_hz: spectral_efficiency(budget.sinr_db, cfg.se_cap_bps_hz),
        covered: budget.sinr_db >= COVERAGE_THRESHOLD_DB,
        outage: budget.sinr_db < OUTAGE_THRESHOLD_DB,
        direction,
    })
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub layout: CellLayout,
    /// All DL outcomes, then all UL outcomes; each ordered by (drop, ue).
    pub outcomes: Vec<UeOutcome>,
    pub summaries: Vec<SeSummary>,
    /// Per UE (drop-major): whether any BS link is LOS.
    pub los_to_any: Vec<bool>,
}

impl ScenarioRun {
    pub fn outcomes_for(&self, direction: Direction) -> impl Iterator<Item = &UeOutcome> {
        self.outcomes
            .iter()
            .filter(move |o| o.direction == direction)
    }

    pub fn summary(&self, direction: Direction) -> &SeSummary {
        self.summaries
            .iter()
            .find(|s| s.direction == direction)
            .expect("run_scenario summarizes both directions")
    }
}

/// Runs every drop of a scenario in both directions.
///
/// Output depends only on the config (including its seed), never on the
/// rayon pool size.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    cfg.validate()?;
    let layout = layout_for(cfg)?;
    let mut dl = Vec::with_capacity(cfg.ue_count * cfg.num_drops as usize);
    let mut ul = Vec::with_capacity(dl.capacity());
    let mut los_to_any = Vec::with_capacity(dl.capacity());

    for drop_index in 0..u64::from(cfg.num_drops) {
        let drop = drop_ues_parallel(cfg, &layout, drop_index)?;
        let state = DropState::realize(cfg, &layout, drop)?;
        los_to_any.extend((0..cfg.ue_count).map(|u| state.dl_links.row(u).iter().any(|l| l.los)));
        for (direction, sink) in [(Direction::Dl, &mut dl), (Direction::Ul, &mut ul)] {
            let outcomes = (0..cfg.ue_count)
                .into_par_iter()
                .map(|u| evaluate_ue(&state, cfg, u, direction))
                .collect::<Result<Vec<_>>>()?;
            sink.extend(outcomes);
        }
    }

    let summaries = vec![
        summarize(&cfg.label, &dl, cfg.dl_bandwidth_hz)?,
        summarize(&cfg.label, &ul, cfg.ul_bandwidth_hz)?,
    ];
    dl.extend(ul);
    Ok(ScenarioRun {
        config: cfg.clone(),
        layout,
        outcomes: dl,
        summaries,
        los_to_any,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapMode {
    Snr,
    Sinr,
}

impl MapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MapMode::Snr => "snr",
            MapMode::Sinr => "sinr",
        }
    }
}

impl std::str::FromStr for MapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr" => Ok(MapMode::Snr),
            "sinr" => Ok(MapMode::Sinr),
            other => Err(Error::config(
                "mode",
                format!("expected snr or sinr, got `{other}`"),
            )),
        }
    }
}

/// Evaluates downlink SNR/SINR at arbitrary points using NLOS-best mean path
/// loss to every BS: no LOS draw, no shadowing.
#[derive(Debug, Clone)]
pub struct MapEvaluator {
    cfg: ScenarioConfig,
    layout: CellLayout,
    noise_dbm: f64,
}

impl MapEvaluator {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            layout: layout_for(cfg)?,
            noise_dbm: noise_power_dbm(cfg.dl_bandwidth_hz, cfg.ue.noise_figure_db)?,
            cfg: cfg.clone(),
        })
    }

    pub fn layout(&self) -> &CellLayout {
        &self.layout
    }

    pub fn value_at(&self, x_m: f64, y_m: f64, mode: MapMode) -> Result<f64> {
        let cfg = &self.cfg;
        let ue = Position::new(x_m, y_m, cfg.ue_height_m);
        let rx = self
            .layout
            .bs_positions
            .iter()
            .map(|bs| {
                let (_, d3d) = link_geometry(bs, &ue);
                // Grid points are not UE drops; pin them to the CI anchor.
                let d3d = d3d.max(REFERENCE_DISTANCE_M);
                let pl = ci_mean_path_loss(cfg.dl_carrier_ghz, d3d, &cfg.nlos_path_loss)?
                    + atmospheric_loss_db(cfg.atmospheric_db_per_km, d3d);
                Ok(received_power_dbm(&cfg.bs, cfg.ue.antenna_gain_dbi, pl))
            })
            .collect::<Result<Vec<_>>>()?;
        let serving = argmax(rx.iter().copied());
        let interferers: Vec<f64> = match mode {
            MapMode::Snr => Vec::new(),
            MapMode::Sinr => rx
                .iter()
                .enumerate()
                .filter(|(b, _)| *b != serving)
                .map(|(_, p)| p - cfg.interferer_gain_discount_db)
                .collect(),
        };
        let budget = evaluate_budget(rx[serving], &interferers, self.noise_dbm);
        Ok(match mode {
            MapMode::Snr => budget.snr_db,
            MapMode::Sinr => budget.sinr_db,
        })
    }
}

/// Square grid of downlink SNR or SINR values in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageMap {
    pub mode: MapMode,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major: `values_db[iy * xs.len() + ix]`.
    pub values_db: Vec<f64>,
}

impl CoverageMap {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values_db[iy * self.xs.len() + ix]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values_db.chunks(self.xs.len())
    }
}

/// Half-width of the map square relative to the coverage radius.
pub const MAP_EXTENT_FACTOR: f64 = 1.25;

/// Grid axis `-B, -B + step, ...` up to `B = 1.25 x coverage radius`.
pub fn map_axis(coverage_radius_m: f64, grid_step_m: f64) -> Vec<f64> {
    let half = MAP_EXTENT_FACTOR * coverage_radius_m;
    let n = (2.0 * half / grid_step_m + 1e-9).floor() as usize + 1;
    (0..n).map(|i| -half + i as f64 * grid_step_m).collect()
}

pub fn coverage_map(cfg: &ScenarioConfig, grid_step_m: f64, mode: MapMode) -> Result<CoverageMap> {
    if !(grid_step_m > 0.0 && grid_step_m.is_finite()) {
        return Err(Error::config("grid", "grid step must be > 0"));
    }
    let eval = MapEvaluator::new(cfg)?;
    let axis = map_axis(cfg.coverage_radius_m, grid_step_m);
    let values_db = axis
        .par_iter()
        .map(|&y| {
            axis.iter()
                .map(|&x| eval.value_at(x, y, mode))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(CoverageMap {
        mode,
        xs: axis.clone(),
        ys: axis,
        values_db,
    })
}
