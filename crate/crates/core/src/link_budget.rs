//! Received power, thermal noise and SINR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thermal noise density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Transmit/receive parameters of one end of a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioEndpoint {
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub noise_figure_db: f64,
}

impl RadioEndpoint {
    /// Reference base station: 15 dBm, 40 dBi, NF 5 dB.
    pub const TABLE1_BS: Self = Self {
        tx_power_dbm: 15.0,
        antenna_gain_dbi: 40.0,
        noise_figure_db: 5.0,
    };
    /// Reference user equipment: 0 dBm, 15 dBi, NF 7 dB.
    pub const TABLE1_UE: Self = Self {
        tx_power_dbm: 0.0,
        antenna_gain_dbi: 15.0,
        noise_figure_db: 7.0,
    };

    pub fn eirp_dbm(&self) -> f64 {
        self.tx_power_dbm + self.antenna_gain_dbi
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::config(
                format!("{field}.tx_power_dbm"),
                "must be finite",
            ));
        }
        if !self.antenna_gain_dbi.is_finite() {
            return Err(Error::config(
                format!("{field}.antenna_gain_dbi"),
                "must be finite",
            ));
        }
        if !(self.noise_figure_db >= 0.0 && self.noise_figure_db.is_finite()) {
            return Err(Error::config(
                format!("{field}.noise_figure_db"),
                "must be >= 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetResult {
    pub rx_power_dbm: f64,
    pub noise_dbm: f64,
    /// Aggregate interference; `None` when there are no interferers.
    pub interference_dbm: Option<f64>,
    pub snr_db: f64,
    pub sinr_db: f64,
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// `Pt + G_tx + G_rx - PL`.
pub fn received_power_dbm(tx: &RadioEndpoint, rx_gain_dbi: f64, total_pl_db: f64) -> f64 {
    tx.tx_power_dbm + tx.antenna_gain_dbi + rx_gain_dbi - total_pl_db
}

/// `-174 dBm/Hz + 10 log10(B) + NF`.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
        return Err(Error::Domain {
            what: "bandwidth (Hz)",
            value: bandwidth_hz,
        });
    }
    Ok(THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

/// Power sum of a set of dBm levels, in mW.
pub fn sum_mw(levels_dbm: &[f64]) -> f64 {
    levels_dbm.iter().copied().map(dbm_to_mw).sum()
}

pub fn sinr_db(signal_dbm: f64, interferers_dbm: &[f64], noise_dbm: f64) -> f64 {
    let denom = sum_mw(interferers_dbm) + dbm_to_mw(noise_dbm);
    10.0 * (dbm_to_mw(signal_dbm) / denom).log10()
}

/// Full budget for one receiver. An empty interferer list yields
/// `interference_dbm = None` and `sinr_db == snr_db`.
pub fn evaluate_budget(
    signal_dbm: f64,
    interferers_dbm: &[f64],
    noise_dbm: f64,
) -> LinkBudgetResult {
    let snr_db = signal_dbm - noise_dbm;
    if interferers_dbm.is_empty() {
        return LinkBudgetResult {
            rx_power_dbm: signal_dbm,
            noise_dbm,
            interference_dbm: None,
            snr_db,
            sinr_db: snr_db,
        };
    }
    let sinr = sinr_db(signal_dbm, interferers_dbm, noise_dbm);
    LinkBudgetResult {
        rx_power_dbm: signal_dbm,
        noise_dbm,
        interference_dbm: Some(mw_to_dbm(sum_mw(interferers_dbm))),
        snr_db,
        sinr_db: sinr.min(snr_db),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn received_power_examples() {
        let bs = RadioEndpoint::TABLE1_BS;
        let ue = RadioEndpoint::TABLE1_UE;
        assert_abs_diff_eq!(
            received_power_dbm(&bs, ue.antenna_gain_dbi, 146.77769675324453),
            -76.77769675324453,
            epsilon = 1e-9
        );
        assert_eq!(received_power_dbm(&bs, 15.0, 70.0), 0.0);
        assert_abs_diff_eq!(
            received_power_dbm(&ue, bs.antenna_gain_dbi, 117.44576688766112),
            -62.44576688766112,
            epsilon = 1e-9
        );
        assert_eq!(bs.eirp_dbm(), 55.0);
    }

    #[test]
    fn noise_floor_examples() {
        assert_abs_diff_eq!(noise_power_dbm(1e9, 7.0).unwrap(), -77.0, epsilon = 1e-9);
        assert_abs_diff_eq!(noise_power_dbm(1e8, 5.0).unwrap(), -89.0, epsilon = 1e-9);
        assert_eq!(noise_power_dbm(1.0, 0.0).unwrap(), -174.0);
        assert!(noise_power_dbm(0.0, 5.0).is_err());
        assert!(noise_power_dbm(-1e6, 5.0).is_err());
    }

    #[test]
    fn sinr_examples() {
        assert_abs_diff_eq!(
            sinr_db(-76.77769675324453, &[], -77.0),
            0.22230324675547308,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(sinr_db(-60.0, &[-60.0], -300.0), 0.0, epsilon = 1e-9);
        assert!(sinr_db(-60.0, &[-90.0], -80.0) < sinr_db(-60.0, &[], -80.0));
    }

    #[test]
    fn budget_without_interferers() {
        let b = evaluate_budget(-70.0, &[], -77.0);
        assert_eq!(b.interference_dbm, None);
        assert_eq!(b.sinr_db, b.snr_db);
        assert_eq!(b.snr_db, 7.0);
    }

    proptest! {
        #[test]
        fn interference_never_helps(
            s in -150.0f64..0.0, n in -120.0f64..-60.0,
            i in prop::collection::vec(-200.0f64..0.0, 1..8),
        ) {
            let b = evaluate_budget(s, &i, n);
            prop_assert!(b.sinr_db <= b.snr_db);
            prop_assert!(b.interference_dbm.is_some());
        }

        #[test]
        fn adding_an_interferer_strictly_lowers_sinr(
            s in -120.0f64..-40.0, n in -100.0f64..-70.0,
            i in prop::collection::vec(-120.0f64..-60.0, 0..6), extra in -120.0f64..-60.0,
        ) {
            let before = sinr_db(s, &i, n);
            let mut more = i.clone();
            more.push(extra);
            prop_assert!(sinr_db(s, &more, n) < before);
        }

        #[test]
        fn snr_tracks_transmit_power(pt in -10.0f64..30.0, pl in 60.0f64..200.0, delta in 0.1f64..10.0) {
            let tx = RadioEndpoint { tx_power_dbm: pt, ..RadioEndpoint::TABLE1_BS };
            let up = RadioEndpoint { tx_power_dbm: pt + delta, ..tx };
            let a = received_power_dbm(&tx, 15.0, pl) - (-77.0);
            let b = received_power_dbm(&up, 15.0, pl) - (-77.0);
            prop_assert!((b - a - delta).abs() < 1e-9);
        }
    }
}
