//! SINR to spectral-efficiency mapping and per-scenario summaries.

use serde::{Deserialize, Serialize};

use crate::config::Direction;
use crate::error::{Error, Result};
use crate::simulation::UeOutcome;

/// Percentile used for the cell-edge user.
pub const EDGE_PERCENTILE: f64 = 5.0;

/// Shannon spectral efficiency `log2(1 + SINR)`, optionally capped.
pub fn spectral_efficiency(sinr_db: f64, cap_bps_hz: Option<f64>) -> f64 {
    let se = (10f64.powf(sinr_db / 10.0)).ln_1p() / std::f64::consts::LN_2;
    let se = if se.is_nan() { 0.0 } else { se.max(0.0) };
    match cap_bps_hz {
        Some(cap) => se.min(cap),
        None => se,
    }
}

/// Percentile with linear interpolation between closest ranks
/// (`h = (n - 1) p / 100`). `sorted` must be ascending and non-empty.
pub fn percentile_sorted(sorted: &[f64], pct: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * pct / 100.0;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeSummary {
    pub scenario: String,
    pub direction: Direction,
    pub ue_count: usize,
    pub mean_se_bps_hz: f64,
    pub median_se_bps_hz: f64,
    /// 5th-percentile user.
    pub edge_se_bps_hz: f64,
    pub max_se_bps_hz: f64,
    /// Fraction with SINR below 0 dB.
    pub uncovered_fraction: f64,
    /// Fraction with SINR below -10 dB.
    pub outage_fraction: f64,
    pub bandwidth_hz: f64,
    pub mean_rate_bps: f64,
    pub median_rate_bps: f64,
    pub edge_rate_bps: f64,
}

pub fn summarize(scenario: &str, outcomes: &[UeOutcome], bandwidth_hz: f64) -> Result<SeSummary> {
    let Some(first) = outcomes.first() else {
        return Err(Error::EmptyInput("no UE outcomes to summarize"));
    };
    let direction = first.direction;
    if outcomes.iter().any(|o| o.direction != direction) {
        return Err(Error::Mismatch("outcomes mix DL and UL".into()));
    }
    let n = outcomes.len();
    let mut se: Vec<f64> = outcomes.iter().map(|o| o.se_bps_hz).collect();
    let mean = se.iter().sum::<f64>() / n as f64;
    se.sort_by(f64::total_cmp);
    let median = percentile_sorted(&se, 50.0);
    let edge = percentile_sorted(&se, EDGE_PERCENTILE);
    let uncovered = outcomes.iter().filter(|o| !o.covered).count();
    let outage = outcomes.iter().filter(|o| o.outage).count();
    Ok(SeSummary {
        scenario: scenario.to_owned(),
        direction,
        ue_count: n,
        mean_se_bps_hz: mean,
        median_se_bps_hz: median,
        edge_se_bps_hz: edge,
        max_se_bps_hz: se[n - 1],
        uncovered_fraction: uncovered as f64 / n as f64,
        outage_fraction: outage as f64 / n as f64,
        bandwidth_hz,
        mean_rate_bps: mean * bandwidth_hz,
        median_rate_bps: median * bandwidth_hz,
        edge_rate_bps: edge * bandwidth_hz,
    })
}

/// Relative change `(new - base) / base`.
pub fn relative_delta(base: f64, new: f64) -> f64 {
    (new - base) / base
}

/// Empirical CDF over a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cdf {
    pub values: Vec<f64>,
    /// `probabilities[i] = (i + 1) / n`.
    pub probabilities: Vec<f64>,
}

impl Cdf {
    /// `P(X <= x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let below = self.values.partition_point(|v| *v <= x);
        below as f64 / self.values.len() as f64
    }

    /// Empirical quantile (inverse CDF, lower).
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.values.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.values[idx]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn build_cdf(values: &[f64]) -> Result<Cdf> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no samples for CDF"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let probabilities = (1..=sorted.len()).map(|i| i as f64 / n).collect();
    Ok(Cdf {
        values: sorted,
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::Position;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn outcome(se: f64, sinr_db: f64, direction: Direction) -> UeOutcome {
        UeOutcome {
            drop: 0,
            ue_index: 0,
            position: Position::new(0.0, 0.0, 1.5),
            serving_bs_index: 0,
            los_to_serving: false,
            d2d_m: 10.0,
            d3d_m: 10.3,
            pl_db: 100.0,
            rx_power_dbm: -60.0,
            interference_dbm: None,
            noise_dbm: -77.0,
            snr_db: sinr_db,
            sinr_db,
            se_bps_hz: se,
            covered: sinr_db >= 0.0,
            outage: sinr_db < -10.0,
            direction,
        }
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(spectral_efficiency(0.0, None), 1.0);
        assert_abs_diff_eq!(
            spectral_efficiency(-10.0, None),
            0.13750352374993502,
            epsilon = 1e-12
        );
        assert!(spectral_efficiency(-400.0, None) < 1e-39);
        assert_eq!(spectral_efficiency(f64::NEG_INFINITY, None), 0.0);
        assert_eq!(spectral_efficiency(30.0, Some(4.8)), 4.8);
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile_sorted(&v, 50.0), 3.0);
        assert_eq!(percentile_sorted(&v, 0.0), 1.0);
        assert_eq!(percentile_sorted(&v, 100.0), 5.0);
        assert_abs_diff_eq!(percentile_sorted(&v, 5.0), 1.2, epsilon = 1e-12);
        assert_eq!(percentile_sorted(&[7.0], 5.0), 7.0);
    }

    #[test]
    fn summary_of_identical_users() {
        let o: Vec<_> = (0..20).map(|_| outcome(2.5, 5.0, Direction::Dl)).collect();
        let s = summarize("x", &o, 1e9).unwrap();
        assert_eq!(
            (s.mean_se_bps_hz, s.median_se_bps_hz, s.edge_se_bps_hz),
            (2.5, 2.5, 2.5)
        );
        assert_eq!(s.mean_rate_bps, 2.5e9);
        assert_eq!(s.uncovered_fraction, 0.0);
    }

    #[test]
    fn summary_counts_coverage_classes() {
        let o = vec![
            outcome(0.01, -15.0, Direction::Ul),
            outcome(0.5, -3.0, Direction::Ul),
            outcome(2.0, 4.0, Direction::Ul),
            outcome(4.0, 11.0, Direction::Ul),
        ];
        let s = summarize("x", &o, 1e8).unwrap();
        assert_eq!(s.uncovered_fraction, 0.5);
        assert_eq!(s.outage_fraction, 0.25);
        assert_eq!(s.max_se_bps_hz, 4.0);
    }

    #[test]
    fn summary_rejects_empty_and_mixed() {
        assert!(matches!(
            summarize("x", &[], 1e9),
            Err(Error::EmptyInput(_))
        ));
        let mixed = [
            outcome(1.0, 0.0, Direction::Dl),
            outcome(1.0, 0.0, Direction::Ul),
        ];
        assert!(summarize("x", &mixed, 1e9).is_err());
    }

    #[test]
    fn cdf_basics() {
        let c = build_cdf(&[3.0, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(c.eval(2.0), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(c.eval(0.5), 0.0);
        assert_eq!(c.eval(10.0), 1.0);
        assert_eq!(c.probabilities, vec![1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert!(build_cdf(&[]).is_err());

        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let c = build_cdf(&v).unwrap();
        let p5 = percentile_sorted(&c.values, 5.0);
        assert!((c.eval(p5) - 0.05).abs() <= 1.0 / 1000.0);
    }

    proptest! {
        #[test]
        fn se_monotone_below_cap(a in -60.0f64..60.0, step in 0.01f64..10.0) {
            prop_assert!(spectral_efficiency(a + step, None) > spectral_efficiency(a, None));
            prop_assert!(spectral_efficiency(a, None) >= 0.0);
        }

        #[test]
        fn summary_permutation_invariant_and_bandwidth_scaled(
            ses in prop::collection::vec(0.0f64..12.0, 1..60),
            seed in any::<u64>(),
            factor in 1.0f64..16.0,
        ) {
            let base: Vec<_> = ses.iter().map(|s| outcome(*s, 3.0, Direction::Dl)).collect();
            let mut shuffled = base.clone();
            // deterministic Fisher-Yates driven by the seed
            let mut state = seed | 1;
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                shuffled.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let a = summarize("x", &base, 1e9).unwrap();
            let b = summarize("x", &shuffled, 1e9).unwrap();
            prop_assert_eq!(a.median_se_bps_hz, b.median_se_bps_hz);
            prop_assert_eq!(a.edge_se_bps_hz, b.edge_se_bps_hz);
            prop_assert!((a.mean_se_bps_hz - b.mean_se_bps_hz).abs() < 1e-12);
            prop_assert!(a.edge_se_bps_hz <= a.median_se_bps_hz);
            prop_assert!(a.median_se_bps_hz <= a.max_se_bps_hz);

            let wide = summarize("x", &base, 1e9 * factor).unwrap();
            prop_assert_eq!(wide.mean_se_bps_hz, a.mean_se_bps_hz);
            prop_assert!((wide.mean_rate_bps - a.mean_rate_bps * factor).abs() <= 1e-6 * wide.mean_rate_bps.abs().max(1.0));
        }

        #[test]
        fn cdf_permutation_stable(mut v in prop::collection::vec(-100.0f64..100.0, 1..50)) {
            let a = build_cdf(&v).unwrap();
            v.reverse();
            let b = build_cdf(&v).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(a.probabilities.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(*a.probabilities.last().unwrap(), 1.0);
        }
    }
}
