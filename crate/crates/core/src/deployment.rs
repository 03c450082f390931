//! Base-station layouts, uniform UE drops and link geometry.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Purpose, RngPolicy, NO_BS};

/// Lamppost base-station height.
pub const BS_HEIGHT_M: f64 = 4.0;
pub const UE_HEIGHT_M: f64 = 1.5;
/// Per-BS NLOS reach used to size the default scenario disk.
pub const SINGLE_CELL_RADIUS_M: f64 = 200.0;
pub const DEFAULT_RING_RADIUS_M: f64 = 200.0;
pub const DEFAULT_MIN_DROP_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x_m: f64,
    pub y_m: f64,
    /// Height above ground.
    pub z_m: f64,
}

impl Position {
    pub const fn new(x_m: f64, y_m: f64, z_m: f64) -> Self {
        Self { x_m, y_m, z_m }
    }

    pub fn planar_distance(&self, other: &Position) -> f64 {
        (self.x_m - other.x_m).hypot(self.y_m - other.y_m)
    }

    pub fn planar_radius(&self) -> f64 {
        self.x_m.hypot(self.y_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    Single,
    Seven,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellLayout {
    pub kind: LayoutKind,
    pub bs_positions: Vec<Position>,
    pub coverage_radius_m: f64,
}

impl CellLayout {
    pub fn num_bs(&self) -> usize {
        self.bs_positions.len()
    }
}

/// Builds the BS layout. The seven-cell ring puts six BS at `ring_radius_m`
/// from the origin, 60 degrees apart, starting on the +x axis.
pub fn make_layout(kind: LayoutKind, ring_radius_m: f64) -> Result<CellLayout> {
    let origin = Position::new(0.0, 0.0, BS_HEIGHT_M);
    match kind {
        LayoutKind::Single => Ok(CellLayout {
            kind,
            bs_positions: vec![origin],
            coverage_radius_m: SINGLE_CELL_RADIUS_M,
        }),
        LayoutKind::Seven => {
            if !(ring_radius_m > 0.0 && ring_radius_m.is_finite()) {
                return Err(Error::config("ring_radius_m", "must be > 0"));
            }
            let mut bs_positions = Vec::with_capacity(7);
            bs_positions.push(origin);
            bs_positions.extend((0..6).map(|k| {
                let angle = k as f64 * PI / 3.0;
                Position::new(
                    ring_radius_m * angle.cos(),
                    ring_radius_m * angle.sin(),
                    BS_HEIGHT_M,
                )
            }));
            Ok(CellLayout {
                kind,
                bs_positions,
                coverage_radius_m: ring_radius_m + SINGLE_CELL_RADIUS_M,
            })
        }
    }
}

/// Planar and 3D separation between two positions.
pub fn link_geometry(bs: &Position, ue: &Position) -> (f64, f64) {
    let d2d = bs.planar_distance(ue);
    let dz = bs.z_m - ue.z_m;
    (d2d, d2d.hypot(dz))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeDrop {
    pub ue_positions: Vec<Position>,
    pub seed: u64,
    pub drop_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropParams {
    pub count: usize,
    pub radius_m: f64,
    pub ue_height_m: f64,
    /// UEs closer than this (2D) to any BS are redrawn.
    pub min_drop_distance_m: f64,
}

/// One area-uniform point on the disk: `r = R sqrt(u)`, uniform angle.
pub fn sample_disk_point<R: Rng + ?Sized>(radius_m: f64, z_m: f64, rng: &mut R) -> Position {
    let r = radius_m * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Position::new(r * theta.cos(), r * theta.sin(), z_m)
}

/// Drops `count` UEs uniformly over the origin-centred disk.
///
/// Each UE draws from its own substream, so a drop is identical however the
/// UEs are scheduled across threads.
pub fn drop_ues(
    params: &DropParams,
    bs_positions: &[Position],
    policy: &RngPolicy,
    drop_index: u64,
) -> Result<UeDrop> {
    if params.count == 0 {
        return Err(Error::config("ue_count", "must be > 0"));
    }
    if !(params.radius_m > 0.0 && params.radius_m.is_finite()) {
        return Err(Error::config("coverage_radius_m", "must be > 0"));
    }
    let ue_positions = (0..params.count)
        .map(|ue| drop_one(params, bs_positions, policy, drop_index, ue))
        .collect::<Result<Vec<_>>>()?;
    Ok(UeDrop {
        ue_positions,
        seed: policy.master_seed,
        drop_index,
    })
}

pub(crate) fn drop_one(
    params: &DropParams,
    bs_positions: &[Position],
    policy: &RngPolicy,
    drop_index: u64,
    ue: usize,
) -> Result<Position> {
    const MAX_TRIES: usize = 10_000;
    let mut rng = policy.link_stream(drop_index, ue, NO_BS as usize, Purpose::UePosition);
    for _ in 0..MAX_TRIES {
        let p = sample_disk_point(params.radius_m, params.ue_height_m, &mut rng);
        if bs_positions
            .iter()
            .all(|bs| bs.planar_distance(&p) >= params.min_drop_distance_m)
        {
            return Ok(p);
        }
    }
    Err(Error::config(
        "min_drop_distance_m",
        "exclusion zone leaves no room on the disk",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(count: usize, radius_m: f64) -> DropParams {
        DropParams {
            count,
            radius_m,
            ue_height_m: UE_HEIGHT_M,
            min_drop_distance_m: DEFAULT_MIN_DROP_DISTANCE_M,
        }
    }

    #[test]
    fn single_layout() {
        let l = make_layout(LayoutKind::Single, 0.0).unwrap();
        assert_eq!(l.bs_positions, vec![Position::new(0.0, 0.0, 4.0)]);
        assert_eq!(l.coverage_radius_m, 200.0);
    }

    #[test]
    fn seven_layout_is_a_regular_hexagon() {
        let l = make_layout(LayoutKind::Seven, 200.0).unwrap();
        assert_eq!(l.num_bs(), 7);
        assert_eq!(l.coverage_radius_m, 400.0);
        assert_eq!(l.bs_positions[0], Position::new(0.0, 0.0, 4.0));
        let ring = &l.bs_positions[1..];
        for (k, bs) in ring.iter().enumerate() {
            assert_eq!(bs.z_m, 4.0);
            assert_abs_diff_eq!(bs.planar_radius(), 200.0, epsilon = 1e-9);
            // Neighbours around the ring sit one side length apart.
            let next = &ring[(k + 1) % 6];
            assert_abs_diff_eq!(bs.planar_distance(next), 200.0, epsilon = 1e-9);
            let mut others: Vec<f64> = ring
                .iter()
                .filter(|o| *o != bs)
                .map(|o| o.planar_distance(bs))
                .collect();
            others.sort_by(f64::total_cmp);
            assert_abs_diff_eq!(others[0], 200.0, epsilon = 1e-9);
            assert_abs_diff_eq!(others[1], 200.0, epsilon = 1e-9);
            assert!(others[2] > 300.0);
        }
    }

    #[test]
    fn seven_layout_needs_positive_ring() {
        assert!(make_layout(LayoutKind::Seven, 0.0).is_err());
        assert!(make_layout(LayoutKind::Seven, -5.0).is_err());
    }

    #[test]
    fn kind_serializes_lowercase() {
        assert_eq!(
            serde_json::to_string(&LayoutKind::Seven).unwrap(),
            "\"seven\""
        );
    }

    #[test]
    fn link_geometry_values() {
        let bs = Position::new(0.0, 0.0, 4.0);
        assert_eq!(
            link_geometry(&bs, &Position::new(0.0, 0.0, 1.5)),
            (0.0, 2.5)
        );
        let (d2, d3) = link_geometry(&bs, &Position::new(200.0, 0.0, 1.5));
        assert_eq!(d2, 200.0);
        assert_abs_diff_eq!(d3, 200.01562438969611, epsilon = 1e-9);
    }

    #[test]
    fn drops_stay_on_disk_and_respect_exclusion() {
        let layout = make_layout(LayoutKind::Seven, 200.0).unwrap();
        let p = DropParams {
            min_drop_distance_m: 5.0,
            ..params(1000, 400.0)
        };
        let drop = drop_ues(&p, &layout.bs_positions, &RngPolicy::new(3), 0).unwrap();
        assert_eq!(drop.ue_positions.len(), 1000);
        for ue in &drop.ue_positions {
            assert!(ue.planar_radius() <= 400.0);
            assert_eq!(ue.z_m, 1.5);
            assert!(layout
                .bs_positions
                .iter()
                .all(|b| b.planar_distance(ue) >= 5.0));
        }
    }

    #[test]
    fn drops_are_deterministic() {
        let bs = [Position::new(0.0, 0.0, 4.0)];
        let a = drop_ues(&params(100, 200.0), &bs, &RngPolicy::new(11), 2).unwrap();
        let b = drop_ues(&params(100, 200.0), &bs, &RngPolicy::new(11), 2).unwrap();
        let c = drop_ues(&params(100, 200.0), &bs, &RngPolicy::new(11), 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.ue_positions, c.ue_positions);
    }

    #[test]
    fn drop_rejects_empty_or_degenerate() {
        let bs = [Position::new(0.0, 0.0, 4.0)];
        assert!(drop_ues(&params(0, 200.0), &bs, &RngPolicy::new(1), 0).is_err());
        assert!(drop_ues(&params(5, 0.0), &bs, &RngPolicy::new(1), 0).is_err());
        let impossible = DropParams {
            min_drop_distance_m: 500.0,
            ..params(1, 200.0)
        };
        assert!(drop_ues(&impossible, &bs, &RngPolicy::new(1), 0).is_err());
    }

    #[test]
    fn drop_radial_distribution_is_area_uniform() {
        let n = 100_000;
        let bs = [Position::new(0.0, 0.0, 4.0)];
        let drop = drop_ues(&params(n, 200.0), &bs, &RngPolicy::new(5), 0).unwrap();
        let mut radii: Vec<f64> = drop
            .ue_positions
            .iter()
            .map(Position::planar_radius)
            .collect();
        let inner = radii.iter().filter(|r| **r <= 100.0).count() as f64 / n as f64;
        assert!((inner - 0.25).abs() < 0.01, "{inner}");

        // Kolmogorov-Smirnov against F(r) = r^2 / R^2. The 1 m exclusion
        // removes ~2.5e-5 of the mass, well inside the 1% critical value.
        radii.sort_by(f64::total_cmp);
        let ks = radii
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let f = (r / 200.0).powi(2);
                (f - i as f64 / n as f64)
                    .abs()
                    .max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        let critical = 1.63 / (n as f64).sqrt();
        assert!(ks < critical, "KS {ks} >= {critical}");
    }

    proptest! {
        #[test]
        fn geometry_symmetric_and_translation_invariant(
            ax in -500.0f64..500.0, ay in -500.0f64..500.0, az in 0.0f64..10.0,
            bx in -500.0f64..500.0, by in -500.0f64..500.0, bz in 0.0f64..10.0,
            tx in -100.0f64..100.0, ty in -100.0f64..100.0,
        ) {
            let a = Position::new(ax, ay, az);
            let b = Position::new(bx, by, bz);
            let (d2, d3) = link_geometry(&a, &b);
            let (e2, e3) = link_geometry(&b, &a);
            prop_assert_eq!((d2, d3), (e2, e3));
            prop_assert!(d3 >= d2);
            let (t2, t3) = link_geometry(
                &Position::new(ax + tx, ay + ty, az),
                &Position::new(bx + tx, by + ty, bz),
            );
            prop_assert!((t2 - d2).abs() < 1e-9 && (t3 - d3).abs() < 1e-9);
        }
    }
}
