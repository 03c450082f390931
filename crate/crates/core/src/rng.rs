//! Counter-based random substreams.
//!
//! Every random draw in a scenario comes from a ChaCha8 stream whose key is a
//! pure function of the master seed and the `(drop, ue, bs, purpose)` tuple
//! that consumes it. Workers can therefore evaluate UEs in any order, on any
//! number of threads, and still reproduce the sequential result bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// What a substream is used for. Part of the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum Purpose {
    UePosition = 1,
    LosState = 2,
    ShadowFading = 3,
    UlInterferer = 4,
}

/// Placeholder BS index for streams that are not tied to a link.
pub const NO_BS: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub drop: u64,
    pub ue: u64,
    pub bs: u32,
    pub purpose: Purpose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngPolicy {
    pub master_seed: u64,
}

impl RngPolicy {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, key: StreamKey) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        seed[8..16].copy_from_slice(&key.drop.to_le_bytes());
        seed[16..24].copy_from_slice(&key.ue.to_le_bytes());
        seed[24..28].copy_from_slice(&key.bs.to_le_bytes());
        seed[28..32].copy_from_slice(&(key.purpose as u32).to_le_bytes());
        ChaCha8Rng::from_seed(seed)
    }

    pub fn link_stream(&self, drop: u64, ue: usize, bs: usize, purpose: Purpose) -> ChaCha8Rng {
        self.stream(StreamKey {
            drop,
            ue: ue as u64,
            bs: bs as u32,
            purpose,
        })
    }
}
