//! Counter-based random streams.
//!
//! Every random draw in the simulator is keyed by a tuple of integers (seed,
//! frame, beam, bin, pixel, ...). Hashing the key yields the state of a small
//! SplitMix64 generator, so a cell's values never depend on which worker
//! visits it or in which order.

use rand::RngCore;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes an ordered key into a 64-bit stream state.
pub fn stream_key(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6a09_e667_f3bc_c909, |acc, &p| {
        mix64(acc.wrapping_add(GOLDEN_GAMMA) ^ mix64(p.wrapping_add(GOLDEN_GAMMA)))
    })
}

/// SplitMix64 generator; cheap to construct per cell.
#[derive(Debug, Clone)]
pub struct CellRng {
    state: u64,
}

impl CellRng {
    pub fn new(parts: &[u64]) -> Self {
        CellRng {
            state: stream_key(parts),
        }
    }
}

impl RngCore for CellRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
