//! Fixtures shared by the benchmarks.

use heinz_core::suite::{seeded_instance, DEFAULT_SPREAD};
use heinz_core::{HeinzProfile, NormKind};

/// Seeded profile of dimension `n` under the trace norm.
pub fn profile(n: usize, seed: u64) -> HeinzProfile {
    let inst = seeded_instance(n, seed, NormKind::Trace, DEFAULT_SPREAD).expect("seeded instance");
    HeinzProfile::new(inst)
}

pub const DIMS: [usize; 3] = [2, 4, 8];
