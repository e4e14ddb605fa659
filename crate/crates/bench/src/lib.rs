//! Fixtures shared by the benchmarks.

use specpert_core::harness::{random_instance, GapSpec, Instance, Layout};

/// A reproducible instance of dimension `n` with an interlaced spectrum.
pub fn fixture(n: usize, seed: u64) -> Instance {
    let gap = GapSpec {
        d_target: 1.0,
        component_split: n / 2,
        layout: if n >= 4 { Layout::Interlaced } else { Layout::Clustered },
    };
    random_instance(n, &gap, 0.8, seed).expect("valid fixture")
}
