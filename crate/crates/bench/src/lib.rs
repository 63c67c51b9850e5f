//! Shared inputs for the benchmarks.

use freewalk_core::{CentralState, GroupFamily};

/// Pure free orthogonal states `(N, t)` spanning small and large `N`.
pub const PURE_CASES: [(u32, f64); 4] = [(10, 6.0), (10, 8.0), (50, 40.0), (200, 150.0)];

pub fn pure_orthogonal(size: u32, t: f64) -> CentralState {
    CentralState::pure(GroupFamily::free_orthogonal(size).expect("size >= 2"), t).expect("t in range")
}

pub fn rotation_orthogonal(size: u32, theta: f64) -> CentralState {
    CentralState::rotation(GroupFamily::free_orthogonal(size).expect("size >= 2"), theta)
        .expect("valid angle")
}

pub fn symmetric_pure(size: u32, t: f64) -> CentralState {
    CentralState::pure(GroupFamily::free_symmetric(size).expect("size >= 4"), t).expect("t in range")
}
