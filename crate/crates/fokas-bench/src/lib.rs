//! Shared inputs for the benchmarks.

use fokas_core::{Axis, Profile, C64};

/// eps exp(-(x - 3)^2) on [0, 10] with step h.
pub fn gaussian(eps: f64, h: f64) -> Profile {
    let n = (10.0 / h).round() as usize + 1;
    Profile::from_fn(Axis::X, h, n, |x| C64::new(eps * (-(x - 3.0) * (x - 3.0)).exp(), 0.0)).expect("valid profile")
}
