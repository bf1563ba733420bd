//! Consecutive-ratio profiles `a_n / a_(n+1)` over the tail of a set.

use num_rational::Ratio;

use crate::error::{config, Result};
use crate::intsets::IntegerSetSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct RatioProfile {
    pub bound: u64,
    pub window: usize,
    /// The consecutive pair `(a_n, a_(n+1))` with the smallest ratio in the window.
    pub min_pair: (u64, u64),
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `1 - 10 / W`.
    pub threshold: f64,
    pub approaches_one: bool,
}

impl RatioProfile {
    /// The window minimum as an exact fraction.
    pub fn min_exact(&self) -> Ratio<u64> {
        Ratio::new(self.min_pair.0, self.min_pair.1)
    }
}

/// Ratio profile over the last `window` consecutive pairs of `spec ∩ [1, bound]`.
pub fn ratio_profile(spec: &IntegerSetSpec, bound: u64, window: usize) -> Result<RatioProfile> {
    let values = spec.enumerate(bound)?;
    ratio_profile_values(&values, bound, window)
}

/// Same as [`ratio_profile`] over an ascending list of elements `<= bound`.
pub fn ratio_profile_values(values: &[u64], bound: u64, window: usize) -> Result<RatioProfile> {
    if window == 0 {
        return config("ratio window must be >= 1");
    }
    let values = &values[..values.partition_point(|&v| v <= bound)];
    if values.len() < window + 1 {
        return config(format!(
            "ratio profile needs {} elements <= {bound}, the set has {}",
            window + 1,
            values.len()
        ));
    }
    let tail = &values[values.len() - window - 1..];
    let mut min_pair = (tail[0], tail[1]);
    let (mut max, mut sum) = (f64::NEG_INFINITY, 0.0);
    for w in tail.windows(2) {
        let r = w[0] as f64 / w[1] as f64;
        max = max.max(r);
        sum += r;
        if (w[0] as u128) * (min_pair.1 as u128) < (min_pair.0 as u128) * (w[1] as u128) {
            min_pair = (w[0], w[1]);
        }
    }
    // exact test of a / b >= 1 - 10 / W, i.e. a W >= b (W - 10)
    let w = window as i128;
    let approaches_one = (min_pair.0 as i128) * w >= (min_pair.1 as i128) * (w - 10);
    Ok(RatioProfile {
        bound,
        window,
        min_pair,
        min: min_pair.0 as f64 / min_pair.1 as f64,
        max,
        mean: sum / window as f64,
        threshold: 1.0 - 10.0 / window as f64,
        approaches_one,
    })
}
