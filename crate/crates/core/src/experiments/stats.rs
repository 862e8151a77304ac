use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `failures` out of `trials` at confidence `z`.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A Monte Carlo rate with its 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub failures: u64,
    pub trials: u64,
    pub seed: u64,
    /// No failure was seen: `upper` is the rule-of-three bound `3 / trials`.
    pub censored: bool,
}

impl Estimate {
    pub fn from_counts(failures: u64, trials: u64, seed: u64) -> Estimate {
        let value = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
        if failures == 0 {
            let upper = if trials == 0 { 1.0 } else { (3.0 / trials as f64).min(1.0) };
            return Estimate { value, lower: 0.0, upper, failures, trials, seed, censored: true };
        }
        let (lower, upper) = wilson_interval(failures, trials, Z95);
        Estimate { value, lower, upper, failures, trials, seed, censored: false }
    }

    /// Point estimate, or the upper bound when nothing was observed.
    pub fn conservative(&self) -> f64 {
        if self.censored {
            self.upper
        } else {
            self.value
        }
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// Mean, 99th percentile (nearest rank) and maximum of `samples`.
pub fn summarize(samples: &mut [f64]) -> (f64, f64, f64) {
    if samples.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let rank = ((0.99 * n as f64).ceil() as usize).clamp(1, n);
    (mean, samples[rank - 1], samples[n - 1])
}
