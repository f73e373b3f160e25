//! Seeded synthetic tuning curves shaped like a small imaging session.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use qfnet::rng::{derive_seed, rng_from_seed};
use qfnet::TuningCurve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub neurons: usize,
    pub stimuli: usize,
    /// Tuning width in stimulus-index units.
    pub sigma: f64,
    pub amplitude: f64,
    /// Standard deviation of additive Gaussian noise.
    pub noise: f64,
    /// Positions are uniform in `[0, extent)` per axis.
    pub box_extent: [f64; 3],
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            neurons: 76,
            stimuli: 9,
            sigma: 1.5,
            amplitude: 1.0,
            noise: 0.05,
            box_extent: [500.0, 500.0, 100.0],
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.neurons < 2 {
            return Err(format!("need at least 2 neurons, got {}", self.neurons));
        }
        if self.stimuli < 2 {
            return Err(format!("need at least 2 stimuli, got {}", self.stimuli));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(format!(
                "sigma must be finite and non-negative, got {}",
                self.sigma
            ));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            ));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(format!(
                "noise must be finite and non-negative, got {}",
                self.noise
            ));
        }
        if self
            .box_extent
            .iter()
            .any(|e| !(*e >= 0.0 && e.is_finite()))
        {
            return Err("box extents must be finite and non-negative".into());
        }
        Ok(())
    }
}

/// Gaussian bump with its largest sample pinned at `amplitude`, so narrow
/// widths give one-hot curves instead of underflowing to zero.
fn bump(stimuli: usize, mu: f64, sigma: f64, amplitude: f64) -> Vec<f64> {
    let sq: Vec<f64> = (0..stimuli).map(|k| (k as f64 - mu).powi(2)).collect();
    let nearest = sq.iter().copied().fold(f64::INFINITY, f64::min);
    if sigma == 0.0 {
        let peak = sq.iter().position(|&d| d == nearest).unwrap_or(0);
        return (0..stimuli)
            .map(|k| if k == peak { amplitude } else { 0.0 })
            .collect();
    }
    sq.iter()
        .map(|d| amplitude * (-(d - nearest) / (2.0 * sigma * sigma)).exp())
        .collect()
}

/// Neuron `i` draws from its own stream, so the output for one neuron does
/// not depend on how many others are generated.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Vec<TuningCurve> {
    (0..spec.neurons)
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(spec.seed, &[i as u64]));
            let mu = rng.random_range(0.0..=(spec.stimuli - 1) as f64);
            let position = spec.box_extent.map(|e| {
                if e > 0.0 {
                    rng.random_range(0.0..e)
                } else {
                    0.0
                }
            });
            let clean = bump(spec.stimuli, mu, spec.sigma, spec.amplitude);
            let responses = if spec.noise > 0.0 {
                let normal = Normal::new(0.0, spec.noise).expect("validated noise scale");
                loop {
                    let noisy: Vec<f64> =
                        clean.iter().map(|v| v + normal.sample(&mut rng)).collect();
                    if noisy.iter().any(|v| *v > 0.0) {
                        break noisy;
                    }
                }
            } else {
                clean
            };
            TuningCurve::new(format!("n{i:03}"), position, responses)
        })
        .collect()
}
