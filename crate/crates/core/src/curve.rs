//! Tuning curves and their preprocessing for the angle and amplitude
//! embeddings.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningCurve {
    pub neuron_id: String,
    /// Recording-volume coordinates (µm in the usual data layout).
    pub position: [f64; 3],
    /// ΔF/F₀ response per stimulus.
    pub responses: Vec<f64>,
    /// Stimulus values (Hz). Metadata only; knots are sample indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stimulus_labels: Option<Vec<f64>>,
}

impl TuningCurve {
    pub fn new(neuron_id: impl Into<String>, position: [f64; 3], responses: Vec<f64>) -> Self {
        TuningCurve {
            neuron_id: neuron_id.into(),
            position,
            responses,
            stimulus_labels: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.responses.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: self.responses.len(),
            });
        }
        if let Some(i) = self.responses.iter().position(|r| !r.is_finite()) {
            return Err(Error::NonFiniteMetric(format!(
                "neuron {} response {i} is not finite",
                self.neuron_id
            )));
        }
        if let Some(labels) = &self.stimulus_labels {
            if labels.len() != self.responses.len() {
                return Err(Error::SizeMismatch(labels.len(), self.responses.len()));
            }
            if labels
                .windows(2)
                .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
            {
                return Err(Error::NonFiniteMetric(
                    "stimulus labels must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn l1_norm(&self) -> f64 {
        self.responses.iter().map(|r| r.abs()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreparedKind {
    AngleVector,
    AmplitudeVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedCurve {
    pub kind: PreparedKind,
    pub values: Vec<f64>,
}

/// Divide by the L1 norm and scale by π.
pub fn rescale_l1_pi(curve: &TuningCurve) -> Result<PreparedCurve> {
    let l1 = curve.l1_norm();
    if l1 == 0.0 || !l1.is_finite() {
        return Err(Error::ZeroCurve);
    }
    Ok(PreparedCurve {
        kind: PreparedKind::AngleVector,
        values: curve.responses.iter().map(|r| PI * r / l1).collect(),
    })
}

pub fn next_power_of_two(s: usize) -> usize {
    s.max(1).next_power_of_two()
}

/// Divide by the L2 norm. Length must be a power of two.
pub fn normalize_l2(values: &[f64]) -> Result<PreparedCurve> {
    if values.is_empty() || !values.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(values.len()));
    }
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroCurve);
    }
    Ok(PreparedCurve {
        kind: PreparedKind::AmplitudeVector,
        values: values.iter().map(|v| v / norm).collect(),
    })
}

/// Modified Akima ("makima") interpolant over knots at `0, 1, …, s-1`.
#[derive(Debug, Clone)]
pub struct Makima {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Makima {
    pub fn new(values: &[f64]) -> Result<Makima> {
        let s = values.len();
        if s < 4 {
            return Err(Error::TooFewPoints { needed: 4, got: s });
        }
        // Secants with two extrapolated values on each side: ext[k + 2] = δ_k.
        let mut ext = vec![0.0; s + 3];
        for k in 0..s - 1 {
            ext[k + 2] = values[k + 1] - values[k];
        }
        ext[1] = 2.0 * ext[2] - ext[3];
        ext[0] = 2.0 * ext[1] - ext[2];
        ext[s + 1] = 2.0 * ext[s] - ext[s - 1];
        ext[s + 2] = 2.0 * ext[s + 1] - ext[s];

        let slopes = (0..s)
            .map(|i| {
                let (dm2, dm1, d0, d1) = (ext[i], ext[i + 1], ext[i + 2], ext[i + 3]);
                let w1 = (d1 - d0).abs() + (d1 + d0).abs() / 2.0;
                let w2 = (dm1 - dm2).abs() + (dm1 + dm2).abs() / 2.0;
                if w1 + w2 == 0.0 {
                    0.0
                } else {
                    (w1 * dm1 + w2 * d0) / (w1 + w2)
                }
            })
            .collect();
        Ok(Makima {
            values: values.to_vec(),
            slopes,
        })
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Evaluate at `x ∈ [0, s-1]`; values outside are clamped to the range.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let x = x.clamp(0.0, last as f64);
        let i = (x.floor() as usize).min(last - 1);
        let t = x - i as f64;
        if t == 0.0 {
            return self.values[i];
        }
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }
}

/// Resample onto `target_len` evenly spaced points spanning the knots,
/// endpoints included and copied exactly.
pub fn resample_makima(curve: &TuningCurve, target_len: usize) -> Result<Vec<f64>> {
    if target_len < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: target_len,
        });
    }
    let spline = Makima::new(&curve.responses)?;
    let s = curve.responses.len();
    let span = (s - 1) as f64;
    let denom = (target_len - 1) as f64;
    let mut out: Vec<f64> = (0..target_len)
        .map(|k| spline.eval(span * k as f64 / denom))
        .collect();
    out[0] = curve.responses[0];
    out[target_len - 1] = curve.responses[s - 1];
    Ok(out)
}

/// Resample to the next power of two and L2-normalize.
pub fn amplitude_prepare(curve: &TuningCurve) -> Result<PreparedCurve> {
    let target = next_power_of_two(curve.responses.len());
    let resampled = if target == curve.responses.len() {
        curve.responses.clone()
    } else {
        resample_makima(curve, target)?
    };
    normalize_l2(&resampled)
}
