//! Pairwise metrics over tuning curves and the distance matrices built from
//! them.
//!
//! Three classical baselines (Pearson correlation, Euclidean distance and
//! classical fidelity of L1-rescaled curves) sit next to three quantum
//! state fidelities obtained by simulating the full fidelity circuit:
//!
//! * `ang`: angle embedding, destructive swap test on two 9-qubit registers;
//! * `amp`: makima resampling + amplitude embedding, compute–uncompute;
//! * `amp_qft`: as `amp`, with a QFT after every load.
//!
//! Only pairs `a < b` are evaluated; the matrix is mirrored.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    build_angle_prep, build_compute_uncompute, build_mottonen_real_prep, build_swap_test,
    ComputeUncomputeOptions,
};
use crate::curve::{amplitude_prepare, rescale_l1_pi, PreparedCurve, PreparedKind, TuningCurve};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, hash_bytes};
use crate::statevec::StateVector;

pub const DEFAULT_SHOTS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Correlation,
    Euclidean,
    ClassicalFidelity,
    Ang,
    Amp,
    AmpQft,
}

impl MetricName {
    pub const ALL: [MetricName; 6] = [
        MetricName::Correlation,
        MetricName::Euclidean,
        MetricName::ClassicalFidelity,
        MetricName::Ang,
        MetricName::Amp,
        MetricName::AmpQft,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Correlation => "correlation",
            MetricName::Euclidean => "euclidean",
            MetricName::ClassicalFidelity => "classical_fidelity",
            MetricName::Ang => "ang",
            MetricName::Amp => "amp",
            MetricName::AmpQft => "amp_qft",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            MetricName::Euclidean => Orientation::Dissimilarity,
            _ => Orientation::Similarity,
        }
    }

    pub fn is_quantum(self) -> bool {
        matches!(self, MetricName::Ang | MetricName::Amp | MetricName::AmpQft)
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', '+'], "_");
        let found = match norm.as_str() {
            "fidelity" => Some(MetricName::ClassicalFidelity),
            "angle" => Some(MetricName::Ang),
            other => MetricName::ALL.into_iter().find(|m| m.as_str() == other),
        };
        found.ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Similarity,
    Dissimilarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Shots,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "analytic" => Ok(Mode::Analytic),
            "shots" => Ok(Mode::Shots),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// How a quantum fidelity is read off the simulated state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Exact expectation from the outcome probabilities.
    Analytic,
    /// Mean over `shots` seeded samples.
    Shots { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub name: MetricName,
    pub orientation: Orientation,
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
}

impl MetricSpec {
    pub fn analytic(name: MetricName) -> MetricSpec {
        MetricSpec {
            name,
            orientation: name.orientation(),
            mode: Mode::Analytic,
            shots: DEFAULT_SHOTS,
            seed: 0,
        }
    }

    pub fn with_shots(name: MetricName, shots: u64, seed: u64) -> MetricSpec {
        MetricSpec {
            mode: Mode::Shots,
            shots,
            seed,
            ..MetricSpec::analytic(name)
        }
    }

    /// Seed for pair `(a, b)`, independent of evaluation order.
    pub fn pair_seed(&self, a: usize, b: usize) -> u64 {
        derive_seed(
            self.seed,
            &[
                hash_bytes(self.name.as_str().as_bytes()),
                a as u64,
                b as u64,
            ],
        )
    }

    fn estimator(&self, a: usize, b: usize) -> Estimator {
        match self.mode {
            Mode::Analytic => Estimator::Analytic,
            Mode::Shots => Estimator::Shots {
                shots: self.shots,
                seed: self.pair_seed(a, b),
            },
        }
    }
}

/// Sample Pearson correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: a.len(),
        });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::NonFiniteMetric(
            "zero-variance input to Pearson".into(),
        ));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

fn l1_rescaled(curve: &TuningCurve) -> Result<Vec<f64>> {
    let l1 = curve.l1_norm();
    if l1 == 0.0 || !l1.is_finite() {
        return Err(Error::ZeroCurve);
    }
    Ok(curve.responses.iter().map(|r| r / l1).collect())
}

/// `‖a/‖a‖₁ − b/‖b‖₁‖₂`.
pub fn euclidean_rescaled(a: &TuningCurve, b: &TuningCurve) -> Result<f64> {
    if a.responses.len() != b.responses.len() {
        return Err(Error::SizeMismatch(a.responses.len(), b.responses.len()));
    }
    let (pa, pb) = (l1_rescaled(a)?, l1_rescaled(b)?);
    Ok(pa
        .iter()
        .zip(&pb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Negatives clamped to zero, then L1-normalized.
fn probability_vector(curve: &TuningCurve) -> Result<Vec<f64>> {
    let clamped: Vec<f64> = curve.responses.iter().map(|r| r.max(0.0)).collect();
    let mass: f64 = clamped.iter().sum();
    if mass <= 0.0 || !mass.is_finite() {
        return Err(Error::NonFiniteMetric(format!(
            "neuron {} has no positive response",
            curve.neuron_id
        )));
    }
    Ok(clamped.into_iter().map(|v| v / mass).collect())
}

/// Bhattacharyya-squared fidelity `(Σ √(pᵢ qᵢ))²` of the clamped curves.
pub fn classical_fidelity(a: &TuningCurve, b: &TuningCurve) -> Result<f64> {
    if a.responses.len() != b.responses.len() {
        return Err(Error::SizeMismatch(a.responses.len(), b.responses.len()));
    }
    let (p, q) = (probability_vector(a)?, probability_vector(b)?);
    let bc: f64 = p.iter().zip(&q).map(|(x, y)| (x * y).sqrt()).sum();
    Ok((bc * bc).min(1.0))
}

fn expect_kind(c: &PreparedCurve, kind: PreparedKind) -> Result<()> {
    if c.kind != kind {
        return Err(Error::KindMismatch {
            expected: match kind {
                PreparedKind::AngleVector => "angle_vector",
                PreparedKind::AmplitudeVector => "amplitude_vector",
            },
        });
    }
    Ok(())
}

/// Simulated output state of the angle-embedding swap test.
pub fn swap_test_state(a: &PreparedCurve, b: &PreparedCurve) -> Result<StateVector> {
    expect_kind(a, PreparedKind::AngleVector)?;
    expect_kind(b, PreparedKind::AngleVector)?;
    if a.values.len() != b.values.len() {
        return Err(Error::SizeMismatch(a.values.len(), b.values.len()));
    }
    let circuit = build_swap_test(
        &build_angle_prep(&a.values, 0)?,
        &build_angle_prep(&b.values, 0)?,
    )?;
    let mut state = StateVector::zero(circuit.num_wires)?;
    state.apply_circuit(&circuit)?;
    Ok(state)
}

/// `(−1)^(s·t)` for the outcome `index` of a `2n`-qubit swap test, where `s`
/// are the first `n` bits and `t` the next `n`.
pub fn swap_test_parity(index: usize, n: usize) -> f64 {
    let s = index & ((1 << n) - 1);
    let t = index >> n;
    if (s & t).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Swap-test estimate of `|⟨a|b⟩|²` for two angle-embedded curves.
///
/// Shot-mode estimates can fall below zero and are returned unclipped.
pub fn quantum_fidelity_swaptest(
    a: &PreparedCurve,
    b: &PreparedCurve,
    estimator: Estimator,
) -> Result<f64> {
    let n = a.values.len();
    let state = swap_test_state(a, b)?;
    match estimator {
        Estimator::Analytic => Ok(state
            .probabilities()
            .iter()
            .enumerate()
            .map(|(i, p)| p * swap_test_parity(i, n))
            .sum()),
        Estimator::Shots { shots, seed } => {
            let counts = state.sample_indices(shots, seed)?;
            let total: f64 = counts
                .iter()
                .map(|&(i, c)| c as f64 * swap_test_parity(i, n))
                .sum();
            Ok(total / shots as f64)
        }
    }
}

/// All-zeros probability of the compute–uncompute circuit built with `opts`.
pub fn compute_uncompute_fidelity(
    a: &PreparedCurve,
    b: &PreparedCurve,
    opts: ComputeUncomputeOptions,
    estimator: Estimator,
) -> Result<f64> {
    expect_kind(a, PreparedKind::AmplitudeVector)?;
    expect_kind(b, PreparedKind::AmplitudeVector)?;
    if a.values.len() != b.values.len() {
        return Err(Error::SizeMismatch(a.values.len(), b.values.len()));
    }
    let circuit = build_compute_uncompute(
        &build_mottonen_real_prep(&a.values)?,
        &build_mottonen_real_prep(&b.values)?,
        opts,
    )?;
    let mut state = StateVector::zero(circuit.num_wires)?;
    state.apply_circuit(&circuit)?;
    match estimator {
        Estimator::Analytic => Ok(state.amplitudes()[0].norm_sqr()),
        Estimator::Shots { shots, seed } => {
            let counts = state.sample_indices(shots, seed)?;
            let zeros = counts.iter().find(|&&(i, _)| i == 0).map_or(0, |&(_, c)| c);
            Ok(zeros as f64 / shots as f64)
        }
    }
}

/// Compute–uncompute fidelity with the default doubled-load layout; `qft`
/// adds a QFT after each load.
pub fn quantum_fidelity_compute_uncompute(
    a: &PreparedCurve,
    b: &PreparedCurve,
    qft: bool,
    estimator: Estimator,
) -> Result<f64> {
    compute_uncompute_fidelity(a, b, ComputeUncomputeOptions::with_qft(qft), estimator)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub metric: MetricSpec,
    pub size: usize,
    pub neuron_ids: Vec<String>,
    /// Row-major `size x size`. Diagonal is 0 for dissimilarities and 1 for
    /// similarities; it never enters any statistic.
    pub values: Vec<Vec<f64>>,
    /// Number of pair evaluations performed to fill the matrix.
    #[serde(default)]
    pub evaluations: usize,
}

enum Prepared {
    Raw,
    Quantum(Vec<PreparedCurve>),
}

fn prepare_all(curves: &[TuningCurve], name: MetricName) -> Result<Prepared> {
    let prep: fn(&TuningCurve) -> Result<PreparedCurve> = match name {
        MetricName::Ang => rescale_l1_pi,
        MetricName::Amp | MetricName::AmpQft => amplitude_prepare,
        _ => return Ok(Prepared::Raw),
    };
    curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            prep(c).map_err(|e| Error::Pair {
                a: i,
                b: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(Prepared::Quantum)
}

/// Evaluate one metric on one pair of curves.
pub fn evaluate_pair(spec: &MetricSpec, curves: &[TuningCurve], a: usize, b: usize) -> Result<f64> {
    let prepared = prepare_all(&[curves[a].clone(), curves[b].clone()], spec.name)?;
    eval_prepared(spec, curves, &prepared, (a, b), (0, 1))
}

fn eval_prepared(
    spec: &MetricSpec,
    curves: &[TuningCurve],
    prepared: &Prepared,
    (a, b): (usize, usize),
    (pa, pb): (usize, usize),
) -> Result<f64> {
    let (ca, cb) = (&curves[a], &curves[b]);
    let est = spec.estimator(a, b);
    match (spec.name, prepared) {
        (MetricName::Correlation, _) => pearson(&ca.responses, &cb.responses),
        (MetricName::Euclidean, _) => euclidean_rescaled(ca, cb),
        (MetricName::ClassicalFidelity, _) => classical_fidelity(ca, cb),
        (MetricName::Ang, Prepared::Quantum(p)) => quantum_fidelity_swaptest(&p[pa], &p[pb], est),
        (MetricName::Amp, Prepared::Quantum(p)) => {
            quantum_fidelity_compute_uncompute(&p[pa], &p[pb], false, est)
        }
        (MetricName::AmpQft, Prepared::Quantum(p)) => {
            quantum_fidelity_compute_uncompute(&p[pa], &p[pb], true, est)
        }
        _ => unreachable!("quantum metrics are always prepared"),
    }
}

/// Evaluate `spec` on every pair `a < b` (in parallel on the current rayon
/// pool) and mirror the result.
pub fn build_distance_matrix(curves: &[TuningCurve], spec: &MetricSpec) -> Result<DistanceMatrix> {
    let n = curves.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let len = curves[0].responses.len();
    if let Some(bad) = curves.iter().find(|c| c.responses.len() != len) {
        return Err(Error::SizeMismatch(len, bad.responses.len()));
    }
    if spec.mode == Mode::Shots && spec.shots == 0 {
        return Err(Error::ZeroShots);
    }
    let prepared = prepare_all(curves, spec.name)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let evaluations = AtomicUsize::new(0);
    let results: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            evaluations.fetch_add(1, Ordering::Relaxed);
            eval_prepared(spec, curves, &prepared, (a, b), (a, b))
                .and_then(|v| {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::NonFiniteMetric(format!("value {v}")))
                    }
                })
                .map_err(|e| Error::Pair {
                    a,
                    b,
                    source: Box::new(e),
                })
        })
        .collect();
    let diag = match spec.orientation {
        Orientation::Dissimilarity => 0.0,
        Orientation::Similarity => 1.0,
    };
    let mut values = vec![vec![diag; n]; n];
    for (&(a, b), r) in pairs.iter().zip(results) {
        let v = r?;
        values[a][b] = v;
        values[b][a] = v;
    }
    Ok(DistanceMatrix {
        metric: spec.clone(),
        size: n,
        neuron_ids: curves.iter().map(|c| c.neuron_id.clone()).collect(),
        values,
        evaluations: evaluations.into_inner(),
    })
}

/// Similarities become distances `1 − s`; dissimilarities pass through.
pub fn to_canonical_distance(m: &DistanceMatrix) -> DistanceMatrix {
    match m.metric.orientation {
        Orientation::Dissimilarity => m.clone(),
        Orientation::Similarity => {
            let mut out = m.clone();
            for (i, row) in out.values.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { 0.0 } else { 1.0 - *v };
                }
            }
            out.metric.orientation = Orientation::Dissimilarity;
            out
        }
    }
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Upper triangle (`i < j`) in row-major order.
    pub fn condensed(&self) -> Vec<f64> {
        (0..self.size)
            .flat_map(|i| (i + 1..self.size).map(move |j| (i, j)))
            .map(|(i, j)| self.values[i][j])
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.size || self.neuron_ids.len() != self.size {
            return Err(Error::SizeMismatch(self.values.len(), self.size));
        }
        for (i, row) in self.values.iter().enumerate() {
            if row.len() != self.size {
                return Err(Error::SizeMismatch(row.len(), self.size));
            }
            for (j, v) in row.iter().enumerate() {
                if i != j && !v.is_finite() {
                    return Err(Error::NonFiniteEntry(i, j));
                }
                if *v != self.values[j][i] {
                    return Err(Error::NonFiniteMetric(format!(
                        "asymmetric entry ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Header row of neuron ids, then `size` rows of shortest round-trip
    /// decimals.
    pub fn to_csv(&self) -> String {
        let mut out = self.neuron_ids.join(",");
        out.push('\n');
        for row in &self.values {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, metric: MetricSpec) -> Result<DistanceMatrix> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::EmptyInput("matrix csv"))?;
        let neuron_ids: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let size = neuron_ids.len();
        let mut values = Vec::with_capacity(size);
        for (idx, line) in lines {
            let row = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: e.to_string(),
                })?;
            if row.len() != size {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {size} values, got {}", row.len()),
                });
            }
            values.push(row);
        }
        let m = DistanceMatrix {
            metric,
            size,
            neuron_ids,
            values,
            evaluations: 0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<DistanceMatrix> {
        let m: DistanceMatrix = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        m.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn curve(id: &str, r: Vec<f64>) -> TuningCurve {
        TuningCurve::new(id, [0.0; 3], r)
    }

    #[test]
    fn pearson_examples() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(pearson(&a, &a).unwrap(), 1.0);
        assert_eq!(pearson(&a, &[-1.0, -2.0, -3.0]).unwrap(), -1.0);
        assert!((pearson(&a, &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            pearson(&a, &[2.0; 3]),
            Err(Error::NonFiniteMetric(_))
        ));
    }

    #[test]
    fn euclidean_examples() {
        let a = curve("a", vec![1.0, 2.0, 3.0]);
        assert_eq!(euclidean_rescaled(&a, &a).unwrap(), 0.0);
        let e1 = curve("e1", vec![1.0, 0.0, 0.0]);
        let e2 = curve("e2", vec![0.0, 1.0, 0.0]);
        assert!((euclidean_rescaled(&e1, &e2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            euclidean_rescaled(&a, &curve("z", vec![0.0; 3])),
            Err(Error::ZeroCurve)
        );
    }

    #[test]
    fn classical_fidelity_examples() {
        let p = curve("p", vec![0.5, 0.5]);
        assert!((classical_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        let q = curve("q", vec![1.0, 0.0]);
        assert!((classical_fidelity(&p, &q).unwrap() - 0.5).abs() < 1e-15);
        let r = curve("r", vec![0.0, 1.0]);
        assert_eq!(classical_fidelity(&q, &r).unwrap(), 0.0);
        let neg = curve("n", vec![-1.0, 0.0]);
        assert!(classical_fidelity(&p, &neg).is_err());
        // Negative entries are clamped rather than rejected.
        let mixed = curve("m", vec![1.0, -3.0]);
        assert!((classical_fidelity(&q, &mixed).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swap_test_identical_and_orthogonal() {
        let a = PreparedCurve {
            kind: PreparedKind::AngleVector,
            values: vec![0.3, 1.1, 2.0],
        };
        let f = quantum_fidelity_swaptest(&a, &a, Estimator::Analytic).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        let mut b = a.clone();
        b.values[1] += PI;
        let f = quantum_fidelity_swaptest(&a, &b, Estimator::Analytic).unwrap();
        assert!(f.abs() < 1e-12);
    }

    #[test]
    fn kind_mismatch() {
        let a = PreparedCurve {
            kind: PreparedKind::AngleVector,
            values: vec![0.5, 0.5],
        };
        let b = PreparedCurve {
            kind: PreparedKind::AmplitudeVector,
            values: vec![0.6, 0.8],
        };
        assert!(matches!(
            quantum_fidelity_swaptest(&a, &b, Estimator::Analytic),
            Err(Error::KindMismatch { .. })
        ));
        assert!(matches!(
            quantum_fidelity_compute_uncompute(&a, &b, false, Estimator::Analytic),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn matrix_of_identical_curves() {
        let c = vec![
            curve("a", vec![0.1, 0.5, 0.2, 0.9]),
            curve("b", vec![0.1, 0.5, 0.2, 0.9]),
        ];
        let m = build_distance_matrix(&c, &MetricSpec::analytic(MetricName::Ang)).unwrap();
        assert!((m.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(m.evaluations, 1);
    }

    #[test]
    fn pair_count() {
        let curves: Vec<TuningCurve> = (0..7)
            .map(|i| curve(&format!("n{i}"), vec![1.0 + i as f64, 2.0, 0.5 * i as f64]))
            .collect();
        let m =
            build_distance_matrix(&curves, &MetricSpec::analytic(MetricName::Euclidean)).unwrap();
        assert_eq!(m.evaluations, 21);
        m.validate().unwrap();
    }

    #[test]
    fn pair_errors_carry_indices() {
        let curves = vec![
            curve("a", vec![1.0, 2.0, 3.0]),
            curve("b", vec![1.0, 3.0, 2.0]),
            curve("c", vec![4.0, 4.0, 4.0]),
        ];
        let err = build_distance_matrix(&curves, &MetricSpec::analytic(MetricName::Correlation))
            .unwrap_err();
        match err {
            Error::Pair { a, b, .. } => assert_eq!((a, b), (0, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn canonical_distance_examples() {
        let mut m = DistanceMatrix {
            metric: MetricSpec::analytic(MetricName::Correlation),
            size: 2,
            neuron_ids: vec!["a".into(), "b".into()],
            values: vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            evaluations: 1,
        };
        let d = to_canonical_distance(&m);
        assert_eq!(d.values, vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
        assert_eq!(d.metric.orientation, Orientation::Dissimilarity);

        m.metric = MetricSpec::analytic(MetricName::ClassicalFidelity);
        m.values = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(to_canonical_distance(&m).values[0][1], 0.0);

        m.metric = MetricSpec::analytic(MetricName::Euclidean);
        m.values = vec![vec![0.0, 0.3], vec![0.3, 0.0]];
        assert_eq!(to_canonical_distance(&m), m);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let m = DistanceMatrix {
            metric: MetricSpec::analytic(MetricName::Euclidean),
            size: 2,
            neuron_ids: vec!["a".into(), "b".into()],
            values: vec![vec![0.0, 0.1 + 0.2], vec![0.1 + 0.2, 0.0]],
            evaluations: 1,
        };
        let back = DistanceMatrix::from_csv(&m.to_csv(), m.metric.clone()).unwrap();
        assert_eq!(back.values, m.values);
        let back = DistanceMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn metric_names_parse() {
        assert_eq!("amp+qft".parse::<MetricName>().unwrap(), MetricName::AmpQft);
        assert_eq!(
            "Fidelity".parse::<MetricName>().unwrap(),
            MetricName::ClassicalFidelity
        );
        assert!("cosine".parse::<MetricName>().is_err());
        for m in MetricName::ALL {
            assert_eq!(m.as_str().parse::<MetricName>().unwrap(), m);
        }
    }
}
