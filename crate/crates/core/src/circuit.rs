//! Circuit IR: builders for the embedding and fidelity circuits, inversion,
//! gate accounting, and a line-oriented text format.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_wires: usize,
    pub gates: Vec<Gate>,
    pub measured_wires: Vec<usize>,
}

impl Circuit {
    pub fn new(num_wires: usize) -> Circuit {
        Circuit {
            num_wires,
            gates: Vec::new(),
            measured_wires: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_wires)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Append `other`, shifting its wires by `offset`. Grows `num_wires` as needed.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) {
        self.num_wires = self.num_wires.max(other.num_wires + offset);
        self.gates.extend(other.gates.iter().map(|g| Gate {
            kind: g.kind,
            params: g.params.clone(),
            wires: g.wires.iter().map(|w| w + offset).collect(),
        }));
    }

    pub fn append(&mut self, other: &Circuit) {
        self.append_shifted(other, 0);
    }

    pub fn measure_all(mut self) -> Circuit {
        self.measured_wires = (0..self.num_wires).collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.gates
            .iter()
            .try_for_each(|g| g.validate(self.num_wires))
    }

    pub fn census(&self) -> GateCensus {
        count_gates(self)
    }

    /// Serialize one gate per line as `KIND wire[,wire] [angle]`, preceded by
    /// a `# wires N` header. Angles use the shortest round-trip decimal form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# wires {}", self.num_wires).unwrap();
        for g in &self.gates {
            writeln!(out, "{g}").unwrap();
        }
        out
    }

    /// Parse the text form. Blank lines and `#` comments are skipped; a
    /// `# wires N` comment fixes the wire count, otherwise it is inferred
    /// from the largest wire index.
    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut declared: Option<usize> = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let line_no = lineno + 1;
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let mut parts = comment.split_whitespace();
                if parts.next() == Some("wires") {
                    let n = parts
                        .next()
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| perr("bad wires header".into()))?;
                    declared = Some(n);
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let kind_name = parts.next().unwrap();
            let kind = GateKind::from_name(&kind_name.to_ascii_uppercase())
                .ok_or_else(|| perr(format!("unknown gate kind {kind_name:?}")))?;
            let wires = parts
                .next()
                .ok_or_else(|| perr("missing wires".into()))?
                .split(',')
                .map(|w| w.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| perr(format!("bad wire index: {e}")))?;
            let params = parts
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| perr(format!("bad angle: {e}")))?;
            let gate = Gate::new(kind, wires, params).map_err(|e| perr(e.to_string()))?;
            gates.push((line_no, gate));
        }
        let inferred = gates
            .iter()
            .flat_map(|(_, g)| g.wires.iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        let num_wires = declared.unwrap_or(inferred);
        let mut c = Circuit::new(num_wires);
        for (line, g) in gates {
            c.push(g).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(c)
    }
}

/// Gate accounting for a circuit.
///
/// `per_kind` is keyed by the exact gate kind. [`GateCensus::reported`] folds
/// controlled-phase gates into the `CZ` bucket, which is how published gate
/// tables usually list the QFT's controlled rotations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCensus {
    pub total_gates: usize,
    pub per_kind: BTreeMap<GateKind, usize>,
    pub two_qubit_gates: usize,
    pub depth: usize,
}

impl GateCensus {
    pub fn count(&self, kind: GateKind) -> usize {
        self.per_kind.get(&kind).copied().unwrap_or(0)
    }

    pub fn reported(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for (&k, &n) in &self.per_kind {
            let bucket = if k == GateKind::CP { "CZ" } else { k.name() };
            *out.entry(bucket.to_string()).or_insert(0) += n;
        }
        out
    }
}

/// Greedy as-soon-as-possible layer index (1-based) of every gate.
pub fn asap_layers(circuit: &Circuit) -> Vec<usize> {
    let mut frontier = vec![0usize; circuit.num_wires];
    circuit
        .gates
        .iter()
        .map(|g| {
            let layer = g.wires.iter().map(|&w| frontier[w]).max().unwrap_or(0) + 1;
            for &w in &g.wires {
                frontier[w] = layer;
            }
            layer
        })
        .collect()
}

pub fn count_gates(circuit: &Circuit) -> GateCensus {
    let mut census = GateCensus::default();
    for g in &circuit.gates {
        *census.per_kind.entry(g.kind).or_insert(0) += 1;
        if g.wires.len() == 2 {
            census.two_qubit_gates += 1;
        }
    }
    census.total_gates = circuit.gates.len();
    census.depth = asap_layers(circuit).into_iter().max().unwrap_or(0);
    census
}

/// One layer of RX rotations, angle `i` on wire `offset_wire + i`.
pub fn build_angle_prep(angles: &[f64], offset_wire: usize) -> Result<Circuit> {
    if angles.is_empty() {
        return Err(Error::EmptyInput("angle vector"));
    }
    let mut c = Circuit::new(offset_wire + angles.len());
    c.gates = angles
        .iter()
        .enumerate()
        .map(|(i, &theta)| Gate::rx(offset_wire + i, theta))
        .collect();
    Ok(c)
}

/// Real-amplitude state preparation from uniformly controlled RY rotations.
///
/// Level `k` rotates qubit `n-1-k` conditioned on the `k` more significant
/// qubits. Each uniformly controlled rotation is expanded in Gray-code order
/// into `2^k` RY gates interleaved with `2^k` CNOTs (none for `k = 0`), so
/// four qubits cost exactly 15 RY and 14 CNOT. The leaf level uses signed
/// amplitudes, so the prepared state matches the input with phase +1.
pub fn build_mottonen_real_prep(amplitudes: &[f64]) -> Result<Circuit> {
    let len = amplitudes.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let n = len.trailing_zeros() as usize;
    let mut circuit = Circuit::new(n);
    for level in 0..n {
        let target = n - 1 - level;
        let alphas = level_angles(amplitudes, n, level);
        let controls: Vec<usize> = (0..level).map(|b| n - level + b).collect();
        push_uniformly_controlled_ry(&mut circuit, &alphas, &controls, target);
    }
    Ok(circuit)
}

/// Rotation angle for every control pattern `j` (the top `level` index bits)
/// at tree level `level`.
fn level_angles(amplitudes: &[f64], n: usize, level: usize) -> Vec<f64> {
    let target = n - 1 - level;
    let half = 1usize << target;
    (0..1usize << level)
        .map(|j| {
            let base = j << (target + 1);
            if target == 0 {
                2.0 * amplitudes[base + 1].atan2(amplitudes[base])
            } else {
                let sq = |range: std::ops::Range<usize>| {
                    amplitudes[range].iter().map(|a| a * a).sum::<f64>().sqrt()
                };
                let left = sq(base..base + half);
                let right = sq(base + half..base + 2 * half);
                if left == 0.0 && right == 0.0 {
                    0.0
                } else {
                    2.0 * right.atan2(left)
                }
            }
        })
        .collect()
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Append the Gray-code expansion of a uniformly controlled RY. Bit `b` of a
/// control pattern corresponds to `controls[b]`.
fn push_uniformly_controlled_ry(
    circuit: &mut Circuit,
    alphas: &[f64],
    controls: &[usize],
    target: usize,
) {
    let k = controls.len();
    let count = 1usize << k;
    if k == 0 {
        circuit.gates.push(Gate::ry(target, alphas[0]));
        return;
    }
    let scale = 1.0 / count as f64;
    for i in 0..count {
        let g = gray(i);
        let theta: f64 = alphas
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                if (j & g).count_ones().is_multiple_of(2) {
                    a
                } else {
                    -a
                }
            })
            .sum::<f64>()
            * scale;
        circuit.gates.push(Gate::ry(target, theta));
        let changed = if i + 1 == count {
            k - 1
        } else {
            (g ^ gray(i + 1)).trailing_zeros() as usize
        };
        circuit.gates.push(Gate::cnot(controls[changed], target));
    }
}

/// Quantum Fourier transform on `n` wires (qubit 0 least significant),
/// including the final wire-reversal swaps.
pub fn build_qft(n: usize) -> Result<Circuit> {
    if n < 1 {
        return Err(Error::QubitCount(n));
    }
    let mut c = Circuit::new(n);
    for j in (0..n).rev() {
        c.gates.push(Gate::h(j));
        for k in (0..j).rev() {
            c.gates.push(Gate::cp(k, j, PI / (1u64 << (j - k)) as f64));
        }
    }
    for i in 0..n / 2 {
        c.gates.push(Gate::swap(i, n - 1 - i));
    }
    Ok(c)
}

fn invert_gate(g: &Gate) -> Vec<Gate> {
    match g.kind {
        GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CP => vec![Gate {
            kind: g.kind,
            params: g.params.iter().map(|p| -p).collect(),
            wires: g.wires.clone(),
        }],
        // SX^4 = I, so SX^-1 = SX^3 exactly and stays in the native set.
        GateKind::SX => vec![g.clone(), g.clone(), g.clone()],
        _ => vec![g.clone()],
    }
}

/// Reverse the gate order and invert every gate.
pub fn invert(circuit: &Circuit) -> Circuit {
    Circuit {
        num_wires: circuit.num_wires,
        gates: circuit.gates.iter().rev().flat_map(invert_gate).collect(),
        measured_wires: circuit.measured_wires.clone(),
    }
}

/// Destructive (Bell-basis) swap test: prep_a on wires `0..n`, prep_b on
/// `n..2n`, CNOT from each `i` to `n+i`, then H on the first register.
pub fn build_swap_test(prep_a: &Circuit, prep_b: &Circuit) -> Result<Circuit> {
    if prep_a.num_wires != prep_b.num_wires {
        return Err(Error::SizeMismatch(prep_a.num_wires, prep_b.num_wires));
    }
    let n = prep_a.num_wires;
    if n == 0 {
        return Err(Error::EmptyInput("preparation circuit"));
    }
    let mut c = Circuit::new(2 * n);
    c.append(prep_a);
    c.append_shifted(prep_b, n);
    for i in 0..n {
        c.gates.push(Gate::cnot(i, n + i));
    }
    for i in 0..n {
        c.gates.push(Gate::h(i));
    }
    Ok(c.measure_all())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QftMode {
    None,
    /// One QFT after every load of the first state, none on the unloads.
    OnLoad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeUncomputeOptions {
    pub repetitions: usize,
    pub hadamard_layers: bool,
    pub qft_mode: QftMode,
}

impl Default for ComputeUncomputeOptions {
    fn default() -> Self {
        ComputeUncomputeOptions {
            repetitions: 2,
            hadamard_layers: true,
            qft_mode: QftMode::None,
        }
    }
}

impl ComputeUncomputeOptions {
    pub fn with_qft(qft: bool) -> Self {
        ComputeUncomputeOptions {
            qft_mode: if qft { QftMode::OnLoad } else { QftMode::None },
            ..Default::default()
        }
    }

    pub fn textbook() -> Self {
        ComputeUncomputeOptions {
            repetitions: 1,
            hadamard_layers: false,
            qft_mode: QftMode::None,
        }
    }
}

/// `reps x [H layer; prep_a; QFT?]` followed by `reps x [prep_b^-1; H layer]`.
pub fn build_compute_uncompute(
    prep_a: &Circuit,
    prep_b: &Circuit,
    opts: ComputeUncomputeOptions,
) -> Result<Circuit> {
    if prep_a.num_wires != prep_b.num_wires {
        return Err(Error::SizeMismatch(prep_a.num_wires, prep_b.num_wires));
    }
    if opts.repetitions < 1 {
        return Err(Error::Repetitions);
    }
    let n = prep_a.num_wires;
    let h_layer = |c: &mut Circuit| {
        if opts.hadamard_layers {
            c.gates.extend((0..n).map(Gate::h));
        }
    };
    let qft = match opts.qft_mode {
        QftMode::OnLoad => Some(build_qft(n)?),
        QftMode::None => None,
    };
    let unload = invert(prep_b);
    let mut c = Circuit::new(n);
    for _ in 0..opts.repetitions {
        h_layer(&mut c);
        c.append(prep_a);
        if let Some(q) = &qft {
            c.append(q);
        }
    }
    for _ in 0..opts.repetitions {
        c.append(&unload);
        h_layer(&mut c);
    }
    Ok(c.measure_all())
}
