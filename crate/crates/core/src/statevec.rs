//! Dense statevector simulation.
//!
//! Amplitudes are stored in a flat array indexed by the computational basis
//! integer, with qubit 0 as the least-significant bit. Gates are applied in
//! place by iterating over the index pairs (or quadruples) they mix; no
//! matrix is ever built except in [`circuit_unitary`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const MAX_QUBITS: usize = 20;
pub const MAX_UNITARY_QUBITS: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    H,
    X,
    Y,
    SX,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    CP,
    SWAP,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::SX,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::CNOT,
        GateKind::CZ,
        GateKind::CP,
        GateKind::SWAP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::SX => "SX",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CNOT => "CNOT",
            GateKind::CZ => "CZ",
            GateKind::CP => "CP",
            GateKind::SWAP => "SWAP",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn num_wires(self) -> usize {
        match self {
            GateKind::CNOT | GateKind::CZ | GateKind::CP | GateKind::SWAP => 2,
            _ => 1,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CP => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate application. For CNOT the wires are `[control, target]`; for
/// CP the first wire is the control (the gate is symmetric anyway).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub params: Vec<f64>,
    pub wires: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, wires: Vec<usize>, params: Vec<f64>) -> Result<Gate> {
        if wires.len() != kind.num_wires() {
            return Err(Error::WireArity {
                kind: kind.name(),
                expected: kind.num_wires(),
                got: wires.len(),
            });
        }
        if params.len() != kind.num_params() {
            return Err(Error::ParamArity {
                kind: kind.name(),
                expected: kind.num_params(),
                got: params.len(),
            });
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::InvalidWires {
                wires,
                num_qubits: 0,
            });
        }
        Ok(Gate {
            kind,
            params,
            wires,
        })
    }

    fn fixed(kind: GateKind, wires: Vec<usize>, params: Vec<f64>) -> Gate {
        Gate {
            kind,
            params,
            wires,
        }
    }

    pub fn h(q: usize) -> Gate {
        Gate::fixed(GateKind::H, vec![q], vec![])
    }
    pub fn x(q: usize) -> Gate {
        Gate::fixed(GateKind::X, vec![q], vec![])
    }
    pub fn y(q: usize) -> Gate {
        Gate::fixed(GateKind::Y, vec![q], vec![])
    }
    pub fn sx(q: usize) -> Gate {
        Gate::fixed(GateKind::SX, vec![q], vec![])
    }
    pub fn rx(q: usize, theta: f64) -> Gate {
        Gate::fixed(GateKind::RX, vec![q], vec![theta])
    }
    pub fn ry(q: usize, theta: f64) -> Gate {
        Gate::fixed(GateKind::RY, vec![q], vec![theta])
    }
    pub fn rz(q: usize, theta: f64) -> Gate {
        Gate::fixed(GateKind::RZ, vec![q], vec![theta])
    }
    pub fn cnot(control: usize, target: usize) -> Gate {
        assert_ne!(control, target, "CNOT wires must differ");
        Gate::fixed(GateKind::CNOT, vec![control, target], vec![])
    }
    pub fn cz(a: usize, b: usize) -> Gate {
        assert_ne!(a, b, "CZ wires must differ");
        Gate::fixed(GateKind::CZ, vec![a, b], vec![])
    }
    pub fn cp(control: usize, target: usize, theta: f64) -> Gate {
        assert_ne!(control, target, "CP wires must differ");
        Gate::fixed(GateKind::CP, vec![control, target], vec![theta])
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        assert_ne!(a, b, "SWAP wires must differ");
        Gate::fixed(GateKind::SWAP, vec![a, b], vec![])
    }

    pub fn angle(&self) -> Option<f64> {
        self.params.first().copied()
    }

    /// Check arity and that every wire is distinct and below `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.wires.len() != self.kind.num_wires() {
            return Err(Error::WireArity {
                kind: self.kind.name(),
                expected: self.kind.num_wires(),
                got: self.wires.len(),
            });
        }
        if self.params.len() != self.kind.num_params() {
            return Err(Error::ParamArity {
                kind: self.kind.name(),
                expected: self.kind.num_params(),
                got: self.params.len(),
            });
        }
        let distinct = self.wires.len() < 2 || self.wires[0] != self.wires[1];
        if !distinct || self.wires.iter().any(|&w| w >= num_qubits) {
            return Err(Error::InvalidWires {
                wires: self.wires.clone(),
                num_qubits,
            });
        }
        Ok(())
    }

    /// 2x2 matrix of a single-qubit gate, row-major `[[a, b], [c, d]]`.
    pub fn matrix_1q(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = Complex64::new;
        let m = match self.kind {
            GateKind::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
            GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            GateKind::RX => {
                let (s, co) = (self.params[0] / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            GateKind::RY => {
                let (s, co) = (self.params[0] / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            GateKind::RZ => {
                let half = self.params[0] / 2.0;
                [
                    [Complex64::from_polar(1.0, -half), ZERO],
                    [ZERO, Complex64::from_polar(1.0, half)],
                ]
            }
            _ => return None,
        };
        Some(m)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wires: Vec<String> = self.wires.iter().map(|w| w.to_string()).collect();
        write!(f, "{} {}", self.kind, wires.join(","))?;
        for p in &self.params {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<StateVector> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Basis state |index>.
    pub fn basis(num_qubits: usize, index: usize) -> Result<StateVector> {
        let mut s = StateVector::zero(num_qubits)?;
        if index >= s.amplitudes.len() {
            return Err(Error::DimensionMismatch(index, s.amplitudes.len()));
        }
        s.amplitudes[0] = ZERO;
        s.amplitudes[index] = ONE;
        Ok(s)
    }

    /// Wrap raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<StateVector> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(num_qubits));
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match gate.kind {
            GateKind::X => {
                let stride = 1 << gate.wires[0];
                for chunk in self.amplitudes.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    lo.swap_with_slice(hi);
                }
            }
            GateKind::RZ => {
                let half = gate.params[0] / 2.0;
                let lo = Complex64::from_polar(1.0, -half);
                let hi = Complex64::from_polar(1.0, half);
                let bit = 1 << gate.wires[0];
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { lo } else { hi };
                }
            }
            GateKind::H | GateKind::Y | GateKind::SX | GateKind::RX | GateKind::RY => {
                let m = gate.matrix_1q().expect("single-qubit kind");
                let stride = 1 << gate.wires[0];
                for chunk in self.amplitudes.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (a0, a1) = (*x0, *x1);
                        *x0 = m[0][0] * a0 + m[0][1] * a1;
                        *x1 = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
            GateKind::CNOT => {
                let cbit = 1usize << gate.wires[0];
                let tbit = 1usize << gate.wires[1];
                for (k, chunk) in self.amplitudes.chunks_exact_mut(2 * tbit).enumerate() {
                    let base = k * 2 * tbit;
                    let (lo, hi) = chunk.split_at_mut(tbit);
                    if cbit > tbit {
                        if base & cbit != 0 {
                            lo.swap_with_slice(hi);
                        }
                    } else {
                        for (j, (x0, x1)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                            if j & cbit != 0 {
                                std::mem::swap(x0, x1);
                            }
                        }
                    }
                }
            }
            GateKind::CZ | GateKind::CP => {
                let phase = if gate.kind == GateKind::CZ {
                    -ONE
                } else {
                    Complex64::from_polar(1.0, gate.params[0])
                };
                let mask = (1usize << gate.wires[0]) | (1usize << gate.wires[1]);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a *= phase;
                    }
                }
            }
            GateKind::SWAP => {
                let abit = 1usize << gate.wires[0];
                let bbit = 1usize << gate.wires[1];
                for i in 0..self.amplitudes.len() {
                    if i & abit != 0 && i & bbit == 0 {
                        self.amplitudes.swap(i, (i & !abit) | bbit);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_wires > self.num_qubits {
            return Err(Error::DimensionMismatch(circuit.num_wires, self.num_qubits));
        }
        for g in &circuit.gates {
            self.apply(g)?;
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multinomial draw of `shots` outcomes, returned as `(basis index, count)`
    /// pairs in ascending index order.
    ///
    /// Each shot draws a uniform variate from a ChaCha8 stream seeded with
    /// `seed` and inverts the cumulative distribution of the exact
    /// probabilities.
    pub fn sample_indices(&self, shots: u64, seed: u64) -> Result<Vec<(usize, u64)>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = self.probabilities();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = rng_from_seed(seed);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let mut idx = cdf.partition_point(|&c| c <= u);
            if idx >= probs.len() {
                idx = probs.len() - 1;
            }
            // Never land on a zero-probability outcome through rounding.
            while probs[idx] == 0.0 && idx > 0 {
                idx -= 1;
            }
            *counts.entry(idx).or_insert(0) += 1;
        }
        Ok(counts.into_iter().collect())
    }

    /// Seeded finite-shot counts keyed by bitstring. The bitstring is the
    /// binary basis index, most-significant qubit first (qubit 0 rightmost).
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
        let n = self.num_qubits;
        Ok(self
            .sample_indices(shots, seed)?
            .into_iter()
            .map(|(idx, c)| (format!("{idx:0n$b}"), c))
            .collect())
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Matrix {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Matrix { dim, data }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Matrix { dim: n, data }
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Matrix { dim: n, data }
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Unitary of `circuit` on `num_qubits` wires, column k being the image of |k>.
pub fn circuit_unitary(circuit: &Circuit, num_qubits: usize) -> Result<Matrix> {
    if num_qubits > MAX_UNITARY_QUBITS {
        return Err(Error::TooManyQubits(num_qubits, MAX_UNITARY_QUBITS));
    }
    if circuit.num_wires > num_qubits {
        return Err(Error::DimensionMismatch(circuit.num_wires, num_qubits));
    }
    let dim = 1 << num_qubits;
    let mut data = vec![ZERO; dim * dim];
    for col in 0..dim {
        let mut s = StateVector::basis(num_qubits, col)?;
        s.apply_circuit(circuit)?;
        for (row, a) in s.amplitudes.iter().enumerate() {
            data[row * dim + col] = *a;
        }
    }
    Ok(Matrix { dim, data })
}
