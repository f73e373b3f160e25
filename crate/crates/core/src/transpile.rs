//! Lowering to the native set {SX, RZ, CZ, X}, XYXY dynamical-decoupling
//! insertion, and unitary-equivalence checks.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{asap_layers, count_gates, Circuit, GateCensus};
use crate::error::{Error, Result};
use crate::statevec::{circuit_unitary, Gate, GateKind};

pub const MAX_EQUIVALENCE_QUBITS: usize = 4;
pub const DEFAULT_MIN_WINDOW: usize = 4;

/// Below this an Euler angle is treated as exactly degenerate.
const ANGLE_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoweredCircuit {
    pub circuit: Circuit,
    pub census: GateCensus,
    pub provenance: String,
    /// Number of idle windows that received an XYXY train.
    #[serde(default)]
    pub ddd_windows: usize,
}

/// Wrap into (−π, π].
fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// ZYZ angles `(phi, theta, lambda)` with `U ∝ RZ(phi)·RY(theta)·RZ(lambda)`.
fn zyz_angles(m: [[Complex64; 2]; 2]) -> (f64, f64, f64) {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let s = det.sqrt();
    let v = [[m[0][0] / s, m[0][1] / s], [m[1][0] / s, m[1][1] / s]];
    let theta = 2.0 * v[1][0].norm().atan2(v[0][0].norm());
    let (sum, diff) = if v[0][0].norm() < ANGLE_EPS {
        (0.0, 2.0 * v[1][0].arg())
    } else if v[1][0].norm() < ANGLE_EPS {
        (2.0 * v[1][1].arg(), 0.0)
    } else {
        (2.0 * v[1][1].arg(), 2.0 * v[1][0].arg())
    };
    ((sum + diff) / 2.0, theta, (sum - diff) / 2.0)
}

/// Native sequence (time order) for an arbitrary single-qubit gate.
fn lower_single(g: &Gate) -> Vec<Gate> {
    let q = g.wires[0];
    match g.kind {
        GateKind::SX | GateKind::X => return vec![g.clone()],
        GateKind::RZ => return vec![Gate::rz(q, g.params[0])],
        _ => {}
    }
    let m = g.matrix_1q().expect("single-qubit gate");
    let (phi, theta, lambda) = zyz_angles(m);
    if theta.abs() < ANGLE_EPS {
        vec![Gate::rz(q, phi + lambda)]
    } else if (theta - FRAC_PI_2).abs() < ANGLE_EPS {
        vec![
            Gate::rz(q, lambda - FRAC_PI_2),
            Gate::sx(q),
            Gate::rz(q, phi + FRAC_PI_2),
        ]
    } else if (theta - PI).abs() < ANGLE_EPS {
        vec![Gate::rz(q, lambda + PI), Gate::x(q), Gate::rz(q, phi)]
    } else {
        vec![
            Gate::rz(q, lambda),
            Gate::sx(q),
            Gate::rz(q, theta + PI),
            Gate::sx(q),
            Gate::rz(q, phi + PI),
        ]
    }
}

/// Expand into native gates, without peephole cleanup.
fn expand(g: &Gate, out: &mut Vec<Gate>) {
    match g.kind {
        GateKind::CZ => out.push(g.clone()),
        GateKind::CNOT => {
            let (c, t) = (g.wires[0], g.wires[1]);
            expand(&Gate::h(t), out);
            out.push(Gate::cz(c, t));
            expand(&Gate::h(t), out);
        }
        GateKind::SWAP => {
            let (a, b) = (g.wires[0], g.wires[1]);
            for (c, t) in [(a, b), (b, a), (a, b)] {
                expand(&Gate::cnot(c, t), out);
            }
        }
        GateKind::CP => {
            let (c, t, theta) = (g.wires[0], g.wires[1], g.params[0]);
            out.push(Gate::rz(c, theta / 2.0));
            expand(&Gate::cnot(c, t), out);
            out.push(Gate::rz(t, -theta / 2.0));
            expand(&Gate::cnot(c, t), out);
            out.push(Gate::rz(t, theta / 2.0));
        }
        _ => out.extend(lower_single(g)),
    }
}

/// Merge RZ gates that are adjacent on their wire and drop RZ(0 mod 2π).
pub fn peephole(circuit: &Circuit) -> Circuit {
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(circuit.gates.len());
    let mut last_on_wire: Vec<Option<usize>> = vec![None; circuit.num_wires];
    for g in &circuit.gates {
        if g.kind == GateKind::RZ {
            let w = g.wires[0];
            if let Some(idx) = last_on_wire[w] {
                if let Some(prev) = out[idx].as_mut().filter(|p| p.kind == GateKind::RZ) {
                    prev.params[0] = wrap_angle(prev.params[0] + g.params[0]);
                    continue;
                }
            }
            let mut g = g.clone();
            g.params[0] = wrap_angle(g.params[0]);
            out.push(Some(g));
            last_on_wire[w] = Some(out.len() - 1);
        } else {
            out.push(Some(g.clone()));
            for &w in &g.wires {
                last_on_wire[w] = Some(out.len() - 1);
            }
        }
    }
    let gates = out
        .into_iter()
        .flatten()
        .filter(|g| !(g.kind == GateKind::RZ && g.params[0].abs() < 1e-12))
        .collect();
    Circuit {
        num_wires: circuit.num_wires,
        gates,
        measured_wires: circuit.measured_wires.clone(),
    }
}

pub fn lower(circuit: &Circuit) -> Result<LoweredCircuit> {
    lower_named(circuit, "circuit")
}

pub fn lower_named(circuit: &Circuit, provenance: &str) -> Result<LoweredCircuit> {
    circuit.validate()?;
    let mut expanded = Vec::with_capacity(circuit.gates.len() * 3);
    for g in &circuit.gates {
        expand(g, &mut expanded);
    }
    let raw = Circuit {
        num_wires: circuit.num_wires,
        gates: expanded,
        measured_wires: circuit.measured_wires.clone(),
    };
    let lowered = peephole(&raw);
    if let Some(bad) = lowered.gates.iter().find(|g| !is_native(g.kind)) {
        return Err(Error::UnsupportedGate(bad.kind.name()));
    }
    Ok(LoweredCircuit {
        census: count_gates(&lowered),
        circuit: lowered,
        provenance: provenance.to_string(),
        ddd_windows: 0,
    })
}

pub fn is_native(kind: GateKind) -> bool {
    matches!(
        kind,
        GateKind::SX | GateKind::RZ | GateKind::CZ | GateKind::X
    )
}

/// Idle windows `(wire, gate index before the window)` of at least
/// `min_window` ASAP layers, strictly between a wire's first and last gate.
pub fn idle_windows(circuit: &Circuit, min_window: usize) -> Vec<(usize, usize)> {
    let layers = asap_layers(circuit);
    let mut last: Vec<Option<(usize, usize)>> = vec![None; circuit.num_wires];
    let mut windows = Vec::new();
    for (idx, (g, &layer)) in circuit.gates.iter().zip(&layers).enumerate() {
        for &w in &g.wires {
            if let Some((prev_idx, prev_layer)) = last[w] {
                if layer - prev_layer > min_window.max(1) {
                    windows.push((w, prev_idx));
                }
            }
            last[w] = Some((idx, layer));
        }
    }
    windows
}

/// Insert one X·Y·X·Y train (= −I) into every qualifying idle window.
///
/// Each train is placed right after the gate that opens the window, so it
/// occupies the first four idle layers and the ASAP layer of every original
/// gate is unchanged.
pub fn insert_ddd_xyxy(lowered: &LoweredCircuit, min_window: usize) -> LoweredCircuit {
    let src = &lowered.circuit;
    let windows = idle_windows(src, min_window);
    let mut after: Vec<Vec<usize>> = vec![Vec::new(); src.gates.len()];
    for &(w, idx) in &windows {
        after[idx].push(w);
    }
    let mut gates = Vec::with_capacity(src.gates.len() + 4 * windows.len());
    for (g, wires) in src.gates.iter().zip(&after) {
        gates.push(g.clone());
        for &w in wires {
            gates.extend([Gate::x(w), Gate::y(w), Gate::x(w), Gate::y(w)]);
        }
    }
    let circuit = Circuit {
        num_wires: src.num_wires,
        gates,
        measured_wires: src.measured_wires.clone(),
    };
    LoweredCircuit {
        census: count_gates(&circuit),
        circuit,
        provenance: format!("{}+ddd", lowered.provenance),
        ddd_windows: lowered.ddd_windows + windows.len(),
    }
}

/// `U_a = e^{iφ} U_b` for some φ, on `n ≤ 4` wires, within 1e-8 entrywise.
pub fn equivalence_up_to_phase(a: &Circuit, b: &Circuit, n: usize) -> Result<bool> {
    if n > MAX_EQUIVALENCE_QUBITS {
        return Err(Error::TooManyQubits(n, MAX_EQUIVALENCE_QUBITS));
    }
    let ua = circuit_unitary(a, n)?;
    let ub = circuit_unitary(b, n)?;
    let (k, _) = ub
        .data
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty matrix");
    if ua.data[k].norm() < 1e-8 {
        return Ok(false);
    }
    let ratio = ua.data[k] / ub.data[k];
    let phase = ratio / ratio.norm();
    Ok(ua
        .data
        .iter()
        .zip(&ub.data)
        .all(|(x, y)| (x - phase * y).norm() < 1e-8))
}
