//! The three benchmark circuits, built from the first two neurons of the
//! default synthetic session.

use std::str::FromStr;

use qfnet::circuit::{
    build_angle_prep, build_compute_uncompute, build_mottonen_real_prep, build_swap_test,
    ComputeUncomputeOptions,
};
use qfnet::curve::{amplitude_prepare, rescale_l1_pi};
use qfnet::{Circuit, Result};

use crate::synth::{generate_synthetic, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Ang,
    Amp,
    AmpQft,
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['-', '+'], "_")
            .as_str()
        {
            "ang" => Ok(Builtin::Ang),
            "amp" => Ok(Builtin::Amp),
            "amp_qft" => Ok(Builtin::AmpQft),
            other => Err(format!(
                "unknown builtin circuit {other:?} (ang, amp, amp_qft)"
            )),
        }
    }
}

pub fn builtin_circuit(which: Builtin) -> Result<Circuit> {
    let curves = generate_synthetic(&SyntheticSpec {
        neurons: 2,
        ..SyntheticSpec::default()
    });
    let (a, b) = (&curves[0], &curves[1]);
    match which {
        Builtin::Ang => build_swap_test(
            &build_angle_prep(&rescale_l1_pi(a)?.values, 0)?,
            &build_angle_prep(&rescale_l1_pi(b)?.values, 0)?,
        ),
        Builtin::Amp | Builtin::AmpQft => build_compute_uncompute(
            &build_mottonen_real_prep(&amplitude_prepare(a)?.values)?,
            &build_mottonen_real_prep(&amplitude_prepare(b)?.values)?,
            ComputeUncomputeOptions::with_qft(which == Builtin::AmpQft),
        ),
    }
}
