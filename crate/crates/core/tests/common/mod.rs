#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qfnet::rng::rng_from_seed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_from_seed(seed)
}

pub fn random_unit_real(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

pub fn random_state(rng: &mut impl Rng, num_qubits: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..1usize << num_qubits)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}
