use std::f64::consts::PI;

use crate::linalg::{Complex64, StateVector};

/// `{|0⟩, …, |d−1⟩}`
pub fn computational_basis(d: usize) -> Vec<StateVector> {
    (0..d).map(|k| StateVector::basis(&[d], k).expect("d >= 2")).collect()
}

/// `|f_k⟩ = d^{-1/2} Σ_j e^{2πijk/d} |j⟩`; for `d = 2` this is `{|+⟩, |−⟩}`.
pub fn fourier_basis(d: usize) -> Vec<StateVector> {
    let s = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|k| {
            let amps = (0..d)
                .map(|j| Complex64::from_polar(s, 2.0 * PI * ((j * k) % d) as f64 / d as f64))
                .collect();
            StateVector::new(vec![d], amps).expect("Fourier vectors are unit")
        })
        .collect()
}

/// `{|+⟩, |−⟩}`
pub fn plus_minus_basis() -> Vec<StateVector> {
    let s = 0.5f64.sqrt();
    vec![
        StateVector::from_real(&[2], &[s, s]).unwrap(),
        StateVector::from_real(&[2], &[s, -s]).unwrap(),
    ]
}

/// `{(|0⟩ + i|1⟩)/√2, (|0⟩ − i|1⟩)/√2}`
pub fn y_basis() -> Vec<StateVector> {
    let s = 0.5f64.sqrt();
    [1.0, -1.0]
        .iter()
        .map(|&sign| {
            StateVector::new(vec![2], vec![Complex64::new(s, 0.0), Complex64::new(0.0, sign * s)]).unwrap()
        })
        .collect()
}
