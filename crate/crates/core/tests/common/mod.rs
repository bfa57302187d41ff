#![allow(dead_code)]

use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sepfid::ensemble::Ensemble;
use sepfid::linalg::{Complex64, StateVector};
use sepfid::search::{haar_state, restart_rng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    restart_rng(seed, 0)
}

/// Random probability vector sorted nonincreasing.
pub fn nonincreasing_probs(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p.sort_by(|a, b| b.total_cmp(a));
    let drift: f64 = 1.0 - p.iter().sum::<f64>();
    p[0] += drift;
    p
}

pub fn random_probs(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    let drift: f64 = 1.0 - p.iter().sum::<f64>();
    p[0] += drift;
    p
}

/// `n` mutually orthogonal random states by Gram–Schmidt on Haar states.
pub fn orthogonal_states(dims: &[usize], n: usize, rng: &mut ChaCha8Rng) -> Vec<StateVector> {
    let mut out: Vec<StateVector> = Vec::new();
    while out.len() < n {
        let mut v = haar_state(dims, rng).unwrap().into_amplitudes();
        for _ in 0..2 {
            for b in &out {
                let c: Complex64 = b.amplitudes().iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b.amplitudes()) {
                    *vi -= c * bi;
                }
            }
        }
        if let Ok(s) = StateVector::normalized(dims.to_vec(), v) {
            out.push(s);
        }
    }
    out
}

pub fn random_orthogonal_ensemble(dims: &[usize], n: usize, rng: &mut ChaCha8Rng) -> Ensemble {
    let states = orthogonal_states(dims, n, rng);
    let probs = random_probs(n, rng);
    Ensemble::new(states, probs).unwrap()
}

pub fn random_ensemble(dims: &[usize], n: usize, rng: &mut ChaCha8Rng) -> Ensemble {
    let states = (0..n).map(|_| haar_state(dims, rng).unwrap()).collect();
    let probs = random_probs(n, rng);
    Ensemble::new(states, probs).unwrap()
}

/// Dense complex matrix as rows, for oracles written without the crate's
/// linear algebra.
pub type Dense = Vec<Vec<Complex64>>;

pub fn zeros(n: usize) -> Dense {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

pub fn add_outer(m: &mut Dense, w: f64, v: &[Complex64]) {
    for i in 0..v.len() {
        for j in 0..v.len() {
            m[i][j] += v[i] * v[j].conj() * w;
        }
    }
}

pub fn mat_vec(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Largest eigenpair of a PSD matrix by power iteration from a fixed
/// full-support start.
pub fn top_eigenpair(m: &Dense) -> (f64, Vec<Complex64>) {
    let n = m.len();
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + i as f64 * 0.37, 0.11 * i as f64)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    let mut value = 0.0;
    for _ in 0..20000 {
        let w = mat_vec(m, &v);
        let rq: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return (0.0, v);
        }
        v = w.into_iter().map(|z| z / norm).collect();
        if (rq - value).abs() < 1e-15 {
            return (rq, v);
        }
        value = rq;
    }
    (value, v)
}

pub fn top_eigenvalue(m: &Dense) -> f64 {
    top_eigenpair(m).0
}

/// Sum of the `r` largest eigenvalues of a PSD matrix by deflation.
pub fn top_eigenvalue_sum(m: &Dense, r: usize) -> f64 {
    let mut a = m.clone();
    let mut total = 0.0;
    for _ in 0..r {
        let (mu, v) = top_eigenpair(&a);
        total += mu;
        add_outer(&mut a, -mu, &v);
    }
    total
}

/// Runs a criterion, prints one PASS/FAIL line with timing, returns the
/// verdict.
pub fn criterion(number: u32, title: &str, limit: Duration, body: impl FnOnce() -> (bool, String)) -> bool {
    let start = Instant::now();
    let (ok, detail) = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = ok && in_time;
    println!(
        "criterion {number:>2} {}: {title}; {detail}; {:.2?} (limit {:?}{})",
        if pass { "PASS" } else { "FAIL" },
        elapsed,
        limit,
        if in_time { "" } else { ", exceeded" }
    );
    pass
}
