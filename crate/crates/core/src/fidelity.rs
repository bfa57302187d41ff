//! Average fidelity `F(M,G)`, achievable fidelity `F(M)` and success
//! probability `P_s(M)` of a measurement strategy.
//!
//! Everything is computed from the quadratic forms `q_ai = ⟨ψ_i|M_a|ψ_i⟩`.
//! For an outcome `a` the conditional operator
//! `A_a = Σ_i p_i q_ai |ψ_i⟩⟨ψ_i|` has the same nonzero spectrum as the
//! `N × N` matrix `K_ij = √(w_i w_j) ⟨ψ_i|ψ_j⟩` with `w_i = p_i q_ai`, and if
//! `u` is a top eigenvector of `K` then `Σ_i √w_i u_i |ψ_i⟩` is a top
//! eigenvector of `A_a`. Per-outcome terms are reduced by pairwise summation.

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, pairwise_sum, ComplexMatrix, Complex64, StateVector};
use crate::measurement::{require_complete, DecodingMap, Povm};
use crate::tolerance::Tolerances;

/// Best guess for one outcome and its contribution `‖A_a‖∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeGuess {
    pub outcome: usize,
    pub guess: StateVector,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    /// `F(M,G)` for the supplied decoding, or `F(M)` when none was given.
    pub average_fidelity: f64,
    pub achievable_fidelity: f64,
    /// Present when decoding is omitted (maximum likelihood) or refers to
    /// ensemble members.
    pub success_probability: Option<f64>,
    pub per_outcome: Vec<OutcomeGuess>,
    pub separable: bool,
}

/// `q[a][i] = ⟨ψ_i|M_a|ψ_i⟩`
pub fn quadratic_forms(s: &Ensemble, m: &dyn Povm) -> Vec<Vec<f64>> {
    (0..m.len())
        .map(|a| s.states().iter().map(|psi| m.expectation(a, psi)).collect())
        .collect()
}

fn check_dims(s: &Ensemble, m: &dyn Povm) -> Result<()> {
    if s.dims() != m.dims() {
        return Err(Error::DimensionMismatch(s.dims().to_vec(), m.dims().to_vec()));
    }
    Ok(())
}

fn prepare(s: &Ensemble, m: &dyn Povm) -> Result<Vec<Vec<f64>>> {
    check_dims(s, m)?;
    require_complete(m)?;
    Ok(quadratic_forms(s, m))
}

/// Dominant eigenpair of `A_a` from the weights `w_i = p_i q_ai`.
pub(crate) fn dominant_guess(s: &Ensemble, gram: &ComplexMatrix, weights: &[f64]) -> (f64, Vec<Complex64>) {
    let support: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    match support.len() {
        0 => (0.0, s.states()[0].amplitudes().to_vec()),
        1 => (weights[support[0]], s.states()[support[0]].amplitudes().to_vec()),
        n => {
            let roots: Vec<f64> = support.iter().map(|&i| weights[i].sqrt()).collect();
            let k = ComplexMatrix::from_fn(n, n, |x, y| gram[(support[x], support[y])] * (roots[x] * roots[y]));
            let eig = hermitian_eigensystem(&k).expect("weighted Gram matrix is Hermitian");
            let mu = eig.values[0].max(0.0);
            let u = &eig.vectors[0];
            let d = s.total_dim();
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            for (x, &i) in support.iter().enumerate() {
                let c = u[x] * roots[x];
                for (vk, pk) in v.iter_mut().zip(s.states()[i].amplitudes()) {
                    *vk += c * pk;
                }
            }
            let norm = crate::linalg::norm(&v);
            if norm > 0.0 {
                for vk in &mut v {
                    *vk /= norm;
                }
            }
            (mu, v)
        }
    }
}

/// `F(M)` and the per-outcome dominant eigenvectors, from precomputed forms.
pub(crate) fn achievable_from_forms(s: &Ensemble, gram: &ComplexMatrix, forms: &[Vec<f64>]) -> (f64, Vec<OutcomeGuess>) {
    let mut per_outcome = Vec::with_capacity(forms.len());
    for (a, q) in forms.iter().enumerate() {
        let w: Vec<f64> = q.iter().zip(s.probs()).map(|(q, p)| (p * q).max(0.0)).collect();
        let (mu, v) = dominant_guess(s, gram, &w);
        per_outcome.push(OutcomeGuess {
            outcome: a,
            guess: StateVector::normalized(s.dims().to_vec(), v).expect("dominant eigenvector is nonzero"),
            contribution: mu,
        });
    }
    let terms: Vec<f64> = per_outcome.iter().map(|g| g.contribution).collect();
    (pairwise_sum(&terms), per_outcome)
}

/// `Σ_a max_i p_i q_ai` and the maximizing index per outcome (smallest on ties).
pub(crate) fn ml_from_forms(s: &Ensemble, forms: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let mut picks = Vec::with_capacity(forms.len());
    let mut terms = Vec::with_capacity(forms.len());
    for q in forms {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, (qi, p)) in q.iter().zip(s.probs()).enumerate() {
            let v = p * qi;
            if v > best.1 {
                best = (i, v);
            }
        }
        picks.push(best.0);
        terms.push(best.1.max(0.0));
    }
    (pairwise_sum(&terms), picks)
}

fn average_from_forms(s: &Ensemble, forms: &[Vec<f64>], g: &DecodingMap) -> f64 {
    let mut terms = Vec::with_capacity(forms.len());
    for (a, q) in forms.iter().enumerate() {
        let phi = g.guess_state(a, s);
        let t: Vec<f64> = s
            .states()
            .iter()
            .zip(s.probs())
            .zip(q)
            .map(|((psi, p), qi)| p * qi * psi.overlap_sq(phi))
            .collect();
        terms.push(pairwise_sum(&t));
    }
    pairwise_sum(&terms)
}

/// `F(M,G) = Σ_{i,a} p_i ⟨ψ_i|M_a|ψ_i⟩ |⟨ψ_i|φ_a⟩|²`
pub fn average_fidelity(s: &Ensemble, m: &dyn Povm, g: &DecodingMap) -> Result<f64> {
    let forms = prepare(s, m)?;
    g.check_against(s, m)?;
    Ok(average_from_forms(s, &forms, g))
}

/// `F(M) = Σ_a ‖Σ_i p_i ⟨ψ_i|M_a|ψ_i⟩ |ψ_i⟩⟨ψ_i|‖∞`, with the best guesses.
pub fn achievable_fidelity(s: &Ensemble, m: &dyn Povm) -> Result<StrategyReport> {
    let forms = prepare(s, m)?;
    let (f, per_outcome) = achievable_from_forms(s, &s.gram_matrix(), &forms);
    let (ps, _) = ml_from_forms(s, &forms);
    Ok(StrategyReport {
        average_fidelity: f,
        achievable_fidelity: f,
        success_probability: Some(ps),
        per_outcome,
        separable: m.is_separable(),
    })
}

/// Full report for a strategy; `g = None` means maximum-likelihood decoding.
pub fn evaluate_strategy(s: &Ensemble, m: &dyn Povm, g: Option<&DecodingMap>) -> Result<StrategyReport> {
    let mut report = achievable_fidelity(s, m)?;
    if let Some(g) = g {
        g.check_against(s, m)?;
        let forms = quadratic_forms(s, m);
        report.average_fidelity = average_from_forms(s, &forms, g);
        report.success_probability = match g.member_indices() {
            Ok(members) => Some(explicit_success(s, &forms, &members)),
            Err(_) => None,
        };
    }
    Ok(report)
}

fn explicit_success(s: &Ensemble, forms: &[Vec<f64>], members: &[usize]) -> f64 {
    let terms: Vec<f64> = forms
        .iter()
        .zip(members)
        .map(|(q, &i)| s.probs()[i] * q[i])
        .collect();
    pairwise_sum(&terms)
}

/// Maximum-likelihood decoding, smallest index on ties.
pub fn ml_decoding(s: &Ensemble, m: &dyn Povm) -> Result<DecodingMap> {
    let forms = prepare(s, m)?;
    Ok(DecodingMap::members(&ml_from_forms(s, &forms).1))
}

/// `P_s(M)`: `Σ_a max_i p_i q_ai` without a decoding, otherwise
/// `Σ_i p_i ⟨ψ_i|M(i)|ψ_i⟩` for the grouped elements of `g`.
pub fn success_probability(s: &Ensemble, m: &dyn Povm, g: Option<&DecodingMap>) -> Result<f64> {
    let forms = prepare(s, m)?;
    match g {
        None => Ok(ml_from_forms(s, &forms).0),
        Some(g) => {
            g.check_against(s, m)?;
            Ok(explicit_success(s, &forms, &g.member_indices()?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualityCheck {
    pub success: f64,
    pub fidelity: f64,
    pub gap: f64,
}

impl EqualityCheck {
    pub fn passes(&self) -> bool {
        self.gap <= Tolerances::current().sandwich
    }
}

/// For an orthogonal ensemble, ML success probability and achievable
/// fidelity of the same measurement coincide.
pub fn check_success_fidelity_equality(s: &Ensemble, m: &dyn Povm) -> Result<EqualityCheck> {
    if !s.is_orthogonal() {
        return Err(Error::NotOrthogonal);
    }
    let report = achievable_fidelity(s, m)?;
    let success = report.success_probability.expect("ML value is always present");
    Ok(EqualityCheck {
        success,
        fidelity: report.achievable_fidelity,
        gap: (success - report.achievable_fidelity).abs(),
    })
}
