//! Weighted ensembles `{p_i, |ψ_i⟩}` and the operators derived from them.
//!
//! The operators here feed the bounds:
//!
//! * `Λ = Σ p_i λ_i |ψ_i⟩⟨ψ_i|`, where `λ_i` is the largest squared Schmidt
//!   coefficient of `|ψ_i⟩` across a chosen cut;
//! * `ρ = Σ p_i |ψ_i⟩⟨ψ_i|`;
//! * `ρ′ = Σ p_i |ψ_i⟩⟨ψ_i| ⊗ |ψ_i⟩⟨ψ_i|` on the doubled space.
//!
//! Probabilities are validated, never renormalized.

mod bipartition;

pub use bipartition::{all_bipartitions, Bipartition};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, max_schmidt_sq, ComplexMatrix, Complex64, StateVector};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dims: Vec<usize>,
    states: Vec<StateVector>,
    probs: Vec<f64>,
}

/// Per-cut summary used by the water-filling and Schmidt-operator bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleProfile {
    pub lambdas: Vec<f64>,
    pub orthogonal: bool,
    pub span_rank: usize,
}

impl Ensemble {
    pub fn new(states: Vec<StateVector>, probs: Vec<f64>) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyEnsemble)?;
        let dims = first.dims().to_vec();
        if let Some(bad) = states.iter().find(|s| s.dims() != dims.as_slice()) {
            return Err(Error::DimensionMismatch(dims, bad.dims().to_vec()));
        }
        if probs.len() != states.len() {
            return Err(Error::BadProbabilities(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::BadProbabilities(format!("p[{i}] = {p} is not a nonnegative number")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > Tolerances::current().normalization {
            return Err(Error::BadProbabilities(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Ensemble { dims, states, probs })
    }

    pub fn equiprobable(states: Vec<StateVector>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        Self::new(states, vec![1.0 / n as f64; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Indices of states listed with probability exactly zero.
    pub fn zero_probability_states(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.probs[i] == 0.0).collect()
    }

    pub fn is_equiprobable(&self) -> bool {
        let target = 1.0 / self.len() as f64;
        let tol = Tolerances::current().normalization;
        self.probs.iter().all(|p| (p - target).abs() <= tol)
    }

    /// `G[i][j] = ⟨ψ_i|ψ_j⟩`
    pub fn gram_matrix(&self) -> ComplexMatrix {
        let n = self.len();
        let mut g = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            g[(i, i)] = Complex64::new(1.0, 0.0);
            for j in (i + 1)..n {
                let z = self.states[i].inner(&self.states[j]);
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
        g
    }

    pub fn is_orthogonal(&self) -> bool {
        let tol = Tolerances::current().orthogonality;
        let g = self.gram_matrix();
        (0..self.len()).all(|i| ((i + 1)..self.len()).all(|j| g[(i, j)].norm() <= tol))
    }

    /// Dimension of the linear span of the listed states, zero-probability
    /// members included.
    pub fn span_rank(&self) -> usize {
        let tol = Tolerances::current().rank;
        hermitian_eigenvalues(&self.gram_matrix())
            .expect("Gram matrix is Hermitian")
            .into_iter()
            .filter(|&e| e > tol)
            .count()
    }

    /// Largest squared Schmidt coefficient of each state across `cut`.
    pub fn lambdas(&self, cut: &Bipartition) -> Result<Vec<f64>> {
        self.states.iter().map(|s| max_schmidt_sq(s, cut)).collect()
    }

    pub fn profile(&self, cut: &Bipartition) -> Result<EnsembleProfile> {
        Ok(EnsembleProfile {
            lambdas: self.lambdas(cut)?,
            orthogonal: self.is_orthogonal(),
            span_rank: self.span_rank(),
        })
    }

    /// `Λ = Σ_i p_i λ_i |ψ_i⟩⟨ψ_i|`
    pub fn lambda_operator(&self, cut: &Bipartition) -> Result<ComplexMatrix> {
        let lambdas = self.lambdas(cut)?;
        let d = self.total_dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for ((s, p), l) in self.states.iter().zip(&self.probs).zip(&lambdas) {
            out.add_projector(p * l, s.amplitudes());
        }
        Ok(out)
    }

    /// `ρ = Σ_i p_i |ψ_i⟩⟨ψ_i|`
    pub fn rho(&self) -> ComplexMatrix {
        let d = self.total_dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (s, p) in self.states.iter().zip(&self.probs) {
            out.add_projector(*p, s.amplitudes());
        }
        out
    }

    /// `ρ′ = Σ_i p_i |ψ_i⟩⟨ψ_i| ⊗ |ψ_i⟩⟨ψ_i|`, dimension `D²`.
    pub fn rho_prime(&self) -> ComplexMatrix {
        let d = self.total_dim();
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for (s, p) in self.states.iter().zip(&self.probs) {
            let doubled = crate::linalg::kron_vec(s.amplitudes(), s.amplitudes());
            out.add_projector(*p, &doubled);
        }
        out
    }

    /// Nonzero spectrum of `ρ′` through its `N × N` Gram form
    /// `H_ij = √(p_i p_j) ⟨ψ_i|ψ_j⟩²`, nonincreasing.
    pub fn rho_prime_spectrum(&self) -> Vec<f64> {
        let n = self.len();
        let g = self.gram_matrix();
        let h = ComplexMatrix::from_fn(n, n, |i, j| g[(i, j)] * g[(i, j)] * (self.probs[i] * self.probs[j]).sqrt());
        hermitian_eigenvalues(&h).expect("weighted Gram matrix is Hermitian")
    }

    /// Ranks of the local supports on the two sides of `cut`, over the
    /// states with positive probability, returned as `(smaller, larger)`.
    ///
    /// Every state lives in `P_L ⊗ P_R` for the support projectors, and
    /// compressing a separable POVM onto that subspace keeps it separable
    /// and complete there; the dimensional factors in the upper bounds may
    /// therefore use these ranks instead of the nominal `d1, d2`.
    pub fn local_support_dims(&self, cut: &Bipartition) -> Result<(usize, usize)> {
        let tol = Tolerances::current().rank;
        let (dl, dr) = (cut.left_dim(), cut.right_dim());
        let mut left = ComplexMatrix::zeros(dl, dl);
        let mut right = ComplexMatrix::zeros(dr, dr);
        for (s, &p) in self.states.iter().zip(&self.probs) {
            if p <= 0.0 {
                continue;
            }
            let m = s.reshape(cut)?;
            left = &left + &(&m * &m.adjoint());
            right = &right + &(&m.adjoint() * &m);
        }
        let rank = |m: &ComplexMatrix| {
            hermitian_eigenvalues(m)
                .expect("reduced state is Hermitian")
                .into_iter()
                .filter(|&e| e > tol)
                .count()
        };
        let (a, b) = (rank(&left), rank(&right));
        Ok((a.min(b), a.max(b)))
    }

    /// The ensemble seen as a two-party system `[d_left, d_right]`.
    pub fn regroup(&self, cut: &Bipartition) -> Result<Ensemble> {
        let states = self
            .states
            .iter()
            .map(|s| s.regroup(cut))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(states, self.probs.clone())
    }

    pub(crate) fn check_cut(&self, cut: &Bipartition) -> Result<()> {
        self.states[0].check_cut(cut)
    }
}
