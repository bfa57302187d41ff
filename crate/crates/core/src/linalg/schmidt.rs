use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::state::StateVector;
use super::svd::singular_value_decomposition;
use crate::ensemble::Bipartition;
use crate::error::Result;

/// `|ψ⟩ = Σ_j √λ_j |l_j⟩|r_j⟩` across a cut, coefficients nonincreasing.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<StateVector>,
    pub right_vectors: Vec<StateVector>,
}

impl SchmidtData {
    /// Squared coefficients `λ_j`.
    pub fn lambdas(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    pub fn rank(&self, threshold: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c * c > threshold).count()
    }

    /// Rebuilds the state in the cut's `[left, right]` grouping.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let mut m: Option<ComplexMatrix> = None;
        for ((c, l), r) in self.coefficients.iter().zip(&self.left_vectors).zip(&self.right_vectors) {
            let term = ComplexMatrix::from_fn(l.dim(), r.dim(), |i, j| {
                l.amplitudes()[i] * r.amplitudes()[j] * *c
            });
            m = Some(match m {
                Some(acc) => &acc + &term,
                None => term,
            });
        }
        m.map(|m| m.as_slice().to_vec()).unwrap_or_default()
    }
}

pub fn schmidt_decompose(psi: &StateVector, cut: &Bipartition) -> Result<SchmidtData> {
    let m = psi.reshape(cut)?;
    let svd = singular_value_decomposition(&m);
    let left_dims: Vec<usize> = cut.left().iter().map(|&p| psi.dims()[p]).collect();
    let right_dims: Vec<usize> = cut.right().iter().map(|&p| psi.dims()[p]).collect();
    // ⟨l r|ψ⟩ = Σ σ u_l conj(v_r), so the right Schmidt vectors are conj(v)
    let left_vectors = svd
        .left
        .into_iter()
        .map(|u| StateVector::from_parts_unchecked(left_dims.clone(), u))
        .collect();
    let right_vectors = svd
        .right
        .into_iter()
        .map(|v| StateVector::from_parts_unchecked(right_dims.clone(), v.iter().map(|x| x.conj()).collect()))
        .collect();
    Ok(SchmidtData {
        coefficients: svd.values,
        left_vectors,
        right_vectors,
    })
}

/// Largest squared Schmidt coefficient: the best overlap
/// `max |⟨a|⟨b|ψ⟩|²` with a product state across the cut.
pub fn max_schmidt_sq(psi: &StateVector, cut: &Bipartition) -> Result<f64> {
    let data = schmidt_decompose(psi, cut)?;
    Ok(data.coefficients.first().map_or(0.0, |c| c * c))
}
