use super::eigen::hermitian_eigenvalues;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest singular value of a Hermitian matrix.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    let values = hermitian_eigenvalues(a)?;
    Ok(values
        .first()
        .map_or(0.0, |&top| top.abs().max(values.last().unwrap().abs())))
}

/// Sum of the `r` largest singular values of a Hermitian matrix.
pub fn ky_fan_norm(a: &ComplexMatrix, r: usize) -> Result<f64> {
    let dim = a.rows();
    if r == 0 || r > dim {
        return Err(Error::RankOutOfRange { r, dim });
    }
    let mut singular: Vec<f64> = hermitian_eigenvalues(a)?.into_iter().map(f64::abs).collect();
    singular.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(singular[..r].iter().sum())
}
