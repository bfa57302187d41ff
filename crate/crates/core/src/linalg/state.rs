use std::fmt;

use num_complex::Complex64;

use super::matrix::{inner, kron_vec, norm, ComplexMatrix};
use crate::ensemble::Bipartition;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Normalized pure state on `⊗ C^{d_i}`, amplitudes in lexicographic
/// computational-basis order (party 0 most significant).
#[derive(Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

pub(crate) fn validate_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidDims(dims.to_vec()));
    }
    Ok(dims.iter().product())
}

impl StateVector {
    /// Validates shape and unit norm.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let total = validate_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::AmplitudeCount {
                expected: total,
                got: amplitudes.len(),
            });
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > Tolerances::current().normalization {
            return Err(Error::NotNormalized(n));
        }
        Ok(StateVector { dims, amplitudes })
    }

    /// Rescales to unit norm; fails only on shape errors or a zero vector.
    pub fn normalized(dims: Vec<usize>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let total = validate_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::AmplitudeCount {
                expected: total,
                got: amplitudes.len(),
            });
        }
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Ok(StateVector { dims, amplitudes })
    }

    /// Real amplitudes, rescaled to unit norm.
    pub fn from_real(dims: &[usize], amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(
            dims.to_vec(),
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: &[usize], index: usize) -> Result<Self> {
        let total = validate_dims(dims)?;
        if index >= total {
            return Err(Error::AmplitudeCount {
                expected: total,
                got: index,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            dims: dims.to_vec(),
            amplitudes: amps,
        })
    }

    /// Basis state from per-party digits, e.g. `[0, 1]` is `|01⟩`.
    pub fn product_basis(dims: &[usize], digits: &[usize]) -> Result<Self> {
        let mut idx = 0;
        for (&d, &x) in dims.iter().zip(digits) {
            idx = idx * d + x;
        }
        Self::basis(dims, idx)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn overlap_sq(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Tensor product; party lists concatenate.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector {
            dims,
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Amplitude matrix `M[l][r] = ⟨l r|ψ⟩` across `cut`, with each side's
    /// parties in increasing order.
    pub fn reshape(&self, cut: &Bipartition) -> Result<ComplexMatrix> {
        self.check_cut(cut)?;
        let (dl, dr) = (cut.left_dim(), cut.right_dim());
        let mut m = ComplexMatrix::zeros(dl, dr);
        let mut digits = vec![0usize; self.dims.len()];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let mut rest = idx;
            for p in (0..self.dims.len()).rev() {
                digits[p] = rest % self.dims[p];
                rest /= self.dims[p];
            }
            let l = cut.left().iter().fold(0, |acc, &p| acc * self.dims[p] + digits[p]);
            let r = cut.right().iter().fold(0, |acc, &p| acc * self.dims[p] + digits[p]);
            m[(l, r)] = *amp;
        }
        Ok(m)
    }

    /// Same state viewed as two parties `[d_left, d_right]`.
    pub fn regroup(&self, cut: &Bipartition) -> Result<StateVector> {
        let m = self.reshape(cut)?;
        Ok(StateVector {
            dims: vec![cut.left_dim(), cut.right_dim()],
            amplitudes: m.as_slice().to_vec(),
        })
    }

    pub(crate) fn check_cut(&self, cut: &Bipartition) -> Result<()> {
        if cut.party_dims() != self.dims.as_slice() {
            return Err(Error::InvalidBipartition(format!(
                "cut {} is for dims {:?}, state has dims {:?}",
                cut.label(),
                cut.party_dims(),
                self.dims
            )));
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Self {
        StateVector { dims, amplitudes }
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector{:?}[", self.dims)?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.4}{:+.4}i", a.re, a.im)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(matches!(StateVector::from_real(&[1, 2], &[1.0, 0.0]), Err(Error::InvalidDims(_))));
        assert!(matches!(
            StateVector::new(vec![2], vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(StateVector::from_real(&[2, 2], &[1.0, 0.0]), Err(Error::AmplitudeCount { .. })));
        assert!(StateVector::from_real(&[2], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn reshape_respects_party_order() {
        // |ψ⟩ = |0⟩_A |1⟩_B |0⟩_C: index 0b010 = 2
        let psi = StateVector::basis(&[2, 2, 2], 2).unwrap();
        let cut = Bipartition::new(&[2, 2, 2], &[1]).unwrap();
        let m = psi.reshape(&cut).unwrap();
        // left = B digit 1, right = (A, C) = (0, 0)
        assert_eq!(m[(1, 0)], Complex64::new(1.0, 0.0));
        let regrouped = psi.regroup(&cut).unwrap();
        assert_eq!(regrouped.dims(), &[2, 4]);
    }
}
