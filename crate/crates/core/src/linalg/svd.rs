use num_complex::Complex64;

use super::eigen::hermitian_eigensystem;
use super::matrix::{complete_basis, orthogonalize, ComplexMatrix};

/// Thin SVD `A = Σ_j σ_j |u_j⟩⟨v_j|` with `min(rows, cols)` triples.
#[derive(Debug, Clone)]
pub struct Svd {
    pub values: Vec<f64>,
    pub left: Vec<Vec<Complex64>>,
    pub right: Vec<Vec<Complex64>>,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let rows = self.left.first().map_or(0, Vec::len);
        let cols = self.right.first().map_or(0, Vec::len);
        let mut out = ComplexMatrix::zeros(rows, cols);
        for ((s, u), v) in self.values.iter().zip(&self.left).zip(&self.right) {
            let term = ComplexMatrix::outer(u, v).scale(Complex64::new(*s, 0.0));
            out = &out + &term;
        }
        out
    }
}

/// Singular values from the eigensystem of `A†A` (or `AA†` for wide
/// matrices); left vectors by back-substitution `u = Av/σ`. Vectors for
/// numerically zero singular values are completed by Gram–Schmidt.
pub fn singular_value_decomposition(a: &ComplexMatrix) -> Svd {
    if a.rows() < a.cols() {
        let t = singular_value_decomposition(&a.adjoint());
        return Svd {
            values: t.values,
            left: t.right,
            right: t.left,
        };
    }
    let gram = &a.adjoint() * a;
    // A†A is Hermitian by construction up to rounding
    let eig = hermitian_eigensystem(&gram).unwrap_or_else(|_| {
        let sym = ComplexMatrix::from_fn(gram.rows(), gram.cols(), |i, j| {
            (gram[(i, j)] + gram[(j, i)].conj()) * 0.5
        });
        hermitian_eigensystem(&sym).expect("symmetrized Gram matrix is Hermitian")
    });

    let values: Vec<f64> = eig.values.iter().map(|&e| e.max(0.0).sqrt()).collect();
    let top = values.first().copied().unwrap_or(0.0);
    let cutoff = 1e-12 * top.max(f64::MIN_POSITIVE);

    let mut left: Vec<Vec<Complex64>> = Vec::with_capacity(values.len());
    for (s, v) in values.iter().zip(&eig.vectors) {
        if *s > cutoff {
            let mut u: Vec<Complex64> = a.mul_vec(v).into_iter().map(|x| x / s).collect();
            if orthogonalize(&mut u, &left) > 1e-6 {
                left.push(u);
                continue;
            }
        }
        let next = left.len() + 1;
        left = complete_basis(left, a.rows(), next);
    }
    Svd {
        values,
        left,
        right: eig.vectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_one_wide() {
        // |0⟩⟨+| scaled
        let s = 0.5f64.sqrt();
        let a = ComplexMatrix::from_vec(2, 3, vec![c(s, 0.0), c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let svd = singular_value_decomposition(&a);
        assert_eq!(svd.values.len(), 2);
        assert!((svd.values[0] - 1.0).abs() < 1e-14);
        assert!(svd.values[1].abs() < 1e-14);
        assert!(svd.reconstruct().max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn tilted_two_by_two() {
        let a = ComplexMatrix::from_real_diagonal(&[0.8, 0.6]);
        let svd = singular_value_decomposition(&a);
        assert!((svd.values[0] - 0.8).abs() < 1e-14);
        assert!((svd.values[1] - 0.6).abs() < 1e-14);
    }
}
