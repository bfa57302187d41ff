//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, then applies
//! the classical real 2×2 Jacobi rotation. Sweeps run until the
//! off-diagonal mass falls below `ε·‖A‖_F`.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in nonincreasing order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl Eigensystem {
    /// `V diag(values) V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (&e, v) in self.values.iter().zip(&self.vectors) {
            out.add_projector(e, v);
        }
        out
    }
}

pub fn hermitian_eigensystem(a: &ComplexMatrix) -> Result<Eigensystem> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let defect = a.hermiticity_defect();
    if defect > Tolerances::current().hermiticity {
        return Err(Error::NonHermitian(defect));
    }
    Ok(jacobi(a))
}

/// Only the eigenvalues, nonincreasing.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigensystem(a).map(|e| e.values)
}

fn jacobi(a: &ComplexMatrix) -> Eigensystem {
    let n = a.rows();
    // symmetrize so the rotations see an exactly Hermitian matrix
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(a[(i, i)].re, 0.0)
        } else {
            (a[(i, j)] + a[(j, i)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = (f64::EPSILON * scale).powi(2);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off <= threshold || scale == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> =
        (0..n).map(|i| (m[(i, i)].re, v.column(i))).collect();
    // stable: equal eigenvalues keep column order
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let (values, vectors) = pairs.into_iter().unzip();
    Eigensystem { values, vectors }
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // skip pivots that are negligible against both diagonal entries
    if g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / g; // e^{iφ}
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = m.rows();
    // A ← A G (columns p, q)
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * gpp + akq * gqp;
        m[(k, q)] = akp * gpq + akq * gqq;
    }
    // A ← G† A (rows p, q)
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        m[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
    // V ← V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::inner;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_two() {
        let e = hermitian_eigensystem(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_sorted() {
        let e = hermitian_eigensystem(&ComplexMatrix::from_real_diagonal(&[-1.0, 3.0])).unwrap();
        assert_eq!(e.values, vec![3.0, -1.0]);
        assert!((e.vectors[0][1].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[1][0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y() {
        let y = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let e = hermitian_eigensystem(&y).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        let yv = y.mul_vec(&e.vectors[0]);
        for (a, b) in yv.iter().zip(&e.vectors[0]) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(inner(&e.vectors[0], &e.vectors[1]).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::NonSquare { .. })));
        let mut h = ComplexMatrix::identity(2);
        h[(0, 1)] = c(1e-6, 0.0);
        assert!(matches!(hermitian_eigensystem(&h), Err(Error::NonHermitian(_))));
    }
}
