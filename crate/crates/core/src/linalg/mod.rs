//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Dimensions in this crate stay in the tens (a few hundred at most), so
//! everything here is a straightforward dense kernel: a cyclic Jacobi
//! eigensolver for Hermitian matrices, an SVD built on top of it, and the
//! Schmidt decomposition of a pure state across a bipartition.

mod eigen;
mod matrix;
mod norms;
mod schmidt;
mod state;
mod svd;

pub use eigen::{hermitian_eigensystem, hermitian_eigenvalues, Eigensystem};
pub use matrix::{inner, kron_vec, norm, pairwise_sum, ComplexMatrix};
pub use norms::{ky_fan_norm, operator_norm};
pub use schmidt::{max_schmidt_sq, schmidt_decompose, SchmidtData};
pub use state::StateVector;
pub use svd::{singular_value_decomposition, Svd};

pub(crate) use matrix::orthogonalize;
pub(crate) use state::validate_dims;

pub use num_complex::Complex64;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{all_bipartitions, Bipartition};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_hermitian(n: usize, seed: &[f64]) -> ComplexMatrix {
        let mut k = 0;
        let mut next = || {
            k += 1;
            seed[k % seed.len()] * (k as f64 * 0.7).cos()
        };
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(next());
            for j in (i + 1)..n {
                let z = Complex64::new(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn state_strategy(max_total: usize) -> impl Strategy<Value = StateVector> {
        prop::collection::vec(2usize..=4, 1..=3)
            .prop_filter("total dim", move |d| d.iter().product::<usize>() <= max_total)
            .prop_flat_map(|dims| {
                let total: usize = dims.iter().product();
                (Just(dims), prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), total))
            })
            .prop_filter_map("nonzero", |(dims, amps)| {
                StateVector::normalized(dims, amps.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eigen_reconstruction(n in 1usize..=64, seed in prop::collection::vec(-1.0f64..1.0, 7..19)) {
            let a = random_hermitian(n, &seed);
            let e = hermitian_eigensystem(&a).unwrap();
            prop_assert!(e.reconstruct().max_abs_diff(&a) <= 1e-9);
            for w in e.values.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            for i in 0..n {
                let av = a.mul_vec(&e.vectors[i]);
                for (x, y) in av.iter().zip(&e.vectors[i]) {
                    prop_assert!((x - y * e.values[i]).norm() <= 1e-9);
                }
                for j in 0..n {
                    let g = inner(&e.vectors[i], &e.vectors[j]);
                    let expect = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((g - c(expect)).norm() <= 1e-10);
                }
            }
        }

        #[test]
        fn schmidt_round_trip(psi in state_strategy(64)) {
            if psi.dims().len() < 2 {
                return Ok(());
            }
            for cut in all_bipartitions(psi.dims()).unwrap() {
                let data = schmidt_decompose(&psi, &cut).unwrap();
                let lambdas = data.lambdas();
                prop_assert!((lambdas.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
                for w in data.coefficients.windows(2) {
                    prop_assert!(w[0] >= w[1]);
                }
                prop_assert!(data.coefficients.len() <= cut.d1());
                let target = psi.reshape(&cut).unwrap();
                let err: f64 = data.reconstruct().iter().zip(target.as_slice())
                    .map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(err <= 1e-9);
            }
        }

        #[test]
        fn ky_fan_monotone_and_trace(n in 1usize..=12, seed in prop::collection::vec(-1.0f64..1.0, 5..13)) {
            let b = random_hermitian(n, &seed);
            let psd = &b * &b.adjoint();
            let mut prev = 0.0;
            for r in 1..=n {
                let k = ky_fan_norm(&psd, r).unwrap();
                prop_assert!(k + 1e-12 >= prev);
                prev = k;
            }
            prop_assert!((prev - psd.trace().re).abs() <= 1e-10 * psd.trace().re.max(1.0));
        }
    }

    #[test]
    fn schmidt_examples() {
        let s = 0.5f64.sqrt();
        let cut = Bipartition::new(&[2, 2], &[0]).unwrap();
        let phi = StateVector::from_real(&[2, 2], &[s, 0.0, 0.0, s]).unwrap();
        let l = schmidt_decompose(&phi, &cut).unwrap().lambdas();
        assert!((l[0] - 0.5).abs() < 1e-14 && (l[1] - 0.5).abs() < 1e-14);

        let prod = StateVector::basis(&[2, 2], 0).unwrap();
        let l = schmidt_decompose(&prod, &cut).unwrap().lambdas();
        assert!((l[0] - 1.0).abs() < 1e-14 && l[1].abs() < 1e-14);
        assert_eq!(max_schmidt_sq(&prod, &cut).unwrap(), 1.0);

        // 0.8|00⟩ + 0.6|11⟩: reshaped matrix diag(0.8, 0.6)
        let tilted = StateVector::from_real(&[2, 2], &[0.8, 0.0, 0.0, 0.6]).unwrap();
        let l = schmidt_decompose(&tilted, &cut).unwrap().lambdas();
        assert!((l[0] - 0.64).abs() < 1e-12 && (l[1] - 0.36).abs() < 1e-12);
    }

    #[test]
    fn ghz_largest_coefficient() {
        let s = 0.5f64.sqrt();
        let mut amps = vec![0.0; 8];
        amps[0] = s;
        amps[7] = s;
        let ghz = StateVector::from_real(&[2, 2, 2], &amps).unwrap();
        let cut = Bipartition::new(&[2, 2, 2], &[0]).unwrap();
        assert!((max_schmidt_sq(&ghz, &cut).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn schmidt_rejects_foreign_cut() {
        let psi = StateVector::basis(&[2, 3], 0).unwrap();
        let cut = Bipartition::new(&[2, 2], &[0]).unwrap();
        assert!(schmidt_decompose(&psi, &cut).is_err());
    }
}
