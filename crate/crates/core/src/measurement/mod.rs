//! POVMs, decoding maps and the perfect-discrimination test.
//!
//! A [`SeparablePovm`] is a list of rank-one product operators
//! `m_a |χ_a¹⟩⟨χ_a¹| ⊗ … ⊗ |χ_a^k⟩⟨χ_a^k|`; separability holds by
//! construction. A [`GeneralPovm`] holds arbitrary PSD elements and serves
//! as a global baseline. Both expose the quadratic forms `⟨ψ|M_a|ψ⟩`
//! through the [`Povm`] trait, which is all the fidelity formulas need.

mod bases;

pub use bases::{computational_basis, fourier_basis, plus_minus_basis, y_basis};

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron_vec, operator_norm, ComplexMatrix, Complex64, StateVector};
use crate::tolerance::Tolerances;

pub trait Povm: Send + Sync {
    fn dims(&self) -> &[usize];

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dense `M_a`.
    fn element(&self, a: usize) -> ComplexMatrix;

    /// `⟨ψ|M_a|ψ⟩`
    fn expectation(&self, a: usize, psi: &StateVector) -> f64;

    fn is_separable(&self) -> bool;

    /// `‖Σ_a M_a − I‖∞`
    fn completeness_residual(&self) -> f64 {
        let d: usize = self.dims().iter().product();
        let mut sum = ComplexMatrix::identity(d).scale(Complex64::new(-1.0, 0.0));
        for a in 0..self.len() {
            sum = &sum + &self.element(a);
        }
        operator_norm(&sum).expect("sum of Hermitian elements is Hermitian")
    }
}

/// Checks `‖Σ_a M_a − I‖∞` against the completeness tolerance.
pub fn require_complete(m: &dyn Povm) -> Result<()> {
    let r = m.completeness_residual();
    if r > Tolerances::current().completeness {
        return Err(Error::IncompletePovm(r));
    }
    Ok(())
}

pub fn check_completeness(m: &dyn Povm) -> f64 {
    m.completeness_residual()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableOutcome {
    weight: f64,
    factors: Vec<StateVector>,
    vector: Vec<Complex64>,
}

impl SeparableOutcome {
    /// One single-party state per party; `weight > 0`.
    pub fn new(weight: f64, factors: Vec<StateVector>) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::BadWeight(weight));
        }
        if factors.is_empty() {
            return Err(Error::InvalidDims(vec![]));
        }
        let mut vector = vec![Complex64::new(1.0, 0.0)];
        for f in &factors {
            if f.dims().len() != 1 {
                return Err(Error::ShapeMismatch {
                    expected: "single-party factor".into(),
                    got: format!("factor with dims {:?}", f.dims()),
                });
            }
            vector = kron_vec(&vector, f.amplitudes());
        }
        Ok(SeparableOutcome { weight, factors, vector })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn factors(&self) -> &[StateVector] {
        &self.factors
    }

    /// `|χ_a⟩`, the full product vector.
    pub fn vector(&self) -> &[Complex64] {
        &self.vector
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(StateVector::dim).collect()
    }
}

/// Rank-one separable POVM. Construction validates shapes and weights
/// only; completeness is checked where a computation needs it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparablePovm {
    dims: Vec<usize>,
    outcomes: Vec<SeparableOutcome>,
}

impl SeparablePovm {
    pub fn new(dims: Vec<usize>, outcomes: Vec<SeparableOutcome>) -> Result<Self> {
        crate::linalg::validate_dims(&dims)?;
        for o in &outcomes {
            let od = o.dims();
            if od != dims {
                return Err(Error::DimensionMismatch(dims, od));
            }
        }
        Ok(SeparablePovm { dims, outcomes })
    }

    pub fn outcomes(&self) -> &[SeparableOutcome] {
        &self.outcomes
    }

    /// `Σ_a m_a`, equal to `Π dims` for a complete POVM.
    pub fn weight_total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.weight).sum()
    }

    /// Same POVM with outcome `a` split into two copies of half weight.
    pub fn split_outcome(&self, a: usize) -> SeparablePovm {
        let mut outcomes = self.outcomes.clone();
        outcomes[a].weight *= 0.5;
        let half = outcomes[a].clone();
        outcomes.insert(a + 1, half);
        SeparablePovm {
            dims: self.dims.clone(),
            outcomes,
        }
    }

    /// Outcomes reordered so that new outcome `k` is old outcome `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> SeparablePovm {
        SeparablePovm {
            dims: self.dims.clone(),
            outcomes: order.iter().map(|&a| self.outcomes[a].clone()).collect(),
        }
    }
}

impl Povm for SeparablePovm {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn len(&self) -> usize {
        self.outcomes.len()
    }

    fn element(&self, a: usize) -> ComplexMatrix {
        let o = &self.outcomes[a];
        let d = o.vector.len();
        let mut m = ComplexMatrix::zeros(d, d);
        m.add_projector(o.weight, &o.vector);
        m
    }

    fn expectation(&self, a: usize, psi: &StateVector) -> f64 {
        let o = &self.outcomes[a];
        o.weight * crate::linalg::inner(&o.vector, psi.amplitudes()).norm_sqr()
    }

    fn is_separable(&self) -> bool {
        true
    }

    fn completeness_residual(&self) -> f64 {
        let d: usize = self.dims.iter().product();
        let mut sum = ComplexMatrix::identity(d).scale(Complex64::new(-1.0, 0.0));
        for o in &self.outcomes {
            sum.add_projector(o.weight, &o.vector);
        }
        operator_norm(&sum).expect("sum of projectors is Hermitian")
    }
}

/// Arbitrary PSD elements; separability is not asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPovm {
    dims: Vec<usize>,
    elements: Vec<ComplexMatrix>,
}

impl GeneralPovm {
    /// Validates Hermiticity and positivity of each element.
    pub fn new(dims: Vec<usize>, elements: Vec<ComplexMatrix>) -> Result<Self> {
        let d = crate::linalg::validate_dims(&dims)?;
        let tol = Tolerances::current();
        for (a, e) in elements.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::ShapeMismatch {
                    expected: format!("{d}x{d}"),
                    got: format!("{}x{}", e.rows(), e.cols()),
                });
            }
            let low = hermitian_eigenvalues(e)?.last().copied().unwrap_or(0.0);
            if low < -tol.normalization {
                return Err(Error::NotPositive(a));
            }
        }
        Ok(GeneralPovm { dims, elements })
    }

    /// `{|e_k⟩⟨e_k|}` for the columns of an orthonormal basis.
    pub fn from_basis(dims: Vec<usize>, basis: &[StateVector]) -> Result<Self> {
        Self::new(dims, basis.iter().map(StateVector::projector).collect())
    }

    /// The single-outcome POVM `{I}`.
    pub fn trivial(dims: Vec<usize>) -> Result<Self> {
        let d = crate::linalg::validate_dims(&dims)?;
        Self::new(dims, vec![ComplexMatrix::identity(d)])
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

impl Povm for GeneralPovm {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn len(&self) -> usize {
        self.elements.len()
    }

    fn element(&self, a: usize) -> ComplexMatrix {
        self.elements[a].clone()
    }

    fn expectation(&self, a: usize, psi: &StateVector) -> f64 {
        self.elements[a].quadratic_form(psi.amplitudes())
    }

    fn is_separable(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Guess {
    /// Guess the ensemble member with this index.
    Member(usize),
    /// Guess an arbitrary state.
    State(StateVector),
}

/// One guess per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingMap {
    guesses: Vec<Guess>,
}

impl DecodingMap {
    pub fn new(guesses: Vec<Guess>) -> Self {
        DecodingMap { guesses }
    }

    pub fn members(indices: &[usize]) -> Self {
        DecodingMap {
            guesses: indices.iter().map(|&i| Guess::Member(i)).collect(),
        }
    }

    pub fn states(states: Vec<StateVector>) -> Self {
        DecodingMap {
            guesses: states.into_iter().map(Guess::State).collect(),
        }
    }

    pub fn guesses(&self) -> &[Guess] {
        &self.guesses
    }

    pub fn len(&self) -> usize {
        self.guesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guesses.is_empty()
    }

    /// Member index per outcome; fails on any free-form guess.
    pub fn member_indices(&self) -> Result<Vec<usize>> {
        self.guesses
            .iter()
            .enumerate()
            .map(|(a, g)| match g {
                Guess::Member(i) => Ok(*i),
                Guess::State(_) => Err(Error::GuessNotEnsembleMember(a)),
            })
            .collect()
    }

    /// Checks arity against `m` and every reference and state against `s`.
    pub fn check_against(&self, s: &Ensemble, m: &dyn Povm) -> Result<()> {
        if self.len() != m.len() {
            return Err(Error::DecodingArityMismatch {
                expected: m.len(),
                got: self.len(),
            });
        }
        for g in &self.guesses {
            match g {
                Guess::Member(i) if *i >= s.len() => {
                    return Err(Error::MemberOutOfRange { index: *i, len: s.len() });
                }
                Guess::State(phi) if phi.dims() != s.dims() => {
                    return Err(Error::DimensionMismatch(s.dims().to_vec(), phi.dims().to_vec()));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// `|φ_a⟩`
    pub fn guess_state<'a>(&'a self, a: usize, s: &'a Ensemble) -> &'a StateVector {
        match &self.guesses[a] {
            Guess::Member(i) => &s.states()[*i],
            Guess::State(phi) => phi,
        }
    }
}

/// A named separable measurement with an optional decoding; without one,
/// maximum-likelihood decoding applies.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub name: String,
    pub povm: SeparablePovm,
    pub decoding: Option<DecodingMap>,
}

/// Product-basis measurement: one outcome per tuple of local basis
/// vectors, lexicographic with party 0 most significant, all weights 1.
pub fn make_local_basis_povm(bases: &[Vec<StateVector>]) -> Result<SeparablePovm> {
    let tol = Tolerances::current();
    let mut dims = Vec::with_capacity(bases.len());
    for (party, basis) in bases.iter().enumerate() {
        let d = basis.first().map_or(0, StateVector::dim);
        let complete = d >= 2
            && basis.len() == d
            && basis.iter().all(|v| v.dims() == [d])
            && (0..d).all(|i| ((i + 1)..d).all(|j| basis[i].inner(&basis[j]).norm() <= tol.orthogonality));
        if !complete {
            return Err(Error::IncompleteBasis { party });
        }
        dims.push(d);
    }
    crate::linalg::validate_dims(&dims)?;
    let total: usize = dims.iter().product();
    let mut outcomes = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..total {
        let factors = digits.iter().zip(bases).map(|(&k, b)| b[k].clone()).collect();
        outcomes.push(SeparableOutcome::new(1.0, factors)?);
        for p in (0..dims.len()).rev() {
            digits[p] += 1;
            if digits[p] < dims[p] {
                break;
            }
            digits[p] = 0;
        }
    }
    SeparablePovm::new(dims, outcomes)
}

/// `M(i) = Σ_{a: G(a) = i} M_a`
pub fn grouped_element(m: &dyn Povm, g: &DecodingMap, i: usize) -> Result<ComplexMatrix> {
    let members = g.member_indices()?;
    if members.len() != m.len() {
        return Err(Error::DecodingArityMismatch {
            expected: m.len(),
            got: members.len(),
        });
    }
    let d: usize = m.dims().iter().product();
    let mut out = ComplexMatrix::zeros(d, d);
    for (a, &guess) in members.iter().enumerate() {
        if guess == i {
            out = &out + &m.element(a);
        }
    }
    Ok(out)
}

/// Largest `|⟨ψ_j|M(i)|ψ_j⟩ − δ_ij|` over `i, j ∈ members`.
pub fn discrimination_defect(s: &Ensemble, m: &dyn Povm, g: &DecodingMap, members: &[usize]) -> Result<f64> {
    g.check_against(s, m)?;
    let decoded = g.member_indices()?;
    let mut worst = 0.0f64;
    for &j in members {
        if j >= s.len() {
            return Err(Error::MemberOutOfRange { index: j, len: s.len() });
        }
        let psi = &s.states()[j];
        let mut by_guess = vec![0.0; s.len()];
        for (a, &i) in decoded.iter().enumerate() {
            by_guess[i] += m.expectation(a, psi);
        }
        for &i in members {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((by_guess[i] - target).abs());
        }
    }
    Ok(worst)
}

/// `⟨ψ_j|M(i)|ψ_j⟩ = δ_ij` for every pair of ensemble members.
pub fn check_perfect_discrimination(s: &Ensemble, m: &dyn Povm, g: &DecodingMap) -> Result<bool> {
    let all: Vec<usize> = (0..s.len()).collect();
    Ok(discrimination_defect(s, m, g, &all)? <= Tolerances::current().discrimination)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Ensemble {
        let s = 0.5f64.sqrt();
        let states = [[s, 0.0, 0.0, s], [s, 0.0, 0.0, -s], [0.0, s, s, 0.0], [0.0, s, -s, 0.0]]
            .iter()
            .map(|a| StateVector::from_real(&[2, 2], a).unwrap())
            .collect();
        Ensemble::equiprobable(states).unwrap()
    }

    fn pm2() -> SeparablePovm {
        make_local_basis_povm(&[plus_minus_basis(), plus_minus_basis()]).unwrap()
    }

    #[test]
    fn local_basis_outcome_order() {
        let m = make_local_basis_povm(&[computational_basis(2), computational_basis(2)]).unwrap();
        assert_eq!(m.len(), 4);
        for a in 0..4 {
            let e = StateVector::basis(&[2, 2], a).unwrap();
            assert!((m.expectation(a, &e) - 1.0).abs() < 1e-15);
        }
        assert_eq!(m.weight_total(), 4.0);
        assert!(m.completeness_residual() <= 1e-12);

        let m3 = make_local_basis_povm(&vec![computational_basis(2); 3]).unwrap();
        assert_eq!(m3.len(), 8);
        assert_eq!(m3.weight_total(), 8.0);

        // |+−⟩ is outcome 1
        let s = 0.5;
        let pm = StateVector::from_real(&[2, 2], &[s, -s, s, -s]).unwrap();
        assert!((pm2().expectation(1, &pm) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn incomplete_bases_rejected() {
        let short = vec![computational_basis(2)[0].clone()];
        assert!(matches!(
            make_local_basis_povm(&[short, computational_basis(2)]),
            Err(Error::IncompleteBasis { party: 0 })
        ));
        let skew = vec![computational_basis(2)[0].clone(), plus_minus_basis()[0].clone()];
        assert!(matches!(
            make_local_basis_povm(&[computational_basis(2), skew]),
            Err(Error::IncompleteBasis { party: 1 })
        ));
    }

    #[test]
    fn completeness_residuals() {
        let m = pm2();
        let dropped = SeparablePovm::new(vec![2, 2], m.outcomes()[1..].to_vec()).unwrap();
        assert!((dropped.completeness_residual() - 1.0).abs() < 1e-12);
        assert!(matches!(require_complete(&dropped), Err(Error::IncompletePovm(_))));

        let half = ComplexMatrix::identity(4).scale(Complex64::new(0.5, 0.0));
        let g = GeneralPovm::new(vec![2, 2], vec![half.clone(), half]).unwrap();
        assert!(g.completeness_residual() < 1e-15);
    }

    #[test]
    fn weights_must_be_positive() {
        let f = computational_basis(2);
        assert!(matches!(SeparableOutcome::new(0.0, f.clone()), Err(Error::BadWeight(_))));
        assert!(matches!(SeparableOutcome::new(-1.0, f), Err(Error::BadWeight(_))));
    }

    #[test]
    fn general_povm_rejects_negative_elements() {
        let neg = ComplexMatrix::from_real_diagonal(&[1.0, -0.5, 0.0, 0.0]);
        assert!(matches!(GeneralPovm::new(vec![2, 2], vec![neg]), Err(Error::NotPositive(0))));
    }

    #[test]
    fn grouped_elements_of_plus_minus_strategy() {
        let m = pm2();
        let g = DecodingMap::members(&[0, 1, 1, 0]);
        let m1 = grouped_element(&m, &g, 0).unwrap();
        let expect = &m.element(0) + &m.element(3);
        assert!(m1.max_abs_diff(&expect) < 1e-15);
        let total = &m1 + &grouped_element(&m, &g, 1).unwrap();
        assert!(total.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);

        let all_one = DecodingMap::members(&[2, 2, 2, 2]);
        assert!(grouped_element(&m, &all_one, 2).unwrap().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);

        let free = DecodingMap::states(vec![StateVector::basis(&[2, 2], 0).unwrap(); 4]);
        assert!(matches!(grouped_element(&m, &free, 0), Err(Error::GuessNotEnsembleMember(0))));
    }

    #[test]
    fn perfect_discrimination() {
        let b = bell();
        let pair = Ensemble::equiprobable(b.states()[..2].to_vec()).unwrap();
        let g = DecodingMap::members(&[0, 1, 1, 0]);
        assert!(check_perfect_discrimination(&pair, &pm2(), &g).unwrap());

        // no product basis with any decoding separates all four
        let comp = make_local_basis_povm(&[computational_basis(2), computational_basis(2)]).unwrap();
        for m in [pm2(), comp] {
            for code in 0..256usize {
                let dec: Vec<usize> = (0..4).map(|a| (code >> (2 * a)) & 3).collect();
                assert!(!check_perfect_discrimination(&b, &m, &DecodingMap::members(&dec)).unwrap());
            }
        }

        let single = Ensemble::equiprobable(vec![b.states()[0].clone()]).unwrap();
        let trivial = GeneralPovm::trivial(vec![2, 2]).unwrap();
        assert!(check_perfect_discrimination(&single, &trivial, &DecodingMap::members(&[0])).unwrap());
    }

    #[test]
    fn discrimination_invariant_under_outcome_permutation() {
        let b = bell();
        let pair = Ensemble::equiprobable(b.states()[..2].to_vec()).unwrap();
        let m = pm2();
        let order = [3, 1, 0, 2];
        let dec = [0, 1, 1, 0];
        let permuted_dec: Vec<usize> = order.iter().map(|&a| dec[a]).collect();
        assert!(check_perfect_discrimination(&pair, &m.permuted(&order), &DecodingMap::members(&permuted_dec)).unwrap());
    }

    #[test]
    fn decoding_checks() {
        let b = bell();
        let m = pm2();
        assert!(matches!(
            DecodingMap::members(&[0, 1]).check_against(&b, &m),
            Err(Error::DecodingArityMismatch { expected: 4, got: 2 })
        ));
        assert!(matches!(
            DecodingMap::members(&[0, 1, 2, 7]).check_against(&b, &m),
            Err(Error::MemberOutOfRange { index: 7, len: 4 })
        ));
    }

    #[test]
    fn outcome_operator_norm_equals_weight() {
        let f = fourier_basis(3);
        let o = SeparableOutcome::new(2.5, vec![f[1].clone(), f[2].clone()]).unwrap();
        let m = SeparablePovm::new(vec![3, 3], vec![o]).unwrap();
        let e = m.element(0);
        assert!((operator_norm(&e).unwrap() - 2.5).abs() < 1e-12);
        assert!(hermitian_eigenvalues(&e).unwrap().iter().all(|&x| x > -1e-12));
    }
}
