use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::fidelity::quadratic_forms;
use crate::linalg::StateVector;
use crate::measurement::{
    computational_basis, discrimination_defect, fourier_basis, make_local_basis_povm, require_complete, y_basis,
    DecodingMap, Povm, SeparablePovm,
};
use crate::tolerance::Tolerances;

/// A measurement and decoding that perfectly separate a subset.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub povm: SeparablePovm,
    pub decoding: DecodingMap,
}

/// Ensemble members claimed to be perfectly distinguishable by a separable
/// measurement, either with a checkable certificate or declared by the
/// caller.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishableSubset {
    members: Vec<usize>,
    certificate: Option<Certificate>,
}

impl DistinguishableSubset {
    pub fn declared(members: Vec<usize>) -> Self {
        DistinguishableSubset {
            members,
            certificate: None,
        }
    }

    pub fn certified(members: Vec<usize>, certificate: Certificate) -> Self {
        DistinguishableSubset {
            members,
            certificate: Some(certificate),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    pub fn is_certified(&self) -> bool {
        self.certificate.is_some()
    }

    /// `P(X) = Σ_{i ∈ X} p_i`
    pub fn weight(&self, s: &Ensemble) -> f64 {
        self.members.iter().map(|&i| s.probs()[i]).sum()
    }

    /// Members in range, distinct, mutually orthogonal; a certificate, if
    /// present, must pass the perfect-discrimination test on the members.
    pub fn validate(&self, s: &Ensemble) -> Result<()> {
        let bad = |why: &str| Error::InvalidSubset(self.members.clone(), why.into());
        if self.members.is_empty() {
            return Err(bad("empty"));
        }
        let mut sorted = self.members.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.members.len() {
            return Err(bad("repeated member"));
        }
        if let Some(&i) = sorted.iter().find(|&&i| i >= s.len()) {
            return Err(Error::MemberOutOfRange { index: i, len: s.len() });
        }
        let tol = Tolerances::current();
        for (x, &i) in sorted.iter().enumerate() {
            for &j in &sorted[x + 1..] {
                if s.states()[i].inner(&s.states()[j]).norm() > tol.orthogonality {
                    return Err(bad("members are not mutually orthogonal"));
                }
            }
        }
        if let Some(c) = &self.certificate {
            if c.povm.dims() != s.dims() {
                return Err(Error::DimensionMismatch(s.dims().to_vec(), c.povm.dims().to_vec()));
            }
            require_complete(&c.povm)?;
            if discrimination_defect(s, &c.povm, &c.decoding, &self.members)? > tol.discrimination {
                return Err(bad("certificate does not discriminate the members"));
            }
        }
        Ok(())
    }
}

fn standard_local_bases(d: usize) -> Vec<Vec<StateVector>> {
    let mut out = vec![computational_basis(d), fourier_basis(d)];
    if d == 2 {
        out.push(y_basis());
    }
    out
}

/// Product bases built from computational, Fourier and (for qubits) `Y`
/// bases on each party, at most `limit` of them.
pub(crate) fn standard_product_bases(dims: &[usize], limit: usize) -> Vec<SeparablePovm> {
    let choices: Vec<Vec<Vec<StateVector>>> = dims.iter().map(|&d| standard_local_bases(d)).collect();
    let mut idx = vec![0usize; dims.len()];
    let mut out = Vec::new();
    loop {
        let bases: Vec<Vec<StateVector>> = idx.iter().zip(&choices).map(|(&k, c)| c[k].clone()).collect();
        out.push(make_local_basis_povm(&bases).expect("standard bases are complete"));
        if out.len() >= limit {
            return out;
        }
        let mut p = dims.len();
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < choices[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

const PRODUCT_BASIS_LIMIT: usize = 243;
const EXHAUSTIVE_LIMIT: usize = 20;

/// Heaviest set of states whose outcome supports are pairwise disjoint,
/// ties resolved toward lower indices.
fn heaviest_disjoint(probs: &[f64], supports: &[Vec<bool>]) -> Vec<usize> {
    let n = probs.len();
    let disjoint = |i: usize, j: usize| supports[i].iter().zip(&supports[j]).all(|(a, b)| !(*a && *b));
    let mut best: (f64, Vec<usize>) = (-1.0, vec![]);
    if n <= EXHAUSTIVE_LIMIT {
        fn walk(
            i: usize,
            n: usize,
            cur: &mut Vec<usize>,
            w: f64,
            probs: &[f64],
            ok: &dyn Fn(usize, usize) -> bool,
            best: &mut (f64, Vec<usize>),
        ) {
            if i == n {
                if w > best.0 + 1e-15 {
                    *best = (w, cur.clone());
                }
                return;
            }
            let rest: f64 = probs[i..].iter().sum();
            if w + rest <= best.0 + 1e-15 {
                return;
            }
            if cur.iter().all(|&j| ok(i, j)) {
                cur.push(i);
                walk(i + 1, n, cur, w + probs[i], probs, ok, best);
                cur.pop();
            }
            walk(i + 1, n, cur, w, probs, ok, best);
        }
        walk(0, n, &mut Vec::new(), 0.0, probs, &disjoint, &mut best);
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
        let mut chosen: Vec<usize> = Vec::new();
        for i in order {
            if chosen.iter().all(|&j| disjoint(i, j)) {
                chosen.push(i);
            }
        }
        chosen.sort_unstable();
        best = (0.0, chosen);
    }
    best.1
}

/// Subsets found automatically: every state alone (computational basis,
/// every outcome decoded to it); for each standard product basis, the
/// heaviest set with pairwise disjoint outcome supports and any not yet
/// covered pair with disjoint supports; finally every orthogonal pair still
/// not covered, declared.
///
/// Any two orthogonal pure states can be told apart perfectly by local
/// operations and classical communication, which is why uncertified pairs
/// may still be declared.
pub fn default_subsets(s: &Ensemble) -> Vec<DistinguishableSubset> {
    let n = s.len();
    let comp = standard_product_bases(s.dims(), 1).remove(0);
    let mut out: Vec<DistinguishableSubset> = (0..n)
        .map(|i| {
            let dec = DecodingMap::members(&vec![i; comp.len()]);
            DistinguishableSubset::certified(
                vec![i],
                Certificate {
                    povm: comp.clone(),
                    decoding: dec,
                },
            )
        })
        .collect();
    if n < 2 {
        return out;
    }
    let tol = Tolerances::current();
    let mut covered = vec![vec![false; n]; n];
    for povm in standard_product_bases(s.dims(), PRODUCT_BASIS_LIMIT) {
        let forms = quadratic_forms(s, &povm);
        let supports: Vec<Vec<bool>> = (0..n)
            .map(|i| forms.iter().map(|q| q[i] > tol.discrimination).collect())
            .collect();
        let weights: Vec<f64> = s.probs().iter().map(|p| p + 1e-12).collect();
        let mut found = vec![heaviest_disjoint(&weights, &supports)];
        for i in 0..n {
            for j in (i + 1)..n {
                if !covered[i][j] && supports[i].iter().zip(&supports[j]).all(|(a, b)| !(*a && *b)) {
                    found.push(vec![i, j]);
                }
            }
        }
        for set in found {
            if set.len() < 2 || out.iter().any(|x| x.members == set) {
                continue;
            }
            let decoding: Vec<usize> = (0..povm.len())
                .map(|a| *set.iter().find(|&&i| supports[i][a]).unwrap_or(&set[0]))
                .collect();
            let cand = DistinguishableSubset::certified(
                set.clone(),
                Certificate {
                    povm: povm.clone(),
                    decoding: DecodingMap::members(&decoding),
                },
            );
            if cand.validate(s).is_ok() {
                for &i in &set {
                    for &j in &set {
                        covered[i][j] = true;
                    }
                }
                out.push(cand);
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !covered[i][j] && s.states()[i].inner(&s.states()[j]).norm() <= tol.orthogonality {
                out.push(DistinguishableSubset::declared(vec![i, j]));
            }
        }
    }
    out
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
        Ensemble::new(states, vec![0.4, 0.3, 0.2, 0.1]).unwrap()
    }

    #[test]
    fn every_bell_pair_is_certified() {
        let b = bell();
        let subs = default_subsets(&b);
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(
                    subs.iter().any(|x| x.is_certified() && x.members.contains(&i) && x.members.contains(&j)),
                    "pair {i},{j}"
                );
            }
        }
        assert!(subs.iter().all(|x| x.members.len() <= 2));
        for x in &subs {
            x.validate(&b).unwrap();
        }
    }

    #[test]
    fn validation_rejects_bad_subsets() {
        let b = bell();
        assert!(DistinguishableSubset::declared(vec![]).validate(&b).is_err());
        assert!(DistinguishableSubset::declared(vec![0, 0]).validate(&b).is_err());
        assert!(DistinguishableSubset::declared(vec![0, 9]).validate(&b).is_err());

        let comp = standard_product_bases(&[2, 2], 1).remove(0);
        let wrong = Certificate {
            povm: comp,
            decoding: DecodingMap::members(&[0, 1, 1, 0]),
        };
        let x = DistinguishableSubset::certified(vec![0, 1], wrong);
        assert!(matches!(x.validate(&b), Err(Error::InvalidSubset(..))));
    }

    #[test]
    fn nonorthogonal_members_rejected() {
        let s = 0.5f64.sqrt();
        let states = vec![
            StateVector::from_real(&[2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap(),
            StateVector::from_real(&[2, 2], &[s, 0.0, 0.0, s]).unwrap(),
        ];
        let e = Ensemble::equiprobable(states).unwrap();
        assert!(DistinguishableSubset::declared(vec![0, 1]).validate(&e).is_err());
        assert_eq!(default_subsets(&e).len(), 2);
    }

    #[test]
    fn heaviest_disjoint_prefers_weight() {
        let supports = vec![vec![true, false, false], vec![false, true, false], vec![true, true, false]];
        assert_eq!(heaviest_disjoint(&[0.2, 0.2, 0.6], &supports), vec![2]);
        assert_eq!(heaviest_disjoint(&[0.3, 0.3, 0.4], &supports), vec![0, 1]);
    }
}
