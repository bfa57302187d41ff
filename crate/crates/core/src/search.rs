//! Numerical lower bounds on `F_S` and `P_s` by searching over product-basis
//! measurements: random restarts, each refined by pattern search over plane
//! rotations of the local bases.
//!
//! Every value returned is attained by an explicit complete separable POVM,
//! so it is a certified lower bound. Nothing guarantees it is the optimum.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::fidelity::{achievable_fidelity, achievable_from_forms, ml_from_forms};
use crate::linalg::{orthogonalize, Complex64, ComplexMatrix, StateVector};
use crate::measurement::{make_local_basis_povm, DecodingMap, Povm, SeparablePovm};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Achievable fidelity `F(M)`.
    Fidelity,
    /// Success probability `P_s(M)` under maximum-likelihood decoding.
    Success,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Fidelity => "fidelity",
            Objective::Success => "success",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Cap on refinement sweeps per restart.
    pub sweeps: usize,
    /// Rotation angles in radians, strictly decreasing.
    pub steps: Vec<f64>,
    pub seed: u64,
    pub objective: Objective,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 64,
            sweeps: 50,
            steps: vec![0.5, 0.1, 0.02, 0.004],
            seed: 0,
            objective: Objective::Fidelity,
        }
    }
}

impl SearchConfig {
    pub fn with_objective(objective: Objective) -> Self {
        SearchConfig {
            objective,
            ..SearchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::BadConfig("restarts must be >= 1".into()));
        }
        if self.steps.is_empty() || self.steps.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::BadConfig("steps must be positive".into()));
        }
        if self.steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::BadConfig("steps must be strictly decreasing".into()));
        }
        Ok(())
    }
}

/// One orthonormal basis per party; `bases[p][b]` is basis vector `b` of
/// party `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBasis {
    bases: Vec<Vec<Vec<Complex64>>>,
}

impl ProductBasis {
    pub fn new(bases: &[Vec<StateVector>]) -> Result<Self> {
        make_local_basis_povm(bases)?;
        Ok(ProductBasis {
            bases: bases
                .iter()
                .map(|b| b.iter().map(|v| v.amplitudes().to_vec()).collect())
                .collect(),
        })
    }

    /// Recovers the local bases of a measurement built like
    /// [`make_local_basis_povm`]; `None` if it is not of that form.
    pub fn from_povm(m: &SeparablePovm) -> Option<Self> {
        let dims = m.dims().to_vec();
        if m.len() != dims.iter().product::<usize>() {
            return None;
        }
        let mut bases = Vec::with_capacity(dims.len());
        for p in 0..dims.len() {
            let stride: usize = dims[p + 1..].iter().product();
            let b: Vec<StateVector> = (0..dims[p]).map(|k| m.outcomes()[k * stride].factors()[p].clone()).collect();
            bases.push(b);
        }
        let pb = ProductBasis::new(&bases).ok()?;
        let rebuilt = pb.to_povm();
        let tol = Tolerances::current().orthogonality;
        let same = m.outcomes().iter().zip(rebuilt.outcomes()).all(|(x, y)| {
            (x.weight() - 1.0).abs() <= tol && (crate::linalg::inner(x.vector(), y.vector()).norm() - 1.0).abs() <= tol
        });
        same.then_some(pb)
    }

    /// Per-party Haar-random bases: Gram–Schmidt on the columns of a matrix
    /// with independent standard normal real and imaginary parts.
    pub fn random<R: Rng>(dims: &[usize], rng: &mut R) -> Self {
        let bases = dims
            .iter()
            .map(|&d| {
                let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(d);
                while basis.len() < d {
                    let mut v = gaussian_vector(d, rng);
                    if orthogonalize(&mut v, &basis) > 1e-8 {
                        basis.push(v);
                    }
                }
                basis
            })
            .collect();
        ProductBasis { bases }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    pub fn local_bases(&self) -> Vec<Vec<StateVector>> {
        self.bases
            .iter()
            .map(|b| {
                b.iter()
                    .map(|v| StateVector::from_parts_unchecked(vec![v.len()], v.clone()))
                    .collect()
            })
            .collect()
    }

    pub fn to_povm(&self) -> SeparablePovm {
        make_local_basis_povm(&self.local_bases()).expect("orthonormal by construction")
    }

    /// `v_j ← c v_j + s e^{iφ} v_k`, `v_k ← −s e^{−iφ} v_j + c v_k`.
    fn rotate(&mut self, party: usize, j: usize, k: usize, theta: f64, phi: f64) {
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(s, phi);
        let b = &mut self.bases[party];
        for x in 0..b[j].len() {
            let (vj, vk) = (b[j][x], b[k][x]);
            b[j][x] = vj * c + e * vk;
            b[k][x] = -e.conj() * vj + vk * c;
        }
    }

    /// Amplitudes `⟨v_a|ψ⟩` for every outcome `a`, lexicographic with party
    /// 0 most significant, by contracting one party at a time.
    fn coefficients(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let dims = self.dims();
        let mut cur = psi.to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
        for (p, &d) in dims.iter().enumerate() {
            let outer: usize = dims[..p].iter().product();
            let inner: usize = dims[p + 1..].iter().product();
            next.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for o in 0..outer {
                for (b, v) in self.bases[p].iter().enumerate() {
                    let dst = (o * d + b) * inner;
                    for (x, vx) in v.iter().enumerate() {
                        let w = vx.conj();
                        let src = (o * d + x) * inner;
                        for i in 0..inner {
                            next[dst + i] += w * cur[src + i];
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    fn forms(&self, s: &Ensemble) -> Vec<Vec<f64>> {
        let coeffs: Vec<Vec<Complex64>> = s.states().iter().map(|psi| self.coefficients(psi.amplitudes())).collect();
        (0..coeffs.first().map_or(0, Vec::len))
            .map(|a| coeffs.iter().map(|c| c[a].norm_sqr()).collect())
            .collect()
    }
}

fn gaussian_vector<R: Rng>(d: usize, rng: &mut R) -> Vec<Complex64> {
    (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-random pure state on the full space of `dims`.
pub fn haar_state<R: Rng>(dims: &[usize], rng: &mut R) -> Result<StateVector> {
    let d = crate::linalg::validate_dims(dims)?;
    StateVector::normalized(dims.to_vec(), gaussian_vector(d, rng))
}

/// Tensor product of independent Haar-random local states.
pub fn random_product_state<R: Rng>(dims: &[usize], rng: &mut R) -> Result<StateVector> {
    crate::linalg::validate_dims(dims)?;
    let mut out: Option<StateVector> = None;
    for &d in dims {
        let local = haar_state(&[d], rng)?;
        out = Some(match out {
            None => local,
            Some(acc) => acc.tensor(&local),
        });
    }
    Ok(out.expect("at least one party"))
}

/// Per-party Haar-random product-basis measurement.
pub fn random_product_basis<R: Rng>(dims: &[usize], rng: &mut R) -> Result<SeparablePovm> {
    crate::linalg::validate_dims(dims)?;
    Ok(ProductBasis::random(dims, rng).to_povm())
}

/// Generator for restart `index`: an independent stream of the seed.
pub fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub objective: Objective,
    pub best_value: f64,
    pub best_measurement: SeparablePovm,
    /// Guess states (fidelity) or maximum-likelihood members (success).
    pub best_decoding: DecodingMap,
    pub best_basis: ProductBasis,
    /// Best value of each restart, seeded starts first.
    pub trace: Vec<f64>,
    pub best_restart: usize,
}

struct Evaluator<'a> {
    s: &'a Ensemble,
    gram: Option<ComplexMatrix>,
}

impl<'a> Evaluator<'a> {
    fn new(s: &'a Ensemble, objective: Objective) -> Self {
        // For orthogonal ensembles F(M) equals the ML success probability,
        // which is much cheaper.
        let gram = (objective == Objective::Fidelity && !s.is_orthogonal()).then(|| s.gram_matrix());
        Evaluator { s, gram }
    }

    fn value(&self, basis: &ProductBasis) -> f64 {
        let forms = basis.forms(self.s);
        match &self.gram {
            Some(g) => achievable_from_forms(self.s, g, &forms).0,
            None => ml_from_forms(self.s, &forms).0,
        }
    }
}

/// Pattern search from `start`: each sweep tries rotations by `±step` with
/// phase `0` or `π/2` on every plane of every party, keeping any that
/// improve the objective. When neither sign helps, the vertex of the
/// parabola through the three values is tried. A sweep without improvement
/// moves to the next step. Returns the refined basis, its value, and the value after each
/// sweep (nondecreasing).
fn pattern_search(eval: &Evaluator, start: ProductBasis, cfg: &SearchConfig) -> (ProductBasis, f64, Vec<f64>) {
    let mut basis = start;
    let mut value = eval.value(&basis);
    let mut history = Vec::new();
    let mut level = 0;
    let dims = basis.dims();
    for _ in 0..cfg.sweeps {
        if level >= cfg.steps.len() {
            break;
        }
        let step = cfg.steps[level];
        let mut improved = false;
        for (p, &d) in dims.iter().enumerate() {
            for j in 0..d {
                for k in (j + 1)..d {
                    for phi in [0.0, FRAC_PI_2] {
                        let mut probes = [0.0; 2];
                        let mut moved = false;
                        for (t, theta) in [step, -step].into_iter().enumerate() {
                            let mut trial = basis.clone();
                            trial.rotate(p, j, k, theta, phi);
                            probes[t] = eval.value(&trial);
                            if probes[t] > value + 1e-14 {
                                basis = trial;
                                value = probes[t];
                                moved = true;
                                break;
                            }
                        }
                        if moved {
                            improved = true;
                            continue;
                        }
                        // Both probes failed: try the vertex of the parabola
                        // through them.
                        let [up, down] = probes;
                        let curvature = up + down - 2.0 * value;
                        if curvature < 0.0 {
                            let theta = step * (down - up) / (2.0 * curvature);
                            let mut trial = basis.clone();
                            trial.rotate(p, j, k, theta, phi);
                            let v = eval.value(&trial);
                            if v > value + 1e-14 {
                                basis = trial;
                                value = v;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        history.push(value);
        if !improved {
            level += 1;
        }
    }
    (basis, value, history)
}

fn finish(s: &Ensemble, objective: Objective, basis: ProductBasis, trace: Vec<f64>, best_restart: usize) -> Result<SearchResult> {
    let povm = basis.to_povm();
    let (value, decoding) = match objective {
        Objective::Fidelity => {
            let rep = achievable_fidelity(s, &povm)?;
            let guesses = rep.per_outcome.into_iter().map(|g| g.guess).collect();
            (rep.achievable_fidelity, DecodingMap::states(guesses))
        }
        Objective::Success => {
            let (v, picks) = ml_from_forms(s, &crate::fidelity::quadratic_forms(s, &povm));
            (v, DecodingMap::members(&picks))
        }
    };
    Ok(SearchResult {
        objective,
        best_value: value,
        best_measurement: povm,
        best_decoding: decoding,
        best_basis: basis,
        trace,
        best_restart,
    })
}

fn check_dims(s: &Ensemble, dims: &[usize]) -> Result<()> {
    if s.dims() != dims {
        return Err(Error::DimensionMismatch(s.dims().to_vec(), dims.to_vec()));
    }
    Ok(())
}

/// Refines a product-basis measurement. With zero sweeps the start is
/// returned unchanged.
pub fn refine(s: &Ensemble, m: &SeparablePovm, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    check_dims(s, m.dims())?;
    let start = ProductBasis::from_povm(m)
        .ok_or_else(|| Error::BadConfig("starting measurement is not a product basis".into()))?;
    let eval = Evaluator::new(s, cfg.objective);
    let (basis, value, _) = pattern_search(&eval, start, cfg);
    finish(s, cfg.objective, basis, vec![value], 0)
}

/// Objective value after each sweep of a refinement; nondecreasing.
pub fn refine_history(s: &Ensemble, m: &SeparablePovm, cfg: &SearchConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_dims(s, m.dims())?;
    let start = ProductBasis::from_povm(m)
        .ok_or_else(|| Error::BadConfig("starting measurement is not a product basis".into()))?;
    let eval = Evaluator::new(s, cfg.objective);
    let initial = eval.value(&start);
    let (_, _, mut h) = pattern_search(&eval, start, cfg);
    h.insert(0, initial);
    Ok(h)
}

/// Best of refining every seed and `cfg.restarts` random product bases.
/// Restarts run in parallel; the result depends only on `cfg` and the
/// seeds, with ties going to the earliest restart.
pub fn certify(s: &Ensemble, cfg: &SearchConfig, seeds: &[SeparablePovm]) -> Result<SearchResult> {
    cfg.validate()?;
    let mut starts = Vec::with_capacity(seeds.len());
    for m in seeds {
        check_dims(s, m.dims())?;
        starts.push(
            ProductBasis::from_povm(m).ok_or_else(|| Error::BadConfig("seed measurement is not a product basis".into()))?,
        );
    }
    let eval = Evaluator::new(s, cfg.objective);
    let k = starts.len();
    let total = k + cfg.restarts;
    let runs: Vec<(ProductBasis, f64)> = (0..total)
        .into_par_iter()
        .map(|r| {
            let start = if r < k {
                starts[r].clone()
            } else {
                ProductBasis::random(s.dims(), &mut restart_rng(cfg.seed, r - k))
            };
            let (b, v, _) = pattern_search(&eval, start, cfg);
            (b, v)
        })
        .collect();
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 > runs[best].1 {
            best = r;
        }
    }
    let trace = runs.iter().map(|r| r.1).collect();
    let basis = runs.into_iter().nth(best).expect("at least one restart").0;
    finish(s, cfg.objective, basis, trace, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bell_ensemble, s1_s2_sets, tilted_bell_basis};
    use crate::fidelity::{average_fidelity, success_probability};
    use crate::measurement::{computational_basis, require_complete};

    fn quick(objective: Objective) -> SearchConfig {
        SearchConfig {
            restarts: 8,
            ..SearchConfig::with_objective(objective)
        }
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let mut c = SearchConfig::default();
        c.restarts = 0;
        assert!(c.validate().is_err());
        c = SearchConfig::default();
        c.steps = vec![0.1, 0.5];
        assert!(c.validate().is_err());
        c.steps = vec![0.1, -0.01];
        assert!(c.validate().is_err());
    }

    #[test]
    fn random_basis_is_complete_and_deterministic() {
        let a = random_product_basis(&[2, 3], &mut restart_rng(7, 0)).unwrap();
        let b = random_product_basis(&[2, 3], &mut restart_rng(7, 0)).unwrap();
        let c = random_product_basis(&[2, 3], &mut restart_rng(7, 1)).unwrap();
        require_complete(&a).unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn contraction_matches_direct_forms() {
        let e = tilted_bell_basis(0.8).unwrap().ensemble;
        let pb = ProductBasis::random(&[2, 2], &mut restart_rng(3, 0));
        let direct = crate::fidelity::quadratic_forms(&e, &pb.to_povm());
        let fast = pb.forms(&e);
        for (x, y) in direct.iter().flatten().zip(fast.iter().flatten()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn from_povm_round_trips() {
        let pb = ProductBasis::random(&[3, 2, 2], &mut restart_rng(1, 0));
        let back = ProductBasis::from_povm(&pb.to_povm()).unwrap();
        assert_eq!(back.to_povm(), pb.to_povm());
        let split = pb.to_povm().split_outcome(0);
        assert!(ProductBasis::from_povm(&split).is_none());
    }

    #[test]
    fn bell_refinement_from_computational_basis_reaches_one_half() {
        let e = bell_ensemble([0.25; 4]).unwrap().ensemble;
        let comp = make_local_basis_povm(&[computational_basis(2), computational_basis(2)]).unwrap();
        let r = refine(&e, &comp, &SearchConfig::default()).unwrap();
        assert!((r.best_value - 0.5).abs() < 1e-9, "{}", r.best_value);
    }

    #[test]
    fn zero_sweeps_leave_start_unchanged() {
        let e = tilted_bell_basis(0.8).unwrap().ensemble;
        let start = random_product_basis(&[2, 2], &mut restart_rng(0, 0)).unwrap();
        let cfg = SearchConfig {
            sweeps: 0,
            ..SearchConfig::default()
        };
        let r = refine(&e, &start, &cfg).unwrap();
        assert_eq!(r.best_measurement, start);
        let f = achievable_fidelity(&e, &start).unwrap().achievable_fidelity;
        assert!((r.best_value - f).abs() < 1e-12);
    }

    #[test]
    fn refinement_is_monotone() {
        let (_, s2) = s1_s2_sets();
        let start = random_product_basis(&[2, 2], &mut restart_rng(5, 0)).unwrap();
        let h = refine_history(&s2.ensemble, &start, &SearchConfig::default()).unwrap();
        assert!(h.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn certify_reproduces_and_is_deterministic() {
        let e = tilted_bell_basis(0.8).unwrap().ensemble;
        let a = certify(&e, &quick(Objective::Fidelity), &[]).unwrap();
        let b = certify(&e, &quick(Objective::Fidelity), &[]).unwrap();
        assert_eq!(a, b);
        assert!(a.best_value >= 0.64 - 1e-6 && a.best_value <= 0.64 + 1e-8);
        let g = average_fidelity(&e, &a.best_measurement, &a.best_decoding).unwrap();
        assert!((g - a.best_value).abs() < 1e-10);

        let s = certify(&e, &quick(Objective::Success), &[]).unwrap();
        let p = success_probability(&e, &s.best_measurement, Some(&s.best_decoding)).unwrap();
        assert!((p - s.best_value).abs() < 1e-10);
        assert_eq!(s.trace.len(), 8);
    }

    #[test]
    fn seeds_are_refined_first() {
        let entry = bell_ensemble([0.4, 0.3, 0.2, 0.1]).unwrap();
        let seeds: Vec<SeparablePovm> = entry.strategies.iter().map(|s| s.povm.clone()).collect();
        let r = certify(&entry.ensemble, &quick(Objective::Fidelity), &seeds).unwrap();
        assert_eq!(r.trace.len(), 9);
        assert!((r.trace[0] - 0.7).abs() < 1e-12);
        assert!((r.best_value - 0.7).abs() < 1e-9);
        let wrong = make_local_basis_povm(&[computational_basis(3), computational_basis(3)]).unwrap();
        assert!(matches!(
            certify(&entry.ensemble, &quick(Objective::Fidelity), &[wrong]),
            Err(Error::DimensionMismatch(..))
        ));
    }

    #[test]
    fn random_states_are_normalized() {
        let mut rng = restart_rng(9, 0);
        let h = haar_state(&[2, 3], &mut rng).unwrap();
        let p = random_product_state(&[2, 3], &mut rng).unwrap();
        assert!((crate::linalg::norm(h.amplitudes()) - 1.0).abs() < 1e-12);
        assert!((crate::linalg::norm(p.amplitudes()) - 1.0).abs() < 1e-12);
        assert_eq!(p.dims(), &[2, 3]);
    }
}
