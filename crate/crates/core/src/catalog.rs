//! Constructors for the standard example ensembles, each with the values
//! its separable fidelity or success probability is known to take and the
//! local strategies that attain them.

use std::f64::consts::PI;

use crate::bounds::{DistinguishableSubset, Quantity, ReportOptions};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::linalg::{Complex64, StateVector};
use crate::measurement::{
    computational_basis, fourier_basis, make_local_basis_povm, plus_minus_basis, DecodingMap, SeparableOutcome,
    SeparablePovm, Strategy,
};

#[derive(Debug, Clone, PartialEq)]
pub struct KnownValue {
    pub quantity: Quantity,
    pub value: f64,
    /// Closed form, e.g. `p1+p2`.
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub ensemble: Ensemble,
    pub known: Vec<KnownValue>,
    pub strategies: Vec<Strategy>,
    /// Subsets to feed the distinguishable-subset bound beyond the
    /// automatic ones.
    pub subsets: Vec<DistinguishableSubset>,
}

impl CatalogEntry {
    pub fn report_options(&self) -> ReportOptions {
        ReportOptions {
            subsets: self.subsets.clone(),
            strategies: self.strategies.clone(),
            ..ReportOptions::default()
        }
    }

    pub fn known(&self, quantity: Quantity) -> Option<f64> {
        self.known.iter().find(|k| k.quantity == quantity).map(|k| k.value)
    }
}

fn known(quantity: Quantity, value: f64, expression: &str) -> KnownValue {
    KnownValue {
        quantity,
        value,
        expression: expression.into(),
    }
}

fn real_state(dims: &[usize], terms: &[(usize, f64)]) -> StateVector {
    let total: usize = dims.iter().product();
    let mut amps = vec![0.0; total];
    for &(idx, a) in terms {
        amps[idx] += a;
    }
    StateVector::from_real(dims, &amps).expect("nonzero catalog state")
}

fn check_nonincreasing(p: &[f64]) -> Result<()> {
    if p.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::BadProbabilities(format!("{p:?} is not nonincreasing")));
    }
    Ok(())
}

fn comp_povm(dims: &[usize]) -> SeparablePovm {
    make_local_basis_povm(&dims.iter().map(|&d| computational_basis(d)).collect::<Vec<_>>()).expect("complete")
}

fn strategy(name: &str, povm: SeparablePovm, decoding: Option<DecodingMap>) -> Strategy {
    Strategy {
        name: name.into(),
        povm,
        decoding,
    }
}

/// `Φ1,2 = (|00⟩ ± |11⟩)/√2`, `Φ3,4 = (|01⟩ ± |10⟩)/√2`.
pub fn bell_states() -> Vec<StateVector> {
    let s = 0.5f64.sqrt();
    vec![
        real_state(&[2, 2], &[(0, s), (3, s)]),
        real_state(&[2, 2], &[(0, s), (3, -s)]),
        real_state(&[2, 2], &[(1, s), (2, s)]),
        real_state(&[2, 2], &[(1, s), (2, -s)]),
    ]
}

/// Four Bell states with nonincreasing probabilities; `F_S = p1 + p2`,
/// attained by measuring both qubits in the `±` basis and decoding
/// `{++, −−} → Φ1`, `{+−, −+} → Φ2`.
pub fn bell_ensemble(p: [f64; 4]) -> Result<CatalogEntry> {
    check_nonincreasing(&p)?;
    let ensemble = Ensemble::new(bell_states(), p.to_vec())?;
    let pm = make_local_basis_povm(&[plus_minus_basis(), plus_minus_basis()])?;
    let v = p[0] + p[1];
    Ok(CatalogEntry {
        name: "bell".into(),
        description: "four Bell states in C2xC2".into(),
        ensemble,
        known: vec![
            known(Quantity::SeparableFidelity, v, "p1+p2"),
            known(Quantity::SeparableSuccess, v, "p1+p2"),
        ],
        strategies: vec![strategy("plus-minus", pm, Some(DecodingMap::members(&[0, 1, 1, 0])))],
        subsets: vec![],
    })
}

/// `(|000⟩ ± |111⟩)/√2`, `(|011⟩ ± |100⟩)/√2`.
pub fn ghz_states() -> Vec<StateVector> {
    let s = 0.5f64.sqrt();
    let d = [2, 2, 2];
    vec![
        real_state(&d, &[(0b000, s), (0b111, s)]),
        real_state(&d, &[(0b000, s), (0b111, -s)]),
        real_state(&d, &[(0b011, s), (0b100, s)]),
        real_state(&d, &[(0b011, s), (0b100, -s)]),
    ]
}

/// Four GHZ-type states on three qubits; `F_S = p1 + p2`. Across `A:BC`
/// they look like Bell states; across `B:AC` and `C:AB` they are perfectly
/// distinguishable (see [`ghz_cut_strategy`]).
pub fn ghz_ensemble(p: [f64; 4]) -> Result<CatalogEntry> {
    check_nonincreasing(&p)?;
    let ensemble = Ensemble::new(ghz_states(), p.to_vec())?;
    let xxx = make_local_basis_povm(&[plus_minus_basis(), plus_minus_basis(), plus_minus_basis()])?;
    let v = p[0] + p[1];
    Ok(CatalogEntry {
        name: "ghz".into(),
        description: "four GHZ-type states in C2xC2xC2".into(),
        ensemble,
        known: vec![
            known(Quantity::SeparableFidelity, v, "p1+p2"),
            known(Quantity::SeparableSuccess, v, "p1+p2"),
        ],
        strategies: vec![strategy("plus-minus", xxx, None)],
        subsets: vec![],
    })
}

/// Perfect discrimination of the GHZ-type states across `B:AC` or `C:AB`,
/// on the ensemble regrouped to two parties `[2, 4]`: the single qubit is
/// measured in the `±` basis and the pair in the Bell basis, decoding by
/// maximum likelihood.
///
/// Measuring the single qubit in the computational basis instead leaves
/// `Ψ1` and `Ψ2` in the same residual state, so it cannot work.
pub fn ghz_cut_strategy(p: [f64; 4], cut_label: &str) -> Result<(Ensemble, Strategy)> {
    let entry = ghz_ensemble(p)?;
    let cut = crate::ensemble::Bipartition::parse(cut_label, &[2, 2, 2])?.normalized();
    if cut.left().len() != 1 || cut.left()[0] == 0 {
        return Err(Error::BadParameter(format!("cut {cut} is not B:AC or C:AB")));
    }
    let regrouped = entry.ensemble.regroup(&cut)?;
    let bell4: Vec<StateVector> = bell_states()
        .into_iter()
        .map(|b| StateVector::new(vec![4], b.into_amplitudes()).expect("unit"))
        .collect();
    let mut outcomes = Vec::new();
    for x in plus_minus_basis() {
        for b in &bell4 {
            outcomes.push(SeparableOutcome::new(1.0, vec![x.clone(), b.clone()])?);
        }
    }
    let povm = SeparablePovm::new(vec![2, 4], outcomes)?;
    let decoding = crate::fidelity::ml_decoding(&regrouped, &povm)?;
    Ok((regrouped, strategy("plus-minus-then-bell", povm, Some(decoding))))
}

fn alpha_beta(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha >= 0.5f64.sqrt() - 1e-15 && alpha < 1.0) {
        return Err(Error::BadParameter(format!("alpha = {alpha} outside [1/sqrt(2), 1)")));
    }
    Ok((alpha, (1.0 - alpha * alpha).sqrt()))
}

/// `α|00⟩ + β|11⟩, β|00⟩ − α|11⟩, α|01⟩ + β|10⟩, β|01⟩ − α|10⟩`,
/// equiprobable; `F_S = α²`, attained by the computational basis with
/// `00 → ψ1, 11 → ψ2, 01 → ψ3, 10 → ψ4`.
pub fn tilted_bell_basis(alpha: f64) -> Result<CatalogEntry> {
    let (a, b) = alpha_beta(alpha)?;
    let d = [2, 2];
    let states = vec![
        real_state(&d, &[(0, a), (3, b)]),
        real_state(&d, &[(0, b), (3, -a)]),
        real_state(&d, &[(1, a), (2, b)]),
        real_state(&d, &[(1, b), (2, -a)]),
    ];
    let v = a * a;
    Ok(CatalogEntry {
        name: "tilted-bell".into(),
        description: format!("tilted Bell basis in C2xC2, alpha = {alpha}"),
        ensemble: Ensemble::equiprobable(states)?,
        known: vec![
            known(Quantity::SeparableFidelity, v, "alpha^2"),
            known(Quantity::SeparableSuccess, v, "alpha^2"),
        ],
        strategies: vec![strategy("computational", comp_povm(&d), Some(DecodingMap::members(&[0, 2, 3, 1])))],
        subsets: vec![],
    })
}

/// Eight equiprobable three-qubit states, each with largest Schmidt
/// coefficient `α` across every cut; `F_S = α²`, attained by the
/// computational basis with maximum-likelihood decoding.
///
/// The fourth state is `β|001⟩ − α|110⟩`; writing it as `β|110⟩ − α|001⟩`
/// would break orthogonality with the third unless `α = β`.
pub fn three_qubit_basis(alpha: f64) -> Result<CatalogEntry> {
    let (a, b) = alpha_beta(alpha)?;
    let d = [2, 2, 2];
    let states = vec![
        real_state(&d, &[(0b000, a), (0b111, b)]),
        real_state(&d, &[(0b000, b), (0b111, -a)]),
        real_state(&d, &[(0b001, a), (0b110, b)]),
        real_state(&d, &[(0b001, b), (0b110, -a)]),
        real_state(&d, &[(0b011, a), (0b100, b)]),
        real_state(&d, &[(0b011, b), (0b100, -a)]),
        real_state(&d, &[(0b010, a), (0b101, b)]),
        real_state(&d, &[(0b010, b), (0b101, -a)]),
    ];
    let v = a * a;
    Ok(CatalogEntry {
        name: "three-qubit".into(),
        description: format!("three-qubit basis with Schmidt coefficient alpha = {alpha} at every cut"),
        ensemble: Ensemble::equiprobable(states)?,
        known: vec![
            known(Quantity::SeparableFidelity, v, "alpha^2"),
            known(Quantity::SeparableSuccess, v, "alpha^2"),
        ],
        strategies: vec![strategy("computational", comp_povm(&d), None)],
        subsets: vec![],
    })
}

/// `|Ψ_nm⟩ = d^{-1/2} Σ_j e^{2πijn/d} |j⟩ ⊗ |(j+m) mod d⟩`
pub fn mes_state(d: usize, n: usize, m: usize) -> Result<StateVector> {
    if d < 2 || n >= d || m >= d {
        return Err(Error::BadParameter(format!("(d, n, m) = ({d}, {n}, {m})")));
    }
    let s = 1.0 / (d as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..d {
        amps[j * d + (j + m) % d] = Complex64::from_polar(s, 2.0 * PI * ((j * n) % d) as f64 / d as f64);
    }
    StateVector::new(vec![d, d], amps)
}

/// All `d²` states `Ψ_nm`, index `n·d + m`.
pub fn canonical_mes_basis(d: usize) -> Result<Vec<StateVector>> {
    if d < 2 {
        return Err(Error::BadParameter(format!("dimension {d} < 2")));
    }
    let mut out = Vec::with_capacity(d * d);
    for n in 0..d {
        for m in 0..d {
            out.push(mes_state(d, n, m)?);
        }
    }
    Ok(out)
}

/// `N` equiprobable states from the canonical maximally entangled basis:
/// the whole of `S_k = {Ψ_0k, …, Ψ_(d−1)k}` followed by the remaining
/// states in `(n, m)` order. `F_S = d/N`.
///
/// `S_k` enters the subset bound as declared. Measuring both sides in the
/// Fourier basis reads off `n = a + b mod d` for outcome `(a, b)`, which
/// separates `S_k` and attains `d/N` on the whole set.
pub fn mes_selection(d: usize, n_states: usize, k: usize) -> Result<CatalogEntry> {
    if d < 2 || k >= d || n_states < d || n_states > d * d {
        return Err(Error::BadConstruction(format!(
            "need d >= 2, k < d, d <= N <= d^2; got d = {d}, N = {n_states}, k = {k}"
        )));
    }
    let mut picks: Vec<(usize, usize)> = (0..d).map(|n| (n, k)).collect();
    for n in 0..d {
        for m in 0..d {
            if picks.len() < n_states && m != k {
                picks.push((n, m));
            }
        }
    }
    let states = picks.iter().map(|&(n, m)| mes_state(d, n, m)).collect::<Result<Vec<_>>>()?;
    let ff = make_local_basis_povm(&[fourier_basis(d), fourier_basis(d)])?;
    let v = d as f64 / n_states as f64;
    let labels: Vec<String> = picks.iter().map(|(n, m)| format!("{n}{m}")).collect();
    Ok(CatalogEntry {
        name: "mes-selection".into(),
        description: format!(
            "{n_states} maximally entangled states in C{d}xC{d} containing S_{k}; members (nm) = {}",
            labels.join(",")
        ),
        ensemble: Ensemble::equiprobable(states)?,
        known: vec![
            known(Quantity::SeparableFidelity, v, "d/N"),
            known(Quantity::SeparableSuccess, v, "d/N"),
        ],
        strategies: vec![strategy("fourier", ff, None)],
        subsets: vec![DistinguishableSubset::declared((0..d).collect())],
    })
}

/// Three maximally entangled states in `C3⊗C3` with probability `p` each
/// and `|00⟩` with `q = 1 − 3p`; `P_s = 1 − min(p/3, q)`, attained by the
/// computational basis with maximum-likelihood decoding.
pub fn mes_with_product(p: f64) -> Result<CatalogEntry> {
    if !(p > 0.0 && p <= 1.0 / 3.0 + 1e-15) {
        return Err(Error::BadParameter(format!("p = {p} outside (0, 1/3]")));
    }
    let q = (1.0 - 3.0 * p).max(0.0);
    let mut states: Vec<StateVector> = (0..3).map(|m| mes_state(3, 0, m)).collect::<Result<_>>()?;
    states.push(StateVector::basis(&[3, 3], 0)?);
    let v = 1.0 - (p / 3.0).min(q);
    Ok(CatalogEntry {
        name: "mes-with-product".into(),
        description: format!("three maximally entangled states in C3xC3 with p = {p} each, plus |00> with q = {q}"),
        ensemble: Ensemble::new(states, vec![p, p, p, q])?,
        known: vec![known(Quantity::SeparableSuccess, v, "1-min(p/3,q)")],
        strategies: vec![strategy("computational", comp_povm(&[3, 3]), None)],
        subsets: vec![],
    })
}

/// `S1 = {|01⟩, |10⟩, Φ+, Φ−}` and `S2 = {|00⟩, |11⟩, Φ+, Φ−}`, equiprobable.
/// `S1`: `P_s = F_S = 3/4`. `S2`: `P_s = 1/2`, `F_S = 3/4`. The
/// computational basis attains all four.
pub fn s1_s2_sets() -> (CatalogEntry, CatalogEntry) {
    let s = 0.5f64.sqrt();
    let d = [2, 2];
    let phi_plus = real_state(&d, &[(0, s), (3, s)]);
    let phi_minus = real_state(&d, &[(0, s), (3, -s)]);
    let s1 = vec![real_state(&d, &[(1, 1.0)]), real_state(&d, &[(2, 1.0)]), phi_plus.clone(), phi_minus.clone()];
    let s2 = vec![real_state(&d, &[(0, 1.0)]), real_state(&d, &[(3, 1.0)]), phi_plus, phi_minus];
    let comp = strategy("computational", comp_povm(&d), None);
    (
        CatalogEntry {
            name: "s1".into(),
            description: "orthonormal basis {|01>, |10>, Phi+, Phi-}".into(),
            ensemble: Ensemble::equiprobable(s1).expect("valid"),
            known: vec![
                known(Quantity::SeparableSuccess, 0.75, "3/4"),
                known(Quantity::SeparableFidelity, 0.75, "3/4"),
            ],
            strategies: vec![comp.clone()],
            subsets: vec![],
        },
        CatalogEntry {
            name: "s2".into(),
            description: "linearly dependent set {|00>, |11>, Phi+, Phi-} spanning two dimensions".into(),
            ensemble: Ensemble::equiprobable(s2).expect("valid"),
            known: vec![
                known(Quantity::SeparableSuccess, 0.5, "1/2"),
                known(Quantity::SeparableFidelity, 0.75, "3/4"),
            ],
            strategies: vec![comp],
            subsets: vec![],
        },
    )
}

/// Parameters for [`lookup`]; `None` picks the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogParams {
    pub probs: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub p: Option<f64>,
}

/// `(name, alias, parameters, description)` for every entry.
pub const ENTRIES: [(&str, &str, &str, &str); 8] = [
    ("bell", "example1", "--probs (default equiprobable)", "four Bell states"),
    ("ghz", "example2", "--probs (default equiprobable)", "four GHZ-type three-qubit states"),
    ("tilted-bell", "example3", "--alpha (default 0.8)", "tilted Bell basis"),
    ("three-qubit", "example4", "--alpha (default 0.8)", "three-qubit basis with equal Schmidt coefficients"),
    ("mes-selection", "example5", "--d --N --k (default 3, 4, 0)", "maximally entangled states containing S_k"),
    ("mes-with-product", "example6", "--p (default 0.25)", "three maximally entangled states and |00>"),
    ("s1", "", "", "orthonormal two-qubit set S1"),
    ("s2", "", "", "linearly dependent two-qubit set S2"),
];

/// Canonical name for a name or alias.
pub fn canonical_name(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|e| e.0 == name || (!e.1.is_empty() && e.1 == name)).map(|e| e.0)
}

fn four_probs(p: &Option<Vec<f64>>) -> Result<[f64; 4]> {
    match p {
        None => Ok([0.25; 4]),
        Some(v) => v
            .as_slice()
            .try_into()
            .map_err(|_| Error::BadProbabilities(format!("need 4 probabilities, got {}", v.len()))),
    }
}

pub fn lookup(name: &str, params: &CatalogParams) -> Result<CatalogEntry> {
    let canonical = canonical_name(name).ok_or_else(|| Error::BadParameter(format!("unknown catalog entry '{name}'")))?;
    match canonical {
        "bell" => bell_ensemble(four_probs(&params.probs)?),
        "ghz" => ghz_ensemble(four_probs(&params.probs)?),
        "tilted-bell" => tilted_bell_basis(params.alpha.unwrap_or(0.8)),
        "three-qubit" => three_qubit_basis(params.alpha.unwrap_or(0.8)),
        "mes-selection" => mes_selection(params.d.unwrap_or(3), params.n.unwrap_or(4), params.k.unwrap_or(0)),
        "mes-with-product" => mes_with_product(params.p.unwrap_or(0.25)),
        "s1" => Ok(s1_s2_sets().0),
        _ => Ok(s1_s2_sets().1),
    }
}

/// Every entry over the parameter values used for verification.
pub fn verification_suite() -> Vec<CatalogEntry> {
    let mut out = vec![
        bell_ensemble([0.25; 4]).unwrap(),
        bell_ensemble([0.4, 0.3, 0.2, 0.1]).unwrap(),
        ghz_ensemble([0.25; 4]).unwrap(),
        ghz_ensemble([0.4, 0.3, 0.2, 0.1]).unwrap(),
    ];
    for a2 in [0.5f64, 0.64, 0.75, 0.9] {
        out.push(tilted_bell_basis(a2.sqrt()).unwrap());
        out.push(three_qubit_basis(a2.sqrt()).unwrap());
    }
    for (d, n) in [(2, 3), (2, 4), (3, 4), (3, 7), (3, 9)] {
        out.push(mes_selection(d, n, 0).unwrap());
    }
    for p in [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 1.0 / 3.0 - 1e-3] {
        out.push(mes_with_product(p).unwrap());
    }
    let (s1, s2) = s1_s2_sets();
    out.push(s1);
    out.push(s2);
    out
}
