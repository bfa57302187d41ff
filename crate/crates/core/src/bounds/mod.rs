//! Lower and upper bounds on the separable fidelity `F_S` and the separable
//! success probability `P_s`.
//!
//! | name | side | quantity | scope |
//! |------|------|----------|-------|
//! | `distinguishable-subset` | lower | fidelity | separable |
//! | `distinguishable-count` | lower | fidelity | separable |
//! | `schmidt-operator` | upper | fidelity | separable |
//! | `orthogonal-equiprobable` | upper | fidelity | separable |
//! | `maximally-entangled` | upper | fidelity | separable |
//! | `water-filling` | upper | success | separable |
//! | `ky-fan` | upper | fidelity | global |
//! | `span-rank` | upper | success | global |
//! | `strategy` | lower | both | separable |
//!
//! Per-cut bounds use the effective local dimensions of the ensemble (see
//! [`Ensemble::local_support_dims`]) in place of the nominal `d1, d2`.

mod report;
mod subsets;

pub use report::{bound_report, BoundReport, CutInfo, ReportOptions, Sandwich, Skipped};
pub use subsets::{default_subsets, Certificate, DistinguishableSubset};


use std::fmt;

use crate::ensemble::{all_bipartitions, Bipartition, Ensemble};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, operator_norm, pairwise_sum};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    DistinguishableSubset,
    DistinguishableCount,
    SchmidtOperator,
    OrthogonalEquiprobable,
    MaximallyEntangled,
    WaterFilling,
    KyFan,
    SpanRank,
    Strategy,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::DistinguishableSubset => "distinguishable-subset",
            BoundKind::DistinguishableCount => "distinguishable-count",
            BoundKind::SchmidtOperator => "schmidt-operator",
            BoundKind::OrthogonalEquiprobable => "orthogonal-equiprobable",
            BoundKind::MaximallyEntangled => "maximally-entangled",
            BoundKind::WaterFilling => "water-filling",
            BoundKind::KyFan => "ky-fan",
            BoundKind::SpanRank => "span-rank",
            BoundKind::Strategy => "strategy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `F_S`
    SeparableFidelity,
    /// `P_s`
    SeparableSuccess,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::SeparableFidelity => "separable-fidelity",
            Quantity::SeparableSuccess => "separable-success",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// Holds for separable measurements.
    Separable,
    /// Holds for every measurement.
    Global,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::Separable => "separable",
            Scope::Global => "global",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }
}

/// How a distinguishable-subset bound was justified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every subset used carries a checked certificate.
    Strict,
    /// The winning subset was asserted by the caller.
    Declared,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Declared => "declared",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub quantity: Quantity,
    pub scope: Scope,
    pub side: Side,
    pub cut: Option<Bipartition>,
    /// Local dimensions that entered the bound, smaller first.
    pub dims_used: Option<(usize, usize)>,
    pub raw: f64,
    pub capped: f64,
    /// `raw ≤ 1`; an upper bound above 1 says nothing.
    pub informative: bool,
    pub mode: Option<Mode>,
    /// Free-form provenance: the subset, the strategy name.
    pub detail: Option<String>,
}

impl BoundValue {
    fn new(kind: BoundKind, quantity: Quantity, scope: Scope, side: Side, raw: f64) -> Self {
        BoundValue {
            kind,
            quantity,
            scope,
            side,
            cut: None,
            dims_used: None,
            raw,
            capped: raw.min(1.0),
            informative: raw <= 1.0 + 1e-12,
            mode: None,
            detail: None,
        }
    }

    fn at(mut self, cut: &Bipartition, dims: (usize, usize)) -> Self {
        self.cut = Some(cut.clone());
        self.dims_used = Some(dims);
        self
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// `name@cut` or just `name`.
    pub fn source(&self) -> String {
        let mut s = self.kind.name().to_string();
        if let Some(d) = &self.detail {
            s.push_str(&format!("[{d}]"));
        }
        if let Some(c) = &self.cut {
            s.push_str(&format!("@{c}"));
        }
        s
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} = {}", self.source(), self.side.name(), self.quantity.name(), self.raw)
    }
}

/// `F_S ≥ max_X P(X)` over subsets perfectly distinguishable by separable
/// measurements. In strict mode every subset needs a certificate.
pub fn lower_bound_subsets(s: &Ensemble, subsets: &[DistinguishableSubset], strict: bool) -> Result<BoundValue> {
    if subsets.is_empty() {
        return Err(Error::EmptySubsetList);
    }
    let mut best: Option<(f64, bool, &DistinguishableSubset)> = None;
    for x in subsets {
        if strict && !x.is_certified() {
            return Err(Error::UncertifiedSubsetRejected(x.members().to_vec()));
        }
        x.validate(s)?;
        let w = x.weight(s);
        let better = match best {
            None => true,
            Some((bw, bc, _)) => w > bw + 1e-15 || ((w - bw).abs() <= 1e-15 && x.is_certified() && !bc),
        };
        if better {
            best = Some((w, x.is_certified(), x));
        }
    }
    let (w, certified, x) = best.expect("nonempty list");
    let mut b = BoundValue::new(
        BoundKind::DistinguishableSubset,
        Quantity::SeparableFidelity,
        Scope::Separable,
        Side::Lower,
        w.min(1.0),
    );
    b.mode = Some(if certified { Mode::Strict } else { Mode::Declared });
    b.detail = Some(format_members(x.members()));
    Ok(b)
}

pub(crate) fn format_members(m: &[usize]) -> String {
    let parts: Vec<String> = m.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// `F_S ≥ m/N` for `N` equiprobable states containing `m` perfectly
/// distinguishable ones.
pub fn lower_bound_count(n: usize, m: usize) -> Result<BoundValue> {
    if m == 0 || m > n {
        return Err(Error::InvalidCounts { m, n });
    }
    let mut b = BoundValue::new(
        BoundKind::DistinguishableCount,
        Quantity::SeparableFidelity,
        Scope::Separable,
        Side::Lower,
        m as f64 / n as f64,
    );
    b.detail = Some(format!("m={m},N={n}"));
    Ok(b)
}

fn effective_dims(s: &Ensemble, cut: &Bipartition) -> Result<(usize, usize)> {
    s.check_cut(cut)?;
    s.local_support_dims(cut)
}

/// `F_S ≤ d1 d2 ‖Λ‖∞` with `Λ = Σ_i p_i λ_i |ψ_i⟩⟨ψ_i|`.
pub fn upper_bound_schmidt_operator(s: &Ensemble, cut: &Bipartition) -> Result<BoundValue> {
    let dims = effective_dims(s, cut)?;
    let norm = operator_norm(&s.lambda_operator(cut)?)?;
    let raw = (dims.0 * dims.1) as f64 * norm;
    Ok(BoundValue::new(
        BoundKind::SchmidtOperator,
        Quantity::SeparableFidelity,
        Scope::Separable,
        Side::Upper,
        raw,
    )
    .at(cut, dims))
}

/// `F_S ≤ λ_max d1 d2 / N` for orthogonal, equiprobable states.
pub fn upper_bound_orthogonal_equiprobable(s: &Ensemble, cut: &Bipartition) -> Result<BoundValue> {
    let dims = effective_dims(s, cut)?;
    if !s.is_orthogonal() {
        return Err(Error::NotOrthogonal);
    }
    if !s.is_equiprobable() {
        return Err(Error::NotEquiprobable);
    }
    let lmax = s.lambdas(cut)?.into_iter().fold(0.0, f64::max);
    let raw = lmax * (dims.0 * dims.1) as f64 / s.len() as f64;
    Ok(BoundValue::new(
        BoundKind::OrthogonalEquiprobable,
        Quantity::SeparableFidelity,
        Scope::Separable,
        Side::Upper,
        raw,
    )
    .at(cut, dims))
}

/// `F_S ≤ ‖ρ‖∞ d2` when every state is maximally entangled across the cut.
pub fn upper_bound_maximally_entangled(s: &Ensemble, cut: &Bipartition) -> Result<BoundValue> {
    let dims = effective_dims(s, cut)?;
    let expected = 1.0 / cut.d1() as f64;
    let tol = Tolerances::current().entanglement;
    for (index, lambda) in s.lambdas(cut)?.into_iter().enumerate() {
        if (lambda - expected).abs() > tol {
            return Err(Error::NotMaximallyEntangled { index, lambda, expected });
        }
    }
    let raw = operator_norm(&s.rho())? * dims.1 as f64;
    Ok(BoundValue::new(
        BoundKind::MaximallyEntangled,
        Quantity::SeparableFidelity,
        Scope::Separable,
        Side::Upper,
        raw,
    )
    .at(cut, dims))
}

/// Water-filling value: sort by `p_i λ_i` (stable, nonincreasing), fill
/// `τ_i = 1/λ_i` in that order until the budget runs out.
///
/// Returns `Σ_{i<r} p_i + p_r λ_r (budget − κ)` where `κ = Σ_{i<r} 1/λ_i`,
/// or `Σ p_i` when the whole list fits.
pub fn water_filling(probs: &[f64], lambdas: &[f64], budget: f64) -> f64 {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| (probs[b] * lambdas[b]).total_cmp(&(probs[a] * lambdas[a])));
    let mut kappa = 0.0;
    let mut taken = Vec::with_capacity(order.len());
    for i in order {
        let tau = 1.0 / lambdas[i];
        if kappa + tau > budget {
            taken.push(probs[i] * lambdas[i] * (budget - kappa));
            return pairwise_sum(&taken);
        }
        kappa += tau;
        taken.push(probs[i]);
    }
    pairwise_sum(&taken)
}

/// `P_s ≤` water-filling value with budget `d1 d2`. Transfers to `F_S` for
/// orthogonal ensembles.
pub fn upper_bound_water_filling(s: &Ensemble, cut: &Bipartition) -> Result<BoundValue> {
    let dims = effective_dims(s, cut)?;
    let lambdas = s.lambdas(cut)?;
    let raw = water_filling(s.probs(), &lambdas, (dims.0 * dims.1) as f64);
    Ok(BoundValue::new(
        BoundKind::WaterFilling,
        Quantity::SeparableSuccess,
        Scope::Separable,
        Side::Upper,
        raw,
    )
    .at(cut, dims))
}

/// `F(M,G) ≤ ‖ρ′‖_r^{KF}` for any measurement, `r` the span rank.
pub fn upper_bound_ky_fan(s: &Ensemble) -> BoundValue {
    let r = s.span_rank();
    let spectrum = s.rho_prime_spectrum();
    let raw = pairwise_sum(&spectrum[..r.min(spectrum.len())]);
    let mut b = BoundValue::new(BoundKind::KyFan, Quantity::SeparableFidelity, Scope::Global, Side::Upper, raw);
    b.detail = Some(format!("r={r}"));
    b
}

/// `P_s ≤ r · max_i p_i` for any measurement, `r` the dimension of the span
/// of the states with positive probability: with `Q` the projector onto
/// that span, `p_i ⟨ψ_i|M_a|ψ_i⟩ ≤ p_max Tr(Q M_a)`, and `Σ_a Tr(Q M_a) = r`.
pub fn upper_bound_span_rank(s: &Ensemble) -> BoundValue {
    let tol = Tolerances::current().rank;
    let r = hermitian_eigenvalues(&s.rho())
        .expect("density matrix is Hermitian")
        .into_iter()
        .filter(|&e| e > tol)
        .count();
    let pmax = s.probs().iter().copied().fold(0.0, f64::max);
    let mut b = BoundValue::new(
        BoundKind::SpanRank,
        Quantity::SeparableSuccess,
        Scope::Global,
        Side::Upper,
        r as f64 * pmax,
    );
    b.detail = Some(format!("r={r}"));
    b
}

/// Per-cut upper bounds that can be minimized over bipartitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutBound {
    SchmidtOperator,
    OrthogonalEquiprobable,
    MaximallyEntangled,
    WaterFilling,
}

impl CutBound {
    pub const ALL: [CutBound; 4] = [
        CutBound::SchmidtOperator,
        CutBound::OrthogonalEquiprobable,
        CutBound::MaximallyEntangled,
        CutBound::WaterFilling,
    ];

    pub fn evaluate(self, s: &Ensemble, cut: &Bipartition) -> Result<BoundValue> {
        match self {
            CutBound::SchmidtOperator => upper_bound_schmidt_operator(s, cut),
            CutBound::OrthogonalEquiprobable => upper_bound_orthogonal_equiprobable(s, cut),
            CutBound::MaximallyEntangled => upper_bound_maximally_entangled(s, cut),
            CutBound::WaterFilling => upper_bound_water_filling(s, cut),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CutBound::SchmidtOperator => BoundKind::SchmidtOperator.name(),
            CutBound::OrthogonalEquiprobable => BoundKind::OrthogonalEquiprobable.name(),
            CutBound::MaximallyEntangled => BoundKind::MaximallyEntangled.name(),
            CutBound::WaterFilling => BoundKind::WaterFilling.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteBound {
    /// The smallest per-cut value; first cut wins ties.
    pub best: BoundValue,
    pub per_cut: Vec<BoundValue>,
    pub warnings: Vec<String>,
}

/// A multipartite separable measurement is separable across every cut, so
/// each per-cut bound holds and the minimum is taken.
pub fn multipartite_upper_bound(s: &Ensemble, kind: CutBound) -> Result<MultipartiteBound> {
    let mut per_cut = Vec::new();
    let mut warnings = Vec::new();
    for cut in all_bipartitions(s.dims())? {
        match kind.evaluate(s, &cut) {
            Ok(b) => per_cut.push(b),
            Err(e) => warnings.push(format!("{} at {cut}: {e}", kind.name())),
        }
    }
    let best = per_cut
        .iter()
        .fold(None::<&BoundValue>, |acc, b| match acc {
            Some(a) if a.raw <= b.raw => Some(a),
            _ => Some(b),
        })
        .cloned()
        .ok_or_else(|| Error::NoApplicableCut(warnings.join("; ")))?;
    Ok(MultipartiteBound { best, per_cut, warnings })
}
