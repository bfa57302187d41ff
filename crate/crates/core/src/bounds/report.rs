use rayon::prelude::*;

use super::{
    format_members, lower_bound_count, lower_bound_subsets, upper_bound_ky_fan, upper_bound_span_rank, BoundKind,
    BoundValue, CutBound, DistinguishableSubset, Quantity, Scope, Side,
};
use crate::ensemble::{all_bipartitions, Bipartition, Ensemble};
use crate::error::Result;
use crate::fidelity::{evaluate_strategy, success_probability};
use crate::measurement::Strategy;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    /// Caller-supplied subsets, merged with the automatic ones.
    pub subsets: Vec<DistinguishableSubset>,
    pub use_default_subsets: bool,
    /// Reject declared subsets; automatic declared pairs are dropped.
    pub strict: bool,
    /// Known separable strategies; their values are lower bounds.
    pub strategies: Vec<Strategy>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            subsets: Vec::new(),
            use_default_subsets: true,
            strict: false,
            strategies: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutInfo {
    pub cut: Bipartition,
    /// `(d1, d2)` from the party dimensions.
    pub nominal: (usize, usize),
    /// Ranks of the local supports, smaller first.
    pub effective: (usize, usize),
    pub lambdas: Vec<f64>,
}

/// A bound that does not apply, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub name: String,
    pub cut: Option<Bipartition>,
    pub reason: String,
}

/// Best lower and upper bound for one quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    pub quantity: Quantity,
    pub lower: f64,
    pub lower_source: String,
    pub upper: f64,
    pub upper_source: String,
    /// `lower ≥ upper − tolerance`
    pub determined: bool,
}

impl Sandwich {
    pub fn value(&self) -> Option<f64> {
        self.determined.then_some(self.lower)
    }

    fn build(quantity: Quantity, lowers: &[(f64, String)], uppers: &[(f64, String)]) -> Sandwich {
        let (lower, lower_source) = lowers
            .iter()
            .fold((0.0, "none".to_string()), |acc, (v, s)| if *v > acc.0 { (*v, s.clone()) } else { acc });
        let (upper, upper_source) = uppers
            .iter()
            .fold((1.0, "trivial".to_string()), |acc, (v, s)| if *v < acc.0 { (*v, s.clone()) } else { acc });
        Sandwich {
            quantity,
            lower,
            lower_source,
            upper,
            upper_source,
            determined: lower >= upper - Tolerances::current().sandwich,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub dims: Vec<usize>,
    pub states: usize,
    pub orthogonal: bool,
    pub equiprobable: bool,
    pub span_rank: usize,
    pub cuts: Vec<CutInfo>,
    pub bounds: Vec<BoundValue>,
    pub skipped: Vec<Skipped>,
    pub fidelity: Sandwich,
    pub success: Sandwich,
    pub warnings: Vec<String>,
}

impl BoundReport {
    pub fn find(&self, kind: BoundKind, cut: Option<&str>) -> Option<&BoundValue> {
        self.bounds
            .iter()
            .find(|b| b.kind == kind && cut.is_none_or(|c| b.cut.as_ref().map(|x| x.label()).as_deref() == Some(c)))
    }

    /// Smallest upper bound of one kind over all cuts.
    pub fn min_over_cuts(&self, kind: BoundKind) -> Option<&BoundValue> {
        self.bounds
            .iter()
            .filter(|b| b.kind == kind)
            .fold(None, |acc: Option<&BoundValue>, b| match acc {
                Some(a) if a.raw <= b.raw => Some(a),
                _ => Some(b),
            })
    }
}

/// Every applicable bound at every cut, plus global and lower bounds, and
/// the resulting sandwiches.
///
/// Transfers between the two quantities: `P_s(M) ≤ F(M)` always, so
/// fidelity upper bounds also bound `P_s` and strategy success values also
/// bound `F_S` from below; for orthogonal ensembles the two coincide and
/// every bound transfers.
pub fn bound_report(s: &Ensemble, opts: &ReportOptions) -> Result<BoundReport> {
    let mut warnings = Vec::new();
    for i in s.zero_probability_states() {
        warnings.push(format!("state {i} has probability 0; it is ignored by the bounds but counts toward the span rank"));
    }
    let cuts = if s.dims().len() >= 2 {
        all_bipartitions(s.dims())?
    } else {
        warnings.push("single-party system: no per-cut bounds".into());
        Vec::new()
    };

    let per_cut: Vec<(CutInfo, Vec<BoundValue>, Vec<Skipped>)> = cuts
        .par_iter()
        .map(|cut| -> Result<_> {
            let info = CutInfo {
                cut: cut.clone(),
                nominal: (cut.d1(), cut.d2()),
                effective: s.local_support_dims(cut)?,
                lambdas: s.lambdas(cut)?,
            };
            let mut found = Vec::new();
            let mut skipped = Vec::new();
            for kind in CutBound::ALL {
                match kind.evaluate(s, cut) {
                    Ok(b) => found.push(b),
                    Err(e) => skipped.push(Skipped {
                        name: kind.name().into(),
                        cut: Some(cut.clone()),
                        reason: e.to_string(),
                    }),
                }
            }
            Ok((info, found, skipped))
        })
        .collect::<Result<_>>()?;

    let mut cut_infos = Vec::new();
    let mut bounds = Vec::new();
    let mut skipped = Vec::new();
    for (info, b, sk) in per_cut {
        if info.effective != info.nominal {
            warnings.push(format!(
                "cut {}: local supports have dimensions {:?}, smaller than {:?}; per-cut bounds use the former",
                info.cut, info.effective, info.nominal
            ));
        }
        cut_infos.push(info);
        bounds.extend(b);
        skipped.extend(sk);
    }
    bounds.push(upper_bound_ky_fan(s));
    bounds.push(upper_bound_span_rank(s));

    let mut subsets = opts.subsets.clone();
    if opts.use_default_subsets {
        subsets.extend(
            super::default_subsets(s)
                .into_iter()
                .filter(|x| !opts.strict || x.is_certified()),
        );
    }
    if !subsets.is_empty() {
        bounds.push(lower_bound_subsets(s, &subsets, opts.strict)?);
        if s.is_equiprobable() {
            let largest = subsets
                .iter()
                .fold(None::<&DistinguishableSubset>, |acc, x| match acc {
                    Some(a) if a.members().len() > x.members().len()
                        || (a.members().len() == x.members().len() && (a.is_certified() || !x.is_certified())) =>
                    {
                        Some(a)
                    }
                    _ => Some(x),
                })
                .expect("nonempty");
            let mut b = lower_bound_count(s.len(), largest.members().len())?;
            b.mode = Some(if largest.is_certified() { super::Mode::Strict } else { super::Mode::Declared });
            b.detail = Some(format!("m={},N={},{}", largest.members().len(), s.len(), format_members(largest.members())));
            bounds.push(b);
        }
    }

    for st in &opts.strategies {
        let rep = evaluate_strategy(s, &st.povm, st.decoding.as_ref())?;
        let ml = success_probability(s, &st.povm, None)?;
        for (quantity, raw) in [(Quantity::SeparableFidelity, rep.achievable_fidelity), (Quantity::SeparableSuccess, ml)] {
            let mut b = BoundValue::new(BoundKind::Strategy, quantity, Scope::Separable, Side::Lower, raw.min(1.0));
            b.detail = Some(st.name.clone());
            bounds.push(b);
        }
    }

    let orthogonal = s.is_orthogonal();
    let mut f_lo = Vec::new();
    let mut f_up = Vec::new();
    let mut p_lo = Vec::new();
    let mut p_up = Vec::new();
    for b in &bounds {
        let entry = (b.capped, b.source());
        match (b.side, b.quantity, b.kind) {
            (Side::Upper, Quantity::SeparableFidelity, _) => {
                f_up.push(entry.clone());
                p_up.push(entry);
            }
            (Side::Upper, Quantity::SeparableSuccess, _) => {
                if orthogonal {
                    f_up.push(entry.clone());
                }
                p_up.push(entry);
            }
            (Side::Lower, _, BoundKind::DistinguishableSubset | BoundKind::DistinguishableCount) => {
                f_lo.push(entry.clone());
                p_lo.push(entry);
            }
            (Side::Lower, Quantity::SeparableSuccess, _) => {
                f_lo.push(entry.clone());
                p_lo.push(entry);
            }
            (Side::Lower, Quantity::SeparableFidelity, _) => {
                if orthogonal {
                    p_lo.push(entry.clone());
                }
                f_lo.push(entry);
            }
        }
    }

    Ok(BoundReport {
        dims: s.dims().to_vec(),
        states: s.len(),
        orthogonal,
        equiprobable: s.is_equiprobable(),
        span_rank: s.span_rank(),
        cuts: cut_infos,
        bounds,
        skipped,
        fidelity: Sandwich::build(Quantity::SeparableFidelity, &f_lo, &f_up),
        success: Sandwich::build(Quantity::SeparableSuccess, &p_lo, &p_up),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector;

    #[test]
    fn bell_sandwich_is_determined() {
        let s = 0.5f64.sqrt();
        let states = [[s, 0.0, 0.0, s], [s, 0.0, 0.0, -s], [0.0, s, s, 0.0], [0.0, s, -s, 0.0]]
            .iter()
            .map(|a| StateVector::from_real(&[2, 2], a).unwrap())
            .collect();
        let b = Ensemble::new(states, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let r = bound_report(&b, &ReportOptions::default()).unwrap();
        assert!(r.fidelity.determined, "{:?}", r.fidelity);
        assert!((r.fidelity.value().unwrap() - 0.7).abs() < 1e-12);
        assert!(r.success.determined);
        assert!(r.warnings.is_empty());
        assert!(r.find(BoundKind::MaximallyEntangled, Some("A:B")).is_some());
    }

    #[test]
    fn single_state_is_trivially_determined() {
        let psi = StateVector::from_real(&[2, 3], &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let e = Ensemble::new(vec![psi], vec![1.0]).unwrap();
        let r = bound_report(&e, &ReportOptions::default()).unwrap();
        assert_eq!(r.fidelity.value(), Some(1.0));
        assert_eq!(r.success.value(), Some(1.0));
        for b in &r.bounds {
            assert_eq!(b.capped, 1.0, "{b}");
        }
    }

    #[test]
    fn zero_probability_states_are_flagged() {
        let e = Ensemble::new(
            vec![StateVector::basis(&[2, 2], 0).unwrap(), StateVector::basis(&[2, 2], 3).unwrap()],
            vec![1.0, 0.0],
        )
        .unwrap();
        let r = bound_report(&e, &ReportOptions::default()).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("state 1 has probability 0")));
    }
}
