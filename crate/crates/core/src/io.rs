//! JSON documents: ensemble and measurement files (input and export), and
//! the machine-readable bound, strategy and search reports.
//!
//! Amplitudes are `[re, im]` pairs in lexicographic computational-basis
//! order with party 0 most significant. Input documents reject unknown
//! fields. Exported amplitudes keep full precision so files round-trip
//! exactly; report numbers are rounded to 12 significant digits.

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, BoundValue, Sandwich};
use crate::ensemble::Ensemble;
use crate::fidelity::StrategyReport;
use crate::linalg::{Complex64, StateVector};
use crate::measurement::{DecodingMap, Guess, SeparableOutcome, SeparablePovm};
use crate::search::SearchResult;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("parse error at `{field}` (line {line}, column {column}): {message}")]
    Parse {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] crate::error::Error),
}

pub type Amplitudes = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub dims: Vec<usize>,
    pub states: Vec<StateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub prob: f64,
    pub amplitudes: Amplitudes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    pub dims: Vec<usize>,
    pub outcomes: Vec<OutcomeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoding: Option<Vec<GuessRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeRecord {
    pub weight: f64,
    /// One amplitude list per party.
    pub factors: Vec<Amplitudes>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum GuessRecord {
    Member(usize),
    State(Amplitudes),
}

fn to_pairs(v: &[Complex64]) -> Amplitudes {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

impl EnsembleFile {
    pub fn from_ensemble(s: &Ensemble) -> Self {
        EnsembleFile {
            dims: s.dims().to_vec(),
            states: s
                .states()
                .iter()
                .zip(s.probs())
                .map(|(psi, &prob)| StateRecord {
                    prob,
                    amplitudes: to_pairs(psi.amplitudes()),
                })
                .collect(),
        }
    }

    pub fn to_ensemble(&self) -> crate::error::Result<Ensemble> {
        let states = self
            .states
            .iter()
            .map(|r| StateVector::new(self.dims.clone(), from_pairs(&r.amplitudes)))
            .collect::<crate::error::Result<Vec<_>>>()?;
        Ensemble::new(states, self.states.iter().map(|r| r.prob).collect())
    }
}

impl MeasurementFile {
    pub fn from_povm(m: &SeparablePovm, decoding: Option<&DecodingMap>) -> Self {
        use crate::measurement::Povm;
        MeasurementFile {
            dims: m.dims().to_vec(),
            outcomes: m
                .outcomes()
                .iter()
                .map(|o| OutcomeRecord {
                    weight: o.weight(),
                    factors: o.factors().iter().map(|f| to_pairs(f.amplitudes())).collect(),
                })
                .collect(),
            decoding: decoding.map(|g| {
                g.guesses()
                    .iter()
                    .map(|x| match x {
                        Guess::Member(i) => GuessRecord::Member(*i),
                        Guess::State(v) => GuessRecord::State(to_pairs(v.amplitudes())),
                    })
                    .collect()
            }),
        }
    }

    pub fn to_povm(&self) -> crate::error::Result<(SeparablePovm, Option<DecodingMap>)> {
        let mut outcomes = Vec::with_capacity(self.outcomes.len());
        for o in &self.outcomes {
            if o.factors.len() != self.dims.len() {
                return Err(crate::error::Error::ShapeMismatch {
                    expected: format!("{} factors", self.dims.len()),
                    got: format!("{} factors", o.factors.len()),
                });
            }
            let factors = o
                .factors
                .iter()
                .zip(&self.dims)
                .map(|(f, &d)| StateVector::new(vec![d], from_pairs(f)))
                .collect::<crate::error::Result<Vec<_>>>()?;
            outcomes.push(SeparableOutcome::new(o.weight, factors)?);
        }
        let povm = SeparablePovm::new(self.dims.clone(), outcomes)?;
        let decoding = match &self.decoding {
            None => None,
            Some(list) => Some(DecodingMap::new(
                list.iter()
                    .map(|g| match g {
                        GuessRecord::Member(i) => Ok(Guess::Member(*i)),
                        GuessRecord::State(a) => StateVector::new(self.dims.clone(), from_pairs(a)).map(Guess::State),
                    })
                    .collect::<crate::error::Result<Vec<_>>>()?,
            )),
        };
        Ok((povm, decoding))
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, LoadError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        LoadError::Parse {
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| LoadError::Parse {
        field: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(value)
}

pub fn parse_ensemble(text: &str) -> Result<Ensemble, LoadError> {
    Ok(parse_json::<EnsembleFile>(text)?.to_ensemble()?)
}

pub fn parse_measurement(text: &str) -> Result<(SeparablePovm, Option<DecodingMap>), LoadError> {
    Ok(parse_json::<MeasurementFile>(text)?.to_povm()?)
}

fn read(path: &std::path::Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|e| LoadError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_ensemble(path: &std::path::Path) -> Result<Ensemble, LoadError> {
    parse_ensemble(&read(path)?)
}

pub fn load_measurement(path: &std::path::Path) -> Result<(SeparablePovm, Option<DecodingMap>), LoadError> {
    parse_measurement(&read(path)?)
}

pub fn ensemble_to_json(s: &Ensemble) -> String {
    to_json(&EnsembleFile::from_ensemble(s))
}

pub fn measurement_to_json(m: &SeparablePovm, decoding: Option<&DecodingMap>) -> String {
    to_json(&MeasurementFile::from_povm(m, decoding))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(round12).collect()
}

/// Machine-readable bound report. Every field is always present; absent
/// values are `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDoc {
    pub dims: Vec<usize>,
    pub states: usize,
    pub orthogonal: bool,
    pub equiprobable: bool,
    pub span_rank: usize,
    pub cuts: Vec<CutDoc>,
    pub bounds: Vec<BoundDoc>,
    pub skipped: Vec<SkippedDoc>,
    pub fidelity: SandwichDoc,
    pub success: SandwichDoc,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutDoc {
    pub cut: String,
    pub nominal: [usize; 2],
    pub effective: [usize; 2],
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundDoc {
    pub name: String,
    pub quantity: String,
    pub scope: String,
    pub side: String,
    pub cut: Option<String>,
    pub dims_used: Option<[usize; 2]>,
    pub raw: f64,
    pub capped: f64,
    pub informative: bool,
    pub mode: Option<String>,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedDoc {
    pub name: String,
    pub cut: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichDoc {
    pub lower: f64,
    pub lower_source: String,
    pub upper: f64,
    pub upper_source: String,
    pub determined: bool,
}

impl From<&BoundValue> for BoundDoc {
    fn from(b: &BoundValue) -> Self {
        BoundDoc {
            name: b.kind.name().into(),
            quantity: b.quantity.name().into(),
            scope: b.scope.name().into(),
            side: b.side.name().into(),
            cut: b.cut.as_ref().map(|c| c.label()),
            dims_used: b.dims_used.map(|(a, c)| [a, c]),
            raw: round12(b.raw),
            capped: round12(b.capped),
            informative: b.informative,
            mode: b.mode.map(|m| m.name().into()),
            detail: b.detail.clone(),
        }
    }
}

impl From<&Sandwich> for SandwichDoc {
    fn from(s: &Sandwich) -> Self {
        SandwichDoc {
            lower: round12(s.lower),
            lower_source: s.lower_source.clone(),
            upper: round12(s.upper),
            upper_source: s.upper_source.clone(),
            determined: s.determined,
        }
    }
}

impl From<&BoundReport> for ReportDoc {
    fn from(r: &BoundReport) -> Self {
        ReportDoc {
            dims: r.dims.clone(),
            states: r.states,
            orthogonal: r.orthogonal,
            equiprobable: r.equiprobable,
            span_rank: r.span_rank,
            cuts: r
                .cuts
                .iter()
                .map(|c| CutDoc {
                    cut: c.cut.label(),
                    nominal: [c.nominal.0, c.nominal.1],
                    effective: [c.effective.0, c.effective.1],
                    lambdas: round_all(&c.lambdas),
                })
                .collect(),
            bounds: r.bounds.iter().map(BoundDoc::from).collect(),
            skipped: r
                .skipped
                .iter()
                .map(|s| SkippedDoc {
                    name: s.name.clone(),
                    cut: s.cut.as_ref().map(|c| c.label()),
                    reason: s.reason.clone(),
                })
                .collect(),
            fidelity: (&r.fidelity).into(),
            success: (&r.success).into(),
            warnings: r.warnings.clone(),
        }
    }
}

pub fn report_to_json(r: &BoundReport) -> String {
    to_json(&ReportDoc::from(r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyDoc {
    /// `F(M,G)` for the file's decoding; `null` without one.
    pub average_fidelity: Option<f64>,
    pub achievable_fidelity: f64,
    pub success_probability: Option<f64>,
    pub ml_success_probability: f64,
    pub outcomes: Vec<OutcomeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDoc {
    pub outcome: usize,
    pub contribution: f64,
    pub guess: Amplitudes,
}

impl StrategyDoc {
    pub fn new(rep: &StrategyReport, decoded: bool, ml_success: f64) -> Self {
        StrategyDoc {
            average_fidelity: decoded.then(|| round12(rep.average_fidelity)),
            achievable_fidelity: round12(rep.achievable_fidelity),
            success_probability: rep.success_probability.map(round12),
            ml_success_probability: round12(ml_success),
            outcomes: rep
                .per_outcome
                .iter()
                .map(|g| OutcomeDoc {
                    outcome: g.outcome,
                    contribution: round12(g.contribution),
                    guess: g.guess.amplitudes().iter().map(|z| [round12(z.re), round12(z.im)]).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchDoc {
    pub objective: String,
    pub best_value: f64,
    pub best_restart: usize,
    pub trace: Vec<f64>,
}

impl From<&SearchResult> for SearchDoc {
    fn from(r: &SearchResult) -> Self {
        SearchDoc {
            objective: r.objective.name().into(),
            best_value: round12(r.best_value),
            best_restart: r.best_restart,
            trace: round_all(&r.trace),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bell_ensemble, mes_selection};

    #[test]
    fn ensemble_round_trip_is_exact() {
        let e = mes_selection(3, 5, 1).unwrap().ensemble;
        let text = ensemble_to_json(&e);
        let back = parse_ensemble(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(ensemble_to_json(&back), text);
    }

    #[test]
    fn measurement_round_trip_is_exact() {
        let entry = bell_ensemble([0.25; 4]).unwrap();
        let st = &entry.strategies[0];
        let text = measurement_to_json(&st.povm, st.decoding.as_ref());
        let (m, g) = parse_measurement(&text).unwrap();
        assert_eq!(&m, &st.povm);
        assert_eq!(g.as_ref(), st.decoding.as_ref());
        assert!(text.contains("\"member\": 1"));
    }

    #[test]
    fn parse_errors_name_the_field() {
        let bad = r#"{"dims": [2], "states": [{"prob": 1.0, "amplitudes": [[1.0, 0.0], [0.0]]}]}"#;
        match parse_ensemble(bad) {
            Err(LoadError::Parse { field, .. }) => assert!(field.starts_with("states[0].amplitudes[1]"), "{field}"),
            other => panic!("{other:?}"),
        }
        let unknown = r#"{"dims": [2], "states": [], "extra": 1}"#;
        assert!(matches!(parse_ensemble(unknown), Err(LoadError::Parse { .. })));
    }

    #[test]
    fn invariant_errors_are_separate_from_parse_errors() {
        let unnormalized = r#"{"dims": [2], "states": [{"prob": 1.0, "amplitudes": [[1.0, 0.0], [1.0, 0.0]]}]}"#;
        assert!(matches!(parse_ensemble(unnormalized), Err(LoadError::Invalid(_))));
        let probs = r#"{"dims": [2], "states": [{"prob": 0.5, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}]}"#;
        assert!(matches!(parse_ensemble(probs), Err(LoadError::Invalid(_))));
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(2.0 / 3.0), 0.666666666667);
        assert_eq!(round12(0.0), 0.0);
    }
}
