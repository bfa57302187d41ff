//! Reproduction table for catalog entries: every known value against the
//! bound report, the entry's own strategies and, optionally, a search.

use serde::Serialize;

use crate::bounds::{bound_report, Quantity};
use crate::catalog::CatalogEntry;
use crate::error::Result;
use crate::fidelity::{achievable_fidelity, success_probability};
use crate::search::{certify, Objective, SearchConfig};

/// Tolerance for closed-form rows.
pub const ANALYTIC_TOLERANCE: f64 = 1e-9;
/// Tolerance for search-certified rows.
pub const SEARCH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub entry: String,
    pub description: String,
    pub quantity: String,
    pub expression: String,
    /// `lower`, `upper`, `strategy[name]` or `search`.
    pub source: String,
    pub computed: f64,
    pub expected: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn row(entry: &CatalogEntry, quantity: Quantity, expression: &str, source: String, computed: f64, expected: f64, tolerance: f64) -> VerifyRow {
    let delta = (computed - expected).abs();
    VerifyRow {
        entry: entry.name.clone(),
        description: entry.description.clone(),
        quantity: quantity.name().into(),
        expression: expression.into(),
        source,
        computed,
        expected,
        delta,
        tolerance,
        pass: delta <= tolerance,
    }
}

/// One row per known value and source. `search = None` skips the search
/// rows.
pub fn verify_entry(entry: &CatalogEntry, search: Option<&SearchConfig>) -> Result<Vec<VerifyRow>> {
    let report = bound_report(&entry.ensemble, &entry.report_options())?;
    let mut rows = Vec::new();
    for k in &entry.known {
        let sandwich = match k.quantity {
            Quantity::SeparableFidelity => &report.fidelity,
            Quantity::SeparableSuccess => &report.success,
        };
        rows.push(row(entry, k.quantity, &k.expression, format!("lower {}", sandwich.lower_source), sandwich.lower, k.value, ANALYTIC_TOLERANCE));
        rows.push(row(entry, k.quantity, &k.expression, format!("upper {}", sandwich.upper_source), sandwich.upper, k.value, ANALYTIC_TOLERANCE));
        for st in &entry.strategies {
            let v = match k.quantity {
                Quantity::SeparableFidelity => achievable_fidelity(&entry.ensemble, &st.povm)?.achievable_fidelity,
                Quantity::SeparableSuccess => success_probability(&entry.ensemble, &st.povm, None)?,
            };
            rows.push(row(entry, k.quantity, &k.expression, format!("strategy[{}]", st.name), v, k.value, ANALYTIC_TOLERANCE));
        }
        if let Some(base) = search {
            let cfg = SearchConfig {
                objective: match k.quantity {
                    Quantity::SeparableFidelity => Objective::Fidelity,
                    Quantity::SeparableSuccess => Objective::Success,
                },
                ..base.clone()
            };
            let seeds: Vec<_> = entry.strategies.iter().map(|s| s.povm.clone()).collect();
            let r = certify(&entry.ensemble, &cfg, &seeds)?;
            rows.push(row(entry, k.quantity, &k.expression, "search".into(), r.best_value, k.value, SEARCH_TOLERANCE));
        }
    }
    Ok(rows)
}
