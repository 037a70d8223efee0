//! Pass/fail verdicts over sampled series and surface reports:
//! monotonicity with resolution-aware tolerances, exponential growth-rate
//! fits, convergence-order estimates from refinement ladders, and
//! equality-case detection. Verdicts are pure functions of their inputs
//! and can be replayed from the CSV artifacts alone.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::flow::QuantitySeries;
use crate::functionals::SurfaceReport;
use crate::tolerances;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("series column `{0}` does not exist")]
    UnknownColumn(String),
    #[error("check `{name}` needs at least {needed} samples, got {got}")]
    TooFewSamples {
        name: String,
        needed: usize,
        got: usize,
    },
    #[error("growth rate needs strictly positive values, found {value} at sample {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("convergence order needs at least 3 resolutions, got {0}")]
    TooFewResolutions(usize),
    #[error("report has no residual labelled `{0}`")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
}

impl Direction {
    fn label(self) -> &'static str {
        match self {
            Direction::NonIncreasing => "nonincreasing",
            Direction::NonDecreasing => "nondecreasing",
        }
    }
}

/// One named check outcome. `passed` holds exactly when
/// `worst_violation <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub context: BTreeMap<String, String>,
}

impl Verdict {
    pub fn from_violation(
        name: impl Into<String>,
        worst_violation: f64,
        tolerance: f64,
        context: BTreeMap<String, String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: worst_violation <= tolerance,
            worst_violation,
            tolerance,
            context,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "tolerance": self.tolerance,
            "context": self.context,
        })
    }

    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {} worst_violation={:.3e} tolerance={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst_violation,
            self.tolerance
        )
    }
}

/// Verdict array as pretty JSON.
pub fn verdicts_json(verdicts: &[Verdict]) -> String {
    let arr = Value::Array(verdicts.iter().map(Verdict::to_json).collect());
    let mut text = serde_json::to_string_pretty(&arr).expect("verdicts are valid json");
    text.push('\n');
    text
}

/// Process exit code convention: the number of failed verdicts, capped so
/// it never collides with shell signal codes.
pub fn exit_code(verdicts: &[Verdict]) -> i32 {
    verdicts.iter().filter(|v| !v.passed).count().min(125) as i32
}

/// Worst signed forward difference of `values` against the direction; the
/// verdict passes when it stays at or below `tol`.
pub fn check_monotone_values(
    name: impl Into<String>,
    values: &[f64],
    direction: Direction,
    tol: f64,
) -> Result<Verdict, VerifyError> {
    let name = name.into();
    if values.len() < 3 {
        return Err(VerifyError::TooFewSamples {
            name,
            needed: 3,
            got: values.len(),
        });
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_index = 0;
    for (i, pair) in values.windows(2).enumerate() {
        let violation = match direction {
            Direction::NonIncreasing => pair[1] - pair[0],
            Direction::NonDecreasing => pair[0] - pair[1],
        };
        if violation > worst {
            worst = violation;
            worst_index = i;
        }
    }
    let mut context = BTreeMap::new();
    context.insert("direction".into(), direction.label().into());
    context.insert("samples".into(), values.len().to_string());
    context.insert("worst_step".into(), worst_index.to_string());
    Ok(Verdict::from_violation(name, worst, tol, context))
}

/// Monotonicity of a named series column.
pub fn check_monotone(
    series: &QuantitySeries,
    column: &str,
    direction: Direction,
    tol: f64,
) -> Result<Verdict, VerifyError> {
    let values = series
        .column(column)
        .ok_or_else(|| VerifyError::UnknownColumn(column.to_string()))?;
    let mut verdict = check_monotone_values(format!("{column}_{}", direction.label()), &values, direction, tol)?;
    verdict
        .context
        .insert("column".into(), column.to_string());
    Ok(verdict)
}

/// Least-squares slope of ln(values) against t over the middle 80% of the
/// samples; endpoints are discarded because one-sided sampling transients
/// pollute the fit.
pub fn growth_rate_values(t: &[f64], values: &[f64]) -> Result<f64, VerifyError> {
    if t.len() < 3 || values.len() != t.len() {
        return Err(VerifyError::TooFewSamples {
            name: "growth_rate".into(),
            needed: 3,
            got: t.len().min(values.len()),
        });
    }
    let len = t.len();
    let skip = len / 10;
    let range = skip..len - skip;
    let mut logs = Vec::with_capacity(range.len());
    for i in range.clone() {
        if values[i] <= 0.0 {
            return Err(VerifyError::NonPositiveValue {
                index: i,
                value: values[i],
            });
        }
        logs.push(values[i].ln());
    }
    let ts = &t[range];
    let count = ts.len() as f64;
    let mean_t = ts.iter().sum::<f64>() / count;
    let mean_y = logs.iter().sum::<f64>() / count;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (ti, yi) in ts.iter().zip(&logs) {
        cov += (ti - mean_t) * (yi - mean_y);
        var += (ti - mean_t) * (ti - mean_t);
    }
    Ok(cov / var)
}

/// Fitted d/dt log of a series column.
pub fn growth_rate(series: &QuantitySeries, column: &str) -> Result<f64, VerifyError> {
    let values = series
        .column(column)
        .ok_or_else(|| VerifyError::UnknownColumn(column.to_string()))?;
    growth_rate_values(&series.times(), &values)
}

/// Convergence order from a refinement ladder of error magnitudes keyed by
/// grid size. Successive pairs with both errors nonzero contribute
/// log(e_coarse/e_fine) / log(N_fine/N_coarse); the estimate is their mean.
/// Pairs that have already hit zero are treated as converged below the
/// floor, and a ladder with no measurable pair reports +∞.
pub fn convergence_order(values: &BTreeMap<usize, f64>) -> Result<f64, VerifyError> {
    if values.len() < 3 {
        return Err(VerifyError::TooFewResolutions(values.len()));
    }
    let ladder: Vec<(usize, f64)> = values.iter().map(|(&n, &e)| (n, e.abs())).collect();
    let mut orders = Vec::new();
    for pair in ladder.windows(2) {
        let (n_coarse, e_coarse) = pair[0];
        let (n_fine, e_fine) = pair[1];
        if e_coarse > 0.0 && e_fine > 0.0 {
            orders.push((e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln());
        }
    }
    if orders.is_empty() {
        return Ok(f64::INFINITY);
    }
    Ok(orders.iter().sum::<f64>() / orders.len() as f64)
}

/// Equality-case detector: the labelled gap counts as the round-sphere
/// equality exactly when |gap|/scale and roundness - 1 both fall below
/// `tol`. The verdict's `passed` records the detection itself.
pub fn equality_case(
    report: &SurfaceReport,
    gap_label: &str,
    tol: f64,
) -> Result<Verdict, VerifyError> {
    let gap = *report
        .residuals
        .get(gap_label)
        .ok_or_else(|| VerifyError::UnknownLabel(gap_label.to_string()))?;
    let scale = report
        .scale_for(gap_label)
        .ok_or_else(|| VerifyError::UnknownLabel(gap_label.to_string()))?;
    let relative_gap = gap.abs() / scale.abs().max(f64::MIN_POSITIVE);
    let roundness_excess = report.roundness - 1.0;
    let worst = relative_gap.max(roundness_excess);
    let mut context = BTreeMap::new();
    context.insert("label".into(), gap_label.to_string());
    context.insert("relative_gap".into(), format!("{relative_gap:.3e}"));
    context.insert("roundness_excess".into(), format!("{roundness_excess:.3e}"));
    Ok(Verdict::from_violation(
        format!("equality_{gap_label}"),
        worst,
        tol,
        context,
    ))
}

/// Default detection threshold for [`equality_case`].
pub const EQUALITY_TOL: f64 = tolerances::EQUALITY_TOL;
