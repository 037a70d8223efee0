//! Subcommand implementations. Every command writes its artifacts into the
//! configured output directory, prints one summary line per verdict, and
//! exits with the number of failed verdicts (0 on full pass, 2 on flow
//! breakdown, 64 on usage errors).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use icf_core::flow::{self, FlowError, FlowState, QuantitySeries};
use icf_core::functionals::SurfaceReport;
use icf_core::geometry::{make_profile, profile_to_csv, RadialProfile};
use icf_core::symmfunc::{
    elementary_without, garding_member, newton_inequality_gap, sigma_all, trace_identities,
    CurvatureSpectrum,
};
use icf_core::tolerances;
use icf_core::verify::{
    self, check_monotone_values, equality_case, growth_rate, Direction, Verdict,
};

use crate::config::ExperimentConfig;

#[allow(dead_code)]
pub const EXIT_OK: i32 = 0;
pub const EXIT_BREAKDOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn json_pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("valid json");
    text.push('\n');
    text
}

fn build_profile(config: &ExperimentConfig) -> Result<RadialProfile, String> {
    make_profile(config.family, config.m, config.n, config.d).map_err(|e| e.to_string())
}

fn report_verdicts(verdicts: &[Verdict]) -> i32 {
    for v in verdicts {
        println!("{}", v.summary_line());
    }
    verify::exit_code(verdicts)
}

// ---------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------

pub fn cmd_flow(config: &ExperimentConfig) -> Result<i32, String> {
    let profile = build_profile(config)?;
    let out = &config.output_dir;
    let state = match FlowState::new(profile.clone(), config.k) {
        Ok(state) => state,
        Err(FlowError::InvalidIndex { k, m }) => {
            return Err(format!("flow index k={k} invalid for m={m}"))
        }
        Err(e) => {
            // speed undefined on the initial surface: breakdown at t = 0
            write_file(out, "breakdown_profile.csv", &profile_to_csv(&profile))?;
            eprintln!("flow breakdown before the first step: {e}");
            return Ok(EXIT_BREAKDOWN);
        }
    };
    match flow::run(state, config.t_end, config.sample_every) {
        Err(FlowError::Breakdown(info)) => {
            write_file(out, "series.csv", &info.partial.to_csv())?;
            write_file(out, "breakdown_profile.csv", &profile_to_csv(&info.snapshot))?;
            eprintln!("flow breakdown: {info}");
            Ok(EXIT_BREAKDOWN)
        }
        Err(e) => Err(e.to_string()),
        Ok(run) => {
            write_file(out, "series.csv", &run.series.to_csv())?;
            let verdicts = flow_verdicts(&run.series, run.state.step_count(), config)?;
            write_file(out, "verdicts.json", &verify::verdicts_json(&verdicts))?;
            if config.snapshot_final {
                write_file(
                    out,
                    "profile_final.csv",
                    &profile_to_csv(run.state.profile()),
                )?;
            }
            Ok(report_verdicts(&verdicts))
        }
    }
}

/// Scale for Q-column monotonicity: the prefactor-weighted magnitude of the
/// two integrals whose difference Q tracks.
fn q_scale(series: &QuantitySeries) -> f64 {
    let m = series.m as f64;
    let k = series.k as f64;
    let exponent = -(m - k) / (m + 1.0 - k);
    series
        .rows
        .iter()
        .map(|r| r.int_sigma_km1.powf(exponent) * (r.int_sigma_k_r2.abs() + r.int_sigma_km2.abs()))
        .fold(0.0f64, f64::max)
}

fn flow_verdicts(
    series: &QuantitySeries,
    step_count: u64,
    config: &ExperimentConfig,
) -> Result<Vec<Verdict>, String> {
    let n = config.n;
    let m = series.m as f64;
    let k = series.k as f64;
    let t = series.times();
    let t0 = t[0];
    let dt_avg = (t[t.len() - 1] - t0) / step_count.max(1) as f64;
    let col = |name: &str| {
        series
            .column(name)
            .ok_or_else(|| format!("series has no column {name}"))
    };
    let damped = |values: &[f64], rate: f64| -> Vec<f64> {
        values
            .iter()
            .zip(&t)
            .map(|(v, ti)| v * (-rate * (ti - t0)).exp())
            .collect()
    };
    let max_abs = |values: &[f64]| values.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut verdicts = Vec::new();
    for check in &config.checks {
        let verdict = match check.as_str() {
            "q_monotone" => {
                let tol = tolerances::monotonicity_tol(n, dt_avg, q_scale(series));
                let mut v = check_monotone_values(
                    check,
                    &col(&series.q_column_name())?,
                    Direction::NonIncreasing,
                    tol,
                )
                .map_err(|e| e.to_string())?;
                v.context
                    .insert("column".into(), series.q_column_name());
                v
            }
            "guan_li_monotone" => {
                let values = col("guan_li")?;
                let tol = tolerances::monotonicity_tol(n, dt_avg, max_abs(&values));
                check_monotone_values(check, &values, Direction::NonIncreasing, tol)
                    .map_err(|e| e.to_string())?
            }
            "growth_law" => {
                let slope = growth_rate(series, "int_sigma_km1").map_err(|e| e.to_string())?;
                let target = m - k + 1.0;
                let mut context = BTreeMap::new();
                context.insert("fitted".into(), format!("{slope:.6}"));
                context.insert("target".into(), format!("{target}"));
                Verdict::from_violation(
                    check,
                    (slope - target).abs(),
                    tolerances::GROWTH_FIT_TOL,
                    context,
                )
            }
            "sigma_km2_growth" => {
                let values = damped(&col("int_sigma_km2")?, m - k + 2.0);
                let tol = tolerances::monotonicity_tol(n, dt_avg, max_abs(&values));
                check_monotone_values(check, &values, Direction::NonDecreasing, tol)
                    .map_err(|e| e.to_string())?
            }
            "sigma_k_decay" => {
                let values = damped(&col("int_sigma_k")?, m - k);
                let tol = tolerances::monotonicity_tol(n, dt_avg, max_abs(&values));
                check_monotone_values(check, &values, Direction::NonIncreasing, tol)
                    .map_err(|e| e.to_string())?
            }
            "weighted_diff_decay" => {
                let r2 = col("int_sigma_k_r2")?;
                let km2 = col("int_sigma_km2")?;
                let diff: Vec<f64> = r2.iter().zip(&km2).map(|(a, b)| a - b).collect();
                let values = damped(&diff, m - k);
                // the difference cancels to round-off on centered spheres,
                // so the tolerance scales with the constituents instead
                let sum: Vec<f64> = r2.iter().zip(&km2).map(|(a, b)| a.abs() + b.abs()).collect();
                let scale = max_abs(&damped(&sum, m - k));
                let tol = tolerances::monotonicity_tol(n, dt_avg, scale);
                check_monotone_values(check, &values, Direction::NonIncreasing, tol)
                    .map_err(|e| e.to_string())?
            }
            "roundness_monotone" => {
                let values = col("roundness")?;
                let excess = values.iter().fold(0.0f64, |a, v| a.max(v - 1.0));
                let tol = tolerances::monotonicity_tol(n, dt_avg, excess.max(1e-9));
                check_monotone_values(check, &values, Direction::NonIncreasing, tol)
                    .map_err(|e| e.to_string())?
            }
            other => return Err(format!("unknown flow check `{other}`")),
        };
        verdicts.push(verdict);
    }
    Ok(verdicts)
}

// ---------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------

pub fn cmd_audit(config: &ExperimentConfig) -> Result<i32, String> {
    let profile = build_profile(config)?;
    let report = SurfaceReport::compute(&profile, config.k).map_err(|e| e.to_string())?;
    let mut flat = report.to_flat_json();
    let equality_label = format!("ordering_k{}_l0_p0", config.k);
    if report.residuals.contains_key(&equality_label) {
        let detection = equality_case(&report, &equality_label, tolerances::EQUALITY_TOL)
            .map_err(|e| e.to_string())?;
        flat.as_object_mut()
            .expect("flat report is an object")
            .insert(
                "equality_detected".into(),
                json!(if detection.passed { 1 } else { 0 }),
            );
    }
    write_file(&config.output_dir, "report.json", &json_pretty(&flat))?;
    let verdicts = audit_verdicts(&report, config)?;
    write_file(
        &config.output_dir,
        "verdicts.json",
        &verify::verdicts_json(&verdicts),
    )?;
    Ok(report_verdicts(&verdicts))
}

fn audit_verdicts(
    report: &SurfaceReport,
    config: &ExperimentConfig,
) -> Result<Vec<Verdict>, String> {
    let n = config.n;
    let mut verdicts = Vec::new();
    let scale_of = |label: &str| {
        report
            .scale_for(label)
            .ok_or_else(|| format!("no scale rule for label {label}"))
    };
    for check in &config.checks {
        match check.as_str() {
            // inequality gaps: value must not sink below -tol
            "ordering" | "ros" | "quermass" => {
                let prefix = match check.as_str() {
                    "ordering" => "ordering_",
                    "ros" => "ros",
                    _ => "quermass_",
                };
                for (label, &value) in report
                    .residuals
                    .iter()
                    .filter(|(l, _)| l.starts_with(prefix))
                {
                    let tol = tolerances::inequality_tol(n, scale_of(label)?);
                    let mut context = BTreeMap::new();
                    context.insert("gap".into(), format!("{value:.6e}"));
                    verdicts.push(Verdict::from_violation(label.clone(), -value, tol, context));
                }
            }
            // identity residuals: |value| must stay within tol
            "hm" | "gen_hm" => {
                let prefix = if check == "hm" { "hm_" } else { "gen_hm_" };
                for (label, &value) in report
                    .residuals
                    .iter()
                    .filter(|(l, _)| l.starts_with(prefix))
                {
                    let tol = tolerances::inequality_tol(n, scale_of(label)?);
                    verdicts.push(Verdict::from_violation(
                        label.clone(),
                        value.abs(),
                        tol,
                        BTreeMap::new(),
                    ));
                }
            }
            "positivity" => {
                verdicts.push(positivity_verdict(report, config));
            }
            other => return Err(format!("unknown audit check `{other}`")),
        }
    }
    Ok(verdicts)
}

/// Cone nesting at surface level: whenever some σ_j is positive everywhere,
/// every lower σ_l must be as well; and with σ_k positive everywhere, every
/// Newton transformation below k must be positive definite.
fn positivity_verdict(report: &SurfaceReport, config: &ExperimentConfig) -> Verdict {
    let mut worst = 0.0f64;
    let mut context = BTreeMap::new();
    context.insert(
        "sigma_positive_up_to".into(),
        report.sigma_positive_up_to.to_string(),
    );
    context.insert(
        "newton_spectra_positive".into(),
        report.newton_spectra_positive.to_string(),
    );
    if report.sigma_positive_up_to >= config.k && !report.newton_spectra_positive {
        worst = 1.0;
        context.insert(
            "failure".into(),
            "Newton transformation not positive definite despite sigma_k > 0".into(),
        );
    }
    Verdict::from_violation("positivity", worst, 0.0, context)
}

// ---------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------

pub fn cmd_converge(config: &ExperimentConfig) -> Result<i32, String> {
    let mut reports = Vec::new();
    for &n in &config.ladder {
        let profile =
            make_profile(config.family, config.m, n, config.d).map_err(|e| e.to_string())?;
        reports.push((
            n,
            SurfaceReport::compute(&profile, config.k).map_err(|e| e.to_string())?,
        ));
    }
    let labels: Vec<String> = reports[0].1.residuals.keys().cloned().collect();
    let mut orders: BTreeMap<String, f64> = BTreeMap::new();
    for label in &labels {
        if !reports.iter().all(|(_, r)| r.residuals.contains_key(label)) {
            continue;
        }
        let relative: Vec<(usize, f64)> = reports
            .iter()
            .map(|(n, r)| {
                let scale = r.scale_for(label).unwrap_or(1.0).abs().max(f64::MIN_POSITIVE);
                let mut rel = (r.residuals[label] / scale).abs();
                if rel < tolerances::ORDER_FLOOR_REL {
                    rel = 0.0;
                }
                (*n, rel)
            })
            .collect();
        let order = if is_identity_residual(label) {
            // residuals converge to zero: order of the values themselves
            let map: BTreeMap<usize, f64> = relative.iter().copied().collect();
            verify::convergence_order(&map).map_err(|e| e.to_string())?
        } else {
            // gaps converge to a finite limit: order of successive
            // differences between rungs
            difference_order(&relative)
        };
        orders.insert(label.clone(), order);
    }
    let json_orders: Map = orders
        .iter()
        .map(|(label, &order)| {
            let value = if order.is_finite() {
                json!(order)
            } else {
                json!("inf")
            };
            (label.clone(), value)
        })
        .collect();
    write_file(
        &config.output_dir,
        "orders.json",
        &json_pretty(&Value::Object(json_orders)),
    )?;

    let mut verdicts = Vec::new();
    if config.checks.iter().any(|c| c == "orders") {
        for (label, &order) in &orders {
            let violation = if order.is_finite() { 2.0 - order } else { f64::NEG_INFINITY };
            let mut context = BTreeMap::new();
            context.insert(
                "order".into(),
                if order.is_finite() {
                    format!("{order:.2}")
                } else {
                    "inf".into()
                },
            );
            verdicts.push(Verdict::from_violation(
                format!("order_{label}"),
                violation,
                0.0,
                context,
            ));
        }
    }
    write_file(
        &config.output_dir,
        "verdicts.json",
        &verify::verdicts_json(&verdicts),
    )?;
    Ok(report_verdicts(&verdicts))
}

type Map = serde_json::Map<String, Value>;

fn is_identity_residual(label: &str) -> bool {
    label.starts_with("hm_") || label.starts_with("gen_hm_")
}

/// Order estimate for quantities with a nonzero limit: the decay rate of
/// |value_N - value_2N| across the ladder; +∞ when the differences have
/// already reached round-off.
fn difference_order(ladder: &[(usize, f64)]) -> f64 {
    let mut diffs = Vec::new();
    for pair in ladder.windows(2) {
        let mut diff = (pair[1].1 - pair[0].1).abs();
        if diff < tolerances::ORDER_FLOOR_REL {
            diff = 0.0;
        }
        diffs.push((pair[1].0, diff));
    }
    let mut rates = Vec::new();
    for pair in diffs.windows(2) {
        let ((n_coarse, d_coarse), (n_fine, d_fine)) = (pair[0], pair[1]);
        if d_coarse > 0.0 && d_fine > 0.0 {
            rates.push((d_coarse / d_fine).ln() / (n_fine as f64 / n_coarse as f64).ln());
        }
    }
    if rates.is_empty() {
        f64::INFINITY
    } else {
        rates.iter().sum::<f64>() / rates.len() as f64
    }
}

// ---------------------------------------------------------------------
// identities
// ---------------------------------------------------------------------

pub fn cmd_identities(config: &ExperimentConfig) -> Result<i32, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst_trace = 0.0f64;
    let mut worst_newton = 0.0f64;
    let mut worst_deletion = 0.0f64;
    let mut nesting_failures = 0u64;

    for _ in 0..config.samples {
        let m = rng.gen_range(1..=config.m_max);
        let values: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let kappa = CurvatureSpectrum::new(values.clone()).expect("finite sample");
        let sigmas = sigma_all(&kappa);
        let h: Vec<f64> = {
            let mut h = Vec::with_capacity(m + 2);
            for (k, s) in sigmas.iter().enumerate() {
                h.push(s * icf_core::symmfunc::binomial(m, k));
            }
            h.push(0.0);
            h
        };
        let kappa_norm = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for k in 1..=m {
            let t = trace_identities(&kappa, k).map_err(|e| e.to_string())?;
            let scale = kappa_norm.powi(k as i32 + 1).max(1.0) * (m * m) as f64;
            worst_trace = worst_trace
                .max((t.tr_t - (m - k + 1) as f64 * h[k - 1]).abs() / scale)
                .max((t.tr_ta - k as f64 * h[k]).abs() / scale)
                .max((t.tr_taa - (h[k] * h[1] - (k + 1) as f64 * h[k + 1])).abs() / scale);
        }
        for i in 1..m {
            let gap = newton_inequality_gap(&kappa, i).map_err(|e| e.to_string())?;
            let scale = kappa_norm.powi(2 * i as i32).max(1.0);
            worst_newton = worst_newton.max(-gap / scale);
        }
        for (j, &kappa_j) in values.iter().enumerate() {
            let deleted = elementary_without(&kappa, j).map_err(|e| e.to_string())?;
            for k in 1..=m {
                let rebuilt =
                    deleted.get(k).copied().unwrap_or(0.0) + kappa_j * deleted[k - 1];
                let scale = kappa_norm.powi(k as i32).max(1.0) * (m as f64);
                worst_deletion = worst_deletion.max((rebuilt - h[k]).abs() / scale);
            }
        }
        let mut member_above = false;
        for k in (1..=m).rev() {
            let member = garding_member(&kappa, k);
            if member_above && !member {
                nesting_failures += 1;
            }
            member_above = member;
        }
    }

    let mut context = BTreeMap::new();
    context.insert("samples".into(), config.samples.to_string());
    context.insert("m_max".into(), config.m_max.to_string());
    context.insert("seed".into(), config.seed.to_string());
    let verdicts = vec![
        Verdict::from_violation(
            "trace_identities",
            worst_trace,
            tolerances::ALGEBRA_REL,
            context.clone(),
        ),
        Verdict::from_violation(
            "newton_inequality",
            worst_newton,
            -tolerances::NEWTON_GAP_FLOOR,
            context.clone(),
        ),
        Verdict::from_violation(
            "deletion_identity",
            worst_deletion,
            tolerances::ALGEBRA_REL,
            context.clone(),
        ),
        Verdict::from_violation("garding_nesting", nesting_failures as f64, 0.0, context),
    ];
    write_file(
        &config.output_dir,
        "identities.json",
        &verify::verdicts_json(&verdicts),
    )?;
    Ok(report_verdicts(&verdicts))
}
