//! Time evolution under the inverse curvature flow ∂X/∂t = (σ_{k-1}/σ_k) ν.
//!
//! For a radial graph the normal speed F translates into the scalar
//! method-of-lines system ∂ρ/∂t = F · w/ρ on the polar grid (the graph
//! direction meets the normal at ⟨ν, ∂_r⟩ = ρ/w). Steps are classical
//! four-stage explicit Runge-Kutta with a diffusion-limited dt, a spectral
//! de-aliasing filter after each step, and halve-and-retry on positivity
//! loss. A run samples every tracked integral on a fixed time cadence.

use std::fmt::Write as _;

use thiserror::Error;

use crate::functionals::{self, FunctionalsError};
use crate::geometry::spectral::shared_basis;
use crate::geometry::{curvature_spectrum, point_frames, GeometryError, RadialProfile};
use crate::symmfunc::{binomial, elementary_without, sigma_all};
use crate::tolerances;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Functionals(#[from] FunctionalsError),
    #[error("flow index k={k} must satisfy 1 <= k <= m={m}")]
    InvalidIndex { k: usize, m: usize },
    #[error("sigma_{k} lost positivity at node {node} (t = {t}): flow speed undefined")]
    PositivityLost { k: usize, node: usize, t: f64 },
    #[error("time target {t_end} is not ahead of the current time {t}")]
    InvalidTimeTarget { t: f64, t_end: f64 },
    #[error("sample cadence must be positive and finite, got {0}")]
    InvalidCadence(f64),
    #[error("flow broke down at {0}; partial series retained")]
    Breakdown(Box<Breakdown>),
}

/// Terminal diagnostic for a run that lost σ_k positivity: the last good
/// state, the rows recorded so far, and where the speed degenerated.
#[derive(Debug)]
pub struct Breakdown {
    pub t: f64,
    pub node: Option<usize>,
    pub reason: String,
    pub snapshot: RadialProfile,
    pub partial: QuantitySeries,
}

impl std::fmt::Display for Breakdown {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t = {}: {}", self.t, self.reason)
    }
}

/// Flow configuration and current surface.
#[derive(Debug, Clone)]
pub struct FlowState {
    profile: RadialProfile,
    t: f64,
    k: usize,
    step_count: u64,
    last_dt: f64,
}

impl FlowState {
    /// Wrap an initial surface. Fails unless 1 <= k <= m and σ_k > 0 at
    /// every node (the flow speed is undefined otherwise).
    pub fn new(profile: RadialProfile, k: usize) -> Result<Self, FlowError> {
        if k < 1 || k > profile.m() {
            return Err(FlowError::InvalidIndex {
                k,
                m: profile.m(),
            });
        }
        let state = Self {
            profile,
            t: 0.0,
            k,
            step_count: 0,
            last_dt: 0.0,
        };
        // evaluating the speed performs the positivity check
        node_speeds(&state.profile, k, state.t)?;
        Ok(state)
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn last_dt(&self) -> f64 {
        self.last_dt
    }
}

struct SpeedField {
    /// dρ/dt per node.
    speeds: Vec<f64>,
    /// Largest linearized diffusion coefficient |∂(dρ/dt)/∂ρ''|.
    max_diffusion: f64,
}

/// Speed and stiffness of the radial system at one profile.
fn node_speeds(profile: &RadialProfile, k: usize, t: f64) -> Result<SpeedField, FlowError> {
    let frames = point_frames(profile)?;
    let m = profile.m();
    let mut speeds = Vec::with_capacity(frames.len());
    let mut max_diffusion = 0.0f64;
    for (node, frame) in frames.iter().enumerate() {
        let spectrum = curvature_spectrum(frame, m).map_err(GeometryError::from)?;
        let sigma = sigma_all(&spectrum);
        if sigma[k] <= 0.0 {
            return Err(FlowError::PositivityLost { k, node, t });
        }
        let speed_factor = frame.w / profile.rho()[node];
        let f = sigma[k - 1] / sigma[k];
        speeds.push(f * speed_factor);

        // ∂F/∂κ_mer from the deleted elementary symmetric functions;
        // the meridian slot is index 0 of the spectrum.
        let deleted = elementary_without(&spectrum, 0).map_err(GeometryError::from)?;
        let dsig_k = deleted[k - 1] / binomial(m, k);
        let dsig_km1 = if k >= 2 {
            deleted[k - 2] / binomial(m, k - 1)
        } else {
            0.0
        };
        let df = (sigma[k] * dsig_km1 - sigma[k - 1] * dsig_k) / (sigma[k] * sigma[k]);
        // rhs depends on ρ'' only through κ_mer, with ∂κ_mer/∂ρ'' = -ρ/w³
        max_diffusion = max_diffusion.max((df / (frame.w * frame.w)).abs());
    }
    Ok(SpeedField {
        speeds,
        max_diffusion,
    })
}

/// Per-node ∂ρ/∂t = (σ_{k-1}/σ_k) · w/ρ at the current state.
pub fn rhs(state: &FlowState) -> Result<Vec<f64>, FlowError> {
    Ok(node_speeds(&state.profile, state.k, state.t)?.speeds)
}

/// Largest stable step for the explicit scheme at this state.
pub fn dt_max(state: &FlowState) -> Result<f64, FlowError> {
    let field = node_speeds(&state.profile, state.k, state.t)?;
    let dtheta = std::f64::consts::PI / state.profile.n() as f64;
    let cap = 0.1;
    if field.max_diffusion <= 0.0 {
        return Ok(cap);
    }
    Ok((tolerances::STABILITY_FACTOR * dtheta * dtheta / field.max_diffusion).min(cap))
}

/// One four-stage explicit Runge-Kutta step. If the stepped profile loses
/// ρ > 0 or σ_k > 0, the step is rejected and retried with dt halved, up
/// to [`tolerances::MAX_STEP_RETRIES`] times; exhausting the retries is a
/// breakdown reported through the caller.
pub fn step(state: &FlowState, dt: f64) -> Result<FlowState, FlowError> {
    let mut dt = dt;
    let mut last_failure = None;
    for _ in 0..=tolerances::MAX_STEP_RETRIES {
        match try_step(state, dt) {
            Ok(next) => return Ok(next),
            Err(failure) => {
                last_failure = Some(failure);
                dt *= 0.5;
            }
        }
    }
    Err(last_failure.expect("at least one attempt was made"))
}

fn try_step(state: &FlowState, dt: f64) -> Result<FlowState, FlowError> {
    let rho0 = state.profile.rho();
    let n = rho0.len();
    let stage = |rho: Vec<f64>, t: f64| -> Result<Vec<f64>, FlowError> {
        let profile = state.profile.with_rho(rho)?;
        Ok(node_speeds(&profile, state.k, t)?.speeds)
    };
    let combine = |a: &[f64], b: &[f64], factor: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + factor * y).collect()
    };

    let k1 = node_speeds(&state.profile, state.k, state.t)?.speeds;
    let k2 = stage(combine(rho0, &k1, 0.5 * dt), state.t + 0.5 * dt)?;
    let k3 = stage(combine(rho0, &k2, 0.5 * dt), state.t + 0.5 * dt)?;
    let k4 = stage(combine(rho0, &k3, dt), state.t + dt)?;

    let mut rho_new = Vec::with_capacity(n);
    for i in 0..n {
        rho_new.push(rho0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }

    // de-aliasing: drop cosine coefficients at round-off level
    let basis = shared_basis(n);
    let mut coeffs = basis.forward(&rho_new);
    basis.low_pass(&mut coeffs, tolerances::FILTER_REL);
    let rho_new = basis.evaluate(&coeffs);

    let profile = state.profile.with_rho(rho_new)?;
    let t_new = state.t + dt;
    node_speeds(&profile, state.k, t_new)?;
    Ok(FlowState {
        profile,
        t: t_new,
        k: state.k,
        step_count: state.step_count + 1,
        last_dt: dt,
    })
}

/// One sampled record of every tracked quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityRow {
    pub t: f64,
    /// ∫σ_{k-2} dμ; for k = 1 the slot holds the support-function integral
    /// ∫⟨Y,ν⟩ dμ = (m+1)·Vol, which plays the same role in the growth laws.
    pub int_sigma_km2: f64,
    pub int_sigma_km1: f64,
    pub int_sigma_k: f64,
    pub int_sigma_k_r2: f64,
    /// Q_k for k >= 2, its mean-curvature analogue for k = 1.
    pub q: f64,
    pub guan_li: f64,
    pub volume: f64,
    pub area: f64,
    /// max(e^{-t}ρ) / min(e^{-t}ρ) = max ρ / min ρ.
    pub roundness: f64,
    /// Largest relative Hsiung-Minkowski residual over j = 1..m.
    pub hm_residual_max: f64,
}

/// Time-ordered samples of one run.
#[derive(Debug, Clone)]
pub struct QuantitySeries {
    pub m: usize,
    pub k: usize,
    pub rows: Vec<QuantityRow>,
}

impl QuantitySeries {
    pub fn q_column_name(&self) -> String {
        format!("Q_{}", self.k)
    }

    pub fn column_names(&self) -> Vec<String> {
        vec![
            "t".into(),
            "int_sigma_km2".into(),
            "int_sigma_km1".into(),
            "int_sigma_k".into(),
            "int_sigma_k_r2".into(),
            self.q_column_name(),
            "guan_li".into(),
            "volume".into(),
            "area".into(),
            "roundness".into(),
            "hm_residual_max".into(),
        ]
    }

    /// Column values by header name; `Q_<k>` carries the flow index.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let pick: fn(&QuantityRow) -> f64 = match name {
            "t" => |r| r.t,
            "int_sigma_km2" => |r| r.int_sigma_km2,
            "int_sigma_km1" => |r| r.int_sigma_km1,
            "int_sigma_k" => |r| r.int_sigma_k,
            "int_sigma_k_r2" => |r| r.int_sigma_k_r2,
            "guan_li" => |r| r.guan_li,
            "volume" => |r| r.volume,
            "area" => |r| r.area,
            "roundness" => |r| r.roundness,
            "hm_residual_max" => |r| r.hm_residual_max,
            _ if name == self.q_column_name() => |r| r.q,
            _ => return None,
        };
        Some(self.rows.iter().map(pick).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    /// CSV with the header naming the columns exactly and 17 significant
    /// digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = self.column_names().join(",");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t,
                r.int_sigma_km2,
                r.int_sigma_km1,
                r.int_sigma_k,
                r.int_sigma_k_r2,
                r.q,
                r.guan_li,
                r.volume,
                r.area,
                r.roundness,
                r.hm_residual_max
            );
        }
        out
    }
}

/// A completed run: the sampled series and the terminal state.
#[derive(Debug)]
pub struct RunOutput {
    pub series: QuantitySeries,
    pub state: FlowState,
}

fn sample_row(state: &FlowState) -> Result<QuantityRow, FlowError> {
    let profile = &state.profile;
    let m = profile.m();
    let k = state.k;
    let vol = functionals::volume(profile)?;
    let area = functionals::weighted_integral(profile, 0, 0.0)?;
    let int_sigma_km2 = if k >= 2 {
        functionals::weighted_integral(profile, k - 2, 0.0)?
    } else {
        (m as f64 + 1.0) * vol
    };
    let int_sigma_km1 = functionals::weighted_integral(profile, k - 1, 0.0)?;
    let int_sigma_k = functionals::weighted_integral(profile, k, 0.0)?;
    let int_sigma_k_r2 = functionals::weighted_integral(profile, k, 2.0)?;
    let q = if k >= 2 {
        functionals::q_k(profile, k)?
    } else {
        functionals::q1(profile)?
    };
    let guan_li = functionals::guan_li(profile, k)?;
    let mut hm_residual_max = 0.0f64;
    for j in 1..=m {
        let res = functionals::hsiung_minkowski_residual(profile, j)?;
        let scale = functionals::weighted_integral(profile, j - 1, 0.0)?
            .abs()
            .max(f64::MIN_POSITIVE);
        hm_residual_max = hm_residual_max.max(res.abs() / scale);
    }
    Ok(QuantityRow {
        t: state.t,
        int_sigma_km2,
        int_sigma_km1,
        int_sigma_k,
        int_sigma_k_r2,
        q,
        guan_li,
        volume: vol,
        area,
        roundness: profile.roundness(),
        hm_residual_max,
    })
}

/// Evolve to `t_end`, recording a row at the start, every `sample_every`
/// units of time, and at `t_end`. On breakdown the partial series and the
/// last good profile ride along in the error.
pub fn run(state: FlowState, t_end: f64, sample_every: f64) -> Result<RunOutput, FlowError> {
    if !(t_end.is_finite() && t_end > state.t) {
        return Err(FlowError::InvalidTimeTarget {
            t: state.t,
            t_end,
        });
    }
    if !(sample_every.is_finite() && sample_every > 0.0) {
        return Err(FlowError::InvalidCadence(sample_every));
    }
    let t0 = state.t;
    let time_eps = 1e-12 * t_end.abs().max(1.0);
    let mut series = QuantitySeries {
        m: state.profile.m(),
        k: state.k,
        rows: Vec::new(),
    };
    let mut state = state;

    // every sigma_k failure, whether hit while stepping or while sampling,
    // becomes a breakdown carrying the last good profile and the rows so far
    let breakdown = |e: FlowError, state: &FlowState, series: &QuantitySeries| -> FlowError {
        let located = match &e {
            FlowError::PositivityLost { node, t, .. } => Some((Some(*node), *t)),
            FlowError::Functionals(FunctionalsError::PositivityLoss { node, .. }) => {
                Some((Some(*node), state.t))
            }
            _ => None,
        };
        match located {
            Some((node, t)) => FlowError::Breakdown(Box::new(Breakdown {
                t,
                node,
                reason: format!("sigma_{} lost positivity ({e})", state.k),
                snapshot: state.profile.clone(),
                partial: series.clone(),
            })),
            None => e,
        }
    };

    let row = sample_row(&state).map_err(|e| breakdown(e, &state, &series))?;
    series.rows.push(row);
    let mut sample_index: u64 = 1;

    while state.t < t_end - time_eps {
        let next_sample = (t0 + sample_index as f64 * sample_every).min(t_end);
        let target = next_sample.min(t_end);
        let dt_cap = dt_max(&state).map_err(|e| breakdown(e, &state, &series))?;
        let dt = dt_cap.min(target - state.t);
        state = step(&state, dt).map_err(|e| breakdown(e, &state, &series))?;
        if state.t >= target - time_eps {
            let row = sample_row(&state).map_err(|e| breakdown(e, &state, &series))?;
            series.rows.push(row);
            if (target - next_sample).abs() <= time_eps {
                sample_index += 1;
            }
        }
    }
    Ok(RunOutput { series, state })
}

/// The rescaled surface e^{-t} X: radii and axis offset both shrink by
/// e^{-t}.
pub fn rescaled(profile: &RadialProfile, t: f64) -> Result<RadialProfile, GeometryError> {
    profile.scaled((-t).exp())
}
