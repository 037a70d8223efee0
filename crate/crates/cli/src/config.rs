//! Experiment configuration: defaults, overlaid by a flat JSON config
//! file, overlaid by command-line flags.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::Deserialize;

use icf_core::geometry::SurfaceFamily;

/// Checks a `flow` run can request.
pub const FLOW_CHECKS: &[&str] = &[
    "q_monotone",
    "guan_li_monotone",
    "growth_law",
    "sigma_km2_growth",
    "sigma_k_decay",
    "weighted_diff_decay",
    "roundness_monotone",
];

/// Checks an `audit` can request.
pub const AUDIT_CHECKS: &[&str] = &["ordering", "hm", "gen_hm", "ros", "quermass", "positivity"];

/// Checks a `converge` ladder can request.
pub const CONVERGE_CHECKS: &[&str] = &["orders"];

/// Flat JSON config file; every field optional, flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub m: Option<usize>,
    pub k: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub family: Option<String>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub eps: Option<f64>,
    pub degree: Option<usize>,
    pub d: Option<f64>,
    pub t_end: Option<f64>,
    pub sample_every: Option<f64>,
    pub checks: Option<Vec<String>>,
    pub output_dir: Option<PathBuf>,
    pub ladder: Option<Vec<usize>>,
    pub samples: Option<u64>,
    pub m_max: Option<usize>,
    pub seed: Option<u64>,
    pub snapshot_final: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub family: SurfaceFamily,
    pub d: f64,
    pub t_end: f64,
    pub sample_every: f64,
    pub checks: Vec<String>,
    pub output_dir: PathBuf,
    pub ladder: Vec<usize>,
    pub samples: u64,
    pub m_max: usize,
    pub seed: u64,
    pub snapshot_final: bool,
}

pub struct ConfigInputs {
    pub file: FileConfig,
    pub flags: FileConfig,
}

impl ConfigInputs {
    fn pick<T: Clone>(&self, get: impl Fn(&FileConfig) -> Option<T>, default: T) -> T {
        get(&self.flags).or_else(|| get(&self.file)).unwrap_or(default)
    }

    /// Resolve with defaults and validate. `known_checks` is the check
    /// vocabulary of the subcommand being run.
    pub fn resolve(&self, known_checks: &[&str]) -> Result<ExperimentConfig, String> {
        let m = self.pick(|c| c.m, 2);
        let k = self.pick(|c| c.k, 2.min(m));
        let n = self.pick(|c| c.n, 128);
        let family_name = self.pick(|c| c.family.clone(), "sphere".to_string());
        let r = self.pick(|c| c.r, 1.0);
        let a = self.pick(|c| c.a, 1.0);
        let c_axis = self.pick(|c| c.c, 2.0);
        let eps = self.pick(|c| c.eps, 0.1);
        let degree = self.pick(|c| c.degree, 3);
        let d = self.pick(|c| c.d, 0.0);
        let t_end = self.pick(|c| c.t_end, 1.0);
        let sample_every = self.pick(|c| c.sample_every, t_end / 100.0);
        let checks = self.pick(
            |c| c.checks.clone(),
            known_checks.iter().map(|s| s.to_string()).collect(),
        );
        let output_dir = self.pick(
            |c| c.output_dir.clone(),
            std::env::var_os("ICF_OUTPUT_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("icf-out")),
        );
        let ladder = self.pick(|c| c.ladder.clone(), vec![32, 64, 128]);
        let samples = self.pick(|c| c.samples, 10_000);
        let m_max = self.pick(|c| c.m_max, 10);
        let seed = self.pick(|c| c.seed, 0x05ee_d1cf);
        let snapshot_final = self.pick(|c| c.snapshot_final, false);

        if m < 2 {
            return Err(format!("m must be at least 2, got {m}"));
        }
        if k < 1 || k > m {
            return Err(format!("k must satisfy 1 <= k <= m, got k={k} m={m}"));
        }
        let power_of_two_in_range =
            |n: usize| (32..=1024).contains(&n) && n.is_power_of_two();
        if !power_of_two_in_range(n) {
            return Err(format!("N must be a power of two in [32, 1024], got {n}"));
        }
        for &rung in &ladder {
            if !power_of_two_in_range(rung) {
                return Err(format!(
                    "ladder entries must be powers of two in [32, 1024], got {rung}"
                ));
            }
        }
        if ladder.len() >= 2 && ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err("ladder must be strictly increasing".to_string());
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(format!("t_end must be positive, got {t_end}"));
        }
        if !(sample_every.is_finite() && sample_every > 0.0) {
            return Err(format!("sample_every must be positive, got {sample_every}"));
        }
        if !d.is_finite() {
            return Err(format!("d must be finite, got {d}"));
        }
        if m_max < 1 {
            return Err("m_max must be at least 1".to_string());
        }
        let known: BTreeSet<&str> = known_checks.iter().copied().collect();
        for check in &checks {
            if !known.contains(check.as_str()) {
                return Err(format!(
                    "unknown check `{check}`; this command knows {}",
                    known_checks.join(", ")
                ));
            }
        }
        let family = match family_name.as_str() {
            "sphere" => SurfaceFamily::Sphere { radius: r },
            "spheroid" => SurfaceFamily::Spheroid { a, c: c_axis },
            "legendre_bump" => SurfaceFamily::LegendreBump {
                radius: r,
                eps,
                degree,
            },
            other => {
                return Err(format!(
                    "unknown family `{other}`; expected sphere, spheroid or legendre_bump"
                ))
            }
        };
        Ok(ExperimentConfig {
            m,
            k,
            n,
            family,
            d,
            t_end,
            sample_every,
            checks,
            output_dir,
            ladder,
            samples,
            m_max,
            seed,
            snapshot_final,
        })
    }
}
