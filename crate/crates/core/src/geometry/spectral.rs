//! Cosine pseudospectral machinery on the cell-centered polar grid.
//!
//! Grid nodes are θ_i = (i + 1/2) π / N, i = 0..N-1. Smooth even profiles
//! (ρ'(0) = ρ'(π) = 0) are exactly the finite cosine series
//! Σ a_j cos(jθ), and the node set diagonalizes the cosine transform
//! (DCT-II/DCT-III pair). Differentiation acts mode by mode, and surface
//! integrals ∫ sin^q(θ) G(θ) dθ are evaluated by transforming G and pairing
//! the coefficients with the exact moments ∫ sin^q(θ) cos(jθ) dθ, which
//! keeps the quadrature spectrally accurate for every q, odd powers of
//! sin included.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Precomputed transform tables for one grid size.
pub struct CosineBasis {
    n: usize,
    theta: Vec<f64>,
    /// cos(j θ_i), row-major by mode j.
    cos_table: Vec<f64>,
    /// sin(j θ_i), row-major by mode j.
    sin_table: Vec<f64>,
}

impl CosineBasis {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "grid must have at least one node");
        let theta: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect();
        let mut cos_table = vec![0.0; n * n];
        let mut sin_table = vec![0.0; n * n];
        for j in 0..n {
            for (i, &t) in theta.iter().enumerate() {
                let (s, c) = (j as f64 * t).sin_cos();
                cos_table[j * n + i] = c;
                sin_table[j * n + i] = s;
            }
        }
        Self {
            n,
            theta,
            cos_table,
            sin_table,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.theta
    }

    /// Node values -> cosine coefficients a_0..a_{N-1}.
    pub fn forward(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.n);
        let n = self.n;
        let mut coeffs = Vec::with_capacity(n);
        for j in 0..n {
            let row = &self.cos_table[j * n..(j + 1) * n];
            let dot: f64 = row.iter().zip(values).map(|(c, v)| c * v).sum();
            let scale = if j == 0 { 1.0 } else { 2.0 } / n as f64;
            coeffs.push(scale * dot);
        }
        coeffs
    }

    /// Cosine coefficients -> node values.
    pub fn evaluate(&self, coeffs: &[f64]) -> Vec<f64> {
        self.apply(coeffs, &self.cos_table, |_| 1.0)
    }

    /// First derivative at the nodes: d/dθ Σ a_j cos(jθ) = -Σ j a_j sin(jθ).
    pub fn derivative(&self, coeffs: &[f64]) -> Vec<f64> {
        self.apply(coeffs, &self.sin_table, |j| -(j as f64))
    }

    /// Second derivative at the nodes: -Σ j² a_j cos(jθ).
    pub fn second_derivative(&self, coeffs: &[f64]) -> Vec<f64> {
        self.apply(coeffs, &self.cos_table, |j| -((j * j) as f64))
    }

    fn apply(&self, coeffs: &[f64], table: &[f64], factor: impl Fn(usize) -> f64) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.n);
        let n = self.n;
        let mut out = vec![0.0; n];
        for (j, &a) in coeffs.iter().enumerate() {
            let fa = factor(j) * a;
            if fa == 0.0 {
                continue;
            }
            let row = &table[j * n..(j + 1) * n];
            for (o, &t) in out.iter_mut().zip(row) {
                *o += fa * t;
            }
        }
        out
    }

    /// Zero every coefficient below `rel_tol` times the largest magnitude.
    /// Applied after each time step to de-alias the nonlinear speed.
    pub fn low_pass(&self, coeffs: &mut [f64], rel_tol: f64) {
        let max = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        if max == 0.0 {
            return;
        }
        let cut = rel_tol * max;
        for c in coeffs.iter_mut() {
            if c.abs() < cut {
                *c = 0.0;
            }
        }
    }

    /// Quadrature weights w_i with Σ_i w_i G(θ_i) = ∫_0^π sin^q(θ) G(θ) dθ,
    /// exact for G any cosine polynomial of degree < N.
    pub fn sin_weighted_weights(&self, q: usize) -> Vec<f64> {
        let n = self.n;
        let moments = sin_power_moments(q, n);
        let mut weights = vec![0.0; n];
        for (j, &mj) in moments.iter().enumerate() {
            if mj == 0.0 {
                continue;
            }
            let scale = if j == 0 { 1.0 } else { 2.0 } / n as f64;
            let row = &self.cos_table[j * n..(j + 1) * n];
            for (w, &c) in weights.iter_mut().zip(row) {
                *w += mj * scale * c;
            }
        }
        weights
    }
}

/// Exact moments M_j = ∫_0^π sin^q(θ) cos(jθ) dθ for j = 0..count-1.
/// Odd modes vanish; even modes follow M_{j+2} = M_j (j - q) / (j + q + 2)
/// from M_0 = ∫ sin^q (the Wallis integral).
pub fn sin_power_moments(q: usize, count: usize) -> Vec<f64> {
    let mut moments = vec![0.0; count];
    if count == 0 {
        return moments;
    }
    moments[0] = wallis_integral(q);
    let qf = q as f64;
    let mut j = 0;
    while j + 2 < count {
        let jf = j as f64;
        moments[j + 2] = moments[j] * (jf - qf) / (jf + qf + 2.0);
        j += 2;
    }
    moments
}

/// ∫_0^π sin^q(θ) dθ.
fn wallis_integral(q: usize) -> f64 {
    let mut value = if q.is_multiple_of(2) { PI } else { 2.0 };
    let mut p = 2 + q % 2;
    while p <= q {
        // invariant on entry: value = ∫ sin^{p-2}
        value *= (p as f64 - 1.0) / p as f64;
        p += 2;
    }
    value
}

/// Surface area of the unit d-sphere embedded in R^{d+1}.
pub fn unit_sphere_area(dim: usize) -> f64 {
    match dim {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (dim as f64 - 1.0) * unit_sphere_area(dim - 2),
    }
}

type BasisCache = Mutex<HashMap<usize, Arc<CosineBasis>>>;
type WeightCache = Mutex<HashMap<(usize, usize), Arc<Vec<f64>>>>;

static BASES: OnceLock<BasisCache> = OnceLock::new();
static WEIGHTS: OnceLock<WeightCache> = OnceLock::new();

/// Shared transform tables for grid size `n`. Building the tables is
/// O(n²) trig evaluations, far too slow to repeat inside the flow loop.
pub fn shared_basis(n: usize) -> Arc<CosineBasis> {
    let cache = BASES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("basis cache poisoned");
    map.entry(n)
        .or_insert_with(|| Arc::new(CosineBasis::new(n)))
        .clone()
}

/// Shared sin^q-weighted quadrature weights for grid size `n`.
pub fn shared_sin_weights(n: usize, q: usize) -> Arc<Vec<f64>> {
    let cache = WEIGHTS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("weight cache poisoned");
    map.entry((n, q))
        .or_insert_with(|| Arc::new(shared_basis(n).sin_weighted_weights(q)))
        .clone()
}
