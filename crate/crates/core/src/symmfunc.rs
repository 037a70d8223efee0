//! Elementary symmetric functions of curvature spectra.
//!
//! For a point with principal curvatures `κ_1..κ_m` this module computes the
//! higher-order mean curvatures `H_k = e_k(κ)`, their normalizations
//! `σ_k = H_k / C(m,k)`, the eigenvalues of the Newton transformations
//! `T_{k-1}`, the classical trace identities, Newton-Maclaurin inequality
//! gaps, and membership in the Gårding cones `Γ_k^+`.
//!
//! Everything is a pure total function of a finite spectrum; non-finite
//! inputs are rejected when the spectrum is constructed.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SymmFuncError {
    #[error("curvature spectrum must have at least one entry")]
    EmptySpectrum,
    #[error("curvature spectrum entry {index} is not finite ({value})")]
    NonFiniteEntry { index: usize, value: f64 },
    #[error("order {order} out of range for a spectrum of {m} curvatures ({reason})")]
    OrderOutOfRange {
        order: usize,
        m: usize,
        reason: &'static str,
    },
}

/// The principal curvatures at a point, in units of 1/length.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSpectrum {
    values: Vec<f64>,
}

impl CurvatureSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self, SymmFuncError> {
        if values.is_empty() {
            return Err(SymmFuncError::EmptySpectrum);
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(SymmFuncError::NonFiniteEntry { index, value });
            }
        }
        Ok(Self { values })
    }

    /// Number of principal directions.
    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Eigenvalues of the Newton transformation `T_order`.
///
/// In a principal frame `T_order` is diagonal; its eigenvalue on the j-th
/// principal direction is the order-th elementary symmetric function of the
/// spectrum with `κ_j` deleted. `T_0` is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSpectrum {
    eigenvalues: Vec<f64>,
    order: usize,
}

impl NewtonSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Binomial coefficient C(n, k) as an f64 (exact for every value this crate
/// uses; n stays far below the 2^53 integer limit).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// All elementary symmetric functions e_0..e_len of `values`, by the
/// polynomial-product recurrence: multiply out Π_j (1 + κ_j x) and read the
/// coefficients. O(m^2) and free of the cancellation that plagues
/// divide-out-a-root schemes.
fn elem_all(values: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; values.len() + 1];
    coeffs[0] = 1.0;
    for (count, &kappa) in values.iter().enumerate() {
        for i in (1..=count + 1).rev() {
            coeffs[i] += kappa * coeffs[i - 1];
        }
    }
    coeffs
}

/// The k-th mean curvature `H_k = e_k(κ_1..κ_m)`.
///
/// `H_0 = 1` and `H_k = 0` for `k > m`.
pub fn elementary_symmetric(kappa: &CurvatureSpectrum, k: usize) -> f64 {
    if k > kappa.m() {
        return 0.0;
    }
    elem_all(kappa.values())[k]
}

/// The normalized k-th mean curvature `σ_k = H_k / C(m,k)`, defined for
/// `0 <= k <= m` only (the normalization has no meaning past m).
pub fn sigma(kappa: &CurvatureSpectrum, k: usize) -> Result<f64, SymmFuncError> {
    let m = kappa.m();
    if k > m {
        return Err(SymmFuncError::OrderOutOfRange {
            order: k,
            m,
            reason: "sigma_k is normalized by C(m,k), undefined for k > m",
        });
    }
    Ok(elementary_symmetric(kappa, k) / binomial(m, k))
}

/// All normalized mean curvatures `σ_0..σ_m` in one pass.
pub fn sigma_all(kappa: &CurvatureSpectrum) -> Vec<f64> {
    let m = kappa.m();
    elem_all(kappa.values())
        .into_iter()
        .enumerate()
        .map(|(k, h)| h / binomial(m, k))
        .collect()
}

/// Elementary symmetric functions e_0..e_{m-1} of the spectrum with entry
/// `j` deleted. Recomputed by the product recurrence over the remaining
/// entries rather than by polynomial division, which cancels badly when
/// `κ_j` is close to a root.
pub fn elementary_without(kappa: &CurvatureSpectrum, j: usize) -> Result<Vec<f64>, SymmFuncError> {
    let m = kappa.m();
    if j >= m {
        return Err(SymmFuncError::OrderOutOfRange {
            order: j,
            m,
            reason: "deleted index must name one of the m curvatures",
        });
    }
    let remaining: Vec<f64> = kappa
        .values()
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (i != j).then_some(v))
        .collect();
    Ok(elem_all(&remaining))
}

/// Eigenvalues of the Newton transformation `T_order` in the principal
/// frame: `Λ_j = e_order(κ with κ_j deleted)`. Requires `order <= m - 1`.
pub fn newton_spectrum(
    kappa: &CurvatureSpectrum,
    order: usize,
) -> Result<NewtonSpectrum, SymmFuncError> {
    let m = kappa.m();
    if order >= m {
        return Err(SymmFuncError::OrderOutOfRange {
            order,
            m,
            reason: "Newton transformation order must be at most m - 1",
        });
    }
    let eigenvalues = (0..m)
        .map(|j| elementary_without(kappa, j).map(|e| e[order]))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(NewtonSpectrum { eigenvalues, order })
}

/// Traces of `T_{k-1}`, `T_{k-1}∘A` and `T_{k-1}∘A∘A` computed directly from
/// the Newton eigenvalues. The identities
/// `tr T_{k-1} = (m-k+1) H_{k-1}`, `tr(T_{k-1}A) = k H_k` and
/// `tr(T_{k-1}A²) = H_k H_1 - (k+1) H_{k+1}` are asserted in the test layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceIdentities {
    pub tr_t: f64,
    pub tr_ta: f64,
    pub tr_taa: f64,
}

pub fn trace_identities(
    kappa: &CurvatureSpectrum,
    k: usize,
) -> Result<TraceIdentities, SymmFuncError> {
    let m = kappa.m();
    if k == 0 || k > m {
        return Err(SymmFuncError::OrderOutOfRange {
            order: k,
            m,
            reason: "trace identities are defined for 1 <= k <= m",
        });
    }
    let spectrum = newton_spectrum(kappa, k - 1)?;
    let mut traces = TraceIdentities {
        tr_t: 0.0,
        tr_ta: 0.0,
        tr_taa: 0.0,
    };
    for (lambda, &kj) in spectrum.eigenvalues().iter().zip(kappa.values()) {
        traces.tr_t += lambda;
        traces.tr_ta += lambda * kj;
        traces.tr_taa += lambda * kj * kj;
    }
    Ok(traces)
}

/// Newton-Maclaurin inequality gap `σ_i² - σ_{i-1} σ_{i+1}` for
/// `1 <= i <= m-1`. Nonnegative for every real spectrum, and zero exactly
/// when all curvatures coincide, which makes it the umbilicity detector used
/// by the equality-case checks.
pub fn newton_inequality_gap(kappa: &CurvatureSpectrum, i: usize) -> Result<f64, SymmFuncError> {
    let m = kappa.m();
    if i == 0 || i + 1 > m {
        return Err(SymmFuncError::OrderOutOfRange {
            order: i,
            m,
            reason: "Newton inequality index must satisfy 1 <= i <= m - 1",
        });
    }
    let s = sigma_all(kappa);
    Ok(s[i] * s[i] - s[i - 1] * s[i + 1])
}

/// Membership in the Gårding cone `Γ_k^+ = { σ_1 > 0, ..., σ_k > 0 }`.
/// For `k > m` this is vacuously false since `σ_k = 0` there.
pub fn garding_member(kappa: &CurvatureSpectrum, k: usize) -> bool {
    let h = elem_all(kappa.values());
    (1..=k).all(|l| h.get(l).copied().unwrap_or(0.0) > 0.0)
}
