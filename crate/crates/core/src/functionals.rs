//! Integral functionals of a star-shaped axisymmetric hypersurface.
//!
//! Computes the weighted curvature integrals ∫ σ_l r^p dμ, the enclosed
//! volume, the length²-scaled monotone quantity
//! `Q_k = (∫σ_{k-1})^{-(m-k)/(m+1-k)} (∫σ_k r² - ∫σ_{k-2})`, its
//! scale-invariant companion `(∫σ_{k-1})^{-(m-k)/(m+1-k)} ∫σ_k`
//! (the Guan-Li quantity), Hsiung-Minkowski residuals plain and
//! f-weighted, the ordering gaps `∫σ_k r^{p+k-l} - ∫σ_l r^p`, Ros' gap,
//! and quermassintegral-inequality gaps. Distances r are measured from the
//! evaluation point O fixed by the profile's axial offset; support
//! functions for the volume use the star center.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::geometry::spectral::unit_sphere_area;
use crate::geometry::{
    curvature_spectrum, point_frames, surface_integral, GeometryError, PointFrame, RadialProfile,
};
use crate::symmfunc::{binomial, newton_spectrum, sigma_all, SymmFuncError};
use crate::tolerances;

#[derive(Debug, Error)]
pub enum FunctionalsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    SymmFunc(#[from] SymmFuncError),
    #[error("curvature order {order} exceeds surface dimension {m}")]
    OrderOutOfRange { order: usize, m: usize },
    #[error("weight exponent must be nonnegative and finite, got {p}")]
    InvalidExponent { p: f64 },
    #[error("sigma_{level} is not positive at node {node} (value {value})")]
    PositivityLoss {
        level: usize,
        node: usize,
        value: f64,
    },
    #[error(
        "evaluation point sits on the surface (min r = {min_r}): the r^{{p-2}} weight is singular"
    )]
    SingularWeight { min_r: f64 },
}

/// A profile with its frames and per-node normalized curvatures, built once
/// and shared by every functional evaluated on it.
pub(crate) struct SurfaceData<'a> {
    profile: &'a RadialProfile,
    frames: Vec<PointFrame>,
    /// sigmas[i][l] = σ_l at node i, l = 0..=m.
    sigmas: Vec<Vec<f64>>,
}

impl<'a> SurfaceData<'a> {
    pub(crate) fn build(profile: &'a RadialProfile) -> Result<Self, FunctionalsError> {
        let frames = point_frames(profile)?;
        let m = profile.m();
        let sigmas = frames
            .iter()
            .map(|f| Ok(sigma_all(&curvature_spectrum(f, m)?)))
            .collect::<Result<Vec<_>, SymmFuncError>>()?;
        Ok(Self {
            profile,
            frames,
            sigmas,
        })
    }

    fn m(&self) -> usize {
        self.profile.m()
    }

    fn integrate(&self, f: impl Fn(usize, &PointFrame) -> f64) -> f64 {
        surface_integral(self.profile, &self.frames, |i| f(i, &self.frames[i]))
    }

    /// ∫ σ_l r^p dμ with r measured from O.
    fn weighted(&self, l: usize, p: f64) -> f64 {
        self.integrate(|i, frame| self.sigmas[i][l] * frame.r_o.powf(p))
    }

    fn require_order(&self, l: usize) -> Result<(), FunctionalsError> {
        if l > self.m() {
            Err(FunctionalsError::OrderOutOfRange {
                order: l,
                m: self.m(),
            })
        } else {
            Ok(())
        }
    }

    fn require_positive(&self, level: usize) -> Result<(), FunctionalsError> {
        for (node, s) in self.sigmas.iter().enumerate() {
            if s[level] <= 0.0 {
                return Err(FunctionalsError::PositivityLoss {
                    level,
                    node,
                    value: s[level],
                });
            }
        }
        Ok(())
    }

    /// The evaluation point must stay clear of the surface before any
    /// negative power of r is integrated. The grid excludes the poles, so
    /// the axis distances are checked through the interpolant's pole
    /// values ρ(0) = Σ a_j and ρ(π) = Σ (-1)^j a_j as well.
    fn require_origin_off_surface(&self) -> Result<(), FunctionalsError> {
        let mut min_r = self
            .frames
            .iter()
            .map(|f| f.r_o)
            .fold(f64::INFINITY, f64::min);
        let basis = crate::geometry::spectral::shared_basis(self.profile.n());
        let coeffs = basis.forward(self.profile.rho());
        let d = self.profile.origin_offset();
        let rho_front: f64 = coeffs.iter().sum();
        let rho_back: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| if j % 2 == 0 { *a } else { -*a })
            .sum();
        min_r = min_r.min((rho_front - d).abs()).min((rho_back + d).abs());
        if min_r <= tolerances::ORIGIN_CLEARANCE_REL * self.profile.mean_rho() {
            Err(FunctionalsError::SingularWeight { min_r })
        } else {
            Ok(())
        }
    }

    fn volume(&self) -> f64 {
        self.integrate(|_, frame| frame.support) / (self.m() as f64 + 1.0)
    }

    fn q_k(&self, k: usize) -> f64 {
        let m = self.m() as f64;
        let kf = k as f64;
        let prefactor = self.weighted(k - 1, 0.0).powf(-(m - kf) / (m + 1.0 - kf));
        prefactor * (self.weighted(k, 2.0) - self.weighted(k - 2, 0.0))
    }

    fn q_1(&self) -> f64 {
        let m = self.m() as f64;
        let area = self.weighted(0, 0.0);
        area.powf(-(m - 1.0) / m) * (self.weighted(1, 2.0) - (m + 1.0) * self.volume())
    }

    fn guan_li(&self, k: usize) -> f64 {
        let m = self.m() as f64;
        let kf = k as f64;
        self.weighted(k - 1, 0.0).powf(-(m - kf) / (m + 1.0 - kf)) * self.weighted(k, 0.0)
    }

    fn hsiung_minkowski(&self, j: usize) -> f64 {
        self.weighted(j - 1, 0.0) - self.integrate(|i, frame| self.sigmas[i][j] * frame.support)
    }

    /// Residual of the f-weighted identity with f = r^p:
    /// ∫ r^p σ_l dμ = ∫ r^p σ_{l+1} ⟨Y_O,ν⟩ dμ
    ///               - (1/((m-l) C(m,l))) ∫ ⟨T_l(∇ r^p), Y_O^∥⟩ dμ,
    /// where axisymmetry puts Y_O^∥ along the meridian so that
    /// ⟨T_l(∇r^p), Y_O^∥⟩ = p r^{p-2} C(m-1,l) κ_par^l |Y_O^∥|².
    fn generalized_hm(&self, l: usize, p: f64) -> f64 {
        let m = self.m();
        let lhs = self.weighted(l, p);
        let support_term =
            self.integrate(|i, frame| frame.r_o.powf(p) * self.sigmas[i][l + 1] * frame.support_o);
        let tangential = if p == 0.0 {
            0.0
        } else {
            let coeff = binomial(m - 1, l) / ((m - l) as f64 * binomial(m, l));
            coeff
                * self.integrate(|_, frame| {
                    p * frame.r_o.powf(p - 2.0) * frame.kappa_par.powi(l as i32) * frame.ytan_sq
                })
        };
        lhs - support_term + tangential
    }

    fn ordering_gap(&self, k: usize, l: usize, p: f64) -> f64 {
        self.weighted(k, p + (k - l) as f64) - self.weighted(l, p)
    }

    fn ros(&self) -> f64 {
        // m ∫ 1/H dμ - (m+1) Vol, with H = m σ_1
        let m = self.m() as f64;
        self.integrate(|i, _| 1.0 / self.sigmas[i][1]) - (m + 1.0) * self.volume()
    }

    fn quermassintegral_gap(&self, k: usize) -> f64 {
        let m = self.m();
        let omega = unit_sphere_area(m);
        let upper = (self.weighted(k, 0.0) / omega).powf(1.0 / (m - k) as f64);
        let lower = (self.weighted(k - 1, 0.0) / omega).powf(1.0 / (m + 1 - k) as f64);
        upper - lower
    }
}

/// ∫ σ_l r^p dμ, with r the distance to the evaluation point O and
/// ω_{m-1} the rotational factor.
pub fn weighted_integral(
    profile: &RadialProfile,
    l: usize,
    p: f64,
) -> Result<f64, FunctionalsError> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(FunctionalsError::InvalidExponent { p });
    }
    let s = SurfaceData::build(profile)?;
    s.require_order(l)?;
    Ok(s.weighted(l, p))
}

/// The length²-scaled monotone quantity
/// `(∫σ_{k-1} dμ)^{-(m-k)/(m+1-k)} (∫σ_k r² dμ - ∫σ_{k-2} dμ)` for
/// 2 <= k <= m. Requires σ_k > 0 everywhere; nonnegative whenever it is
/// defined, vanishing exactly on round spheres centered at O.
pub fn q_k(profile: &RadialProfile, k: usize) -> Result<f64, FunctionalsError> {
    let s = SurfaceData::build(profile)?;
    if k < 2 || k > s.m() {
        return Err(FunctionalsError::OrderOutOfRange {
            order: k,
            m: s.m(),
        });
    }
    s.require_positive(k)?;
    Ok(s.q_k(k))
}

/// The mean-curvature analogue of [`q_k`]:
/// `|Σ|^{-(m-1)/m} ((1/m) ∫ H r² dμ - (m+1) Vol)`, with the enclosed
/// volume standing in for the σ_{-1} slot.
pub fn q1(profile: &RadialProfile) -> Result<f64, FunctionalsError> {
    let s = SurfaceData::build(profile)?;
    s.require_positive(1)?;
    Ok(s.q_1())
}

/// Scale-invariant monotone quantity
/// `(∫σ_{k-1} dμ)^{-(m-k)/(m+1-k)} ∫σ_k dμ` for 1 <= k <= m with σ_k > 0.
pub fn guan_li(profile: &RadialProfile, k: usize) -> Result<f64, FunctionalsError> {
    let s = SurfaceData::build(profile)?;
    if k < 1 || k > s.m() {
        return Err(FunctionalsError::OrderOutOfRange {
            order: k,
            m: s.m(),
        });
    }
    s.require_positive(k)?;
    Ok(s.guan_li(k))
}

/// Enclosed volume by the divergence theorem,
/// `(1/(m+1)) ∫ ⟨Y,ν⟩ dμ` about the star center; independent of O.
pub fn volume(profile: &RadialProfile) -> Result<f64, FunctionalsError> {
    Ok(SurfaceData::build(profile)?.volume())
}

/// Residual `∫σ_{j-1} dμ - ∫σ_j ⟨Y,ν⟩ dμ` of the Hsiung-Minkowski
/// identity, 1 <= j <= m; converges to zero under grid refinement.
pub fn hsiung_minkowski_residual(
    profile: &RadialProfile,
    j: usize,
) -> Result<f64, FunctionalsError> {
    let s = SurfaceData::build(profile)?;
    if j < 1 || j > s.m() {
        return Err(FunctionalsError::OrderOutOfRange {
            order: j,
            m: s.m(),
        });
    }
    Ok(s.hsiung_minkowski(j))
}

/// Residual of the r^p-weighted Hsiung-Minkowski identity for T_l,
/// 0 <= l < m, p >= 0. For 0 < p < 2 the weight r^{p-2} is singular on the
/// surface, so O must keep clear of Σ.
pub fn generalized_hm_residual(
    profile: &RadialProfile,
    l: usize,
    p: f64,
) -> Result<f64, FunctionalsError> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(FunctionalsError::InvalidExponent { p });
    }
    let s = SurfaceData::build(profile)?;
    if l >= s.m() {
        return Err(FunctionalsError::OrderOutOfRange {
            order: l,
            m: s.m(),
        });
    }
    if p > 0.0 && p < 2.0 {
        s.require_origin_off_surface()?;
    }
    Ok(s.generalized_hm(l, p))
}

/// Ordering gap `∫σ_k r^{p+k-l} dμ - ∫σ_l r^p dμ` for 0 <= l < k <= m and
/// p >= 0, nonnegative whenever σ_k > 0, zero exactly on round spheres
/// centered at O.
pub fn ordering_gap(
    profile: &RadialProfile,
    k: usize,
    l: usize,
    p: f64,
) -> Result<f64, FunctionalsError> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(FunctionalsError::InvalidExponent { p });
    }
    let s = SurfaceData::build(profile)?;
    if k > s.m() || l >= k {
        return Err(FunctionalsError::OrderOutOfRange {
            order: k.max(l),
            m: s.m(),
        });
    }
    s.require_positive(k)?;
    Ok(s.ordering_gap(k, l, p))
}

/// Outcome of scanning every node for curvature positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityScan {
    /// min over nodes of σ_j, j = 0..=m.
    pub sigma_min: Vec<f64>,
    /// min over nodes and principal directions of the T_l eigenvalues,
    /// l = 0..k-1.
    pub newton_min: Vec<f64>,
    /// Largest k* with σ_j > 0 at every node for every 1 <= j <= k*.
    pub sigma_positive_up_to: usize,
    /// Whether every T_l, l < k, has strictly positive eigenvalues at
    /// every node.
    pub newton_spectra_positive: bool,
}

pub fn positivity_scan(
    profile: &RadialProfile,
    k: usize,
) -> Result<PositivityScan, FunctionalsError> {
    let s = SurfaceData::build(profile)?;
    let m = s.m();
    let mut sigma_min = vec![f64::INFINITY; m + 1];
    for node in &s.sigmas {
        for (j, &v) in node.iter().enumerate() {
            sigma_min[j] = sigma_min[j].min(v);
        }
    }
    let mut sigma_positive_up_to = 0;
    while sigma_positive_up_to < m && sigma_min[sigma_positive_up_to + 1] > 0.0 {
        sigma_positive_up_to += 1;
    }
    let orders = k.min(m);
    let mut newton_min = vec![f64::INFINITY; orders];
    for frame in &s.frames {
        let spectrum = curvature_spectrum(frame, m)?;
        for (l, slot) in newton_min.iter_mut().enumerate() {
            *slot = slot.min(newton_spectrum(&spectrum, l)?.min());
        }
    }
    let newton_spectra_positive = newton_min.iter().all(|&v| v > 0.0);
    Ok(PositivityScan {
        sigma_min,
        newton_min,
        sigma_positive_up_to,
        newton_spectra_positive,
    })
}

/// Ros' gap `m ∫ (1/H) dμ - (m+1) Vol(Ω)`, nonnegative for H > 0 and zero
/// exactly on round spheres.
pub fn ros_gap(profile: &RadialProfile) -> Result<f64, FunctionalsError> {
    let s = SurfaceData::build(profile)?;
    s.require_positive(1)?;
    Ok(s.ros())
}

/// Quermassintegral-inequality gap
/// `((1/ω_m) ∫σ_k)^{1/(m-k)} - ((1/ω_m) ∫σ_{k-1})^{1/(m+1-k)}` for k < m,
/// nonnegative on star-shaped surfaces with σ_k > 0.
pub fn quermassintegral_gap(profile: &RadialProfile, k: usize) -> Result<f64, FunctionalsError> {
    let s = SurfaceData::build(profile)?;
    if k < 1 || k >= s.m() {
        return Err(FunctionalsError::OrderOutOfRange {
            order: k,
            m: s.m(),
        });
    }
    s.require_positive(k)?;
    Ok(s.quermassintegral_gap(k))
}

/// Every functional of one surface in a single pass: the integral lattice,
/// the monotone quantities, volume, positivity scan, and all identity and
/// inequality residuals, keyed by stable labels.
#[derive(Debug, Clone)]
pub struct SurfaceReport {
    pub m: usize,
    pub k: usize,
    /// Labels `sigma_<l>_r^<p>` for l = 0..=m, p = 0..=m+2.
    pub integrals: BTreeMap<String, f64>,
    /// Q_k for k >= 2, its mean-curvature analogue for k = 1; absent when
    /// σ_k changes sign.
    pub q_k: Option<f64>,
    pub guan_li: Option<f64>,
    pub volume: f64,
    pub sigma_positive_up_to: usize,
    pub newton_spectra_positive: bool,
    pub roundness: f64,
    /// Gap and residual values: `ordering_k<k>_l<l>_p<p>`, `hm_j<j>`,
    /// `gen_hm_l<l>_p<p>`, `ros`, `quermass_k<k>`.
    pub residuals: BTreeMap<String, f64>,
}

impl SurfaceReport {
    pub fn compute(profile: &RadialProfile, k: usize) -> Result<Self, FunctionalsError> {
        let s = SurfaceData::build(profile)?;
        let m = s.m();
        if k < 1 || k > m {
            return Err(FunctionalsError::OrderOutOfRange { order: k, m });
        }
        let scan = positivity_scan(profile, k)?;
        let k_positive = scan.sigma_positive_up_to >= k;

        let mut integrals = BTreeMap::new();
        for l in 0..=m {
            for p in 0..=m + 2 {
                integrals.insert(format!("sigma_{l}_r^{p}"), s.weighted(l, p as f64));
            }
        }

        let mut residuals = BTreeMap::new();
        for j in 1..=m {
            residuals.insert(format!("hm_j{j}"), s.hsiung_minkowski(j));
        }
        for l in 0..m {
            for p in 0..=2usize {
                residuals.insert(format!("gen_hm_l{l}_p{p}"), s.generalized_hm(l, p as f64));
            }
        }
        if k_positive {
            for l in 0..k {
                for p in 0..=2usize {
                    residuals.insert(
                        format!("ordering_k{k}_l{l}_p{p}"),
                        s.ordering_gap(k, l, p as f64),
                    );
                }
            }
        }
        if scan.sigma_positive_up_to >= 1 {
            residuals.insert("ros".to_string(), s.ros());
        }
        for j in 1..m {
            if scan.sigma_positive_up_to >= j {
                residuals.insert(format!("quermass_k{j}"), s.quermassintegral_gap(j));
            }
        }

        let q_value = if !k_positive {
            None
        } else if k >= 2 {
            Some(s.q_k(k))
        } else {
            Some(s.q_1())
        };

        Ok(Self {
            m,
            k,
            integrals,
            q_k: q_value,
            guan_li: k_positive.then(|| s.guan_li(k)),
            volume: s.volume(),
            sigma_positive_up_to: scan.sigma_positive_up_to,
            newton_spectra_positive: scan.newton_spectra_positive,
            roundness: profile.roundness(),
            residuals,
        })
    }

    /// The magnitude against which a residual label should be compared:
    /// the dominating integral for identity residuals and ordering gaps,
    /// the enclosed-volume term for Ros, the lower quermassintegral side
    /// for its gap.
    pub fn scale_for(&self, label: &str) -> Option<f64> {
        let lookup = |l: usize, p: usize| self.integrals.get(&format!("sigma_{l}_r^{p}")).copied();
        if label == "ros" {
            return Some((self.m as f64 + 1.0) * self.volume);
        }
        if let Some(rest) = label.strip_prefix("quermass_k") {
            let k: usize = rest.parse().ok()?;
            let omega = unit_sphere_area(self.m);
            return Some((lookup(k - 1, 0)? / omega).powf(1.0 / (self.m + 1 - k) as f64));
        }
        if let Some(rest) = label.strip_prefix("hm_j") {
            let j: usize = rest.parse().ok()?;
            return lookup(j - 1, 0);
        }
        if let Some(rest) = label.strip_prefix("gen_hm_l") {
            let (l, p) = parse_pair(rest, "_p")?;
            return lookup(l, p);
        }
        if let Some(rest) = label.strip_prefix("ordering_k") {
            let (k, rest) = split_number(rest)?;
            let (l, p) = parse_pair(rest.strip_prefix("_l")?, "_p")?;
            return lookup(k, p + k - l);
        }
        None
    }

    /// Flat label -> number map: scalar fields first, then the integral
    /// lattice, then the residuals.
    pub fn to_flat_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("m".into(), json!(self.m));
        map.insert("k".into(), json!(self.k));
        map.insert("volume".into(), json!(self.volume));
        map.insert("roundness".into(), json!(self.roundness));
        map.insert(
            "sigma_positive_up_to".into(),
            json!(self.sigma_positive_up_to),
        );
        map.insert(
            "newton_spectra_positive".into(),
            json!(if self.newton_spectra_positive { 1 } else { 0 }),
        );
        if let Some(q) = self.q_k {
            map.insert(format!("Q_{}", self.k), json!(q));
        }
        if let Some(g) = self.guan_li {
            map.insert("guan_li".into(), json!(g));
        }
        for (label, value) in &self.integrals {
            map.insert(label.clone(), json!(value));
        }
        for (label, value) in &self.residuals {
            map.insert(label.clone(), json!(value));
        }
        Value::Object(map)
    }
}

fn split_number(text: &str) -> Option<(usize, &str)> {
    let end = text.find(|c: char| !c.is_ascii_digit()).unwrap_or(text.len());
    Some((text[..end].parse().ok()?, &text[end..]))
}

fn parse_pair(text: &str, sep: &str) -> Option<(usize, usize)> {
    let (a, b) = text.split_once(sep)?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_profile, SurfaceFamily};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn sphere(radius: f64, m: usize, n: usize, d: f64) -> RadialProfile {
        make_profile(SurfaceFamily::Sphere { radius }, m, n, d).unwrap()
    }

    fn spheroid(a: f64, c: f64, m: usize, n: usize) -> RadialProfile {
        make_profile(SurfaceFamily::Spheroid { a, c }, m, n, 0.0).unwrap()
    }

    #[test]
    fn sphere_weighted_integrals_closed_form() {
        // ∫ σ_l r^p dμ = ω_m R^{m-l+p} on a centered sphere
        for m in 2..=4usize {
            let r: f64 = 1.3;
            let p = sphere(r, m, 48, 0.0);
            let omega = unit_sphere_area(m);
            for l in 0..=m {
                for pw in 0..=3usize {
                    let got = weighted_integral(&p, l, pw as f64).unwrap();
                    let want = omega * r.powi(m as i32 - l as i32 + pw as i32);
                    assert_relative_eq!(got, want, max_relative = 1e-12);
                }
            }
        }
        // unit sphere, m = 2, l = 1, p = 0: total mean curvature = 4π
        let p = sphere(1.0, 2, 64, 0.0);
        assert_relative_eq!(
            weighted_integral(&p, 1, 0.0).unwrap(),
            4.0 * PI,
            max_relative = 1e-12
        );
    }

    #[test]
    fn offcenter_sphere_integrals() {
        // ∫ r_O² dμ over the unit sphere = area (1 + d²): odd term cancels
        let d = 0.3;
        let p = sphere(1.0, 2, 64, d);
        assert_relative_eq!(
            weighted_integral(&p, 2, 2.0).unwrap(),
            4.0 * PI * (1.0 + d * d),
            max_relative = 1e-12
        );
    }

    #[test]
    fn q_k_examples() {
        for (m, k) in [(2usize, 2usize), (3, 2), (3, 3), (4, 3)] {
            let p = sphere(1.7, m, 48, 0.0);
            let q = q_k(&p, k).unwrap();
            assert!(q.abs() < 1e-10, "m={m} k={k} q={q}");
        }
        let q = q_k(&spheroid(1.0, 2.0, 2, 64), 2).unwrap();
        assert!(q > 1e-3, "spheroid gap should be strictly positive: {q}");
        // off-center sphere: Q_2 = 4π d² for m = 2
        let d = 0.3;
        let q = q_k(&sphere(1.0, 2, 64, d), 2).unwrap();
        assert_relative_eq!(q, 4.0 * PI * d * d, max_relative = 1e-10);
        assert!(q_k(&sphere(1.0, 2, 32, 0.0), 1).is_err());
        assert!(q_k(&sphere(1.0, 2, 32, 0.0), 3).is_err());
    }

    #[test]
    fn q1_examples() {
        let p = sphere(1.4, 3, 48, 0.0);
        assert!(q1(&p).unwrap().abs() < 1e-10);
        let d = 0.3;
        let q = q1(&sphere(1.0, 2, 64, d)).unwrap();
        assert_relative_eq!(
            q,
            (4.0 * PI).sqrt() * d * d,
            max_relative = 1e-10
        );
        assert!(q1(&spheroid(1.0, 2.0, 2, 64)).unwrap() > 0.0);
    }

    #[test]
    fn guan_li_examples() {
        // sphere value is scale invariant: ω_m^{1/(m+1-k)}
        for (m, k) in [(2usize, 2usize), (3, 2), (4, 4), (3, 1)] {
            for r in [0.5, 1.0, 2.0] {
                let p = sphere(r, m, 48, 0.0);
                let got = guan_li(&p, k).unwrap();
                let want = unit_sphere_area(m).powf(1.0 / (m as f64 + 1.0 - k as f64));
                assert_relative_eq!(got, want, max_relative = 1e-11);
            }
        }
        // isoperimetric direction: k = 1 value exceeds the round value
        let round = guan_li(&sphere(1.0, 2, 64, 0.0), 1).unwrap();
        let squashed = guan_li(&spheroid(1.0, 2.0, 2, 64), 1).unwrap();
        assert!(squashed > round + 1e-6);
    }

    #[test]
    fn volume_examples() {
        assert_relative_eq!(
            volume(&sphere(1.0, 2, 48, 0.0)).unwrap(),
            4.0 * PI / 3.0,
            max_relative = 1e-12
        );
        for m in 2..=4usize {
            let r: f64 = 0.8;
            let v = volume(&sphere(r, m, 48, 0.3)).unwrap();
            let want = unit_sphere_area(m) * r.powi(m as i32 + 1) / (m as f64 + 1.0);
            assert_relative_eq!(v, want, max_relative = 1e-12);
        }
        // spheroid of revolution: (4/3) π a² c
        assert_relative_eq!(
            volume(&spheroid(1.0, 2.0, 2, 64)).unwrap(),
            8.0 * PI / 3.0,
            max_relative = 1e-10
        );
    }

    #[test]
    fn hsiung_minkowski_residuals_vanish() {
        let p = sphere(1.5, 3, 48, 0.0);
        for j in 1..=3usize {
            assert!(hsiung_minkowski_residual(&p, j).unwrap().abs() < 1e-12);
        }
        let p = spheroid(1.0, 2.0, 2, 64);
        let area = weighted_integral(&p, 0, 0.0).unwrap();
        let res = hsiung_minkowski_residual(&p, 1).unwrap();
        assert!(res.abs() / area < 1e-8, "relative residual {}", res / area);
    }

    #[test]
    fn generalized_hm_examples() {
        // centered sphere: tangential part vanishes and the identity is
        // pointwise exact
        let p = sphere(1.2, 3, 48, 0.0);
        for l in 0..3usize {
            for pw in [0.0, 1.0, 2.0, 3.0] {
                assert!(generalized_hm_residual(&p, l, pw).unwrap().abs() < 1e-10);
            }
        }
        // p = 0 reduces to the plain residual with the index shifted
        let p = spheroid(1.0, 1.5, 3, 64).with_offset(0.2).unwrap();
        for l in 0..3usize {
            let a = generalized_hm_residual(&p, l, 0.0).unwrap();
            let b = hsiung_minkowski_residual(&p, l + 1).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
        // off-center non-sphere: residual decays at least 4th order in N
        let mut residuals = Vec::new();
        for n in [32usize, 64, 128] {
            let p = make_profile(SurfaceFamily::Spheroid { a: 1.0, c: 3.0 }, 3, n, 0.2).unwrap();
            residuals.push(generalized_hm_residual(&p, 1, 2.0).unwrap().abs());
        }
        let floor = 1e-13;
        if residuals[0] > floor {
            assert!(
                residuals[1] < residuals[0] / 16.0 || residuals[1] < floor,
                "{residuals:?}"
            );
        }
        // singular weight: origin on the surface with 0 < p < 2
        let touching = sphere(1.0, 2, 32, 1.0);
        assert!(matches!(
            generalized_hm_residual(&touching, 0, 1.0),
            Err(FunctionalsError::SingularWeight { .. })
        ));
        // same origin with p = 0 stays regular
        assert!(generalized_hm_residual(&touching, 0, 0.0).is_ok());
    }

    #[test]
    fn ordering_gap_examples() {
        let p = sphere(2.0, 3, 48, 0.0);
        for (k, l, pw) in [(1usize, 0usize, 0.0), (2, 0, 1.0), (3, 2, 2.0)] {
            assert!(ordering_gap(&p, k, l, pw).unwrap().abs() < 1e-9);
        }
        let d = 0.3;
        let gap = ordering_gap(&sphere(1.0, 2, 64, d), 2, 0, 0.0).unwrap();
        assert_relative_eq!(gap, 4.0 * PI * d * d, max_relative = 1e-10);
        assert!(ordering_gap(&spheroid(1.0, 2.0, 2, 64), 2, 1, 1.0).unwrap() > 1e-4);
        assert!(ordering_gap(&sphere(1.0, 2, 32, 0.0), 2, 2, 0.0).is_err());
    }

    #[test]
    fn single_step_ordering_chain() {
        // each rung ∫σ_l r^p <= ∫σ_{l+1} r^{p+1} of the composed gap
        let p = spheroid(1.0, 1.8, 4, 64).with_offset(0.15).unwrap();
        for l in 0..4usize {
            for pw in 0..=2usize {
                let gap = ordering_gap(&p, l + 1, l, pw as f64).unwrap();
                assert!(gap > -1e-10, "l={l} p={pw} gap={gap}");
            }
        }
    }

    #[test]
    fn positivity_scan_examples() {
        let p = sphere(1.0, 3, 32, 0.0);
        let scan = positivity_scan(&p, 3).unwrap();
        assert_eq!(scan.sigma_positive_up_to, 3);
        assert!(scan.newton_spectra_positive);
        let p = spheroid(1.0, 2.0, 2, 64);
        let scan = positivity_scan(&p, 2).unwrap();
        assert_eq!(scan.sigma_positive_up_to, 2);
        assert!(scan.newton_spectra_positive);
        // strong bump: whenever the scan certifies sigma_2 it must certify
        // sigma_1 (cone nesting at surface level)
        let p = make_profile(
            SurfaceFamily::LegendreBump {
                radius: 1.0,
                eps: 0.5,
                degree: 2,
            },
            2,
            64,
            0.0,
        )
        .unwrap();
        let scan = positivity_scan(&p, 2).unwrap();
        if scan.sigma_min[2] > 0.0 {
            assert!(scan.sigma_min[1] > 0.0);
        }
    }

    #[test]
    fn ros_and_quermass_examples() {
        let p = sphere(1.1, 3, 48, 0.0);
        assert!(ros_gap(&p).unwrap().abs() < 1e-10);
        assert!(ros_gap(&spheroid(1.0, 2.0, 2, 64)).unwrap() > 1e-3);
        let bump = make_profile(
            SurfaceFamily::LegendreBump {
                radius: 1.0,
                eps: 0.05,
                degree: 2,
            },
            3,
            64,
            0.0,
        )
        .unwrap();
        assert!(ros_gap(&bump).unwrap() > 0.0);
        for k in 1..3usize {
            assert!(quermassintegral_gap(&p, k).unwrap().abs() < 1e-10);
        }
        assert!(quermassintegral_gap(&spheroid(1.0, 2.0, 3, 64), 1).unwrap() > 1e-4);
        assert!(quermassintegral_gap(&p, 3).is_err());
    }

    #[test]
    fn scaling_laws() {
        let base = spheroid(1.0, 1.6, 3, 48).with_offset(0.2).unwrap();
        let m = base.m() as f64;
        for lambda in [0.5f64, 2.0] {
            let scaled = base.scaled(lambda).unwrap();
            for l in 0..=3usize {
                for pw in 0..=2usize {
                    let a = weighted_integral(&scaled, l, pw as f64).unwrap();
                    let b = weighted_integral(&base, l, pw as f64).unwrap();
                    assert_relative_eq!(
                        a,
                        b * lambda.powf(m - l as f64 + pw as f64),
                        max_relative = 1e-10
                    );
                }
            }
            assert_relative_eq!(
                volume(&scaled).unwrap(),
                volume(&base).unwrap() * lambda.powf(m + 1.0),
                max_relative = 1e-10
            );
            assert_relative_eq!(
                guan_li(&scaled, 2).unwrap(),
                guan_li(&base, 2).unwrap(),
                max_relative = 1e-10
            );
            assert_relative_eq!(
                q_k(&scaled, 2).unwrap(),
                q_k(&base, 2).unwrap() * lambda * lambda,
                max_relative = 1e-9
            );
            assert_relative_eq!(
                ordering_gap(&scaled, 2, 1, 1.0).unwrap(),
                ordering_gap(&base, 2, 1, 1.0).unwrap() * lambda.powf(m - 1.0 + 1.0),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn report_layout_and_scales() {
        let p = sphere(1.0, 2, 48, 0.0);
        let report = SurfaceReport::compute(&p, 2).unwrap();
        assert_relative_eq!(
            report.integrals["sigma_0_r^0"],
            4.0 * PI,
            max_relative = 1e-12
        );
        assert!(report.volume > 0.0);
        assert_eq!(report.sigma_positive_up_to, 2);
        assert!(report.q_k.unwrap().abs() < 1e-10);
        assert!(report.residuals.contains_key("ordering_k2_l0_p0"));
        assert!(report.residuals.contains_key("hm_j1"));
        assert!(report.residuals.contains_key("gen_hm_l1_p2"));
        assert!(report.residuals.contains_key("ros"));
        assert!(report.residuals.contains_key("quermass_k1"));
        // scales resolve against the lattice
        let scale = report.scale_for("ordering_k2_l0_p0").unwrap();
        assert_relative_eq!(scale, report.integrals["sigma_2_r^2"]);
        assert_relative_eq!(
            report.scale_for("hm_j2").unwrap(),
            report.integrals["sigma_1_r^0"]
        );
        assert!(report.scale_for("ros").unwrap() > 0.0);
        assert!(report.scale_for("quermass_k1").unwrap() > 0.0);
        assert_eq!(report.scale_for("nonsense"), None);
        // flat json stays flat and numeric
        let flat = report.to_flat_json();
        let obj = flat.as_object().unwrap();
        assert!(obj.contains_key("Q_2"));
        assert!(obj.values().all(|v| v.is_number()));
    }
}
