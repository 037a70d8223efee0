//! Star-shaped rotationally symmetric hypersurfaces in R^{m+1}.
//!
//! A surface is a radial graph ρ(θ) over the polar angle θ ∈ (0, π),
//! sampled on the cell-centered grid θ_i = (i + 1/2) π / N, rotated about
//! the symmetry axis. The grid never touches the poles, so the parallel
//! curvature formula never divides by sin θ = 0, and the even cosine
//! interpolant automatically satisfies ρ'(0) = ρ'(π) = 0.
//!
//! Distances and support functions can be measured either from the star
//! center or from an evaluation point O displaced by `d` along the axis.

pub mod spectral;

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::symmfunc::{CurvatureSpectrum, SymmFuncError};
use spectral::{shared_basis, shared_sin_weights, unit_sphere_area};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("surface dimension m must be at least 2, got {m}")]
    DimensionTooSmall { m: usize },
    #[error("grid must have at least 4 nodes, got {n}")]
    GridTooSmall { n: usize },
    #[error("radial profile must be positive and finite at node {node} (got {value})")]
    InvalidRadius { node: usize, value: f64 },
    #[error("origin offset must be finite, got {value}")]
    InvalidOffset { value: f64 },
    #[error("family parameter {name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("geometry degenerated at node {node}: {what} is not finite")]
    DegenerateNode { node: usize, what: &'static str },
    #[error("profile csv line {line}: {message}")]
    CsvFormat { line: usize, message: String },
    #[error(transparent)]
    SymmFunc(#[from] SymmFuncError),
}

/// A star-shaped axisymmetric hypersurface, stored as ρ samples on the
/// cell-centered polar grid, plus the ambient dimension m and the signed
/// axial offset d of the evaluation point O from the star center.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    m: usize,
    theta: Vec<f64>,
    rho: Vec<f64>,
    d: f64,
}

impl RadialProfile {
    pub fn new(m: usize, rho: Vec<f64>, d: f64) -> Result<Self, GeometryError> {
        if m < 2 {
            return Err(GeometryError::DimensionTooSmall { m });
        }
        let n = rho.len();
        if n < 4 {
            return Err(GeometryError::GridTooSmall { n });
        }
        for (node, &value) in rho.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(GeometryError::InvalidRadius { node, value });
            }
        }
        if !d.is_finite() {
            return Err(GeometryError::InvalidOffset { value: d });
        }
        let theta = (0..n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect();
        Ok(Self { m, theta, rho, d })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn origin_offset(&self) -> f64 {
        self.d
    }

    /// Same grid and dimension, new radial samples.
    pub fn with_rho(&self, rho: Vec<f64>) -> Result<Self, GeometryError> {
        if rho.len() != self.n() {
            return Err(GeometryError::GridTooSmall { n: rho.len() });
        }
        Self::new(self.m, rho, self.d)
    }

    pub fn with_offset(&self, d: f64) -> Result<Self, GeometryError> {
        Self::new(self.m, self.rho.clone(), d)
    }

    /// Homothety about the star center: ρ -> λρ, d -> λd.
    pub fn scaled(&self, lambda: f64) -> Result<Self, GeometryError> {
        Self::new(
            self.m,
            self.rho.iter().map(|r| lambda * r).collect(),
            lambda * self.d,
        )
    }

    pub fn mean_rho(&self) -> f64 {
        self.rho.iter().sum::<f64>() / self.n() as f64
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// max ρ / min ρ; equals 1 exactly on round spheres about the star
    /// center and is invariant under homotheties.
    pub fn roundness(&self) -> f64 {
        self.max_rho() / self.min_rho()
    }
}

/// Per-node geometric data for a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFrame {
    /// Curvature of the meridian curve.
    pub kappa_mer: f64,
    /// Curvature in the rotational directions (multiplicity m-1).
    pub kappa_par: f64,
    /// Graph factor w = sqrt(ρ² + ρ'²).
    pub w: f64,
    /// (ρ sinθ)^{m-1} w, so that dμ = ω_{m-1} · area_density · dθ.
    pub area_density: f64,
    /// area_density with the sin^{m-1} factor removed, i.e. ρ^{m-1} w;
    /// pairs with the sin-weighted quadrature of [`surface_integral`].
    pub radial_density: f64,
    /// Support function about the star center, ⟨Y, ν⟩ = ρ²/w.
    pub support: f64,
    /// Support function about O: ⟨X - O, ν⟩.
    pub support_o: f64,
    /// Distance to O.
    pub r_o: f64,
    /// |tangential part of X - O|² = r_o² - support_o², clamped at zero.
    pub ytan_sq: f64,
}

/// Spectral derivatives (ρ', ρ'') of the even cosine interpolant at the
/// grid nodes; exact to round-off when ρ is a finite cosine polynomial.
/// Transform noise sits near 1e-15 relative and the second derivative
/// amplifies mode j by j², so coefficients below the de-aliasing threshold
/// are zeroed before differentiating.
pub fn derivatives(profile: &RadialProfile) -> (Vec<f64>, Vec<f64>) {
    let basis = shared_basis(profile.n());
    let mut coeffs = basis.forward(profile.rho());
    basis.low_pass(&mut coeffs, crate::tolerances::FILTER_REL);
    (basis.derivative(&coeffs), basis.second_derivative(&coeffs))
}

/// Build the full per-node frame for a profile.
pub fn point_frames(profile: &RadialProfile) -> Result<Vec<PointFrame>, GeometryError> {
    let (rho_p, rho_pp) = derivatives(profile);
    let m = profile.m();
    let d = profile.origin_offset();
    let mut frames = Vec::with_capacity(profile.n());
    for i in 0..profile.n() {
        let theta = profile.theta()[i];
        let (sin_t, cos_t) = theta.sin_cos();
        let rho = profile.rho()[i];
        let (rp, rpp) = (rho_p[i], rho_pp[i]);
        let w = (rho * rho + rp * rp).sqrt();
        let kappa_mer = (rho * rho + 2.0 * rp * rp - rho * rpp) / (w * w * w);
        let kappa_par = (rho * sin_t - rp * cos_t) / (rho * sin_t * w);
        let area_density = (rho * sin_t).powi(m as i32 - 1) * w;
        let radial_density = rho.powi(m as i32 - 1) * w;
        let support = rho * rho / w;
        let nu_z = (rho * cos_t + rp * sin_t) / w;
        let support_o = support - d * nu_z;
        let r_o = (rho * rho - 2.0 * rho * d * cos_t + d * d).sqrt();
        let mut ytan_sq = r_o * r_o - support_o * support_o;
        if ytan_sq < 0.0 {
            debug_assert!(
                ytan_sq > -1e-12 * r_o.powi(2).max(1.0),
                "tangential norm lost more than round-off at node {i}: {ytan_sq}"
            );
            ytan_sq = 0.0;
        }
        let frame = PointFrame {
            kappa_mer,
            kappa_par,
            w,
            area_density,
            radial_density,
            support,
            support_o,
            r_o,
            ytan_sq,
        };
        for (value, what) in [
            (kappa_mer, "meridian curvature"),
            (kappa_par, "parallel curvature"),
            (area_density, "area density"),
            (support_o, "support function"),
            (r_o, "distance to origin"),
        ] {
            if !value.is_finite() {
                return Err(GeometryError::DegenerateNode { node: i, what });
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Principal-curvature spectrum at a node: κ_mer once, κ_par with
/// multiplicity m-1.
pub fn curvature_spectrum(frame: &PointFrame, m: usize) -> Result<CurvatureSpectrum, SymmFuncError> {
    let mut values = vec![frame.kappa_par; m];
    values[0] = frame.kappa_mer;
    CurvatureSpectrum::new(values)
}

/// ∫_Σ f dμ for a per-node integrand, using the sin^{m-1}-weighted
/// spectral quadrature; the prefactor ω_{m-1} is the area of the unit
/// (m-1)-sphere swept by the rotation.
pub fn surface_integral(
    profile: &RadialProfile,
    frames: &[PointFrame],
    f: impl Fn(usize) -> f64,
) -> f64 {
    let weights = shared_sin_weights(profile.n(), profile.m() - 1);
    let ring = unit_sphere_area(profile.m() - 1);
    let mut total = 0.0;
    for (i, (w, frame)) in weights.iter().zip(frames).enumerate() {
        total += w * frame.radial_density * f(i);
    }
    ring * total
}

/// Test-surface families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceFamily {
    /// Round sphere of the given radius about the star center.
    Sphere { radius: f64 },
    /// Spheroid with equatorial semi-axis `a` and polar semi-axis `c`:
    /// ρ(θ) = (sin²θ/a² + cos²θ/c²)^{-1/2}.
    Spheroid { a: f64, c: f64 },
    /// Legendre perturbation of a sphere: ρ(θ) = R (1 + ε P_n(cos θ)).
    LegendreBump { radius: f64, eps: f64, degree: usize },
}

/// Legendre polynomial P_n(x) by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut curr) = (1.0, x);
            for q in 1..n {
                let next = ((2 * q + 1) as f64 * x * curr - q as f64 * prev) / (q + 1) as f64;
                prev = curr;
                curr = next;
            }
            curr
        }
    }
}

/// Sample a family member on the grid. Fails if parameters are not
/// positive or the resulting profile is not strictly star-shaped
/// (ρ ≤ 0 somewhere). Curvature-positivity is not checked here; that is
/// the positivity scan's job and only produces a warning downstream.
pub fn make_profile(
    family: SurfaceFamily,
    m: usize,
    n: usize,
    d: f64,
) -> Result<RadialProfile, GeometryError> {
    let check = |name: &'static str, value: f64| {
        if value.is_finite() && value > 0.0 {
            Ok(())
        } else {
            Err(GeometryError::InvalidParameter { name, value })
        }
    };
    let theta: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect();
    let rho: Vec<f64> = match family {
        SurfaceFamily::Sphere { radius } => {
            check("radius", radius)?;
            vec![radius; n]
        }
        SurfaceFamily::Spheroid { a, c } => {
            check("a", a)?;
            check("c", c)?;
            theta
                .iter()
                .map(|&t| {
                    let (s, co) = t.sin_cos();
                    1.0 / ((s / a).powi(2) + (co / c).powi(2)).sqrt()
                })
                .collect()
        }
        SurfaceFamily::LegendreBump {
            radius,
            eps,
            degree,
        } => {
            check("radius", radius)?;
            if !eps.is_finite() {
                return Err(GeometryError::InvalidParameter {
                    name: "eps",
                    value: eps,
                });
            }
            theta
                .iter()
                .map(|&t| radius * (1.0 + eps * legendre_p(degree, t.cos())))
                .collect()
        }
    };
    RadialProfile::new(m, rho, d)
}

/// Round-sphere detector about the star center: curvatures umbilic to
/// 1e-9 absolute and radius constant to 1e-9 relative.
pub fn is_round_sphere(profile: &RadialProfile) -> Result<bool, GeometryError> {
    let frames = point_frames(profile)?;
    let max_aniso = frames
        .iter()
        .map(|f| (f.kappa_mer - f.kappa_par).abs())
        .fold(0.0f64, f64::max);
    let mean = profile.mean_rho();
    let max_dev = profile
        .rho()
        .iter()
        .map(|r| (r - mean).abs())
        .fold(0.0f64, f64::max);
    Ok(max_aniso < 1e-9 && max_dev < 1e-9 * mean)
}

/// Serialize a profile as CSV: a `# m=<m> N=<N> d=<d>` header line followed
/// by one `theta,rho` row per node, 17 significant digits.
pub fn profile_to_csv(profile: &RadialProfile) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# m={} N={} d={}",
        profile.m(),
        profile.n(),
        profile.origin_offset()
    );
    for (t, r) in profile.theta().iter().zip(profile.rho()) {
        let _ = writeln!(out, "{t:.16e},{r:.16e}");
    }
    out
}

/// Parse the CSV form written by [`profile_to_csv`]. The stored θ column is
/// validated against the cell-centered grid implied by N.
pub fn profile_from_csv(text: &str) -> Result<RadialProfile, GeometryError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| GeometryError::CsvFormat {
        line: 1,
        message: "empty input".into(),
    })?;
    let header = header.trim();
    let bad_header = |message: String| GeometryError::CsvFormat { line: 1, message };
    if !header.starts_with('#') {
        return Err(bad_header(format!(
            "expected `# m=<m> N=<N> d=<d>`, got `{header}`"
        )));
    }
    let mut m = None;
    let mut n = None;
    let mut d = None;
    for token in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = token.strip_prefix("m=") {
            m = v.parse::<usize>().ok();
        } else if let Some(v) = token.strip_prefix("N=") {
            n = v.parse::<usize>().ok();
        } else if let Some(v) = token.strip_prefix("d=") {
            d = v.parse::<f64>().ok();
        }
    }
    let m = m.ok_or_else(|| bad_header("missing or invalid m=".into()))?;
    let n = n.ok_or_else(|| bad_header("missing or invalid N=".into()))?;
    let d = d.ok_or_else(|| bad_header("missing or invalid d=".into()))?;
    let mut rho = Vec::with_capacity(n);
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = idx + 1;
        let mut fields = line.split(',');
        let theta: f64 = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| GeometryError::CsvFormat {
                line: row,
                message: "missing theta field".into(),
            })?;
        let r: f64 = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| GeometryError::CsvFormat {
                line: row,
                message: "missing rho field".into(),
            })?;
        let expected = (rho.len() as f64 + 0.5) * PI / n as f64;
        if (theta - expected).abs() > 1e-9 {
            return Err(GeometryError::CsvFormat {
                line: row,
                message: format!("theta {theta} does not sit on the cell-centered grid (expected {expected})"),
            });
        }
        rho.push(r);
    }
    if rho.len() != n {
        return Err(GeometryError::CsvFormat {
            line: 0,
            message: format!("header says N={n} but {} rows were found", rho.len()),
        });
    }
    RadialProfile::new(m, rho, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmfunc::elementary_symmetric;
    use approx::assert_relative_eq;

    fn sphere(radius: f64, m: usize, n: usize, d: f64) -> RadialProfile {
        make_profile(SurfaceFamily::Sphere { radius }, m, n, d).unwrap()
    }

    fn spheroid(a: f64, c: f64, m: usize, n: usize) -> RadialProfile {
        make_profile(SurfaceFamily::Spheroid { a, c }, m, n, 0.0).unwrap()
    }

    /// Closed-form spheroid curvatures at a surface point (s, z) on the
    /// ellipse s²/a² + z²/c² = 1: the meridian curvature is
    /// ac / (a² z²/c² + c² s²/a²)^{3/2} and the parallel curvature is the
    /// axis-normal component of the unit normal divided by s.
    fn spheroid_curvatures(a: f64, c: f64, s: f64, z: f64) -> (f64, f64) {
        let denom = (a * a * z * z / (c * c) + c * c * s * s / (a * a)).powf(1.5);
        let kappa_mer = a * c / denom;
        let g = ((s / (a * a)).powi(2) + (z / (c * c)).powi(2)).sqrt();
        let kappa_par = 1.0 / (a * a * g);
        (kappa_mer, kappa_par)
    }

    #[test]
    fn derivative_examples() {
        // constant profile
        let p = sphere(2.5, 2, 64, 0.0);
        let (d1, d2) = derivatives(&p);
        for i in 0..p.n() {
            assert!(d1[i].abs() < 1e-12 && d2[i].abs() < 1e-12);
        }
        // rho = 2 + cos(theta)
        let rho: Vec<f64> = (0..64)
            .map(|i| 2.0 + ((i as f64 + 0.5) * PI / 64.0).cos())
            .collect();
        let p = RadialProfile::new(2, rho, 0.0).unwrap();
        let (d1, d2) = derivatives(&p);
        for (i, &t) in p.theta().iter().enumerate() {
            assert_relative_eq!(d1[i], -t.sin(), epsilon = 1e-12);
            assert_relative_eq!(d2[i], -t.cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_frames_are_exact() {
        let r = 1.8;
        let p = sphere(r, 3, 48, 0.0);
        for f in point_frames(&p).unwrap() {
            assert_relative_eq!(f.kappa_mer, 1.0 / r, epsilon = 1e-12);
            assert_relative_eq!(f.kappa_par, 1.0 / r, epsilon = 1e-12);
            assert_relative_eq!(f.support, r, epsilon = 1e-12);
            assert_relative_eq!(f.support_o, r, epsilon = 1e-12);
            assert_relative_eq!(f.r_o, r, epsilon = 1e-12);
            assert!(f.ytan_sq.abs() < 1e-12);
        }
    }

    #[test]
    fn offcenter_sphere_distances() {
        let d = 0.3;
        let p = sphere(1.0, 2, 128, d);
        let frames = point_frames(&p).unwrap();
        for (i, &t) in p.theta().iter().enumerate() {
            let expected = (1.0 - 2.0 * d * t.cos() + d * d).sqrt();
            assert_relative_eq!(frames[i].r_o, expected, epsilon = 1e-13);
        }
        // the formula's pole limits: 1 - d fore, 1 + d aft
        assert_relative_eq!((1.0f64 - 2.0 * d + d * d).sqrt(), 0.7, epsilon = 1e-15);
        assert_relative_eq!((1.0f64 + 2.0 * d + d * d).sqrt(), 1.3, epsilon = 1e-15);
        // support decomposition: support_o² + ytan² = r_o²
        for f in &frames {
            assert_relative_eq!(
                f.support_o * f.support_o + f.ytan_sq,
                f.r_o * f.r_o,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn spheroid_frames_match_closed_form() {
        let (a, c) = (1.0, 2.0);
        let p = spheroid(a, c, 2, 64);
        let frames = point_frames(&p).unwrap();
        for (i, &t) in p.theta().iter().enumerate() {
            let rho = p.rho()[i];
            let (s, z) = (rho * t.sin(), rho * t.cos());
            let (km, kp) = spheroid_curvatures(a, c, s, z);
            assert_relative_eq!(frames[i].kappa_mer, km, max_relative = 1e-8);
            assert_relative_eq!(frames[i].kappa_par, kp, max_relative = 1e-8);
        }
        // equator values: kappa_mer = a/c² = 1/4, kappa_par = 1/a = 1
        let (km_eq, kp_eq) = spheroid_curvatures(a, c, a, 0.0);
        assert_relative_eq!(km_eq, 0.25);
        assert_relative_eq!(kp_eq, 1.0);
        // pole value: both curvatures -> c/a² = 2
        let (km_pole, kp_pole) = spheroid_curvatures(a, c, 0.0, c);
        assert_relative_eq!(km_pole, 2.0);
        assert_relative_eq!(kp_pole, 2.0);
    }

    #[test]
    fn spheroid_curvature_error_decays_spectrally() {
        // max-node curvature error must fall faster than N^{-4} per
        // doubling; the eccentric spheroid keeps every rung above the
        // round-off floor
        let (a, c) = (1.0, 3.0);
        let mut errors = Vec::new();
        for n in [32usize, 64, 128] {
            let p = spheroid(a, c, 2, n);
            let frames = point_frames(&p).unwrap();
            let mut worst = 0.0f64;
            for (i, &t) in p.theta().iter().enumerate() {
                let rho = p.rho()[i];
                let (km, kp) = spheroid_curvatures(a, c, rho * t.sin(), rho * t.cos());
                worst = worst
                    .max((frames[i].kappa_mer - km).abs())
                    .max((frames[i].kappa_par - kp).abs());
            }
            errors.push(worst);
        }
        assert!(
            errors[1] < errors[0] / 16.0,
            "32->64 ratio too slow: {errors:?}"
        );
        assert!(
            errors[2] < errors[1] / 16.0,
            "64->128 ratio too slow: {errors:?}"
        );
    }

    #[test]
    fn parallel_curvature_approaches_meridian_at_poles() {
        // smoothness forces kappa_par -> kappa_mer at theta -> 0; the first
        // grid node closes in as N doubles
        let mut gaps = Vec::new();
        for n in [32usize, 64, 128, 256] {
            let p = make_profile(
                SurfaceFamily::LegendreBump {
                    radius: 1.0,
                    eps: 0.1,
                    degree: 3,
                },
                2,
                n,
                0.0,
            )
            .unwrap();
            let frames = point_frames(&p).unwrap();
            gaps.push((frames[0].kappa_mer - frames[0].kappa_par).abs());
        }
        for pair in gaps.windows(2) {
            assert!(pair[1] < pair[0] / 2.0, "pole gap not shrinking: {gaps:?}");
        }
        assert!(gaps.last().unwrap() < &1e-4);
    }

    #[test]
    fn curvature_spectrum_layout() {
        let frame = PointFrame {
            kappa_mer: 2.0,
            kappa_par: 3.0,
            w: 1.0,
            area_density: 1.0,
            radial_density: 1.0,
            support: 1.0,
            support_o: 1.0,
            r_o: 1.0,
            ytan_sq: 0.0,
        };
        let spec = curvature_spectrum(&frame, 3).unwrap();
        assert_eq!(spec.values(), &[2.0, 3.0, 3.0]);
        assert_relative_eq!(elementary_symmetric(&spec, 2), 21.0);
        // closed form H_k = C(m-1,k) kp^k + C(m-1,k-1) km kp^{k-1}
        let closed = crate::symmfunc::binomial(2, 2) * 9.0 + crate::symmfunc::binomial(2, 1) * 2.0 * 3.0;
        assert_relative_eq!(closed, 21.0);
    }

    #[test]
    fn family_values() {
        let p = spheroid(1.0, 2.0, 2, 64);
        // rho at the node nearest the equator
        let mid = p.n() / 2;
        assert!((p.rho()[mid] - 1.0).abs() < 1e-3);
        // the formula itself at the pole and equator
        assert_relative_eq!(1.0 / ((0.0f64 / 1.0).powi(2) + (1.0f64 / 2.0).powi(2)).sqrt(), 2.0);
        let bump0 = make_profile(
            SurfaceFamily::LegendreBump {
                radius: 1.0,
                eps: 0.0,
                degree: 5,
            },
            2,
            32,
            0.0,
        )
        .unwrap();
        assert_eq!(bump0.rho(), sphere(1.0, 2, 32, 0.0).rho());
        // Legendre recurrence spot values
        assert_relative_eq!(legendre_p(2, 0.5), (3.0 * 0.25 - 1.0) / 2.0);
        assert_relative_eq!(legendre_p(3, 0.7), (5.0 * 0.7f64.powi(3) - 3.0 * 0.7) / 2.0);
        // too-large bump goes nonpositive and is rejected
        // (min P_2 = -1/2, so eps = 2.5 drives rho to -0.25 near the equator)
        assert!(make_profile(
            SurfaceFamily::LegendreBump {
                radius: 1.0,
                eps: 2.5,
                degree: 2,
            },
            2,
            32,
            0.0,
        )
        .is_err());
    }

    #[test]
    fn convex_surfaces_have_outward_positive_curvature() {
        for p in [
            sphere(0.5, 2, 32, 0.0),
            spheroid(1.0, 2.0, 3, 64),
            spheroid(2.0, 1.0, 2, 64),
        ] {
            for f in point_frames(&p).unwrap() {
                assert!(f.kappa_mer + (p.m() as f64 - 1.0) * f.kappa_par > 0.0);
            }
        }
    }

    #[test]
    fn round_sphere_detection() {
        assert!(is_round_sphere(&sphere(2.0, 2, 64, 0.0)).unwrap());
        assert!(is_round_sphere(&sphere(1.0, 2, 64, 0.4)).unwrap());
        assert!(!is_round_sphere(&spheroid(1.0, 1.01, 2, 64)).unwrap());
    }

    #[test]
    fn csv_roundtrip() {
        let p = spheroid(1.0, 1.5, 3, 32);
        let p = p.with_offset(0.25).unwrap();
        let text = profile_to_csv(&p);
        let q = profile_from_csv(&text).unwrap();
        assert_eq!(p, q);
        assert!(text.starts_with("# m=3 N=32 d=0.25"));
        // corrupted header is rejected
        assert!(profile_from_csv("m=2\n0.1,1.0\n").is_err());
        // off-grid theta is rejected
        let bad = "# m=2 N=4 d=0\n0.3,1.0\n1.1,1.0\n1.9,1.0\n2.7,1.0\n";
        assert!(profile_from_csv(bad).is_err());
    }

    #[test]
    fn construction_guards() {
        assert!(RadialProfile::new(1, vec![1.0; 8], 0.0).is_err());
        assert!(RadialProfile::new(2, vec![1.0; 3], 0.0).is_err());
        assert!(RadialProfile::new(2, vec![1.0, -1.0, 1.0, 1.0], 0.0).is_err());
        assert!(RadialProfile::new(2, vec![1.0; 8], f64::NAN).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Random smooth positive profiles: a handful of low cosine modes
        /// on top of a unit sphere, small enough to stay star-shaped.
        fn profile_strategy() -> impl Strategy<Value = RadialProfile> {
            (
                proptest::collection::vec(-0.04..0.04f64, 5),
                2..=4usize,
                -0.4..0.4f64,
            )
                .prop_map(|(coeffs, m, d)| {
                    let n = 48;
                    let rho: Vec<f64> = (0..n)
                        .map(|i| {
                            let t = (i as f64 + 0.5) * PI / n as f64;
                            1.0 + coeffs
                                .iter()
                                .enumerate()
                                .map(|(j, a)| a * ((j + 1) as f64 * t).cos())
                                .sum::<f64>()
                        })
                        .collect();
                    RadialProfile::new(m, rho, d).unwrap()
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn support_decomposition_is_pythagorean(profile in profile_strategy()) {
                for f in point_frames(&profile).unwrap() {
                    prop_assert!(f.w >= profile.min_rho() * 0.99);
                    prop_assert!(f.ytan_sq >= 0.0);
                    prop_assert!(f.area_density >= 0.0);
                    let lhs = f.support_o * f.support_o + f.ytan_sq;
                    let rhs = f.r_o * f.r_o;
                    prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0),
                        "support decomposition off: {lhs} vs {rhs}");
                }
            }

            #[test]
            fn csv_roundtrip_is_lossless(profile in profile_strategy()) {
                let back = profile_from_csv(&profile_to_csv(&profile)).unwrap();
                prop_assert_eq!(profile, back);
            }
        }
    }
}
