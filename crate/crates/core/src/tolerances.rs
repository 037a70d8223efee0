//! Every tolerance and stability constant used by the solvers and checks,
//! in one place. The continuum statements being verified are exact; all
//! slack below exists only to absorb discretization and round-off.

/// Relative tolerance for exact curvature algebra (polynomial recurrences
/// against enumeration oracles, trace identities). A handful of f64
/// operations per term leaves ~3 digits of headroom above machine epsilon.
pub const ALGEBRA_REL: f64 = 1e-12;

/// Signed floor for the Newton-Maclaurin gap: the gap is nonnegative in
/// exact arithmetic, so anything below this is a bug, not noise.
pub const NEWTON_GAP_FLOOR: f64 = -1e-12;

/// Inequality checks on quadrature values: tol = (floor + coeff·N^{-4})·scale.
/// Spectral errors decay exponentially while the envelope is a power law,
/// so no single coefficient hugs both ends; the coefficient is set so that
/// grids which resolve the surface (error well into the exponential tail)
/// pass with orders of magnitude to spare, while genuinely under-resolved
/// audits and outright sign errors fail loudly. At N = 64 the envelope is
/// 6e-7·scale against observed resolved-case residuals below 1e-9·scale.
/// The floor absorbs round-off on surfaces where a gap is exactly zero,
/// calibrated against the sphere suite (residuals below 1e-13·scale).
pub const QUAD_TOL_COEFF: f64 = 10.0;
pub const QUAD_TOL_FLOOR: f64 = 1e-12;

pub fn inequality_tol(n: usize, scale: f64) -> f64 {
    (QUAD_TOL_FLOOR + QUAD_TOL_COEFF / (n as f64).powi(4)) * scale.abs().max(f64::MIN_POSITIVE)
}

/// Fraction of the mean radius below which the evaluation point counts as
/// sitting on the surface, making r^{p-2} weights singular.
pub const ORIGIN_CLEARANCE_REL: f64 = 1e-6;

/// Time-step safety factor: dt_max = STABILITY_FACTOR · Δθ² / D with D the
/// largest linearized diffusion coefficient. The classical four-stage
/// Runge-Kutta scheme is stable on the negative real axis up to |z| ≈ 2.785
/// = dt·D·j²_max with j_max ≈ N = π/Δθ, i.e. up to factor 2.785/π² ≈ 0.282;
/// 0.2 leaves margin for the first-order terms the estimate ignores.
pub const STABILITY_FACTOR: f64 = 0.2;

/// Relative threshold for zeroing trailing cosine coefficients after each
/// step (de-aliasing of the fully nonlinear speed).
pub const FILTER_REL: f64 = 1e-13;

/// Rejected steps halve dt this many times before the run is declared
/// broken down.
pub const MAX_STEP_RETRIES: u32 = 10;

/// Forward-difference monotonicity tolerance for sampled series:
/// tol = 10 · (machine + N^{-4} + dt⁴) · scale. A genuine monotonicity
/// violation grows with the sampling interval, far above this envelope;
/// refinement studies must show measured violations shrink inside it.
pub const MONO_SAFETY: f64 = 10.0;
pub const MONO_MACHINE: f64 = 1e-13;

pub fn monotonicity_tol(n: usize, dt: f64, scale: f64) -> f64 {
    MONO_SAFETY
        * (MONO_MACHINE + (n as f64).powi(-4) + dt.powi(4))
        * scale.abs().max(f64::MIN_POSITIVE)
}

/// Relative floor used when a refinement study compares violations across
/// resolutions and both sit at round-off.
pub const MONO_SHRINK_FLOOR_REL: f64 = 5e-13;

/// Equality-case detection: a gap counts as zero when |gap|/scale and
/// roundness - 1 both fall below this.
pub const EQUALITY_TOL: f64 = 1e-8;

/// Allowed deviation of a fitted exponential growth rate from its exact
/// integer value.
pub const GROWTH_FIT_TOL: f64 = 1e-3;

/// Residuals below this relative size count as converged to round-off in
/// convergence-order ladders.
pub const ORDER_FLOOR_REL: f64 = 1e-12;
