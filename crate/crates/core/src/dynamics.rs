//! The recurrence x_{n+1} = 1 - sinc(pi/x_n)^2 + eps/x_n, its derivative,
//! the two linearizations and the associated Lyapunov functions.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Slope of the large-x linearization, pi^2/6.
pub const LARGE_X_SLOPE: f64 = PI * PI / 6.0;

/// Parameters of the recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    /// Weight of the `1/x` correction term. The original system uses 1.
    pub eps: f64,
    /// Iteration stops once |x| falls below this threshold.
    pub min_abs_x: f64,
}

impl Default for MapParams {
    fn default() -> Self {
        Self { eps: 1.0, min_abs_x: 1e-300 }
    }
}

impl MapParams {
    pub fn new(eps: f64, min_abs_x: f64) -> Result<Self> {
        if !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("eps must be finite, got {eps}")));
        }
        if !(min_abs_x > 0.0 && min_abs_x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "min_abs_x must be positive, got {min_abs_x}"
            )));
        }
        Ok(Self { eps, min_abs_x })
    }

    pub fn with_eps(eps: f64) -> Result<Self> {
        Self::new(eps, Self::default().min_abs_x)
    }
}

/// Constants of the two Lyapunov functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovFunctionParams {
    pub c1: f64,
    pub c2: f64,
}

impl LyapunovFunctionParams {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 > 0.0 && c1.is_finite() && c2 > 0.0 && c2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Lyapunov function constants must be positive, got c1={c1}, c2={c2}"
            )));
        }
        Ok(Self { c1, c2 })
    }
}

impl Default for LyapunovFunctionParams {
    fn default() -> Self {
        Self { c1: 1.0, c2: 1.0 }
    }
}

/// `sin(t)/t`, with the removable singularity at 0 filled in.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// `1 - sinc(t)^2`, evaluated by its Taylor series near 0 to avoid cancellation.
fn one_minus_sinc_sq(t: f64) -> f64 {
    if t.abs() < 0.05 {
        let t2 = t * t;
        // t^2/3 - 2t^4/45 + t^6/315 - 2t^8/14175
        t2 * (1.0 / 3.0 + t2 * (-2.0 / 45.0 + t2 * (1.0 / 315.0 - t2 * (2.0 / 14175.0))))
    } else {
        let s = sinc(t);
        1.0 - s * s
    }
}

/// Pair-correlation kernel `1 - (sin(pi u)/(pi u))^2`, without the delta term.
pub fn montgomery_kernel(u: f64) -> f64 {
    one_minus_sinc_sq(PI * u.abs())
}

fn check_domain(op: &'static str, x: f64, params: &MapParams) -> Result<()> {
    if x.is_nan() || x.abs() < params.min_abs_x {
        return Err(Error::Domain { op, value: x });
    }
    Ok(())
}

/// One application of the map.
pub fn step(x: f64, params: &MapParams) -> Result<f64> {
    check_domain("step", x, params)?;
    let next = one_minus_sinc_sq(PI / x) + params.eps / x;
    if !next.is_finite() {
        return Err(Error::Overflow { op: "step", value: x });
    }
    Ok(next)
}

/// Analytic derivative of [`step`]: `-2 s s' - eps/x^2` with `s = sinc(pi/x)`.
pub fn step_derivative(x: f64, params: &MapParams) -> Result<f64> {
    check_domain("step_derivative", x, params)?;
    let t = PI / x;
    let (sin_t, cos_t) = t.sin_cos();
    let s = sinc(t);
    let ds = sin_t / PI - cos_t / x;
    let d = -2.0 * s * ds - params.eps / (x * x);
    if !d.is_finite() {
        return Err(Error::Overflow { op: "step_derivative", value: x });
    }
    Ok(d)
}

/// Small-x linearization `1 - pi^2 x^2`.
pub fn linear_step_small(x: f64) -> f64 {
    1.0 - PI * PI * x * x
}

/// Large-x linearization in `y = 1/x`: `y -> (pi^2/6) y`.
pub fn linear_step_large(y: f64) -> f64 {
    LARGE_X_SLOPE * y
}

/// `c1 exp(-pi^2 x^3 / 3)`.
pub fn lyapunov_function_small(x: f64, p: &LyapunovFunctionParams) -> f64 {
    p.c1 * (-PI * PI * x * x * x / 3.0).exp()
}

/// `c2 (pi^2/6)^n`.
pub fn lyapunov_function_large(n: u32, p: &LyapunovFunctionParams) -> f64 {
    p.c2 * LARGE_X_SLOPE.powi(n as i32)
}

/// A one-dimensional map with a derivative, so orbits and Lyapunov
/// exponents can be computed uniformly for the full map and its
/// linearizations.
pub trait Map1D {
    fn apply(&self, x: f64) -> Result<f64>;
    fn derivative(&self, x: f64) -> Result<f64>;

    /// Smallest magnitude an orbit value may have and still be iterated.
    fn min_abs_x(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MontgomeryMap {
    pub params: MapParams,
}

impl MontgomeryMap {
    pub fn new(params: MapParams) -> Self {
        Self { params }
    }
}

impl Map1D for MontgomeryMap {
    fn apply(&self, x: f64) -> Result<f64> {
        step(x, &self.params)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        step_derivative(x, &self.params)
    }

    fn min_abs_x(&self) -> f64 {
        self.params.min_abs_x
    }
}

/// `x -> slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub slope: f64,
    pub intercept: f64,
}

impl AffineMap {
    /// The large-x linearization as an affine map.
    pub fn large_x() -> Self {
        Self { slope: LARGE_X_SLOPE, intercept: 0.0 }
    }
}

impl Map1D for AffineMap {
    fn apply(&self, x: f64) -> Result<f64> {
        let y = self.slope * x + self.intercept;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Overflow { op: "affine", value: x })
        }
    }

    fn derivative(&self, _x: f64) -> Result<f64> {
        Ok(self.slope)
    }
}

/// The small-x linearization `1 - pi^2 x^2` as a map.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SmallXLinearization;

impl Map1D for SmallXLinearization {
    fn apply(&self, x: f64) -> Result<f64> {
        let y = linear_step_small(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Overflow { op: "linear_step_small", value: x })
        }
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        Ok(-2.0 * PI * PI * x)
    }
}

/// Why an orbit stopped before the requested number of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Termination {
    /// Index of the last stored value; the step from it failed.
    pub index: usize,
    pub reason: String,
}

/// Iterates `map` from `x0` for up to `n` steps.
///
/// Returns the stored values (starting with `x0`) and the termination
/// record if a step failed or produced a value the map cannot continue
/// from.
pub fn orbit<M: Map1D + ?Sized>(map: &M, x0: f64, n: usize) -> (Vec<f64>, Option<Termination>) {
    let mut values = Vec::with_capacity(n + 1);
    values.push(x0);
    let mut x = x0;
    for k in 0..n {
        let next = match map.apply(x) {
            Ok(v) => v,
            Err(e) => return (values, Some(Termination { index: k, reason: e.to_string() })),
        };
        let min = map.min_abs_x();
        if !next.is_finite() || (min > 0.0 && next.abs() < min) {
            let reason = Error::Domain { op: "iterate", value: next }.to_string();
            return (values, Some(Termination { index: k, reason }));
        }
        values.push(next);
        x = next;
    }
    (values, None)
}

/// A computed orbit of the recurrence together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x0: f64,
    pub params: MapParams,
    /// `values[0] == x0`; `values[k + 1] == step(values[k])`.
    pub values: Vec<f64>,
    pub terminated_early: Option<Termination>,
}

impl Trajectory {
    /// Number of steps actually taken.
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    /// First index at which the orbit is negative, if any.
    pub fn first_negative(&self) -> Option<usize> {
        self.values.iter().position(|&v| v < 0.0)
    }
}

/// Iterates the recurrence `n` times from `x0`. Failures mid-run truncate
/// the trajectory and are recorded in `terminated_early`; only an invalid
/// starting point is an error.
pub fn iterate(x0: f64, n: usize, params: &MapParams) -> Result<Trajectory> {
    if !x0.is_finite() || x0.abs() < params.min_abs_x {
        return Err(Error::Domain { op: "iterate", value: x0 });
    }
    let (values, terminated_early) = orbit(&MontgomeryMap::new(*params), x0, n);
    Ok(Trajectory { x0, params: *params, values, terminated_early })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-15);
        assert!((sinc(PI / 2.0) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn sinc_near_zero_matches_taylor() {
        for &t in &[1e-3, 5e-4, 1e-6, -1e-3, 1e-12] {
            let lhs = (sinc(t) - 1.0 + t * t / 6.0).abs();
            assert!(lhs <= t.powi(4) / 100.0 + f64::EPSILON, "t={t}: {lhs}");
        }
    }

    #[test]
    fn kernel_values() {
        assert_eq!(montgomery_kernel(0.0), 0.0);
        assert!((montgomery_kernel(1.0) - 1.0).abs() < 1e-15);
        // mpmath: 1 - (2/pi)^2
        assert!((montgomery_kernel(0.5) - 0.594_715_265_430_648_9).abs() < 1e-15);
    }

    #[test]
    fn kernel_series_branch_is_continuous() {
        // values on either side of the series cutoff t = 0.05
        let u_lo = 0.049_999_999 / PI;
        let u_hi = 0.050_000_001 / PI;
        let a = montgomery_kernel(u_lo);
        let b = montgomery_kernel(u_hi);
        assert!(rel(a, b) < 1e-7);
        let t: f64 = 0.05;
        let direct = 1.0 - (t.sin() / t).powi(2);
        assert!(rel(one_minus_sinc_sq(0.049_999_999_999), direct) < 1e-10);
    }

    #[test]
    fn step_examples() {
        let p = MapParams::default();
        assert_eq!(step(0.5, &p).unwrap(), 3.0);
        assert!(rel(step(5e-13, &p).unwrap(), 2.0e12) < 1e-9);
        // mpmath (50 digits): 1.0000032898681336921e-6
        assert!(rel(step(1e6, &p).unwrap(), 1.000_003_289_868_133_7e-6) < 1e-9);
        // mpmath: 0.64941534374755337609
        assert!(rel(step(3.0, &p).unwrap(), 0.649_415_343_747_553_4) < 1e-14);
    }

    #[test]
    fn step_rejects_singularity() {
        let p = MapParams::default();
        assert!(matches!(step(0.0, &p), Err(Error::Domain { .. })));
        assert!(matches!(step(1e-301, &p), Err(Error::Domain { .. })));
        assert!(matches!(step(f64::NAN, &p), Err(Error::Domain { .. })));
        let loose = MapParams::new(1.0, 1e-320).unwrap();
        assert!(matches!(step(1e-315, &loose), Err(Error::Overflow { .. })));
    }

    #[test]
    fn step_on_negative_x_uses_same_formula() {
        let p = MapParams::default();
        let x = -0.5;
        let expected = 1.0 - sinc(PI / x).powi(2) + 1.0 / x;
        assert!((step(x, &p).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let p = MapParams::default();
        assert!((step_derivative(0.5, &p).unwrap() + 4.0).abs() < 1e-12);
        // -4/pi^2 - 1/4
        assert!((step_derivative(2.0, &p).unwrap() + 0.655_284_734_569_351_1).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let p = MapParams::default();
        for &x in &[0.3, 0.5, 0.7, 1.7, 2.0, 5.0] {
            let h = 1e-6 * x;
            let fd = (step(x + h, &p).unwrap() - step(x - h, &p).unwrap()) / (2.0 * h);
            let d = step_derivative(x, &p).unwrap();
            assert!(rel(d, fd) < 1e-6, "x={x}: analytic {d} vs fd {fd}");
        }
    }

    #[test]
    fn large_x_asymptotics() {
        let p = MapParams::default();
        for &x in &[1e3, 1e4, 1e5, 1e6] {
            let y = step(x, &p).unwrap();
            assert!((y - 1.0 / x).abs() <= 4.0 / (x * x), "x={x}");
        }
    }

    #[test]
    fn iterate_examples() {
        let p = MapParams::default();
        let t = iterate(0.5, 2, &p).unwrap();
        assert_eq!(t.values[0], 0.5);
        assert_eq!(t.values[1], 3.0);
        assert!(rel(t.values[2], 0.649_415_343_747_553_4) < 1e-14);
        assert!(t.terminated_early.is_none());

        let t = iterate(0.7, 0, &p).unwrap();
        assert_eq!(t.values, vec![0.7]);
        assert_eq!(t.steps(), 0);
    }

    #[test]
    fn tiny_start_alternates() {
        let p = MapParams::default();
        let t = iterate(5e-13, 4, &p).unwrap();
        for (k, &v) in t.values.iter().enumerate() {
            if k % 2 == 1 {
                assert!(rel(v, 2e12) < 1e-6, "k={k}: {v}");
            } else {
                assert!(rel(v, 5e-13) < 1e-3, "k={k}: {v}");
            }
        }
        for &x0 in &[1e-6, 1e-9, 5e-13] {
            let t = iterate(x0, 2, &p).unwrap();
            assert!(rel(t.values[2], x0) < 1e-2);
        }
    }

    #[test]
    fn iterate_rejects_bad_start_and_truncates() {
        let p = MapParams::default();
        assert!(iterate(0.0, 3, &p).is_err());
        assert!(iterate(f64::INFINITY, 3, &p).is_err());

        // eps = -1 from x0 = 1: step(1) = 1 - sinc(pi)^2 - 1 ~ 0, below the guard
        let neg = MapParams::with_eps(-1.0).unwrap();
        let t = iterate(1.0, 5, &neg).unwrap();
        assert_eq!(t.values.len(), 1);
        assert_eq!(t.terminated_early.as_ref().unwrap().index, 0);
    }

    #[test]
    fn trajectory_is_reproducible() {
        let p = MapParams::default();
        let t = iterate(0.37, 200, &p).unwrap();
        for w in t.values.windows(2) {
            assert_eq!(step(w[0], &p).unwrap().to_bits(), w[1].to_bits());
        }
    }

    #[test]
    fn linearizations() {
        assert_eq!(linear_step_small(0.0), 1.0);
        assert!(linear_step_small(1.0 / PI).abs() < 1e-15);
        assert!((linear_step_small(0.1) - 0.901_303_955_989_106_4).abs() < 1e-12);
        assert_eq!(linear_step_large(0.0), 0.0);
        assert!((linear_step_large(1.0) - 1.644_934_066_848_226_4).abs() < 1e-15);
        assert!((linear_step_large(6.0 / (PI * PI)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_linearization_fixed_points() {
        let disc = (1.0 + 4.0 * PI * PI).sqrt();
        for root in [(-1.0 + disc) / (2.0 * PI * PI), (-1.0 - disc) / (2.0 * PI * PI)] {
            assert!((linear_step_small(root) - root).abs() < 1e-12);
        }
    }

    #[test]
    fn lyapunov_functions() {
        let p = LyapunovFunctionParams::new(2.5, 3.0).unwrap();
        assert_eq!(lyapunov_function_small(0.0, &p), 2.5);
        assert_eq!(lyapunov_function_large(0, &p), 3.0);

        let unit = LyapunovFunctionParams::default();
        // mpmath: exp(-pi^2/3)
        assert!((lyapunov_function_small(1.0, &unit) - 0.037_258_762_247_541_24).abs() < 1e-15);
        assert!(lyapunov_function_small(0.2, &unit) > lyapunov_function_small(0.4, &unit));
        assert!(lyapunov_function_small(0.4, &unit) > lyapunov_function_small(0.8, &unit));
        assert!((lyapunov_function_large(1, &unit) - 1.644_934_066_848_226_4).abs() < 1e-12);
        assert!((lyapunov_function_large(2, &unit) - 2.705_808_084_277_845_5).abs() < 1e-12);

        assert!(LyapunovFunctionParams::new(0.0, 1.0).is_err());
        assert!(LyapunovFunctionParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(MapParams::new(f64::NAN, 1e-300).is_err());
        assert!(MapParams::new(1.0, 0.0).is_err());
        assert!(MapParams::new(1.0, -1.0).is_err());
    }
}
