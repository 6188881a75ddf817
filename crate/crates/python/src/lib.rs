//! Python bindings: the map, Lyapunov/entropy analyses, zeta-zero statistics
//! and the discretized operator. Errors surface as `ValueError` (bad
//! arguments or data), `ArithmeticError` (numeric failure) or `OSError`.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use montgomery_lab as ml;
use ml::{Convention, Error, MapParams};
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        Error::Overflow { .. }
        | Error::DegenerateOrbit { .. }
        | Error::Convergence { .. }
        | Error::DegenerateSpectrum { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn params(eps: f64) -> PyResult<MapParams> {
    MapParams::with_eps(eps).map_err(to_py)
}

fn convention(name: &str) -> PyResult<Convention> {
    name.parse().map_err(to_py)
}

#[pyfunction]
fn sinc(t: f64) -> f64 {
    ml::sinc(t)
}

#[pyfunction]
fn montgomery_kernel(u: f64) -> f64 {
    ml::montgomery_kernel(u)
}

/// One application of the map.
#[pyfunction]
#[pyo3(signature = (x, eps = 1.0))]
fn step(x: f64, eps: f64) -> PyResult<f64> {
    ml::step(x, &params(eps)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (x, eps = 1.0))]
fn step_derivative(x: f64, eps: f64) -> PyResult<f64> {
    ml::step_derivative(x, &params(eps)?).map_err(to_py)
}

#[pyclass(frozen, name = "Trajectory")]
struct PyTrajectory {
    #[pyo3(get)]
    x0: f64,
    #[pyo3(get)]
    eps: f64,
    #[pyo3(get)]
    values: Vec<f64>,
    /// Index of the first unusable iterate, if the orbit stopped early.
    #[pyo3(get)]
    terminated_at: Option<usize>,
    #[pyo3(get)]
    termination_reason: Option<String>,
    first_negative: Option<usize>,
}

#[pymethods]
impl PyTrajectory {
    fn first_negative(&self) -> Option<usize> {
        self.first_negative
    }

    fn __len__(&self) -> usize {
        self.values.len()
    }

    fn __repr__(&self) -> String {
        format!("Trajectory(x0={}, eps={}, len={})", self.x0, self.eps, self.values.len())
    }
}

/// Orbit `x_0..x_steps`; stops early (without raising) if it leaves the domain.
#[pyfunction]
#[pyo3(signature = (x0, steps, eps = 1.0))]
fn iterate(x0: f64, steps: usize, eps: f64) -> PyResult<PyTrajectory> {
    let t = ml::iterate(x0, steps, &params(eps)?).map_err(to_py)?;
    let first_negative = t.first_negative();
    let (terminated_at, termination_reason) = match t.terminated_early {
        Some(term) => (Some(term.index), Some(term.reason)),
        None => (None, None),
    };
    Ok(PyTrajectory { x0, eps, values: t.values, terminated_at, termination_reason, first_negative })
}

/// Running estimates `lambda_0..lambda_{steps-1}` with `lambda_0 = 0`.
#[pyfunction]
#[pyo3(signature = (x0, steps, eps = 1.0))]
fn lyapunov_exponents(x0: f64, steps: usize, eps: f64) -> PyResult<Vec<f64>> {
    Ok(ml::lyapunov_exponents(x0, steps, &params(eps)?).map_err(to_py)?.lambdas)
}

#[pyclass(frozen, name = "Histogram")]
struct PyHistogram {
    inner: ml::Histogram,
}

#[pymethods]
impl PyHistogram {
    #[getter]
    fn edges(&self) -> Vec<f64> {
        self.inner.edges.clone()
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.inner.counts.clone()
    }

    #[getter]
    fn total(&self) -> u64 {
        self.inner.total
    }

    #[getter]
    fn dropped(&self) -> u64 {
        self.inner.dropped
    }

    fn centers(&self) -> Vec<f64> {
        self.inner.centers()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities()
    }

    /// Shannon entropy in bits.
    fn entropy(&self) -> PyResult<f64> {
        ml::shannon_entropy(&self.inner).map_err(to_py)
    }
}

/// Histogram over `[lo, hi)`; values outside are counted as dropped.
#[pyfunction]
fn build_histogram(values: Vec<f64>, bins: usize, lo: f64, hi: f64) -> PyResult<PyHistogram> {
    Ok(PyHistogram { inner: ml::build_histogram(&values, bins, lo, hi).map_err(to_py)? })
}

type Diagram = (Vec<f64>, Vec<Vec<f64>>, Vec<bool>);
type ErrorRows = (Vec<(usize, f64, f64, f64, f64)>, f64);

/// Returns `(eps_values, samples, truncated)`; `samples[i]` holds the
/// post-transient orbit for `eps_values[i]`.
#[pyfunction]
fn bifurcation_scan(
    x0: f64,
    eps_from: f64,
    eps_to: f64,
    eps_steps: usize,
    transient: usize,
    sample: usize,
) -> PyResult<Diagram> {
    let d = ml::bifurcation_scan(x0, eps_from, eps_to, eps_steps, transient, sample).map_err(to_py)?;
    Ok((d.param_values, d.samples, d.truncated))
}

#[pyclass(frozen, name = "PairCorrelation")]
struct PyPairCorrelation {
    inner: ml::PairCorrelation,
}

#[pymethods]
impl PyPairCorrelation {
    #[getter]
    fn bin_centers(&self) -> Vec<f64> {
        self.inner.bin_centers.clone()
    }

    #[getter]
    fn empirical(&self) -> Vec<f64> {
        self.inner.empirical.clone()
    }

    #[getter]
    fn model(&self) -> Vec<f64> {
        self.inner.model.clone()
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.inner.counts.clone()
    }

    #[getter]
    fn bin_width(&self) -> f64 {
        self.inner.bin_width
    }

    fn pair_count(&self) -> u64 {
        self.inner.pair_count()
    }

    /// `(max_abs_dev, mean_sq_dev)` against the kernel, optionally on the
    /// bins whose centers lie in `[lo, hi]`.
    #[pyo3(signature = (lo = None, hi = None))]
    fn compare_model(&self, lo: Option<f64>, hi: Option<f64>) -> PyResult<(f64, f64)> {
        let pc = match (lo, hi) {
            (None, None) => self.inner.clone(),
            (lo, hi) => self.inner.restricted(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)),
        };
        let d = ml::compare_model(&pc).map_err(to_py)?;
        Ok((d.max_abs_dev, d.mean_sq_dev))
    }
}

#[pyclass(frozen, name = "ZeroTable")]
struct PyZeroTable {
    inner: ml::ZeroTable,
}

#[pymethods]
impl PyZeroTable {
    #[new]
    fn new(gammas: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: ml::ZeroTable::new(gammas, "python").map_err(to_py)? })
    }

    /// One ordinate per line; blank lines and `#` comments are ignored.
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let file = File::open(&path).map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))?;
        let inner = ml::load_zeros(BufReader::new(file), &path.display().to_string()).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn gammas(&self) -> Vec<f64> {
        self.inner.gammas.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Normalized nearest-neighbour spacings; `convention` is `"paper"` or `"standard"`.
    #[pyo3(signature = (convention = "paper"))]
    fn spacings(&self, convention: &str) -> PyResult<Vec<f64>> {
        Ok(ml::normalized_spacings(&self.inner, self::convention(convention)?).map_err(to_py)?.spacings)
    }

    #[pyo3(signature = (max_u, bins, convention = "paper"))]
    fn pair_correlation(&self, max_u: f64, bins: usize, convention: &str) -> PyResult<PyPairCorrelation> {
        let inner = ml::pair_correlation_empirical(&self.inner, max_u, bins, self::convention(convention)?)
            .map_err(to_py)?;
        Ok(PyPairCorrelation { inner })
    }
}

#[pyfunction]
fn zero_density(e: f64) -> PyResult<f64> {
    ml::zero_density(e).map_err(to_py)
}

/// Rows `(n, a, b, a - b, |a - b|)` plus the maximum absolute error.
#[pyfunction]
fn error_table(a: Vec<f64>, b: Vec<f64>) -> PyResult<ErrorRows> {
    let t = ml::error_table(&a, &b).map_err(to_py)?;
    let rows = t.rows.iter().map(|r| (r.index, r.a, r.b, r.signed_error, r.abs_error)).collect();
    Ok((rows, t.max_abs_error))
}

#[pyfunction]
fn harmonic_reference(n: usize) -> PyResult<Vec<f64>> {
    ml::harmonic_reference(n).map_err(to_py)
}

#[pyfunction]
fn wigner_surmise_gue(s: f64) -> PyResult<f64> {
    ml::wigner_surmise_gue(s).map_err(to_py)
}

#[pyclass(frozen, name = "SpacingStats")]
struct PySpacingStats {
    #[pyo3(get)]
    unfolded: Vec<f64>,
    #[pyo3(get)]
    spacings: Vec<f64>,
    #[pyo3(get)]
    mean_spacing: f64,
    #[pyo3(get)]
    max_gue_deviation: f64,
    hist: ml::Histogram,
}

#[pymethods]
impl PySpacingStats {
    fn histogram(&self) -> PyHistogram {
        PyHistogram { inner: self.hist.clone() }
    }
}

#[pyclass(frozen, name = "Operator")]
struct PyOperator {
    inner: ml::DiscretizedOperator,
}

#[pymethods]
impl PyOperator {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }

    #[getter]
    fn symmetrized(&self) -> bool {
        self.inner.symmetrized
    }

    #[getter]
    fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal.clone()
    }

    #[getter]
    fn superdiagonal(&self) -> Vec<f64> {
        self.inner.superdiagonal.clone()
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// Ascending eigenvalues.
    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        Ok(ml::eigenvalues(&self.inner).map_err(to_py)?.eigenvalues)
    }

    fn unfold(&self) -> PyResult<PySpacingStats> {
        let spectrum = ml::eigenvalues(&self.inner).map_err(to_py)?;
        let s = ml::unfold_spectrum(&spectrum).map_err(to_py)?;
        let max_gue_deviation = ml::spectral::max_deviation_from_gue(&s);
        Ok(PySpacingStats {
            unfolded: s.unfolded,
            spacings: s.spacings,
            mean_spacing: s.mean_spacing,
            max_gue_deviation,
            hist: s.spacing_hist,
        })
    }
}

/// Tridiagonal discretization on `n` points with step `h` (default `1/n`).
#[pyfunction]
#[pyo3(signature = (n, h = None, symmetrized = false))]
fn build_operator(n: usize, h: Option<f64>, symmetrized: bool) -> PyResult<PyOperator> {
    Ok(PyOperator { inner: ml::build_operator(n, h, symmetrized).map_err(to_py)? })
}

#[pymodule]
fn montgomery_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sinc, m)?)?;
    m.add_function(wrap_pyfunction!(montgomery_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(step_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(iterate, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(build_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(bifurcation_scan, m)?)?;
    m.add_function(wrap_pyfunction!(zero_density, m)?)?;
    m.add_function(wrap_pyfunction!(error_table, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_reference, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_surmise_gue, m)?)?;
    m.add_function(wrap_pyfunction!(build_operator, m)?)?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyHistogram>()?;
    m.add_class::<PyZeroTable>()?;
    m.add_class::<PyPairCorrelation>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PySpacingStats>()?;
    Ok(())
}
