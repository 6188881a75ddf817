//! Lyapunov exponents, histograms and entropies, bifurcation sweeps and the
//! exponential growth model.

use rayon::prelude::*;

use crate::dynamics::{iterate, orbit, Map1D, MapParams, MontgomeryMap, Termination};
use crate::error::{Error, Result};

/// Running Lyapunov exponent estimates along one orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSeries {
    pub x0: f64,
    pub params: MapParams,
    /// `lambdas[k]` averages `ln|f'|` over the first `k` orbit points;
    /// `lambdas[0]` is 0 by convention.
    pub lambdas: Vec<f64>,
    /// Set when the orbit terminated before `n` estimates were available.
    pub truncated: Option<Termination>,
}

/// Time average of `ln|f'(x_i)|` along the orbit of `map` from `x0`.
///
/// Returns up to `n` estimates (fewer if the orbit terminates) and the
/// orbit termination record, if any.
pub fn lyapunov_series_for<M: Map1D + ?Sized>(
    map: &M,
    x0: f64,
    n: usize,
) -> Result<(Vec<f64>, Option<Termination>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one Lyapunov estimate".into()));
    }
    let (values, termination) = orbit(map, x0, n - 1);
    let mut lambdas = Vec::with_capacity(n);
    lambdas.push(0.0);
    let mut sum = 0.0;
    for k in 1..n {
        let Some(&x) = values.get(k - 1) else { break };
        let d = map.derivative(x)?;
        if d == 0.0 {
            return Err(Error::DegenerateOrbit { index: k - 1 });
        }
        sum += d.abs().ln();
        lambdas.push(sum / k as f64);
    }
    let truncated = if lambdas.len() < n { termination } else { None };
    Ok((lambdas, truncated))
}

/// Lyapunov exponent estimates for the recurrence started at `x0`.
pub fn lyapunov_exponents(x0: f64, n: usize, params: &MapParams) -> Result<LyapunovSeries> {
    if !x0.is_finite() || x0.abs() < params.min_abs_x {
        return Err(Error::Domain { op: "lyapunov_exponents", value: x0 });
    }
    let (lambdas, truncated) = lyapunov_series_for(&MontgomeryMap::new(*params), x0, n)?;
    Ok(LyapunovSeries { x0, params: *params, lambdas, truncated })
}

/// Uniform-width histogram over the half-open range `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` strictly increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Number of values offered, including the dropped ones.
    pub total: u64,
    /// Values outside `[lo, hi)` or non-finite.
    pub dropped: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn in_range(&self) -> u64 {
        self.total - self.dropped
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Bin probabilities, normalized by the in-range count.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.in_range() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Probability densities (probability per unit width).
    pub fn densities(&self) -> Vec<f64> {
        let w = self.bin_width();
        self.probabilities().into_iter().map(|p| p / w).collect()
    }
}

pub fn build_histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid histogram range [{lo}, {hi})")));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + i as f64 * width })
        .collect();
    let mut counts = vec![0u64; bins];
    let mut dropped = 0;
    for &v in values {
        if !(v >= lo && v < hi) {
            dropped += 1;
            continue;
        }
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts, total: values.len() as u64, dropped })
}

/// Shannon entropy in bits of the in-range bin distribution.
pub fn shannon_entropy(h: &Histogram) -> Result<f64> {
    let n = h.in_range();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let n = n as f64;
    let entropy = h
        .counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>();
    // -0.0 for a single occupied bin
    Ok(entropy.max(0.0))
}

/// Trapezoidal estimate of `-∫ P ln P dy` from `(y, P(y))` samples on a
/// uniform grid, with `0 ln 0 = 0`.
pub fn differential_entropy(density: &[(f64, f64)]) -> Result<f64> {
    if density.len() < 2 {
        return Err(Error::EmptyInput);
    }
    let h = density[1].0 - density[0].0;
    if !(h > 0.0) {
        return Err(Error::NonUniformGrid { index: 1 });
    }
    for (i, w) in density.windows(2).enumerate() {
        if ((w[1].0 - w[0].0 - h) / h).abs() > 1e-9 {
            return Err(Error::NonUniformGrid { index: i + 1 });
        }
    }
    let mut integrand = Vec::with_capacity(density.len());
    for (i, &(_, p)) in density.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("density sample {i} is {p}")));
        }
        integrand.push(if p == 0.0 { 0.0 } else { -p * p.ln() });
    }
    let last = integrand.len() - 1;
    let inner: f64 = integrand[1..last].iter().sum();
    Ok(h * (inner + 0.5 * (integrand[0] + integrand[last])))
}

/// Post-transient orbit samples over a grid of correction weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationDiagram {
    pub param_name: String,
    pub param_values: Vec<f64>,
    pub samples: Vec<Vec<f64>>,
    /// Per-column flag: the orbit terminated before `n_transient + n_sample` steps.
    pub truncated: Vec<bool>,
}

/// Sweeps `eps` uniformly over `[eps_lo, eps_hi]` with `steps` points. Each
/// column iterates from `x0` for `n_transient + n_sample` steps and keeps
/// the last `n_sample` values.
pub fn bifurcation_scan(
    x0: f64,
    eps_lo: f64,
    eps_hi: f64,
    steps: usize,
    n_transient: usize,
    n_sample: usize,
) -> Result<BifurcationDiagram> {
    if !(eps_lo < eps_hi) || !eps_lo.is_finite() || !eps_hi.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid eps range [{eps_lo}, {eps_hi}]")));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument("bifurcation scan needs at least 2 steps".into()));
    }
    let defaults = MapParams::default();
    if !x0.is_finite() || x0.abs() < defaults.min_abs_x {
        return Err(Error::Domain { op: "bifurcation_scan", value: x0 });
    }
    let delta = (eps_hi - eps_lo) / (steps - 1) as f64;
    let param_values: Vec<f64> = (0..steps)
        .map(|i| if i == steps - 1 { eps_hi } else { eps_lo + i as f64 * delta })
        .collect();

    let total = n_transient + n_sample;
    let columns: Vec<(Vec<f64>, bool)> = param_values
        .par_iter()
        .map(|&eps| {
            let params = MapParams { eps, ..defaults };
            let traj = iterate(x0, total, &params).expect("x0 validated above");
            let tail = traj.values.get(n_transient + 1..).unwrap_or(&[]).to_vec();
            (tail, traj.terminated_early.is_some())
        })
        .collect();
    let (samples, truncated) = columns.into_iter().unzip();
    Ok(BifurcationDiagram { param_name: "eps".into(), param_values, samples, truncated })
}

/// Exponential law `rate * exp(-rate * x)` on `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialModel {
    pub rate: f64,
}

impl ExponentialModel {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("rate must be positive, got {rate}")));
        }
        Ok(Self { rate })
    }
}

pub fn exponential_pdf(x: f64, m: &ExponentialModel) -> f64 {
    if x >= 0.0 {
        m.rate * (-m.rate * x).exp()
    } else {
        0.0
    }
}

pub fn exponential_mean(m: &ExponentialModel) -> f64 {
    1.0 / m.rate
}
