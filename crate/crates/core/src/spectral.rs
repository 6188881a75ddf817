//! Tridiagonal discretization `(T psi)_j = psi_{j+1} - pi^2 h^2 j^2 psi_j`,
//! its spectrum, spectral unfolding and nearest-neighbour spacing
//! statistics against the GUE Wigner surmise.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::chaos::{build_histogram, Histogram};
use crate::dynamics::{lyapunov_function_small, LyapunovFunctionParams};
use crate::error::{Error, Result};

/// Degree of the polynomial fitted to the spectral staircase.
pub const UNFOLD_DEGREE: usize = 5;
/// Support of the spacing histogram.
pub const SPACING_RANGE: (f64, f64) = (0.0, 4.0);
pub const SPACING_BINS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator {
    pub n: usize,
    pub h: f64,
    /// `-pi^2 h^2 j^2` for `j = 1..=n`.
    pub diagonal: Vec<f64>,
    /// All ones, length `n - 1`.
    pub superdiagonal: Vec<f64>,
    /// When set, the subdiagonal mirrors the superdiagonal. The plain
    /// operator is upper bidiagonal.
    pub symmetrized: bool,
}

/// Builds the operator of dimension `n`; `h` defaults to `1/n`.
pub fn build_operator(n: usize, h: Option<f64>, symmetrized: bool) -> Result<DiscretizedOperator> {
    if n < 2 {
        return Err(Error::Dimension(format!("operator needs n >= 2, got {n}")));
    }
    let h = h.unwrap_or(1.0 / n as f64);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Dimension(format!("step h must be positive, got {h}")));
    }
    let diagonal = (1..=n)
        .map(|j| {
            let jh = j as f64 * h;
            -PI * PI * jh * jh
        })
        .collect();
    Ok(DiscretizedOperator { n, h, diagonal, superdiagonal: vec![1.0; n - 1], symmetrized })
}

impl DiscretizedOperator {
    /// Dense matrix form.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (j, &d) in self.diagonal.iter().enumerate() {
            m[(j, j)] = d;
        }
        for (j, &e) in self.superdiagonal.iter().enumerate() {
            m[(j, j + 1)] = e;
            if self.symmetrized {
                m[(j + 1, j)] = e;
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    /// Diagnostic vector `sqrt(h) V(x_j)` with `x_j = j h` and `V` the
    /// small-x Lyapunov function. Not used by the spectrum path.
    pub fn gaussian_weight(&self, p: &LyapunovFunctionParams) -> Vec<f64> {
        let root_h = self.h.sqrt();
        (1..=self.n).map(|j| root_h * lyapunov_function_small(j as f64 * self.h, p)).collect()
    }
}

/// Sorted eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts the given values ascending.
    pub fn from_unsorted(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidData("spectrum contains non-finite values".into()));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { eigenvalues })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

pub fn eigenvalues(op: &DiscretizedOperator) -> Result<Spectrum> {
    if !op.symmetrized {
        // triangular: the spectrum is the diagonal
        return Spectrum::from_unsorted(op.diagonal.clone());
    }
    let mut d = op.diagonal.clone();
    symmetric_tridiagonal_eigenvalues(&mut d, &op.superdiagonal)?;
    Spectrum::from_unsorted(d)
}

const QL_MAX_SWEEPS: usize = 60;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `offdiag` by implicit-shift QL. `d` is overwritten with
/// the (unsorted) eigenvalues.
pub fn symmetric_tridiagonal_eigenvalues(d: &mut [f64], offdiag: &[f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    if offdiag.len() + 1 != n {
        return Err(Error::Dimension(format!(
            "off-diagonal length {} does not match dimension {n}",
            offdiag.len()
        )));
    }
    let mut e = offdiag.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::Convergence { index: l });
            }

            // Wilkinson-style shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacingStats {
    /// Unfolded levels, shifted to start at 0 and scaled to unit mean gap.
    pub unfolded: Vec<f64>,
    /// Consecutive gaps of `unfolded`.
    pub spacings: Vec<f64>,
    /// Spacing histogram over [`SPACING_RANGE`] with [`SPACING_BINS`] bins.
    pub spacing_hist: Histogram,
    pub mean_spacing: f64,
}

/// Least-squares polynomial fit of `ys` against `xs`, with `xs` mapped
/// affinely onto [-1, 1] for conditioning. Returns the fitted values at `xs`.
fn polynomial_fit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let t: Vec<f64> = xs.iter().map(|&x| (x - mid) / half).collect();
    let cols = (degree + 1).min(xs.len());
    let a = DMatrix::from_fn(xs.len(), cols, |i, k| t[i].powi(k as i32));
    let b = DVector::from_column_slice(ys);
    let qr = a.clone().qr();
    let rhs = qr.q().transpose() * &b;
    let coeffs = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::InvalidData("staircase fit is rank deficient".into()))?;
    Ok((a * coeffs).iter().copied().collect())
}

/// Unfolds the spectrum by fitting a degree-5 polynomial to the staircase
/// `E_k -> k`, then rescales the unfolded gaps to unit mean.
pub fn unfold_spectrum(s: &Spectrum) -> Result<SpacingStats> {
    let n = s.len();
    if n < 3 {
        return Err(Error::Dimension(format!("unfolding needs at least 3 eigenvalues, got {n}")));
    }
    let ev = &s.eigenvalues;
    let tiny = ev.windows(2).filter(|w| w[1] - w[0] < 1e-12).count();
    if tiny * 10 > n - 1 {
        return Err(Error::DegenerateSpectrum { tiny, total: n - 1 });
    }

    let ranks: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let staircase = polynomial_fit(ev, &ranks, UNFOLD_DEGREE)?;
    let raw_gaps: Vec<f64> = staircase.windows(2).map(|w| w[1] - w[0]).collect();
    let raw_mean = (staircase[n - 1] - staircase[0]) / (n - 1) as f64;
    if !(raw_mean > 0.0) {
        return Err(Error::DegenerateSpectrum { tiny, total: n - 1 });
    }
    let unfolded: Vec<f64> = staircase.iter().map(|&e| (e - staircase[0]) / raw_mean).collect();
    let spacings: Vec<f64> = raw_gaps.iter().map(|g| g / raw_mean).collect();
    let mean_spacing = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let spacing_hist = build_histogram(&spacings, SPACING_BINS, SPACING_RANGE.0, SPACING_RANGE.1)?;
    Ok(SpacingStats { unfolded, spacings, spacing_hist, mean_spacing })
}

/// GUE Wigner surmise `(32/pi^2) s^2 exp(-4 s^2 / pi)`.
pub fn wigner_surmise_gue(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain { op: "wigner_surmise_gue", value: s });
    }
    Ok(32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp())
}

/// Largest absolute difference between the spacing density histogram and
/// the surmise at the bin centers.
pub fn max_deviation_from_gue(stats: &SpacingStats) -> f64 {
    let h = &stats.spacing_hist;
    h.centers()
        .iter()
        .zip(h.densities())
        .map(|(&c, d)| (d - wigner_surmise_gue(c).expect("centers are nonnegative")).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::trapezoid;

    const PI2: f64 = PI * PI;

    #[test]
    fn build_examples() {
        let op = build_operator(3, Some(1.0), false).unwrap();
        assert_eq!(op.diagonal, vec![-PI2, -4.0 * PI2, -9.0 * PI2]);
        assert_eq!(op.superdiagonal, vec![1.0, 1.0]);
        let op = build_operator(2, Some(0.5), false).unwrap();
        assert_eq!(op.diagonal, vec![-PI2 / 4.0, -PI2]);
        let op = build_operator(100, None, false).unwrap();
        assert_eq!(op.h, 0.01);
        assert!(build_operator(1, None, false).is_err());
        assert!(build_operator(4, Some(0.0), false).is_err());
    }

    #[test]
    fn triangular_spectrum_is_diagonal() {
        let op = build_operator(3, Some(1.0), false).unwrap();
        let s = eigenvalues(&op).unwrap();
        assert_eq!(s.eigenvalues, vec![-9.0 * PI2, -4.0 * PI2, -PI2]);
    }

    #[test]
    fn two_by_two_symmetrized() {
        let op = build_operator(2, Some(1.0), true).unwrap();
        let s = eigenvalues(&op).unwrap();
        // roots of the characteristic polynomial: (-5pi^2 +- sqrt(9pi^4 + 4)) / 2
        let disc = (9.0 * PI2 * PI2 + 4.0).sqrt();
        let lo = (-5.0 * PI2 - disc) / 2.0;
        let hi = (-5.0 * PI2 + disc) / 2.0;
        // mpmath: -39.512152895376448, -9.8358691100703450
        assert!((lo + 39.512_152_895_376_45).abs() < 1e-12);
        assert!((hi + 9.835_869_110_070_345).abs() < 1e-12);
        assert!((s.eigenvalues[0] - lo).abs() < 1e-12);
        assert!((s.eigenvalues[1] - hi).abs() < 1e-12);
    }

    #[test]
    fn symmetrized_matches_dense_solver() {
        for &(n, h) in &[(5usize, None), (37, Some(0.3)), (120, None)] {
            let op = build_operator(n, h, true).unwrap();
            let ours = eigenvalues(&op).unwrap().eigenvalues;
            let mut dense: Vec<f64> = op.to_dense().symmetric_eigenvalues().iter().copied().collect();
            dense.sort_by(f64::total_cmp);
            let scale = ours.iter().fold(1.0f64, |m, e| m.max(e.abs()));
            for (a, b) in ours.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-12 * scale, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn symmetrized_trace_identity() {
        for &n in &[10usize, 100, 1000] {
            let op = build_operator(n, None, true).unwrap();
            let s = eigenvalues(&op).unwrap();
            let sum: f64 = s.eigenvalues.iter().sum();
            assert!(((sum - op.trace()) / op.trace()).abs() < 1e-10);
        }
    }

    #[test]
    fn eigensolver_rejects_bad_shapes() {
        let mut d = vec![1.0, 2.0];
        assert!(symmetric_tridiagonal_eigenvalues(&mut d, &[1.0, 1.0]).is_err());
        let mut empty: Vec<f64> = vec![];
        assert!(symmetric_tridiagonal_eigenvalues(&mut empty, &[]).is_ok());
    }

    #[test]
    fn picket_fence_unfolds_to_unit_spacing() {
        let s = Spectrum::from_unsorted((0..200).map(|k| 3.0 + 0.25 * k as f64).collect()).unwrap();
        let st = unfold_spectrum(&s).unwrap();
        assert!(st.spacings.iter().all(|u| (u - 1.0).abs() < 5e-2));
        assert!((st.mean_spacing - 1.0).abs() < 1e-9);
    }

    #[test]
    fn triangular_spectrum_unfolds_rigidly() {
        let op = build_operator(500, None, false).unwrap();
        let st = unfold_spectrum(&eigenvalues(&op).unwrap()).unwrap();
        let m = st.mean_spacing;
        let var = st.spacings.iter().map(|s| (s - m).powi(2)).sum::<f64>() / st.spacings.len() as f64;
        // numpy polyfit (SVD least squares) on the same staircase: 0.29044064327858593.
        // The sqrt edge of the quadratic sequence near E = 0 is what a quintic cannot follow.
        assert!((var.sqrt() - 0.290_440_643_278_585_9).abs() < 1e-6, "std {}", var.sqrt());
        assert!((m - 1.0).abs() < 1e-9);
        // bulk of the distribution is still concentrated near 1
        let near_one = st.spacings.iter().filter(|s| (*s - 1.0).abs() < 0.3).count();
        assert!(near_one * 10 > st.spacings.len() * 8);
    }

    #[test]
    fn unfold_rejects_degenerate_input() {
        let s = Spectrum::from_unsorted(vec![1.0, 2.0]).unwrap();
        assert!(unfold_spectrum(&s).is_err());
        let s = Spectrum::from_unsorted(vec![1.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(matches!(unfold_spectrum(&s), Err(Error::DegenerateSpectrum { tiny: 2, total: 3 })));
    }

    #[test]
    fn wigner_surmise_examples() {
        assert_eq!(wigner_surmise_gue(0.0).unwrap(), 0.0);
        let peak = PI.sqrt() / 2.0;
        // mpmath: (32/pi^2)(pi/4)e^-1 = 0.93679730438910657
        assert!((wigner_surmise_gue(peak).unwrap() - 0.936_797_304_389_106_6).abs() < 1e-12);
        let total = trapezoid(|s| wigner_surmise_gue(s).unwrap(), 0.0, 6.0, 6000);
        assert!((total - 1.0).abs() < 1e-6);
        assert!(wigner_surmise_gue(-0.1).is_err());
    }

    #[test]
    fn gaussian_weight_diagnostic() {
        let op = build_operator(4, None, false).unwrap();
        let w = op.gaussian_weight(&LyapunovFunctionParams::default());
        assert_eq!(w.len(), 4);
        assert!(w.windows(2).all(|p| p[1] < p[0]));
        assert!((w[0] - 0.5 * (-PI2 * 0.25f64.powi(3) / 3.0).exp()).abs() < 1e-15);
    }
}
