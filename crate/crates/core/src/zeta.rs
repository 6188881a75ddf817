//! Zeta-zero ordinate tables: ingestion, normalized spacings, empirical
//! pair correlation against the Montgomery kernel, the zero-density law,
//! and per-iteration error tables.

use std::f64::consts::PI;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::montgomery_kernel;
use crate::error::{Error, Result};
use crate::numerics::parse_decimal;

/// How a gap between ordinates is scaled by the local zero density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// Density factor `ln(gamma)`.
    #[default]
    Paper,
    /// Density factor `ln(gamma / 2pi)`; unit mean spacing asymptotically.
    Standard,
}

impl Convention {
    /// Local density factor `d` such that a gap `g` normalizes to `g d / 2pi`.
    pub fn density_factor(self, gamma: f64) -> f64 {
        match self {
            Convention::Paper => gamma.ln(),
            Convention::Standard => (gamma / (2.0 * PI)).ln(),
        }
    }

    fn checked_density_factor(self, gamma: f64) -> Result<f64> {
        let d = self.density_factor(gamma);
        if d > 0.0 && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::InvalidData(format!(
                "ordinate {gamma} has non-positive density under the {self} convention"
            )))
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Paper => "paper",
            Convention::Standard => "standard",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Convention::Paper),
            "standard" => Ok(Convention::Standard),
            other => Err(Error::InvalidArgument(format!("unknown convention '{other}'"))),
        }
    }
}

/// Strictly increasing positive ordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    pub gammas: Vec<f64>,
    pub source: String,
}

impl ZeroTable {
    pub fn new(gammas: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::EmptyTable);
        }
        if let Some(i) = gammas.iter().position(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::InvalidData(format!("ordinate {} at index {i} is not positive", gammas[i])));
        }
        if let Some(i) = gammas.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Monotonicity { index: i + 1 });
        }
        Ok(Self { gammas, source: source.into() })
    }

    /// Builds a synthetic table starting at `start` whose consecutive gaps
    /// normalize (under `convention`) to `gaps`.
    pub fn from_normalized_gaps(start: f64, gaps: &[f64], convention: Convention) -> Result<Self> {
        let mut gammas = Vec::with_capacity(gaps.len() + 1);
        let mut g = start;
        gammas.push(g);
        for &u in gaps {
            g += u * 2.0 * PI / convention.checked_density_factor(g)?;
            gammas.push(g);
        }
        Self::new(gammas, format!("synthetic ({convention})"))
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
}

/// Reads one ordinate per line. Blank lines and lines whose first
/// non-blank character is `#` are skipped.
pub fn load_zeros<R: BufRead>(reader: R, source: &str) -> Result<ZeroTable> {
    let values = read_values(reader)?;
    if values.is_empty() {
        return Err(Error::EmptyTable);
    }
    for (i, &(line, v)) in values.iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::Parse { line, message: format!("ordinate {v} is not positive") });
        }
        if i > 0 && v <= values[i - 1].1 {
            return Err(Error::Monotonicity { index: i });
        }
    }
    ZeroTable::new(values.into_iter().map(|(_, v)| v).collect(), source)
}

/// Reads one decimal per line with the same comment rules as
/// [`load_zeros`], returning `(line_number, value)` pairs.
pub fn read_values<R: BufRead>(reader: R) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let v = parse_decimal(trimmed).ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("not a decimal: '{trimmed}'"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse { line: i + 1, message: format!("value out of range: '{trimmed}'") });
        }
        out.push((i + 1, v));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacingEnsemble {
    pub spacings: Vec<f64>,
    pub convention: Convention,
}

impl SpacingEnsemble {
    pub fn mean(&self) -> f64 {
        self.spacings.iter().sum::<f64>() / self.spacings.len() as f64
    }
}

/// `u_n = (gamma_{n+1} - gamma_n) d(gamma_n) / 2pi`.
pub fn normalized_spacings(z: &ZeroTable, convention: Convention) -> Result<SpacingEnsemble> {
    if z.len() < 2 {
        return Err(Error::TooFewZeros { found: z.len() });
    }
    let spacings = z
        .gammas
        .windows(2)
        .map(|w| Ok((w[1] - w[0]) * convention.checked_density_factor(w[0])? / (2.0 * PI)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpacingEnsemble { spacings, convention })
}

/// Binned pair-correlation density of normalized pair separations.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCorrelation {
    pub bin_centers: Vec<f64>,
    pub empirical: Vec<f64>,
    /// Montgomery kernel at the bin centers.
    pub model: Vec<f64>,
    pub counts: Vec<u64>,
    pub bin_width: f64,
    pub n_zeros: usize,
}

impl PairCorrelation {
    /// Pairs with separation in `(0, max_u]`.
    pub fn pair_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// The bins whose centers lie in `[lo, hi]`.
    pub fn restricted(&self, lo: f64, hi: f64) -> PairCorrelation {
        let keep: Vec<usize> = (0..self.bin_centers.len())
            .filter(|&i| self.bin_centers[i] >= lo && self.bin_centers[i] <= hi)
            .collect();
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        PairCorrelation {
            bin_centers: pick(&self.bin_centers),
            empirical: pick(&self.empirical),
            model: pick(&self.model),
            counts: keep.iter().map(|&i| self.counts[i]).collect(),
            bin_width: self.bin_width,
            n_zeros: self.n_zeros,
        }
    }
}

/// Counts every pair `i < j` by `u_ij = (gamma_j - gamma_i) d(gamma_i) / 2pi`
/// into uniform bins over `(0, max_u]`, normalized by `N * bin_width`.
pub fn pair_correlation_empirical(
    z: &ZeroTable,
    max_u: f64,
    bins: usize,
    convention: Convention,
) -> Result<PairCorrelation> {
    if !(max_u > 0.0 && max_u.is_finite()) {
        return Err(Error::InvalidArgument(format!("max_u must be positive, got {max_u}")));
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("pair correlation needs at least one bin".into()));
    }
    let n = z.len();
    if n < 2 {
        return Err(Error::TooFewZeros { found: n });
    }
    let densities = z
        .gammas
        .iter()
        .map(|&g| convention.checked_density_factor(g))
        .collect::<Result<Vec<_>>>()?;
    let width = max_u / bins as f64;
    let g = &z.gammas;

    // integer counts merge associatively, so the result is independent of scheduling
    let counts = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; bins],
            |mut acc, i| {
                let scale = densities[i] / (2.0 * PI);
                for j in i + 1..n {
                    let u = (g[j] - g[i]) * scale;
                    if u > max_u {
                        break;
                    }
                    let idx = ((u / width).ceil() as usize).clamp(1, bins) - 1;
                    acc[idx] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let bin_centers: Vec<f64> = (0..bins).map(|b| (b as f64 + 0.5) * width).collect();
    let norm = n as f64 * width;
    let empirical = counts.iter().map(|&c| c as f64 / norm).collect();
    let model = bin_centers.iter().map(|&u| montgomery_kernel(u)).collect();
    Ok(PairCorrelation { bin_centers, empirical, model, counts, bin_width: width, n_zeros: n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelDeviation {
    pub max_abs_dev: f64,
    pub mean_sq_dev: f64,
}

/// Deviation of the empirical pair correlation from the kernel over all bins.
pub fn compare_model(pc: &PairCorrelation) -> Result<ModelDeviation> {
    if pc.empirical.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (max_abs_dev, sum_sq) = pc
        .empirical
        .iter()
        .zip(&pc.model)
        .map(|(e, m)| e - m)
        .fold((0.0f64, 0.0), |(mx, sq), d| (mx.max(d.abs()), sq + d * d));
    Ok(ModelDeviation { max_abs_dev, mean_sq_dev: sum_sq / pc.empirical.len() as f64 })
}

/// Smoothed zero density `ln(E) / 2pi`.
pub fn zero_density(e: f64) -> Result<f64> {
    if !(e > 1.0) || !e.is_finite() {
        return Err(Error::Domain { op: "zero_density", value: e });
    }
    Ok(e.ln() / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    /// 1-based.
    pub index: usize,
    pub a: f64,
    pub b: f64,
    pub signed_error: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
    pub max_abs_error: f64,
}

/// Row-wise `a - b` and `|a - b|`.
pub fn error_table(a: &[f64], b: &[f64]) -> Result<ErrorTable> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let rows: Vec<ErrorRow> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&a, &b))| {
            let signed_error = a - b;
            ErrorRow { index: i + 1, a, b, signed_error, abs_error: signed_error.abs() }
        })
        .collect();
    let max_abs_error = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    Ok(ErrorTable { rows, max_abs_error })
}

/// `(k + 1) / k` for `k = 1..=n`.
pub fn harmonic_reference(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("harmonic reference needs n >= 1".into()));
    }
    Ok((1..=n).map(|k| (k + 1) as f64 / k as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Result<ZeroTable> {
        load_zeros(s.as_bytes(), "test")
    }

    #[test]
    fn load_examples() {
        assert_eq!(load("14.134725\n21.022040\n").unwrap().len(), 2);
        assert_eq!(load("# c\n\n1.0\n2.0\n").unwrap().gammas, vec![1.0, 2.0]);
        assert_eq!(load("  3.5e1  \n\t# indented comment\n4e1").unwrap().gammas, vec![35.0, 40.0]);
        assert!(matches!(load("2.0\n1.0\n"), Err(Error::Monotonicity { index: 1 })));
        assert!(matches!(load("1.0\n1.0\n"), Err(Error::Monotonicity { index: 1 })));
    }

    #[test]
    fn load_errors() {
        assert!(matches!(load("1.0\nabc\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(load("1.0 # trailing\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("inf\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("1e400\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("-3.0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("# only comments\n\n"), Err(Error::EmptyTable)));
        assert!(matches!(load(""), Err(Error::EmptyTable)));
    }

    #[test]
    fn spacing_examples() {
        let z = load("14.134725\n21.022040\n").unwrap();
        let p = normalized_spacings(&z, Convention::Paper).unwrap();
        // mpmath: 2.9033013472
        assert!((p.spacings[0] - 2.903_301_347_2).abs() < 1e-9);
        let s = normalized_spacings(&z, Convention::Standard).unwrap();
        // mpmath: 0.8887119839
        assert!((s.spacings[0] - 0.888_711_983_9).abs() < 1e-9);
        assert!((s.spacings[0] - 0.8881).abs() < 1e-3);

        let a: f64 = 100.0;
        let z = ZeroTable::new(vec![a, a + 2.0 * PI / a.ln()], "unit").unwrap();
        let p = normalized_spacings(&z, Convention::Paper).unwrap();
        assert!((p.spacings[0] - 1.0).abs() < 1e-12);

        let one = ZeroTable::new(vec![14.0], "one").unwrap();
        assert!(matches!(normalized_spacings(&one, Convention::Paper), Err(Error::TooFewZeros { found: 1 })));
    }

    #[test]
    fn standard_convention_rejects_small_ordinates() {
        let z = ZeroTable::new(vec![1.0, 2.0], "small").unwrap();
        assert!(matches!(normalized_spacings(&z, Convention::Standard), Err(Error::InvalidData(_))));
    }

    #[test]
    fn synthetic_unit_gaps() {
        for conv in [Convention::Paper, Convention::Standard] {
            let z = ZeroTable::from_normalized_gaps(1000.0, &vec![1.0; 50], conv).unwrap();
            let s = normalized_spacings(&z, conv).unwrap();
            assert!(s.spacings.iter().all(|u| (u - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn pair_correlation_two_zeros() {
        let z = ZeroTable::new(vec![100.0, 101.0], "two").unwrap();
        let pc = pair_correlation_empirical(&z, 2.0, 4, Convention::Paper).unwrap();
        let nonzero: Vec<f64> = pc.empirical.iter().copied().filter(|&e| e > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((nonzero[0] - 1.0 / (2.0 * pc.bin_width)).abs() < 1e-12);
        assert_eq!(pc.pair_count(), 1);
    }

    #[test]
    fn pair_correlation_picket_fence() {
        let z = ZeroTable::from_normalized_gaps(1e6, &vec![1.0; 200], Convention::Standard).unwrap();
        let pc = pair_correlation_empirical(&z, 2.5, 5, Convention::Standard).unwrap();
        // bins (0,.5] (.5,1] (1,1.5] (1.5,2] (2,2.5]; u = 1 and u = 2 sit on edges
        for (b, &c) in pc.counts.iter().enumerate() {
            let lo = b as f64 * 0.5;
            let hi = lo + 0.5;
            let touches = (lo..=hi).contains(&1.0) || (lo..=hi).contains(&2.0);
            assert!(touches || c == 0, "bin {b} has {c} counts");
        }
        // nearest and next-nearest neighbours of every zero
        assert_eq!(pc.pair_count(), 200 + 199);
        assert!(pc.model.iter().zip(&pc.bin_centers).all(|(&m, &u)| m == montgomery_kernel(u)));
    }

    #[test]
    fn pair_correlation_validation() {
        let z = ZeroTable::new(vec![100.0, 101.0], "two").unwrap();
        assert!(pair_correlation_empirical(&z, 0.0, 4, Convention::Paper).is_err());
        assert!(pair_correlation_empirical(&z, 1.0, 0, Convention::Paper).is_err());
        let one = ZeroTable::new(vec![100.0], "one").unwrap();
        assert!(matches!(
            pair_correlation_empirical(&one, 1.0, 4, Convention::Paper),
            Err(Error::TooFewZeros { .. })
        ));
    }

    #[test]
    fn compare_model_examples() {
        let pc = PairCorrelation {
            bin_centers: vec![0.5, 1.5],
            empirical: vec![0.3, 0.9],
            model: vec![0.3, 0.9],
            counts: vec![3, 9],
            bin_width: 1.0,
            n_zeros: 10,
        };
        let d = compare_model(&pc).unwrap();
        assert_eq!((d.max_abs_dev, d.mean_sq_dev), (0.0, 0.0));

        let shifted = PairCorrelation { empirical: vec![0.4, 1.0], ..pc.clone() };
        let d = compare_model(&shifted).unwrap();
        assert!((d.max_abs_dev - 0.1).abs() < 1e-12);
        assert!((d.mean_sq_dev - 0.01).abs() < 1e-12);

        let empty = pc.restricted(5.0, 6.0);
        assert!(compare_model(&empty).is_err());
        assert_eq!(pc.restricted(1.0, 2.0).bin_centers, vec![1.5]);
    }

    #[test]
    fn density_examples() {
        assert!((zero_density(std::f64::consts::E).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let e2 = std::f64::consts::E.powi(2);
        assert!((zero_density(e2).unwrap() - 2.0 / (2.0 * PI)).abs() < 1e-15);
        // mpmath: 0.42154327880109998751
        assert!((zero_density(14.134725).unwrap() - 0.421_543_278_801_1).abs() < 1e-12);
        assert!(zero_density(1.0).is_err());
        assert!(zero_density(0.5).is_err());
    }

    #[test]
    fn error_table_examples() {
        let t = error_table(&[0.5], &[2.0]).unwrap();
        assert_eq!(t.rows[0].signed_error, -1.5);
        assert_eq!(t.rows[0].abs_error, 1.5);
        assert_eq!(t.max_abs_error, 1.5);

        let a = [1.0, -2.0, 3.5];
        let t = error_table(&a, &a).unwrap();
        assert!(t.rows.iter().all(|r| r.signed_error == 0.0 && r.abs_error == 0.0));
        assert_eq!(t.max_abs_error, 0.0);

        let t = error_table(&[5.0e-13], &[2.0e12]).unwrap();
        assert!(((t.rows[0].signed_error + 2.0e12) / 2.0e12).abs() < 1e-15);

        assert!(matches!(error_table(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
        assert!(error_table(&[], &[]).is_err());
    }

    #[test]
    fn harmonic_examples() {
        let r = harmonic_reference(4).unwrap();
        assert_eq!(r[..2], [2.0, 1.5]);
        assert!((r[2] - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(r[3], 1.25);
        let r = harmonic_reference(30).unwrap();
        assert!((r[29] - 31.0 / 30.0).abs() < 1e-15);
        assert!(r.windows(2).all(|w| w[1] < w[0] && w[1] > 1.0));
        assert!(harmonic_reference(0).is_err());
    }
}
