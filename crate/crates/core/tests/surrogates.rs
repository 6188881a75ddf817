//! Monte Carlo oracles: Poisson (exponential-gap) surrogate zero tables.

use montgomery_lab::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

fn poisson_table(n: usize, seed: u64) -> ZeroTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaps: Vec<f64> = (0..n - 1).map(|_| Exp1.sample(&mut rng)).collect();
    ZeroTable::from_normalized_gaps(1e6, &gaps, Convention::Standard).unwrap()
}

#[test]
fn poisson_surrogate_has_flat_pair_correlation() {
    let z = poisson_table(10_000, 7);
    let pc = pair_correlation_empirical(&z, 2.5, 25, Convention::Standard).unwrap();
    let window = pc.restricted(0.5, 2.5);
    assert!(!window.empirical.is_empty());
    let worst = window.empirical.iter().map(|e| (e - 1.0).abs()).fold(0.0, f64::max);
    assert!(worst < 0.1, "max deviation from 1: {worst}");
}

#[test]
fn poisson_surrogate_misses_level_repulsion() {
    let z = poisson_table(10_000, 11);
    let pc = pair_correlation_empirical(&z, 1.0, 10, Convention::Standard).unwrap();
    let d = compare_model(&pc).unwrap();
    // flat 1 against a kernel that starts at 0 near u = 0
    assert!(d.max_abs_dev > 0.3, "{d:?}");
}

#[test]
fn poisson_surrogate_spacings_have_unit_mean() {
    let z = poisson_table(10_000, 3);
    let s = normalized_spacings(&z, Convention::Standard).unwrap();
    assert!((s.mean() - 1.0).abs() < 0.05);
}

#[test]
fn pair_correlation_is_deterministic_across_runs() {
    let z = poisson_table(5_000, 5);
    let a = pair_correlation_empirical(&z, 3.0, 40, Convention::Paper).unwrap();
    let b = pair_correlation_empirical(&z, 3.0, 40, Convention::Paper).unwrap();
    assert_eq!(a, b);
}

/// Eigenphases of Haar-random unitaries have the sine-kernel pair
/// correlation exactly, so they stand in for zeta zeros.
fn cue_table(dim: usize, matrices: usize, seed: u64) -> ZeroTable {
    use nalgebra::{Complex, DMatrix};
    use rand_distr::StandardNormal;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaps = Vec::new();
    for _ in 0..matrices {
        let g: DMatrix<Complex<f64>> = DMatrix::from_fn(dim, dim, |_, _| {
            Complex::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let (q, r) = g.qr().unpack();
        // q * diag(r_jj / |r_jj|) is Haar distributed
        let mut u = q;
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = d / Complex::new(d.norm(), 0.0);
            for i in 0..dim {
                u[(i, j)] *= phase;
            }
        }
        let eig = u.schur().eigenvalues().expect("triangular Schur form");
        let mut angles: Vec<f64> = eig.iter().map(|z| z.im.atan2(z.re)).collect();
        angles.sort_by(f64::total_cmp);
        let scale = dim as f64 / (2.0 * std::f64::consts::PI);
        for w in angles.windows(2) {
            gaps.push((w[1] - w[0]) * scale);
        }
        gaps.push((angles[0] + 2.0 * std::f64::consts::PI - angles[dim - 1]) * scale);
    }
    ZeroTable::from_normalized_gaps(1e6, &gaps, Convention::Standard).unwrap()
}

#[test]
fn cue_surrogate_matches_kernel_under_acceptance_thresholds() {
    let z = cue_table(100, 100, 1);
    let pc = pair_correlation_empirical(&z, 3.0, 40, Convention::Standard).unwrap();
    let d = compare_model(&pc.restricted(0.5, 2.5)).unwrap();
    let mean = normalized_spacings(&z, Convention::Standard).unwrap().mean();
    assert!(d.mean_sq_dev < 0.01 && d.max_abs_dev < 0.15, "{d:?}");
    assert!((0.97..=1.03).contains(&mean), "{mean}");
}
