//! Percentile bootstrap confidence intervals for metric-human correlations.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::ScoreMatrix;
use crate::correlate::{leveled_corr, CorrError, CorrKind, CorrLevel};

use super::seeding::{substream_rng, tag};
use super::{ResampleConfig, ResampleError};

/// A point estimate with a bootstrap percentile interval around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalResult {
    pub point: f64,
    pub low: f64,
    pub high: f64,
    /// Nominal coverage, `1 - alpha_level`.
    pub level: f64,
}

/// Bootstrap confidence interval for the correlation between `metric` and
/// `human` at the requested level.
///
/// Examples (matrix rows) are resampled with replacement; systems stay
/// fixed. Resamples whose correlation is undefined are dropped. Bounds use
/// the nearest-rank percentile of the remaining estimates and are widened,
/// if needed, to include the point estimate.
pub fn bootstrap_ci(
    metric: &ScoreMatrix,
    human: &ScoreMatrix,
    kind: CorrKind,
    level: CorrLevel,
    cfg: &ResampleConfig,
) -> Result<IntervalResult, ResampleError> {
    cfg.validate()?;
    if !metric.keys_match(human) {
        return Err(ResampleError::ShapeMismatch(
            "metric and human must share example ids and systems".into(),
        ));
    }
    let n = metric.n_examples();
    if n < 2 {
        return Err(ResampleError::InsufficientData(format!(
            "need at least 2 examples to resample, got {n}"
        )));
    }
    let point = leveled_corr(metric, human, kind, level)
        .map_err(to_resample)?
        .ok_or(ResampleError::Degenerate)?;

    let mut estimates: Vec<f64> = (0..cfg.resamples as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = substream_rng(cfg.seed, tag::INTERVAL, i);
            let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let rm = metric.select_rows(&indices);
            let rh = human.select_rows(&indices);
            leveled_corr(&rm, &rh, kind, level)
                .expect("resampled matrices stay aligned")
        })
        .collect();
    if estimates.is_empty() {
        return Err(ResampleError::InsufficientData(
            "every bootstrap resample had an undefined correlation".into(),
        ));
    }
    estimates.sort_by(|a, b| a.total_cmp(b));

    let low = percentile(&estimates, cfg.alpha_level / 2.0).min(point);
    let high = percentile(&estimates, 1.0 - cfg.alpha_level / 2.0).max(point);
    Ok(IntervalResult {
        point,
        low,
        high,
        level: 1.0 - cfg.alpha_level,
    })
}

/// Nearest-rank percentile of an ascending-sorted slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let k = sorted.len();
    let rank = (q * k as f64).ceil() as usize;
    sorted[rank.clamp(1, k) - 1]
}

fn to_resample(e: CorrError) -> ResampleError {
    ResampleError::ShapeMismatch(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(n: usize, m: usize, mut cell: impl FnMut(usize, usize) -> f64) -> ScoreMatrix {
        let ids = (0..n).map(|i| format!("e{i}")).collect();
        let systems = (0..m).map(|j| format!("s{j}")).collect();
        let mut values = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                values.push(cell(i, j));
            }
        }
        ScoreMatrix::new(ids, systems, values).unwrap()
    }

    fn cfg(seed: u64, resamples: usize) -> ResampleConfig {
        ResampleConfig {
            seed,
            resamples,
            ..ResampleConfig::default()
        }
    }

    #[test]
    fn perfectly_aligned_scores_pin_the_interval_at_one() {
        let human = matrix(25, 5, |i, j| i as f64 * 0.1 + j as f64);
        let res = bootstrap_ci(
            &human.clone(),
            &human,
            CorrKind::Pearson,
            CorrLevel::System,
            &cfg(3, 400),
        )
        .unwrap();
        assert!((res.point - 1.0).abs() < 1e-12);
        assert!((res.low - 1.0).abs() < 1e-9);
        assert!((res.high - 1.0).abs() < 1e-9);
        assert!((res.level - 0.95).abs() < 1e-12);
    }

    #[test]
    fn bounds_bracket_the_point_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let human = matrix(40, 6, |i, j| (i as f64 * 0.05) + (j as f64 * 0.2));
        let metric = matrix(40, 6, |i, j| human.get(i, j) + rng.gen_range(-0.6..0.6));
        for kind in CorrKind::ALL {
            for level in [CorrLevel::System, CorrLevel::Summary] {
                let res =
                    bootstrap_ci(&metric, &human, kind, level, &cfg(9, 200)).unwrap();
                assert!(
                    res.low <= res.point && res.point <= res.high,
                    "{kind} at {level}: {res:?}"
                );
            }
        }
    }

    #[test]
    fn interval_narrows_as_examples_accumulate() {
        let build = |n: usize| {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            let human = matrix(n, 6, |i, j| (i as f64 * 0.01) + (j as f64 * 0.15));
            let metric = matrix(n, 6, |i, j| human.get(i, j) + rng.gen_range(-0.5..0.5));
            bootstrap_ci(
                &metric,
                &human,
                CorrKind::Pearson,
                CorrLevel::System,
                &cfg(5, 400),
            )
            .unwrap()
        };
        let narrow = build(200);
        let wide = build(20);
        assert!(
            narrow.high - narrow.low < wide.high - wide.low,
            "expected {narrow:?} narrower than {wide:?}"
        );
    }

    #[test]
    fn coverage_matches_the_nominal_level() {
        // Population system means differ between metric and human, so the
        // estimand is the correlation of those fixed mean vectors.
        let human_means = [0.10, 0.30, 0.45, 0.60, 0.80, 0.90];
        let metric_means = [0.20, 0.25, 0.55, 0.50, 0.85, 0.95];
        let truth = crate::correlate::corr_coeff(
            &metric_means,
            &human_means,
            CorrKind::Pearson,
        )
        .unwrap()
        .unwrap();

        let sims = 500;
        let n = 60;
        let mut covered = 0;
        for sim in 0..sims {
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + sim);
            let human = matrix(n, 6, |_, j| human_means[j] + rng.gen_range(-0.3..0.3));
            let mut rng2 = ChaCha8Rng::seed_from_u64(90000 + sim);
            let metric = matrix(n, 6, |_, j| metric_means[j] + rng2.gen_range(-0.3..0.3));
            let res = bootstrap_ci(
                &metric,
                &human,
                CorrKind::Pearson,
                CorrLevel::System,
                &cfg(40 + sim, 300),
            )
            .unwrap();
            if res.low <= truth && truth <= res.high {
                covered += 1;
            }
        }
        let rate = covered as f64 / sims as f64;
        assert!(
            (0.90..=0.99).contains(&rate),
            "coverage {rate} misses the 0.95 target (truth {truth})"
        );
    }

    #[test]
    fn degenerate_point_estimate_is_an_error() {
        let human = matrix(10, 4, |_, _| 1.0);
        let metric = matrix(10, 4, |i, j| (i + j) as f64);
        let err = bootstrap_ci(
            &metric,
            &human,
            CorrKind::Pearson,
            CorrLevel::System,
            &cfg(1, 100),
        )
        .unwrap_err();
        assert!(matches!(err, ResampleError::Degenerate));
    }

    #[test]
    fn misaligned_inputs_are_rejected() {
        let a = matrix(10, 4, |i, j| (i + j) as f64);
        let b = matrix(10, 3, |i, j| (i + j) as f64);
        let err = bootstrap_ci(&a, &b, CorrKind::Pearson, CorrLevel::System, &cfg(1, 50))
            .unwrap_err();
        assert!(matches!(err, ResampleError::ShapeMismatch(_)));
    }

    #[test]
    fn interval_is_reproducible_across_thread_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let human = matrix(35, 5, |i, j| (i as f64).cos() + j as f64 * 0.4);
        let metric = matrix(35, 5, |i, j| human.get(i, j) + rng.gen_range(-0.3..0.3));
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                bootstrap_ci(
                    &metric,
                    &human,
                    CorrKind::Kendall,
                    CorrLevel::Summary,
                    &cfg(13, 250),
                )
                .unwrap()
            })
        };
        assert_eq!(run(1), run(3));
    }
}
