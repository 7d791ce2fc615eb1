//! Permutation significance test for the difference between two metrics'
//! correlations with human judgments.

use rand::Rng;
use rayon::prelude::*;

use crate::corpus::ScoreMatrix;
use crate::correlate::{leveled_corr, CorrError, CorrKind, CorrLevel};

use super::seeding::{substream_rng, tag};
use super::{ResampleConfig, ResampleError};

/// Two-sided p-value for the null hypothesis that `metric_x` and `metric_y`
/// correlate equally well with `human` at the requested level.
///
/// The null treats the two metrics as exchangeable, so each resample swaps
/// the per-cell scores between them independently with probability one half
/// and recomputes the correlation difference. A permuted difference that is
/// undefined (a degenerate permuted matrix) counts as at least as extreme as
/// the observed one. The observed difference itself must be defined.
pub fn permutation_metric_test(
    metric_x: &ScoreMatrix,
    metric_y: &ScoreMatrix,
    human: &ScoreMatrix,
    kind: CorrKind,
    level: CorrLevel,
    cfg: &ResampleConfig,
) -> Result<f64, ResampleError> {
    cfg.validate()?;
    if !metric_x.keys_match(metric_y) || !metric_x.keys_match(human) {
        return Err(ResampleError::ShapeMismatch(
            "metric_x, metric_y, and human must share example ids and systems".into(),
        ));
    }
    let rx = leveled_corr(metric_x, human, kind, level).map_err(to_resample)?;
    let ry = leveled_corr(metric_y, human, kind, level).map_err(to_resample)?;
    let observed = match (rx, ry) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => return Err(ResampleError::Degenerate),
    };

    let n = metric_x.n_examples();
    let m = metric_x.n_systems();
    let extreme: u64 = (0..cfg.resamples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream_rng(cfg.seed, tag::PERMUTATION, i);
            let mut vx = Vec::with_capacity(n * m);
            let mut vy = Vec::with_capacity(n * m);
            for row in 0..n {
                for col in 0..m {
                    let a = metric_x.get(row, col);
                    let b = metric_y.get(row, col);
                    if rng.gen::<bool>() {
                        vx.push(b);
                        vy.push(a);
                    } else {
                        vx.push(a);
                        vy.push(b);
                    }
                }
            }
            let px = rebuild(metric_x, vx);
            let py = rebuild(metric_y, vy);
            let dx = leveled_corr(&px, human, kind, level)
                .expect("permuted matrices stay aligned with human");
            let dy = leveled_corr(&py, human, kind, level)
                .expect("permuted matrices stay aligned with human");
            match (dx, dy) {
                (Some(a), Some(b)) => u64::from((a - b).abs() >= observed),
                _ => 1,
            }
        })
        .sum();
    Ok(extreme as f64 / cfg.resamples as f64)
}

fn rebuild(template: &ScoreMatrix, values: Vec<f64>) -> ScoreMatrix {
    ScoreMatrix::new(
        template.example_ids().to_vec(),
        template.systems().to_vec(),
        values,
    )
    .expect("permutation preserves matrix shape")
}

fn to_resample(e: CorrError) -> ResampleError {
    ResampleError::ShapeMismatch(e.to_string())
}
