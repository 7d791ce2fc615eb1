//! Correlation machinery: coefficient implementations, the two aggregation
//! levels used for meta-evaluation, and bucketed pairwise system comparison.
//!
//! Summary level averages per-example correlations across systems; system
//! level correlates the per-system mean scores. Both operate on aligned
//! [`ScoreMatrix`] pairs (metric scores vs human scores).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ScoreMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum CorrError {
    #[error("vectors have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("matrices are not aligned: {0}")]
    ShapeMismatch(String),
    #[error("every row has zero variance on at least one side")]
    AllRowsDegenerate,
    #[error("correlation undefined: zero variance")]
    Degenerate,
    #[error("cannot split {pairs} system pairs into {requested} buckets")]
    TooManyBuckets { pairs: usize, requested: usize },
    #[error("bucket contains no system pairs")]
    EmptyBucket,
    #[error("system '{0}' is not a column of both matrices")]
    UnknownSystem(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrKind {
    Pearson,
    Spearman,
    Kendall,
}

impl CorrKind {
    pub const ALL: [CorrKind; 3] = [CorrKind::Pearson, CorrKind::Spearman, CorrKind::Kendall];
}

impl std::fmt::Display for CorrKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorrKind::Pearson => "pearson",
            CorrKind::Spearman => "spearman",
            CorrKind::Kendall => "kendall",
        })
    }
}

impl std::str::FromStr for CorrKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pearson" => Ok(CorrKind::Pearson),
            "spearman" => Ok(CorrKind::Spearman),
            "kendall" => Ok(CorrKind::Kendall),
            other => Err(format!(
                "unknown correlation kind '{other}' (expected pearson, spearman, or kendall)"
            )),
        }
    }
}

/// Correlation coefficient of the requested kind. `Ok(None)` marks the
/// degenerate case where either vector has zero variance (including vectors
/// shorter than two elements); Kendall is the tie-adjusted tau-b.
pub fn corr_coeff(x: &[f64], y: &[f64], kind: CorrKind) -> Result<Option<f64>, CorrError> {
    if x.len() != y.len() {
        return Err(CorrError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(match kind {
        CorrKind::Pearson => pearson(x, y),
        CorrKind::Spearman => pearson(&ranks(x), &ranks(y)),
        CorrKind::Kendall => kendall_b(x, y),
    })
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
    }
}

/// 1-based ranks with ties assigned the mean of the ranks they occupy.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = shared;
        }
        i = j + 1;
    }
    out
}

fn kendall_b(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut concordant, mut discordant) = (0u64, 0u64);
    let (mut ties_x, mut ties_y) = (0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let tx = x[i] == x[j];
            let ty = y[i] == y[j];
            if tx {
                ties_x += 1;
            }
            if ty {
                ties_y += 1;
            }
            if !tx && !ty {
                if ((x[i] < x[j]) && (y[i] < y[j])) || ((x[i] > x[j]) && (y[i] > y[j])) {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as u64;
    let denom = ((n0 - ties_x) as f64 * (n0 - ties_y) as f64).sqrt();
    if denom == 0.0 {
        None
    } else {
        Some(((concordant as f64 - discordant as f64) / denom).clamp(-1.0, 1.0))
    }
}

/// Mean of per-example correlations, plus how many zero-variance rows were
/// left out of that mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryCorr {
    pub value: f64,
    pub skipped_rows: usize,
}

/// Average of the per-row coefficients between two aligned matrices. Rows
/// where either side is degenerate are skipped and counted.
pub fn summary_level(
    x: &ScoreMatrix,
    y: &ScoreMatrix,
    kind: CorrKind,
) -> Result<SummaryCorr, CorrError> {
    check_aligned(x, y)?;
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for (rx, ry) in x.rows().zip(y.rows()) {
        match corr_coeff(rx, ry, kind)? {
            Some(v) => {
                sum += v;
                used += 1;
            }
            None => skipped += 1,
        }
    }
    if used == 0 {
        return Err(CorrError::AllRowsDegenerate);
    }
    Ok(SummaryCorr {
        value: sum / used as f64,
        skipped_rows: skipped,
    })
}

/// Coefficient between the per-system mean score vectors.
pub fn system_level(x: &ScoreMatrix, y: &ScoreMatrix, kind: CorrKind) -> Result<f64, CorrError> {
    check_aligned(x, y)?;
    corr_coeff(&x.column_means(), &y.column_means(), kind)?.ok_or(CorrError::Degenerate)
}

/// Which aggregation a correlation runs at: per-example rows averaged
/// (summary) or per-system column means (system).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrLevel {
    System,
    Summary,
}

impl std::fmt::Display for CorrLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorrLevel::System => "sys",
            CorrLevel::Summary => "sum",
        })
    }
}

impl std::str::FromStr for CorrLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sys" | "system" => Ok(CorrLevel::System),
            "sum" | "summary" => Ok(CorrLevel::Summary),
            other => Err(format!("unknown correlation level '{other}' (expected sys or sum)")),
        }
    }
}

/// Correlation at the requested level with degeneracy folded into `None`,
/// for callers that treat an undefined statistic as data rather than error.
pub fn leveled_corr(
    x: &ScoreMatrix,
    y: &ScoreMatrix,
    kind: CorrKind,
    level: CorrLevel,
) -> Result<Option<f64>, CorrError> {
    match level {
        CorrLevel::System => match system_level(x, y, kind) {
            Ok(v) => Ok(Some(v)),
            Err(CorrError::Degenerate) => Ok(None),
            Err(e) => Err(e),
        },
        CorrLevel::Summary => match summary_level(x, y, kind) {
            Ok(s) => Ok(Some(s.value)),
            Err(CorrError::AllRowsDegenerate) => Ok(None),
            Err(e) => Err(e),
        },
    }
}

fn check_aligned(x: &ScoreMatrix, y: &ScoreMatrix) -> Result<(), CorrError> {
    if !x.keys_match(y) {
        return Err(CorrError::ShapeMismatch(format!(
            "{}x{} vs {}x{} with matching keys required",
            x.n_examples(),
            x.n_systems(),
            y.n_examples(),
            y.n_systems()
        )));
    }
    Ok(())
}

/// A contiguous band of system pairs with similar quality gaps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemPairBucket {
    /// 1-based, ordered from smallest score differences to largest.
    pub bucket_index: usize,
    pub pairs: Vec<(String, String)>,
    /// Smallest and largest absolute score difference inside the bucket.
    pub effect_range: (f64, f64),
}

/// Sorts all unordered system pairs by the absolute difference of their
/// scores and splits them into `k` contiguous buckets. When the pair count
/// is not divisible by `k`, the extra pairs go to the largest-difference
/// buckets.
pub fn make_buckets(
    system_scores: &[(String, f64)],
    k: usize,
) -> Result<Vec<SystemPairBucket>, CorrError> {
    let m = system_scores.len();
    let total = m * m.saturating_sub(1) / 2;
    if k == 0 || k > total {
        return Err(CorrError::TooManyBuckets {
            pairs: total,
            requested: k,
        });
    }
    let mut pairs: Vec<(f64, &str, &str)> = Vec::with_capacity(total);
    for i in 0..m {
        for j in i + 1..m {
            let (a, sa) = &system_scores[i];
            let (b, sb) = &system_scores[j];
            pairs.push(((sa - sb).abs(), a, b));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then_with(|| (p.1, p.2).cmp(&(q.1, q.2))));

    let base = total / k;
    let remainder = total % k;
    let mut buckets = Vec::with_capacity(k);
    let mut start = 0;
    for b in 0..k {
        let size = base + usize::from(b >= k - remainder);
        let slice = &pairs[start..start + size];
        buckets.push(SystemPairBucket {
            bucket_index: b + 1,
            pairs: slice
                .iter()
                .map(|(_, a, b)| (a.to_string(), b.to_string()))
                .collect(),
            effect_range: (slice[0].0, slice[size - 1].0),
        });
        start += size;
    }
    Ok(buckets)
}

/// Sign-agreement correlation over one bucket's pairs, on system-level mean
/// scores: (concordant - discordant) / pairs. A pair agrees when the metric
/// difference and the human difference share a sign, or both are exactly
/// zero; a tie on one side only counts as disagreement.
pub fn pairwise_bucket_corr(
    metric: &ScoreMatrix,
    human: &ScoreMatrix,
    bucket: &SystemPairBucket,
) -> Result<f64, CorrError> {
    if bucket.pairs.is_empty() {
        return Err(CorrError::EmptyBucket);
    }
    let metric_means = metric.column_means();
    let human_means = human.column_means();
    let lookup = |matrix: &ScoreMatrix, name: &str| {
        matrix
            .system_index(name)
            .ok_or_else(|| CorrError::UnknownSystem(name.to_string()))
    };
    let mut net = 0i64;
    for (a, b) in &bucket.pairs {
        let dm = metric_means[lookup(metric, a)?] - metric_means[lookup(metric, b)?];
        let dh = human_means[lookup(human, a)?] - human_means[lookup(human, b)?];
        let concordant = (dm == 0.0 && dh == 0.0)
            || (dm != 0.0 && dh != 0.0 && (dm > 0.0) == (dh > 0.0));
        net += if concordant { 1 } else { -1 };
    }
    Ok(net as f64 / bucket.pairs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(ids: &[&str], systems: &[&str], values: &[f64]) -> ScoreMatrix {
        ScoreMatrix::new(
            ids.iter().map(|s| s.to_string()).collect(),
            systems.iter().map(|s| s.to_string()).collect(),
            values.to_vec(),
        )
        .unwrap()
    }

    /// Textbook covariance-quotient Pearson, written independently of the
    /// production single-pass accumulation.
    fn oracle_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
        let n = x.len() as f64;
        let mx: f64 = x.iter().sum::<f64>() / n;
        let my: f64 = y.iter().sum::<f64>() / n;
        let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        if vx == 0.0 || vy == 0.0 {
            None
        } else {
            Some(cov / (vx.sqrt() * vy.sqrt()))
        }
    }

    /// Tau-b via explicit tie-group counting, the n1/n2 textbook form.
    fn oracle_kendall(x: &[f64], y: &[f64]) -> Option<f64> {
        let n = x.len();
        let tie_pairs = |v: &[f64]| -> u64 {
            let mut sorted = v.to_vec();
            sorted.sort_by(f64::total_cmp);
            let mut pairs = 0u64;
            let mut i = 0;
            while i < sorted.len() {
                let mut t = 1u64;
                while i + (t as usize) < sorted.len() && sorted[i + t as usize] == sorted[i] {
                    t += 1;
                }
                pairs += t * (t - 1) / 2;
                i += t as usize;
            }
            pairs
        };
        let mut net = 0i64;
        for i in 0..n {
            for j in i + 1..n {
                let dx = x[i] - x[j];
                let dy = y[i] - y[j];
                if dx != 0.0 && dy != 0.0 {
                    net += if (dx > 0.0) == (dy > 0.0) { 1 } else { -1 };
                }
            }
        }
        let n0 = (n * (n - 1) / 2) as u64;
        let (n1, n2) = (tie_pairs(x), tie_pairs(y));
        let denom = (((n0 - n1) * (n0 - n2)) as f64).sqrt();
        if denom == 0.0 {
            None
        } else {
            Some(net as f64 / denom)
        }
    }

    #[test]
    fn perfect_and_reversed_orderings() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(corr_coeff(&x, &x, CorrKind::Kendall).unwrap(), Some(1.0));
        assert_eq!(
            corr_coeff(&x, &[3.0, 2.0, 1.0], CorrKind::Pearson).unwrap(),
            Some(-1.0)
        );
    }

    #[test]
    fn kendall_single_discordant_pair() {
        let tau = corr_coeff(
            &[1.0, 2.0, 3.0, 4.0],
            &[1.0, 3.0, 2.0, 4.0],
            CorrKind::Kendall,
        )
        .unwrap()
        .unwrap();
        assert!((tau - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn kendall_tie_adjustment() {
        // One tied pair in x: tau-b = (2-0)/sqrt((3-1)(3-0)).
        let tau = corr_coeff(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0], CorrKind::Kendall)
            .unwrap()
            .unwrap();
        assert!((tau - 2.0 / 6.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spearman_averages_tied_ranks() {
        // x ranks: [1, 2.5, 2.5, 4]; y ranks: [1,2,3,4].
        let got = corr_coeff(
            &[1.0, 2.0, 2.0, 3.0],
            &[10.0, 20.0, 30.0, 40.0],
            CorrKind::Spearman,
        )
        .unwrap()
        .unwrap();
        let want = oracle_pearson(&[1.0, 2.5, 2.5, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_is_undefined_not_a_number() {
        for kind in CorrKind::ALL {
            assert_eq!(
                corr_coeff(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0], kind).unwrap(),
                None,
                "{kind}"
            );
        }
        assert_eq!(
            corr_coeff(&[1.0], &[2.0], CorrKind::Pearson).unwrap(),
            None
        );
        assert!(matches!(
            corr_coeff(&[1.0, 2.0], &[1.0], CorrKind::Pearson),
            Err(CorrError::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn summary_level_skips_constant_rows() {
        let x = matrix(
            &["e1", "e2"],
            &["A", "B", "C"],
            &[1.0, 1.0, 1.0, 1.0, 2.0, 3.0],
        );
        let y = matrix(
            &["e1", "e2"],
            &["A", "B", "C"],
            &[5.0, 6.0, 7.0, 2.0, 4.0, 6.0],
        );
        let got = summary_level(&x, &y, CorrKind::Pearson).unwrap();
        assert_eq!(got.skipped_rows, 1);
        assert!((got.value - 1.0).abs() < 1e-12);

        let constant = matrix(&["e1"], &["A", "B"], &[3.0, 3.0]);
        let other = matrix(&["e1"], &["A", "B"], &[1.0, 2.0]);
        assert_eq!(
            summary_level(&constant, &other, CorrKind::Pearson),
            Err(CorrError::AllRowsDegenerate)
        );
    }

    #[test]
    fn system_level_correlates_column_means() {
        // Column means: x -> [2,3], y -> [1,5].
        let x = matrix(&["e1", "e2"], &["A", "B"], &[1.0, 2.0, 3.0, 4.0]);
        let y = matrix(&["e1", "e2"], &["A", "B"], &[0.0, 4.0, 2.0, 6.0]);
        let got = system_level(&x, &y, CorrKind::Pearson).unwrap();
        let want = oracle_pearson(&[2.0, 3.0], &[1.0, 5.0]).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn misaligned_matrices_are_rejected() {
        let x = matrix(&["e1"], &["A", "B"], &[1.0, 2.0]);
        let y = matrix(&["e1"], &["B", "A"], &[1.0, 2.0]);
        assert!(matches!(
            system_level(&x, &y, CorrKind::Pearson),
            Err(CorrError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn buckets_partition_sorted_pairs() {
        let scores: Vec<(String, f64)> = (0..12)
            .map(|i| (format!("sys{i:02}"), i as f64 * 0.8))
            .collect();
        let buckets = make_buckets(&scores, 6).unwrap();
        assert_eq!(buckets.len(), 6);
        assert!(buckets.iter().all(|b| b.pairs.len() == 11));
        let mut seen = std::collections::HashSet::new();
        let mut last_high = 0.0;
        for b in &buckets {
            assert!(b.effect_range.0 >= last_high);
            last_high = b.effect_range.1;
            for p in &b.pairs {
                assert!(seen.insert(p.clone()), "pair {p:?} appears twice");
            }
        }
        assert_eq!(seen.len(), 66);
    }

    #[test]
    fn bucket_remainder_goes_to_largest_differences() {
        let scores: Vec<(String, f64)> = [("A", 0.0), ("B", 1.0), ("C", 3.0), ("D", 7.0)]
            .iter()
            .map(|(s, v)| (s.to_string(), *v))
            .collect();
        let buckets = make_buckets(&scores, 4).unwrap();
        let sizes: Vec<usize> = buckets.iter().map(|b| b.pairs.len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 2]);
        assert!(matches!(
            make_buckets(&scores[..2], 2),
            Err(CorrError::TooManyBuckets { pairs: 1, requested: 2 })
        ));
    }

    #[test]
    fn bucket_corr_counts_sign_agreement() {
        // 3 systems, single bucket of 3 pairs; human order A < B < C.
        let human = matrix(&["e1"], &["A", "B", "C"], &[1.0, 2.0, 3.0]);
        let agree = matrix(&["e1"], &["A", "B", "C"], &[0.1, 0.5, 0.9]);
        let flip = matrix(&["e1"], &["A", "B", "C"], &[0.9, 0.5, 0.1]);
        let one_tie = matrix(&["e1"], &["A", "B", "C"], &[0.5, 0.5, 0.9]);
        let scores: Vec<(String, f64)> = [("A", 1.0), ("B", 2.0), ("C", 3.0)]
            .iter()
            .map(|(s, v)| (s.to_string(), *v))
            .collect();
        let bucket = &make_buckets(&scores, 1).unwrap()[0];
        assert_eq!(pairwise_bucket_corr(&agree, &human, bucket).unwrap(), 1.0);
        assert_eq!(pairwise_bucket_corr(&flip, &human, bucket).unwrap(), -1.0);
        // (A,B) ties on the metric side only: 2 concordant, 1 discordant.
        let got = pairwise_bucket_corr(&one_tie, &human, bucket).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn eleven_pair_bucket_values_are_elevenths() {
        // 8 concordant, 3 discordant out of 11 -> 5/11.
        let systems: Vec<String> = (0..12).map(|i| format!("s{i:02}")).collect();
        let human_vals: Vec<f64> = (0..12).map(|i| i as f64).collect();
        // Flip the metric ordering of three adjacent low-gap pairs.
        let mut metric_vals = human_vals.clone();
        metric_vals.swap(0, 1);
        metric_vals.swap(2, 3);
        metric_vals.swap(4, 5);
        let ids = ["e1"];
        let sys_refs: Vec<&str> = systems.iter().map(String::as_str).collect();
        let human = matrix(&ids, &sys_refs, &human_vals);
        let metric = matrix(&ids, &sys_refs, &metric_vals);
        let scores: Vec<(String, f64)> = systems
            .iter()
            .cloned()
            .zip(human_vals.iter().copied())
            .collect();
        let buckets = make_buckets(&scores, 6).unwrap();
        // All score gaps of 1 land in the first bucket of 11 pairs; exactly
        // the three swapped pairs disagree there.
        let got = pairwise_bucket_corr(&metric, &human, &buckets[0]).unwrap();
        assert!((got - 5.0 / 11.0).abs() < 1e-12);
    }

    fn vec_pair(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        let v = proptest::collection::vec(-50..50i32, len..=len)
            .prop_map(|v| v.into_iter().map(|x| x as f64 / 4.0).collect::<Vec<f64>>());
        (v.clone(), v)
    }

    proptest! {
        #[test]
        fn coefficients_match_textbook_oracles((x, y) in vec_pair(7)) {
            let p = corr_coeff(&x, &y, CorrKind::Pearson).unwrap();
            match (p, oracle_pearson(&x, &y)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a, b),
            }
            let k = corr_coeff(&x, &y, CorrKind::Kendall).unwrap();
            match (k, oracle_kendall(&x, &y)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a, b),
            }
        }

        #[test]
        fn kendall_invariant_under_increasing_transform((x, y) in vec_pair(6)) {
            let transformed: Vec<f64> = x.iter().map(|v| (v / 10.0).exp() * 3.0 + 1.0).collect();
            let before = corr_coeff(&x, &y, CorrKind::Kendall).unwrap();
            let after = corr_coeff(&transformed, &y, CorrKind::Kendall).unwrap();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn single_row_summary_equals_row_coefficient(row_x in proptest::collection::vec(-10.0..10.0f64, 4), row_y in proptest::collection::vec(-10.0..10.0f64, 4)) {
            let x = matrix(&["e1"], &["A", "B", "C", "D"], &row_x);
            let y = matrix(&["e1"], &["A", "B", "C", "D"], &row_y);
            let direct = corr_coeff(&row_x, &row_y, CorrKind::Pearson).unwrap();
            match direct {
                Some(v) => {
                    let s = summary_level(&x, &y, CorrKind::Pearson).unwrap();
                    prop_assert!((s.value - v).abs() < 1e-12);
                    prop_assert_eq!(s.skipped_rows, 0);
                }
                None => {
                    prop_assert_eq!(
                        summary_level(&x, &y, CorrKind::Pearson),
                        Err(CorrError::AllRowsDegenerate)
                    );
                }
            }
        }

        #[test]
        fn identical_permutation_leaves_levels_unchanged(
            values_x in proptest::collection::vec(-10.0..10.0f64, 12),
            values_y in proptest::collection::vec(-10.0..10.0f64, 12),
            row_perm in Just(vec![2usize, 0, 1]),
            col_perm in Just(vec![3usize, 1, 0, 2]),
        ) {
            let ids = ["e1", "e2", "e3"];
            let systems = ["A", "B", "C", "D"];
            let build = |vals: &[f64], rp: &[usize], cp: &[usize]| {
                let mut permuted = Vec::with_capacity(12);
                let mut pids = Vec::new();
                let mut psys = Vec::new();
                for &r in rp {
                    pids.push(ids[r]);
                    for &c in cp {
                        permuted.push(vals[r * 4 + c]);
                    }
                }
                for &c in cp {
                    psys.push(systems[c]);
                }
                matrix(&pids, &psys, &permuted)
            };
            let id_x = build(&values_x, &[0, 1, 2], &[0, 1, 2, 3]);
            let id_y = build(&values_y, &[0, 1, 2], &[0, 1, 2, 3]);
            let perm_x = build(&values_x, &row_perm, &col_perm);
            let perm_y = build(&values_y, &row_perm, &col_perm);
            for kind in CorrKind::ALL {
                let a = summary_level(&id_x, &id_y, kind);
                let b = summary_level(&perm_x, &perm_y, kind);
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        prop_assert!((a.value - b.value).abs() < 1e-9);
                        prop_assert_eq!(a.skipped_rows, b.skipped_rows);
                    }
                    (a, b) => prop_assert_eq!(a, b),
                }
                let a = system_level(&id_x, &id_y, kind);
                let b = system_level(&perm_x, &perm_y, kind);
                match (a, b) {
                    (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-9),
                    (a, b) => prop_assert_eq!(a, b),
                }
            }
        }

        #[test]
        fn untied_bucket_union_equals_tau_a(
            metric_means in proptest::collection::vec(-100..100i32, 5),
            human_means in proptest::collection::vec(-100..100i32, 5),
        ) {
            let metric_means: Vec<f64> = metric_means.iter().map(|&v| v as f64 + 0.25).collect();
            let human_means: Vec<f64> = human_means.iter().map(|&v| v as f64).collect();
            let distinct = |v: &[f64]| {
                let mut s = v.to_vec();
                s.sort_by(f64::total_cmp);
                s.windows(2).all(|w| w[0] != w[1])
            };
            prop_assume!(distinct(&metric_means) && distinct(&human_means));
            let systems = ["A", "B", "C", "D", "E"];
            let ids = ["e1"];
            let metric = matrix(&ids, &systems, &metric_means);
            let human = matrix(&ids, &systems, &human_means);
            let scores: Vec<(String, f64)> = systems
                .iter()
                .map(|s| s.to_string())
                .zip(human_means.iter().copied())
                .collect();
            let buckets = make_buckets(&scores, 2).unwrap();
            let mut net = 0.0;
            let mut count = 0.0;
            for b in &buckets {
                net += pairwise_bucket_corr(&metric, &human, b).unwrap() * b.pairs.len() as f64;
                count += b.pairs.len() as f64;
            }
            let union_value = net / count;
            // tau-a equals tau-b here because there are no ties.
            let tau = corr_coeff(&metric_means, &human_means, CorrKind::Kendall)
                .unwrap()
                .unwrap();
            prop_assert!((union_value - tau).abs() < 1e-9);
        }
    }
}
