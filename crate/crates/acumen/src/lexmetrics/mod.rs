//! Reference-based lexical metrics (ROUGE, chrF, BLEU) and source-based
//! extractive statistics, all computed natively so they slot into the same
//! score-matrix pipeline as ingested metrics.

mod bleu;
mod chrf;
mod fragments;
mod ngrams;
mod rouge;
mod tokenize;

pub use bleu::bleu;
pub use chrf::chrf;
pub use fragments::{extractive_fragments, extractive_stats, ExtractiveStats};
pub use rouge::{rouge, rouge_with, RougeVariant};
pub use tokenize::{porter_stem, tokenize, tokenize_with};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexError {
    #[error("candidate has no tokens")]
    EmptyCandidate,
    #[error("source has no tokens")]
    EmptySource,
}

/// Recall/precision/f1 triple. Single-valued metrics (chrF, BLEU) carry
/// their score in `f1` and leave the other two unset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricScore {
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub f1: f64,
}

impl MetricScore {
    /// Builds the triple from matched/total counts, with the 0/0 case
    /// scored 0 by convention.
    pub fn from_counts(matched: f64, ref_total: f64, cand_total: f64) -> MetricScore {
        let recall = if ref_total > 0.0 { matched / ref_total } else { 0.0 };
        let precision = if cand_total > 0.0 { matched / cand_total } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        MetricScore {
            recall: Some(recall),
            precision: Some(precision),
            f1,
        }
    }

    /// Wraps a single-valued score.
    pub fn single(value: f64) -> MetricScore {
        MetricScore {
            recall: None,
            precision: None,
            f1: value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // Broad range sweep across all metrics on arbitrary short strings.
        #![proptest_config(ProptestConfig::with_cases(2500))]
        #[test]
        fn every_metric_stays_in_declared_range(a in ".{0,24}", b in ".{0,24}") {
            for variant in RougeVariant::ALL {
                let s = rouge(&a, &b, variant);
                for part in [s.recall.unwrap(), s.precision.unwrap(), s.f1] {
                    prop_assert!((0.0..=1.0).contains(&part), "{variant}: {part}");
                }
                if s.precision.unwrap() + s.recall.unwrap() > 0.0 {
                    let (p, r) = (s.precision.unwrap(), s.recall.unwrap());
                    prop_assert!((s.f1 - 2.0 * p * r / (p + r)).abs() < 1e-12);
                }
            }
            prop_assert!((0.0..=1.0).contains(&chrf(&a, &b)));
            prop_assert!((0.0..=1.0).contains(&bleu(&[a.as_str()], &b)));
        }
    }
}
