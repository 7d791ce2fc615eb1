//! ROUGE-1, ROUGE-2, and ROUGE-L over whole summaries.

use super::ngrams;
use super::tokenize::tokenize_with;
use super::MetricScore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RougeVariant {
    R1,
    R2,
    RL,
}

impl RougeVariant {
    pub const ALL: [RougeVariant; 3] = [RougeVariant::R1, RougeVariant::R2, RougeVariant::RL];
}

impl std::fmt::Display for RougeVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RougeVariant::R1 => "rouge1",
            RougeVariant::R2 => "rouge2",
            RougeVariant::RL => "rougeL",
        })
    }
}

pub fn rouge(reference: &str, candidate: &str, variant: RougeVariant) -> MetricScore {
    rouge_with(reference, candidate, variant, false)
}

pub fn rouge_with(
    reference: &str,
    candidate: &str,
    variant: RougeVariant,
    stem: bool,
) -> MetricScore {
    let ref_tokens = tokenize_with(reference, stem);
    let cand_tokens = tokenize_with(candidate, stem);
    match variant {
        RougeVariant::R1 => ngram_score(&ref_tokens, &cand_tokens, 1),
        RougeVariant::R2 => ngram_score(&ref_tokens, &cand_tokens, 2),
        RougeVariant::RL => lcs_score(&ref_tokens, &cand_tokens),
    }
}

fn ngram_score(ref_tokens: &[String], cand_tokens: &[String], n: usize) -> MetricScore {
    let ref_counts = ngrams::counts(ref_tokens, n);
    let cand_counts = ngrams::counts(cand_tokens, n);
    let matched = ngrams::clipped_matches(&ref_counts, &cand_counts) as f64;
    MetricScore::from_counts(
        matched,
        ngrams::total(ref_tokens.len(), n) as f64,
        ngrams::total(cand_tokens.len(), n) as f64,
    )
}

fn lcs_score(ref_tokens: &[String], cand_tokens: &[String]) -> MetricScore {
    let lcs = lcs_len(ref_tokens, cand_tokens) as f64;
    MetricScore::from_counts(lcs, ref_tokens.len() as f64, cand_tokens.len() as f64)
}

/// Longest common subsequence length, rolling single-row dynamic program.
fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}
