//! Character n-gram F-score.
//!
//! Strings are lowercased and stripped of whitespace, then compared on
//! character n-grams of order 1 through 6. Precision and recall are averaged
//! over the orders where at least one side has n-grams, and combined with
//! beta = 2 (recall weighted twice as heavily as precision).

use super::ngrams;

const MAX_ORDER: usize = 6;
const BETA_SQ: f64 = 4.0;

pub fn chrf(reference: &str, candidate: &str) -> f64 {
    let ref_chars = normalize(reference);
    let cand_chars = normalize(candidate);
    if ref_chars.is_empty() && cand_chars.is_empty() {
        return 1.0;
    }
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut orders = 0usize;
    for n in 1..=MAX_ORDER {
        let ref_total = ngrams::total(ref_chars.len(), n);
        let cand_total = ngrams::total(cand_chars.len(), n);
        if ref_total == 0 && cand_total == 0 {
            continue;
        }
        let ref_counts = ngrams::counts(&ref_chars, n);
        let cand_counts = ngrams::counts(&cand_chars, n);
        let matched = ngrams::clipped_matches(&ref_counts, &cand_counts) as f64;
        if cand_total > 0 {
            precision_sum += matched / cand_total as f64;
        }
        if ref_total > 0 {
            recall_sum += matched / ref_total as f64;
        }
        orders += 1;
    }
    let precision = precision_sum / orders as f64;
    let recall = recall_sum / orders as f64;
    let denom = BETA_SQ * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + BETA_SQ) * precision * recall / denom
    }
}

fn normalize(text: &str) -> Vec<char> {
    text.to_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_strings_score_one() {
        assert_eq!(chrf("abc", "abc"), 1.0);
        assert_eq!(chrf("The cat sat.", "the catsat."), 1.0);
        assert_eq!(chrf("", ""), 1.0);
    }

    #[test]
    fn disjoint_alphabets_score_zero() {
        assert_eq!(chrf("aaaa", "bbbb"), 0.0);
        assert_eq!(chrf("abcd", ""), 0.0);
        assert_eq!(chrf("", "abcd"), 0.0);
    }

    #[test]
    fn hand_computed_ngram_table() {
        // ref "abcd", cand "abc". Included orders 1..=4:
        //   n=1: P=3/3, R=3/4   n=2: P=2/2, R=2/3
        //   n=3: P=1/1, R=1/2   n=4: P=0,   R=0/1
        // P = 3/4, R = (3/4 + 2/3 + 1/2)/4 = 23/48, F2 = 5PR/(4P+R).
        let p: f64 = 0.75;
        let r: f64 = 23.0 / 48.0;
        let want = 5.0 * p * r / (4.0 * p + r);
        assert!((chrf("abcd", "abc") - want).abs() < 1e-12);
        assert!((want - 0.516_467).abs() < 1e-6);
    }

    #[test]
    fn recall_weighting_favors_coverage_of_the_reference() {
        // A superstring candidate (perfect recall, diluted precision) must
        // beat a substring candidate (perfect precision, halved recall)
        // because beta = 2 weights recall twice.
        let complete = chrf("abcdefgh", "abcdefgh ijkl");
        let partial = chrf("abcdefgh", "abcd");
        assert!(complete > partial);
    }

    fn short_ascii() -> impl Strategy<Value = String> {
        proptest::collection::vec(prop_oneof![Just('a'), Just('b'), Just('c')], 0..6)
            .prop_map(|cs| cs.into_iter().collect())
    }

    proptest! {
        #[test]
        fn stays_in_unit_interval(a in ".{0,30}", b in ".{0,30}") {
            let v = chrf(&a, &b);
            prop_assert!((0.0..=1.0).contains(&v), "chrf({a:?},{b:?}) = {v}");
        }

        // On strings no longer than the maximum n-gram order, the whole
        // string is itself one of the compared n-grams, so a perfect score
        // forces equality.
        #[test]
        fn one_iff_equal_on_short_strings(a in short_ascii(), b in short_ascii()) {
            let v = chrf(&a, &b);
            if a == b {
                prop_assert_eq!(v, 1.0);
            } else {
                prop_assert!(v < 1.0, "chrf({a:?},{b:?}) = {v}");
            }
        }
    }
}
