//! N-gram counting over token and character sequences.

use std::collections::HashMap;

/// Multiset of n-grams as a count map over windows of `items`.
pub fn counts<T: std::hash::Hash + Eq>(items: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut map = HashMap::new();
    if n == 0 || items.len() < n {
        return map;
    }
    for gram in items.windows(n) {
        *map.entry(gram).or_insert(0) += 1;
    }
    map
}

/// Total number of n-gram occurrences in a sequence of the given length.
pub fn total(len: usize, n: usize) -> usize {
    (len + 1).saturating_sub(n)
}

/// Sum over shared n-grams of min(count_a, count_b): the clipped match count.
pub fn clipped_matches<T: std::hash::Hash + Eq>(
    a: &HashMap<&[T], usize>,
    b: &HashMap<&[T], usize>,
) -> usize {
    a.iter()
        .map(|(gram, &ca)| ca.min(b.get(gram).copied().unwrap_or(0)))
        .sum()
}
