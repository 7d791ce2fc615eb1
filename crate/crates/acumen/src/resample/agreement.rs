//! Inter-annotator agreement via Krippendorff's alpha.
//!
//! Ratings are grouped into units (the things being rated); rater identity
//! does not matter, only which ratings land on the same unit. Units with
//! fewer than two ratings carry no agreement information and are ignored.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Protocol};

use super::ResampleError;

/// Distance model for comparing two ratings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Ratings are unordered categories: distance is 0 or 1.
    Nominal,
    /// Ratings are numbers: distance is the squared difference.
    Interval,
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scale::Nominal => "nominal",
            Scale::Interval => "interval",
        })
    }
}

impl std::str::FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nominal" => Ok(Scale::Nominal),
            "interval" => Ok(Scale::Interval),
            other => Err(format!(
                "unknown scale '{other}' (expected nominal or interval)"
            )),
        }
    }
}

/// Krippendorff's alpha over rating units.
///
/// Builds the coincidence matrix (each unit contributes its ordered rating
/// pairs, weighted by `1 / (m_u - 1)`) and returns
/// `1 - (n - 1) * sum(o_ck * d2) / sum(n_c * n_k * d2)`. When expected
/// disagreement is zero every rating is identical and alpha is 1 by
/// convention.
pub fn krippendorff_alpha(units: &[Vec<f64>], scale: Scale) -> Result<f64, ResampleError> {
    if units.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ResampleError::InvalidConfig(
            "agreement ratings must be finite numbers".into(),
        ));
    }
    let usable: Vec<&Vec<f64>> = units.iter().filter(|u| u.len() >= 2).collect();
    if usable.len() < 2 {
        return Err(ResampleError::InsufficientData(format!(
            "need at least 2 units with 2+ ratings, got {}",
            usable.len()
        )));
    }

    let mut categories: Vec<f64> = usable.iter().flat_map(|u| u.iter().copied()).collect();
    categories.sort_by(|a, b| a.total_cmp(b));
    categories.dedup();
    let index = |v: f64| {
        categories
            .binary_search_by(|c| c.total_cmp(&v))
            .expect("every rating was collected as a category")
    };

    let k = categories.len();
    let mut coincidence = vec![0.0f64; k * k];
    for unit in &usable {
        let weight = 1.0 / (unit.len() - 1) as f64;
        for (i, &a) in unit.iter().enumerate() {
            for (j, &b) in unit.iter().enumerate() {
                if i != j {
                    coincidence[index(a) * k + index(b)] += weight;
                }
            }
        }
    }
    let marginals: Vec<f64> = (0..k)
        .map(|c| coincidence[c * k..(c + 1) * k].iter().sum())
        .collect();
    let n: f64 = marginals.iter().sum();

    let d2 = |c: usize, r: usize| match scale {
        Scale::Nominal => f64::from(c != r),
        Scale::Interval => (categories[c] - categories[r]).powi(2),
    };
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for r in 0..k {
            let dist = d2(c, r);
            observed += coincidence[c * k + r] * dist;
            expected += marginals[c] * marginals[r] * dist;
        }
    }
    if expected == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - (n - 1.0) * observed / expected)
}

/// One unit per (example, system): each annotator's matched fraction of the
/// example's ACUs. Rate these on the interval scale.
pub fn summary_level_agreement_units(corpus: &Corpus) -> Vec<Vec<f64>> {
    let mut grouped: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for ann in corpus.match_annotations() {
        if ann.labels.is_empty() {
            continue;
        }
        let matched: f64 = ann.labels.values().map(|&v| f64::from(v)).sum();
        grouped
            .entry((ann.example_id.clone(), ann.system.clone()))
            .or_default()
            .push(matched / ann.labels.len() as f64);
    }
    grouped.into_values().collect()
}

/// One unit per (example, system, ACU): each annotator's binary presence
/// label. Rate these on the nominal scale.
pub fn acu_level_agreement_units(corpus: &Corpus) -> Vec<Vec<f64>> {
    let mut grouped: BTreeMap<(String, String, String), Vec<f64>> = BTreeMap::new();
    for ann in corpus.match_annotations() {
        for (acu_id, &label) in &ann.labels {
            grouped
                .entry((
                    ann.example_id.clone(),
                    ann.system.clone(),
                    acu_id.clone(),
                ))
                .or_default()
                .push(f64::from(label));
        }
    }
    grouped.into_values().collect()
}

/// One unit per (example, system): each annotator's 1-5 rating under the
/// given protocol. Rate these on the interval scale.
pub fn likert_agreement_units(corpus: &Corpus, protocol: Protocol) -> Vec<Vec<f64>> {
    let mut grouped: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for ann in corpus.likert_annotations() {
        if ann.protocol != protocol {
            continue;
        }
        grouped
            .entry((ann.example_id.clone(), ann.system.clone()))
            .or_default()
            .push(f64::from(ann.score));
    }
    grouped.into_values().collect()
}
