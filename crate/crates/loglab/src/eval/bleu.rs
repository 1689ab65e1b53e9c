//! Sentence-level BLEU-4: geometric mean of modified 1..4-gram
//! precisions with brevity penalty. Zero-count precisions are smoothed
//! by a fixed epsilon so short or disjoint sequences still score.

use std::collections::HashMap;

pub const SMOOTHING_EPSILON: f64 = 1e-9;
const MAX_ORDER: usize = 4;

/// BLEU-4 between a candidate and a single reference token sequence.
/// Returns a value in [0, 1]; an empty candidate scores 0.
pub fn bleu4<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> f64 {
    if candidate.is_empty() {
        return 0.0;
    }
    let cand: Vec<&str> = candidate.iter().map(|s| s.as_ref()).collect();
    let refr: Vec<&str> = reference.iter().map(|s| s.as_ref()).collect();

    let mut log_sum = 0.0f64;
    for n in 1..=MAX_ORDER {
        let p = modified_precision(&cand, &refr, n);
        log_sum += p.max(SMOOTHING_EPSILON).ln();
    }
    let geo_mean = (log_sum / MAX_ORDER as f64).exp();

    let c = cand.len() as f64;
    let r = refr.len() as f64;
    let bp = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    (bp * geo_mean).clamp(0.0, 1.0)
}

/// Clipped n-gram precision; 0 when the candidate has no n-grams.
fn modified_precision(cand: &[&str], refr: &[&str], n: usize) -> f64 {
    if cand.len() < n {
        return 0.0;
    }
    let mut ref_counts: HashMap<&[&str], usize> = HashMap::new();
    for gram in refr.windows(n) {
        *ref_counts.entry(gram).or_insert(0) += 1;
    }
    let mut cand_counts: HashMap<&[&str], usize> = HashMap::new();
    for gram in cand.windows(n) {
        *cand_counts.entry(gram).or_insert(0) += 1;
    }
    let matched: usize = cand_counts
        .iter()
        .map(|(gram, &count)| count.min(ref_counts.get(gram).copied().unwrap_or(0)))
        .sum();
    matched as f64 / (cand.len() - n + 1) as f64
}
