//! Scoring of prediction files against FT references along the level,
//! position and message axes, plus report aggregation.

pub mod bleu;
mod report;

pub use report::{render_comparison_markdown, render_markdown};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetInstance;
use crate::error::{Error, Result};
use crate::lexer;
use crate::logstmt::{level_distance, locate_injected_statement, InsertedLog, LogDetector, LogLevel, ALL_LEVELS};
use crate::method::syntax_check;

/// Per-instance component verdicts and distances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationOutcome {
    pub instance_id: String,
    /// No prediction was supplied for this instance.
    pub missing: bool,
    pub valid_syntax: bool,
    /// Exactly-one-log-insertion recognized.
    pub located: bool,
    pub level_correct: bool,
    pub position_correct: bool,
    pub message_correct: bool,
    /// Absent when no valid level was located.
    pub level_distance: Option<u8>,
    /// |predicted anchor - reference anchor| in input tokens; absent
    /// when the prediction was not located.
    pub position_distance: Option<usize>,
    pub bleu4: f64,
    pub pred_level: Option<LogLevel>,
    pub ref_level: LogLevel,
    /// Character count of the reference statement's normalized text.
    pub message_chars: usize,
}

/// Score one FT instance against an optional prediction. `None` means
/// the prediction file had no line for this instance; it counts as
/// wrong on all axes.
pub fn score(
    instance: &DatasetInstance,
    prediction_text: Option<&str>,
    detector: &LogDetector,
) -> Result<EvaluationOutcome> {
    let input = lexer::tokenize(&instance.input)?;
    let reference = locate_injected_statement(&input, &instance.target, detector)
        .ok_or_else(|| {
            Error::Config(format!(
                "instance {} is not a well-formed FT pair (target is not input plus one log statement)",
                instance.instance_id
            ))
        })?;
    let ref_text = reference.statement_text();

    let mut outcome = EvaluationOutcome {
        instance_id: instance.instance_id.clone(),
        missing: prediction_text.is_none(),
        valid_syntax: false,
        located: false,
        level_correct: false,
        position_correct: false,
        message_correct: false,
        level_distance: None,
        position_distance: None,
        bleu4: 0.0,
        pred_level: None,
        ref_level: reference.level,
        message_chars: ref_text.chars().count(),
    };

    let Some(text) = prediction_text else { return Ok(outcome) };
    if !syntax_check(text) {
        return Ok(outcome);
    }
    outcome.valid_syntax = true;

    let Some(predicted) = locate_injected_statement(&input, text, detector) else {
        return Ok(outcome);
    };
    outcome.located = true;
    outcome.pred_level = Some(predicted.level);
    outcome.level_distance = Some(level_distance(predicted.level, reference.level));
    outcome.level_correct = predicted.level == reference.level;
    outcome.position_distance = Some(predicted.anchor.abs_diff(reference.anchor));
    outcome.position_correct = predicted.anchor == reference.anchor;
    // Full-statement comparison, case-sensitive.
    outcome.message_correct = predicted.statement_text() == ref_text;
    outcome.bleu4 = bleu::bleu4(&predicted.statement_texts, &reference.statement_texts);
    Ok(outcome)
}

/// Reference side of an FT instance, exposed for baseline construction.
pub fn reference_insertion(
    instance: &DatasetInstance,
    detector: &LogDetector,
) -> Result<InsertedLog> {
    let input = lexer::tokenize(&instance.input)?;
    locate_injected_statement(&input, &instance.target, detector).ok_or_else(|| {
        Error::Config(format!("instance {} has no recoverable reference insertion", instance.instance_id))
    })
}

/// Component requirement of one combination-table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    /// Component must be correct.
    Yes,
    /// Component must be wrong.
    No,
    /// Component may be either.
    Any,
}

impl Mark {
    fn admits(self, correct: bool) -> bool {
        match self {
            Mark::Yes => correct,
            Mark::No => !correct,
            Mark::Any => true,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Mark::Yes => "+",
            Mark::No => "x",
            Mark::Any => "-",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombinationRow {
    pub level: Mark,
    pub position: Mark,
    pub message: Mark,
    pub count: usize,
    pub percent: f64,
}

impl CombinationRow {
    pub fn label(&self) -> String {
        format!(
            "Level={} Position={} Message={}",
            self.level.symbol(),
            self.position.symbol(),
            self.message.symbol()
        )
    }
}

/// The ten combination-row predicates, in table order: the three
/// single-component "any" rows, the three exactly-one rows, the three
/// exactly-two rows, then all-correct.
pub const COMBINATION_ROWS: [(Mark, Mark, Mark); 10] = [
    (Mark::Yes, Mark::Any, Mark::Any),
    (Mark::Any, Mark::Yes, Mark::Any),
    (Mark::Any, Mark::Any, Mark::Yes),
    (Mark::Yes, Mark::No, Mark::No),
    (Mark::No, Mark::Yes, Mark::No),
    (Mark::No, Mark::No, Mark::Yes),
    (Mark::Yes, Mark::Yes, Mark::No),
    (Mark::Yes, Mark::No, Mark::Yes),
    (Mark::No, Mark::Yes, Mark::Yes),
    (Mark::Yes, Mark::Yes, Mark::Yes),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: LogLevel,
    /// Instances whose reference has this level.
    pub count: usize,
    /// Percentage with the level correctly predicted.
    pub level_accuracy_percent: f64,
    /// Percentage fully correct (level, position and message).
    pub fully_correct_percent: f64,
    /// Mean character count of reference statements at this level.
    pub mean_message_chars: f64,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct PositionBuckets {
    /// Distance 0 (correct position).
    pub exact: usize,
    /// Distance in (0, 50].
    pub within_50: usize,
    /// Distance in (50, 100].
    pub within_100: usize,
    /// Distance > 100.
    pub beyond_100: usize,
}

impl PositionBuckets {
    pub fn total(&self) -> usize {
        self.exact + self.within_50 + self.within_100 + self.beyond_100
    }
}

/// Aggregated evaluation over one prediction file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub total_instances: usize,
    pub missing_predictions: usize,
    pub wrong_syntax_count: usize,
    pub wrong_syntax_percent: f64,
    /// Syntactically valid but not recognized as a single log insertion.
    pub not_located_count: usize,
    pub scored_count: usize,
    pub combination_rows: Vec<CombinationRow>,
    pub per_level: Vec<LevelRow>,
    /// Level-distance histogram, bins 0..=5, over instances with a
    /// located (valid) predicted level.
    pub level_distance_histogram: [usize; 6],
    pub position_buckets: PositionBuckets,
    /// Arithmetic mean of sentence BLEU-4 over all instances
    /// (non-located instances contribute 0).
    pub mean_bleu4: f64,
    /// Mean BLEU-4 over located instances only.
    pub mean_bleu4_located: f64,
}

fn pct(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

/// Aggregate outcomes into the report. Order-independent: the result is
/// identical for any permutation of `outcomes`.
pub fn aggregate(outcomes: &[EvaluationOutcome]) -> EvaluationReport {
    let total = outcomes.len();
    let missing = outcomes.iter().filter(|o| o.missing).count();
    let wrong_syntax = outcomes.iter().filter(|o| !o.missing && !o.valid_syntax).count();
    let not_located = outcomes.iter().filter(|o| o.valid_syntax && !o.located).count();
    let scored = outcomes.iter().filter(|o| o.located).count();

    let combination_rows = COMBINATION_ROWS
        .iter()
        .map(|&(l, p, m)| {
            let count = outcomes
                .iter()
                .filter(|o| {
                    l.admits(o.level_correct)
                        && p.admits(o.position_correct)
                        && m.admits(o.message_correct)
                })
                .count();
            CombinationRow { level: l, position: p, message: m, count, percent: pct(count, total) }
        })
        .collect();

    let mut per_level = Vec::new();
    for level in ALL_LEVELS {
        let of_level: Vec<&EvaluationOutcome> =
            outcomes.iter().filter(|o| o.ref_level == level).collect();
        if of_level.is_empty() {
            continue;
        }
        let count = of_level.len();
        let level_ok = of_level.iter().filter(|o| o.level_correct).count();
        let all_ok = of_level
            .iter()
            .filter(|o| o.level_correct && o.position_correct && o.message_correct)
            .count();
        let chars: usize = of_level.iter().map(|o| o.message_chars).sum();
        per_level.push(LevelRow {
            level,
            count,
            level_accuracy_percent: pct(level_ok, count),
            fully_correct_percent: pct(all_ok, count),
            mean_message_chars: chars as f64 / count as f64,
        });
    }

    let mut histogram = [0usize; 6];
    for o in outcomes {
        if let Some(d) = o.level_distance {
            histogram[d as usize] += 1;
        }
    }

    let mut buckets = PositionBuckets::default();
    for o in outcomes {
        match o.position_distance {
            Some(0) => buckets.exact += 1,
            Some(d) if d <= 50 => buckets.within_50 += 1,
            Some(d) if d <= 100 => buckets.within_100 += 1,
            Some(_) => buckets.beyond_100 += 1,
            None => {}
        }
    }

    let bleu_sum: f64 = outcomes.iter().map(|o| o.bleu4).sum();
    let bleu_sum_located: f64 = outcomes.iter().filter(|o| o.located).map(|o| o.bleu4).sum();

    EvaluationReport {
        total_instances: total,
        missing_predictions: missing,
        wrong_syntax_count: wrong_syntax,
        wrong_syntax_percent: pct(wrong_syntax, total),
        not_located_count: not_located,
        scored_count: scored,
        combination_rows,
        per_level,
        level_distance_histogram: histogram,
        position_buckets: buckets,
        mean_bleu4: if total == 0 { 0.0 } else { bleu_sum / total as f64 },
        mean_bleu4_located: if scored == 0 { 0.0 } else { bleu_sum_located / scored as f64 },
    }
}

/// Score a whole instance set against a prediction map and aggregate.
/// Returns the report together with the per-instance outcomes.
pub fn evaluate_all(
    instances: &[DatasetInstance],
    predictions: &HashMap<String, String>,
    detector: &LogDetector,
) -> Result<(EvaluationReport, Vec<EvaluationOutcome>)> {
    let mut outcomes = Vec::with_capacity(instances.len());
    for inst in instances {
        let pred = predictions.get(&inst.instance_id).map(String::as_str);
        outcomes.push(score(inst, pred, detector)?);
    }
    Ok((aggregate(&outcomes), outcomes))
}
