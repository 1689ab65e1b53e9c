//! Dataset construction: token-count and dedup filters, the three task
//! datasets (P1 denoising, P2 position, FT full statement) and the
//! deterministic grouped 80/10/10 split.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::jsonl::{MethodLine, SplitLine};
use crate::lexer::{self, Token, TokenKind};
use crate::logstmt::{insert_placeholder, reinsert, remove_log, LogDetector};
use crate::method::{count_tokens, MethodRecord};

pub const MIN_TOKENS: usize = 10;
pub const MAX_TOKENS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    P1,
    P2,
    FT,
}

/// One input/target pair, traceable to its origin method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetInstance {
    pub instance_id: String,
    pub task: Task,
    pub method_id: String,
    /// Which log statement was removed; absent for P1.
    pub removed_index: Option<usize>,
    pub input: String,
    pub target: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Eval,
    Test,
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "eval" | "valid" => Ok(Split::Eval),
            "test" => Ok(Split::Test),
            other => Err(Error::Config(format!(
                "unknown split '{other}' (expected train, eval or test)"
            ))),
        }
    }
}

/// Rebuild a [`MethodRecord`] from its sink line by re-tokenizing the
/// normalized text (the lexer's normalization round-trip guarantees the
/// same kind/text sequence).
pub fn record_from_line(line: &MethodLine) -> Result<MethodRecord> {
    let tokens = lexer::tokenize(&line.tokens)?;
    Ok(MethodRecord {
        id: line.id.clone(),
        repo: line.repo.clone(),
        path: line.path.clone(),
        raw_text: line.tokens.clone(),
        tokens,
        log_statements: Vec::new(),
    })
}

/// Keep methods with 10 <= #tokens < 512 and drop duplicates by
/// normalized token text (first in traversal order survives).
pub fn filter_methods(records: Vec<MethodRecord>) -> Vec<MethodRecord> {
    let mut seen = HashSet::new();
    records
        .into_iter()
        .filter(|m| {
            let n = count_tokens(m);
            (MIN_TOKENS..MAX_TOKENS).contains(&n)
        })
        .filter(|m| seen.insert(m.normalized_text()))
        .collect()
}

fn method_rng(seed: u64, method_id: &str) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(method_id.as_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

/// Build a denoising (P1) instance: floor(mask_ratio * #tokens)
/// distinct positions replaced by `<extra_id_i>` sentinels in
/// left-to-right order; the target lists each sentinel followed by the
/// original token. Deterministic under (method, seed).
pub fn build_p1(m: &MethodRecord, mask_ratio: f64, seed: u64) -> Result<DatasetInstance> {
    let n = count_tokens(m);
    let k = (mask_ratio * n as f64).floor() as usize;
    if k == 0 {
        return Err(Error::EmptyMaskSet);
    }
    let mut rng = method_rng(seed, &m.id);
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(&mut rng);
    let mut masked: Vec<usize> = positions.into_iter().take(k).collect();
    masked.sort_unstable();

    let mut input = Vec::with_capacity(n);
    let mut target = Vec::with_capacity(2 * k);
    let mut sentinel = 0usize;
    let masked_set: HashSet<usize> = masked.iter().copied().collect();
    for (i, t) in m.tokens.iter().enumerate() {
        if masked_set.contains(&i) {
            let s = format!("<extra_id_{sentinel}>");
            sentinel += 1;
            target.push(s.clone());
            target.push(t.text.clone());
            input.push(s);
        } else {
            input.push(t.text.clone());
        }
    }

    Ok(DatasetInstance {
        instance_id: format!("P1-{}", m.id),
        task: Task::P1,
        method_id: m.id.clone(),
        removed_index: None,
        input: lexer::render_texts(&input),
        target: lexer::render_texts(&target),
    })
}

/// Build a position-tagging (P2) instance: input is the method with the
/// k-th log statement removed, target re-marks the removal site with a
/// single `<LOG_STMT>` token.
pub fn build_p2(m: &MethodRecord, k: usize, detector: &LogDetector) -> Result<DatasetInstance> {
    let (reduced, removed) = remove_log(m, k, detector)?;
    let with_placeholder = insert_placeholder(&reduced, removed.anchor)?;
    Ok(DatasetInstance {
        instance_id: format!("P2-{}-{k}", m.id),
        task: Task::P2,
        method_id: m.id.clone(),
        removed_index: Some(k),
        input: lexer::render(&reduced),
        target: lexer::render(&with_placeholder),
    })
}

/// Build a full-statement (FT) instance: same input as P2, but the
/// target contains the complete removed log statement at its original
/// position.
pub fn build_ft(m: &MethodRecord, k: usize, detector: &LogDetector) -> Result<DatasetInstance> {
    let (reduced, removed) = remove_log(m, k, detector)?;
    let restored = reinsert(&reduced, &removed);
    Ok(DatasetInstance {
        instance_id: format!("FT-{}-{k}", m.id),
        task: Task::FT,
        method_id: m.id.clone(),
        removed_index: Some(k),
        input: lexer::render(&reduced),
        target: lexer::render(&restored),
    })
}

/// Instance-id -> split partition; instances sharing a method never
/// straddle splits.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SplitAssignment {
    assignment: HashMap<String, Split>,
}

impl SplitAssignment {
    pub fn get(&self, instance_id: &str) -> Option<Split> {
        self.assignment.get(instance_id).copied()
    }

    pub fn insert(&mut self, instance_id: String, split: Split) {
        self.assignment.insert(instance_id, split);
    }

    pub fn lines(&self) -> Vec<SplitLine> {
        let mut lines: Vec<SplitLine> = self
            .assignment
            .iter()
            .map(|(id, s)| SplitLine { instance_id: id.clone(), split: *s })
            .collect();
        lines.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
        lines
    }

    pub fn from_lines(lines: &[SplitLine]) -> Self {
        let mut a = SplitAssignment::default();
        for l in lines {
            a.insert(l.instance_id.clone(), l.split);
        }
        a
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

/// Deterministic grouped split. Grouping key is `method_id`; groups are
/// shuffled by `seed` and assigned train/eval/test by the given ratios
/// (floor for train and eval, remainder to test).
pub fn split(
    instances: &[DatasetInstance],
    ratios: [f64; 3],
    seed: u64,
) -> Result<SplitAssignment> {
    if (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios must sum to 1, got {ratios:?}")));
    }
    // Groups in first-occurrence order, then seeded shuffle.
    let mut group_order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&DatasetInstance>> = HashMap::new();
    for inst in instances {
        groups
            .entry(inst.method_id.as_str())
            .or_insert_with(|| {
                group_order.push(inst.method_id.as_str());
                Vec::new()
            })
            .push(inst);
    }
    if group_order.len() < 3 {
        return Err(Error::Config(format!(
            "need at least 3 method groups to split, got {}",
            group_order.len()
        )));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    group_order.shuffle(&mut rng);

    let n = group_order.len();
    let n_train = (ratios[0] * n as f64).floor() as usize;
    let n_eval = (ratios[1] * n as f64).floor() as usize;

    let mut assignment = SplitAssignment::default();
    for (gi, key) in group_order.iter().enumerate() {
        let s = if gi < n_train {
            Split::Train
        } else if gi < n_train + n_eval {
            Split::Eval
        } else {
            Split::Test
        };
        for inst in &groups[key] {
            assignment.insert(inst.instance_id.clone(), s);
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub seed: u64,
    pub mask_ratio: f64,
    /// Fraction of logged methods routed to the P2 pool; the remainder
    /// builds the FT dataset. `None` routes every logged method to both
    /// pools.
    pub p2_share: Option<f64>,
    pub split_ratios: [f64; 3],
    pub extra_receivers: Vec<String>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            seed: 7,
            mask_ratio: 0.15,
            p2_share: Some(0.5),
            split_ratios: [0.8, 0.1, 0.1],
            extra_receivers: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BuildStats {
    pub methods_in: usize,
    pub methods_kept: usize,
    pub methods_logged: usize,
    pub p1_instances: usize,
    pub p2_instances: usize,
    pub ft_instances: usize,
    pub p1_skipped_empty_mask: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BuildOutput {
    pub p1: Vec<DatasetInstance>,
    pub p2: Vec<DatasetInstance>,
    pub ft: Vec<DatasetInstance>,
    /// Split over FT instances (the fine-tuning dataset); P1/P2
    /// instances are all training material.
    pub ft_split: SplitAssignment,
    pub stats: BuildStats,
}

/// Full builder pipeline: filter, route methods to tasks, build
/// instances and split the FT dataset.
pub fn build_all(records: Vec<MethodRecord>, opts: &BuildOptions) -> Result<BuildOutput> {
    if !(opts.mask_ratio > 0.0 && opts.mask_ratio < 1.0) {
        return Err(Error::Config(format!("mask_ratio must be in (0,1), got {}", opts.mask_ratio)));
    }
    let detector = LogDetector::new(&opts.extra_receivers);
    let mut out = BuildOutput::default();
    out.stats.methods_in = records.len();

    let kept = filter_methods(records);
    out.stats.methods_kept = kept.len();

    let (logged, unlogged): (Vec<_>, Vec<_>) = kept
        .into_iter()
        .partition(|m| !detector.find_log_statements(m).is_empty());
    out.stats.methods_logged = logged.len();

    // Route logged methods between the P2 and FT pools.
    let (p2_pool, ft_pool): (Vec<&MethodRecord>, Vec<&MethodRecord>) = match opts.p2_share {
        None => (logged.iter().collect(), logged.iter().collect()),
        Some(share) => {
            if !(0.0..=1.0).contains(&share) {
                return Err(Error::Config(format!("p2_share must be in [0,1], got {share}")));
            }
            let mut ids: Vec<usize> = (0..logged.len()).collect();
            ids.shuffle(&mut ChaCha20Rng::seed_from_u64(opts.seed ^ 0x7032_5348_4152_4531));
            let cut = (share * logged.len() as f64).floor() as usize;
            let p2_ids: HashSet<usize> = ids[..cut].iter().copied().collect();
            let (p2, ft): (Vec<usize>, Vec<usize>) =
                (0..logged.len()).partition(|i| p2_ids.contains(i));
            (
                p2.into_iter().map(|i| &logged[i]).collect(),
                ft.into_iter().map(|i| &logged[i]).collect(),
            )
        }
    };

    for m in &unlogged {
        match build_p1(m, opts.mask_ratio, opts.seed) {
            Ok(inst) => out.p1.push(inst),
            Err(Error::EmptyMaskSet) => out.stats.p1_skipped_empty_mask += 1,
            Err(e) => return Err(e),
        }
    }
    for m in p2_pool {
        let n = detector.find_log_statements(m).len();
        for k in 0..n {
            out.p2.push(build_p2(m, k, &detector)?);
        }
    }
    for m in ft_pool {
        let n = detector.find_log_statements(m).len();
        for k in 0..n {
            out.ft.push(build_ft(m, k, &detector)?);
        }
    }

    out.stats.p1_instances = out.p1.len();
    out.stats.p2_instances = out.p2.len();
    out.stats.ft_instances = out.ft.len();

    out.ft_split = split(&out.ft, opts.split_ratios, opts.seed)?;
    Ok(out)
}

/// Count sentinel tokens in a P1 input text.
pub fn count_sentinels(text: &str) -> usize {
    text.split(' ').filter(|t| lexer::is_sentinel(t) && *t != lexer::LOG_STMT_TOKEN).count()
}

/// True if a token sequence contains the `<LOG_STMT>` placeholder.
pub fn has_placeholder(tokens: &[Token]) -> bool {
    tokens.iter().any(|t| t.text == lexer::LOG_STMT_TOKEN && t.kind == TokenKind::Identifier)
}
