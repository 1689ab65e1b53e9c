//! Stage drivers behind the `loglab` CLI. Each stage reads only
//! prior-stage artifacts, writes its outputs atomically (temp file +
//! rename, so failures leave no partial outputs) and records a
//! reproducibility manifest next to them.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::baseline::{predict_all, BaselineKind};
use crate::config::RunConfig;
use crate::dataset::{build_all, record_from_line, BuildOptions, BuildStats, DatasetInstance, Split, SplitAssignment};
use crate::error::{Error, Result};
use crate::eval::{evaluate_all, render_comparison_markdown, render_markdown, EvaluationReport};
use crate::jsonl::{self, JsonlWriter, MethodLine, PredictionLine, SplitLine, StageManifest};
use crate::logstmt::LogDetector;
use crate::miner::{mine, MineOptions, MiningSummary};

fn require(path: &Path, produced_by: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingArtifact(format!(
            "{} (run `loglab {produced_by}` first)",
            path.display()
        )))
    }
}

/// Temp-file path next to `path`.
fn tmp_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".tmp");
    PathBuf::from(os)
}

fn commit(tmp: &Path, path: &Path) -> Result<()> {
    std::fs::rename(tmp, path)?;
    Ok(())
}

pub fn run_mine(cfg: &RunConfig) -> Result<MiningSummary> {
    if cfg.roots.is_empty() {
        return Err(Error::Config("mine needs at least one --roots directory".into()));
    }
    let opts = MineOptions {
        extra_receivers: cfg.receiver_extra.clone(),
        exclude_globs: cfg.exclude_globs.clone(),
    };
    let out = &cfg.methods_file;
    let tmp = tmp_path(out);
    let mut writer = JsonlWriter::<MethodLine>::create(&tmp)?;
    let summary = match mine(&cfg.roots, &opts, |line| writer.write(&line)) {
        Ok(s) => s,
        Err(e) => {
            let _ = std::fs::remove_file(&tmp);
            return Err(e);
        }
    };
    writer.finish()?;
    commit(&tmp, out)?;

    let mut manifest = StageManifest::new("mine", cfg.seed, serde_json::to_value(cfg)?);
    manifest.add_input(out)?;
    manifest.write(&out.with_extension("manifest.json"))?;
    Ok(summary)
}

pub fn run_build(cfg: &RunConfig) -> Result<BuildStats> {
    require(&cfg.methods_file, "mine")?;
    let lines: Vec<MethodLine> = jsonl::read_all(&cfg.methods_file)?;
    let records = lines.iter().map(record_from_line).collect::<Result<Vec<_>>>()?;

    let opts = BuildOptions {
        seed: cfg.seed,
        mask_ratio: cfg.mask_ratio,
        p2_share: if cfg.both_pools { None } else { Some(cfg.p2_share) },
        split_ratios: cfg.split_ratios,
        extra_receivers: cfg.receiver_extra.clone(),
    };
    let out = build_all(records, &opts)?;

    let dir = &cfg.data_dir;
    std::fs::create_dir_all(dir)?;
    let files = [
        ("p1.jsonl", &out.p1),
        ("p2.jsonl", &out.p2),
        ("ft.jsonl", &out.ft),
    ];
    let mut pending: Vec<(PathBuf, PathBuf)> = Vec::new();
    let write_result: Result<()> = (|| {
        for (name, instances) in &files {
            let path = dir.join(name);
            let tmp = tmp_path(&path);
            jsonl::write_all(&tmp, instances)?;
            pending.push((tmp, path));
        }
        let split_path = dir.join("split.jsonl");
        let tmp = tmp_path(&split_path);
        jsonl::write_all(&tmp, &out.ft_split.lines())?;
        pending.push((tmp, split_path));
        Ok(())
    })();
    if let Err(e) = write_result {
        for (tmp, _) in &pending {
            let _ = std::fs::remove_file(tmp);
        }
        return Err(e);
    }
    for (tmp, path) in &pending {
        commit(tmp, path)?;
    }

    let mut manifest = StageManifest::new("build", cfg.seed, serde_json::to_value(cfg)?);
    manifest.add_input(&cfg.methods_file)?;
    manifest.write(&dir.join("manifest.json"))?;
    Ok(out.stats)
}

fn load_split_instances(
    cfg: &RunConfig,
    split: Split,
) -> Result<(Vec<DatasetInstance>, Vec<DatasetInstance>)> {
    let ft_path = cfg.data_dir.join("ft.jsonl");
    let split_path = cfg.data_dir.join("split.jsonl");
    require(&ft_path, "build")?;
    require(&split_path, "build")?;
    let ft: Vec<DatasetInstance> = jsonl::read_all(&ft_path)?;
    let assignment = SplitAssignment::from_lines(&jsonl::read_all::<SplitLine>(&split_path)?);
    let mut selected = Vec::new();
    let mut train = Vec::new();
    for inst in ft {
        match assignment.get(&inst.instance_id) {
            Some(s) if s == split => selected.push(inst),
            Some(Split::Train) => train.push(inst),
            _ => {}
        }
    }
    // When evaluating the train split itself, it is both pools.
    if split == Split::Train {
        train = selected.clone();
    }
    Ok((selected, train))
}

pub fn run_predict(
    cfg: &RunConfig,
    baseline: BaselineKind,
    split: Split,
    out: &Path,
) -> Result<usize> {
    let (selected, train) = load_split_instances(cfg, split)?;
    let detector = LogDetector::new(&cfg.receiver_extra);
    let train_refs: Vec<&DatasetInstance> = train.iter().collect();
    let preds = predict_all(baseline, &selected, &train_refs, &detector)?;

    let tmp = tmp_path(out);
    let lines: Vec<PredictionLine> = preds
        .into_iter()
        .map(|(instance_id, prediction_text)| PredictionLine { instance_id, prediction_text })
        .collect();
    jsonl::write_all(&tmp, &lines)?;
    commit(&tmp, out)?;

    let mut manifest = StageManifest::new("predict", cfg.seed, serde_json::to_value(cfg)?);
    manifest.add_input(&cfg.data_dir.join("ft.jsonl"))?;
    manifest.write(&out.with_extension("manifest.json"))?;
    Ok(lines.len())
}

fn evaluate_file(
    cfg: &RunConfig,
    split: Split,
    preds_path: &Path,
) -> Result<EvaluationReport> {
    let (selected, _) = load_split_instances(cfg, split)?;
    require(preds_path, "predict")?;
    let preds: Vec<PredictionLine> = jsonl::read_all(preds_path)?;
    let map: HashMap<String, String> =
        preds.into_iter().map(|p| (p.instance_id, p.prediction_text)).collect();
    let detector = LogDetector::new(&cfg.receiver_extra);
    let (report, _) = evaluate_all(&selected, &map, &detector)?;
    Ok(report)
}

pub fn run_evaluate(
    cfg: &RunConfig,
    split: Split,
    preds_path: &Path,
    out_json: &Path,
    out_md: Option<&Path>,
) -> Result<EvaluationReport> {
    let report = evaluate_file(cfg, split, preds_path)?;

    let tmp = tmp_path(out_json);
    std::fs::write(&tmp, serde_json::to_string_pretty(&report)?)?;
    commit(&tmp, out_json)?;
    if let Some(md) = out_md {
        let name = preds_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| preds_path.display().to_string());
        std::fs::write(md, render_markdown(&name, &report))?;
    }

    let mut manifest = StageManifest::new("evaluate", cfg.seed, serde_json::to_value(cfg)?);
    manifest.add_input(preds_path)?;
    manifest.write(&out_json.with_extension("manifest.json"))?;
    Ok(report)
}

/// Side-by-side comparison of several prediction files.
pub fn run_report(
    cfg: &RunConfig,
    split: Split,
    preds_paths: &[PathBuf],
    out_md: &Path,
) -> Result<String> {
    if preds_paths.is_empty() {
        return Err(Error::Config("report needs at least one --preds file".into()));
    }
    let mut entries = Vec::new();
    for path in preds_paths {
        let report = evaluate_file(cfg, split, path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        entries.push((name, report));
    }
    let md = render_comparison_markdown(&entries);
    std::fs::write(out_md, &md)?;
    Ok(md)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_without_mine_output_names_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            methods_file: dir.path().join("methods.jsonl"),
            data_dir: dir.path().join("data"),
            ..Default::default()
        };
        match run_build(&cfg) {
            Err(Error::MissingArtifact(msg)) => {
                assert!(msg.contains("methods.jsonl"));
                assert!(msg.contains("mine"));
            }
            other => panic!("unexpected: {other:?}"),
        }
    }
}
