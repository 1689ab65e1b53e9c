//! Corpus mining: walk cloned repository trees, keep repos declaring a
//! Maven Log4j dependency, extract every method and stream it to the
//! sink. Any POM anywhere in the tree qualifies the whole repo
//! (multi-module builds); Gradle builds are not inspected.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::Result;
use crate::jsonl::MethodLine;
use crate::logstmt::LogDetector;
use crate::method::extract_methods;

const LOG4J_GROUP_IDS: &[&str] = &["log4j", "org.apache.logging.log4j"];
const LOG4J_ARTIFACT_IDS: &[&str] = &["log4j", "log4j-core", "log4j-api"];

/// True iff the POM declares a dependency on Apache Log4j. Malformed
/// XML is tolerated and yields false; `log4j` inside comments or
/// unrelated elements does not count.
pub fn pom_declares_log4j(pom_text: &str) -> bool {
    let Ok(doc) = roxmltree::Document::parse(pom_text) else { return false };
    doc.descendants()
        .filter(|n| n.has_tag_name("dependency"))
        .any(|dep| {
            let child_text = |name: &str| {
                dep.children()
                    .find(|c| c.has_tag_name(name))
                    .and_then(|c| c.text())
                    .map(str::trim)
            };
            child_text("groupId").is_some_and(|g| LOG4J_GROUP_IDS.contains(&g))
                || child_text("artifactId").is_some_and(|a| LOG4J_ARTIFACT_IDS.contains(&a))
        })
}

/// One inspected repository root.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepoManifest {
    pub repo: String,
    pub root: PathBuf,
    pub has_log4j: bool,
    pub java_file_count: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MiningSummary {
    pub repos_kept: usize,
    pub repos_skipped: usize,
    pub methods: usize,
    pub methods_with_log: usize,
    pub files_skipped: usize,
    pub repos: Vec<RepoManifest>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct MineOptions {
    pub extra_receivers: Vec<String>,
    pub exclude_globs: Vec<String>,
}

impl MineOptions {
    fn excluded(&self, rel_path: &str) -> bool {
        self.exclude_globs.iter().any(|g| {
            glob::Pattern::new(g).map(|p| p.matches(rel_path)).unwrap_or(false)
        })
    }
}

/// Walk `roots` and append one [`MethodLine`] per extracted method to
/// `sink`. Repos without a Log4j POM contribute nothing. Traversal is
/// lexicographic by path, so two runs over the same tree produce the
/// same record sequence.
pub fn mine<F>(roots: &[PathBuf], opts: &MineOptions, mut sink: F) -> Result<MiningSummary>
where
    F: FnMut(MethodLine) -> Result<()>,
{
    let mut summary = MiningSummary::default();
    let detector = LogDetector::new(&opts.extra_receivers);

    let mut roots: Vec<&PathBuf> = roots.iter().collect();
    roots.sort();

    for root in roots {
        let repo = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| root.display().to_string());

        let files = match collect_files(root) {
            Ok(f) => f,
            Err(e) => {
                summary.warnings.push(format!("{repo}: {e}; repo skipped"));
                summary.repos_skipped += 1;
                continue;
            }
        };

        let has_log4j = files
            .iter()
            .filter(|p| p.file_name().is_some_and(|n| n.eq_ignore_ascii_case("pom.xml")))
            .any(|pom| match std::fs::read_to_string(pom) {
                Ok(text) => pom_declares_log4j(&text),
                Err(e) => {
                    summary.warnings.push(format!("{}: unreadable ({e})", pom.display()));
                    false
                }
            });

        let java_files: Vec<&PathBuf> = files
            .iter()
            .filter(|p| p.extension().is_some_and(|e| e == "java"))
            .filter(|p| {
                let rel = p.strip_prefix(root).unwrap_or(p).to_string_lossy().replace('\\', "/");
                !opts.excluded(&rel)
            })
            .collect();

        summary.repos.push(RepoManifest {
            repo: repo.clone(),
            root: root.to_path_buf(),
            has_log4j,
            java_file_count: java_files.len(),
        });
        if !has_log4j {
            summary.repos_skipped += 1;
            continue;
        }
        summary.repos_kept += 1;

        // File-level parallelism; results are collected in traversal
        // order before hitting the single serialized sink.
        let per_file: Vec<(PathBuf, std::result::Result<FileMined, String>)> = java_files
            .par_iter()
            .map(|path| {
                let rel = path.strip_prefix(root).unwrap_or(path).to_string_lossy().into_owned();
                let lines = mine_file(path, &repo, &rel, &detector);
                ((*path).clone(), lines)
            })
            .collect();

        for (path, result) in per_file {
            match result {
                Ok(mined) => {
                    summary.warnings.extend(mined.warnings);
                    for line in mined.lines {
                        summary.methods += 1;
                        if line.n_logs > 0 {
                            summary.methods_with_log += 1;
                        }
                        sink(line)?;
                    }
                }
                Err(message) => {
                    summary.files_skipped += 1;
                    summary.warnings.push(format!("{}: {message}", path.display()));
                }
            }
        }
    }

    Ok(summary)
}

struct FileMined {
    lines: Vec<MethodLine>,
    warnings: Vec<String>,
}

fn mine_file(
    path: &Path,
    repo: &str,
    rel: &str,
    detector: &LogDetector,
) -> std::result::Result<FileMined, String> {
    let source = std::fs::read_to_string(path).map_err(|e| format!("read failed: {e}"))?;
    let (records, warnings) = extract_methods(&source, repo, rel).map_err(|e| e.to_string())?;
    let mut lines = Vec::with_capacity(records.len());
    for r in records {
        let stmts = detector.find_log_statements(&r);
        lines.push(MethodLine {
            id: r.id.clone(),
            repo: repo.to_string(),
            path: rel.to_string(),
            tokens: r.normalized_text(),
            n_logs: stmts.len(),
            log_spans: stmts.iter().map(|s| (s.start, s.end)).collect(),
            log_levels: stmts.iter().map(|s| s.level).collect(),
        });
    }
    let warnings = warnings.into_iter().map(|w| format!("{}: {}", w.path, w.message)).collect();
    Ok(FileMined { lines, warnings })
}

fn collect_files(root: &Path) -> std::io::Result<Vec<PathBuf>> {
    if !root.exists() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{} does not exist", root.display()),
        ));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(std::io::Error::other)?;
        if entry.file_type().is_file() {
            files.push(entry.into_path());
        }
    }
    files.sort();
    Ok(files)
}
