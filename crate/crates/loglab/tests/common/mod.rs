//! Shared fixture generators for integration tests: synthetic Java
//! methods, class files and on-disk Maven repository trees. All
//! generation is seeded, so every test run sees the same corpus.
#![allow(dead_code)] // each test target uses a different subset

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use loglab::method::{extract_methods, MethodRecord};

pub const LEVELS: [&str; 6] = ["trace", "debug", "info", "warn", "error", "fatal"];

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// `logger.<level>("msg<tag>", v<tag>);` — message strings carry the tag
/// so every statement in a corpus is distinct.
pub fn log_stmt(level: &str, tag: usize) -> String {
    format!("logger.{level}(\"msg{tag} event\", v{tag});")
}

/// A method body of `n_stmts` four-token statements `sK();` with log
/// statements inserted before the statement indices in `logs`
/// (index == n_stmts appends at the end).
pub fn method_source(name: &str, n_stmts: usize, logs: &[(usize, String)]) -> String {
    let mut body = String::new();
    for k in 0..=n_stmts {
        for (at, stmt) in logs {
            if *at == k {
                let _ = writeln!(body, "        {stmt}");
            }
        }
        if k < n_stmts {
            let _ = writeln!(body, "        s{k}();");
        }
    }
    format!("    void {name}() {{\n{body}    }}\n")
}

/// Random method: 2..=8 plain statements, each log (0..=max_logs) at a
/// random slot with a random level.
pub fn random_method_source(name: &str, max_logs: usize, rng: &mut ChaCha20Rng) -> String {
    let n_stmts = rng.gen_range(2..=8);
    let n_logs = rng.gen_range(0..=max_logs);
    let mut logs = Vec::new();
    for _ in 0..n_logs {
        let level = LEVELS[rng.gen_range(0..LEVELS.len())];
        let tag = rng.gen_range(0..100_000);
        logs.push((rng.gen_range(0..=n_stmts), log_stmt(level, tag)));
    }
    method_source(name, n_stmts, &logs)
}

/// Extract the single method of a wrapped class body.
pub fn record_of(method_src: &str, path: &str) -> MethodRecord {
    let src = format!("class Fixture {{\n{method_src}}}\n");
    let (mut records, warnings) = extract_methods(&src, "fixture", path).unwrap();
    assert!(warnings.is_empty(), "fixture should extract cleanly: {warnings:?}");
    assert_eq!(records.len(), 1, "fixture should contain exactly one method");
    records.remove(0)
}

/// A method whose member declaration is exactly `n` tokens:
/// `void m ( ) { }` is 6, padded with lone `;` statements.
pub fn record_with_token_count(n: usize) -> MethodRecord {
    assert!(n >= 6);
    let body = "; ".repeat(n - 6);
    record_of(&format!("    void m() {{ {body} }}\n"), "padded.java")
}

const POM_LOG4J: &str = r#"<?xml version="1.0"?>
<project>
  <groupId>com.example</groupId>
  <artifactId>fixture</artifactId>
  <dependencies>
    <dependency>
      <groupId>org.apache.logging.log4j</groupId>
      <artifactId>log4j-core</artifactId>
      <version>2.20.0</version>
    </dependency>
  </dependencies>
</project>
"#;

/// Write a repository with a Log4j POM and `n_files` class files of
/// `methods_per_file` random methods each. Returns the method count.
pub fn write_repo(
    root: &Path,
    repo_name: &str,
    n_files: usize,
    methods_per_file: usize,
    max_logs: usize,
    rng: &mut ChaCha20Rng,
) -> usize {
    let repo = root.join(repo_name);
    let src_dir = repo.join("src/main/java");
    fs::create_dir_all(&src_dir).unwrap();
    fs::write(repo.join("pom.xml"), POM_LOG4J).unwrap();
    let mut methods = 0usize;
    for f in 0..n_files {
        let mut class = format!("class C{f} {{\n");
        for m in 0..methods_per_file {
            class.push_str(&random_method_source(&format!("m{f}_{m}"), max_logs, rng));
            methods += 1;
        }
        class.push_str("}\n");
        fs::write(src_dir.join(format!("C{f}.java")), class).unwrap();
    }
    methods
}
