//! Non-neural baseline predictors over FT inputs. Both emit a full
//! method text that differs from the input by exactly one inserted log
//! statement, so the evaluator's locator succeeds on every output.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetInstance;
use crate::error::{Error, Result};
use crate::lexer::{self, Token, TokenKind};
use crate::logstmt::LogDetector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Heuristic,
    Retrieval,
}

impl std::str::FromStr for BaselineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heuristic" => Ok(BaselineKind::Heuristic),
            "retrieval" => Ok(BaselineKind::Retrieval),
            other => Err(Error::Config(format!("unknown baseline '{other}'"))),
        }
    }
}

/// Rule-based predictor: `logger.error("<name> failed", <ex>);` at the
/// head of the first catch block when one exists, otherwise
/// `logger.info("<name>");` as the first body statement. The receiver
/// is always `logger`, a deliberate naivety the evaluator scores as a
/// message mismatch when the method uses another logger field.
pub fn predict_heuristic(input: &[Token]) -> String {
    let name = method_name(input).unwrap_or_else(|| "method".to_string());

    let statement: Vec<String>;
    let at = if let Some((var, open)) = first_catch(input) {
        statement = log_call("error", &format!("\"{name} failed\""), Some(&var));
        open + 1
    } else {
        statement = log_call("info", &format!("\"{name}\""), None);
        body_open(input).map(|i| i + 1).unwrap_or(input.len())
    };

    let mut texts: Vec<String> = input.iter().map(|t| t.text.clone()).collect();
    texts.splice(at..at, statement);
    lexer::render_texts(&texts)
}

fn log_call(level: &str, message: &str, arg: Option<&str>) -> Vec<String> {
    let mut s: Vec<String> =
        ["logger", ".", level, "(", message].iter().map(|t| t.to_string()).collect();
    if let Some(a) = arg {
        s.push(",".into());
        s.push(a.to_string());
    }
    s.push(")".into());
    s.push(";".into());
    s
}

/// Identifier preceding the first signature `(` (annotation argument
/// groups are skipped).
fn method_name(tokens: &[Token]) -> Option<String> {
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].kind == TokenKind::Annotation
            && tokens.get(i + 1).is_some_and(|t| t.text == "(")
        {
            i = crate::method::match_paren(tokens, i + 1)? + 1;
            continue;
        }
        if tokens[i].text == "(" && i > 0 && tokens[i - 1].kind == TokenKind::Identifier {
            return Some(tokens[i - 1].text.clone());
        }
        i += 1;
    }
    None
}

/// First `{` outside any paren/bracket group: the method body opener.
fn body_open(tokens: &[Token]) -> Option<usize> {
    let mut depth = 0i64;
    for (i, t) in tokens.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" => depth += 1,
            ")" | "]" => depth -= 1,
            "{" if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// First `catch ( ... <id> )` clause: returns (exception variable,
/// index of the block's `{`).
fn first_catch(tokens: &[Token]) -> Option<(String, usize)> {
    for (i, t) in tokens.iter().enumerate() {
        if t.text == "catch" && tokens.get(i + 1).is_some_and(|t| t.text == "(") {
            let close = crate::method::match_paren(tokens, i + 1)?;
            let var = tokens.get(close.checked_sub(1)?)?;
            if var.kind != TokenKind::Identifier {
                continue;
            }
            if tokens.get(close + 1).is_some_and(|t| t.text == "{") {
                return Some((var.text.clone(), close + 1));
            }
        }
    }
    None
}

/// One train-split FT instance in the retrieval index.
#[derive(Debug, Clone)]
pub struct IndexEntry {
    /// Distinct token texts of the FT input.
    pub bag: HashSet<String>,
    /// The removed span's token texts (guard included when present).
    pub statement: Vec<String>,
    /// anchor / input token count.
    pub anchor_fraction: f64,
}

/// Nearest-neighbor index over train-split FT inputs.
#[derive(Debug, Clone, Default)]
pub struct RetrievalIndex {
    entries: Vec<IndexEntry>,
}

impl RetrievalIndex {
    /// Build from train-split FT instances.
    pub fn build(train: &[&DatasetInstance], detector: &LogDetector) -> Result<Self> {
        let mut entries = Vec::with_capacity(train.len());
        for inst in train {
            let input = lexer::tokenize(&inst.input)?;
            let target = lexer::tokenize(&inst.target)?;
            let found = crate::logstmt::locate_injected_tokens(&input, &target, detector)
                .ok_or_else(|| {
                    Error::Config(format!("instance {} has no recoverable insertion", inst.instance_id))
                })?;
            // Inserted span = everything the target adds over the input.
            let span_len = target.len() - input.len();
            let inserted: Vec<String> =
                target[found.anchor..found.anchor + span_len].iter().map(|t| t.text.clone()).collect();
            entries.push(IndexEntry {
                bag: input.iter().map(|t| t.text.clone()).collect(),
                statement: inserted,
                anchor_fraction: found.anchor as f64 / input.len().max(1) as f64,
            });
        }
        Ok(RetrievalIndex { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nearest neighbor by Jaccard similarity over token bags; ties go
    /// to the lower entry ordinal.
    pub fn nearest(&self, bag: &HashSet<String>) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, entry) in self.entries.iter().enumerate() {
            let sim = jaccard(bag, &entry.bag);
            if best.is_none_or(|(_, b)| sim > b) {
                best = Some((i, sim));
            }
        }
        best
    }

    pub fn entry(&self, i: usize) -> &IndexEntry {
        &self.entries[i]
    }
}

/// |A ∩ B| / |A ∪ B|; 1.0 for two empty sets.
pub fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Retrieval predictor: transfer the nearest neighbor's removed
/// statement at its fractional anchor, clamped to the nearest statement
/// boundary inside the method body.
pub fn predict_retrieval(index: &RetrievalIndex, input: &[Token]) -> Result<String> {
    if index.is_empty() {
        return Err(Error::Config("retrieval index is empty".to_string()));
    }
    let bag: HashSet<String> = input.iter().map(|t| t.text.clone()).collect();
    let (ni, _) = index.nearest(&bag).expect("non-empty index");
    let entry = index.entry(ni);

    let target = (entry.anchor_fraction * input.len() as f64).round() as usize;
    let at = clamp_to_boundary(input, target);

    let mut texts: Vec<String> = input.iter().map(|t| t.text.clone()).collect();
    texts.splice(at..at, entry.statement.iter().cloned());
    Ok(lexer::render_texts(&texts))
}

/// Valid insertion points are right after `{`, `;` or `}` tokens inside
/// the method body; pick the one nearest to `target` (ties toward the
/// smaller index).
fn clamp_to_boundary(input: &[Token], target: usize) -> usize {
    let open = body_open(input).unwrap_or(0);
    let close = input.len().saturating_sub(1); // final `}`
    let mut candidates = Vec::new();
    for (i, t) in input.iter().enumerate() {
        if i < open || i >= close {
            continue;
        }
        if matches!(t.text.as_str(), "{" | ";" | "}") {
            candidates.push(i + 1);
        }
    }
    if candidates.is_empty() {
        return open + 1;
    }
    *candidates
        .iter()
        .min_by_key(|&&c| (c.abs_diff(target), c))
        .expect("non-empty candidates")
}

/// Run one baseline over a set of FT instances.
pub fn predict_all(
    kind: BaselineKind,
    instances: &[DatasetInstance],
    train: &[&DatasetInstance],
    detector: &LogDetector,
) -> Result<Vec<(String, String)>> {
    let index = match kind {
        BaselineKind::Retrieval => Some(RetrievalIndex::build(train, detector)?),
        BaselineKind::Heuristic => None,
    };
    let mut out = Vec::with_capacity(instances.len());
    for inst in instances {
        let input = lexer::tokenize(&inst.input)?;
        let text = match &index {
            Some(idx) => predict_retrieval(idx, &input)?,
            None => predict_heuristic(&input),
        };
        out.push((inst.instance_id.clone(), text));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::build_ft;
    use crate::logstmt::{locate_injected_statement, LogLevel};
    use crate::method::{extract_methods, syntax_check, MethodRecord};

    fn det() -> LogDetector {
        LogDetector::default()
    }

    fn method(src: &str) -> MethodRecord {
        let (mut records, _) = extract_methods(src, "r", "T.java").unwrap();
        records.remove(0)
    }

    #[test]
    fn heuristic_targets_first_catch_block() {
        let m = method(
            "class T { void foo() { try { a(); } catch (Exception e) { handle(e); } } }",
        );
        let pred = predict_heuristic(&m.tokens);
        assert!(pred.contains("logger . error ( \"foo failed\" , e ) ;"));
        assert!(syntax_check(&pred));
        let found = locate_injected_statement(&m.tokens, &pred, &det()).unwrap();
        assert_eq!(found.level, LogLevel::Error);
    }

    #[test]
    fn heuristic_falls_back_to_body_head() {
        let m = method("class T { int add(int a, int b) { return a + b; } }");
        let pred = predict_heuristic(&m.tokens);
        assert!(pred.contains("{ logger . info ( \"add\" ) ;"));
        assert!(syntax_check(&pred));
        assert!(locate_injected_statement(&m.tokens, &pred, &det()).is_some());
    }

    #[test]
    fn jaccard_matches_set_arithmetic() {
        let mk = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<HashSet<_>>();
        assert_eq!(jaccard(&mk(&["a", "b"]), &mk(&["a", "b"])), 1.0);
        assert_eq!(jaccard(&mk(&["a", "b"]), &mk(&["c"])), 0.0);
        assert!((jaccard(&mk(&["a", "b", "c"]), &mk(&["b", "c", "d"])) - 0.5).abs() < 1e-12);
        assert_eq!(jaccard(&mk(&[]), &mk(&[])), 1.0);
    }

    fn ft(src: &str) -> DatasetInstance {
        build_ft(&method(src), 0, &det()).unwrap()
    }

    #[test]
    fn retrieval_self_match_reproduces_neighbor() {
        let train = [ft(r#"class A { void a() { x(); logger.info("from a"); y(); } }"#),
            ft(r#"class B { void b() { u(); v(); logger.warn("from b"); } }"#)];
        let refs: Vec<&DatasetInstance> = train.iter().collect();
        let index = RetrievalIndex::build(&refs, &det()).unwrap();
        let input = lexer::tokenize(&train[1].input).unwrap();
        let pred = predict_retrieval(&index, &input).unwrap();
        assert!(pred.contains("logger . warn ( \"from b\" ) ;"));
        assert!(syntax_check(&pred));
    }

    #[test]
    fn retrieval_tie_prefers_lower_ordinal() {
        let a = ft(r#"class A { void m() { x(); logger.info("first"); } }"#);
        let mut b = a.clone();
        b.instance_id = "FT-copy-0".into();
        b.target = b.target.replace("\"first\"", "\"second\"");
        let train = vec![&a, &b];
        let index = RetrievalIndex::build(&train, &det()).unwrap();
        let input = lexer::tokenize(&a.input).unwrap();
        let pred = predict_retrieval(&index, &input).unwrap();
        assert!(pred.contains("\"first\""));
    }

    #[test]
    fn retrieval_empty_index_is_config_error() {
        let index = RetrievalIndex::default();
        let input = lexer::tokenize("void f ( ) { }").unwrap();
        assert!(matches!(predict_retrieval(&index, &input), Err(Error::Config(_))));
    }

    #[test]
    fn predictions_always_locate() {
        let train = vec![
            ft(r#"class A { void a() { x(); logger.info("a"); y(); } }"#),
            ft(r#"class B { void b() { try { w(); } catch (Exception ex) { logger.error("b", ex); } } }"#),
            ft(r#"class C { void c() { logger.debug("c"); z(); } }"#),
        ];
        let refs: Vec<&DatasetInstance> = train.iter().collect();
        for kind in [BaselineKind::Heuristic, BaselineKind::Retrieval] {
            let preds = predict_all(kind, &train, &refs, &det()).unwrap();
            for (id, text) in preds {
                assert!(syntax_check(&text), "{kind:?} {id} failed syntax");
                let input = lexer::tokenize(
                    &train.iter().find(|i| i.instance_id == id).unwrap().input,
                )
                .unwrap();
                assert!(
                    locate_injected_statement(&input, &text, &det()).is_some(),
                    "{kind:?} {id} failed locate"
                );
            }
        }
    }
}
