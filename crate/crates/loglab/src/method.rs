//! Method extraction by signature heuristic plus brace matching.
//!
//! A method is recognized inside a class body as an identifier followed
//! by a parenthesized parameter list, an optional `throws` clause and an
//! opening brace, not preceded by `new` or `.`. The record spans the
//! whole member declaration (annotations, modifiers, return type) up to
//! the matching closing brace. Bodies of nested anonymous classes and
//! lambdas stay inside the enclosing method's record; methods of named
//! inner classes become their own records. Constructors match the
//! heuristic and are extracted; static/instance initializer blocks are
//! not.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::lexer::{self, Token, TokenKind};
use crate::logstmt::LogStatement;

/// An extracted Java method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodRecord {
    /// Content hash of the normalized token text.
    pub id: String,
    pub repo: String,
    pub path: String,
    pub tokens: Vec<Token>,
    /// Original source slice of the method.
    pub raw_text: String,
    /// Filled by log detection; empty until then.
    pub log_statements: Vec<LogStatement>,
}

impl MethodRecord {
    pub fn from_tokens(tokens: Vec<Token>, raw_text: String, repo: &str, path: &str) -> Self {
        let normalized = lexer::render(&tokens);
        MethodRecord {
            id: content_id(&normalized),
            repo: repo.to_string(),
            path: path.to_string(),
            tokens,
            raw_text,
            log_statements: Vec::new(),
        }
    }

    /// Space-joined token text; the equality/hash key.
    pub fn normalized_text(&self) -> String {
        lexer::render(&self.tokens)
    }
}

/// Stable content id: truncated SHA-256 of the normalized token text.
pub fn content_id(normalized: &str) -> String {
    let digest = Sha256::digest(normalized.as_bytes());
    let mut s = String::with_capacity(32);
    for b in &digest[..16] {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Number of tokens composing a method (comments were dropped at lex time).
pub fn count_tokens(m: &MethodRecord) -> usize {
    m.tokens.len()
}

/// Non-fatal problem hit while extracting from one file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractWarning {
    pub path: String,
    pub message: String,
}

/// Extract all concrete methods from a Java source file.
///
/// Unbalanced braces abort the rest of the file with a warning instead
/// of failing it; lex errors are fatal for the file (the caller decides
/// whether to skip it).
pub fn extract_methods(
    source: &str,
    repo: &str,
    path: &str,
) -> Result<(Vec<MethodRecord>, Vec<ExtractWarning>)> {
    let (tokens, spans) = lexer::tokenize_with_spans(source)?;
    let mut records = Vec::new();
    let mut warnings = Vec::new();

    // Context: file level and class bodies behave the same for member
    // scanning; enum bodies suppress method detection until the first
    // `;` so constant lists with argument parens are not mistaken for
    // methods.
    let mut enum_header = vec![false]; // stack; bottom = file level
    let mut i = 0usize;

    while i < tokens.len() {
        let t = &tokens[i];
        let in_enum_header = *enum_header.last().unwrap();

        match (t.kind, t.text.as_str()) {
            (TokenKind::Separator, ";") => {
                if in_enum_header {
                    *enum_header.last_mut().unwrap() = false;
                }
                i += 1;
            }
            (TokenKind::Separator, "}") => {
                if enum_header.len() > 1 {
                    enum_header.pop();
                }
                i += 1;
            }
            (TokenKind::Separator, "{") => {
                // Initializer block or enum-constant body: skip it whole.
                match match_brace(&tokens, i) {
                    Some(close) => i = close + 1,
                    None => {
                        warnings.push(warn(path, &tokens[i], "unbalanced braces"));
                        break;
                    }
                }
            }
            (TokenKind::Keyword, "class" | "interface" | "enum") if !prev_is(&tokens, i, ".") => {
                let is_enum = t.text == "enum";
                // Scan the class header up to its body brace.
                match tokens[i..].iter().position(|t| t.text == "{") {
                    Some(off) => {
                        enum_header.push(is_enum);
                        i += off + 1;
                    }
                    None => {
                        i += 1; // header without body (e.g. `A.class` never hits this: `class` preceded by `.` is still the keyword, handled below)
                    }
                }
            }
            (TokenKind::Annotation, _) if next_is(&tokens, i, "(") => {
                // Annotation with arguments: skip the argument group.
                match match_paren(&tokens, i + 1) {
                    Some(close) => i = close + 1,
                    None => break,
                }
            }
            (TokenKind::Operator, "=") if !in_enum_header => {
                // Field initializer: skip to the terminating `;` at depth 0.
                i = skip_initializer(&tokens, i + 1);
            }
            (TokenKind::Identifier, _)
                if !in_enum_header
                    && next_is(&tokens, i, "(")
                    && !prev_is(&tokens, i, "new")
                    && !prev_is(&tokens, i, ".") =>
            {
                match try_method(&tokens, i) {
                    MethodMatch::Body { open, close: None } => {
                        warnings.push(warn(path, &tokens[open], "unbalanced braces"));
                        break;
                    }
                    MethodMatch::Body { close: Some(close), .. } => {
                        let start = decl_start(&tokens, i);
                        let mut method_tokens = tokens[start..=close].to_vec();
                        lexer::reindex(&mut method_tokens);
                        let raw = source[spans[start].start..spans[close].end].to_string();
                        records.push(MethodRecord::from_tokens(method_tokens, raw, repo, path));
                        i = close + 1;
                    }
                    MethodMatch::Abstract { semi } => i = semi + 1,
                    MethodMatch::No => i += 1,
                }
            }
            _ => i += 1,
        }
    }

    Ok((records, warnings))
}

fn warn(path: &str, at: &Token, message: &str) -> ExtractWarning {
    ExtractWarning { path: path.to_string(), message: format!("{message} near {}:{}", at.line, at.col) }
}

fn next_is(tokens: &[Token], i: usize, text: &str) -> bool {
    tokens.get(i + 1).is_some_and(|t| t.text == text)
}

fn prev_is(tokens: &[Token], i: usize, text: &str) -> bool {
    i > 0 && tokens[i - 1].text == text
}

enum MethodMatch {
    /// Signature matched and a body opens at `open`; `close` is its
    /// matching brace (None when unbalanced).
    Body { open: usize, close: Option<usize> },
    /// Signature matched but ends with `;` (abstract/interface member).
    Abstract { semi: usize },
    No,
}

/// `tokens[i]` is an identifier followed by `(`. Decide whether this is
/// a method declaration and locate its body.
fn try_method(tokens: &[Token], i: usize) -> MethodMatch {
    let Some(close_paren) = match_paren(tokens, i + 1) else { return MethodMatch::No };
    let mut j = close_paren + 1;

    if tokens.get(j).is_some_and(|t| t.text == "throws") {
        j += 1;
        // Exception list: identifiers, dots, commas.
        while tokens.get(j).is_some_and(|t| {
            t.kind == TokenKind::Identifier || t.text == "." || t.text == ","
        }) {
            j += 1;
        }
    }

    match tokens.get(j).map(|t| t.text.as_str()) {
        Some("{") => MethodMatch::Body { open: j, close: match_brace(tokens, j) },
        Some(";") => MethodMatch::Abstract { semi: j },
        _ => MethodMatch::No,
    }
}

/// Walk back from the method name to the start of the member
/// declaration: the token after the previous `;`, `{` or `}`.
fn decl_start(tokens: &[Token], name_idx: usize) -> usize {
    let mut s = name_idx;
    while s > 0 {
        let prev = &tokens[s - 1];
        if matches!(prev.text.as_str(), ";" | "{" | "}") {
            break;
        }
        s -= 1;
    }
    s
}

/// Skip a field initializer starting right after `=`; returns the index
/// after the terminating `;`.
fn skip_initializer(tokens: &[Token], mut i: usize) -> usize {
    let mut depth = 0i64;
    while i < tokens.len() {
        match tokens[i].text.as_str() {
            "(" | "{" | "[" => depth += 1,
            ")" | "}" | "]" => depth -= 1,
            ";" if depth == 0 => return i + 1,
            _ => {}
        }
        i += 1;
    }
    i
}

/// Index of the `)` matching the `(` at `open`, or None.
pub fn match_paren(tokens: &[Token], open: usize) -> Option<usize> {
    match_pair(tokens, open, "(", ")")
}

/// Index of the `}` matching the `{` at `open`, or None.
pub fn match_brace(tokens: &[Token], open: usize) -> Option<usize> {
    match_pair(tokens, open, "{", "}")
}

fn match_pair(tokens: &[Token], open: usize, open_text: &str, close_text: &str) -> Option<usize> {
    debug_assert_eq!(tokens[open].text, open_text);
    let mut depth = 0usize;
    for (off, t) in tokens[open..].iter().enumerate() {
        if t.text == open_text {
            depth += 1;
        } else if t.text == close_text {
            depth -= 1;
            if depth == 0 {
                return Some(open + off);
            }
        }
    }
    None
}

/// Necessary-condition syntax validity for a method text: it lexes, all
/// bracket kinds balance with correct nesting, the text ends with `}`,
/// and inside every code block each `}` is preceded by `;`, `{`, `}` or
/// `:` (statement-shape check). Array/annotation initializer braces are
/// exempt from the statement-shape rule. Strictly weaker than a full
/// Java parse.
pub fn syntax_check(method_text: &str) -> bool {
    let Ok(tokens) = lexer::tokenize(method_text) else { return false };
    if tokens.is_empty() {
        return false;
    }
    if tokens.last().unwrap().text != "}" {
        return false;
    }

    // (open kind, is_code_block)
    let mut stack: Vec<(char, bool)> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        match t.text.as_str() {
            "(" => stack.push(('(', false)),
            "[" => stack.push(('[', false)),
            "{" => {
                let is_block = i == 0
                    || !matches!(tokens[i - 1].text.as_str(), "=" | "," | "(" | "[" | "]" | "{");
                stack.push(('{', is_block));
            }
            ")" => {
                if stack.pop().map(|(k, _)| k) != Some('(') {
                    return false;
                }
            }
            "]" => {
                if stack.pop().map(|(k, _)| k) != Some('[') {
                    return false;
                }
            }
            "}" => match stack.pop() {
                Some(('{', is_block)) => {
                    if is_block {
                        // i > 0 because a block `{` precedes this token.
                        let prev = tokens[i - 1].text.as_str();
                        if !matches!(prev, ";" | "{" | "}" | ":") {
                            return false;
                        }
                    }
                }
                _ => return false,
            },
            _ => {}
        }
    }
    stack.is_empty()
}
