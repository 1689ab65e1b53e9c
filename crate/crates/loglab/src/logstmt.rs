//! Detection and manipulation of Log4j-style log statements in method
//! token sequences.
//!
//! A log statement is `<recv> . <level> ( <args> ) ;` where `<level>` is
//! one of the six Log4j level names (case-insensitive on the call name)
//! and `<recv>` is a logger-like identifier: its lowercased text
//! contains `log`, or it is listed in the configured extra receivers.
//! Long-form `logger.log(Level.ERROR, ...)` calls are not detected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexer::{self, Token, TokenKind, LOG_STMT_TOKEN};
use crate::method::{match_paren, MethodRecord};

/// One of the six Log4j levels, ordered by priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LogLevel {
    Trace,
    Debug,
    Info,
    Warn,
    Error,
    Fatal,
}

pub const ALL_LEVELS: [LogLevel; 6] = [
    LogLevel::Trace,
    LogLevel::Debug,
    LogLevel::Info,
    LogLevel::Warn,
    LogLevel::Error,
    LogLevel::Fatal,
];

impl LogLevel {
    /// Priority rank, 1 (Trace) through 6 (Fatal).
    pub fn rank(self) -> u8 {
        match self {
            LogLevel::Trace => 1,
            LogLevel::Debug => 2,
            LogLevel::Info => 3,
            LogLevel::Warn => 4,
            LogLevel::Error => 5,
            LogLevel::Fatal => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogLevel::Trace => "trace",
            LogLevel::Debug => "debug",
            LogLevel::Info => "info",
            LogLevel::Warn => "warn",
            LogLevel::Error => "error",
            LogLevel::Fatal => "fatal",
        }
    }

    /// Case-insensitive match against the six level method names.
    pub fn from_name(name: &str) -> Option<LogLevel> {
        match name.to_ascii_lowercase().as_str() {
            "trace" => Some(LogLevel::Trace),
            "debug" => Some(LogLevel::Debug),
            "info" => Some(LogLevel::Info),
            "warn" => Some(LogLevel::Warn),
            "error" => Some(LogLevel::Error),
            "fatal" => Some(LogLevel::Fatal),
            _ => None,
        }
    }
}

impl std::fmt::Display for LogLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Absolute rank difference on the six-point level chain, in [0, 5].
pub fn level_distance(a: LogLevel, b: LogLevel) -> u8 {
    a.rank().abs_diff(b.rank())
}

/// A detected logging call inside a token sequence. Indices are
/// relative to the sequence it was detected in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogStatement {
    pub level: LogLevel,
    /// Token index of the receiver token.
    pub start: usize,
    /// Token index of the terminating `;`.
    pub end: usize,
    pub receiver: String,
    /// Argument-list token texts (between the call parentheses).
    pub message_tokens: Vec<String>,
}

/// Log-statement pattern matcher with configurable extra receiver names.
#[derive(Debug, Clone, Default)]
pub struct LogDetector {
    extra_receivers: Vec<String>,
}

impl LogDetector {
    pub fn new<S: AsRef<str>>(extra_receivers: &[S]) -> Self {
        LogDetector {
            extra_receivers: extra_receivers.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    fn logger_like(&self, text: &str) -> bool {
        text.to_ascii_lowercase().contains("log")
            || self.extra_receivers.iter().any(|r| r == text)
    }

    /// All log statements in a token slice, sorted and non-overlapping.
    pub fn find_in_tokens(&self, tokens: &[Token]) -> Vec<LogStatement> {
        let mut out = Vec::new();
        let mut i = 0usize;
        while i + 4 < tokens.len() {
            if let Some(stmt) = self.match_at(tokens, i) {
                i = stmt.end + 1;
                out.push(stmt);
            } else {
                i += 1;
            }
        }
        out
    }

    /// All log statements of a method record.
    pub fn find_log_statements(&self, m: &MethodRecord) -> Vec<LogStatement> {
        self.find_in_tokens(&m.tokens)
    }

    fn match_at(&self, tokens: &[Token], i: usize) -> Option<LogStatement> {
        let recv = &tokens[i];
        if recv.kind != TokenKind::Identifier || !self.logger_like(&recv.text) {
            return None;
        }
        // Receiver must start the expression: `this.logger.info(..)` is
        // not matched (removing from `logger` would strand `this .`).
        if i > 0 && tokens[i - 1].text == "." {
            return None;
        }
        if tokens[i + 1].text != "." {
            return None;
        }
        let call = &tokens[i + 2];
        if call.kind != TokenKind::Identifier {
            return None;
        }
        let level = LogLevel::from_name(&call.text)?;
        if tokens[i + 3].text != "(" {
            return None;
        }
        let close = match_paren(tokens, i + 3)?;
        if tokens.get(close + 1).map(|t| t.text.as_str()) != Some(";") {
            return None;
        }
        Some(LogStatement {
            level,
            start: i,
            end: close + 1,
            receiver: recv.text.clone(),
            message_tokens: tokens[i + 4..close].iter().map(|t| t.text.clone()).collect(),
        })
    }

    /// If the statement is the sole statement of an
    /// `if (recv.is<Level>Enabled()) { ... }` guard, widen the span to
    /// cover the guard. Returns (span_start, span_end, guard_fired),
    /// indices inclusive.
    fn guard_span(&self, tokens: &[Token], stmt: &LogStatement) -> (usize, usize, bool) {
        let fired = (|| {
            // Guard shape: if ( recv . isXEnabled ( ) ) {   -- 9 tokens.
            if stmt.start < 9 {
                return false;
            }
            let g = stmt.start - 9;
            let texts: Vec<&str> = tokens[g..stmt.start].iter().map(|t| t.text.as_str()).collect();
            if texts[0] != "if"
                || texts[1] != "("
                || texts[3] != "."
                || texts[5] != "("
                || texts[6] != ")"
                || texts[7] != ")"
                || texts[8] != "{"
            {
                return false;
            }
            if !self.logger_like(texts[2]) {
                return false;
            }
            let call = texts[4].to_ascii_lowercase();
            let is_enabled_call = call
                .strip_prefix("is")
                .and_then(|r| r.strip_suffix("enabled"))
                .is_some_and(|lvl| LogLevel::from_name(lvl).is_some());
            if !is_enabled_call {
                return false;
            }
            // Sole statement: the guard block closes right after it, and
            // no dangling `else` follows.
            if tokens.get(stmt.end + 1).map(|t| t.text.as_str()) != Some("}") {
                return false;
            }
            tokens.get(stmt.end + 2).map(|t| t.text.as_str()) != Some("else")
        })();
        if fired {
            (stmt.start - 9, stmt.end + 1, true)
        } else {
            (stmt.start, stmt.end, false)
        }
    }
}

/// Outcome of [`remove_log`]: the removed token span, where it was, and
/// the statement it contained.
#[derive(Debug, Clone)]
pub struct RemovedLog {
    /// The removed tokens (guard included when the guard rule fired).
    pub tokens: Vec<Token>,
    /// Insertion index in the reduced sequence; splicing `tokens` back
    /// at this index reproduces the original sequence.
    pub anchor: usize,
    /// The removed statement, indices relative to `tokens`.
    pub statement: LogStatement,
    pub guard_removed: bool,
}

impl RemovedLog {
    /// Normalized text of just the log statement (guard excluded).
    pub fn statement_text(&self) -> String {
        lexer::render(&self.tokens[self.statement.start..=self.statement.end])
    }
}

/// Remove the `k`-th log statement of `m`, widening to the enclosing
/// level guard when the guard rule fires.
pub fn remove_log(
    m: &MethodRecord,
    k: usize,
    detector: &LogDetector,
) -> Result<(Vec<Token>, RemovedLog)> {
    let stmts = detector.find_in_tokens(&m.tokens);
    let stmt = stmts
        .get(k)
        .ok_or(Error::IndexOutOfRange { index: k, len: stmts.len() })?;
    let (span_s, span_e, guard_removed) = detector.guard_span(&m.tokens, stmt);

    let removed: Vec<Token> = m.tokens[span_s..=span_e].to_vec();
    let mut reduced: Vec<Token> = Vec::with_capacity(m.tokens.len() - removed.len());
    reduced.extend_from_slice(&m.tokens[..span_s]);
    reduced.extend_from_slice(&m.tokens[span_e + 1..]);
    lexer::reindex(&mut reduced);

    let statement = LogStatement {
        level: stmt.level,
        start: stmt.start - span_s,
        end: stmt.end - span_s,
        receiver: stmt.receiver.clone(),
        message_tokens: stmt.message_tokens.clone(),
    };
    Ok((reduced, RemovedLog { tokens: removed, anchor: span_s, statement, guard_removed }))
}

/// Splice `removed` back into `reduced` at its recorded anchor.
pub fn reinsert(reduced: &[Token], removed: &RemovedLog) -> Vec<Token> {
    let mut out = Vec::with_capacity(reduced.len() + removed.tokens.len());
    out.extend_from_slice(&reduced[..removed.anchor]);
    out.extend_from_slice(&removed.tokens);
    out.extend_from_slice(&reduced[removed.anchor..]);
    lexer::reindex(&mut out);
    out
}

/// Insert the atomic `<LOG_STMT>` placeholder token at `position`.
pub fn insert_placeholder(tokens: &[Token], position: usize) -> Result<Vec<Token>> {
    if position > tokens.len() {
        return Err(Error::PositionOutOfRange { position, len: tokens.len() });
    }
    let (line, col) = tokens
        .get(position)
        .or_else(|| tokens.last())
        .map(|t| (t.line, t.col))
        .unwrap_or((1, 1));
    let mut out = tokens.to_vec();
    out.insert(
        position,
        Token { text: LOG_STMT_TOKEN.to_string(), kind: TokenKind::Identifier, line, col, index: 0 },
    );
    lexer::reindex(&mut out);
    Ok(out)
}

/// A single log statement recognized as the only difference between an
/// input method and a prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertedLog {
    pub level: LogLevel,
    /// Number of input tokens preceding the insertion.
    pub anchor: usize,
    /// Token texts of the statement itself (receiver through `;`).
    pub statement_texts: Vec<String>,
    pub guard_wrapped: bool,
}

impl InsertedLog {
    pub fn statement_text(&self) -> String {
        lexer::render_texts(&self.statement_texts)
    }
}

/// Recognize a prediction that differs from `input` by exactly one
/// inserted log statement (optionally wrapped in a level guard).
/// Returns `None` when the prediction fails to lex, is unchanged,
/// inserts anything other than one log statement, or edits non-log
/// tokens.
pub fn locate_injected_statement(
    input: &[Token],
    prediction_text: &str,
    detector: &LogDetector,
) -> Option<InsertedLog> {
    let pred = lexer::tokenize(prediction_text).ok()?;
    locate_injected_tokens(input, &pred, detector)
}

/// Token-level variant of [`locate_injected_statement`].
pub fn locate_injected_tokens(
    input: &[Token],
    pred: &[Token],
    detector: &LogDetector,
) -> Option<InsertedLog> {
    let a: Vec<&str> = input.iter().map(|t| t.text.as_str()).collect();
    let b: Vec<&str> = pred.iter().map(|t| t.text.as_str()).collect();
    if b.len() <= a.len() {
        return None; // nothing inserted (or tokens deleted)
    }
    let inserted_len = b.len() - a.len();

    let max_common = a.len();
    let mut prefix = 0usize;
    while prefix < max_common && a[prefix] == b[prefix] {
        prefix += 1;
    }
    let mut suffix = 0usize;
    while suffix < max_common && a[a.len() - 1 - suffix] == b[b.len() - 1 - suffix] {
        suffix += 1;
    }
    if prefix + suffix < a.len() {
        return None; // non-log edit: differences beyond one insertion
    }

    // Every anchor q with b[..q] == a[..q] and b[q+len..] == a[q..] is a
    // valid alignment; scan them in order and keep the first whose
    // inserted span is exactly one log statement.
    for q in (a.len() - suffix)..=prefix {
        let span = &pred[q..q + inserted_len];
        if let Some(found) = sole_statement(span, detector) {
            return Some(InsertedLog {
                level: found.0,
                anchor: q,
                statement_texts: found.1,
                guard_wrapped: found.2,
            });
        }
    }
    None
}

/// Check that `span` is exactly one log statement, or one log statement
/// wrapped in a level guard.
fn sole_statement(
    span: &[Token],
    detector: &LogDetector,
) -> Option<(LogLevel, Vec<String>, bool)> {
    let stmts = detector.find_in_tokens(span);
    if stmts.len() != 1 {
        return None;
    }
    let st = &stmts[0];
    let texts: Vec<String> = span[st.start..=st.end].iter().map(|t| t.text.clone()).collect();
    if st.start == 0 && st.end == span.len() - 1 {
        return Some((st.level, texts, false));
    }
    // Guard-wrapped form.
    let (s, e, fired) = detector.guard_span(span, st);
    if fired && s == 0 && e == span.len() - 1 {
        return Some((st.level, texts, true));
    }
    None
}
