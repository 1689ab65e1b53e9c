//! Lexer for Java source text.
//!
//! Produces a flat token stream with comments and whitespace dropped.
//! This is not a full Java grammar: the downstream method extractor and
//! syntax checker only need token kinds, bracket structure and literal
//! atomicity. Synthetic dataset tokens (`<LOG_STMT>`, `<extra_id_N>`)
//! are lexed as single atomic tokens so normalized dataset text
//! round-trips through the lexer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lexical class of a [`Token`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    StringLiteral,
    CharLiteral,
    NumberLiteral,
    Operator,
    Separator,
    Annotation,
}

/// One lexical unit of Java source with position metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    /// 1-based source line.
    pub line: u32,
    /// 1-based source column (in chars).
    pub col: u32,
    /// 0-based ordinal within its sequence.
    pub index: u32,
}

/// Byte range of a token in the original source.
pub type Span = std::ops::Range<usize>;

pub const LOG_STMT_TOKEN: &str = "<LOG_STMT>";

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while",
];

// Longest-match-first operator table. `...` and `::` are separators per
// the JLS; everything else here is an operator.
const OPERATORS: &[&str] = &[
    ">>>=", ">>>", ">>=", "<<=", "...", "->", "::", "==", "!=", "<=", ">=", "&&", "||", "++",
    "--", "+=", "-=", "*=", "/=", "&=", "|=", "^=", "%=", "<<", ">>", "+", "-", "*", "/", "%",
    "&", "|", "^", "!", "~", "=", "<", ">", "?", ":",
];

fn is_separator_text(text: &str) -> bool {
    matches!(text, "(" | ")" | "{" | "}" | "[" | "]" | ";" | "," | "." | "..." | "::" | "@")
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// Returns true if `text` is one of the synthetic dataset tokens that
/// must stay atomic: `<LOG_STMT>` or `<extra_id_N>`.
pub fn is_sentinel(text: &str) -> bool {
    if text == LOG_STMT_TOKEN {
        return true;
    }
    text.strip_prefix("<extra_id_")
        .and_then(|rest| rest.strip_suffix('>'))
        .map(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
        .unwrap_or(false)
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().collect(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).map(|&(_, c)| c)
    }

    fn byte_offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(b, _)| b).unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.byte_offset()..].starts_with(s)
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn lex_error(&self, msg: &str, line: u32, col: u32) -> Error {
        Error::Lex { message: msg.to_string(), line, col }
    }

    /// Consume a quoted literal (string or char). `quote` is `"` or `'`.
    fn quoted(&mut self, quote: char) -> Result<()> {
        let (line, col) = (self.line, self.col);
        self.bump(); // opening quote
        loop {
            match self.peek() {
                None | Some('\n') => {
                    let what = if quote == '"' { "unterminated string literal" } else {
                        "unterminated char literal"
                    };
                    return Err(self.lex_error(what, line, col));
                }
                Some('\\') => {
                    self.bump();
                    if self.peek().is_none() {
                        return Err(self.lex_error("unterminated escape", line, col));
                    }
                    self.bump();
                }
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(());
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn number(&mut self) {
        // Greedy: digits, hex/binary letters, '_', '.', exponents with a
        // signed part. Re-lexing the produced text yields the same token,
        // which is all the round-trip contract needs.
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                let prev = c;
                self.bump();
                if matches!(prev, 'e' | 'E' | 'p' | 'P')
                    && matches!(self.peek(), Some('+') | Some('-'))
                {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }
}

/// Tokenize Java source, dropping comments and whitespace, and also
/// return the byte span of each token in `source`.
pub fn tokenize_with_spans(source: &str) -> Result<(Vec<Token>, Vec<Span>)> {
    let mut lx = Lexer::new(source);
    let mut tokens = Vec::new();
    let mut spans = Vec::new();

    while let Some(c) = lx.peek() {
        if c.is_whitespace() {
            lx.bump();
            continue;
        }
        // Comments.
        if c == '/' {
            if lx.peek_at(1) == Some('/') {
                while let Some(c) = lx.peek() {
                    if c == '\n' {
                        break;
                    }
                    lx.bump();
                }
                continue;
            }
            if lx.peek_at(1) == Some('*') {
                let (line, col) = (lx.line, lx.col);
                lx.bump_n(2);
                let mut closed = false;
                while let Some(c) = lx.bump() {
                    if c == '*' && lx.peek() == Some('/') {
                        lx.bump();
                        closed = true;
                        break;
                    }
                }
                if !closed {
                    return Err(lx.lex_error("unterminated block comment", line, col));
                }
                continue;
            }
        }

        let start = lx.byte_offset();
        let (line, col) = (lx.line, lx.col);
        let kind;

        if c == '<' {
            // Atomic sentinel tokens used in dataset text.
            let rest = &lx.src[start..];
            if let Some(end) = rest.find('>') {
                let cand = &rest[..=end];
                if is_sentinel(cand) {
                    lx.bump_n(cand.chars().count());
                    push(&mut tokens, &mut spans, cand, TokenKind::Identifier, line, col, start, lx.byte_offset());
                    continue;
                }
            }
        }

        if c == '"' {
            lx.quoted('"')?;
            kind = TokenKind::StringLiteral;
        } else if c == '\'' {
            lx.quoted('\'')?;
            kind = TokenKind::CharLiteral;
        } else if c.is_ascii_digit() || (c == '.' && lx.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            lx.number();
            kind = TokenKind::NumberLiteral;
        } else if c == '@' && lx.peek_at(1).is_some_and(is_ident_start) {
            lx.bump();
            while lx.peek().is_some_and(is_ident_part) {
                lx.bump();
            }
            kind = TokenKind::Annotation;
        } else if is_ident_start(c) {
            while lx.peek().is_some_and(is_ident_part) {
                lx.bump();
            }
            let text = &lx.src[start..lx.byte_offset()];
            kind = if KEYWORDS.contains(&text) { TokenKind::Keyword } else { TokenKind::Identifier };
        } else if c == '.' && lx.starts_with("...") {
            lx.bump_n(3);
            kind = TokenKind::Separator;
        } else if matches!(c, '(' | ')' | '{' | '}' | '[' | ']' | ';' | ',' | '.' | '@') {
            lx.bump();
            kind = TokenKind::Separator;
        } else if let Some(op) = OPERATORS.iter().find(|op| lx.starts_with(op)) {
            lx.bump_n(op.chars().count());
            kind = if is_separator_text(op) { TokenKind::Separator } else { TokenKind::Operator };
        } else {
            // Unknown character (e.g. stray backslash); keep it as a
            // one-char operator so lexing never stalls.
            lx.bump();
            kind = TokenKind::Operator;
        }

        let end = lx.byte_offset();
        push(&mut tokens, &mut spans, &lx.src[start..end], kind, line, col, start, end);
    }

    Ok((tokens, spans))
}

#[allow(clippy::too_many_arguments)]
fn push(
    tokens: &mut Vec<Token>,
    spans: &mut Vec<Span>,
    text: &str,
    kind: TokenKind,
    line: u32,
    col: u32,
    start: usize,
    end: usize,
) {
    tokens.push(Token {
        text: text.to_string(),
        kind,
        line,
        col,
        index: tokens.len() as u32,
    });
    spans.push(start..end);
}

/// Tokenize Java source, dropping comments and whitespace.
pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    tokenize_with_spans(source).map(|(t, _)| t)
}

/// Join token texts with single spaces. The normalization used for
/// hashing, dataset text and equality everywhere in the pipeline.
pub fn render(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}

/// Join plain token texts with single spaces.
pub fn render_texts<S: AsRef<str>>(texts: &[S]) -> String {
    texts.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(" ")
}

/// Reassign `index` so the sequence is contiguous from 0.
pub fn reindex(tokens: &mut [Token]) {
    for (i, t) in tokens.iter_mut().enumerate() {
        t.index = i as u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(toks: &[Token]) -> Vec<&str> {
        toks.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn comment_is_dropped() {
        let toks = tokenize("int x = 0; // done").unwrap();
        assert_eq!(texts(&toks), ["int", "x", "=", "0", ";"]);
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert_eq!(toks[1].kind, TokenKind::Identifier);
    }

    #[test]
    fn string_literal_is_one_token() {
        let toks = tokenize(r#"log.info("a; b");"#).unwrap();
        assert_eq!(toks.len(), 7);
        assert_eq!(toks[4].text, r#""a; b""#);
        assert_eq!(toks[4].kind, TokenKind::StringLiteral);
    }

    #[test]
    fn block_comment_and_escapes() {
        let toks = tokenize("a /* x \" y */ b '\\'' \"q\\\"r\"").unwrap();
        assert_eq!(texts(&toks), ["a", "b", "'\\''", "\"q\\\"r\""]);
    }

    #[test]
    fn unterminated_string_reports_position() {
        let err = tokenize("int x;\nString s = \"oops;").unwrap_err();
        match err {
            Error::Lex { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 12);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn unterminated_block_comment_errors() {
        assert!(tokenize("int x; /* never closed").is_err());
    }

    #[test]
    fn sentinels_are_atomic() {
        let toks = tokenize("a <LOG_STMT> b <extra_id_12> c < d").unwrap();
        assert_eq!(texts(&toks), ["a", "<LOG_STMT>", "b", "<extra_id_12>", "c", "<", "d"]);
    }

    #[test]
    fn operators_maximal_munch() {
        let toks = tokenize("x >>>= y >>> z :: w ... v -> u").unwrap();
        assert_eq!(texts(&toks), ["x", ">>>=", "y", ">>>", "z", "::", "w", "...", "v", "->", "u"]);
    }

    #[test]
    fn numbers_and_annotations() {
        let toks = tokenize("@Override int a = 0x1F; double d = 1.5e-3f; float f = .5f;").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Annotation);
        let nums: Vec<_> =
            toks.iter().filter(|t| t.kind == TokenKind::NumberLiteral).map(|t| t.text.as_str()).collect();
        assert_eq!(nums, ["0x1F", "1.5e-3f", ".5f"]);
    }

    #[test]
    fn render_round_trip() {
        let src = r#"
            public void f(int a) throws IOException {
                String s = "x + y // not a comment";
                if (a >= 2) { a <<= 1; }
                list.forEach(e -> log.debug("e={}", e));
            }
        "#;
        let toks = tokenize(src).unwrap();
        let again = tokenize(&render(&toks)).unwrap();
        assert_eq!(
            toks.iter().map(|t| (&t.text, t.kind)).collect::<Vec<_>>(),
            again.iter().map(|t| (&t.text, t.kind)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn spans_cover_source_slices() {
        let src = "int x = 42;";
        let (toks, spans) = tokenize_with_spans(src).unwrap();
        for (t, s) in toks.iter().zip(&spans) {
            assert_eq!(&src[s.clone()], t.text);
        }
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("   \n\t // just a comment\n").unwrap().is_empty());
    }
}
