//! Lossless C# lexer.
//!
//! Every byte of the input ends up in exactly one token, so concatenating
//! token texts reproduces the source. Malformed input never aborts lexing:
//! unknown characters become single-character punctuation tokens and
//! unterminated literals/comments run to the end of line or file, each with
//! a diagnostic.

use serde::{Deserialize, Serialize};

use crate::diag::{Diagnostic, Severity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    StringLiteral,
    InterpolatedString,
    CharLiteral,
    Number,
    Punctuation,
    Comment,
    Whitespace,
    AttributeBracket,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(self, TokenKind::Comment | TokenKind::Whitespace)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// 1-based.
    pub line: u32,
    /// 1-based, counted in chars.
    pub column: u32,
    /// Byte offset of the first byte of `text` in the source.
    pub offset: usize,
}

impl<'a> Token<'a> {
    pub fn end(&self) -> usize {
        self.offset + self.text.len()
    }

    pub fn is(&self, text: &str) -> bool {
        !self.kind.is_trivia() && self.text == text
    }

    /// Last line touched by this token.
    pub fn end_line(&self) -> u32 {
        self.line + self.text.matches('\n').count() as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("source is not valid UTF-8 (first invalid byte at offset {offset})")]
pub struct EncodingError {
    pub offset: usize,
}

/// Result of lexing one source text.
#[derive(Debug, Clone)]
pub struct Lexed<'a> {
    pub tokens: Vec<Token<'a>>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Reserved C# keywords. Contextual keywords (`var`, `yield`, `async`,
/// `await`, `partial`, `record`, ...) lex as identifiers.
pub const KEYWORDS: &[&str] = &[
    "abstract", "as", "base", "bool", "break", "byte", "case", "catch", "char", "checked",
    "class", "const", "continue", "decimal", "default", "delegate", "do", "double", "else",
    "enum", "event", "explicit", "extern", "false", "finally", "fixed", "float", "for",
    "foreach", "goto", "if", "implicit", "in", "int", "interface", "internal", "is", "lock",
    "long", "namespace", "new", "null", "object", "operator", "out", "override", "params",
    "private", "protected", "public", "readonly", "ref", "return", "sbyte", "sealed", "short",
    "sizeof", "stackalloc", "static", "string", "struct", "switch", "this", "throw", "true",
    "try", "typeof", "uint", "ulong", "unchecked", "unsafe", "ushort", "using", "virtual",
    "void", "volatile", "while",
];

pub fn is_keyword(text: &str) -> bool {
    KEYWORDS.binary_search(&text).is_ok()
}

const MULTI_PUNCT: &[&str] = &[
    "??=", "<<=", "=>", "==", "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "::", "->", "..",
];

const SINGLE_PUNCT: &str = "{}()[];,.:?+-*/%&|^!~<>=";

/// Decode and lex raw bytes. A leading BOM is kept as a whitespace token.
pub fn tokenize(source: &[u8]) -> Result<Lexed<'_>, EncodingError> {
    let text = std::str::from_utf8(source).map_err(|e| EncodingError {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize_str(text))
}

pub fn tokenize_str(source: &str) -> Lexed<'_> {
    let mut lexer = Lexer {
        src: source,
        pos: 0,
        line: 1,
        column: 1,
        at_line_start: true,
        brackets: Vec::new(),
        prev_significant: None,
        tokens: Vec::new(),
        diagnostics: Vec::new(),
    };
    lexer.run();
    Lexed {
        tokens: lexer.tokens,
        diagnostics: lexer.diagnostics,
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
    at_line_start: bool,
    /// Open `[` brackets; `true` when the bracket opened an attribute section.
    brackets: Vec<bool>,
    prev_significant: Option<(TokenKind, &'a str)>,
    tokens: Vec<Token<'a>>,
    diagnostics: Vec<Diagnostic>,
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric() || c == '\u{200C}' || c == '\u{200D}'
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn diag(&mut self, severity: Severity, message: impl Into<String>) {
        self.diagnostics
            .push(Diagnostic::new(severity, message).at_line(self.line));
    }

    fn emit(&mut self, kind: TokenKind, len: usize) {
        let text = &self.src[self.pos..self.pos + len];
        self.tokens.push(Token {
            kind,
            text,
            line: self.line,
            column: self.column,
            offset: self.pos,
        });
        for c in text.chars() {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        self.pos += len;
        match kind {
            TokenKind::Whitespace => {
                if text.contains('\n') {
                    self.at_line_start = true;
                }
            }
            TokenKind::Comment => {
                // A line comment or directive stops just before the newline.
                if text.ends_with('\n') {
                    self.at_line_start = true;
                }
            }
            _ => {
                self.at_line_start = false;
                self.prev_significant = Some((kind, text));
            }
        }
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '\u{FEFF}' {
                let len = self
                    .rest()
                    .char_indices()
                    .find(|&(_, ch)| !(ch.is_whitespace() || ch == '\u{FEFF}'))
                    .map(|(i, _)| i)
                    .unwrap_or(self.rest().len());
                self.emit(TokenKind::Whitespace, len);
                continue;
            }
            let rest = self.rest();
            if rest.starts_with("//") {
                let len = rest.find('\n').unwrap_or(rest.len());
                self.emit(TokenKind::Comment, len);
                continue;
            }
            if let Some(body) = rest.strip_prefix("/*") {
                let len = match body.find("*/") {
                    Some(i) => i + 4,
                    None => {
                        self.diag(Severity::Error, "unterminated block comment");
                        rest.len()
                    }
                };
                self.emit(TokenKind::Comment, len);
                continue;
            }
            if c == '#' && self.at_line_start {
                let len = rest.find('\n').unwrap_or(rest.len());
                self.emit(TokenKind::Comment, len);
                continue;
            }
            if let Some((kind, len)) = self.string_literal_at(self.pos) {
                self.emit(kind, len);
                continue;
            }
            if c == '\'' {
                self.char_literal();
                continue;
            }
            if c == '@' && self.peek_at(1).is_some_and(is_ident_start) {
                let len = 1 + ident_len(&rest[1..]);
                self.emit(TokenKind::Identifier, len);
                continue;
            }
            if is_ident_start(c) {
                let len = ident_len(rest);
                let kind = if is_keyword(&rest[..len]) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                self.emit(kind, len);
                continue;
            }
            if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
                let len = number_len(rest);
                self.emit(TokenKind::Number, len);
                continue;
            }
            if c == '[' {
                let attribute = self.attribute_context();
                self.brackets.push(attribute);
                let kind = if attribute {
                    TokenKind::AttributeBracket
                } else {
                    TokenKind::Punctuation
                };
                self.emit(kind, 1);
                continue;
            }
            if c == ']' {
                let kind = match self.brackets.pop() {
                    Some(true) => TokenKind::AttributeBracket,
                    _ => TokenKind::Punctuation,
                };
                self.emit(kind, 1);
                continue;
            }
            if let Some(p) = MULTI_PUNCT.iter().find(|p| rest.starts_with(**p)) {
                // `a ? .5 : b` is a conditional, not `?.`
                if *p == "?." && self.peek_at(2).is_some_and(|d| d.is_ascii_digit()) {
                    self.emit(TokenKind::Punctuation, 1);
                } else {
                    self.emit(TokenKind::Punctuation, p.len());
                }
                continue;
            }
            if SINGLE_PUNCT.contains(c) {
                self.emit(TokenKind::Punctuation, 1);
                continue;
            }
            self.diag(
                Severity::Warning,
                format!("unexpected character {:?}", c),
            );
            self.emit(TokenKind::Punctuation, c.len_utf8());
        }
        if self.brackets.iter().any(|b| *b) {
            self.diag(Severity::Warning, "unclosed attribute section");
        }
    }

    /// `[` opens an attribute section when it starts a declaration.
    fn attribute_context(&self) -> bool {
        match self.prev_significant {
            None => true,
            Some((TokenKind::AttributeBracket, "]")) => true,
            Some((TokenKind::Punctuation, p)) => matches!(p, "{" | "}" | ";"),
            _ => false,
        }
    }

    fn char_literal(&mut self) {
        let rest = self.rest();
        let mut chars = rest.char_indices().skip(1);
        let mut end = None;
        let mut escaped = false;
        for (count, (i, ch)) in (&mut chars).enumerate() {
            if ch == '\n' || count > 12 {
                break;
            }
            if escaped {
                escaped = false;
                continue;
            }
            match ch {
                '\\' => escaped = true,
                '\'' => {
                    end = Some(i + 1);
                    break;
                }
                _ => {}
            }
        }
        match end {
            Some(len) => self.emit(TokenKind::CharLiteral, len),
            None => {
                self.diag(Severity::Warning, "unterminated character literal");
                self.emit(TokenKind::Punctuation, 1);
            }
        }
    }

    /// Recognizes any string literal form starting at byte `at` and returns
    /// its kind and byte length. Holes of interpolated strings are scanned
    /// recursively so nested literals do not end the outer literal early.
    fn string_literal_at(&mut self, at: usize) -> Option<(TokenKind, usize)> {
        let s = &self.src[at..];
        let b = s.as_bytes();
        let mut i = 0;
        let mut dollars = 0;
        let mut verbatim = false;
        loop {
            match b.get(i) {
                Some(b'$') => {
                    dollars += 1;
                    i += 1;
                }
                Some(b'@') if !verbatim => {
                    verbatim = true;
                    i += 1;
                }
                _ => break,
            }
        }
        if b.get(i) != Some(&b'"') {
            return None;
        }
        if verbatim && dollars > 1 {
            return None;
        }
        let kind = if dollars > 0 {
            TokenKind::InterpolatedString
        } else {
            TokenKind::StringLiteral
        };
        let quotes = b[i..].iter().take_while(|&&q| q == b'"').count();
        if !verbatim && quotes >= 3 {
            return Some((kind, i + self.raw_string_len(&s[i..], quotes)));
        }
        i += 1;
        let interpolated = dollars > 0;
        loop {
            let Some(&ch) = b.get(i) else {
                self.diag(Severity::Error, "unterminated string literal");
                return Some((kind, s.len()));
            };
            match ch {
                b'"' => {
                    if verbatim && b.get(i + 1) == Some(&b'"') {
                        i += 2;
                        continue;
                    }
                    return Some((kind, i + 1));
                }
                b'\\' if !verbatim => {
                    i += 1;
                    if let Some(c) = s[i..].chars().next() {
                        if c == '\n' {
                            continue;
                        }
                        i += c.len_utf8();
                    }
                }
                b'\n' if !verbatim => {
                    self.diag(Severity::Warning, "newline in string literal");
                    return Some((kind, i));
                }
                b'{' if interpolated => {
                    if b.get(i + 1) == Some(&b'{') {
                        i += 2;
                        continue;
                    }
                    i = self.hole_end(at, i + 1);
                }
                _ => i += 1,
            }
        }
    }

    /// Returns the byte index (relative to `base`) just past the `}` closing
    /// an interpolation hole whose contents start at `start`.
    fn hole_end(&mut self, base: usize, start: usize) -> usize {
        let s = &self.src[base..];
        let b = s.as_bytes();
        let mut i = start;
        let mut depth = 0usize;
        while i < b.len() {
            match b[i] {
                b'{' => {
                    depth += 1;
                    i += 1;
                }
                b'}' => {
                    if depth == 0 {
                        return i + 1;
                    }
                    depth -= 1;
                    i += 1;
                }
                b'"' | b'@' | b'$' => match self.string_literal_at(base + i) {
                    Some((_, len)) => i += len,
                    None => i += 1,
                },
                b'\'' => {
                    // skip a char literal so '}' or '"' inside it is inert
                    let tail = &s[i + 1..];
                    let close = if tail.starts_with('\\') {
                        tail.char_indices().skip(2).find(|&(_, c)| c == '\'').map(|(j, _)| j)
                    } else {
                        tail.char_indices().skip(1).take(1).find(|&(_, c)| c == '\'').map(|(j, _)| j)
                    };
                    i += match close {
                        Some(j) => j + 2,
                        None => 1,
                    };
                }
                _ => i += s[i..].chars().next().map_or(1, char::len_utf8),
            }
        }
        b.len()
    }

    fn raw_string_len(&mut self, s: &str, quotes: usize) -> usize {
        let closing = "\"".repeat(quotes);
        match s[quotes..].find(&closing) {
            Some(i) => {
                let mut end = quotes + i + quotes;
                // A longer run of quotes ends the literal at its last quotes.
                end += s[end..].bytes().take_while(|&q| q == b'"').count();
                end
            }
            None => {
                self.diag(Severity::Error, "unterminated raw string literal");
                s.len()
            }
        }
    }
}

fn ident_len(s: &str) -> usize {
    s.char_indices()
        .find(|&(i, c)| if i == 0 { !is_ident_start(c) } else { !is_ident_continue(c) })
        .map(|(i, _)| i)
        .unwrap_or(s.len())
}

fn number_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    if b.len() > 1 && b[0] == b'0' && matches!(b[1], b'x' | b'X' | b'b' | b'B') {
        i = 2;
        while i < b.len() && (b[i].is_ascii_hexdigit() || b[i] == b'_') {
            i += 1;
        }
    } else {
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
            i += 1;
        }
        if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
            i += 1;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
                i += 1;
            }
        }
        if i < b.len() && matches!(b[i], b'e' | b'E') {
            let mut j = i + 1;
            if j < b.len() && matches!(b[j], b'+' | b'-') {
                j += 1;
            }
            if j < b.len() && b[j].is_ascii_digit() {
                i = j;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
            }
        }
    }
    while i < b.len() && matches!(b[i], b'u' | b'U' | b'l' | b'L' | b'f' | b'F' | b'd' | b'D' | b'm' | b'M') {
        i += 1;
    }
    i.max(1)
}
