//! Line classification: blank, comment-only, or code.

use super::lexer::{tokenize, tokenize_str, EncodingError, Token, TokenKind};
use super::syntax::LocStats;

/// Per-line flags for a token stream, indexed by `line - 1`.
#[derive(Debug, Clone, Default)]
pub struct LineFlags {
    code: Vec<bool>,
    comment: Vec<bool>,
}

impl LineFlags {
    pub fn from_tokens(tokens: &[Token<'_>], source: &str) -> Self {
        let lines = physical_lines(source) as usize;
        let mut flags = LineFlags {
            code: vec![false; lines],
            comment: vec![false; lines],
        };
        for tok in tokens {
            let target = match tok.kind {
                TokenKind::Whitespace => continue,
                TokenKind::Comment => &mut flags.comment,
                _ => &mut flags.code,
            };
            for line in tok.line..=tok.end_line() {
                if let Some(slot) = target.get_mut(line as usize - 1) {
                    *slot = true;
                }
            }
        }
        flags
    }

    pub fn is_code(&self, line: u32) -> bool {
        line >= 1 && self.code.get(line as usize - 1).copied().unwrap_or(false)
    }

    /// Code lines within an inclusive line range.
    pub fn code_lines_between(&self, start: u32, end: u32) -> u32 {
        (start..=end).filter(|&l| self.is_code(l)).count() as u32
    }

    pub fn stats(&self) -> LocStats {
        let mut s = LocStats {
            physical_lines: self.code.len() as u32,
            ..LocStats::default()
        };
        for (code, comment) in self.code.iter().zip(&self.comment) {
            match (code, comment) {
                (true, _) => s.code_lines += 1,
                (false, true) => s.comment_lines += 1,
                (false, false) => s.blank_lines += 1,
            }
        }
        s
    }
}

/// Number of lines; a trailing newline does not open a new line.
pub fn physical_lines(source: &str) -> u32 {
    if source.is_empty() {
        return 0;
    }
    let newlines = source.bytes().filter(|&b| b == b'\n').count() as u32;
    if source.ends_with('\n') {
        newlines
    } else {
        newlines + 1
    }
}

pub fn count_loc(source: &[u8]) -> Result<LocStats, EncodingError> {
    let lexed = tokenize(source)?;
    let text = std::str::from_utf8(source).expect("validated by tokenize");
    Ok(LineFlags::from_tokens(&lexed.tokens, text).stats())
}

pub fn count_loc_str(source: &str) -> LocStats {
    let lexed = tokenize_str(source);
    LineFlags::from_tokens(&lexed.tokens, source).stats()
}
