//! Tolerant C# front end: lexer, line classification and island parser.

pub mod lexer;
pub mod loc;
pub mod parser;
mod statements;
pub mod syntax;

pub use lexer::{tokenize, tokenize_str, EncodingError, Lexed, Token, TokenKind};
pub use loc::{count_loc, count_loc_str, LineFlags};
pub use parser::{normalize_attribute, parse_source, parse_str, parse_unit};
pub use statements::literal_content;
pub use syntax::*;
