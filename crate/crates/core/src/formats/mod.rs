//! Text formats: `.cirq` cirquent blocks, `.clp` proof files, and `.gpf`
//! sequent proofs.

pub mod cirq;
pub mod clp;
pub mod gpf;

use thiserror::Error;

/// Failure while reading one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("cirquent {name} is not well formed: {detail}")]
    BadGraph { name: String, detail: String },
}

impl FormatError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> FormatError {
        FormatError::Syntax { line, message: message.into() }
    }
}

/// Splits a line into tokens, dropping everything from the first token that
/// starts with `#`. Names may contain `#` after the first character, so
/// `a#1` is a token while `#1` starts a comment.
pub(crate) fn tokenize(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for token in line.split_whitespace() {
        if token.starts_with('#') {
            break;
        }
        out.push(token);
    }
    out
}
