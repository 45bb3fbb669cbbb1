//! Regular-grammar SMILES tokenizer.
//!
//! Bracket atoms are single tokens, `Br`/`Cl` are single tokens and ring
//! closures above 9 (`%nn`, and `%(nnn)` for loop numbers past 99) are
//! single tokens. Token texts concatenate back to the input.

use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Atom,
    Bond,
    BranchOpen,
    BranchClose,
    RingClosure,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// Byte offset of `text` in the source string.
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenizeError {
    Empty,
    UnknownCharacter(usize),
}

impl fmt::Display for TokenizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenizeError::Empty => write!(f, "empty SMILES"),
            TokenizeError::UnknownCharacter(p) => write!(f, "unknown character at position {p}"),
        }
    }
}

impl core::error::Error for TokenizeError {}

pub fn tokenize_smiles(s: &str) -> Result<Vec<Token<'_>>, TokenizeError> {
    if s.is_empty() {
        return Err(TokenizeError::Empty);
    }
    let bytes = s.as_bytes();
    let mut tokens = Vec::with_capacity(s.len());
    let mut i = 0;
    while i < bytes.len() {
        let (kind, len) = match bytes[i] {
            b'[' => match bytes[i + 1..].iter().position(|&b| b == b']') {
                Some(close) if close > 0 => (TokenKind::Atom, close + 2),
                _ => return Err(TokenizeError::UnknownCharacter(i)),
            },
            b'B' if bytes.get(i + 1) == Some(&b'r') => (TokenKind::Atom, 2),
            b'C' if bytes.get(i + 1) == Some(&b'l') => (TokenKind::Atom, 2),
            b'B' | b'C' | b'N' | b'O' | b'S' | b'P' | b'F' | b'I' | b'b' | b'c' | b'n' | b'o'
            | b's' | b'p' | b'*' => (TokenKind::Atom, 1),
            b'(' => (TokenKind::BranchOpen, 1),
            b')' => (TokenKind::BranchClose, 1),
            b'.' => (TokenKind::Dot, 1),
            b'-' | b'=' | b'#' | b'$' | b':' | b'~' | b'/' | b'\\' => (TokenKind::Bond, 1),
            b'0'..=b'9' => (TokenKind::RingClosure, 1),
            b'%' => match ring_label_len(&bytes[i..]) {
                Some(len) => (TokenKind::RingClosure, len),
                None => return Err(TokenizeError::UnknownCharacter(i)),
            },
            _ => return Err(TokenizeError::UnknownCharacter(i)),
        };
        tokens.push(Token { kind, text: &s[i..i + len], start: i });
        i += len;
    }
    Ok(tokens)
}

fn ring_label_len(rest: &[u8]) -> Option<usize> {
    match rest.get(1)? {
        b'(' => {
            let digits = rest[2..].iter().take_while(|b| b.is_ascii_digit()).count();
            (digits > 0 && rest.get(2 + digits) == Some(&b')')).then_some(digits + 3)
        }
        _ => {
            let two = rest.get(1..3)?;
            two.iter().all(u8::is_ascii_digit).then_some(3)
        }
    }
}

/// Numeric label of a ring-closure token.
pub fn ring_label(text: &str) -> Option<u32> {
    let digits = text.trim_start_matches('%').trim_start_matches('(').trim_end_matches(')');
    digits.parse().ok()
}

/// Token count of a reaction written `reactants>products`: one separator
/// token between the two sides.
pub fn reaction_token_count(reactants: &str, products: &str) -> Result<usize, TokenizeError> {
    let side = |s: &str| if s.is_empty() { Ok(0) } else { tokenize_smiles(s).map(|t| t.len()) };
    Ok(side(reactants)? + 1 + side(products)?)
}
