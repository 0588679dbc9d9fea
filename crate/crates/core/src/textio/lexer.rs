//! Tokenizer for the S-expression formula syntax.

use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    LParen,
    RParen,
    Symbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub token: Token,
    pub span: SourceSpan,
}

pub fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        match c {
            b'(' => {
                out.push(Spanned {
                    token: Token::LParen,
                    span: SourceSpan::new(i, i + 1),
                });
                i += 1;
            }
            b')' => {
                out.push(Spanned {
                    token: Token::RParen,
                    span: SourceSpan::new(i, i + 1),
                });
                i += 1;
            }
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                let s = std::str::from_utf8(&bytes[start..i]).map_err(|_| {
                    ParseError::new("invalid UTF-8 in symbol", SourceSpan::new(start, i))
                })?;
                out.push(Spanned {
                    token: Token::Symbol(s.to_string()),
                    span: SourceSpan::new(start, i),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_nested() {
        let ts = tokenize("(and (atom E x y) z)").unwrap();
        assert_eq!(ts.len(), 10);
        assert_eq!(ts[0].token, Token::LParen);
        assert_eq!(ts[2].token, Token::LParen);
        assert_eq!(ts[3].token, Token::Symbol("atom".into()));
    }

    #[test]
    fn symbols_allow_punctuation() {
        let ts = tokenize("<= CUR.1 P_and").unwrap();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts[0].token, Token::Symbol("<=".into()));
        assert_eq!(ts[1].token, Token::Symbol("CUR.1".into()));
    }
}
