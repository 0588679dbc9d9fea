//! Line-based structure format.
//!
//! ```text
//! domain 4
//! relation E arity 2
//! 0 1
//! 1 0
//! # comments and blank lines are ignored
//! ```
//!
//! Relations not listed are empty.

use super::{ParseError, SourceSpan};
use crate::structure::{FiniteStructure, Relation};

pub fn parse_structure(text: &str) -> Result<FiniteStructure, ParseError> {
    let mut structure: Option<FiniteStructure> = None;
    let mut current: Option<(String, Relation, SourceSpan)> = None;

    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let trimmed = line.trim();
        let span = SourceSpan::new(line_start, line_start + line.trim_end().len());
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = trimmed.split_whitespace().collect();
        match words.as_slice() {
            ["domain", n] => {
                if structure.is_some() {
                    return Err(ParseError::new("duplicate domain line", span));
                }
                let n: usize = n
                    .parse()
                    .map_err(|_| ParseError::new("invalid domain size", span))?;
                structure = Some(
                    FiniteStructure::new(n)
                        .map_err(|e| ParseError::new(e.to_string(), span))?,
                );
            }
            ["relation", name, "arity", k] => {
                let st = structure
                    .as_mut()
                    .ok_or_else(|| ParseError::new("relation before domain line", span))?;
                if let Some((name, rel, dspan)) = current.take() {
                    st.add_relation(name, rel)
                        .map_err(|e| ParseError::new(e.to_string(), dspan))?;
                }
                let k: usize = k
                    .parse()
                    .map_err(|_| ParseError::new("invalid arity", span))?;
                current = Some((name.to_string(), Relation::new(k), span));
            }
            _ => {
                let Some((_, rel, _)) = current.as_mut() else {
                    return Err(ParseError::new("tuple line outside a relation block", span));
                };
                let st = structure.as_ref().expect("relation implies domain");
                let mut tuple = Vec::with_capacity(words.len());
                for w in &words {
                    let v: usize = w
                        .parse()
                        .map_err(|_| ParseError::new(format!("invalid index '{w}'"), span))?;
                    if v >= st.domain_size() {
                        return Err(ParseError::new(
                            format!("index {v} outside domain of size {}", st.domain_size()),
                            span,
                        ));
                    }
                    tuple.push(v);
                }
                rel.insert(tuple)
                    .map_err(|e| ParseError::new(e.to_string(), span))?;
            }
        }
    }
    let mut st = structure.ok_or_else(|| {
        ParseError::new("missing domain line", SourceSpan::new(0, 0))
    })?;
    if let Some((name, rel, dspan)) = current.take() {
        st.add_relation(name, rel)
            .map_err(|e| ParseError::new(e.to_string(), dspan))?;
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_parses() {
        let s = parse_structure("domain 2\nrelation E arity 2\n0 1\n1 0\n").unwrap();
        assert_eq!(s.domain_size(), 2);
        assert!(s.holds("E", &[0, 1]));
        assert!(s.holds("E", &[1, 0]));
        assert!(!s.holds("E", &[0, 0]));
    }

    #[test]
    fn singleton_empty_structure() {
        let s = parse_structure("domain 1\n").unwrap();
        assert_eq!(s.domain_size(), 1);
        assert_eq!(s.relations().count(), 0);
    }

    #[test]
    fn out_of_domain_index_rejected() {
        let err = parse_structure("domain 2\nrelation E arity 2\n0 2\n").unwrap_err();
        assert!(err.message.contains("outside domain"));
    }

    #[test]
    fn wrong_tuple_length_rejected() {
        let err = parse_structure("domain 2\nrelation E arity 2\n0\n").unwrap_err();
        assert!(err.message.contains("length"));
    }

    #[test]
    fn duplicate_block_rejected() {
        let err = parse_structure(
            "domain 2\nrelation E arity 2\n0 1\nrelation E arity 2\n1 0\n",
        )
        .unwrap_err();
        assert!(err.message.contains("twice"));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let s = parse_structure("# graph\ndomain 2\n\nrelation E arity 2\n# an edge\n0 1\n").unwrap();
        assert!(s.holds("E", &[0, 1]));
    }
}
