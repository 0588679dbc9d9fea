//! Recursive-descent parser for the formula syntax.
//!
//! Grammar (all forms fully parenthesized):
//!
//! ```text
//! f := (and f f) | (or f f) | (not f) | (implies f f) | (eq x y)
//!    | (exists1 (x) f) | (forall1 (x) f)
//!    | (exists2 (X r) f) | (forall2 (X r) f)
//!    | (exists3p (C (r1 .. rs) d) f) | (forall3p (C (r1 .. rs) d) f)
//!    | (exists4p (Q ((..)(..)) d) f) | (forall4p (Q ((..)(..)) d) f)
//!    | (atom R x ..) | (atom2 X x ..) | (atom3 C X ..) | (atom4 Q C ..)
//!    | (schema (sig (i1 .. is)) (d n) (t n) (first f) (last f) (step f))
//! ```

use super::lexer::{tokenize, Spanned, Token};
use super::{ParseError, SourceSpan};
use crate::formula::{Formula, Quantifier, SchemaInstance};
use crate::types::RelationType;

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        input_len: text.len(),
    };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    input_len: usize,
}

impl Parser {
    fn eof_span(&self) -> SourceSpan {
        SourceSpan::new(self.input_len, self.input_len)
    }

    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Spanned, ParseError> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| ParseError::new("unexpected end of input", self.eof_span()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_lparen(&mut self) -> Result<SourceSpan, ParseError> {
        let t = self.next()?;
        match t.token {
            Token::LParen => Ok(t.span),
            _ => Err(ParseError::new("expected '('", t.span)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let t = self.next()?;
        match t.token {
            Token::RParen => Ok(()),
            _ => Err(ParseError::new("expected ')'", t.span)),
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if let Some(t) = self.peek() {
            return Err(ParseError::new("trailing input after formula", t.span));
        }
        Ok(())
    }

    fn symbol(&mut self) -> Result<(String, SourceSpan), ParseError> {
        let t = self.next()?;
        match t.token {
            Token::Symbol(s) => Ok((s, t.span)),
            _ => Err(ParseError::new("expected a symbol", t.span)),
        }
    }

    fn number(&mut self) -> Result<(usize, SourceSpan), ParseError> {
        let (s, span) = self.symbol()?;
        s.parse::<usize>()
            .map(|n| (n, span))
            .map_err(|_| ParseError::new(format!("expected a number, found '{s}'"), span))
    }

    /// `(n1 n2 ..)` — a parenthesized list of numbers.
    fn number_list(&mut self) -> Result<Vec<usize>, ParseError> {
        self.expect_lparen()?;
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some(Spanned {
                    token: Token::RParen,
                    ..
                }) => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => out.push(self.number()?.0),
            }
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let open = self.expect_lparen()?;
        let (head, head_span) = self.symbol()?;
        let f = match head.as_str() {
            "and" | "or" | "implies" => {
                let a = self.formula()?;
                let b = self.formula()?;
                match head.as_str() {
                    "and" => Formula::and(a, b),
                    "or" => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
            "not" => Formula::not(self.formula()?),
            "eq" => {
                let (a, _) = self.symbol()?;
                let (b, _) = self.symbol()?;
                Formula::Eq(a, b)
            }
            "exists1" | "forall1" => {
                let q = polarity(&head);
                self.expect_lparen()?;
                let (var, _) = self.symbol()?;
                self.expect_rparen()?;
                let body = self.formula()?;
                Formula::QuantFo {
                    q,
                    var,
                    body: Box::new(body),
                }
            }
            "exists2" | "forall2" => {
                let q = polarity(&head);
                self.expect_lparen()?;
                let (var, _) = self.symbol()?;
                let (arity, aspan) = self.number()?;
                if arity == 0 {
                    return Err(ParseError::new("arity must be >= 1", aspan));
                }
                self.expect_rparen()?;
                let body = self.formula()?;
                Formula::QuantSo {
                    q,
                    var,
                    arity,
                    body: Box::new(body),
                }
            }
            "exists3p" | "forall3p" => {
                let q = polarity(&head);
                self.expect_lparen()?;
                let (var, vspan) = self.symbol()?;
                let arities = self.number_list()?;
                if arities.is_empty() || arities.contains(&0) {
                    return Err(ParseError::new("TO type needs arities >= 1", vspan));
                }
                let (degree, dspan) = self.number()?;
                if degree == 0 {
                    return Err(ParseError::new("degree must be >= 1", dspan));
                }
                self.expect_rparen()?;
                let body = self.formula()?;
                Formula::QuantToP {
                    q,
                    var,
                    arities,
                    degree,
                    body: Box::new(body),
                }
            }
            "exists4p" | "forall4p" => {
                let q = polarity(&head);
                self.expect_lparen()?;
                let (var, vspan) = self.symbol()?;
                // ((r..)(r..)..) — tuple of TO types
                self.expect_lparen()?;
                let mut components = Vec::new();
                loop {
                    match self.peek() {
                        Some(Spanned {
                            token: Token::RParen,
                            ..
                        }) => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            let arities = self.number_list()?;
                            components.push(RelationType::To { arities });
                        }
                    }
                }
                let ty = RelationType::ho4(components)
                    .map_err(|e| ParseError::new(e.to_string(), vspan))?;
                let (degree, dspan) = self.number()?;
                if degree == 0 {
                    return Err(ParseError::new("degree must be >= 1", dspan));
                }
                self.expect_rparen()?;
                let body = self.formula()?;
                Formula::QuantHo4P {
                    q,
                    var,
                    ty,
                    degree,
                    body: Box::new(body),
                }
            }
            "atom" | "atom2" | "atom3" | "atom4" => {
                let (first, fspan) = self.symbol()?;
                let mut args = Vec::new();
                loop {
                    match self.peek() {
                        Some(Spanned {
                            token: Token::Symbol(_),
                            ..
                        }) => {
                            let (s, _) = self.symbol()?;
                            args.push(s);
                        }
                        _ => break,
                    }
                }
                if args.is_empty() && head != "atom" {
                    return Err(ParseError::new("atom needs at least one argument", fspan));
                }
                match head.as_str() {
                    "atom" => Formula::VocabAtom {
                        symbol: first,
                        args,
                    },
                    "atom2" => Formula::SoAtom { var: first, args },
                    "atom3" => Formula::ToAtom { var: first, args },
                    _ => Formula::Ho4Atom { var: first, args },
                }
            }
            "schema" => {
                let signature = self.keyed_number_list("sig", open)?;
                let degree = self.keyed_number("d")?;
                let size_degree = self.keyed_number("t")?;
                let alpha_first = self.keyed_formula("first")?;
                let alpha_last = self.keyed_formula("last")?;
                let step = self.keyed_formula("step")?;
                Formula::Schema(SchemaInstance {
                    signature,
                    degree,
                    size_degree,
                    alpha_first: Box::new(alpha_first),
                    alpha_last: Box::new(alpha_last),
                    step: Box::new(step),
                })
            }
            other => {
                return Err(ParseError::new(
                    format!("unknown formula head '{other}'"),
                    head_span,
                ))
            }
        };
        self.expect_rparen()?;
        Ok(f)
    }

    fn keyed_number_list(&mut self, key: &str, fallback: SourceSpan) -> Result<Vec<usize>, ParseError> {
        self.expect_lparen()?;
        let (k, kspan) = self.symbol()?;
        if k != key {
            return Err(ParseError::new(format!("expected '{key}'"), kspan));
        }
        let list = self.number_list()?;
        if list.is_empty() || list.contains(&0) {
            return Err(ParseError::new(
                format!("'{key}' needs entries >= 1"),
                fallback,
            ));
        }
        self.expect_rparen()?;
        Ok(list)
    }

    fn keyed_number(&mut self, key: &str) -> Result<usize, ParseError> {
        self.expect_lparen()?;
        let (k, kspan) = self.symbol()?;
        if k != key {
            return Err(ParseError::new(format!("expected '{key}'"), kspan));
        }
        let (n, nspan) = self.number()?;
        if n == 0 {
            return Err(ParseError::new(format!("'{key}' must be >= 1"), nspan));
        }
        self.expect_rparen()?;
        Ok(n)
    }

    fn keyed_formula(&mut self, key: &str) -> Result<Formula, ParseError> {
        self.expect_lparen()?;
        let (k, kspan) = self.symbol()?;
        if k != key {
            return Err(ParseError::new(format!("expected '{key}'"), kspan));
        }
        let f = self.formula()?;
        self.expect_rparen()?;
        Ok(f)
    }
}

fn polarity(head: &str) -> Quantifier {
    if head.starts_with("exists") {
        Quantifier::Exists
    } else {
        Quantifier::Forall
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_free_axiom() {
        let f = parse_formula("(forall1 (x) (not (atom E x x)))").unwrap();
        assert_eq!(
            f,
            Formula::forall1("x", Formula::not(Formula::vocab("E", vec!["x", "x"])))
        );
    }

    #[test]
    fn nested_to_quantifier() {
        let f = parse_formula("(exists3p (C (1) 1) (exists2 (X 1) (atom3 C X)))").unwrap();
        match f {
            Formula::QuantToP {
                q: Quantifier::Exists,
                var,
                arities,
                degree,
                body,
            } => {
                assert_eq!(var, "C");
                assert_eq!(arities, vec![1]);
                assert_eq!(degree, 1);
                assert!(matches!(*body, Formula::QuantSo { .. }));
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn unbalanced_input_errors_with_span() {
        let err = parse_formula("(and (atom E x y)").unwrap_err();
        assert_eq!(err.span.start, 17);
    }

    #[test]
    fn schema_form() {
        let text = "(schema (sig (1)) (d 1) (t 1) (first (exists1 (x) (atom CUR.1 x))) (last (exists1 (x) (atom CUR.1 x))) (step (forall1 (x) (implies (atom CUR.1 x) (atom NEXT.1 x)))))";
        let f = parse_formula(text).unwrap();
        match f {
            Formula::Schema(inst) => {
                assert_eq!(inst.signature, vec![1]);
                assert_eq!(inst.degree, 1);
                assert_eq!(inst.size_degree, 1);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn ho4_quantifier() {
        let f = parse_formula("(exists4p (Q ((1)) 1) (exists3p (C (1) 1) (atom4 Q C)))").unwrap();
        match f {
            Formula::QuantHo4P { var, ty, degree, .. } => {
                assert_eq!(var, "Q");
                assert_eq!(degree, 1);
                assert_eq!(ty, RelationType::ho4(vec![RelationType::To { arities: vec![1] }]).unwrap());
            }
            other => panic!("unexpected: {other:?}"),
        }
    }
}
