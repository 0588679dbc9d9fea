//! Static typing of formulae against a vocabulary.
//!
//! Violations are reported as values; the first violation found in a
//! pre-order walk is returned.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::{Formula, SchemaInstance};
use crate::structure::Signature;
use crate::types::RelationType;

/// What a name is bound to in the current scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Fo,
    So { arity: usize },
    To { arities: Vec<usize> },
    Ho4 { ty: RelationType },
}

pub type Scope = BTreeMap<String, Binding>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnboundFoVariable(String),
    UnboundSoVariable(String),
    UnboundToVariable(String),
    UnboundHo4Variable(String),
    UnknownVocabSymbol(String),
    VocabArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    SoArityMismatch {
        var: String,
        expected: usize,
        found: usize,
    },
    WidthMismatch {
        var: String,
        expected: usize,
        found: usize,
    },
    ComponentArityMismatch {
        var: String,
        index: usize,
        expected: usize,
        found: usize,
    },
    ComponentTypeMismatch {
        var: String,
        index: usize,
    },
    NotAnSoVariable(String),
    NotAToVariable(String),
    Rebinding(String),
    ZeroDegree(String),
    BadType(String),
    SchemaSubformulaNotSo(&'static str),
    SchemaBadSignature,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnboundFoVariable(v) => write!(f, "unbound variable {v}"),
            Violation::UnboundSoVariable(v) => write!(f, "unbound SO variable {v}"),
            Violation::UnboundToVariable(v) => write!(f, "unbound TO variable {v}"),
            Violation::UnboundHo4Variable(v) => write!(f, "unbound fourth-order variable {v}"),
            Violation::UnknownVocabSymbol(s) => write!(f, "unknown vocabulary symbol {s}"),
            Violation::VocabArityMismatch {
                symbol,
                expected,
                found,
            } => write!(f, "symbol {symbol} has arity {expected}, applied to {found} arguments"),
            Violation::SoArityMismatch {
                var,
                expected,
                found,
            } => write!(f, "SO variable {var} has arity {expected}, applied to {found} arguments"),
            Violation::WidthMismatch {
                var,
                expected,
                found,
            } => write!(f, "width mismatch: {var} has width {expected}, applied to {found} arguments"),
            Violation::ComponentArityMismatch {
                var,
                index,
                expected,
                found,
            } => write!(
                f,
                "argument {index} of {var} must have arity {expected}, found {found}"
            ),
            Violation::ComponentTypeMismatch { var, index } => {
                write!(f, "argument {index} of {var} has the wrong third-order type")
            }
            Violation::NotAnSoVariable(v) => write!(f, "{v} is not an SO variable"),
            Violation::NotAToVariable(v) => write!(f, "{v} is not a TO variable"),
            Violation::Rebinding(v) => write!(f, "variable {v} rebound in nested scope"),
            Violation::ZeroDegree(v) => write!(f, "degree of {v} must be >= 1"),
            Violation::BadType(m) => write!(f, "invalid relation type: {m}"),
            Violation::SchemaSubformulaNotSo(which) => {
                write!(f, "schema subformula {which} must be pure SO")
            }
            Violation::SchemaBadSignature => write!(f, "schema signature must be nonempty with arities >= 1"),
        }
    }
}

/// Checks a closed formula against `vocabulary`.
pub fn check_well_formed(formula: &Formula, vocabulary: &Signature) -> Result<(), Violation> {
    check_with_scope(formula, vocabulary, &Scope::new())
}

/// Checks a formula whose free variables are declared in `scope`.
pub fn check_with_scope(
    formula: &Formula,
    vocabulary: &Signature,
    scope: &Scope,
) -> Result<(), Violation> {
    let mut scope = scope.clone();
    check_rec(formula, vocabulary, &mut scope)
}

fn require_fo(scope: &Scope, name: &str) -> Result<(), Violation> {
    match scope.get(name) {
        Some(Binding::Fo) => Ok(()),
        _ => Err(Violation::UnboundFoVariable(name.to_string())),
    }
}

fn check_rec(f: &Formula, vocab: &Signature, scope: &mut Scope) -> Result<(), Violation> {
    match f {
        Formula::VocabAtom { symbol, args } => {
            let Some(&arity) = vocab.get(symbol) else {
                return Err(Violation::UnknownVocabSymbol(symbol.clone()));
            };
            if args.len() != arity {
                return Err(Violation::VocabArityMismatch {
                    symbol: symbol.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            for a in args {
                require_fo(scope, a)?;
            }
            Ok(())
        }
        Formula::Eq(a, b) => {
            require_fo(scope, a)?;
            require_fo(scope, b)
        }
        Formula::SoAtom { var, args } => {
            match scope.get(var) {
                Some(Binding::So { arity }) => {
                    if args.len() != *arity {
                        return Err(Violation::SoArityMismatch {
                            var: var.clone(),
                            expected: *arity,
                            found: args.len(),
                        });
                    }
                }
                Some(_) => return Err(Violation::NotAnSoVariable(var.clone())),
                None => return Err(Violation::UnboundSoVariable(var.clone())),
            }
            for a in args {
                require_fo(scope, a)?;
            }
            Ok(())
        }
        Formula::ToAtom { var, args } => {
            let arities = match scope.get(var) {
                Some(Binding::To { arities }) => arities.clone(),
                Some(_) => return Err(Violation::NotAToVariable(var.clone())),
                None => return Err(Violation::UnboundToVariable(var.clone())),
            };
            if args.len() != arities.len() {
                return Err(Violation::WidthMismatch {
                    var: var.clone(),
                    expected: arities.len(),
                    found: args.len(),
                });
            }
            for (i, (a, &want)) in args.iter().zip(&arities).enumerate() {
                match scope.get(a) {
                    Some(Binding::So { arity }) => {
                        if *arity != want {
                            return Err(Violation::ComponentArityMismatch {
                                var: var.clone(),
                                index: i + 1,
                                expected: want,
                                found: *arity,
                            });
                        }
                    }
                    Some(_) => return Err(Violation::NotAnSoVariable(a.clone())),
                    None => return Err(Violation::UnboundSoVariable(a.clone())),
                }
            }
            Ok(())
        }
        Formula::Ho4Atom { var, args } => {
            let components = match scope.get(var) {
                Some(Binding::Ho4 {
                    ty: RelationType::Ho4 { components },
                }) => components.clone(),
                Some(Binding::Ho4 { .. }) => {
                    return Err(Violation::BadType(format!("{var} has a non-order-4 type")))
                }
                Some(_) => return Err(Violation::UnboundHo4Variable(var.clone())),
                None => return Err(Violation::UnboundHo4Variable(var.clone())),
            };
            if args.len() != components.len() {
                return Err(Violation::WidthMismatch {
                    var: var.clone(),
                    expected: components.len(),
                    found: args.len(),
                });
            }
            for (i, (a, want)) in args.iter().zip(&components).enumerate() {
                match scope.get(a) {
                    Some(Binding::To { arities }) => {
                        let got = RelationType::To {
                            arities: arities.clone(),
                        };
                        if got != *want {
                            return Err(Violation::ComponentTypeMismatch {
                                var: var.clone(),
                                index: i + 1,
                            });
                        }
                    }
                    Some(_) => return Err(Violation::NotAToVariable(a.clone())),
                    None => return Err(Violation::UnboundToVariable(a.clone())),
                }
            }
            Ok(())
        }
        Formula::Not(g) => check_rec(g, vocab, scope),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_rec(a, vocab, scope)?;
            check_rec(b, vocab, scope)
        }
        Formula::QuantFo { var, body, .. } => {
            bind(scope, var.clone(), Binding::Fo)?;
            let r = check_rec(body, vocab, scope);
            scope.remove(var);
            r
        }
        Formula::QuantSo { var, arity, body, .. } => {
            if *arity == 0 {
                return Err(Violation::BadType(format!("{var} has arity 0")));
            }
            bind(scope, var.clone(), Binding::So { arity: *arity })?;
            let r = check_rec(body, vocab, scope);
            scope.remove(var);
            r
        }
        Formula::QuantToP {
            var,
            arities,
            degree,
            body,
            ..
        } => {
            if *degree == 0 {
                return Err(Violation::ZeroDegree(var.clone()));
            }
            RelationType::to(arities.clone())
                .map_err(|e| Violation::BadType(e.to_string()))?;
            bind(
                scope,
                var.clone(),
                Binding::To {
                    arities: arities.clone(),
                },
            )?;
            let r = check_rec(body, vocab, scope);
            scope.remove(var);
            r
        }
        Formula::QuantHo4P {
            var,
            ty,
            degree,
            body,
            ..
        } => {
            if *degree == 0 {
                return Err(Violation::ZeroDegree(var.clone()));
            }
            match ty {
                RelationType::Ho4 { components } => {
                    RelationType::ho4(components.clone())
                        .map_err(|e| Violation::BadType(e.to_string()))?;
                }
                _ => return Err(Violation::BadType(format!("{var} must have an order-4 type"))),
            }
            bind(scope, var.clone(), Binding::Ho4 { ty: ty.clone() })?;
            let r = check_rec(body, vocab, scope);
            scope.remove(var);
            r
        }
        Formula::Schema(inst) => check_schema(inst, vocab),
    }
}

fn bind(scope: &mut Scope, name: String, b: Binding) -> Result<(), Violation> {
    if scope.contains_key(&name) {
        return Err(Violation::Rebinding(name));
    }
    scope.insert(name, b);
    Ok(())
}

fn check_schema(inst: &SchemaInstance, vocab: &Signature) -> Result<(), Violation> {
    if inst.signature.is_empty() || inst.signature.iter().any(|&a| a == 0) {
        return Err(Violation::SchemaBadSignature);
    }
    if inst.degree == 0 || inst.size_degree == 0 {
        return Err(Violation::ZeroDegree("schema".to_string()));
    }
    let mut cur_vocab = vocab.clone();
    for (k, &a) in inst.signature.iter().enumerate() {
        cur_vocab.insert(SchemaInstance::cur(k + 1), a);
    }
    if !inst.alpha_first.is_pure_so() {
        return Err(Violation::SchemaSubformulaNotSo("first"));
    }
    if !inst.alpha_last.is_pure_so() {
        return Err(Violation::SchemaSubformulaNotSo("last"));
    }
    if !inst.step.is_pure_so() {
        return Err(Violation::SchemaSubformulaNotSo("step"));
    }
    check_with_scope(&inst.alpha_first, &cur_vocab, &Scope::new())?;
    check_with_scope(&inst.alpha_last, &cur_vocab, &Scope::new())?;
    let mut step_vocab = cur_vocab;
    for (k, &a) in inst.signature.iter().enumerate() {
        step_vocab.insert(SchemaInstance::next(k + 1), a);
    }
    check_with_scope(&inst.step, &step_vocab, &Scope::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Quantifier;

    fn graph_vocab() -> Signature {
        [("E".to_string(), 2)].into_iter().collect()
    }

    #[test]
    fn closed_fo_sentence_ok() {
        // forall x exists y E(x,y)
        let f = Formula::forall1(
            "x",
            Formula::exists1("y", Formula::vocab("E", vec!["x", "y"])),
        );
        assert_eq!(check_well_formed(&f, &graph_vocab()), Ok(()));
    }

    #[test]
    fn unbound_so_args_in_to_atom() {
        // exists3p C (1 2) 1. C(X, Y) with X, Y unbound
        let f = Formula::QuantToP {
            q: Quantifier::Exists,
            var: "C".into(),
            arities: vec![1, 2],
            degree: 1,
            body: Box::new(Formula::ToAtom {
                var: "C".into(),
                args: vec!["X".into(), "Y".into()],
            }),
        };
        assert_eq!(
            check_well_formed(&f, &graph_vocab()),
            Err(Violation::UnboundSoVariable("X".into()))
        );
    }

    #[test]
    fn to_atom_width_mismatch() {
        // width-2 TO variable applied to 3 SO variables
        let inner = Formula::ToAtom {
            var: "C".into(),
            args: vec!["X".into(), "Y".into(), "Z".into()],
        };
        let mut f = inner;
        for v in ["Z", "Y", "X"] {
            f = Formula::exists2(v, 1, f);
        }
        let f = Formula::QuantToP {
            q: Quantifier::Exists,
            var: "C".into(),
            arities: vec![1, 1],
            degree: 1,
            body: Box::new(f),
        };
        assert!(matches!(
            check_well_formed(&f, &graph_vocab()),
            Err(Violation::WidthMismatch { .. })
        ));
    }

    #[test]
    fn vocab_symbol_as_to_argument_rejected() {
        let f = Formula::QuantToP {
            q: Quantifier::Exists,
            var: "C".into(),
            arities: vec![2],
            degree: 1,
            body: Box::new(Formula::ToAtom {
                var: "C".into(),
                args: vec!["E".into()],
            }),
        };
        // E is a vocabulary symbol, not a bound SO variable.
        assert_eq!(
            check_well_formed(&f, &graph_vocab()),
            Err(Violation::UnboundSoVariable("E".into()))
        );
    }
}
