//! Formula AST covering FO connectives/quantifiers, SO quantifiers, bounded
//! third/fourth-order quantifiers, membership atoms, and the built-in
//! stage-sequence node.
//!
//! First-order terms are variables only; the logic has no constant or
//! function symbols. Variables are referenced by name; binders carry the
//! typing information.

use std::collections::BTreeSet;
use std::fmt;

use crate::types::RelationType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Exists => write!(f, "exists"),
            Quantifier::Forall => write!(f, "forall"),
        }
    }
}

/// Stage-sequence node: existence of a polynomially long sequence of stage
/// structures with first/last/step conditions. `alpha_first`/`alpha_last`
/// are SO formulae over the input vocabulary extended with `CUR.k` stage
/// placeholders; `step` additionally sees `NEXT.k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemaInstance {
    /// Stage signature: arity of each stage relation slot.
    pub signature: Vec<usize>,
    /// Bound on sequence length: `n^degree`.
    pub degree: usize,
    /// Bound on stage size: `n^size_degree`.
    pub size_degree: usize,
    pub alpha_first: Box<Formula>,
    pub alpha_last: Box<Formula>,
    pub step: Box<Formula>,
}

impl SchemaInstance {
    /// Placeholder symbol for the k-th slot (1-based) of the current stage.
    pub fn cur(k: usize) -> String {
        format!("CUR.{k}")
    }

    /// Placeholder symbol for the k-th slot (1-based) of the next stage.
    pub fn next(k: usize) -> String {
        format!("NEXT.{k}")
    }

    pub fn width(&self) -> usize {
        self.signature.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarClass {
    Fo,
    So,
    To,
    Ho4,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// Vocabulary atom `R(x1..xk)`; also used for `CUR.k`/`NEXT.k`
    /// placeholders inside schema subformulae.
    VocabAtom { symbol: String, args: Vec<String> },
    /// First-order equality.
    Eq(String, String),
    /// SO membership `X(x1..xr)`.
    SoAtom { var: String, args: Vec<String> },
    /// TO membership `C(X1..Xs)`; arguments are SO variables.
    ToAtom { var: String, args: Vec<String> },
    /// Fourth-order membership `Q(C1..Cs)`; arguments are TO variables.
    Ho4Atom { var: String, args: Vec<String> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    QuantFo {
        q: Quantifier,
        var: String,
        body: Box<Formula>,
    },
    QuantSo {
        q: Quantifier,
        var: String,
        arity: usize,
        body: Box<Formula>,
    },
    /// Bounded third-order quantifier with cardinality bound `n^degree`.
    QuantToP {
        q: Quantifier,
        var: String,
        arities: Vec<usize>,
        degree: usize,
        body: Box<Formula>,
    },
    /// Bounded fourth-order quantifier, downward bounded by `n^degree`.
    QuantHo4P {
        q: Quantifier,
        var: String,
        ty: RelationType,
        degree: usize,
        body: Box<Formula>,
    },
    Schema(SchemaInstance),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Right-nested conjunction of one or more formulae.
    pub fn and_all(mut parts: Vec<Formula>) -> Formula {
        assert!(!parts.is_empty(), "and_all needs at least one conjunct");
        let mut acc = parts.pop().unwrap();
        while let Some(p) = parts.pop() {
            acc = Formula::and(p, acc);
        }
        acc
    }

    /// Right-nested disjunction of one or more formulae.
    pub fn or_all(mut parts: Vec<Formula>) -> Formula {
        assert!(!parts.is_empty(), "or_all needs at least one disjunct");
        let mut acc = parts.pop().unwrap();
        while let Some(p) = parts.pop() {
            acc = Formula::or(p, acc);
        }
        acc
    }

    pub fn exists1(var: impl Into<String>, body: Formula) -> Formula {
        Formula::QuantFo {
            q: Quantifier::Exists,
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn forall1(var: impl Into<String>, body: Formula) -> Formula {
        Formula::QuantFo {
            q: Quantifier::Forall,
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn exists1_all<I, S>(vars: I, body: Formula) -> Formula
    where
        I: IntoIterator<Item = S>,
        I::IntoIter: DoubleEndedIterator,
        S: Into<String>,
    {
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::exists1(v, acc))
    }

    pub fn forall1_all<I, S>(vars: I, body: Formula) -> Formula
    where
        I: IntoIterator<Item = S>,
        I::IntoIter: DoubleEndedIterator,
        S: Into<String>,
    {
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::forall1(v, acc))
    }

    pub fn exists2(var: impl Into<String>, arity: usize, body: Formula) -> Formula {
        Formula::QuantSo {
            q: Quantifier::Exists,
            var: var.into(),
            arity,
            body: Box::new(body),
        }
    }

    pub fn forall2(var: impl Into<String>, arity: usize, body: Formula) -> Formula {
        Formula::QuantSo {
            q: Quantifier::Forall,
            var: var.into(),
            arity,
            body: Box::new(body),
        }
    }

    pub fn vocab(symbol: impl Into<String>, args: Vec<&str>) -> Formula {
        Formula::VocabAtom {
            symbol: symbol.into(),
            args: args.into_iter().map(String::from).collect(),
        }
    }

    pub fn so_atom(var: impl Into<String>, args: Vec<&str>) -> Formula {
        Formula::SoAtom {
            var: var.into(),
            args: args.into_iter().map(String::from).collect(),
        }
    }

    pub fn eq(a: impl Into<String>, b: impl Into<String>) -> Formula {
        Formula::Eq(a.into(), b.into())
    }

    /// `x = y` for same-width tuples of variable names, as a conjunction.
    pub fn tuple_eq(xs: &[String], ys: &[String]) -> Formula {
        assert_eq!(xs.len(), ys.len());
        assert!(!xs.is_empty());
        Formula::and_all(
            xs.iter()
                .zip(ys)
                .map(|(a, b)| Formula::eq(a.clone(), b.clone()))
                .collect(),
        )
    }

    /// Free first-order variables.
    pub fn free_fo_vars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut acc, VarClass::Fo);
        acc
    }

    /// Free second-order variables.
    pub fn free_so_vars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut acc, VarClass::So);
        acc
    }

    /// Free third-order variables.
    pub fn free_to_vars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut acc, VarClass::To);
        acc
    }

    /// Free fourth-order variables.
    pub fn free_ho4_vars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut acc, VarClass::Ho4);
        acc
    }

    fn collect_free(&self, bound: &mut Vec<String>, acc: &mut BTreeSet<String>, class: VarClass) {
        match self {
            Formula::VocabAtom { args, .. } => {
                if class == VarClass::Fo {
                    for a in args {
                        if !bound.contains(a) {
                            acc.insert(a.clone());
                        }
                    }
                }
            }
            Formula::Eq(a, b) => {
                if class == VarClass::Fo {
                    for v in [a, b] {
                        if !bound.contains(v) {
                            acc.insert(v.clone());
                        }
                    }
                }
            }
            Formula::SoAtom { var, args } => {
                if class == VarClass::So && !bound.contains(var) {
                    acc.insert(var.clone());
                }
                if class == VarClass::Fo {
                    for a in args {
                        if !bound.contains(a) {
                            acc.insert(a.clone());
                        }
                    }
                }
            }
            Formula::ToAtom { var, args } => {
                if class == VarClass::To && !bound.contains(var) {
                    acc.insert(var.clone());
                }
                if class == VarClass::So {
                    for a in args {
                        if !bound.contains(a) {
                            acc.insert(a.clone());
                        }
                    }
                }
            }
            Formula::Ho4Atom { var, args } => {
                if class == VarClass::Ho4 && !bound.contains(var) {
                    acc.insert(var.clone());
                }
                if class == VarClass::To {
                    for a in args {
                        if !bound.contains(a) {
                            acc.insert(a.clone());
                        }
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, acc, class),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, acc, class);
                b.collect_free(bound, acc, class);
            }
            Formula::QuantFo { var, body, .. } => {
                let scoped = class == VarClass::Fo;
                if scoped {
                    bound.push(var.clone());
                }
                body.collect_free(bound, acc, class);
                if scoped {
                    bound.pop();
                }
            }
            Formula::QuantSo { var, body, .. } => {
                let scoped = class == VarClass::So;
                if scoped {
                    bound.push(var.clone());
                }
                body.collect_free(bound, acc, class);
                if scoped {
                    bound.pop();
                }
            }
            Formula::QuantToP { var, body, .. } => {
                let scoped = class == VarClass::To;
                if scoped {
                    bound.push(var.clone());
                }
                body.collect_free(bound, acc, class);
                if scoped {
                    bound.pop();
                }
            }
            Formula::QuantHo4P { var, body, .. } => {
                let scoped = class == VarClass::Ho4;
                if scoped {
                    bound.push(var.clone());
                }
                body.collect_free(bound, acc, class);
                if scoped {
                    bound.pop();
                }
            }
            // Schema subformulae are closed over the extended vocabulary.
            Formula::Schema(_) => {}
        }
    }

    /// True when the formula contains no TO/HO4/schema constructs, i.e. it is
    /// in the SO fragment.
    pub fn is_pure_so(&self) -> bool {
        match self {
            Formula::VocabAtom { .. } | Formula::Eq(..) | Formula::SoAtom { .. } => true,
            Formula::ToAtom { .. } | Formula::Ho4Atom { .. } | Formula::Schema(_) => false,
            Formula::Not(f) => f.is_pure_so(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_pure_so() && b.is_pure_so()
            }
            Formula::QuantFo { body, .. } | Formula::QuantSo { body, .. } => body.is_pure_so(),
            Formula::QuantToP { .. } | Formula::QuantHo4P { .. } => false,
        }
    }

    /// True when the formula is first-order only.
    pub fn is_pure_fo(&self) -> bool {
        match self {
            Formula::VocabAtom { .. } | Formula::Eq(..) => true,
            Formula::SoAtom { .. }
            | Formula::ToAtom { .. }
            | Formula::Ho4Atom { .. }
            | Formula::Schema(_) => false,
            Formula::Not(f) => f.is_pure_fo(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_pure_fo() && b.is_pure_fo()
            }
            Formula::QuantFo { body, .. } => body.is_pure_fo(),
            Formula::QuantSo { .. } | Formula::QuantToP { .. } | Formula::QuantHo4P { .. } => false,
        }
    }

    /// All vocabulary symbols referenced by atoms (including placeholders).
    pub fn vocab_symbols(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::VocabAtom { symbol, .. } = f {
                acc.insert(symbol.clone());
            }
        });
        acc
    }

    /// Pre-order traversal over every node, including schema subformulae.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::VocabAtom { .. }
            | Formula::Eq(..)
            | Formula::SoAtom { .. }
            | Formula::ToAtom { .. }
            | Formula::Ho4Atom { .. } => {}
            Formula::Not(f) => f.walk(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Formula::QuantFo { body, .. }
            | Formula::QuantSo { body, .. }
            | Formula::QuantToP { body, .. }
            | Formula::QuantHo4P { body, .. } => body.walk(visit),
            Formula::Schema(inst) => {
                inst.alpha_first.walk(visit);
                inst.alpha_last.walk(visit);
                inst.step.walk(visit);
            }
        }
    }

    /// Renames free first-order occurrences of `from` to `to`. Binders for
    /// `from` shadow as usual.
    pub fn rename_free_fo(&self, from: &str, to: &str) -> Formula {
        let ren = |v: &String| {
            if v == from {
                to.to_string()
            } else {
                v.clone()
            }
        };
        match self {
            Formula::VocabAtom { symbol, args } => Formula::VocabAtom {
                symbol: symbol.clone(),
                args: args.iter().map(ren).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(ren(a), ren(b)),
            Formula::SoAtom { var, args } => Formula::SoAtom {
                var: var.clone(),
                args: args.iter().map(ren).collect(),
            },
            Formula::ToAtom { .. } | Formula::Ho4Atom { .. } | Formula::Schema(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.rename_free_fo(from, to)),
            Formula::And(a, b) => {
                Formula::and(a.rename_free_fo(from, to), b.rename_free_fo(from, to))
            }
            Formula::Or(a, b) => {
                Formula::or(a.rename_free_fo(from, to), b.rename_free_fo(from, to))
            }
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_free_fo(from, to), b.rename_free_fo(from, to))
            }
            Formula::QuantFo { q, var, body } => {
                if var == from {
                    self.clone()
                } else {
                    Formula::QuantFo {
                        q: *q,
                        var: var.clone(),
                        body: Box::new(body.rename_free_fo(from, to)),
                    }
                }
            }
            Formula::QuantSo { q, var, arity, body } => Formula::QuantSo {
                q: *q,
                var: var.clone(),
                arity: *arity,
                body: Box::new(body.rename_free_fo(from, to)),
            },
            Formula::QuantToP {
                q,
                var,
                arities,
                degree,
                body,
            } => Formula::QuantToP {
                q: *q,
                var: var.clone(),
                arities: arities.clone(),
                degree: *degree,
                body: Box::new(body.rename_free_fo(from, to)),
            },
            Formula::QuantHo4P {
                q,
                var,
                ty,
                degree,
                body,
            } => Formula::QuantHo4P {
                q: *q,
                var: var.clone(),
                ty: ty.clone(),
                degree: *degree,
                body: Box::new(body.rename_free_fo(from, to)),
            },
        }
    }

    /// Renames free second-order occurrences of `from` to `to`.
    pub fn rename_free_so(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::SoAtom { var, args } => Formula::SoAtom {
                var: if var == from { to.to_string() } else { var.clone() },
                args: args.clone(),
            },
            Formula::ToAtom { var, args } => Formula::ToAtom {
                var: var.clone(),
                args: args
                    .iter()
                    .map(|a| if a == from { to.to_string() } else { a.clone() })
                    .collect(),
            },
            Formula::VocabAtom { .. }
            | Formula::Eq(..)
            | Formula::Ho4Atom { .. }
            | Formula::Schema(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.rename_free_so(from, to)),
            Formula::And(a, b) => {
                Formula::and(a.rename_free_so(from, to), b.rename_free_so(from, to))
            }
            Formula::Or(a, b) => {
                Formula::or(a.rename_free_so(from, to), b.rename_free_so(from, to))
            }
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_free_so(from, to), b.rename_free_so(from, to))
            }
            Formula::QuantFo { q, var, body } => Formula::QuantFo {
                q: *q,
                var: var.clone(),
                body: Box::new(body.rename_free_so(from, to)),
            },
            Formula::QuantSo { q, var, arity, body } => {
                if var == from {
                    self.clone()
                } else {
                    Formula::QuantSo {
                        q: *q,
                        var: var.clone(),
                        arity: *arity,
                        body: Box::new(body.rename_free_so(from, to)),
                    }
                }
            }
            Formula::QuantToP {
                q,
                var,
                arities,
                degree,
                body,
            } => Formula::QuantToP {
                q: *q,
                var: var.clone(),
                arities: arities.clone(),
                degree: *degree,
                body: Box::new(body.rename_free_so(from, to)),
            },
            Formula::QuantHo4P {
                q,
                var,
                ty,
                degree,
                body,
            } => Formula::QuantHo4P {
                q: *q,
                var: var.clone(),
                ty: ty.clone(),
                degree: *degree,
                body: Box::new(body.rename_free_so(from, to)),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_vars_respect_binders() {
        // exists x. E(x, y) — y free, x bound
        let f = Formula::exists1("x", Formula::vocab("E", vec!["x", "y"]));
        let free = f.free_fo_vars();
        assert!(free.contains("y"));
        assert!(!free.contains("x"));
    }

    #[test]
    fn rename_respects_shadowing() {
        let f = Formula::and(
            Formula::vocab("P", vec!["x"]),
            Formula::exists1("x", Formula::vocab("P", vec!["x"])),
        );
        let g = f.rename_free_fo("x", "z");
        assert_eq!(
            g,
            Formula::and(
                Formula::vocab("P", vec!["z"]),
                Formula::exists1("x", Formula::vocab("P", vec!["x"])),
            )
        );
    }
}
