//! Brute-force semantic oracle: decides `A ⊨ φ` for every formula node.
//!
//! Quantifiers are decided by enumerating their candidate spaces in a fixed
//! deterministic order. Second-order quantifier spaces that are too large to
//! enumerate are delegated to a pruned bit-level search
//! ([`solver`]) whenever the subformula is expressible as an existential SO
//! prefix over a matrix; otherwise the budget is reported as exceeded.
//! Budget exhaustion is a third outcome, never silently reported as false.

pub mod enumerate;
pub mod schema;
pub mod solver;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::{Formula, Quantifier};
use crate::relation_value::HORelation;
use crate::structure::FiniteStructure;
use enumerate::{
    count_bounded_rank3, count_bounded_rank4, enum_bounded_rank3, enum_bounded_rank4,
    enum_so_relations_with_cap, so_relation_count,
};

/// Largest SO candidate space that is enumerated directly rather than routed
/// to the bit-level search.
const SO_INLINE_LIMIT: u128 = 1 << 16;

/// Hard cap on tuple positions for directly enumerated SO spaces.
const POSITION_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Elem(usize),
    Rel(HORelation),
}

impl Value {
    pub fn rank2(rel: crate::structure::Relation) -> Value {
        Value::Rel(HORelation::Rank2(rel))
    }
}

/// Partial map from variable names to values.
pub type Valuation = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalBudget {
    /// Cap on quantifier-witness enumerations (and search nodes) per node.
    pub max_candidates: u64,
    pub time_limit: Option<Duration>,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            max_candidates: 50_000_000,
            time_limit: None,
        }
    }
}

impl EvalBudget {
    pub fn with_candidates(max_candidates: u64) -> Self {
        EvalBudget {
            max_candidates,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

pub(crate) struct EvalCtx<'a> {
    pub structure: &'a FiniteStructure,
    pub max_candidates: u64,
    pub deadline: Option<Instant>,
    tick: u64,
}

impl<'a> EvalCtx<'a> {
    pub fn new(structure: &'a FiniteStructure, budget: &EvalBudget) -> Self {
        EvalCtx {
            structure,
            max_candidates: budget.max_candidates,
            deadline: budget.time_limit.map(|d| Instant::now() + d),
            tick: 0,
        }
    }

    /// A nested context over a (possibly different) structure, inheriting
    /// the parent's budget and deadline.
    pub(crate) fn new_nested(structure: &'a FiniteStructure, parent: &EvalCtx) -> Self {
        EvalCtx {
            structure,
            max_candidates: parent.max_candidates,
            deadline: parent.deadline,
            tick: 0,
        }
    }

    /// Periodic wall-clock check; cheap enough for inner loops.
    pub fn heartbeat(&mut self) -> Result<(), EvalError> {
        self.tick = self.tick.wrapping_add(1);
        if self.tick % 4096 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(EvalError::BudgetExceeded("time limit".into()));
                }
            }
        }
        Ok(())
    }

    fn candidate_gate(&self, count: Option<u128>, what: &str) -> Result<u128, EvalError> {
        match count {
            Some(c) if c <= self.max_candidates as u128 => Ok(c),
            Some(c) => Err(EvalError::BudgetExceeded(format!(
                "{what}: {c} candidates exceed cap {}",
                self.max_candidates
            ))),
            None => Err(EvalError::BudgetExceeded(format!(
                "{what}: candidate count overflows"
            ))),
        }
    }
}

/// Decides `structure, valuation ⊨ formula` under the given budget.
pub fn eval(
    structure: &FiniteStructure,
    formula: &Formula,
    valuation: &Valuation,
    budget: &EvalBudget,
) -> Result<bool, EvalError> {
    let mut ctx = EvalCtx::new(structure, budget);
    let mut val = valuation.clone();
    eval_rec(&mut ctx, formula, &mut val)
}

fn elem(val: &Valuation, name: &str) -> Result<usize, EvalError> {
    match val.get(name) {
        Some(Value::Elem(e)) => Ok(*e),
        _ => Err(EvalError::TypeMismatch(format!(
            "{name} is not a first-order value"
        ))),
    }
}

pub(crate) fn eval_rec(
    ctx: &mut EvalCtx,
    f: &Formula,
    val: &mut Valuation,
) -> Result<bool, EvalError> {
    ctx.heartbeat()?;
    match f {
        Formula::VocabAtom { symbol, args } => {
            let tuple: Vec<usize> = args
                .iter()
                .map(|a| elem(val, a))
                .collect::<Result<_, _>>()?;
            Ok(ctx.structure.holds(symbol, &tuple))
        }
        Formula::Eq(a, b) => Ok(elem(val, a)? == elem(val, b)?),
        Formula::SoAtom { var, args } => {
            let tuple: Vec<usize> = args
                .iter()
                .map(|a| elem(val, a))
                .collect::<Result<_, _>>()?;
            match val.get(var) {
                Some(Value::Rel(HORelation::Rank2(rel))) => Ok(rel.contains(&tuple)),
                _ => Err(EvalError::TypeMismatch(format!(
                    "{var} is not an SO value"
                ))),
            }
        }
        Formula::ToAtom { var, args } => {
            let mut member = Vec::with_capacity(args.len());
            for a in args {
                match val.get(a) {
                    Some(Value::Rel(HORelation::Rank2(rel))) => member.push(rel.clone()),
                    _ => {
                        return Err(EvalError::TypeMismatch(format!(
                            "{a} is not an SO value"
                        )))
                    }
                }
            }
            match val.get(var) {
                Some(Value::Rel(HORelation::Rank3(v))) => Ok(v.contains(&member)),
                _ => Err(EvalError::TypeMismatch(format!(
                    "{var} is not a TO value"
                ))),
            }
        }
        Formula::Ho4Atom { var, args } => {
            let mut member = Vec::with_capacity(args.len());
            for a in args {
                match val.get(a) {
                    Some(Value::Rel(HORelation::Rank3(v))) => member.push(v.clone()),
                    _ => {
                        return Err(EvalError::TypeMismatch(format!(
                            "{a} is not a TO value"
                        )))
                    }
                }
            }
            match val.get(var) {
                Some(Value::Rel(HORelation::Rank4(v))) => Ok(v.contains(&member)),
                _ => Err(EvalError::TypeMismatch(format!(
                    "{var} is not a fourth-order value"
                ))),
            }
        }
        Formula::Not(g) => Ok(!eval_rec(ctx, g, val)?),
        Formula::And(a, b) => Ok(eval_rec(ctx, a, val)? && eval_rec(ctx, b, val)?),
        Formula::Or(a, b) => Ok(eval_rec(ctx, a, val)? || eval_rec(ctx, b, val)?),
        Formula::Implies(a, b) => Ok(!eval_rec(ctx, a, val)? || eval_rec(ctx, b, val)?),
        Formula::QuantFo { q, var, body } => {
            let n = ctx.structure.domain_size();
            for e in 0..n {
                let prev = val.insert(var.clone(), Value::Elem(e));
                let r = eval_rec(ctx, body, val);
                restore(val, var, prev);
                let r = r?;
                match q {
                    Quantifier::Exists if r => return Ok(true),
                    Quantifier::Forall if !r => return Ok(false),
                    _ => {}
                }
            }
            Ok(*q == Quantifier::Forall)
        }
        Formula::QuantSo { q, var, arity, body } => {
            let n = ctx.structure.domain_size();
            let count = so_relation_count(n, *arity);
            let inline =
                matches!(count, Some(c) if c <= SO_INLINE_LIMIT.min(ctx.max_candidates as u128));
            if inline {
                let iter = enum_so_relations_with_cap(n, *arity, POSITION_CAP)
                    .map_err(|e| EvalError::BudgetExceeded(e.to_string()))?;
                for rel in iter {
                    ctx.heartbeat()?;
                    let prev = val.insert(var.clone(), Value::rank2(rel));
                    let r = eval_rec(ctx, body, val);
                    restore(val, var, prev);
                    let r = r?;
                    match q {
                        Quantifier::Exists if r => return Ok(true),
                        Quantifier::Forall if !r => return Ok(false),
                        _ => {}
                    }
                }
                Ok(*q == Quantifier::Forall)
            } else {
                // Too large to enumerate: route through the pruned search.
                match q {
                    Quantifier::Exists => solver::solve_exists_so(ctx, f, val),
                    Quantifier::Forall => {
                        let dual = Formula::QuantSo {
                            q: Quantifier::Exists,
                            var: var.clone(),
                            arity: *arity,
                            body: Box::new(Formula::not((**body).clone())),
                        };
                        Ok(!solver::solve_exists_so(ctx, &dual, val)?)
                    }
                }
            }
        }
        Formula::QuantToP {
            q,
            var,
            arities,
            degree,
            body,
        } => {
            let n = ctx.structure.domain_size();
            ctx.candidate_gate(count_bounded_rank3(n, arities, *degree), "TO quantifier")?;
            let iter = enum_bounded_rank3(n, arities, *degree, POSITION_CAP)
                .map_err(|e| EvalError::BudgetExceeded(e.to_string()))?;
            for cand in iter {
                ctx.heartbeat()?;
                let prev = val.insert(var.clone(), Value::Rel(HORelation::Rank3(cand)));
                let r = eval_rec(ctx, body, val);
                restore(val, var, prev);
                let r = r?;
                match q {
                    Quantifier::Exists if r => return Ok(true),
                    Quantifier::Forall if !r => return Ok(false),
                    _ => {}
                }
            }
            Ok(*q == Quantifier::Forall)
        }
        Formula::QuantHo4P {
            q,
            var,
            ty,
            degree,
            body,
        } => {
            let n = ctx.structure.domain_size();
            let component_arities: Vec<Vec<usize>> = match ty {
                crate::types::RelationType::Ho4 { components } => components
                    .iter()
                    .map(|c| match c {
                        crate::types::RelationType::To { arities } => Ok(arities.clone()),
                        _ => Err(EvalError::TypeMismatch(
                            "order-4 components must be order-3 types".into(),
                        )),
                    })
                    .collect::<Result<_, _>>()?,
                _ => {
                    return Err(EvalError::TypeMismatch(
                        "fourth-order quantifier needs an order-4 type".into(),
                    ))
                }
            };
            ctx.candidate_gate(
                count_bounded_rank4(n, &component_arities, *degree),
                "fourth-order quantifier",
            )?;
            let iter = enum_bounded_rank4(n, &component_arities, *degree, true, POSITION_CAP)
                .map_err(|e| EvalError::BudgetExceeded(e.to_string()))?;
            for cand in iter {
                ctx.heartbeat()?;
                let prev = val.insert(var.clone(), Value::Rel(HORelation::Rank4(cand)));
                let r = eval_rec(ctx, body, val);
                restore(val, var, prev);
                let r = r?;
                match q {
                    Quantifier::Exists if r => return Ok(true),
                    Quantifier::Forall if !r => return Ok(false),
                    _ => {}
                }
            }
            Ok(*q == Quantifier::Forall)
        }
        Formula::Schema(inst) => schema::eval_schema_ctx(ctx, inst),
    }
}

fn restore(val: &mut Valuation, var: &str, prev: Option<Value>) {
    match prev {
        Some(v) => {
            val.insert(var.to_string(), v);
        }
        None => {
            val.remove(var);
        }
    }
}

/// Convenience wrapper for closed formulae.
pub fn eval_sentence(
    structure: &FiniteStructure,
    formula: &Formula,
    budget: &EvalBudget,
) -> Result<bool, EvalError> {
    eval(structure, formula, &Valuation::new(), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Relation;
    use crate::textio::{parse_formula, parse_structure};

    fn k2() -> FiniteStructure {
        parse_structure("domain 2\nrelation E arity 2\n0 1\n1 0\n").unwrap()
    }

    #[test]
    fn k2_is_undirected_and_loop_free() {
        let phi1 = parse_formula(
            "(forall1 (x) (forall1 (y) (implies (atom E x y) (atom E y x))))",
        )
        .unwrap();
        let phi2 = parse_formula("(forall1 (x) (not (atom E x x)))").unwrap();
        let both = Formula::and(phi1, phi2);
        assert_eq!(eval_sentence(&k2(), &both, &EvalBudget::default()), Ok(true));
    }

    #[test]
    fn empty_to_relation_is_always_a_candidate() {
        let f = parse_formula("(exists3p (C (1) 1) (forall2 (X 1) (not (atom3 C X))))").unwrap();
        assert_eq!(eval_sentence(&k2(), &f, &EvalBudget::default()), Ok(true));
    }

    #[test]
    fn to_witness_with_full_unary_set() {
        // Witness C = {({0,1})}.
        let f = parse_formula(
            "(exists3p (C (1) 1) (exists2 (X 1) (and (atom3 C X) (forall1 (z) (atom2 X z)))))",
        )
        .unwrap();
        assert_eq!(eval_sentence(&k2(), &f, &EvalBudget::default()), Ok(true));
    }

    #[test]
    fn budget_exceeded_is_an_error_not_false() {
        let f = parse_formula(
            "(exists3p (C (1 2) 1) (exists2 (X 1) (exists2 (Y 2) (atom3 C X Y))))",
        )
        .unwrap();
        let r = eval_sentence(&k2(), &f, &EvalBudget::with_candidates(10));
        assert!(matches!(r, Err(EvalError::BudgetExceeded(_))));
    }

    #[test]
    fn duality_of_bounded_quantifiers() {
        let inner = "(exists2 (X 1) (and (atom3 C X) (exists1 (z) (atom2 X z))))";
        let forall = parse_formula(&format!("(forall3p (C (1) 1) {inner})")).unwrap();
        let dual = parse_formula(&format!("(not (exists3p (C (1) 1) (not {inner})))")).unwrap();
        for text in [
            "domain 1\n",
            "domain 2\n",
            "domain 2\nrelation E arity 2\n0 1\n",
        ] {
            let s = parse_structure(text).unwrap();
            assert_eq!(
                eval_sentence(&s, &forall, &EvalBudget::default()),
                eval_sentence(&s, &dual, &EvalBudget::default())
            );
        }
    }

    #[test]
    fn monotone_in_degree() {
        let body = "(exists2 (X 1) (and (atom3 C X) (forall1 (z) (atom2 X z))))";
        let d1 = parse_formula(&format!("(exists3p (C (1) 1) {body})")).unwrap();
        let d2 = parse_formula(&format!("(exists3p (C (1) 2) {body})")).unwrap();
        let s = k2();
        let r1 = eval_sentence(&s, &d1, &EvalBudget::default()).unwrap();
        let r2 = eval_sentence(&s, &d2, &EvalBudget::default()).unwrap();
        assert!(!r1 || r2);
    }

    #[test]
    fn ho4_membership_micro() {
        let f = parse_formula("(exists4p (Q ((1)) 1) (exists3p (C (1) 1) (atom4 Q C)))").unwrap();
        let s = parse_structure("domain 1\n").unwrap();
        assert_eq!(eval_sentence(&s, &f, &EvalBudget::default()), Ok(true));
    }

    #[test]
    fn free_variable_valuation() {
        let f = parse_formula("(atom2 X x)").unwrap();
        let mut val = Valuation::new();
        val.insert("x".into(), Value::Elem(0));
        val.insert(
            "X".into(),
            Value::rank2(Relation::from_tuples(1, vec![vec![0]]).unwrap()),
        );
        let s = parse_structure("domain 2\n").unwrap();
        assert_eq!(eval(&s, &f, &val, &EvalBudget::default()), Ok(true));
    }
}
