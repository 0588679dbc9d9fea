//! Stage-sequence semantics: a schema node holds on a structure iff there is
//! a sequence of at most `n^d` stages — tuples of relations of the declared
//! signature over the input domain — whose first stage satisfies the first
//! condition, whose last satisfies the last condition, and where every
//! consecutive pair satisfies the step condition with `CUR.k`/`NEXT.k` bound
//! to the two stages. Stages must be nonempty and have at most `n^t` active
//! elements.
//!
//! The search is breadth-first from the initial stages with exact-value
//! memoization of visited stages; initial stages and successors are obtained
//! from the pruned bit solver, so only stages consistent with the conditions
//! are ever materialized.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Formula, SchemaInstance};
use crate::structure::{FiniteStructure, Relation};

use super::enumerate::tuple_count;
use super::solver::{collect_so_prefix, SolveProblem, TargetSpec};
use super::{EvalBudget, EvalCtx, EvalError, Valuation};

/// One stage: a relation per signature slot.
pub type Stage = Vec<Relation>;

pub fn eval_schema(
    structure: &FiniteStructure,
    inst: &SchemaInstance,
    budget: &EvalBudget,
) -> Result<bool, EvalError> {
    let mut ctx = EvalCtx::new(structure, budget);
    eval_schema_ctx(&mut ctx, inst)
}

/// Like [`eval_schema`], but returns the first stage sequence found.
pub fn eval_schema_witness(
    structure: &FiniteStructure,
    inst: &SchemaInstance,
    budget: &EvalBudget,
) -> Result<Option<Vec<Stage>>, EvalError> {
    let mut ctx = EvalCtx::new(structure, budget);
    search(&mut ctx, inst)
}

pub(crate) fn eval_schema_ctx(ctx: &mut EvalCtx, inst: &SchemaInstance) -> Result<bool, EvalError> {
    Ok(search(ctx, inst)?.is_some())
}

fn stage_targets(inst: &SchemaInstance, next: bool) -> Vec<TargetSpec> {
    inst.signature
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let name = if next {
                SchemaInstance::next(k + 1)
            } else {
                SchemaInstance::cur(k + 1)
            };
            TargetSpec::symbol(name, a)
        })
        .collect()
}

fn valid_stage(stage: &Stage, max_active: u128) -> bool {
    let mut active = BTreeSet::new();
    for rel in stage {
        active.extend(rel.active_elements());
    }
    !active.is_empty() && (active.len() as u128) <= max_active
}

fn extend_with_stage(
    structure: &FiniteStructure,
    inst: &SchemaInstance,
    stage: &Stage,
) -> FiniteStructure {
    let mut extended = structure.clone();
    for (k, rel) in stage.iter().enumerate() {
        extended.set_relation(SchemaInstance::cur(k + 1), rel.clone());
    }
    extended
}

/// Solves a stage condition for the unknown stage relations, peeling any
/// leading existential SO quantifiers of the condition as auxiliary search
/// variables.
fn solve_stages(
    ctx: &mut EvalCtx,
    structure: &FiniteStructure,
    condition: &Formula,
    mut targets: Vec<TargetSpec>,
) -> Result<Vec<Stage>, EvalError> {
    let (aux, matrix) = collect_so_prefix(condition);
    for (name, arity) in aux {
        // Peeled witnesses participate in the search but not in solutions.
        if !targets.iter().any(|t| t.name == name) {
            targets.push(TargetSpec {
                name,
                arity,
                is_symbol: false,
                projected: false,
            });
        }
    }
    let val = Valuation::new();
    let mut problem = SolveProblem::new(structure, &val, targets, &matrix)?;
    let sols = problem.solve_all(ctx)?;
    Ok(sols.into_iter().collect())
}

fn search(ctx: &mut EvalCtx, inst: &SchemaInstance) -> Result<Option<Vec<Stage>>, EvalError> {
    let n = ctx.structure.domain_size();
    let max_len = tuple_count(n, inst.degree)
        .ok_or_else(|| EvalError::BudgetExceeded("sequence bound overflows".into()))?;
    let max_active = tuple_count(n, inst.size_degree)
        .ok_or_else(|| EvalError::BudgetExceeded("stage size bound overflows".into()))?;

    let initial = solve_stages(
        ctx,
        ctx.structure,
        &inst.alpha_first,
        stage_targets(inst, false),
    )?;
    let mut visited: BTreeSet<Stage> = BTreeSet::new();
    let mut parent: BTreeMap<Stage, Stage> = BTreeMap::new();
    let mut frontier: Vec<Stage> = Vec::new();
    for s in initial {
        if valid_stage(&s, max_active) && visited.insert(s.clone()) {
            frontier.push(s);
        }
    }

    let mut depth: u128 = 1;
    while !frontier.is_empty() && depth <= max_len {
        // Check the last-stage condition on every stage first reached here.
        for s in &frontier {
            ctx.heartbeat()?;
            let extended = extend_with_stage(ctx.structure, inst, s);
            let mut sub = EvalCtx::new_nested(&extended, ctx);
            let mut val = Valuation::new();
            if super::eval_rec(&mut sub, &inst.alpha_last, &mut val)? {
                return Ok(Some(reconstruct(&parent, s.clone())));
            }
        }
        if depth == max_len {
            break;
        }
        let mut next_frontier = Vec::new();
        for s in &frontier {
            let extended = extend_with_stage(ctx.structure, inst, s);
            let succs = {
                let mut sub = EvalCtx::new_nested(&extended, ctx);
                solve_stages(&mut sub, &extended, &inst.step, stage_targets(inst, true))?
            };
            for succ in succs {
                if !valid_stage(&succ, max_active) {
                    continue;
                }
                if visited.len() as u64 >= ctx.max_candidates {
                    return Err(EvalError::BudgetExceeded(format!(
                        "stage search exceeded {} stages",
                        ctx.max_candidates
                    )));
                }
                if visited.insert(succ.clone()) {
                    parent.insert(succ.clone(), s.clone());
                    next_frontier.push(succ);
                }
            }
        }
        frontier = next_frontier;
        depth += 1;
    }
    Ok(None)
}

fn reconstruct(parent: &BTreeMap<Stage, Stage>, last: Stage) -> Vec<Stage> {
    let mut seq = vec![last];
    while let Some(p) = parent.get(seq.last().unwrap()) {
        seq.push(p.clone());
    }
    seq.reverse();
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_formula, parse_structure};

    /// A toy instance over signature (1): start with a singleton set, each
    /// step adds exactly one element, finish when the set covers the domain.
    fn grow_instance() -> SchemaInstance {
        let first = parse_formula(
            "(exists1 (x) (and (atom CUR.1 x) (forall1 (y) (implies (atom CUR.1 y) (eq y x)))))",
        )
        .unwrap();
        let last = parse_formula("(forall1 (x) (atom CUR.1 x))").unwrap();
        let step = parse_formula(
            "(and (forall1 (x) (implies (atom CUR.1 x) (atom NEXT.1 x))) \
              (exists1 (x) (and (not (atom CUR.1 x)) (and (atom NEXT.1 x) \
                (forall1 (y) (implies (atom NEXT.1 y) (or (atom CUR.1 y) (eq y x))))))))",
        )
        .unwrap();
        SchemaInstance {
            signature: vec![1],
            degree: 1,
            size_degree: 1,
            alpha_first: Box::new(first),
            alpha_last: Box::new(last),
            step: Box::new(step),
        }
    }

    #[test]
    fn growing_chain_reaches_full_domain() {
        for n in 1..=4 {
            let s = parse_structure(&format!("domain {n}\n")).unwrap();
            let r = eval_schema(&s, &grow_instance(), &EvalBudget::default());
            // Needs n stages; the length bound n^1 = n allows exactly that.
            assert_eq!(r, Ok(true), "n={n}");
        }
    }

    #[test]
    fn length_bound_respected() {
        // Same instance but the last condition needs more stages than the
        // bound allows: ask for the full domain while starting from one
        // element with degree bound still n; shrink the bound by demanding
        // one step less: use a 2-element domain where the last condition
        // wants both but the step is disabled.
        let mut inst = grow_instance();
        inst.step = Box::new(parse_formula("(exists1 (x) (not (eq x x)))").unwrap());
        let s = parse_structure("domain 2\n").unwrap();
        assert_eq!(eval_schema(&s, &inst, &EvalBudget::default()), Ok(false));
    }

    #[test]
    fn witness_sequence_is_a_valid_chain() {
        let s = parse_structure("domain 3\n").unwrap();
        let seq = eval_schema_witness(&s, &grow_instance(), &EvalBudget::default())
            .unwrap()
            .expect("satisfiable");
        assert_eq!(seq.len(), 3);
        for (i, stage) in seq.iter().enumerate() {
            assert_eq!(stage[0].len(), i + 1);
        }
    }

    #[test]
    fn single_stage_sequence_allowed() {
        // First and last conditions met by the same stage: m = 1.
        let inst = SchemaInstance {
            signature: vec![1],
            degree: 1,
            size_degree: 1,
            alpha_first: Box::new(
                parse_formula("(forall1 (x) (atom CUR.1 x))").unwrap(),
            ),
            alpha_last: Box::new(
                parse_formula("(forall1 (x) (atom CUR.1 x))").unwrap(),
            ),
            step: Box::new(parse_formula("(exists1 (x) (not (eq x x)))").unwrap()),
        };
        let s = parse_structure("domain 2\n").unwrap();
        assert_eq!(eval_schema(&s, &inst, &EvalBudget::default()), Ok(true));
    }

    #[test]
    fn empty_stages_excluded() {
        // The only stage satisfying the first condition would be empty.
        let inst = SchemaInstance {
            signature: vec![1],
            degree: 1,
            size_degree: 1,
            alpha_first: Box::new(
                parse_formula("(forall1 (x) (not (atom CUR.1 x)))").unwrap(),
            ),
            alpha_last: Box::new(
                parse_formula("(forall1 (x) (not (atom CUR.1 x)))").unwrap(),
            ),
            step: Box::new(parse_formula("(exists1 (x) (not (eq x x)))").unwrap()),
        };
        let s = parse_structure("domain 2\n").unwrap();
        assert_eq!(eval_schema(&s, &inst, &EvalBudget::default()), Ok(false));
    }
}
