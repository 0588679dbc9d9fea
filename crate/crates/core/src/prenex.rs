//! Prenex normal form for SO formulae and quantifier-alternation analysis.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{Formula, Quantifier};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrenexError {
    #[error("formula is not pure SO")]
    NotPureSo,
    #[error("formula is not in prenex form")]
    NotPrenex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PrefixEntry {
    Fo(Quantifier, String),
    So(Quantifier, String, usize),
}

impl PrefixEntry {
    fn flip(self) -> PrefixEntry {
        match self {
            PrefixEntry::Fo(q, v) => PrefixEntry::Fo(q.dual(), v),
            PrefixEntry::So(q, v, a) => PrefixEntry::So(q.dual(), v, a),
        }
    }

    fn var(&self) -> &str {
        match self {
            PrefixEntry::Fo(_, v) | PrefixEntry::So(_, v, _) => v,
        }
    }
}

/// Converts a pure SO formula into a logically equivalent prenex formula.
/// Binder order follows the original left-to-right order where the classical
/// extraction rules permit; bound variables are renamed only on collision.
pub fn prenex_normal_form(formula: &Formula) -> Result<Formula, PrenexError> {
    if !formula.is_pure_so() {
        return Err(PrenexError::NotPureSo);
    }
    let mut used: BTreeSet<String> = formula.free_fo_vars();
    used.extend(formula.free_so_vars());
    formula.walk(&mut |f| match f {
        Formula::QuantFo { var, .. } | Formula::QuantSo { var, .. } => {
            used.insert(var.clone());
        }
        _ => {}
    });
    let mut fresh = FreshNames { used, counter: 0 };
    let (prefix, matrix) = extract(formula, &mut fresh);
    Ok(rebuild(prefix, matrix))
}

struct FreshNames {
    used: BTreeSet<String>,
    counter: usize,
}

impl FreshNames {
    fn fresh(&mut self, base: &str) -> String {
        loop {
            self.counter += 1;
            let cand = format!("{base}_p{}", self.counter);
            if self.used.insert(cand.clone()) {
                return cand;
            }
        }
    }
}

/// Renames prefix variables clashing with `avoid` (free variables of a
/// sibling) or with `taken` (variables already in the combined prefix).
fn rename_apart(
    prefix: Vec<PrefixEntry>,
    matrix: Formula,
    avoid: &BTreeSet<String>,
    taken: &BTreeSet<String>,
    fresh: &mut FreshNames,
) -> (Vec<PrefixEntry>, Formula) {
    let mut out_prefix = Vec::with_capacity(prefix.len());
    let mut out_matrix = matrix;
    for entry in prefix {
        if avoid.contains(entry.var()) || taken.contains(entry.var()) {
            let new = fresh.fresh(entry.var());
            let renamed = match &entry {
                PrefixEntry::Fo(q, v) => {
                    out_matrix = out_matrix.rename_free_fo(v, &new);
                    PrefixEntry::Fo(*q, new)
                }
                PrefixEntry::So(q, v, a) => {
                    out_matrix = out_matrix.rename_free_so(v, &new);
                    PrefixEntry::So(*q, new, *a)
                }
            };
            out_prefix.push(renamed);
        } else {
            out_prefix.push(entry);
        }
    }
    (out_prefix, out_matrix)
}

fn free_names(f: &Formula) -> BTreeSet<String> {
    let mut s = f.free_fo_vars();
    s.extend(f.free_so_vars());
    s
}

fn combine(
    pa: Vec<PrefixEntry>,
    ma: Formula,
    pb: Vec<PrefixEntry>,
    mb: Formula,
    fresh: &mut FreshNames,
    join: impl FnOnce(Formula, Formula) -> Formula,
) -> (Vec<PrefixEntry>, Formula) {
    let free_b = free_names(&mb);
    let taken: BTreeSet<String> = BTreeSet::new();
    let (pa, ma) = rename_apart(pa, ma, &free_b, &taken, fresh);
    let free_a = free_names(&ma);
    let taken: BTreeSet<String> = pa.iter().map(|e| e.var().to_string()).collect();
    let (pb, mb) = rename_apart(pb, mb, &free_a, &taken, fresh);
    let mut prefix = pa;
    prefix.extend(pb);
    (prefix, join(ma, mb))
}

fn extract(f: &Formula, fresh: &mut FreshNames) -> (Vec<PrefixEntry>, Formula) {
    match f {
        Formula::VocabAtom { .. } | Formula::Eq(..) | Formula::SoAtom { .. } => {
            (Vec::new(), f.clone())
        }
        Formula::Not(g) => {
            let (p, m) = extract(g, fresh);
            (
                p.into_iter().map(PrefixEntry::flip).collect(),
                Formula::not(m),
            )
        }
        Formula::And(a, b) => {
            let (pa, ma) = extract(a, fresh);
            let (pb, mb) = extract(b, fresh);
            combine(pa, ma, pb, mb, fresh, Formula::and)
        }
        Formula::Or(a, b) => {
            let (pa, ma) = extract(a, fresh);
            let (pb, mb) = extract(b, fresh);
            combine(pa, ma, pb, mb, fresh, Formula::or)
        }
        Formula::Implies(a, b) => {
            let (pa, ma) = extract(a, fresh);
            let (pb, mb) = extract(b, fresh);
            let pa = pa.into_iter().map(PrefixEntry::flip).collect();
            combine(pa, ma, pb, mb, fresh, Formula::implies)
        }
        Formula::QuantFo { q, var, body } => {
            let (mut p, m) = extract(body, fresh);
            p.insert(0, PrefixEntry::Fo(*q, var.clone()));
            (p, m)
        }
        Formula::QuantSo { q, var, arity, body } => {
            let (mut p, m) = extract(body, fresh);
            p.insert(0, PrefixEntry::So(*q, var.clone(), *arity));
            (p, m)
        }
        Formula::ToAtom { .. }
        | Formula::Ho4Atom { .. }
        | Formula::QuantToP { .. }
        | Formula::QuantHo4P { .. }
        | Formula::Schema(_) => unreachable!("checked pure SO"),
    }
}

fn rebuild(prefix: Vec<PrefixEntry>, matrix: Formula) -> Formula {
    prefix
        .into_iter()
        .rev()
        .fold(matrix, |acc, entry| match entry {
            PrefixEntry::Fo(q, var) => Formula::QuantFo {
                q,
                var,
                body: Box::new(acc),
            },
            PrefixEntry::So(q, var, arity) => Formula::QuantSo {
                q,
                var,
                arity,
                body: Box::new(acc),
            },
        })
}

/// Alternation profile of a prenex SO formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlternationReport {
    /// Number of maximal same-polarity blocks in the SO prefix; first-order
    /// quantifiers are ignored.
    pub so_blocks: usize,
    /// True when the first SO quantifier is existential (Σ-form); a
    /// universal start is a Π-form. True for FO-only sentences.
    pub sigma: bool,
}

/// Counts the alternating SO quantifier blocks of a prenex formula.
pub fn alternation_count(formula: &Formula) -> Result<AlternationReport, PrenexError> {
    if !formula.is_pure_so() {
        return Err(PrenexError::NotPureSo);
    }
    let mut cursor = formula;
    let mut so_polarities = Vec::new();
    loop {
        match cursor {
            Formula::QuantFo { body, .. } => cursor = body,
            Formula::QuantSo { q, body, .. } => {
                so_polarities.push(*q);
                cursor = body;
            }
            _ => break,
        }
    }
    let mut has_quant = false;
    cursor.walk(&mut |g| {
        if matches!(g, Formula::QuantFo { .. } | Formula::QuantSo { .. }) {
            has_quant = true;
        }
    });
    if has_quant {
        return Err(PrenexError::NotPrenex);
    }
    let mut blocks = 0;
    let mut last: Option<Quantifier> = None;
    for q in &so_polarities {
        if last != Some(*q) {
            blocks += 1;
            last = Some(*q);
        }
    }
    Ok(AlternationReport {
        so_blocks: blocks,
        sigma: so_polarities
            .first()
            .map_or(true, |q| *q == Quantifier::Exists),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_sentence, EvalBudget};
    use crate::textio::{parse_formula, parse_structure};

    fn assert_prenex(f: &Formula) {
        alternation_count(f).expect("prenex");
    }

    #[test]
    fn conjunction_of_disjoint_existentials() {
        let f = parse_formula(
            "(and (exists2 (X 1) (exists1 (x) (atom2 X x))) (exists2 (Y 1) (exists1 (y) (atom2 Y y))))",
        )
        .unwrap();
        let p = prenex_normal_form(&f).unwrap();
        assert_prenex(&p);
        match &p {
            Formula::QuantSo { q, var, .. } => {
                assert_eq!(*q, Quantifier::Exists);
                assert_eq!(var, "X");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negation_dualizes() {
        let f = parse_formula("(not (exists2 (X 1) (exists1 (x) (atom2 X x))))").unwrap();
        let p = prenex_normal_form(&f).unwrap();
        match &p {
            Formula::QuantSo { q, .. } => assert_eq!(*q, Quantifier::Forall),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn already_prenex_unchanged() {
        let f = parse_formula("(exists2 (X 1) (forall1 (x) (atom2 X x)))").unwrap();
        assert_eq!(prenex_normal_form(&f).unwrap(), f);
    }

    #[test]
    fn collision_renames() {
        let f = parse_formula(
            "(and (exists2 (X 1) (exists1 (x) (atom2 X x))) (exists2 (X 1) (forall1 (y) (atom2 X y))))",
        )
        .unwrap();
        let p = prenex_normal_form(&f).unwrap();
        assert_prenex(&p);
        for n in 1..=2 {
            let s = parse_structure(&format!("domain {n}\n")).unwrap();
            assert_eq!(
                eval_sentence(&s, &f, &EvalBudget::default()),
                eval_sentence(&s, &p, &EvalBudget::default())
            );
        }
    }

    #[test]
    fn alternation_counts() {
        let one =
            parse_formula("(exists2 (X 1) (exists2 (Y 1) (exists1 (x) (atom2 X x))))").unwrap();
        assert_eq!(alternation_count(&one).unwrap().so_blocks, 1);
        let three = parse_formula(
            "(exists2 (X 1) (forall2 (Y 1) (exists2 (Z 1) (exists1 (x) (atom2 X x)))))",
        )
        .unwrap();
        let r = alternation_count(&three).unwrap();
        assert_eq!(r.so_blocks, 3);
        assert!(r.sigma);
        let fo_only = parse_formula("(forall1 (x) (eq x x))").unwrap();
        assert_eq!(alternation_count(&fo_only).unwrap().so_blocks, 0);
        let pi = parse_formula("(forall2 (X 1) (exists1 (x) (atom2 X x)))").unwrap();
        assert!(!alternation_count(&pi).unwrap().sigma);
    }

    #[test]
    fn non_prenex_rejected_by_count() {
        let f = parse_formula(
            "(and (exists2 (X 1) (exists1 (x) (atom2 X x))) (forall1 (y) (eq y y)))",
        )
        .unwrap();
        assert_eq!(alternation_count(&f), Err(PrenexError::NotPrenex));
    }

    #[test]
    fn implication_antecedent_flips() {
        let f = parse_formula(
            "(implies (exists2 (X 1) (exists1 (x) (atom2 X x))) (exists1 (y) (eq y y)))",
        )
        .unwrap();
        let p = prenex_normal_form(&f).unwrap();
        match &p {
            Formula::QuantSo { q, .. } => assert_eq!(*q, Quantifier::Forall),
            other => panic!("unexpected {other:?}"),
        }
        for n in 1..=2 {
            let s = parse_structure(&format!("domain {n}\n")).unwrap();
            assert_eq!(
                eval_sentence(&s, &f, &EvalBudget::default()),
                eval_sentence(&s, &p, &EvalBudget::default())
            );
        }
    }

    #[test]
    fn prenex_preserves_truth_on_samples() {
        let cases = [
            "(and (forall1 (x) (exists1 (y) (atom E x y))) (exists1 (z) (atom E z z)))",
            "(or (exists2 (X 1) (forall1 (x) (atom2 X x))) (not (exists1 (x) (atom E x x))))",
            "(implies (forall1 (x) (atom E x x)) (exists2 (X 2) (exists1 (x) (exists1 (y) (atom2 X x y)))))",
            "(not (and (exists1 (x) (atom E x x)) (forall1 (y) (exists1 (z) (atom E y z)))))",
        ];
        let structures = [
            "domain 1\n",
            "domain 1\nrelation E arity 2\n0 0\n",
            "domain 2\nrelation E arity 2\n0 1\n",
            "domain 2\nrelation E arity 2\n0 0\n0 1\n1 0\n1 1\n",
        ];
        for c in &cases {
            let f = parse_formula(c).unwrap();
            let p = prenex_normal_form(&f).unwrap();
            assert_prenex(&p);
            for st in &structures {
                let s = parse_structure(st).unwrap();
                assert_eq!(
                    eval_sentence(&s, &f, &EvalBudget::default()),
                    eval_sentence(&s, &p, &EvalBudget::default()),
                    "{c} over {st}"
                );
            }
        }
    }
}
