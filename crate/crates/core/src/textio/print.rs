//! Canonical printers. `parse(print(x))` is structurally `x`, and printing is
//! byte-deterministic for equal inputs.

use std::fmt::Write;

use crate::formula::{Formula, Quantifier};
use crate::structure::FiniteStructure;
use crate::types::RelationType;

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

fn quant_name(q: Quantifier, suffix: &str) -> String {
    match q {
        Quantifier::Exists => format!("exists{suffix}"),
        Quantifier::Forall => format!("forall{suffix}"),
    }
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::VocabAtom { symbol, args } => {
            write!(out, "(atom {symbol}").unwrap();
            for a in args {
                write!(out, " {a}").unwrap();
            }
            out.push(')');
        }
        Formula::Eq(a, b) => {
            write!(out, "(eq {a} {b})").unwrap();
        }
        Formula::SoAtom { var, args } => {
            write!(out, "(atom2 {var}").unwrap();
            for a in args {
                write!(out, " {a}").unwrap();
            }
            out.push(')');
        }
        Formula::ToAtom { var, args } => {
            write!(out, "(atom3 {var}").unwrap();
            for a in args {
                write!(out, " {a}").unwrap();
            }
            out.push(')');
        }
        Formula::Ho4Atom { var, args } => {
            write!(out, "(atom4 {var}").unwrap();
            for a in args {
                write!(out, " {a}").unwrap();
            }
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(out, g);
            out.push(')');
        }
        Formula::And(a, b) => {
            out.push_str("(and ");
            write_formula(out, a);
            out.push(' ');
            write_formula(out, b);
            out.push(')');
        }
        Formula::Or(a, b) => {
            out.push_str("(or ");
            write_formula(out, a);
            out.push(' ');
            write_formula(out, b);
            out.push(')');
        }
        Formula::Implies(a, b) => {
            out.push_str("(implies ");
            write_formula(out, a);
            out.push(' ');
            write_formula(out, b);
            out.push(')');
        }
        Formula::QuantFo { q, var, body } => {
            write!(out, "({} ({var}) ", quant_name(*q, "1")).unwrap();
            write_formula(out, body);
            out.push(')');
        }
        Formula::QuantSo { q, var, arity, body } => {
            write!(out, "({} ({var} {arity}) ", quant_name(*q, "2")).unwrap();
            write_formula(out, body);
            out.push(')');
        }
        Formula::QuantToP {
            q,
            var,
            arities,
            degree,
            body,
        } => {
            write!(out, "({} ({var} (", quant_name(*q, "3p")).unwrap();
            for (i, r) in arities.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{r}").unwrap();
            }
            write!(out, ") {degree}) ").unwrap();
            write_formula(out, body);
            out.push(')');
        }
        Formula::QuantHo4P {
            q,
            var,
            ty,
            degree,
            body,
        } => {
            write!(out, "({} ({var} (", quant_name(*q, "4p")).unwrap();
            if let RelationType::Ho4 { components } = ty {
                for c in components {
                    if let RelationType::To { arities } = c {
                        out.push('(');
                        for (i, r) in arities.iter().enumerate() {
                            if i > 0 {
                                out.push(' ');
                            }
                            write!(out, "{r}").unwrap();
                        }
                        out.push(')');
                    }
                }
            }
            write!(out, ") {degree}) ").unwrap();
            write_formula(out, body);
            out.push(')');
        }
        Formula::Schema(inst) => {
            out.push_str("(schema (sig (");
            for (i, a) in inst.signature.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{a}").unwrap();
            }
            write!(out, ")) (d {}) (t {}) (first ", inst.degree, inst.size_degree).unwrap();
            write_formula(out, &inst.alpha_first);
            out.push_str(") (last ");
            write_formula(out, &inst.alpha_last);
            out.push_str(") (step ");
            write_formula(out, &inst.step);
            out.push_str("))");
        }
    }
}

pub fn print_structure(s: &FiniteStructure) -> String {
    let mut out = String::new();
    writeln!(out, "domain {}", s.domain_size()).unwrap();
    for (name, rel) in s.relations() {
        writeln!(out, "relation {name} arity {}", rel.arity()).unwrap();
        for t in rel.tuples() {
            let line: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_formula, parse_structure};

    #[test]
    fn formula_round_trip() {
        let text = "(exists3p (C (1 2) 1) (exists2 (X 1) (exists2 (Y 2) (atom3 C X Y))))";
        let f = parse_formula(text).unwrap();
        let printed = print_formula(&f);
        assert_eq!(parse_formula(&printed).unwrap(), f);
        assert_eq!(printed, text);
    }

    #[test]
    fn structure_round_trip() {
        let text = "domain 2\nrelation E arity 2\n0 1\n1 0\n";
        let s = parse_structure(text).unwrap();
        let printed = print_structure(&s);
        assert_eq!(parse_structure(&printed).unwrap(), s);
        assert_eq!(printed, text);
    }
}
