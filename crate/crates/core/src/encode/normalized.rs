//! Normalized multi-table encoding of a bounded rank-4 relation.
//!
//! Tables, all keyed by `d`-tuple identifiers over the domain:
//!
//! * `X4.{ω3}` — one per pattern of empty TO components: member-tuple id
//!   followed by the ids of its non-empty TO relations; arity `d + d·|ω̄3|`.
//! * `REL3` — (TO-relation id, SO-tuple id) pairs; arity `2d`.
//! * `T2R.{ω2}` — one per pattern of empty SO components: SO-tuple id
//!   followed by the ids of its non-empty SO relations; arity `d + d·|ω̄2|`.
//! * `REL2` — (SO-relation id, element tuple); arity `d + s`.
//!
//! Identifiers are shared by value: equal TO relations, equal SO tuples, and
//! equal SO relations are stored once. Decoding validates referential
//! integrity and fails on any violation.

use std::collections::{BTreeMap, BTreeSet};

use crate::eval::enumerate::{tuple_count, unrank_tuple};
use crate::relation_value::{Rank3Value, Rank4Value};
use crate::structure::{FiniteStructure, Relation};
use crate::types::{enumerate_patterns, EmptyPattern};

use super::{DecodeError, EncodeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedEncoding {
    pub x4: BTreeMap<EmptyPattern, Relation>,
    pub rel3: Relation,
    pub tuples2: BTreeMap<EmptyPattern, Relation>,
    pub rel2: Relation,
    pub width: usize,
    pub degree: usize,
    pub domain_size: usize,
}

impl NormalizedEncoding {
    pub fn empty(width: usize, degree: usize, domain_size: usize) -> Self {
        let patterns = enumerate_patterns(width).expect("width >= 1");
        let mut x4 = BTreeMap::new();
        let mut tuples2 = BTreeMap::new();
        for p in &patterns {
            let k = p.complement().len();
            x4.insert(p.clone(), Relation::new(degree + degree * k));
            tuples2.insert(p.clone(), Relation::new(degree + degree * k));
        }
        NormalizedEncoding {
            x4,
            rel3: Relation::new(2 * degree),
            tuples2,
            rel2: Relation::new(degree + width),
            width,
            degree,
            domain_size,
        }
    }

    /// Renders the tables as named relations of a structure.
    pub fn to_structure(&self) -> FiniteStructure {
        let mut s = FiniteStructure::new(self.domain_size).expect("nonempty domain");
        for (pat, rel) in &self.x4 {
            s.set_relation(format!("X4.{}", pat.tag()), rel.clone());
        }
        s.set_relation("REL3", self.rel3.clone());
        for (pat, rel) in &self.tuples2 {
            s.set_relation(format!("T2R.{}", pat.tag()), rel.clone());
        }
        s.set_relation("REL2", self.rel2.clone());
        s
    }
}

/// Encodes a rank-4 value of uniform width `s` (component TO types
/// `(s,..,s)`) downward bounded by `n^d`.
pub fn encode_normalized(
    value: &Rank4Value,
    width: usize,
    degree: usize,
    domain_size: usize,
) -> Result<NormalizedEncoding, EncodeError> {
    let s = width;
    let bound = tuple_count(domain_size, degree)
        .filter(|&b| b <= usize::MAX as u128)
        .ok_or(EncodeError::BoundOverflow)? as usize;
    if value.len() > bound {
        return Err(EncodeError::CardinalityExceeded {
            found: value.len(),
            bound,
        });
    }
    // Validate shapes and collect distinct values level by level.
    let mut to_values: BTreeSet<&Rank3Value> = BTreeSet::new();
    for member in value {
        if member.len() != s {
            return Err(EncodeError::WidthMismatch {
                expected: s,
                found: member.len(),
            });
        }
        for (i, t) in member.iter().enumerate() {
            if t.len() > bound {
                return Err(EncodeError::CardinalityExceeded {
                    found: t.len(),
                    bound,
                });
            }
            for tuple in t {
                if tuple.len() != s {
                    return Err(EncodeError::WidthMismatch {
                        expected: s,
                        found: tuple.len(),
                    });
                }
                for rel in tuple {
                    if rel.arity() != s {
                        return Err(EncodeError::ComponentArity {
                            index: i + 1,
                            expected: s,
                            found: rel.arity(),
                        });
                    }
                }
            }
            if !t.is_empty() {
                to_values.insert(t);
            }
        }
    }
    let mut so_tuples: BTreeSet<&Vec<Relation>> = BTreeSet::new();
    for t in &to_values {
        for tuple in t.iter() {
            so_tuples.insert(tuple);
        }
    }
    let mut so_values: BTreeSet<&Relation> = BTreeSet::new();
    for tuple in &so_tuples {
        for rel in tuple.iter() {
            if !rel.is_empty() {
                so_values.insert(rel);
            }
        }
    }
    let gate = |count: usize, what: &'static str| {
        if count > bound {
            Err(EncodeError::IdentifierSpace {
                what,
                count,
                available: bound,
            })
        } else {
            Ok(())
        }
    };
    gate(to_values.len(), "TO relations")?;
    gate(so_tuples.len(), "SO tuples")?;
    gate(so_values.len(), "SO relations")?;

    let id = |index: usize| unrank_tuple(domain_size, degree, index);
    let to_ids: BTreeMap<&Rank3Value, Vec<usize>> = to_values
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, id(i)))
        .collect();
    let tuple_ids: BTreeMap<&Vec<Relation>, Vec<usize>> = so_tuples
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, id(i)))
        .collect();
    let so_ids: BTreeMap<&Relation, Vec<usize>> = so_values
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, id(i)))
        .collect();

    let mut enc = NormalizedEncoding::empty(s, degree, domain_size);
    for (index, member) in value.iter().enumerate() {
        let empty: Vec<usize> = (1..=s).filter(|&j| member[j - 1].is_empty()).collect();
        let pattern = EmptyPattern::new(empty, s).expect("in range");
        let mut row = id(index);
        for j in pattern.complement() {
            row.extend(to_ids[&member[j - 1]].iter().copied());
        }
        enc.x4
            .get_mut(&pattern)
            .expect("all patterns present")
            .insert(row)
            .expect("arity matches");
    }
    for (t, tid) in &to_ids {
        for tuple in t.iter() {
            let mut row = tid.clone();
            row.extend(tuple_ids[tuple].iter().copied());
            enc.rel3.insert(row).expect("arity 2d");
        }
    }
    for (tuple, uid) in &tuple_ids {
        let empty: Vec<usize> = (1..=s).filter(|&j| tuple[j - 1].is_empty()).collect();
        let pattern = EmptyPattern::new(empty, s).expect("in range");
        let mut row = uid.clone();
        for j in pattern.complement() {
            row.extend(so_ids[&tuple[j - 1]].iter().copied());
        }
        enc.tuples2
            .get_mut(&pattern)
            .expect("all patterns present")
            .insert(row)
            .expect("arity matches");
    }
    for (rel, vid) in &so_ids {
        for t in rel.tuples() {
            let mut row = vid.clone();
            row.extend(t.iter().copied());
            enc.rel2.insert(row).expect("arity d+s");
        }
    }
    Ok(enc)
}

pub fn decode_normalized(enc: &NormalizedEncoding) -> Result<Rank4Value, DecodeError> {
    let s = enc.width;
    let d = enc.degree;
    // Arity sanity for every table.
    for (pat, rel) in &enc.x4 {
        let expected = d + d * pat.complement().len();
        if rel.arity() != expected {
            return Err(DecodeError::TableArity {
                table: format!("X4.{}", pat.tag()),
                expected,
                found: rel.arity(),
            });
        }
    }
    if enc.rel3.arity() != 2 * d {
        return Err(DecodeError::TableArity {
            table: "REL3".into(),
            expected: 2 * d,
            found: enc.rel3.arity(),
        });
    }
    for (pat, rel) in &enc.tuples2 {
        let expected = d + d * pat.complement().len();
        if rel.arity() != expected {
            return Err(DecodeError::TableArity {
                table: format!("T2R.{}", pat.tag()),
                expected,
                found: rel.arity(),
            });
        }
    }
    if enc.rel2.arity() != d + s {
        return Err(DecodeError::TableArity {
            table: "REL2".into(),
            expected: d + s,
            found: enc.rel2.arity(),
        });
    }

    // SO relations from REL2.
    let mut so_map: BTreeMap<Vec<usize>, Relation> = BTreeMap::new();
    for row in enc.rel2.tuples() {
        let id = row[..d].to_vec();
        so_map
            .entry(id)
            .or_insert_with(|| Relation::new(s))
            .insert(row[d..].to_vec())
            .expect("element tuple has width s");
    }

    // SO tuples from the TUPLES tables: per id, the pattern and component ids.
    let mut tuple_map: BTreeMap<Vec<usize>, Vec<Relation>> = BTreeMap::new();
    let mut tuple_pattern: BTreeMap<Vec<usize>, EmptyPattern> = BTreeMap::new();
    let mut referenced_so: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (pat, rel) in &enc.tuples2 {
        let nonempty = pat.complement();
        for row in rel.tuples() {
            let id = row[..d].to_vec();
            if let Some(other) = tuple_pattern.get(&id) {
                if other != pat {
                    return Err(DecodeError::IdentifierInTwoPatterns { id });
                }
                // Same pattern, second row with the same key.
                return Err(DecodeError::DuplicateKey {
                    table: format!("T2R.{}", pat.tag()),
                    id,
                });
            }
            tuple_pattern.insert(id.clone(), pat.clone());
            let mut components: Vec<Relation> = vec![Relation::new(s); s];
            for (k, &j) in nonempty.iter().enumerate() {
                let so_id = row[d + k * d..d + (k + 1) * d].to_vec();
                let Some(so) = so_map.get(&so_id) else {
                    return Err(DecodeError::DanglingReference(format!(
                        "T2R.{} row references SO relation {so_id:?} absent from REL2",
                        pat.tag()
                    )));
                };
                referenced_so.insert(so_id);
                components[j - 1] = so.clone();
            }
            tuple_map.insert(id, components);
        }
    }
    // Every SO relation in REL2 must be referenced.
    for id in so_map.keys() {
        if !referenced_so.contains(id) {
            return Err(DecodeError::Unreferenced(format!(
                "REL2 relation {id:?} not referenced by any tuple row"
            )));
        }
    }

    // TO relations from REL3.
    let mut to_map: BTreeMap<Vec<usize>, Rank3Value> = BTreeMap::new();
    let mut referenced_tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
    for row in enc.rel3.tuples() {
        let to_id = row[..d].to_vec();
        let tuple_id = row[d..].to_vec();
        let Some(tuple) = tuple_map.get(&tuple_id) else {
            return Err(DecodeError::DanglingReference(format!(
                "REL3 row references SO tuple {tuple_id:?} absent from every tuples table"
            )));
        };
        referenced_tuples.insert(tuple_id);
        to_map.entry(to_id).or_default().insert(tuple.clone());
    }
    // Every tuple row must belong to some TO relation.
    for id in tuple_map.keys() {
        if !referenced_tuples.contains(id) {
            return Err(DecodeError::Unreferenced(format!(
                "tuple {id:?} not referenced from REL3"
            )));
        }
    }

    // Members from the pattern tables.
    let mut member_pattern: BTreeMap<Vec<usize>, EmptyPattern> = BTreeMap::new();
    let mut referenced_to: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out: Rank4Value = BTreeSet::new();
    for (pat, rel) in &enc.x4 {
        let nonempty = pat.complement();
        for row in rel.tuples() {
            let id = row[..d].to_vec();
            if let Some(other) = member_pattern.get(&id) {
                if other != pat {
                    return Err(DecodeError::IdentifierInTwoPatterns { id });
                }
                return Err(DecodeError::DuplicateKey {
                    table: format!("X4.{}", pat.tag()),
                    id,
                });
            }
            member_pattern.insert(id.clone(), pat.clone());
            let mut member: Vec<Rank3Value> = vec![BTreeSet::new(); s];
            for (k, &j) in nonempty.iter().enumerate() {
                let to_id = row[d + k * d..d + (k + 1) * d].to_vec();
                let Some(to) = to_map.get(&to_id) else {
                    return Err(DecodeError::DanglingReference(format!(
                        "X4.{} row references TO relation {to_id:?} absent from REL3",
                        pat.tag()
                    )));
                };
                referenced_to.insert(to_id);
                member[j - 1] = to.clone();
            }
            out.insert(member);
        }
    }
    // Every TO relation in REL3 must be referenced by some member row.
    for id in to_map.keys() {
        if !referenced_to.contains(id) {
            return Err(DecodeError::Unreferenced(format!(
                "REL3 relation {id:?} not referenced by any member row"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(arity: usize, tuples: Vec<Vec<usize>>) -> Relation {
        Relation::from_tuples(arity, tuples).unwrap()
    }

    #[test]
    fn empty_value_all_tables_empty() {
        let q: Rank4Value = BTreeSet::new();
        let enc = encode_normalized(&q, 1, 1, 2).unwrap();
        assert!(enc.x4.values().all(|r| r.is_empty()));
        assert!(enc.rel3.is_empty());
        assert!(enc.tuples2.values().all(|r| r.is_empty()));
        assert!(enc.rel2.is_empty());
        assert_eq!(decode_normalized(&enc).unwrap(), q);
    }

    #[test]
    fn width_one_singleton_chain() {
        // Q = {( {({0},)} ,)}: one member whose TO relation holds one
        // 1-tuple of the SO relation {(0)}. One row in each table.
        let mut to: Rank3Value = BTreeSet::new();
        to.insert(vec![rel(1, vec![vec![0]])]);
        let mut q: Rank4Value = BTreeSet::new();
        q.insert(vec![to]);
        let enc = encode_normalized(&q, 1, 1, 2).unwrap();
        let ne = EmptyPattern::new(vec![], 1).unwrap();
        assert_eq!(enc.x4[&ne].len(), 1);
        assert_eq!(enc.rel3.len(), 1);
        assert_eq!(enc.tuples2[&ne].len(), 1);
        assert_eq!(enc.rel2.len(), 1);
        assert_eq!(decode_normalized(&enc).unwrap(), q);
    }

    #[test]
    fn dangling_rel3_reference_rejected() {
        let mut enc = NormalizedEncoding::empty(1, 1, 2);
        let ne = EmptyPattern::new(vec![], 1).unwrap();
        // A member row referencing TO id (0), REL3 mapping it to a tuple id
        // that no tuples table defines.
        enc.x4.insert(ne, rel(2, vec![vec![0, 0]]));
        enc.rel3 = rel(2, vec![vec![0, 1]]);
        assert!(matches!(
            decode_normalized(&enc),
            Err(DecodeError::DanglingReference(_))
        ));
    }

    #[test]
    fn unreferenced_to_relation_rejected() {
        let mut enc = NormalizedEncoding::empty(1, 1, 2);
        let ne = EmptyPattern::new(vec![], 1).unwrap();
        // REL3 defines TO relation (0) but no member row references it.
        enc.rel3 = rel(2, vec![vec![0, 0]]);
        enc.tuples2.insert(ne, rel(2, vec![vec![0, 1]]));
        enc.rel2 = rel(2, vec![vec![1, 0]]);
        assert!(matches!(
            decode_normalized(&enc),
            Err(DecodeError::Unreferenced(_))
        ));
    }

    #[test]
    fn member_with_empty_to_component() {
        // Width 2, one member: (∅, T) with T = {(S, S)} where S = {(0,0)}.
        let s_rel = rel(2, vec![vec![0, 0]]);
        let mut to: Rank3Value = BTreeSet::new();
        to.insert(vec![s_rel.clone(), s_rel]);
        let mut q: Rank4Value = BTreeSet::new();
        q.insert(vec![BTreeSet::new(), to]);
        let enc = encode_normalized(&q, 2, 1, 2).unwrap();
        let pat = EmptyPattern::new(vec![1], 2).unwrap();
        assert_eq!(enc.x4[&pat].len(), 1);
        assert_eq!(decode_normalized(&enc).unwrap(), q);
    }

    #[test]
    fn downward_bound_enforced() {
        // A TO relation with 3 member tuples exceeds n^d = 2 at n=2, d=1.
        let mut to: Rank3Value = BTreeSet::new();
        to.insert(vec![rel(1, vec![vec![0]])]);
        to.insert(vec![rel(1, vec![vec![1]])]);
        to.insert(vec![rel(1, vec![vec![0], vec![1]])]);
        let mut q: Rank4Value = BTreeSet::new();
        q.insert(vec![to]);
        assert!(matches!(
            encode_normalized(&q, 1, 1, 2),
            Err(EncodeError::CardinalityExceeded { .. })
        ));
    }

    #[test]
    fn shared_identifiers_by_value() {
        // Two members sharing one TO relation: REL3 rows stored once.
        let mut to: Rank3Value = BTreeSet::new();
        to.insert(vec![rel(1, vec![vec![0]])]);
        let mut other: Rank3Value = BTreeSet::new();
        other.insert(vec![rel(1, vec![vec![1]])]);
        let mut q: Rank4Value = BTreeSet::new();
        q.insert(vec![to.clone()]);
        q.insert(vec![other]);
        let enc = encode_normalized(&q, 1, 1, 3).unwrap();
        // 2 distinct TO relations, each with one member tuple.
        assert_eq!(enc.rel3.len(), 2);
        assert_eq!(decode_normalized(&enc).unwrap(), q);
    }
}
