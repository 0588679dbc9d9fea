//! Flat encoding of a bounded rank-3 relation: one SO relation per empty
//! pattern, holding identifier-prefixed cross-product rows.
//!
//! A member tuple `(S_1..S_s)` with empty components at positions `ω` is
//! stored in the pattern relation for `ω` as the set of rows
//! `id ⌢ t_{j_1} ⌢ .. ⌢ t_{j_k}` over all combinations of tuples `t_j ∈ S_j`
//! for the non-empty positions; `id` is a `d`-tuple over the domain.
//! Identifiers are assigned in lexicographic order over the canonical order
//! of member tuples, so encoding is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use crate::eval::enumerate::{tuple_count, unrank_tuple};
use crate::relation_value::Rank3Value;
use crate::structure::{FiniteStructure, Relation};
use crate::types::{enumerate_patterns, EmptyPattern};

use super::{DecodeError, EncodeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatEncoding {
    /// One relation per empty pattern of width `s`.
    pub per_pattern: BTreeMap<EmptyPattern, Relation>,
    pub degree: usize,
    pub arities: Vec<usize>,
    pub domain_size: usize,
}

impl FlatEncoding {
    pub fn width(&self) -> usize {
        self.arities.len()
    }

    /// Arity of the pattern relation: `d + Σ_{j ∈ ω̄} r_j`.
    pub fn pattern_arity(&self, pattern: &EmptyPattern) -> usize {
        self.degree
            + pattern
                .complement()
                .iter()
                .map(|&j| self.arities[j - 1])
                .sum::<usize>()
    }

    /// Renders the encoding as a structure with one named relation per
    /// pattern (`X.w`, `X.w1`, ...), for interchange and golden tests.
    pub fn to_structure(&self) -> FiniteStructure {
        let mut s = FiniteStructure::new(self.domain_size).expect("nonempty domain");
        for (pat, rel) in &self.per_pattern {
            s.set_relation(format!("X.{}", pat.tag()), rel.clone());
        }
        s
    }
}

pub fn encode_flat(
    value: &Rank3Value,
    arities: &[usize],
    degree: usize,
    domain_size: usize,
) -> Result<FlatEncoding, EncodeError> {
    let s = arities.len();
    let bound = tuple_count(domain_size, degree)
        .filter(|&b| b <= usize::MAX as u128)
        .ok_or(EncodeError::BoundOverflow)? as usize;
    if value.len() > bound {
        return Err(EncodeError::CardinalityExceeded {
            found: value.len(),
            bound,
        });
    }
    let mut enc = FlatEncoding {
        per_pattern: BTreeMap::new(),
        degree,
        arities: arities.to_vec(),
        domain_size,
    };
    let patterns = enumerate_patterns(s).expect("width >= 1");
    for p in &patterns {
        let arity = degree
            + p.complement()
                .iter()
                .map(|&j| arities[j - 1])
                .sum::<usize>();
        enc.per_pattern.insert(p.clone(), Relation::new(arity));
    }
    for (index, member) in value.iter().enumerate() {
        if member.len() != s {
            return Err(EncodeError::WidthMismatch {
                expected: s,
                found: member.len(),
            });
        }
        for (i, (rel, &want)) in member.iter().zip(arities).enumerate() {
            if rel.arity() != want {
                return Err(EncodeError::ComponentArity {
                    index: i + 1,
                    expected: want,
                    found: rel.arity(),
                });
            }
        }
        let id = unrank_tuple(domain_size, degree, index);
        let empty: Vec<usize> = (1..=s).filter(|&j| member[j - 1].is_empty()).collect();
        let pattern = EmptyPattern::new(empty, s).expect("indices in range");
        let nonempty = pattern.complement();
        let rel = enc.per_pattern.get_mut(&pattern).expect("all patterns present");
        for row_tail in cross_product(&nonempty, member) {
            let mut row = id.clone();
            row.extend(row_tail);
            rel.insert(row).expect("row arity matches pattern arity");
        }
    }
    Ok(enc)
}

/// All concatenations of one tuple from each non-empty component, in
/// deterministic order.
fn cross_product(nonempty: &[usize], member: &[Relation]) -> Vec<Vec<usize>> {
    let mut rows: Vec<Vec<usize>> = vec![Vec::new()];
    for &j in nonempty {
        let mut next = Vec::new();
        for prefix in &rows {
            for t in member[j - 1].tuples() {
                let mut row = prefix.clone();
                row.extend(t.iter().copied());
                next.push(row);
            }
        }
        rows = next;
    }
    rows
}

pub fn decode_flat(enc: &FlatEncoding) -> Result<Rank3Value, DecodeError> {
    let s = enc.arities.len();
    let d = enc.degree;
    // identifier -> pattern seen
    let mut seen: BTreeMap<Vec<usize>, EmptyPattern> = BTreeMap::new();
    let mut out: Rank3Value = BTreeSet::new();
    for (pattern, rel) in &enc.per_pattern {
        let expected = enc.pattern_arity(pattern);
        if rel.arity() != expected {
            return Err(DecodeError::TableArity {
                table: format!("X.{}", pattern.tag()),
                expected,
                found: rel.arity(),
            });
        }
        let mut by_id: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
        for row in rel.tuples() {
            let id = row[..d].to_vec();
            by_id.entry(id).or_default().push(row[d..].to_vec());
        }
        let nonempty = pattern.complement();
        for (id, rows) in by_id {
            if let Some(other) = seen.get(&id) {
                if other != pattern {
                    return Err(DecodeError::IdentifierInTwoPatterns { id });
                }
            }
            seen.insert(id.clone(), pattern.clone());
            // Split each row into per-component projections.
            let mut components: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); s];
            for row in &rows {
                let mut offset = 0;
                for &j in &nonempty {
                    let r = enc.arities[j - 1];
                    components[j - 1].insert(row[offset..offset + r].to_vec());
                    offset += r;
                }
            }
            // The rows under one identifier must be exactly the cross
            // product of the projections.
            let product_size: usize = nonempty
                .iter()
                .map(|&j| components[j - 1].len())
                .product();
            if rows.len() != product_size {
                return Err(DecodeError::NonProductRows { id });
            }
            let member: Vec<Relation> = (1..=s)
                .map(|j| {
                    let mut rel = Relation::new(enc.arities[j - 1]);
                    for t in &components[j - 1] {
                        rel.insert(t.clone()).expect("projection arity");
                    }
                    rel
                })
                .collect();
            out.insert(member);
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
    fn empty_relation_encodes_to_all_empty_tables() {
        let value: Rank3Value = BTreeSet::new();
        let enc = encode_flat(&value, &[1, 2], 1, 2).unwrap();
        assert_eq!(enc.per_pattern.len(), 4);
        assert!(enc.per_pattern.values().all(|r| r.is_empty()));
        assert_eq!(decode_flat(&enc).unwrap(), value);
    }

    #[test]
    fn singleton_nonempty_member() {
        // R = {({0}, {(0,1)})}, type (1,2), d=1, n=2:
        // row (0, 0, 0, 1) in the all-non-empty pattern, arity 4.
        let mut value: Rank3Value = BTreeSet::new();
        value.insert(vec![rel(1, vec![vec![0]]), rel(2, vec![vec![0, 1]])]);
        let enc = encode_flat(&value, &[1, 2], 1, 2).unwrap();
        let all_nonempty = EmptyPattern::new(vec![], 2).unwrap();
        let table = &enc.per_pattern[&all_nonempty];
        assert_eq!(table.arity(), 4);
        assert!(table.contains(&[0, 0, 0, 1]));
        assert_eq!(table.len(), 1);
        assert_eq!(decode_flat(&enc).unwrap(), value);
    }

    #[test]
    fn member_with_empty_first_component() {
        // R = {({}, {(0,0)})}: row lands in pattern ω=(1), arity d+2 = 3.
        let mut value: Rank3Value = BTreeSet::new();
        value.insert(vec![rel(1, vec![]), rel(2, vec![vec![0, 0]])]);
        let enc = encode_flat(&value, &[1, 2], 1, 2).unwrap();
        let pat = EmptyPattern::new(vec![1], 2).unwrap();
        let table = &enc.per_pattern[&pat];
        assert_eq!(table.arity(), 3);
        assert!(table.contains(&[0, 0, 0]));
        assert_eq!(decode_flat(&enc).unwrap(), value);
    }

    #[test]
    fn cross_product_rows() {
        // Component sets of sizes 2 and 2 produce 4 rows for one id.
        let mut value: Rank3Value = BTreeSet::new();
        value.insert(vec![
            rel(1, vec![vec![0], vec![1]]),
            rel(1, vec![vec![0], vec![1]]),
        ]);
        let enc = encode_flat(&value, &[1, 1], 1, 2).unwrap();
        let all_nonempty = EmptyPattern::new(vec![], 2).unwrap();
        assert_eq!(enc.per_pattern[&all_nonempty].len(), 4);
        assert_eq!(decode_flat(&enc).unwrap(), value);
    }

    #[test]
    fn cardinality_bound_enforced() {
        let mut value: Rank3Value = BTreeSet::new();
        value.insert(vec![rel(1, vec![vec![0]])]);
        value.insert(vec![rel(1, vec![vec![1]])]);
        value.insert(vec![rel(1, vec![vec![0], vec![1]])]);
        // n=2, d=1: bound 2, but 3 members.
        assert!(matches!(
            encode_flat(&value, &[1], 1, 2),
            Err(EncodeError::CardinalityExceeded { .. })
        ));
    }

    #[test]
    fn identifier_in_two_patterns_rejected() {
        let mut enc = encode_flat(&BTreeSet::new(), &[1], 1, 2).unwrap();
        // Hand-build: id (0) in both the non-empty and the empty pattern.
        let ne = EmptyPattern::new(vec![], 1).unwrap();
        let emp = EmptyPattern::new(vec![1], 1).unwrap();
        enc.per_pattern
            .insert(ne, rel(2, vec![vec![0, 0]]));
        enc.per_pattern.insert(emp, rel(1, vec![vec![0]]));
        assert!(matches!(
            decode_flat(&enc),
            Err(DecodeError::IdentifierInTwoPatterns { .. })
        ));
    }

    #[test]
    fn non_product_rows_rejected() {
        // Two rows under one id whose projections would need four rows:
        // (0 | 0, 0) and (0 | 1, 1) — projections {0,1}×{0,1} but only 2 rows.
        let mut enc = encode_flat(&BTreeSet::new(), &[1, 1], 1, 2).unwrap();
        let ne = EmptyPattern::new(vec![], 2).unwrap();
        enc.per_pattern
            .insert(ne, rel(3, vec![vec![0, 0, 0], vec![0, 1, 1]]));
        assert!(matches!(
            decode_flat(&enc),
            Err(DecodeError::NonProductRows { .. })
        ));
    }

    #[test]
    fn deterministic_reencoding() {
        let mut value: Rank3Value = BTreeSet::new();
        value.insert(vec![rel(1, vec![vec![0]]), rel(2, vec![vec![1, 0]])]);
        value.insert(vec![rel(1, vec![]), rel(2, vec![vec![0, 0], vec![1, 1]])]);
        let a = encode_flat(&value, &[1, 2], 1, 3).unwrap();
        let b = encode_flat(&value.clone(), &[1, 2], 1, 3).unwrap();
        assert_eq!(a, b);
    }
}
