//! Deterministic enumeration of quantifier candidate spaces.
//!
//! SO relations are enumerated in subset-lexicographic order over the lex
//! order of tuples; bounded higher-order relations by subset size, then
//! lexicographically by member index.

use thiserror::Error;

use crate::relation_value::{Rank3Value, Rank4Value};
use crate::structure::Relation;

pub const DEFAULT_POSITION_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("candidate space for arity {arity} over domain {n} exceeds cap ({cap} tuple positions)")]
    PositionCapExceeded { n: usize, arity: usize, cap: usize },
    #[error("candidate count overflows")]
    CountOverflow,
}

/// `n^arity` as u128, or None on overflow.
pub fn tuple_count(n: usize, arity: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..arity {
        acc = acc.checked_mul(n as u128)?;
    }
    Some(acc)
}

/// `2^(n^arity)` when representable.
pub fn so_relation_count(n: usize, arity: usize) -> Option<u128> {
    let positions = tuple_count(n, arity)?;
    if positions >= 127 {
        return None;
    }
    Some(1u128 << positions)
}

/// The `index`-th tuple of the given arity over `{0..n-1}` in lex order
/// (first component most significant).
pub fn unrank_tuple(n: usize, arity: usize, mut index: usize) -> Vec<usize> {
    let mut t = vec![0; arity];
    for slot in (0..arity).rev() {
        t[slot] = index % n;
        index /= n;
    }
    t
}

/// Position of a tuple in the lex order; inverse of [`unrank_tuple`].
pub fn rank_tuple(n: usize, tuple: &[usize]) -> usize {
    let mut idx = 0;
    for &v in tuple {
        idx = idx * n + v;
    }
    idx
}

/// All `2^(n^arity)` relations, subset-lexicographic.
pub fn enum_so_relations(n: usize, arity: usize) -> Result<SoRelIter, EnumError> {
    enum_so_relations_with_cap(n, arity, DEFAULT_POSITION_CAP)
}

pub fn enum_so_relations_with_cap(
    n: usize,
    arity: usize,
    cap: usize,
) -> Result<SoRelIter, EnumError> {
    let positions = tuple_count(n, arity).ok_or(EnumError::CountOverflow)?;
    if positions > cap as u128 || positions > 63 {
        return Err(EnumError::PositionCapExceeded { n, arity, cap });
    }
    Ok(SoRelIter {
        n,
        arity,
        positions: positions as usize,
        next: 0,
        total: 1u128 << positions,
    })
}

pub struct SoRelIter {
    n: usize,
    arity: usize,
    positions: usize,
    next: u128,
    total: u128,
}

impl SoRelIter {
    pub fn total(&self) -> u128 {
        self.total
    }

    fn build(&self, mask: u128) -> Relation {
        let mut rel = Relation::new(self.arity);
        for p in 0..self.positions {
            if mask & (1 << p) != 0 {
                rel.insert(unrank_tuple(self.n, self.arity, p))
                    .expect("unranked tuple has declared arity");
            }
        }
        rel
    }
}

impl Iterator for SoRelIter {
    type Item = Relation;

    fn next(&mut self) -> Option<Relation> {
        if self.next >= self.total {
            return None;
        }
        let rel = self.build(self.next);
        self.next += 1;
        Some(rel)
    }
}

/// Binomial coefficient with overflow checks.
fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// `Σ_{k=0..=bound} C(universe, k)`.
pub fn count_bounded_subsets(universe: u128, bound: u128) -> Option<u128> {
    let bound = bound.min(universe);
    let mut acc: u128 = 0;
    for k in 0..=bound {
        acc = acc.checked_add(binomial(universe, k)?)?;
    }
    Some(acc)
}

/// Number of rank-3 candidates of type `arities` bounded by `n^d`.
pub fn count_bounded_rank3(n: usize, arities: &[usize], d: usize) -> Option<u128> {
    let mut universe: u128 = 1;
    for &r in arities {
        universe = universe.checked_mul(so_relation_count(n, r)?)?;
    }
    count_bounded_subsets(universe, tuple_count(n, d)?)
}

/// Number of rank-4 candidates with downward-bounded components.
pub fn count_bounded_rank4(n: usize, component_arities: &[Vec<usize>], d: usize) -> Option<u128> {
    let mut universe: u128 = 1;
    for arities in component_arities {
        universe = universe.checked_mul(count_bounded_rank3(n, arities, d)?)?;
    }
    count_bounded_subsets(universe, tuple_count(n, d)?)
}

/// Iterator over subsets of `0..universe` of size at most `bound`, by size
/// then lexicographically; yields index vectors in increasing order.
pub struct BoundedSubsetIter {
    universe: usize,
    bound: usize,
    current: Option<Vec<usize>>,
    done: bool,
}

impl BoundedSubsetIter {
    pub fn new(universe: usize, bound: usize) -> Self {
        BoundedSubsetIter {
            universe,
            bound: bound.min(universe),
            current: None,
            done: false,
        }
    }
}

impl Iterator for BoundedSubsetIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        match &mut self.current {
            None => {
                self.current = Some(Vec::new());
                Some(Vec::new())
            }
            Some(cur) => {
                // Advance the combination of size k, or move to size k+1.
                let k = cur.len();
                let mut i = k;
                loop {
                    if i == 0 {
                        // start size k+1
                        if k + 1 > self.bound || k + 1 > self.universe {
                            self.done = true;
                            return None;
                        }
                        let fresh: Vec<usize> = (0..k + 1).collect();
                        *cur = fresh.clone();
                        return Some(fresh);
                    }
                    i -= 1;
                    let max_at_i = self.universe - (k - i);
                    if cur[i] < max_at_i {
                        cur[i] += 1;
                        for j in i + 1..k {
                            cur[j] = cur[j - 1] + 1;
                        }
                        return Some(cur.clone());
                    }
                }
            }
        }
    }
}

/// Materialized per-component SO relation lists for a rank-3 type.
pub struct Rank3Universe {
    components: Vec<Vec<Relation>>,
    pub size: usize,
}

impl Rank3Universe {
    pub fn build(n: usize, arities: &[usize], cap: usize) -> Result<Self, EnumError> {
        let mut components = Vec::with_capacity(arities.len());
        let mut size: u128 = 1;
        for &r in arities {
            let list: Vec<Relation> = enum_so_relations_with_cap(n, r, cap)?.collect();
            size = size
                .checked_mul(list.len() as u128)
                .ok_or(EnumError::CountOverflow)?;
            components.push(list);
        }
        if size > usize::MAX as u128 {
            return Err(EnumError::CountOverflow);
        }
        Ok(Rank3Universe {
            components,
            size: size as usize,
        })
    }

    /// The `index`-th member tuple (lex over component indices, first
    /// component most significant).
    pub fn member(&self, mut index: usize) -> Vec<Relation> {
        let mut out = vec![Relation::new(0); self.components.len()];
        for slot in (0..self.components.len()).rev() {
            let len = self.components[slot].len();
            out[slot] = self.components[slot][index % len].clone();
            index /= len;
        }
        out
    }
}

/// All rank-3 values of the type bounded by `n^d`, deterministic.
pub fn enum_bounded_rank3(
    n: usize,
    arities: &[usize],
    d: usize,
    cap: usize,
) -> Result<impl Iterator<Item = Rank3Value>, EnumError> {
    let universe = Rank3Universe::build(n, arities, cap)?;
    let bound = tuple_count(n, d).ok_or(EnumError::CountOverflow)?;
    let bound = bound.min(universe.size as u128) as usize;
    Ok(BoundedSubsetIter::new(universe.size, bound).map(move |subset| {
        subset
            .into_iter()
            .map(|i| universe.member(i))
            .collect::<Rank3Value>()
    }))
}

/// All rank-4 values of the type, downward bounded by `n^d` when `downward`
/// is set (members' rank-3 components each bounded by `n^d`); the top-level
/// cardinality bound always applies.
pub fn enum_bounded_rank4(
    n: usize,
    component_arities: &[Vec<usize>],
    d: usize,
    downward: bool,
    cap: usize,
) -> Result<impl Iterator<Item = Rank4Value>, EnumError> {
    let mut components: Vec<Vec<Rank3Value>> = Vec::with_capacity(component_arities.len());
    let mut size: u128 = 1;
    for arities in component_arities {
        let list: Vec<Rank3Value> = if downward {
            enum_bounded_rank3(n, arities, d, cap)?.collect()
        } else {
            // Unbounded rank-3 members: all subsets of the member universe.
            let u = Rank3Universe::build(n, arities, cap)?;
            if u.size > 20 {
                return Err(EnumError::PositionCapExceeded {
                    n,
                    arity: arities.iter().sum(),
                    cap,
                });
            }
            BoundedSubsetIter::new(u.size, u.size)
                .map(|subset| subset.into_iter().map(|i| u.member(i)).collect())
                .collect()
        };
        size = size
            .checked_mul(list.len() as u128)
            .ok_or(EnumError::CountOverflow)?;
        components.push(list);
    }
    if size > usize::MAX as u128 {
        return Err(EnumError::CountOverflow);
    }
    let size = size as usize;
    let bound = tuple_count(n, d).ok_or(EnumError::CountOverflow)?;
    let bound = bound.min(size as u128) as usize;
    Ok(BoundedSubsetIter::new(size, bound).map(move |subset| {
        subset
            .into_iter()
            .map(|mut index| {
                let mut member = Vec::with_capacity(components.len());
                for slot in (0..components.len()).rev() {
                    let len = components[slot].len();
                    member.push((slot, index % len));
                    index /= len;
                }
                member.sort_by_key(|&(slot, _)| slot);
                member
                    .into_iter()
                    .map(|(slot, i)| components[slot][i].clone())
                    .collect::<Vec<Rank3Value>>()
            })
            .collect::<Rank4Value>()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so_relations_n2_arity1() {
        let rels: Vec<Relation> = enum_so_relations(2, 1).unwrap().collect();
        assert_eq!(rels.len(), 4);
        assert!(rels[0].is_empty());
        assert!(rels[1].contains(&[0]));
        assert_eq!(rels[1].len(), 1);
        assert!(rels[2].contains(&[1]));
        assert_eq!(rels[3].len(), 2);
    }

    #[test]
    fn so_relations_counts() {
        assert_eq!(enum_so_relations(1, 2).unwrap().count(), 2);
        assert_eq!(enum_so_relations(2, 2).unwrap().count(), 16);
    }

    #[test]
    fn position_cap_enforced() {
        // 3^3 = 27 positions > 16
        assert!(enum_so_relations(3, 3).is_err());
    }

    #[test]
    fn bounded_subset_counts_match_binomials() {
        // Independent oracle: direct binomial sums.
        let count = BoundedSubsetIter::new(4, 2).count() as u128;
        assert_eq!(count, count_bounded_subsets(4, 2).unwrap());
        assert_eq!(count, 1 + 4 + 6);
    }

    #[test]
    fn rank3_candidate_counts() {
        // Type (1), n=2, d=1: universe 4, subsets of size <= 2.
        let got = enum_bounded_rank3(2, &[1], 1, 16).unwrap().count() as u128;
        assert_eq!(got, 11);
        assert_eq!(count_bounded_rank3(2, &[1], 1).unwrap(), 11);
        // Type (1,2), n=2, d=1: universe 64, C(64,0)+C(64,1)+C(64,2).
        assert_eq!(count_bounded_rank3(2, &[1, 2], 1).unwrap(), 2081);
        let got = enum_bounded_rank3(2, &[1, 2], 1, 16).unwrap().count() as u128;
        assert_eq!(got, 2081);
    }

    #[test]
    fn bound_saturation() {
        // d large enough that n^d >= universe: all subsets.
        let got = enum_bounded_rank3(2, &[1], 10, 16).unwrap().count() as u128;
        assert_eq!(got, 16); // 2^4 subsets of the 4-element universe
    }

    #[test]
    fn rank4_micro_count() {
        // s=1, component type (1), n=2, d=1: rank-3 candidates 11;
        // subsets of size <= 2: 1 + 11 + 55 = 67.
        let got = enum_bounded_rank4(2, &[vec![1]], 1, true, 16).unwrap().count();
        assert_eq!(got, 67);
        assert_eq!(count_bounded_rank4(2, &[vec![1]], 1).unwrap(), 67);
    }

    #[test]
    fn tuple_ranking_roundtrip() {
        for n in 1..4 {
            for arity in 1..4 {
                let total = tuple_count(n, arity).unwrap() as usize;
                for i in 0..total {
                    let t = unrank_tuple(n, arity, i);
                    assert_eq!(rank_tuple(n, &t), i);
                }
            }
        }
    }
}
