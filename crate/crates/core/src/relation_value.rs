//! Rank-stratified higher-order relation values.
//!
//! A rank-2 value is an ordinary relation; a rank-3 value is a set of tuples
//! of rank-2 values; a rank-4 value is a set of tuples of rank-3 values.
//! `BTreeSet` keeps every value in a canonical order, so equal values compare
//! and hash equal and iteration is deterministic.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::structure::Relation;
use crate::types::RelationType;

/// A set of width-`s` tuples of SO relations (third-order value).
pub type Rank3Value = BTreeSet<Vec<Relation>>;

/// A set of width-`s` tuples of rank-3 values (fourth-order value).
pub type Rank4Value = BTreeSet<Vec<Rank3Value>>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HORelation {
    Rank2(Relation),
    Rank3(Rank3Value),
    Rank4(Rank4Value),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValueError {
    #[error("member tuple has width {found}, expected {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("component {index} has arity {found}, expected {expected}")]
    ComponentArity {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("value rank {found} does not match type order {expected}")]
    RankMismatch { expected: u8, found: u8 },
    #[error("cardinality {found} exceeds bound {bound}")]
    CardinalityExceeded { found: usize, bound: usize },
}

impl HORelation {
    pub fn rank(&self) -> u8 {
        match self {
            HORelation::Rank2(_) => 2,
            HORelation::Rank3(_) => 3,
            HORelation::Rank4(_) => 4,
        }
    }

    pub fn as_rank2(&self) -> Option<&Relation> {
        match self {
            HORelation::Rank2(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_rank3(&self) -> Option<&Rank3Value> {
        match self {
            HORelation::Rank3(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_rank4(&self) -> Option<&Rank4Value> {
        match self {
            HORelation::Rank4(r) => Some(r),
            _ => None,
        }
    }

    /// Checks that the value conforms to `ty`, and when `bound` is given,
    /// that the cardinality bound holds (downward at rank 4: every rank-3
    /// member obeys the same bound).
    pub fn check_type(&self, ty: &RelationType, bound: Option<usize>) -> Result<(), ValueError> {
        match (self, ty) {
            (HORelation::Rank2(rel), RelationType::So { arity }) => {
                if rel.arity() != *arity {
                    return Err(ValueError::ComponentArity {
                        index: 0,
                        expected: *arity,
                        found: rel.arity(),
                    });
                }
                Ok(())
            }
            (HORelation::Rank3(v), RelationType::To { arities }) => {
                check_rank3(v, arities, bound)
            }
            (HORelation::Rank4(v), RelationType::Ho4 { components }) => {
                if let Some(b) = bound {
                    if v.len() > b {
                        return Err(ValueError::CardinalityExceeded {
                            found: v.len(),
                            bound: b,
                        });
                    }
                }
                for member in v {
                    if member.len() != components.len() {
                        return Err(ValueError::WidthMismatch {
                            expected: components.len(),
                            found: member.len(),
                        });
                    }
                    for (i, (r3, cty)) in member.iter().zip(components).enumerate() {
                        let RelationType::To { arities } = cty else {
                            return Err(ValueError::RankMismatch {
                                expected: 3,
                                found: 0,
                            });
                        };
                        check_rank3(r3, arities, bound).map_err(|e| match e {
                            ValueError::ComponentArity { expected, found, .. } => {
                                ValueError::ComponentArity {
                                    index: i,
                                    expected,
                                    found,
                                }
                            }
                            other => other,
                        })?;
                    }
                }
                Ok(())
            }
            _ => Err(ValueError::RankMismatch {
                expected: ty.order(),
                found: self.rank(),
            }),
        }
    }
}

fn check_rank3(v: &Rank3Value, arities: &[usize], bound: Option<usize>) -> Result<(), ValueError> {
    if let Some(b) = bound {
        if v.len() > b {
            return Err(ValueError::CardinalityExceeded {
                found: v.len(),
                bound: b,
            });
        }
    }
    for member in v {
        if member.len() != arities.len() {
            return Err(ValueError::WidthMismatch {
                expected: arities.len(),
                found: member.len(),
            });
        }
        for (i, (rel, &r)) in member.iter().zip(arities).enumerate() {
            if rel.arity() != r {
                return Err(ValueError::ComponentArity {
                    index: i,
                    expected: r,
                    found: rel.arity(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Relation;

    #[test]
    fn downward_bound_checked() {
        let ty = RelationType::to(vec![1]).unwrap();
        let mut v: Rank3Value = BTreeSet::new();
        v.insert(vec![Relation::from_tuples(1, vec![vec![0]]).unwrap()]);
        v.insert(vec![Relation::new(1)]);
        let val = HORelation::Rank3(v);
        assert!(val.check_type(&ty, Some(2)).is_ok());
        assert!(matches!(
            val.check_type(&ty, Some(1)),
            Err(ValueError::CardinalityExceeded { .. })
        ));
    }

    #[test]
    fn width_mismatch_detected() {
        let ty = RelationType::to(vec![1, 1]).unwrap();
        let mut v: Rank3Value = BTreeSet::new();
        v.insert(vec![Relation::new(1)]);
        assert!(matches!(
            HORelation::Rank3(v).check_type(&ty, None),
            Err(ValueError::WidthMismatch { .. })
        ));
    }
}
