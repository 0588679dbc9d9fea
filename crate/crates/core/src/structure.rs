//! Finite relational structures over domains `{0..n-1}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A finite relation: a set of tuples of a fixed arity over `{0..n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("tuple {tuple:?} has length {found}, expected arity {expected}")]
    ArityMismatch {
        tuple: Vec<usize>,
        expected: usize,
        found: usize,
    },
    #[error("tuple {tuple:?} has component {value} outside domain of size {domain}")]
    OutOfDomain {
        tuple: Vec<usize>,
        value: usize,
        domain: usize,
    },
    #[error("domain size must be >= 1")]
    EmptyDomain,
    #[error("relation {0} declared twice")]
    DuplicateRelation(String),
}

impl Relation {
    pub fn new(arity: usize) -> Self {
        Relation {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    pub fn from_tuples<I>(arity: usize, tuples: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut rel = Relation::new(arity);
        for t in tuples {
            rel.insert(t)?;
        }
        Ok(rel)
    }

    pub fn insert(&mut self, tuple: Vec<usize>) -> Result<(), StructureError> {
        if tuple.len() != self.arity {
            return Err(StructureError::ArityMismatch {
                expected: self.arity,
                found: tuple.len(),
                tuple,
            });
        }
        self.tuples.insert(tuple);
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tuples.iter()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Every domain element occurring in some tuple.
    pub fn active_elements(&self) -> BTreeSet<usize> {
        self.tuples.iter().flatten().copied().collect()
    }

    pub fn max_element(&self) -> Option<usize> {
        self.tuples.iter().flatten().copied().max()
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in t.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// Domain `{0..n-1}` plus named vocabulary relations.
///
/// Relations of the vocabulary that are not listed are empty; the arity map
/// is carried so empty relations still typecheck.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteStructure {
    domain_size: usize,
    relations: BTreeMap<String, Relation>,
}

impl FiniteStructure {
    pub fn new(domain_size: usize) -> Result<Self, StructureError> {
        if domain_size == 0 {
            return Err(StructureError::EmptyDomain);
        }
        Ok(FiniteStructure {
            domain_size,
            relations: BTreeMap::new(),
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> {
        0..self.domain_size
    }

    pub fn add_relation(&mut self, name: impl Into<String>, rel: Relation) -> Result<(), StructureError> {
        let name = name.into();
        if self.relations.contains_key(&name) {
            return Err(StructureError::DuplicateRelation(name));
        }
        for t in rel.tuples() {
            if let Some(&v) = t.iter().find(|&&v| v >= self.domain_size) {
                return Err(StructureError::OutOfDomain {
                    tuple: t.clone(),
                    value: v,
                    domain: self.domain_size,
                });
            }
        }
        self.relations.insert(name, rel);
        Ok(())
    }

    /// Replaces or inserts; used when extending a structure with fresh
    /// relations for evaluation purposes.
    pub fn set_relation(&mut self, name: impl Into<String>, rel: Relation) {
        self.relations.insert(name.into(), rel);
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&String, &Relation)> {
        self.relations.iter()
    }

    /// The declared vocabulary: name -> arity.
    pub fn signature(&self) -> BTreeMap<String, usize> {
        self.relations
            .iter()
            .map(|(k, v)| (k.clone(), v.arity()))
            .collect()
    }

    pub fn holds(&self, name: &str, tuple: &[usize]) -> bool {
        self.relations.get(name).is_some_and(|r| r.contains(tuple))
    }
}

/// A named vocabulary: relation symbol -> arity.
pub type Signature = BTreeMap<String, usize>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_domain_rejected() {
        let mut s = FiniteStructure::new(2).unwrap();
        let r = Relation::from_tuples(2, vec![vec![0, 2]]).unwrap();
        assert!(matches!(
            s.add_relation("E", r),
            Err(StructureError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn arity_mismatch_rejected() {
        assert!(Relation::from_tuples(2, vec![vec![0]]).is_err());
    }

    #[test]
    fn duplicate_relation_rejected() {
        let mut s = FiniteStructure::new(1).unwrap();
        s.add_relation("P", Relation::new(1)).unwrap();
        assert!(matches!(
            s.add_relation("P", Relation::new(1)),
            Err(StructureError::DuplicateRelation(_))
        ));
    }
}
