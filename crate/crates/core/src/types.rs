//! Relation types, variables, and empty-component patterns shared by the
//! whole crate.

use std::fmt;

use thiserror::Error;

/// Order/width/arity descriptor for relation variables of orders 2 through 4.
///
/// * Order 2: a single arity `r >= 1`.
/// * Order 3: a tuple `(r_1, ..., r_s)` of component arities, `s >= 1`.
/// * Order 4: a tuple of order-3 types, all of the same width.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationType {
    So { arity: usize },
    To { arities: Vec<usize> },
    Ho4 { components: Vec<RelationType> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("arity must be >= 1")]
    ZeroArity,
    #[error("width must be >= 1")]
    ZeroWidth,
    #[error("order-4 component widths must all equal {expected}, found {found}")]
    MixedWidth { expected: usize, found: usize },
    #[error("order-4 components must be order-3 types")]
    BadComponentOrder,
    #[error("order-4 component arities must all equal the width {expected}, found {found}")]
    NonUniformArity { expected: usize, found: usize },
}

impl RelationType {
    pub fn so(arity: usize) -> Result<Self, TypeError> {
        if arity == 0 {
            return Err(TypeError::ZeroArity);
        }
        Ok(RelationType::So { arity })
    }

    pub fn to(arities: Vec<usize>) -> Result<Self, TypeError> {
        if arities.is_empty() {
            return Err(TypeError::ZeroWidth);
        }
        if arities.iter().any(|&r| r == 0) {
            return Err(TypeError::ZeroArity);
        }
        Ok(RelationType::To { arities })
    }

    /// Fourth-order types follow the uniform restriction: every component is
    /// an order-3 type of the same width `s`, and (matching the identifier
    /// conventions of the normalized encoding) every component arity is `s`
    /// as well.
    pub fn ho4(components: Vec<RelationType>) -> Result<Self, TypeError> {
        if components.is_empty() {
            return Err(TypeError::ZeroWidth);
        }
        let s = components.len();
        for c in &components {
            match c {
                RelationType::To { arities } => {
                    if arities.len() != s {
                        return Err(TypeError::MixedWidth {
                            expected: s,
                            found: arities.len(),
                        });
                    }
                    for &r in arities {
                        if r != s {
                            return Err(TypeError::NonUniformArity {
                                expected: s,
                                found: r,
                            });
                        }
                    }
                }
                _ => return Err(TypeError::BadComponentOrder),
            }
        }
        Ok(RelationType::Ho4 { components })
    }

    pub fn order(&self) -> u8 {
        match self {
            RelationType::So { .. } => 2,
            RelationType::To { .. } => 3,
            RelationType::Ho4 { .. } => 4,
        }
    }

    /// Tuple width: 1 for SO (a set of plain tuples), `s` for TO/HO4.
    pub fn width(&self) -> usize {
        match self {
            RelationType::So { .. } => 1,
            RelationType::To { arities } => arities.len(),
            RelationType::Ho4 { components } => components.len(),
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationType::So { arity } => write!(f, "{arity}"),
            RelationType::To { arities } => {
                write!(f, "(")?;
                for (i, r) in arities.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, ")")
            }
            RelationType::Ho4 { components } => {
                write!(f, "(")?;
                for c in components {
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Variable orders used by the AST.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarOrder {
    First,
    Second,
    Third,
    Fourth,
}

/// A typed variable. `degree` is present exactly when the variable is bound
/// by a polynomial quantifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: String,
    pub order: VarOrder,
    /// `None` for first-order variables.
    pub rel_type: Option<RelationType>,
    pub degree: Option<usize>,
}

impl Variable {
    pub fn first_order(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            order: VarOrder::First,
            rel_type: None,
            degree: None,
        }
    }

    pub fn second_order(name: impl Into<String>, arity: usize) -> Self {
        Variable {
            name: name.into(),
            order: VarOrder::Second,
            rel_type: Some(RelationType::So { arity }),
            degree: None,
        }
    }

    pub fn third_order(name: impl Into<String>, arities: Vec<usize>, degree: usize) -> Self {
        Variable {
            name: name.into(),
            order: VarOrder::Third,
            rel_type: Some(RelationType::To { arities }),
            degree: Some(degree),
        }
    }

    pub fn fourth_order(name: impl Into<String>, ty: RelationType, degree: usize) -> Self {
        Variable {
            name: name.into(),
            order: VarOrder::Fourth,
            rel_type: Some(ty),
            degree: Some(degree),
        }
    }

    pub fn so_arity(&self) -> Option<usize> {
        match self.rel_type {
            Some(RelationType::So { arity }) => Some(arity),
            _ => None,
        }
    }
}

/// A strictly increasing subset of `{1..s}` marking the empty components of a
/// width-`s` tuple of relations. Indices are 1-based as in the source
/// notation; `complement()` gives the non-empty positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmptyPattern {
    omega: Vec<usize>,
    width: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("width must be >= 1")]
    ZeroWidth,
    #[error("pattern indices must be strictly increasing and within 1..={width}")]
    BadIndices { width: usize },
}

impl EmptyPattern {
    pub fn new(omega: Vec<usize>, width: usize) -> Result<Self, PatternError> {
        if width == 0 {
            return Err(PatternError::ZeroWidth);
        }
        let increasing = omega.windows(2).all(|w| w[0] < w[1]);
        if !increasing || omega.iter().any(|&i| i == 0 || i > width) {
            return Err(PatternError::BadIndices { width });
        }
        Ok(EmptyPattern { omega, width })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// 1-based indices of the empty components.
    pub fn empty_indices(&self) -> &[usize] {
        &self.omega
    }

    /// 1-based indices of the non-empty components, in increasing order.
    pub fn complement(&self) -> Vec<usize> {
        (1..=self.width)
            .filter(|i| !self.omega.contains(i))
            .collect()
    }

    pub fn is_empty_at(&self, index_1based: usize) -> bool {
        self.omega.contains(&index_1based)
    }

    /// A short stable tag usable in generated relation names, e.g. `w13` for
    /// pattern (1,3) and `w` for the all-non-empty pattern.
    pub fn tag(&self) -> String {
        let mut s = String::from("w");
        for i in &self.omega {
            s.push_str(&i.to_string());
        }
        s
    }
}

impl fmt::Display for EmptyPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.omega.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// All `2^s` empty patterns of width `s`, in lexicographic order of their
/// index sets.
pub fn enumerate_patterns(width: usize) -> Result<Vec<EmptyPattern>, PatternError> {
    if width == 0 {
        return Err(PatternError::ZeroWidth);
    }
    let mut out = Vec::with_capacity(1usize << width);
    let mut subsets: Vec<Vec<usize>> = vec![vec![]];
    // Build all subsets, then sort lexicographically as sequences.
    for i in 1..=width {
        let mut next = Vec::with_capacity(subsets.len() * 2);
        for s in &subsets {
            next.push(s.clone());
            let mut t = s.clone();
            t.push(i);
            next.push(t);
        }
        subsets = next;
    }
    subsets.sort();
    for omega in subsets {
        out.push(EmptyPattern::new(omega, width).expect("constructed in range"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_width_one() {
        let ps = enumerate_patterns(1).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].empty_indices(), &[] as &[usize]);
        assert_eq!(ps[1].empty_indices(), &[1]);
    }

    #[test]
    fn patterns_width_two() {
        let ps = enumerate_patterns(2).unwrap();
        let sets: Vec<Vec<usize>> = ps.iter().map(|p| p.empty_indices().to_vec()).collect();
        assert_eq!(sets, vec![vec![], vec![1], vec![1, 2], vec![2]]);
        assert_eq!(ps.len(), 4);
    }

    #[test]
    fn patterns_width_three() {
        assert_eq!(enumerate_patterns(3).unwrap().len(), 8);
    }

    #[test]
    fn patterns_zero_width_rejected() {
        assert!(enumerate_patterns(0).is_err());
    }

    #[test]
    fn pattern_complement_partitions() {
        for s in 1..=4 {
            for p in enumerate_patterns(s).unwrap() {
                let mut all: Vec<usize> = p.empty_indices().to_vec();
                all.extend(p.complement());
                all.sort_unstable();
                assert_eq!(all, (1..=s).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn ho4_type_uniformity_enforced() {
        let t1 = RelationType::to(vec![1]).unwrap();
        assert!(RelationType::ho4(vec![t1.clone()]).is_ok());
        let t2 = RelationType::to(vec![1, 2]).unwrap();
        assert!(RelationType::ho4(vec![t1, t2]).is_err());
        let t22 = RelationType::to(vec![2, 2]).unwrap();
        assert!(RelationType::ho4(vec![t22.clone(), t22]).is_ok());
    }
}
