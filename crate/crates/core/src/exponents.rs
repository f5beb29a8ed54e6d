use std::fmt;

use serde::Serialize;

/// A multiset of nonnegative integer exponents, kept sorted ascending.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ExponentMultiset(Vec<u64>);

impl ExponentMultiset {
    pub fn new(mut values: Vec<u64>) -> Self {
        values.sort_unstable();
        ExponentMultiset(values)
    }

    /// `{0, …, 0}` with `dim` entries, the exponents of `Φ_dim`.
    pub fn zeros(dim: usize) -> Self {
        ExponentMultiset(vec![0; dim])
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn contains(&self, value: u64) -> bool {
        self.0.binary_search(&value).is_ok()
    }

    /// Containment of multisets, counting multiplicity.
    pub fn is_submultiset_of(&self, other: &Self) -> bool {
        let mut j = 0;
        for v in &self.0 {
            while j < other.0.len() && other.0[j] < *v {
                j += 1;
            }
            if j == other.0.len() || other.0[j] != *v {
                return false;
            }
            j += 1;
        }
        true
    }

    /// `self ∖ other` with multiplicity, if `other ⊆ self`.
    pub fn difference(&self, other: &Self) -> Option<Self> {
        if !other.is_submultiset_of(self) {
            return None;
        }
        let mut out = self.0.clone();
        for v in &other.0 {
            let i = out.binary_search(v).expect("contained");
            out.remove(i);
        }
        Some(ExponentMultiset(out))
    }

    pub fn with(&self, value: u64) -> Self {
        let mut out = self.0.clone();
        let at = out.partition_point(|&x| x <= value);
        out.insert(at, value);
        ExponentMultiset(out)
    }

    /// Removes one copy of `value`, if present.
    pub fn without(&self, value: u64) -> Option<Self> {
        let i = self.0.binary_search(&value).ok()?;
        let mut out = self.0.clone();
        out.remove(i);
        Some(ExponentMultiset(out))
    }

    /// Multiset union with multiplicity.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Self::new(out)
    }
}

impl From<Vec<u64>> for ExponentMultiset {
    fn from(values: Vec<u64>) -> Self {
        Self::new(values)
    }
}

impl<const N: usize> From<[u64; N]> for ExponentMultiset {
    fn from(values: [u64; N]) -> Self {
        Self::new(values.to_vec())
    }
}

/// Comma-separated, as in `1, 7, 13`; the empty multiset prints as `-`.
impl fmt::Display for ExponentMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExponentMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_counts_multiplicity() {
        let a = ExponentMultiset::from([1, 4, 4]);
        assert!(ExponentMultiset::from([4, 4]).is_submultiset_of(&a));
        assert!(ExponentMultiset::from([1, 4]).is_submultiset_of(&a));
        assert!(!ExponentMultiset::from([1, 3]).is_submultiset_of(&a));
        assert!(!ExponentMultiset::from([1, 1]).is_submultiset_of(&a));
        assert!(!ExponentMultiset::from([4, 4, 4]).is_submultiset_of(&a));
        assert!(ExponentMultiset::default().is_submultiset_of(&a));
    }

    #[test]
    fn difference_and_insertion() {
        let a = ExponentMultiset::from([0, 1, 1, 1]);
        let b = ExponentMultiset::from([1, 1, 1]);
        assert_eq!(a.difference(&b), Some(ExponentMultiset::from([0])));
        assert_eq!(b.difference(&a), None);
        assert_eq!(b.with(1).values(), &[1, 1, 1, 1]);
        assert_eq!(a.without(1), Some(ExponentMultiset::from([0, 1, 1])));
        assert_eq!(a.without(5), None);
        assert_eq!(a.to_string(), "0, 1, 1, 1");
        assert_eq!(ExponentMultiset::default().to_string(), "-");
    }
}
