//! Integer partitions, shared by factorization patterns and permutation cycle types.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A multiset of positive parts, stored in descending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u32>", from = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

/// Irreducible-factor degrees of a squarefree polynomial.
pub type FactorizationPattern = Partition;

/// Cycle lengths of a permutation.
pub type CycleType = Partition;

impl From<Vec<u32>> for Partition {
    fn from(parts: Vec<u32>) -> Self {
        Partition::from_parts(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl Partition {
    /// Zero parts are dropped.
    pub fn from_parts(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// From `(part, multiplicity)` pairs.
    pub fn from_counts<I: IntoIterator<Item = (u32, u32)>>(counts: I) -> Self {
        let parts = counts
            .into_iter()
            .flat_map(|(d, c)| std::iter::repeat(d).take(c as usize))
            .collect();
        Self::from_parts(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// The integer being partitioned.
    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `part -> multiplicity`.
    pub fn counts(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &d in &self.parts {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    pub fn fixed_points(&self) -> u32 {
        self.parts.iter().filter(|&&d| d == 1).count() as u32
    }

    /// All parts equal.
    pub fn is_uniform(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] == w[1])
    }

    pub fn identity(n: u32) -> Self {
        Partition { parts: vec![1; n as usize] }
    }
}

/// Descending parts joined by `+`, e.g. `2+1+1`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|d| d.to_string()).collect();
        f.write_str(&s.join("+"))
    }
}

impl FromStr for Partition {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s.split('+').map(|x| x.trim().parse::<u32>()).collect::<Result<Vec<_>, _>>()?;
        Ok(Partition::from_parts(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_text() {
        let p = Partition::from_parts(vec![1, 3, 1, 0]);
        assert_eq!(p.parts(), &[3, 1, 1]);
        assert_eq!(p.to_string(), "3+1+1");
        assert_eq!("1+1+3".parse::<Partition>().unwrap(), p);
        assert_eq!(Partition::from_counts([(1, 2), (3, 1)]), p);
        assert_eq!(p.fixed_points(), 2);
        assert!(!p.is_uniform());
        assert!(Partition::from_parts(vec![2, 2]).is_uniform());
    }
}
