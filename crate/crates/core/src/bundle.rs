use std::fmt;

use serde::{Deserialize, Serialize};

/// A sorted, duplicate-free set of item indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(Vec<usize>);

impl Bundle {
    pub fn new() -> Self {
        Bundle(Vec::new())
    }

    pub fn from_items(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Bundle(v)
    }

    /// All items `0..m`.
    pub fn full(m: usize) -> Self {
        Bundle((0..m).collect())
    }

    pub fn singleton(j: usize) -> Self {
        Bundle(vec![j])
    }

    pub fn pair(a: usize, b: usize) -> Self {
        Bundle::from_items([a, b])
    }

    pub fn from_mask(mask: u64) -> Self {
        Bundle((0..64).filter(|j| mask >> j & 1 == 1).collect())
    }

    /// Bitmask form; panics if an item index is 64 or more.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &j| {
            assert!(j < 64, "item {j} does not fit a 64-bit mask");
            acc | 1 << j
        })
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn insert(&mut self, j: usize) {
        if let Err(pos) = self.0.binary_search(&j) {
            self.0.insert(pos, j);
        }
    }

    pub fn remove(&mut self, j: usize) -> bool {
        match self.0.binary_search(&j) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn without(&self, j: usize) -> Bundle {
        Bundle(self.0.iter().copied().filter(|&x| x != j).collect())
    }

    pub fn with(&self, j: usize) -> Bundle {
        let mut b = self.clone();
        b.insert(j);
        b
    }

    pub fn is_subset(&self, other: &Bundle) -> bool {
        let mut it = other.0.iter();
        'outer: for &x in &self.0 {
            for &y in it.by_ref() {
                if y == x {
                    continue 'outer;
                }
                if y > x {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        Bundle::from_items(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.iter().copied().filter(|&j| other.contains(j)).collect())
    }

    pub fn difference(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.iter().copied().filter(|&j| !other.contains(j)).collect())
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.0.iter().all(|&j| !other.contains(j))
    }

    /// 1-based item labels, as used in files and CLI output.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|j| j + 1).collect()
    }

    pub fn from_one_based(items: &[usize]) -> Option<Bundle> {
        if items.contains(&0) {
            return None;
        }
        Some(Bundle::from_items(items.iter().map(|j| j - 1)))
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Bundle::from_items(iter)
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        write!(f, "}}")
    }
}
