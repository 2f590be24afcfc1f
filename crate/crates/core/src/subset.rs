//! Bitset-backed subsets of `0..n`.
//!
//! Trailing zero words are trimmed so that equal sets have equal representations;
//! the ordering compares the ascending element sequences lexicographically.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Subset {
    words: Vec<u64>,
}

impl Subset {
    pub fn new() -> Self {
        Subset { words: Vec::new() }
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut s = Subset::new();
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn singleton(x: usize) -> Self {
        let mut s = Subset::new();
        s.insert(x);
        s
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut s = Subset { words: vec![mask] };
        s.trim();
        s
    }

    /// Low 64 bits; only meaningful for sets inside `0..64`.
    pub fn mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, x: usize) -> bool {
        let (w, b) = (x / 64, x % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, x: usize) -> bool {
        let (w, b) = (x / 64, x % 64);
        if w >= self.words.len() {
            return false;
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        self.trim();
        had
    }

    pub fn contains(&self, x: usize) -> bool {
        let (w, b) = (x / 64, x % 64);
        w < self.words.len() && self.words[w] >> b & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).unwrap_or(&0) | other.words.get(i).unwrap_or(&0))
            .collect();
        Subset { words }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut s = Subset {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let mut s = Subset {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, a)| a & !other.words.get(i).unwrap_or(&0))
                .collect(),
        };
        s.trim();
        s
    }

    /// Complement inside `0..n`.
    pub fn complement(&self, n: usize) -> Subset {
        Subset::full(n).difference(self)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.words.get(i).unwrap_or(&0) == 0)
    }

    pub fn is_superset(&self, other: &Subset) -> bool {
        other.is_subset(self)
    }

    /// All subsets of `0..n` in mask order. `n` must stay below 64.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n < 64, "power set too large");
        (0..1u64 << n).map(Subset::from_mask)
    }

    /// All subsets of `self`, smallest masks first.
    pub fn subsets(&self) -> Vec<Subset> {
        let elems = self.to_vec();
        assert!(elems.len() < 32, "power set too large");
        (0..1u64 << elems.len())
            .map(|m| {
                elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect()
            })
            .collect()
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Subset::new();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl serde::Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> serde::Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<usize> = serde::Deserialize::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimmed_equality() {
        let mut a = Subset::singleton(70);
        a.remove(70);
        assert_eq!(a, Subset::new());
        assert!(a.is_empty());
    }

    #[test]
    fn set_ops() {
        let a: Subset = [1, 3, 65].into_iter().collect();
        let b: Subset = [3, 4].into_iter().collect();
        assert_eq!(a.union(&b).to_vec(), vec![1, 3, 4, 65]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 65]);
        assert_eq!(b.complement(6).to_vec(), vec![0, 1, 2, 5]);
        assert!(Subset::singleton(3).is_subset(&a));
    }

    #[test]
    fn ordering_is_lexicographic() {
        let a: Subset = [0, 5].into_iter().collect();
        let b: Subset = [1].into_iter().collect();
        let e = Subset::new();
        assert!(e < a && a < b);
        assert_eq!(Subset::full(3).subsets().len(), 8);
    }
}
