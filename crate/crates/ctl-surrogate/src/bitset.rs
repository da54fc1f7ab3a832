//! Fixed-capacity bitset over state ids, the working representation for
//! fixpoint computations.

/// Set of state ids in `0..capacity`, one bit per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    words: Vec<u64>,
    capacity: usize,
}

impl StateSet {
    pub fn empty(capacity: usize) -> Self {
        StateSet {
            words: vec![0; capacity.div_ceil(64)],
            capacity,
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = StateSet {
            words: vec![!0u64; capacity.div_ceil(64)],
            capacity,
        };
        s.mask_tail();
        s
    }

    fn mask_tail(&mut self) {
        let rem = self.capacity % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, id: usize) {
        debug_assert!(id < self.capacity);
        self.words[id / 64] |= 1 << (id % 64);
    }

    pub fn remove(&mut self, id: usize) {
        debug_assert!(id < self.capacity);
        self.words[id / 64] &= !(1 << (id % 64));
    }

    pub fn contains(&self, id: usize) -> bool {
        debug_assert!(id < self.capacity);
        self.words[id / 64] & (1 << (id % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn complement(&self) -> StateSet {
        let mut out = StateSet {
            words: self.words.iter().map(|w| !w).collect(),
            capacity: self.capacity,
        };
        out.mask_tail();
        out
    }

    pub fn is_subset_of(&self, other: &StateSet) -> bool {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.capacity).filter(move |&i| self.contains(i))
    }
}

impl FromIterator<usize> for StateSet {
    /// Collects ids into a set sized to hold the largest one. Intended for
    /// tests; production code sizes sets from the structure.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let ids: Vec<usize> = iter.into_iter().collect();
        let cap = ids.iter().max().map_or(0, |m| m + 1);
        let mut s = StateSet::empty(cap);
        for id in ids {
            s.insert(id);
        }
        s
    }
}
