use std::collections::{HashMap, HashSet};

pub type ConstId = u32;
pub type PredId = u32;

/// Argument tuple; unary facts leave the second slot at 0.
pub type Tuple = [ConstId; 2];

/// One predicate's facts in insertion order, with a membership set and a
/// per-position index of tuple offsets.
#[derive(Debug, Clone)]
pub struct Relation {
    pub(crate) arity: usize,
    tuples: Vec<Tuple>,
    set: HashSet<Tuple>,
    index: [HashMap<ConstId, Vec<u32>>; 2],
    /// Tuples before this offset are older than the current delta.
    pub(crate) old_end: usize,
    /// Tuples in `old_end..delta_end` are the current delta.
    pub(crate) delta_end: usize,
}

impl Relation {
    pub(crate) fn new(arity: usize) -> Self {
        Relation {
            arity,
            tuples: Vec::new(),
            set: HashSet::new(),
            index: [HashMap::new(), HashMap::new()],
            old_end: 0,
            delta_end: 0,
        }
    }

    pub(crate) fn insert(&mut self, t: Tuple) -> bool {
        if !self.set.insert(t) {
            return false;
        }
        let offset = self.tuples.len() as u32;
        self.tuples.push(t);
        for (index, &c) in self.index.iter_mut().zip(&t[..self.arity]) {
            index.entry(c).or_default().push(offset);
        }
        true
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.set.contains(t)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub(crate) fn tuple(&self, offset: u32) -> Tuple {
        self.tuples[offset as usize]
    }

    /// Offsets of tuples with `c` at `pos`, ascending.
    pub(crate) fn lookup(&self, pos: usize, c: ConstId) -> &[u32] {
        self.index[pos].get(&c).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Marks everything inserted since the previous call as the new delta.
    pub(crate) fn advance(&mut self) {
        self.old_end = self.delta_end;
        self.delta_end = self.tuples.len();
    }
}

/// Set-semantics fact storage, one [`Relation`] per predicate.
#[derive(Debug, Clone, Default)]
pub struct FactStore {
    pub(crate) relations: Vec<Relation>,
}

impl FactStore {
    pub fn relation(&self, p: PredId) -> &Relation {
        &self.relations[p as usize]
    }

    pub fn len(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, p: PredId, t: &Tuple) -> bool {
        self.relations[p as usize].contains(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_is_a_set_with_positional_index() {
        let mut r = Relation::new(2);
        assert!(r.insert([1, 2]));
        assert!(r.insert([1, 3]));
        assert!(!r.insert([1, 2]));
        assert_eq!(r.len(), 2);
        assert_eq!(r.lookup(0, 1), &[0, 1]);
        assert_eq!(r.lookup(1, 3), &[1]);
        assert!(r.lookup(1, 9).is_empty());
    }

    #[test]
    fn advance_moves_delta_window() {
        let mut r = Relation::new(1);
        r.insert([1, 0]);
        r.advance();
        assert_eq!((r.old_end, r.delta_end), (0, 1));
        r.insert([2, 0]);
        r.insert([3, 0]);
        r.advance();
        assert_eq!((r.old_end, r.delta_end), (1, 3));
        r.advance();
        assert_eq!((r.old_end, r.delta_end), (3, 3));
    }
}
