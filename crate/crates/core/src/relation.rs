//! Dense bit-level sets and binary relations over `0..n`.
//!
//! Relations over unrolled frames stay small (at most a few hundred
//! states), so explicit bit matrices with word-parallel operations are the
//! cheapest and most auditable representation.

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Fixed-width bit vector over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bits {
    n: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(n: usize) -> Bits {
        Bits { n, words: vec![0; words_for(n)] }
    }

    pub fn ones(n: usize) -> Bits {
        let mut b = Bits { n, words: vec![u64::MAX; words_for(n)] };
        b.trim();
        b
    }

    fn trim(&mut self) {
        let extra = self.words.len() * WORD - self.n;
        if extra > 0 {
            let last = self.words.len() - 1;
            self.words[last] &= u64::MAX >> extra;
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.n);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn and(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a | b)
    }

    pub fn not(&self) -> Bits {
        let mut out = Bits {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.trim();
        out
    }

    fn zip(&self, other: &Bits, f: impl Fn(u64, u64) -> u64) -> Bits {
        debug_assert_eq!(self.n, other.n);
        Bits {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn or_in(&mut self, other: &Bits) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(&a, &b)| a & b != 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn all(&self) -> bool {
        self.count() == self.n
    }

    pub fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| self.get(i))
    }
}

/// Binary relation over `0..n` as a dense bit matrix, one row per source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    rows: Vec<Bits>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        Relation { n, rows: vec![Bits::zeros(n); n] }
    }

    pub fn identity(n: usize) -> Relation {
        let mut r = Relation::empty(n);
        for i in 0..n {
            r.rows[i].set(i, true);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].get(b)
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].set(b, true);
    }

    pub fn row(&self, a: usize) -> &Bits {
        &self.rows[a]
    }

    pub fn or_into_row(&mut self, a: usize, bits: &Bits) {
        self.rows[a].or_in(bits);
    }

    /// Number of related pairs.
    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(Bits::count).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.rows[a].iter_ones().map(move |b| (a, b)))
    }

    /// Transitive closure (at least one step), Warshall with word-parallel rows.
    pub fn transitive_closure(&self) -> Relation {
        let mut out = self.clone();
        for k in 0..self.n {
            let pivot = out.rows[k].clone();
            for i in 0..self.n {
                if out.rows[i].get(k) {
                    out.rows[i].or_in(&pivot);
                }
            }
        }
        out
    }

    /// Strict part: pairs `(a, b)` related forward but not backward.
    pub fn strict_part(&self) -> Relation {
        let mut out = Relation::empty(self.n);
        for a in 0..self.n {
            for b in self.rows[a].iter_ones() {
                if !self.contains(b, a) {
                    out.insert(a, b);
                }
            }
        }
        out
    }

    /// Boolean matrix product `self ; other`.
    pub fn compose(&self, other: &Relation) -> Relation {
        debug_assert_eq!(self.n, other.n);
        let mut out = Relation::empty(self.n);
        for a in 0..self.n {
            for mid in self.rows[a].iter_ones() {
                out.rows[a].or_in(&other.rows[mid]);
            }
        }
        out
    }

    /// `k`-fold composition; the zeroth power is the identity relation.
    pub fn power(&self, k: usize) -> Relation {
        let mut out = Relation::identity(self.n);
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.n).all(|a| {
            self.rows[a]
                .iter_ones()
                .all(|b| self.rows[b].iter_ones().all(|c| self.contains(a, c)))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_a_line() {
        let mut q = Relation::empty(3);
        q.insert(0, 1);
        q.insert(1, 2);
        let r = q.transitive_closure();
        assert!(r.contains(0, 2));
        assert!(!r.contains(2, 0));
        assert_eq!(r.pair_count(), 3);
        assert!(r.is_transitive());
    }

    #[test]
    fn strict_part_drops_mutual_pairs() {
        let mut r = Relation::empty(2);
        r.insert(0, 1);
        r.insert(1, 0);
        r.insert(0, 0);
        assert_eq!(r.strict_part().pair_count(), 0);
    }

    #[test]
    fn power_zero_is_identity() {
        let mut r = Relation::empty(3);
        r.insert(0, 1);
        assert_eq!(r.power(0), Relation::identity(3));
        assert_eq!(r.power(1), r);
    }

    #[test]
    fn bits_trim_keeps_tail_clean() {
        let b = Bits::ones(65);
        assert_eq!(b.count(), 65);
        assert_eq!(b.not().count(), 0);
    }
}
