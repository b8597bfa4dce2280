//! Dense linear algebra over Z2 on packed bit vectors.

use std::fmt;

/// A fixed-length vector over Z2, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// An incrementally built row-echelon basis. Each stored row carries a tag
/// vector recording which inserted vectors it was combined from, so that
/// reductions can report coordinates.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    dim: usize,
    tag_len: usize,
    rows: Vec<(usize, BitVec, BitVec)>,
}

impl EchelonBasis {
    pub fn new(dim: usize, tag_len: usize) -> Self {
        EchelonBasis {
            dim,
            tag_len,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` against the basis; returns the remainder and the tag sum of
    /// the rows used.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut rem = v.clone();
        let mut tag = BitVec::zeros(self.tag_len);
        for (pivot, row, row_tag) in &self.rows {
            if rem.get(*pivot) {
                rem.xor_assign(row);
                tag.xor_assign(row_tag);
            }
        }
        (rem, tag)
    }

    /// Inserts `v` with the given tag. Returns false if `v` was dependent.
    pub fn insert(&mut self, v: &BitVec, tag: BitVec) -> bool {
        let (mut rem, used) = self.reduce(v);
        let Some(pivot) = rem.first_one() else {
            return false;
        };
        let mut tag = tag;
        tag.xor_assign(&used);
        // keep rows fully reduced on pivot columns
        for (_, row, row_tag) in self.rows.iter_mut() {
            if row.get(pivot) {
                row.xor_assign(&rem);
                row_tag.xor_assign(&tag);
            }
        }
        rem.set(pivot, true);
        self.rows.push((pivot, rem, tag));
        true
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }
}

/// Row-major matrix over Z2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix { cols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.rows[r].set(c, b)
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.rows[r].flip(c)
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(r, true);
            }
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.nrows());
        let mut out = BitMatrix::zeros(self.nrows(), other.ncols());
        for (r, row) in self.rows.iter().enumerate() {
            for k in row.ones() {
                out.rows[r].xor_assign(&other.rows[k]);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new(self.cols, 0);
        for row in &self.rows {
            basis.insert(row, BitVec::zeros(0));
        }
        basis.rank()
    }

    /// A basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<BitVec> {
        // Reduced row echelon form, then read off free columns.
        let mut rows: Vec<BitVec> = self.rows.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut x = BitVec::unit(self.cols, free);
            for (i, &p) in pivots.iter().enumerate() {
                if rows[i].get(free) {
                    x.set(p, true);
                }
            }
            out.push(x);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_ops() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(129, true);
        assert_eq!(v.count_ones(), 2);
        assert_eq!(v.first_one(), Some(0));
        v.flip(0);
        assert_eq!(v.first_one(), Some(129));
        assert!(v.dot(&BitVec::unit(130, 129)));
    }

    #[test]
    fn kernel_of_cycle_boundary() {
        // boundary of a triangle graph: 3 vertices, 3 edges
        let mut m = BitMatrix::zeros(3, 3);
        for (e, (a, b)) in [(0, 1), (1, 2), (2, 0)].iter().enumerate() {
            m.set(*a, e, true);
            m.set(*b, e, true);
        }
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].count_ones(), 3);
        assert!(m.mul_vec(&k[0]).is_zero());
    }

    #[test]
    fn echelon_tags_track_combinations() {
        let mut b = EchelonBasis::new(4, 2);
        assert!(b.insert(&BitVec::from_bits(&[true, true, false, false]), BitVec::unit(2, 0)));
        assert!(b.insert(&BitVec::from_bits(&[false, true, true, false]), BitVec::unit(2, 1)));
        let (rem, tag) = b.reduce(&BitVec::from_bits(&[true, false, true, false]));
        assert!(rem.is_zero());
        assert_eq!(tag, BitVec::from_bits(&[true, true]));
        assert!(!b.insert(&BitVec::from_bits(&[true, false, true, false]), BitVec::zeros(2)));
    }

    #[test]
    fn kernel_dimension_matches_rank() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (r, c) = (rng.gen_range(1..8), rng.gen_range(1..10));
            let mut m = BitMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, rng.gen_bool(0.4));
                }
            }
            let k = m.kernel();
            assert_eq!(k.len() + m.rank(), c);
            for x in &k {
                assert!(m.mul_vec(x).is_zero());
            }
        }
    }
}
