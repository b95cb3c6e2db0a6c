//! Bit-packed linear algebra over the two-element field.
//!
//! Rows are stored as runs of `u64` words, bit `i` of a row living in word
//! `i / 64` at position `i % 64`. Bits past `cols` are always zero.

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A dense vector over F_2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector with ones exactly at `indices` (duplicates cancel).
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// In-place sum `self += other`.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + b)
                }
            })
        })
    }
}

/// A dense `rows × cols` matrix over F_2, one packed bit row per matrix row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    /// Builds a matrix from equal-length rows of 0/1 entries.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for (c, &x) in row.iter().enumerate() {
                if x & 1 == 1 {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }

    pub fn from_vectors(cols: usize, vectors: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(0, cols);
        for v in vectors {
            m.push_row(v)?;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn push_row(&mut self, v: &BitVector) -> Result<()> {
        if v.len != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len,
            });
        }
        self.data.extend_from_slice(&v.words);
        self.rows += 1;
        Ok(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.stride);
        head[lo * self.stride..(lo + 1) * self.stride].swap_with_slice(&mut tail[..self.stride]);
    }

    /// `row[dst] += row[src]`, touching only words from `from_word` on.
    fn add_row(&mut self, dst: usize, src: usize, from_word: usize) {
        let s = self.stride;
        if dst == src {
            return;
        }
        let (d, sr) = if dst < src {
            let (head, tail) = self.data.split_at_mut(src * s);
            (&mut head[dst * s..(dst + 1) * s], &tail[..s])
        } else {
            let (head, tail) = self.data.split_at_mut(dst * s);
            (&mut tail[..s], &head[src * s..(src + 1) * s])
        };
        for (a, b) in d[from_word..].iter_mut().zip(&sr[from_word..]) {
            *a ^= b;
        }
    }

    pub fn rank(&self) -> usize {
        row_reduce(self).1.len()
    }
}

/// Reduced row-echelon form over F_2 together with the pivot columns.
///
/// The returned matrix keeps the input's shape; rows past the rank are zero.
pub fn row_reduce(m: &BitMatrix) -> (BitMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(p) = (rank..a.rows).find(|&r| a.get(r, c)) else {
            continue;
        };
        a.swap_rows(rank, p);
        let w = c / WORD;
        for r in 0..a.rows {
            if r != rank && a.get(r, c) {
                a.add_row(r, rank, w);
            }
        }
        pivots.push(c);
        rank += 1;
    }
    (a, pivots)
}

/// True iff `v` is an F_2-combination of the rows of `m`.
pub fn in_rowspace(v: &BitVector, m: &BitMatrix) -> Result<bool> {
    if v.len != m.cols {
        return Err(Error::LengthMismatch {
            expected: m.cols,
            found: v.len,
        });
    }
    let (rref, pivots) = row_reduce(m);
    Ok(reduce_by_rref(v, &rref, &pivots).is_zero())
}

/// Reduces `v` against a matrix already in reduced row-echelon form.
///
/// The result has zeros in every pivot column and is the canonical
/// representative of `v` modulo the row space.
pub fn reduce_by_rref(v: &BitVector, rref: &BitMatrix, pivots: &[usize]) -> BitVector {
    let mut out = v.clone();
    for (r, &c) in pivots.iter().enumerate() {
        if out.get(c) {
            for (a, b) in out.words.iter_mut().zip(rref.row_words(r)) {
                *a ^= b;
            }
        }
    }
    out
}

/// Row space built one vector at a time, kept in (non-reduced) echelon form
/// keyed by each row's lowest set column.
///
/// Used by the index engine, where slices are large and rows arrive from
/// a generator; membership tests reuse the same reduction loop.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    cols: usize,
    stride: usize,
    rows: Vec<Vec<u64>>,
    pivot_row: Vec<u32>,
}

const NO_PIVOT: u32 = u32::MAX;

impl EchelonBasis {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            stride: words_for(cols),
            rows: Vec::new(),
            pivot_row: vec![NO_PIVOT; cols],
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// Reduces `words` in place; returns the lowest surviving column, if any.
    fn reduce_words(&self, words: &mut [u64]) -> Option<usize> {
        let mut w = 0;
        while w < self.stride {
            let word = words[w];
            if word == 0 {
                w += 1;
                continue;
            }
            let c = w * WORD + word.trailing_zeros() as usize;
            let p = self.pivot_row[c];
            if p == NO_PIVOT {
                return Some(c);
            }
            let row = &self.rows[p as usize];
            for (a, b) in words[w..].iter_mut().zip(&row[w..]) {
                *a ^= b;
            }
        }
        None
    }

    /// Adds `v` to the spanning set; returns true when the rank grew.
    pub fn insert(&mut self, v: &BitVector) -> Result<bool> {
        self.check_len(v)?;
        if self.is_full() {
            return Ok(false);
        }
        let mut words = v.words.clone();
        Ok(self.insert_words(&mut words))
    }

    /// Adds the vector whose set bits are `indices` (duplicates cancel).
    pub fn insert_indices(&mut self, indices: impl IntoIterator<Item = usize>) -> bool {
        if self.is_full() {
            return false;
        }
        let mut words = vec![0u64; self.stride];
        for i in indices {
            assert!(i < self.cols);
            words[i / WORD] ^= 1u64 << (i % WORD);
        }
        self.insert_words(&mut words)
    }

    fn insert_words(&mut self, words: &mut Vec<u64>) -> bool {
        match self.reduce_words(words) {
            None => false,
            Some(c) => {
                self.pivot_row[c] = self.rows.len() as u32;
                self.rows.push(std::mem::take(words));
                true
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        self.check_len(v)?;
        let mut words = v.words.clone();
        Ok(self.reduce_words(&mut words).is_none())
    }

    pub fn contains_indices(&self, indices: impl IntoIterator<Item = usize>) -> bool {
        let mut words = vec![0u64; self.stride];
        for i in indices {
            assert!(i < self.cols);
            words[i / WORD] ^= 1u64 << (i % WORD);
        }
        self.reduce_words(&mut words).is_none()
    }

    fn check_len(&self, v: &BitVector) -> Result<()> {
        if v.len != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len,
            });
        }
        Ok(())
    }
}
