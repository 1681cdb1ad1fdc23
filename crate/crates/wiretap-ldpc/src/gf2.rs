//! Exact linear algebra over the two-element field.
//!
//! Rows are packed into `u64` blocks so that elimination on the
//! sparse-origin parity-check matrices of this crate (tens of thousands of
//! columns) runs in word-wide XOR operations. All elimination entry points
//! take `&self` and work on an internal copy; values are immutable after
//! construction and safe to share across threads.
//!
//! The pivot rule is fixed (first nonzero row in the lowest-index column),
//! which makes `solve_affine` and the echelon forms deterministic.

use rand::Rng;
use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    /// Dimension mismatch between operands.
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    /// The linear system has no solution.
    #[error("inconsistent linear system")]
    Inconsistent,
    /// A column or row index is out of range.
    #[error("index {index} out of range ({limit})")]
    IndexError { index: usize, limit: usize },
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A packed bit vector.
#[derive(Clone, PartialEq, Eq)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Uniformly random vector.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.random();
        }
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let used = self.len % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
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
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// A packed row-major bit matrix.
///
/// Bits beyond `cols` in the last block of each row are kept zero.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

/// Outcome of row reduction: rank, pivot columns (strictly increasing) and the
/// transformed matrix.
#[derive(Clone, Debug)]
pub struct RowEchelonResult {
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    pub transformed: BitMatrix,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from `rows` slices of 0/1 bytes.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Matrix with i.i.d. Bernoulli(1/2) entries.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            let row = m.row_mut(r);
            for w in row.iter_mut() {
                *w = rng.random();
            }
        }
        m.mask_tails();
        m
    }

    fn mask_tails(&mut self) {
        let used = self.cols % WORD_BITS;
        if used == 0 {
            return;
        }
        let mask = (1u64 << used) - 1;
        for r in 0..self.rows {
            let wpr = self.words_per_row;
            self.data[r * wpr + wpr - 1] &= mask;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    #[inline]
    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.row(r)[c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        let row = self.row_mut(r);
        if value {
            row[w] |= mask;
        } else {
            row[w] &= !mask;
        }
    }

    /// XOR bit into position; used by graph-to-matrix conversion so that
    /// multi-edges reduce mod 2.
    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        let w = c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        self.row_mut(r)[w] ^= mask;
    }

    /// `dst ^= src`, starting at word `from` (both rows of `self`).
    #[inline]
    fn xor_rows_from(&mut self, dst: usize, src: usize, from: usize) {
        let wpr = self.words_per_row;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * wpr);
            (&mut lo[dst * wpr..dst * wpr + wpr], &hi[..wpr])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * wpr);
            (&mut hi[..wpr], &lo[src * wpr..src * wpr + wpr])
        };
        for w in from..wpr {
            a[w] ^= b[w];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let wpr = self.words_per_row;
        for w in 0..wpr {
            self.data.swap(a * wpr + w, b * wpr + w);
        }
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::ShapeError(format!(
                "stack: {} vs {} columns",
                self.cols, other.cols
            )));
        }
        let mut m = BitMatrix::zeros(self.rows + other.rows, self.cols);
        m.data[..self.data.len()].copy_from_slice(&self.data);
        m.data[self.data.len()..].copy_from_slice(&other.data);
        Ok(m)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for w in 0..self.words_per_row {
                let mut bits = self.row(r)[w];
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    t.set(w * WORD_BITS + b, r, true);
                }
            }
        }
        t
    }

    /// Submatrix keeping the selected columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<BitMatrix, Gf2Error> {
        for &c in cols {
            if c >= self.cols {
                return Err(Gf2Error::IndexError {
                    index: c,
                    limit: self.cols,
                });
            }
        }
        let mut m = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    m.set(r, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec, Gf2Error> {
        if x.len != self.cols {
            return Err(Gf2Error::ShapeError(format!(
                "mul_vec: {} cols vs {} entries",
                self.cols, x.len
            )));
        }
        let mut y = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u64;
            for (a, b) in self.row(r).iter().zip(&x.words) {
                acc ^= a & b;
            }
            if acc.count_ones() % 2 == 1 {
                y.set(r, true);
            }
        }
        Ok(y)
    }

    pub fn row_as_bitvec(&self, r: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row(r).to_vec(),
        }
    }

    /// Forward elimination; first-nonzero-in-lowest-column pivot rule.
    /// When `reduced` is set, entries above each pivot are cleared too.
    fn echelonize(mut self, reduced: bool) -> RowEchelonResult {
        let mut pivot_cols = Vec::new();
        let mut frontier = 0usize;
        for c in 0..self.cols {
            if frontier == self.rows {
                break;
            }
            let Some(p) = (frontier..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(frontier, p);
            let from = c / WORD_BITS;
            for r in frontier + 1..self.rows {
                if self.get(r, c) {
                    self.xor_rows_from(r, frontier, from);
                }
            }
            pivot_cols.push(c);
            frontier += 1;
        }
        if reduced {
            for (i, &c) in pivot_cols.iter().enumerate().rev() {
                let from = c / WORD_BITS;
                for r in 0..i {
                    if self.get(r, c) {
                        self.xor_rows_from(r, i, from);
                    }
                }
            }
        }
        RowEchelonResult {
            rank: pivot_cols.len(),
            pivot_cols,
            transformed: self,
        }
    }

    pub fn row_echelon(&self) -> RowEchelonResult {
        self.clone().echelonize(false)
    }

    pub fn reduced_row_echelon(&self) -> RowEchelonResult {
        self.clone().echelonize(true)
    }

    /// GF(2) row rank. Empty matrices have rank 0.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.clone().echelonize(false).rank
    }

    /// Rank of the submatrix formed by the selected columns.
    pub fn rank_of_columns(&self, cols: &[usize]) -> Result<usize, Gf2Error> {
        if cols.is_empty() {
            return Ok(0);
        }
        Ok(self.select_columns(cols)?.rank())
    }

    /// Basis of `{x : self * x = 0}`, one vector per row.
    pub fn nullspace_basis(&self) -> BitMatrix {
        let rref = self.reduced_row_echelon();
        let mut is_pivot = vec![false; self.cols];
        for &c in &rref.pivot_cols {
            is_pivot[c] = true;
        }
        let free_cols: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = BitMatrix::zeros(free_cols.len(), self.cols);
        let mut free_index = vec![usize::MAX; self.cols];
        for (k, &f) in free_cols.iter().enumerate() {
            free_index[f] = k;
            basis.set(k, f, true);
        }
        // Pivot variable of row i equals the row's free-column entries.
        for (i, &c) in rref.pivot_cols.iter().enumerate() {
            for (w, &word) in rref.transformed.row(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let col = w * WORD_BITS + b;
                    if col != c && free_index[col] != usize::MAX {
                        basis.set(free_index[col], c, true);
                    }
                }
            }
        }
        basis
    }

    fn solve_internal<R: Rng + ?Sized>(
        &self,
        b: &BitVec,
        rng: Option<&mut R>,
    ) -> Result<Option<BitVec>, Gf2Error> {
        if b.len != self.rows {
            return Err(Gf2Error::ShapeError(format!(
                "solve: {} rows vs {} entries",
                self.rows, b.len
            )));
        }
        // Augmented [A | b], reduced form.
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            aug.row_mut(r)[..self.words_per_row].copy_from_slice(self.row(r));
        }
        // Shift column `cols` bits in if cols is not word aligned.
        for r in 0..self.rows {
            if b.get(r) {
                aug.set(r, self.cols, true);
            }
        }
        let rref = aug.echelonize(true);
        // A pivot in the augmented column means 0 = 1 somewhere.
        if rref.pivot_cols.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(self.cols);
        let mut is_pivot = vec![false; self.cols];
        for &c in &rref.pivot_cols {
            is_pivot[c] = true;
        }
        if let Some(rng) = rng {
            for (c, &pivot) in is_pivot.iter().enumerate() {
                if !pivot {
                    x.set(c, rng.random());
                }
            }
        }
        // Back-substitute pivots: x[c] = rhs_i + sum over free columns in row i.
        for (i, &c) in rref.pivot_cols.iter().enumerate() {
            let mut acc = rref.transformed.get(i, self.cols);
            for (w, &word) in rref.transformed.row(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let bit = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let col = w * WORD_BITS + bit;
                    if col < self.cols && col != c && !is_pivot[col] && x.get(col) {
                        acc = !acc;
                    }
                }
            }
            x.set(c, acc);
        }
        debug_assert_eq!(self.mul_vec(&x).unwrap(), *b, "solution check failed");
        Ok(Some(x))
    }

    /// One solution of `self * x = b` (free variables zero), or `None` when
    /// the system is inconsistent. Deterministic given the fixed pivot rule.
    pub fn solve_affine(&self, b: &BitVec) -> Result<Option<BitVec>, Gf2Error> {
        self.solve_internal::<rand::rngs::ThreadRng>(b, None)
    }

    /// A uniformly random solution of `self * x = b`.
    ///
    /// Particular solution plus a uniform assignment of the free variables,
    /// which is equivalent to a uniform combination of a nullspace basis.
    pub fn sample_solution<R: Rng + ?Sized>(
        &self,
        b: &BitVec,
        rng: &mut R,
    ) -> Result<BitVec, Gf2Error> {
        match self.solve_internal(b, Some(rng))? {
            Some(x) => Ok(x),
            None => Err(Gf2Error::Inconsistent),
        }
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(32) {
            for c in 0..self.cols.min(128) {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
