//! Bit-packed vectors and matrices over GF(2).
//!
//! Bit `i` of a vector lives at bit `i % 64` of word `i / 64`, so the
//! little-endian byte image of the words is exactly the LSB-first byte
//! packing used on the wire. Padding bits past the logical length are kept
//! zero by every operation.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Error;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

fn tail_mask(bits: usize) -> u64 {
    match bits % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn words_to_bytes(words: &[u64], n_bytes: usize, out: &mut Vec<u8>) {
    let start = out.len();
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out.truncate(start + n_bytes);
}

fn bytes_to_words(bytes: &[u8], bits: usize) -> Result<Vec<u64>, Error> {
    let n_bytes = bits.div_ceil(8);
    if bytes.len() != n_bytes {
        return Err(Error::dims(n_bytes, bytes.len()));
    }
    let mut words = vec![0u64; words_for(bits)];
    for (i, &b) in bytes.iter().enumerate() {
        words[i / 8] |= (b as u64) << (8 * (i % 8));
    }
    if let Some(last) = words.last() {
        if last & !tail_mask(bits) != 0 {
            return Err(Error::malformed("nonzero padding bits"));
        }
    }
    Ok(words)
}

/// A row vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}](", self.len)?;
        for i in 0..self.len.min(128) {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        if self.len > 128 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, j: usize) -> Self {
        let mut v = BitVec::zeros(len);
        v.set(j, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn from_positions(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for p in positions {
            v.set(p, true);
        }
        v
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..words_for(len)).map(|_| rng.gen()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        BitVec { len, words }
    }

    /// Decodes `ceil(len / 8)` LSB-first bytes; padding bits must be zero.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self, Error> {
        Ok(BitVec { len, words: bytes_to_words(bytes, len)? })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_len());
        self.write_bytes(&mut out);
        out
    }

    pub fn write_bytes(&self, out: &mut Vec<u8>) {
        words_to_bytes(&self.words, self.byte_len(), out);
    }

    pub fn byte_len(&self) -> usize {
        self.len.div_ceil(8)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// `self || other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `start .. start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVec::zeros(len);
        for i in self.ones().skip_while(|&i| i < start).take_while(|&i| i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// Parity of the bitwise AND with a packed row of the same length.
    #[inline]
    fn dot_words(&self, row: &[u64]) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(row) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }
}

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{})", self.rows, self.cols)
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = BitMatrix::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, true);
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        let mask = tail_mask(cols);
        for r in 0..rows {
            let row = m.row_mut(r);
            for w in row.iter_mut() {
                *w = rng.gen();
            }
            if let Some(last) = row.last_mut() {
                *last &= mask;
            }
        }
        m
    }

    pub fn from_rows(rows: &[BitVec]) -> Result<Self, Error> {
        let cols = rows.first().map_or(0, BitVec::len);
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::dims(cols, r.len()));
            }
            m.row_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_vec(&self, i: usize) -> BitVec {
        BitVec { len: self.cols, words: self.row(i).to_vec() }
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        self.data[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        let mask = 1u64 << (j % WORD);
        let w = &mut self.data[i * self.stride + j / WORD];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    /// Rank via Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(pivot, rank);
            for r in rank + 1..m.rows {
                if m.get(r, col) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Row-major packing, each row padded to a whole number of bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.rows * self.cols.div_ceil(8));
        self.write_bytes(&mut out);
        out
    }

    pub fn write_bytes(&self, out: &mut Vec<u8>) {
        let row_bytes = self.cols.div_ceil(8);
        for i in 0..self.rows {
            words_to_bytes(self.row(i), row_bytes, out);
        }
    }

    pub fn byte_len(&self) -> usize {
        self.rows * self.cols.div_ceil(8)
    }

    pub fn from_bytes(bytes: &[u8], rows: usize, cols: usize) -> Result<Self, Error> {
        let row_bytes = cols.div_ceil(8);
        if bytes.len() != rows * row_bytes {
            return Err(Error::dims(rows * row_bytes, bytes.len()));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            let words = bytes_to_words(&bytes[i * row_bytes..(i + 1) * row_bytes], cols)?;
            m.row_mut(i).copy_from_slice(&words);
        }
        Ok(m)
    }

    /// Output column `j` is input column `perm.map()[j]`, i.e. `self * P`.
    pub fn permute_columns(&self, perm: &Permutation) -> Result<BitMatrix, Error> {
        if perm.len() != self.cols {
            return Err(Error::dims(self.cols, perm.len()));
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let src = self.row(i);
            let dst = &mut out.data[i * out.stride..(i + 1) * out.stride];
            for (j, &from) in perm.map.iter().enumerate() {
                let from = from as usize;
                let bit = src[from / WORD] >> (from % WORD) & 1;
                dst[j / WORD] |= bit << (j % WORD);
            }
        }
        Ok(out)
    }
}

/// `w = v * M^T`: bit `i` of the result is the parity of `v AND row_i(M)`.
pub fn vec_mat_transpose_mul(v: &BitVec, m: &BitMatrix) -> Result<BitVec, Error> {
    if v.len() != m.cols {
        return Err(Error::dims(m.cols, v.len()));
    }
    let mut out = BitVec::zeros(m.rows);
    for i in 0..m.rows {
        if v.dot_words(m.row(i)) {
            out.words[i / WORD] |= 1u64 << (i % WORD);
        }
    }
    Ok(out)
}

pub fn mat_mul(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix, Error> {
    if a.cols != b.rows {
        return Err(Error::dims(a.cols, b.rows));
    }
    let mut out = BitMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let dst = i * out.stride;
        for (wi, &w) in a.row(i).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let k = wi * WORD + w.trailing_zeros() as usize;
                w &= w - 1;
                for (d, s) in out.data[dst..dst + out.stride].iter_mut().zip(b.row(k)) {
                    *d ^= s;
                }
            }
        }
    }
    Ok(out)
}

/// Gauss-Jordan inversion.
pub fn mat_invert(a: &BitMatrix) -> Result<BitMatrix, Error> {
    if a.rows != a.cols {
        return Err(Error::dims(a.rows, a.cols));
    }
    let n = a.rows;
    let mut work = a.clone();
    let mut inv = BitMatrix::identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| work.get(r, col)).ok_or(Error::Singular)?;
        work.swap_rows(pivot, col);
        inv.swap_rows(pivot, col);
        for r in 0..n {
            if r != col && work.get(r, col) {
                work.xor_row_into(col, r);
                inv.xor_row_into(col, r);
            }
        }
    }
    Ok(inv)
}

/// Uniform invertible matrix by rejection sampling.
pub fn random_invertible<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> BitMatrix {
    assert!(dim >= 1, "dimension must be positive");
    loop {
        let m = BitMatrix::random(dim, dim, rng);
        if m.rank() == dim {
            return m;
        }
    }
}

/// Permutation stored as an index map: output position `j` takes input
/// position `map[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n as u32).collect() }
    }

    /// Validates that `map` is a bijection on `0..map.len()`.
    pub fn from_map(map: Vec<u32>) -> Result<Self, Error> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &i in &map {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::InvalidInput("permutation map is not a bijection".into()));
            }
            seen[i] = true;
        }
        Ok(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.map.len()];
        for (j, &i) in self.map.iter().enumerate() {
            inv[i as usize] = j as u32;
        }
        Permutation { map: inv }
    }

    /// The dense matrix with `(i, j) = 1` iff `i = map[j]`, so that
    /// `v * P` equals [`apply_permutation`].
    pub fn to_matrix(&self) -> BitMatrix {
        let n = self.map.len();
        let mut m = BitMatrix::zeros(n, n);
        for (j, &i) in self.map.iter().enumerate() {
            m.set(i as usize, j, true);
        }
        m
    }
}

/// Uniform permutation by Fisher-Yates.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    assert!(n >= 1, "permutation size must be positive");
    let mut map: Vec<u32> = (0..n as u32).collect();
    map.shuffle(rng);
    Permutation { map }
}

pub fn apply_permutation(v: &BitVec, p: &Permutation) -> Result<BitVec, Error> {
    if v.len() != p.len() {
        return Err(Error::dims(p.len(), v.len()));
    }
    let mut out = BitVec::zeros(v.len());
    for (j, &i) in p.map.iter().enumerate() {
        if v.get(i as usize) {
            out.set(j, true);
        }
    }
    Ok(out)
}

pub fn apply_inverse_permutation(v: &BitVec, p: &Permutation) -> Result<BitVec, Error> {
    if v.len() != p.len() {
        return Err(Error::dims(p.len(), v.len()));
    }
    let mut out = BitVec::zeros(v.len());
    for (j, &i) in p.map.iter().enumerate() {
        if v.get(j) {
            out.set(i as usize, true);
        }
    }
    Ok(out)
}
