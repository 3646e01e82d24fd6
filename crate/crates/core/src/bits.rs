//! Packed bit sequences.
//!
//! Bits are stored least-significant-bit first inside `u64` words, so position
//! `p` of a sequence lives in word `p / 64` at bit `p % 64`. The textual form
//! (`Display` / [`BitVec::parse`]) lists position 0 first, which makes the
//! rendered string read exactly like a bitmap `b_0 b_1 ... b_{n-1}`.
//!
//! [`BitSlice`] is a borrowed view at an arbitrary bit offset. Views starting
//! on a word boundary read the backing words directly; unaligned views extract
//! words on the fly with two shifts. Neither copies.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// An owned, packed sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        v.clear_tail();
        v
    }

    /// Parses a `0`/`1` string, position 0 first.
    pub fn parse(s: &str) -> Option<Self> {
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => v.set(i, true),
                _ => return None,
            }
        }
        Some(v)
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut v = BitVec::default();
        for b in iter {
            v.push(b);
        }
        v
    }

    /// The low `len` bits of `value`, bit 0 at position 0.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD);
        let mut v = BitVec::zeros(len);
        if len > 0 {
            v.words[0] = value & tail_mask(len);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit {pos} out of range {}", self.len);
        (self.words[pos / WORD] >> (pos % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(pos < self.len, "bit {pos} out of range {}", self.len);
        let mask = 1u64 << (pos % WORD);
        if value {
            self.words[pos / WORD] |= mask;
        } else {
            self.words[pos / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, pos: usize) {
        assert!(pos < self.len, "bit {pos} out of range {}", self.len);
        self.words[pos / WORD] ^= 1u64 << (pos % WORD);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    /// Appends every bit of `other`.
    pub fn extend_from(&mut self, other: BitSlice<'_>) {
        let shift = self.len % WORD;
        let n = words_for(other.len());
        if shift == 0 {
            for w in 0..n {
                self.words.push(other.word(w));
            }
        } else {
            for w in 0..n {
                let x = other.word(w);
                *self.words.last_mut().expect("nonzero shift implies a word") |= x << shift;
                self.words.push(x >> (WORD - shift));
            }
        }
        self.len += other.len();
        self.words.truncate(words_for(self.len));
        self.clear_tail();
    }

    pub fn extend_zeros(&mut self, count: usize) {
        self.len += count;
        self.words.resize(words_for(self.len), 0);
    }

    pub fn as_slice(&self) -> BitSlice<'_> {
        BitSlice {
            words: &self.words,
            offset: 0,
            len: self.len,
        }
    }

    /// A view of `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitSlice<'_> {
        self.as_slice().slice(start, len)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len);
        BitVec {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            len: self.len,
        }
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len);
        BitVec {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
            len: self.len,
        }
    }

    pub fn or_assign(&mut self, other: BitSlice<'_>) {
        assert_eq!(self.len, other.len());
        for (w, dst) in self.words.iter_mut().enumerate() {
            *dst |= other.word(w);
        }
    }

    pub fn not(&self) -> BitVec {
        let mut v = BitVec {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        v.clear_tail();
        v
    }

    /// `true` when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        self.as_slice().is_subset_of(other.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Words backing the sequence; bits beyond `len` are always zero.
    pub fn raw_words(&self) -> &[u64] {
        &self.words
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.as_slice().fmt(f)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the textual form: shorter prefix first, then `0 < 1` at
/// the first differing position.
impl Ord for BitVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_slice().cmp(&other.as_slice())
    }
}

/// A borrowed window into a [`BitVec`].
#[derive(Clone, Copy)]
pub struct BitSlice<'a> {
    words: &'a [u64],
    offset: usize,
    len: usize,
}

impl<'a> BitSlice<'a> {
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn slice(&self, start: usize, len: usize) -> BitSlice<'a> {
        assert!(
            start + len <= self.len,
            "slice {start}+{len} out of range {}",
            self.len
        );
        let abs = self.offset + start;
        BitSlice {
            words: &self.words[abs / WORD..],
            offset: abs % WORD,
            len,
        }
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len);
        let abs = self.offset + pos;
        (self.words[abs / WORD] >> (abs % WORD)) & 1 == 1
    }

    /// Word `w` of the view, with bits past the end masked off.
    #[inline]
    pub fn word(&self, w: usize) -> u64 {
        let start = w * WORD;
        debug_assert!(start < self.len);
        let raw = if self.offset == 0 {
            self.words[w]
        } else {
            let lo = self.words[w] >> self.offset;
            let hi = self
                .words
                .get(w + 1)
                .map_or(0, |&x| x << (WORD - self.offset));
            lo | hi
        };
        if start + WORD > self.len {
            raw & tail_mask(self.len)
        } else {
            raw
        }
    }

    fn n_words(&self) -> usize {
        words_for(self.len)
    }

    pub fn is_zero(&self) -> bool {
        (0..self.n_words()).all(|w| self.word(w) == 0)
    }

    pub fn count_ones(&self) -> usize {
        (0..self.n_words())
            .map(|w| self.word(w).count_ones() as usize)
            .sum()
    }

    pub fn is_subset_of(&self, other: BitSlice<'_>) -> bool {
        assert_eq!(self.len, other.len);
        (0..self.n_words()).all(|w| self.word(w) & !other.word(w) == 0)
    }

    pub fn to_bitvec(&self) -> BitVec {
        if self.offset == 0 {
            let mut v = BitVec {
                words: self.words[..self.n_words()].to_vec(),
                len: self.len,
            };
            v.clear_tail();
            v
        } else {
            BitVec {
                words: (0..self.n_words()).map(|w| self.word(w)).collect(),
                len: self.len,
            }
        }
    }

    /// The view as a single word; only valid for views of at most 64 bits.
    pub fn as_u64(&self) -> u64 {
        assert!(self.len <= WORD);
        if self.len == 0 {
            0
        } else {
            self.word(0)
        }
    }

    /// `true` when the view starts on a word boundary of its backing storage.
    pub fn is_aligned(&self) -> bool {
        self.offset == 0
    }
}

impl PartialEq for BitSlice<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && (0..self.n_words()).all(|w| self.word(w) == other.word(w))
    }
}

impl Eq for BitSlice<'_> {}

impl Hash for BitSlice<'_> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len.hash(state);
        for w in 0..self.n_words() {
            state.write_u64(self.word(w));
        }
    }
}

impl PartialOrd for BitSlice<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BitSlice<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len.min(other.len);
        let n = words_for(common);
        for w in 0..n {
            let mut a = self.word(w);
            let mut b = other.word(w);
            if (w + 1) * WORD > common {
                let m = tail_mask(common);
                a &= m;
                b &= m;
            }
            let diff = a ^ b;
            if diff != 0 {
                let first = diff.trailing_zeros();
                return if (a >> first) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl fmt::Display for BitSlice<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitSlice<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSlice({self})")
    }
}
