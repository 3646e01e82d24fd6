//! Block languages as bitmaps.
//!
//! A block language `L ⊆ Σ^ℓ` over `Σ = {σ_0, …, σ_{k-1}}` is stored as the
//! characteristic string of length `k^ℓ`: bit `i` is set iff the `i`-th word of
//! `Σ^ℓ` in lexicographic order belongs to `L`. The index of a word is its
//! value read as a base-`k` numeral, most significant symbol first.
//!
//! Splitting the bitmap into consecutive slices of length `k^i` gives the
//! factors of rank `i`; the `j`-th factor is the bitmap of the quotient
//! `w⁻¹L` where `w` is the `j`-th word of length `ℓ - i`.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use crate::bits::{BitSlice, BitVec};
use crate::error::{Error, Result};

pub const DEFAULT_BITMAP_CAP: u64 = 1 << 26;

/// Environment variable overriding [`DEFAULT_BITMAP_CAP`].
pub const BITMAP_CAP_ENV: &str = "BLOCKSET_BITMAP_CAP";

/// Largest bitmap length accepted anywhere in the crate. Read once from
/// `BLOCKSET_BITMAP_CAP` when set to a positive integer.
pub fn bitmap_cap() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(BITMAP_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_BITMAP_CAP)
    })
}

/// `k^e` if it fits under the bitmap cap.
pub fn checked_block_size(k: usize, e: usize) -> Result<usize> {
    let cap = bitmap_cap();
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc
            .checked_mul(k as u64)
            .filter(|&v| v <= cap)
            .ok_or_else(|| Error::Overflow {
                what: format!("{k}^{e}"),
                cap,
            })?;
    }
    if acc > cap {
        return Err(Error::Overflow {
            what: format!("{k}^{e}"),
            cap,
        });
    }
    Ok(acc as usize)
}

/// Symbol index `j` standing for `σ_j`.
pub type Symbol = usize;
pub type Word = Vec<Symbol>;

/// An alphabet `{σ_0, …, σ_{k-1}}`. Symbols render as `a`, `b`, … while
/// `k ≤ 26` and as `s0`, `s1`, … beyond that.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet {
    k: usize,
}

impl Alphabet {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("alphabet size must be at least 1".into()));
        }
        Ok(Alphabet { k })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.k
    }

    fn uses_letters(&self) -> bool {
        self.k <= 26
    }

    pub fn glyph(&self, symbol: Symbol) -> String {
        if self.uses_letters() {
            char::from(b'a' + symbol as u8).to_string()
        } else {
            format!("s{symbol}")
        }
    }

    pub fn render(&self, word: &[Symbol]) -> String {
        if self.uses_letters() {
            word.iter().map(|&s| char::from(b'a' + s as u8)).collect()
        } else {
            word.iter()
                .map(|&s| format!("s{s}"))
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Parses the rendering produced by [`Alphabet::render`].
    pub fn parse(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        let word: Option<Word> = if self.uses_letters() {
            text.bytes()
                .map(|b| match b {
                    b'a'..=b'z' => Some((b - b'a') as usize),
                    _ => None,
                })
                .collect()
        } else if text.is_empty() {
            Some(Vec::new())
        } else {
            text.split(',')
                .map(|t| t.trim().strip_prefix('s').and_then(|n| n.parse().ok()))
                .collect()
        };
        match word {
            Some(w) if w.iter().all(|&s| s < self.k) => Ok(w),
            _ => Err(Error::InvalidWord(format!(
                "{text:?} is not a word over an alphabet of size {}",
                self.k
            ))),
        }
    }

    fn check(&self, ell: usize, word: &[Symbol]) -> Result<()> {
        if word.len() != ell {
            return Err(Error::InvalidWord(format!(
                "{} has length {}, expected {ell}",
                self.render_lossy(word),
                word.len()
            )));
        }
        if let Some(&s) = word.iter().find(|&&s| s >= self.k) {
            return Err(Error::InvalidWord(format!(
                "symbol {s} is outside an alphabet of size {}",
                self.k
            )));
        }
        Ok(())
    }

    fn render_lossy(&self, word: &[Symbol]) -> String {
        if word.iter().all(|&s| s < self.k) {
            self.render(word)
        } else {
            format!("{word:?}")
        }
    }

    /// Lexicographic index of a word of length `ell`.
    pub fn word_to_index(&self, ell: usize, word: &[Symbol]) -> Result<u64> {
        self.check(ell, word)?;
        word.iter().try_fold(0u64, |acc, &s| {
            acc.checked_mul(self.k as u64)
                .and_then(|v| v.checked_add(s as u64))
                .ok_or_else(|| Error::Overflow {
                    what: format!("index of a word of length {ell}"),
                    cap: u64::MAX,
                })
        })
    }

    /// The word of length `ell` with lexicographic index `index`.
    pub fn index_to_word(&self, ell: usize, index: u64) -> Result<Word> {
        let limit = (self.k as u64).checked_pow(ell as u32);
        if let Some(limit) = limit {
            if index >= limit {
                return Err(Error::IndexOutOfRange { index, limit });
            }
        }
        let mut word = vec![0; ell];
        let mut rest = index;
        for slot in word.iter_mut().rev() {
            *slot = (rest % self.k as u64) as usize;
            rest /= self.k as u64;
        }
        Ok(word)
    }
}

/// A contiguous slice `s^i_j` of a bitmap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor<'a> {
    pub rank: usize,
    pub index: usize,
    pub content: BitSlice<'a>,
}

/// Distinct nonzero factors of each rank, in order of first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSets {
    per_rank: Vec<Vec<BitVec>>,
}

impl FactorSets {
    /// `B_i`.
    pub fn rank(&self, i: usize) -> &[BitVec] {
        &self.per_rank[i]
    }

    /// Largest rank, i.e. the word length.
    pub fn ell(&self) -> usize {
        self.per_rank.len() - 1
    }

    /// `|B_i|` for `i = 0..=ℓ`.
    pub fn widths(&self) -> Vec<usize> {
        self.per_rank.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.per_rank.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BlockLanguage {
    alphabet: Alphabet,
    ell: usize,
    bits: BitVec,
}

impl BlockLanguage {
    pub fn new(k: usize, ell: usize, bits: BitVec) -> Result<Self> {
        let alphabet = Alphabet::new(k)?;
        if ell == 0 {
            return Err(Error::Invalid("word length must be positive".into()));
        }
        let size = checked_block_size(k, ell)?;
        if bits.len() != size {
            return Err(Error::LengthMismatch(format!(
                "bitmap has {} bits, expected {k}^{ell} = {size}",
                bits.len()
            )));
        }
        Ok(BlockLanguage { alphabet, ell, bits })
    }

    /// Parses a `0`/`1` bitmap string.
    pub fn from_bitstring(k: usize, ell: usize, s: &str) -> Result<Self> {
        let bits = BitVec::parse(s)
            .ok_or_else(|| Error::Invalid(format!("{s:?} is not a 0/1 string")))?;
        Self::new(k, ell, bits)
    }

    pub fn empty(k: usize, ell: usize) -> Result<Self> {
        let size = checked_block_size(k, ell)?;
        Self::new(k, ell, BitVec::zeros(size))
    }

    /// `Σ^ℓ`.
    pub fn full(k: usize, ell: usize) -> Result<Self> {
        let size = checked_block_size(k, ell)?;
        Self::new(k, ell, BitVec::ones(size))
    }

    pub fn from_words<I, W>(alphabet: Alphabet, ell: usize, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = W>,
        W: AsRef<[Symbol]>,
    {
        let mut lang = Self::empty(alphabet.size(), ell)?;
        for w in words {
            let i = alphabet.word_to_index(ell, w.as_ref())?;
            lang.bits.set(i as usize, true);
        }
        Ok(lang)
    }

    /// Builds a language from rendered words such as `"abba"`.
    pub fn from_strs<S: AsRef<str>>(k: usize, ell: usize, words: &[S]) -> Result<Self> {
        let alphabet = Alphabet::new(k)?;
        let parsed = words
            .iter()
            .map(|w| alphabet.parse(w.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_words(alphabet, ell, parsed)
    }

    /// Every word `w` with `pred(w)`.
    pub fn from_predicate<F>(k: usize, ell: usize, mut pred: F) -> Result<Self>
    where
        F: FnMut(&[Symbol]) -> bool,
    {
        let mut lang = Self::empty(k, ell)?;
        let mut word = vec![0; ell];
        for i in 0..lang.bits.len() {
            if pred(&word) {
                lang.bits.set(i, true);
            }
            // odometer increment keeps `word` equal to index_to_word(i + 1)
            for slot in word.iter_mut().rev() {
                *slot += 1;
                if *slot < k {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(lang)
    }

    #[inline]
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.alphabet.size()
    }

    #[inline]
    pub fn ell(&self) -> usize {
        self.ell
    }

    #[inline]
    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn into_bits(self) -> BitVec {
        self.bits
    }

    /// Number of words in the language.
    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn is_full(&self) -> bool {
        self.bits.count_ones() == self.bits.len()
    }

    pub fn contains(&self, word: &[Symbol]) -> Result<bool> {
        let i = self.alphabet.word_to_index(self.ell, word)?;
        Ok(self.bits.get(i as usize))
    }

    /// The words of the language in lexicographic order.
    pub fn to_words(&self) -> Vec<Word> {
        self.bits
            .ones_positions()
            .map(|i| {
                self.alphabet
                    .index_to_word(self.ell, i as u64)
                    .expect("bit positions are valid indices")
            })
            .collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.to_words()
            .iter()
            .map(|w| self.alphabet.render(w))
            .collect()
    }

    /// `s^rank_index`, a zero-copy view.
    pub fn factor(&self, rank: usize, index: usize) -> Result<Factor<'_>> {
        if rank > self.ell {
            return Err(Error::IndexOutOfRange {
                index: rank as u64,
                limit: self.ell as u64 + 1,
            });
        }
        let len = self.k().pow(rank as u32);
        let count = self.bits.len() / len;
        if index >= count {
            return Err(Error::IndexOutOfRange {
                index: index as u64,
                limit: count as u64,
            });
        }
        Ok(Factor {
            rank,
            index,
            content: self.bits.slice(index * len, len),
        })
    }

    pub fn factor_sets(&self) -> FactorSets {
        let k = self.k();
        let mut per_rank = Vec::with_capacity(self.ell + 1);
        let mut len = 1usize;
        for _ in 0..=self.ell {
            let count = self.bits.len() / len;
            let mut found = Vec::new();
            if len <= 64 {
                let mut seen = HashSet::new();
                for j in 0..count {
                    let s = self.bits.slice(j * len, len);
                    let v = s.as_u64();
                    if v != 0 && seen.insert(v) {
                        found.push(s.to_bitvec());
                    }
                }
            } else {
                let mut seen: HashSet<BitSlice<'_>> = HashSet::new();
                for j in 0..count {
                    let s = self.bits.slice(j * len, len);
                    if !s.is_zero() && seen.insert(s) {
                        found.push(s.to_bitvec());
                    }
                }
            }
            per_rank.push(found);
            len = len.saturating_mul(k);
        }
        FactorSets { per_rank }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.k() != other.k() || self.ell != other.ell {
            return Err(Error::LengthMismatch(format!(
                "(k={}, ℓ={}) vs (k={}, ℓ={})",
                self.k(),
                self.ell,
                other.k(),
                other.ell
            )));
        }
        Ok(())
    }

    /// Intersection, as a bitwise AND.
    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(BlockLanguage {
            bits: self.bits.and(&other.bits),
            ..self.clone()
        })
    }

    /// Union, as a bitwise OR.
    pub fn or(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(BlockLanguage {
            bits: self.bits.or(&other.bits),
            ..self.clone()
        })
    }

    /// Block complement `Σ^ℓ ∖ L`.
    pub fn complement(&self) -> Self {
        BlockLanguage {
            bits: self.bits.not(),
            ..self.clone()
        }
    }

    /// Flips the bit of `word`: adds it when absent, removes it when present.
    pub fn toggle_word(&self, word: &[Symbol]) -> Result<Self> {
        let i = self.alphabet.word_to_index(self.ell, word)?;
        let mut out = self.clone();
        out.bits.flip(i as usize);
        Ok(out)
    }

    /// `R_{ℓ-1}` where `R_0 = bs` and `R_i = ⧢^k_{k^{i-1}}(R_{i-1})`.
    pub fn reversal(&self) -> Self {
        let k = self.k();
        let mut current = self.bits.clone();
        let mut block = 1usize;
        for _ in 1..self.ell {
            current = shuffle_split(&current, k, block).expect("k^ℓ splits into k parts of k^(ℓ-1)");
            block *= k;
        }
        BlockLanguage {
            bits: current,
            ..self.clone()
        }
    }

    /// `L₁L₂`: every 1 of `self` becomes `bs(other)`, every 0 becomes a zero block.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.k() != other.k() {
            return Err(Error::LengthMismatch(format!(
                "alphabet sizes {} and {}",
                self.k(),
                other.k()
            )));
        }
        let ell = self.ell + other.ell;
        let size = checked_block_size(self.k(), ell)?;
        let mut bits = BitVec::zeros(0);
        let block = other.bits.len();
        for b in self.bits.iter() {
            if b {
                bits.extend_from(other.bits.as_slice());
            } else {
                bits.extend_zeros(block);
            }
        }
        debug_assert_eq!(bits.len(), size);
        Self::new(self.k(), ell, bits)
    }
}

impl fmt::Debug for BlockLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockLanguage(k={}, ℓ={}, {})", self.k(), self.ell, self.bits)
    }
}

/// `⧢^m_j(w_0 ⋯ w_{m-1})`: round-robin interleaving of length-`block` pieces
/// taken from each part in turn.
pub fn perfect_shuffle(parts: &[BitSlice<'_>], block: usize) -> Result<BitVec> {
    let Some(first) = parts.first() else {
        return Ok(BitVec::zeros(0));
    };
    let n = first.len();
    if parts.iter().any(|p| p.len() != n) {
        return Err(Error::ShuffleArityMismatch(format!(
            "part lengths {:?}",
            parts.iter().map(|p| p.len()).collect::<Vec<_>>()
        )));
    }
    if block == 0 || n % block != 0 {
        return Err(Error::ShuffleArityMismatch(format!(
            "block {block} does not divide part length {n}"
        )));
    }
    let mut out = BitVec::zeros(0);
    for t in 0..n / block {
        for p in parts {
            let piece = p.slice(t * block, block);
            if block < 8 {
                for i in 0..block {
                    out.push(piece.get(i));
                }
            } else {
                out.extend_from(piece);
            }
        }
    }
    Ok(out)
}

/// Splits `seq` into `m` equal parts and shuffles them with blocks of `block`.
pub fn shuffle_split(seq: &BitVec, m: usize, block: usize) -> Result<BitVec> {
    if m == 0 || !seq.len().is_multiple_of(m) {
        return Err(Error::ShuffleArityMismatch(format!(
            "{} bits do not split into {m} parts",
            seq.len()
        )));
    }
    let n = seq.len() / m;
    let parts: Vec<_> = (0..m).map(|p| seq.slice(p * n, n)).collect();
    perfect_shuffle(&parts, block)
}
