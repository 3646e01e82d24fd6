//! Bound formulas for maximal minimal DFAs and the families of languages
//! that reach the operational bounds.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::automata::RankedNfa;
use crate::bitmap::{Alphabet, BlockLanguage};
use crate::bits::BitVec;
use crate::error::{Error, Result};

/// Parameters of the largest minimal DFA for languages in `Σ^ℓ`, `|Σ| = k`.
///
/// Rank `i` of a minimal DFA holds at most `min(k^{ℓ-i}, 2^{k^i} - 1)` states.
/// `r` is the first rank where the second cap is no smaller than the first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundParams {
    pub k: usize,
    pub ell: usize,
    /// `min { n : k^{ℓ-n} ≤ 2^{k^n} - 1 }`.
    pub r: usize,
    /// `r - (⌊log_k ℓ⌋ + 1)`, always in `{-1, 0, 1}`.
    pub x: i64,
    /// The rank of maximal width: `r` if `k^{ℓ-r} > 2^{k^{r-1}} - 1`, else `r - 1`.
    pub r_kl: usize,
    /// The maximal width, `max(k^{ℓ-r}, 2^{k^{r-1}} - 1)`.
    #[serde(serialize_with = "as_string")]
    pub t: BigUint,
    /// `(k^{ℓ-r+1} - 1)/(k - 1) + Σ_{i<r} (2^{k^i} - 1) + 1`, counting `Ω`.
    #[serde(serialize_with = "as_string")]
    pub max_dsc: BigUint,
}

fn as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl BoundParams {
    pub fn max_dsc_u64(&self) -> Option<u64> {
        self.max_dsc.to_u64()
    }
}

fn pow(k: usize, e: usize) -> BigUint {
    BigUint::from(k).pow(e as u32)
}

/// `2^{k^e} - 1`. Caps the exponent: callers only compare against values
/// far below `2^{2^32}`.
fn double_cap(k: usize, e: usize) -> BigUint {
    let exp = pow(k, e).to_u32().unwrap_or(u32::MAX).min(1 << 20);
    (BigUint::one() << exp) - BigUint::one()
}

fn floor_log(k: usize, ell: usize) -> i64 {
    let mut acc = 1usize;
    let mut n = 0;
    while acc.saturating_mul(k) <= ell {
        acc *= k;
        n += 1;
    }
    n
}

pub fn bound_params(k: usize, ell: usize) -> Result<BoundParams> {
    if k < 2 || ell < 1 {
        return Err(Error::Invalid(format!(
            "bound parameters need k ≥ 2 and ℓ ≥ 1, got k={k}, ℓ={ell}"
        )));
    }
    let r = (0..=ell)
        .find(|&n| pow(k, ell - n) <= double_cap(k, n))
        .expect("n = ℓ always qualifies");
    let top = pow(k, ell - r);
    let bottom = double_cap(k, r - 1);
    let r_kl = if top > bottom { r } else { r - 1 };
    let t = top.clone().max(bottom);
    let chain = (pow(k, ell - r + 1) - BigUint::one()) / BigUint::from(k - 1);
    let caps: BigUint = (0..r).map(|i| double_cap(k, i)).sum();
    Ok(BoundParams {
        k,
        ell,
        r,
        x: r as i64 - (floor_log(k, ell) + 1),
        r_kl,
        t,
        max_dsc: chain + caps + BigUint::one(),
    })
}

/// `E_ℓ` over `{a, b}`: `w₁w₂` with `|w₂| = r_ℓ` is a member iff bit `ind(w₂)`
/// of `ind(w₁) + 1` is set.
pub fn witness_e(ell: usize) -> Result<BlockLanguage> {
    let rl = bound_params(2, ell)?.r_kl;
    BlockLanguage::from_predicate(2, ell, |w| {
        let i = index_of(&w[..ell - rl]) + 1;
        let j = index_of(&w[ell - rl..]);
        j < 128 && (i >> j) & 1 == 1
    })
}

fn index_of(word: &[usize]) -> u128 {
    word.iter().fold(0, |acc, &s| acc * 2 + s as u128)
}

/// `E_ℓ` from its closed form: the blocks `rev(pad(bin(i), 2^{r_ℓ}))` for
/// `i = 1..t`, followed by a zero block when the maximal width sits below
/// rank `r`.
pub fn witness_e_closed_form(ell: usize) -> Result<BlockLanguage> {
    let p = bound_params(2, ell)?;
    crate::bitmap::checked_block_size(2, ell)?;
    let block = 1usize << p.r_kl;
    let t = p.t.to_usize().ok_or_else(|| Error::Overflow {
        what: format!("t = {}", p.t),
        cap: crate::bitmap::bitmap_cap(),
    })?;
    let mut bits = BitVec::zeros(0);
    for i in 1..=t {
        // bin(i) padded to `block` digits, most significant first, then reversed:
        // position j holds bit j of i
        bits.extend_from(BitVec::from_bools((0..block).map(|j| j < 128 && (i as u128 >> j) & 1 == 1)).as_slice());
    }
    if p.r_kl < p.r {
        bits.extend_zeros(block);
    }
    BlockLanguage::new(2, ell, bits)
}

/// `L_{k,d,x}`: words `a_0 ⋯ a_{2d-1}` such that `a_i = a_{2d-1-i}` for every
/// `i < d` with `i ≡ x (mod 2)`.
pub fn witness_parity(k: usize, d: usize, x: usize) -> Result<BlockLanguage> {
    if k < 2 || d < 1 || x > 1 {
        return Err(Error::Invalid(format!(
            "parity witness needs k ≥ 2, d ≥ 1, x ∈ {{0,1}}; got k={k}, d={d}, x={x}"
        )));
    }
    BlockLanguage::from_predicate(k, 2 * d, |w| {
        (0..d).filter(|i| i % 2 == x).all(|i| w[i] == w[2 * d - 1 - i])
    })
}

/// The predicate of the block-complement family: some `i < d` has
/// `w_i = w_{i+d}` and this symbol is not the last one, `σ_{k-1}`.
pub fn ko_predicate(k: usize, d: usize, w: &[usize]) -> bool {
    (0..d).any(|i| w[i] == w[i + d] && w[i] != k - 1)
}

/// The block-complement family `L_{k,d}` and its NFA with `(k-1)d² + 2d`
/// states.
///
/// The NFA reads a prefix, guesses the position `i` and the symbol `c`, counts
/// `d - 1` symbols, checks `c` again and reads the rest of the word.
pub fn witness_ko(k: usize, d: usize) -> Result<(BlockLanguage, RankedNfa)> {
    if k < 2 || d < 2 {
        return Err(Error::Invalid(format!(
            "block-complement witness needs k ≥ 2 and d ≥ 2; got k={k}, d={d}"
        )));
    }
    let lang = BlockLanguage::from_predicate(k, 2 * d, |w| ko_predicate(k, d, w))?;
    let ell = 2 * d;
    // prefix states 0..d, then pending (c, i, t), then suffix states by rank
    let prefix = |j: usize| j;
    let pending = |c: usize, i: usize, t: usize| d + (c * d + i) * d + t;
    let suffix = |r: usize| d + (k - 1) * d * d + r;
    let n = (k - 1) * d * d + 2 * d;
    let mut ranks = vec![0; n];
    let mut edges = Vec::new();
    for j in 0..d {
        ranks[prefix(j)] = ell - j;
        for s in 0..k {
            if j + 1 < d {
                edges.push((prefix(j), s, prefix(j + 1)));
            }
            if s != k - 1 {
                edges.push((prefix(j), s, pending(s, j, 0)));
            }
        }
    }
    for c in 0..k - 1 {
        for i in 0..d {
            for t in 0..d {
                let q = pending(c, i, t);
                ranks[q] = ell - i - 1 - t;
                if t + 1 < d {
                    for s in 0..k {
                        edges.push((q, s, pending(c, i, t + 1)));
                    }
                } else {
                    edges.push((q, c, suffix(d - i - 1)));
                }
            }
        }
    }
    for r in 0..d {
        ranks[suffix(r)] = r;
        if r > 0 {
            for s in 0..k {
                edges.push((suffix(r), s, suffix(r - 1)));
            }
        }
    }
    let nfa = RankedNfa::new(k, ell, ranks, prefix(0), suffix(0), edges)?;
    Ok((lang, nfa))
}

/// `Σ^ℓ`.
pub fn full(k: usize, ell: usize) -> Result<BlockLanguage> {
    BlockLanguage::full(k, ell)
}

/// `{w}`.
pub fn singleton(k: usize, word: &str) -> Result<BlockLanguage> {
    let alphabet = Alphabet::new(k)?;
    let w = alphabet.parse(word)?;
    if w.is_empty() {
        return Err(Error::InvalidWord("the empty word is not a block of positive length".into()));
    }
    BlockLanguage::from_words(alphabet, w.len(), [w])
}

/// `Γ^ℓ` for the letters `Γ ⊆ Σ` given as glyphs, e.g. `"ac"`.
pub fn subalphabet(k: usize, ell: usize, letters: &str) -> Result<BlockLanguage> {
    let alphabet = Alphabet::new(k)?;
    let allowed = alphabet.parse(letters)?;
    if allowed.is_empty() {
        return Err(Error::InvalidWord("no letters given".into()));
    }
    BlockLanguage::from_predicate(k, ell, |w| w.iter().all(|s| allowed.contains(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::RankedAutomaton;

    #[test]
    fn params_for_five() {
        let p = bound_params(2, 5).unwrap();
        assert_eq!((p.r, p.r_kl, p.x), (2, 2, -1));
        assert_eq!(p.t, BigUint::from(8u32));
        assert_eq!(p.max_dsc_u64(), Some(20));
    }

    #[test]
    fn params_for_one() {
        let p = bound_params(2, 1).unwrap();
        assert_eq!(p.r, 1);
        assert_eq!(p.max_dsc_u64(), Some(3));
    }

    #[test]
    fn large_parameters_stay_exact() {
        let p = bound_params(3, 45).unwrap();
        assert!(p.max_dsc > BigUint::from(u64::MAX));
        assert!((-1..=1).contains(&p.x));
    }

    #[test]
    fn e5_golden() {
        let e = witness_e(5).unwrap();
        assert_eq!(e.bits().to_string(), "10000100110000101010011011100001");
        assert_eq!(witness_e_closed_form(5).unwrap(), e);
        let words = e.to_strings();
        assert!(words.contains(&"abaab".to_string()) && words.contains(&"abbba".to_string()));
        assert!(!words.contains(&"aabaa".to_string()));
        assert_eq!(words.len(), 13);
    }

    #[test]
    fn closed_form_matches_predicate() {
        for ell in 1..=12 {
            assert_eq!(witness_e(ell).unwrap(), witness_e_closed_form(ell).unwrap(), "ℓ={ell}");
        }
    }

    #[test]
    fn parity_intersection_is_palindromes() {
        for k in 2..=3 {
            for d in 1..=3 {
                let both = witness_parity(k, d, 0).unwrap().and(&witness_parity(k, d, 1).unwrap()).unwrap();
                let pal = BlockLanguage::from_predicate(k, 2 * d, |w| w.iter().eq(w.iter().rev())).unwrap();
                assert_eq!(both, pal);
            }
        }
    }

    #[test]
    fn ko_membership() {
        let (lang, nfa) = witness_ko(2, 2).unwrap();
        assert_eq!(nfa.num_states(), 8);
        // a repeat of the last symbol does not count
        assert!(!lang.contains(&[1, 1, 1, 1]).unwrap());
        assert!(!lang.contains(&[1, 0, 0, 1]).unwrap());
        assert!(lang.contains(&[1, 0, 1, 0]).unwrap());
        assert!(lang.contains(&[0, 1, 0, 1]).unwrap());
        assert_eq!(nfa.language().unwrap(), lang);
    }

    #[test]
    fn simple_families() {
        assert_eq!(singleton(2, "aaa").unwrap().bits().to_string(), "10000000");
        let sub = subalphabet(3, 2, "ac").unwrap();
        assert_eq!(sub.bits().to_string(), "101000101");
        assert_eq!(full(2, 2).unwrap().count(), 4);
    }
}
