//! Language files (JSON) and word lists (text).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitmap::{Alphabet, BlockLanguage};
use crate::error::{Error, Result};

/// On-disk form of a language: `{"k": .., "ell": .., "bitmap": "0101.."}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageFile {
    pub k: usize,
    pub ell: usize,
    pub bitmap: String,
}

impl From<&BlockLanguage> for LanguageFile {
    fn from(lang: &BlockLanguage) -> Self {
        LanguageFile {
            k: lang.k(),
            ell: lang.ell(),
            bitmap: lang.bits().to_string(),
        }
    }
}

impl TryFrom<LanguageFile> for BlockLanguage {
    type Error = Error;

    fn try_from(file: LanguageFile) -> Result<Self> {
        BlockLanguage::from_bitstring(file.k, file.ell, &file.bitmap)
    }
}

pub fn language_to_json(lang: &BlockLanguage) -> Result<String> {
    Ok(serde_json::to_string_pretty(&LanguageFile::from(lang))?)
}

pub fn language_from_json(text: &str) -> Result<BlockLanguage> {
    let file: LanguageFile = serde_json::from_str(text)?;
    file.try_into()
}

/// Reads a word list: one word per line, blank lines skipped, all words of
/// the same length. `ell` is taken from the first word.
pub fn language_from_word_list(k: usize, text: &str) -> Result<BlockLanguage> {
    let alphabet = Alphabet::new(k)?;
    let words = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| alphabet.parse(l))
        .collect::<Result<Vec<_>>>()?;
    let ell = match words.first() {
        Some(w) => w.len(),
        None => return Err(Error::Invalid("word list has no words".into())),
    };
    if let Some(w) = words.iter().find(|w| w.len() != ell) {
        return Err(Error::LengthMismatch(format!(
            "word {} has length {}, expected {ell}",
            alphabet.render(w),
            w.len()
        )));
    }
    BlockLanguage::from_words(alphabet, ell, words)
}

pub fn read_language(path: &Path) -> Result<BlockLanguage> {
    language_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_language(path: &Path, lang: &BlockLanguage) -> Result<()> {
    std::fs::write(path, language_to_json(lang)? + "\n")?;
    Ok(())
}
