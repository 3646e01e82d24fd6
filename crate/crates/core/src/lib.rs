//! Block languages (sets of words of one fixed length) as bitmaps, their
//! minimal automata, and the state complexity of operations on them.

pub mod automata;
pub mod bench;
pub mod bitmap;
pub mod bits;
pub mod error;
pub mod io;
pub mod ops;
pub mod synthesis;
pub mod witnesses;

pub use automata::{GeneralDfa, GeneralNfa, RankedAutomaton, RankedDfa, RankedNfa, WidthProfile};
pub use bitmap::{Alphabet, BlockLanguage, FactorSets, Symbol, Word};
pub use bits::{BitSlice, BitVec};
pub use error::{Error, Result};
pub use synthesis::{measure, min_dfa_from_bitmap, min_nfa_from_bitmap, ComplexityReport, Cover, CoverOptions};
