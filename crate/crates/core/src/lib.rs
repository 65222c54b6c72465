//! Return words and abelian return words of infinite words.
//!
//! The crate generates prefixes of infinite words (periodic, morphic,
//! characteristic Sturmian, choice sequences), scans them for classical and
//! abelian returns, builds lexicographic arrays of balanced orbits, and runs
//! finite-prefix checks of statements relating Sturmian words, balance and
//! the number of abelian returns.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod lexarray;
pub mod report;
pub mod returns;
pub mod source;
pub mod word;

pub use error::{Error, ParseError, Result};
pub use returns::{ClassId, ReturnSet, StabilizationPolicy};
pub use source::WordSource;
pub use word::{Letter, Morphism, ParikhVector, Word};
