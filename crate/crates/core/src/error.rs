use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure to parse a word or a source descriptor. `offset` is a byte offset
/// into the input text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn shifted(mut self, by: usize) -> Self {
        self.offset += by;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("letter {letter} is outside an alphabet of size {alphabet}")]
    InvalidLetter { letter: u8, alphabet: u8 },

    #[error("alphabet size {0} is outside 1..=16")]
    AlphabetSize(usize),

    #[error("periodic source needs a non-empty period")]
    EmptyPeriod,

    #[error("morphism image of letter {letter} is empty")]
    EmptyImage { letter: u8 },

    #[error("morphism image uses letter {letter} which has no image of its own")]
    MorphismDomain { letter: u8 },

    #[error("morphism is not prolongable on seed {seed}")]
    NotProlongable { seed: u8 },

    #[error("choice source needs at least one non-empty piece")]
    EmptyPieces,

    #[error("selector alphabet has size {selector} but there are {pieces} pieces")]
    SelectorAlphabet { pieces: usize, selector: usize },

    #[error("partial quotients must be positive")]
    ZeroQuotient,

    #[error("continued fraction has no partial quotient at index {index}; end the list with `...` to repeat the last term")]
    QuotientsExhausted { index: usize },

    #[error("slope {p}/{q} needs 1 <= p < q")]
    InvalidSlope { p: usize, q: usize },

    #[error("gcd({p}, {q}) != 1")]
    NotCoprime { p: usize, q: usize },

    #[error("orbit degenerate: word of length {length} with {ones} ones")]
    OrbitDegenerate { ones: usize, length: usize },

    #[error("operation needs a binary word")]
    NotBinary,

    #[error("target word is empty")]
    EmptyTarget,

    #[error("insufficient occurrences: found {found}, need at least 2")]
    InsufficientOccurrences { found: usize },

    #[error("class never recurs within a prefix of length {max_prefix}")]
    NeverRecurs { max_prefix: usize },

    #[error("factor length {n} outside 1..={len}")]
    LengthOutOfRange { n: usize, len: usize },

    #[error("invalid stabilization policy: {0}")]
    Policy(String),
}
