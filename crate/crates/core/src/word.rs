//! Letters, finite words, Parikh vectors and morphisms.
//!
//! Letters are small integers rendered as hexadecimal digits, so a word over
//! an alphabet of size at most 16 has a one-character-per-letter textual form
//! (`0110`, `0a3f`, ...).

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Index};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, ParseError, Result};

pub const MAX_ALPHABET: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(value: u8) -> Result<Self> {
        if (value as usize) < MAX_ALPHABET {
            Ok(Letter(value))
        } else {
            Err(Error::InvalidLetter {
                letter: value,
                alphabet: MAX_ALPHABET as u8,
            })
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn to_char(self) -> char {
        letter_char(self.0)
    }

    pub fn from_char(c: char) -> Option<Self> {
        c.to_digit(16)
            .filter(|_| !c.is_ascii_uppercase())
            .map(|d| Letter(d as u8))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

fn letter_char(value: u8) -> char {
    char::from_digit(value as u32, 16).expect("letter below 16")
}

/// A finite word over an alphabet `{0, .., alphabet - 1}`.
///
/// Ordering is lexicographic on the letters (a proper prefix sorts first).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<u8>,
    alphabet: u8,
}

impl Word {
    pub fn new(letters: Vec<u8>, alphabet: usize) -> Result<Self> {
        if alphabet == 0 || alphabet > MAX_ALPHABET {
            return Err(Error::AlphabetSize(alphabet));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= alphabet) {
            return Err(Error::InvalidLetter {
                letter: bad,
                alphabet: alphabet as u8,
            });
        }
        Ok(Word {
            letters,
            alphabet: alphabet as u8,
        })
    }

    /// Builds a binary word from a bit slice; anything non-zero is a `1`.
    pub fn binary(bits: &[u8]) -> Self {
        Word {
            letters: bits.iter().map(|&b| (b != 0) as u8).collect(),
            alphabet: 2,
        }
    }

    pub fn empty(alphabet: usize) -> Result<Self> {
        Word::new(Vec::new(), alphabet)
    }

    /// Parses a word and sizes its alphabet as `max(2, largest letter + 1)`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let letters = parse_letters(text)?;
        let alphabet = letters
            .iter()
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0)
            .max(2);
        Ok(Word {
            letters,
            alphabet: alphabet as u8,
        })
    }

    /// Parses a word over a fixed alphabet.
    pub fn parse_over(text: &str, alphabet: usize) -> Result<Self> {
        let letters = parse_letters(text)?;
        Word::new(letters, alphabet)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.letters
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet as usize
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, i: usize) -> Letter {
        Letter(self.letters[i])
    }

    pub fn is_binary(&self) -> bool {
        self.alphabet <= 2
    }

    /// The factor `self[start..end]` as an owned word over the same alphabet.
    pub fn factor(&self, start: usize, end: usize) -> Word {
        Word {
            letters: self.letters[start..end].to_vec(),
            alphabet: self.alphabet,
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        self.factor(0, n.min(self.len()))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            letters,
            alphabet: self.alphabet.max(other.alphabet),
        }
    }

    /// Cyclic shift `w1 .. w(q-1) w0`, applied `k` times.
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        Word {
            letters,
            alphabet: self.alphabet,
        }
    }

    pub fn count(&self, letter: u8) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }

    pub fn parikh(&self) -> ParikhVector {
        ParikhVector::of(&self.letters, self.alphabet())
    }

    pub fn abelian_equiv(&self, other: &Word) -> bool {
        self.parikh() == other.parikh()
    }
}

fn parse_letters(text: &str) -> Result<Vec<u8>, ParseError> {
    text.char_indices()
        .map(|(offset, c)| {
            Letter::from_char(c)
                .map(Letter::value)
                .ok_or_else(|| ParseError::new(offset, format!("`{c}` is not a letter (0-9, a-f)")))
        })
        .collect()
}

impl FromStr for Word {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("ε");
        }
        let s: String = self.letters.iter().map(|&l| letter_char(l)).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let s: String = self.letters.iter().map(|&l| letter_char(l)).collect();
        serializer.serialize_str(&s)
    }
}

impl Index<usize> for Word {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.letters[i]
    }
}

/// Per-letter occurrence counts.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParikhVector {
    counts: [u32; MAX_ALPHABET],
    alphabet: u8,
}

impl ParikhVector {
    pub fn zero(alphabet: usize) -> Self {
        ParikhVector {
            counts: [0; MAX_ALPHABET],
            alphabet: alphabet as u8,
        }
    }

    pub fn of(letters: &[u8], alphabet: usize) -> Self {
        let mut v = ParikhVector::zero(alphabet);
        for &l in letters {
            v.counts[l as usize] += 1;
        }
        v
    }

    pub fn from_counts(counts: &[u32]) -> Result<Self> {
        if counts.is_empty() || counts.len() > MAX_ALPHABET {
            return Err(Error::AlphabetSize(counts.len()));
        }
        let mut v = ParikhVector::zero(counts.len());
        v.counts[..counts.len()].copy_from_slice(counts);
        Ok(v)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts[..self.alphabet as usize]
    }

    pub fn count(&self, letter: u8) -> u32 {
        self.counts[letter as usize]
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet as usize
    }

    /// Sum of the counts, i.e. the length of any word with this vector.
    pub fn total(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    #[inline]
    pub fn push(&mut self, letter: u8) {
        self.counts[letter as usize] += 1;
    }

    #[inline]
    pub fn pop(&mut self, letter: u8) {
        self.counts[letter as usize] -= 1;
    }
}

impl Add for ParikhVector {
    type Output = ParikhVector;

    fn add(mut self, rhs: ParikhVector) -> ParikhVector {
        for (a, b) in self.counts.iter_mut().zip(rhs.counts.iter()) {
            *a += b;
        }
        self.alphabet = self.alphabet.max(rhs.alphabet);
        self
    }
}

impl fmt::Display for ParikhVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.counts().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for ParikhVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Parikh{self}")
    }
}

impl Serialize for ParikhVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.counts().serialize(serializer)
    }
}

/// A morphism given by one non-empty image per letter of its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        if images.is_empty() || images.len() > MAX_ALPHABET {
            return Err(Error::AlphabetSize(images.len()));
        }
        if let Some(i) = images.iter().position(Word::is_empty) {
            return Err(Error::EmptyImage { letter: i as u8 });
        }
        Ok(Morphism { images })
    }

    pub fn identity(alphabet: usize) -> Result<Self> {
        let images = (0..alphabet as u8)
            .map(|a| Word::new(vec![a], alphabet))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(images)
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, letter: u8) -> Option<&Word> {
        self.images.get(letter as usize)
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    fn codomain_size(&self) -> usize {
        self.images.iter().map(Word::alphabet).max().unwrap_or(1)
    }

    pub fn apply(&self, u: &Word) -> Result<Word> {
        let mut letters = Vec::with_capacity(u.len() * 2);
        for &l in u.letters() {
            let image = self.image(l).ok_or(Error::InvalidLetter {
                letter: l,
                alphabet: self.images.len() as u8,
            })?;
            letters.extend_from_slice(image.letters());
        }
        Word::new(letters, self.codomain_size().max(u.alphabet()))
    }

    /// Checks that the morphism is an endomorphism prolongable on `seed`.
    pub(crate) fn check_fixed_point(&self, seed: Letter) -> Result<()> {
        for image in &self.images {
            if let Some(&l) = image
                .letters()
                .iter()
                .find(|&&l| l as usize >= self.images.len())
            {
                return Err(Error::MorphismDomain { letter: l });
            }
        }
        match self.image(seed.value()) {
            Some(img) if img.len() >= 2 && img[0] == seed.value() => Ok(()),
            _ => Err(Error::NotProlongable { seed: seed.value() }),
        }
    }
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lower mechanical word of slope `p/q`: letter `i` is
/// `floor((i+1)p/q) - floor(ip/q)`.
pub fn mechanical_word(p: usize, q: usize) -> Result<Word> {
    if p == 0 || p >= q {
        return Err(Error::InvalidSlope { p, q });
    }
    if gcd(p, q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    let letters = (0..q)
        .map(|i| ((i + 1) * p / q - i * p / q) as u8)
        .collect();
    Word::new(letters, 2)
}

/// Maximal interior runs per letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunSpectrum {
    pub per_letter: Vec<BTreeSet<usize>>,
}

impl RunSpectrum {
    pub fn of(&self, letter: u8) -> &BTreeSet<usize> {
        &self.per_letter[letter as usize]
    }
}

/// Lengths `k` such that `b a^k c` occurs with `b, c != a`. Runs touching
/// either end of `u` are skipped since their true length is unknown.
pub fn run_spectrum(u: &Word) -> RunSpectrum {
    let mut per_letter = vec![BTreeSet::new(); u.alphabet()];
    let letters = u.letters();
    let mut start = 0;
    while start < letters.len() {
        let a = letters[start];
        let mut end = start + 1;
        while end < letters.len() && letters[end] == a {
            end += 1;
        }
        if start > 0 && end < letters.len() {
            per_letter[a as usize].insert(end - start);
        }
        start = end;
    }
    RunSpectrum { per_letter }
}
