//! Finite descriptions of infinite words and their textual descriptors.
//!
//! Descriptor grammar (letters are hex digits):
//!
//! ```text
//! periodic:<word>
//! morphic:<letter>><word>,<letter>><word>,...:seed=<letter>
//! cf:<int>,<int>,...[,...]
//! choice:<word>|<word>|...:selector=<descriptor>
//! ```
//!
//! A `cf` list ending in `...` (or `…`) repeats its last partial quotient
//! forever. Without it the list is finite and generation fails once the
//! quotients run out.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, ParseError, Result};
use crate::word::{Letter, Morphism, Word};

/// Partial quotients `d1, d2, ...` driving the standard-word recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialQuotients {
    terms: Vec<u32>,
    repeat_last: bool,
}

impl PartialQuotients {
    pub fn new(terms: Vec<u32>, repeat_last: bool) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::QuotientsExhausted { index: 0 });
        }
        if terms.contains(&0) {
            return Err(Error::ZeroQuotient);
        }
        Ok(PartialQuotients { terms, repeat_last })
    }

    /// All ones: the Fibonacci word.
    pub fn golden() -> Self {
        PartialQuotients {
            terms: vec![1],
            repeat_last: true,
        }
    }

    pub fn terms(&self) -> &[u32] {
        &self.terms
    }

    pub fn repeats_last(&self) -> bool {
        self.repeat_last
    }

    pub fn get(&self, index: usize) -> Option<u32> {
        match self.terms.get(index) {
            Some(&d) => Some(d),
            None if self.repeat_last => self.terms.last().copied(),
            None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordSource {
    Periodic(Word),
    Morphic {
        morphism: Morphism,
        seed: Letter,
    },
    /// Characteristic Sturmian word given by its partial quotients.
    Sturmian(PartialQuotients),
    /// Concatenation `pieces[s0] pieces[s1] ...` where `s` is the selector word.
    Choice {
        pieces: Vec<Word>,
        selector: Box<WordSource>,
    },
}

impl WordSource {
    pub fn fibonacci() -> Self {
        WordSource::Sturmian(PartialQuotients::golden())
    }

    pub fn thue_morse() -> Self {
        let images = vec![Word::binary(&[0, 1]), Word::binary(&[1, 0])];
        WordSource::Morphic {
            morphism: Morphism::new(images).expect("valid images"),
            seed: Letter::new(0).expect("valid letter"),
        }
    }

    pub fn periodic(period: &str) -> Result<Self> {
        Ok(WordSource::Periodic(Word::parse(period)?))
    }

    pub fn alphabet(&self) -> usize {
        match self {
            WordSource::Periodic(p) => p.alphabet(),
            WordSource::Morphic { morphism, .. } => morphism.domain_size().max(2),
            WordSource::Sturmian(_) => 2,
            WordSource::Choice { pieces, .. } => {
                pieces.iter().map(Word::alphabet).max().unwrap_or(2)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WordSource::Periodic(p) if p.is_empty() => Err(Error::EmptyPeriod),
            WordSource::Periodic(_) => Ok(()),
            WordSource::Morphic { morphism, seed } => morphism.check_fixed_point(*seed),
            WordSource::Sturmian(q) => {
                if q.terms.is_empty() {
                    Err(Error::QuotientsExhausted { index: 0 })
                } else if q.terms.contains(&0) {
                    Err(Error::ZeroQuotient)
                } else {
                    Ok(())
                }
            }
            WordSource::Choice { pieces, selector } => {
                if pieces.is_empty() || pieces.iter().any(Word::is_empty) {
                    return Err(Error::EmptyPieces);
                }
                selector.validate()?;
                if selector.alphabet() != pieces.len() {
                    return Err(Error::SelectorAlphabet {
                        pieces: pieces.len(),
                        selector: selector.alphabet(),
                    });
                }
                Ok(())
            }
        }
    }

    /// The first `n` letters of the described infinite word.
    pub fn prefix(&self, n: usize) -> Result<Word> {
        self.validate()?;
        let alphabet = self.alphabet();
        let letters = match self {
            WordSource::Periodic(p) => p.letters().iter().copied().cycle().take(n).collect(),
            WordSource::Morphic { morphism, seed } => morphic_prefix(morphism, *seed, n),
            WordSource::Sturmian(q) => standard_prefix(q, n)?,
            WordSource::Choice { pieces, selector } => {
                let shortest = pieces.iter().map(Word::len).min().unwrap_or(1);
                let selection = selector.prefix(n.div_ceil(shortest))?;
                let mut letters = Vec::with_capacity(n + shortest);
                for &s in selection.letters() {
                    if letters.len() >= n {
                        break;
                    }
                    letters.extend_from_slice(pieces[s as usize].letters());
                }
                letters.truncate(n);
                letters
            }
        };
        Word::new(letters, alphabet)
    }
}

/// Fixed point built in place: the buffer starts as the seed image and the
/// image of letter `i` is appended for `i = 1, 2, ...`.
fn morphic_prefix(morphism: &Morphism, seed: Letter, n: usize) -> Vec<u8> {
    let mut out = morphism.images()[seed.index()].letters().to_vec();
    let mut i = 1;
    while out.len() < n {
        let image = morphism.images()[out[i] as usize].letters();
        out.extend_from_slice(image);
        i += 1;
    }
    out.truncate(n);
    out
}

/// Standard words `t(-1) = 1`, `t(0) = 0`, `t(k) = t(k-1)^d(k) t(k-2)`; each
/// `t(k)` with `k >= 1` is a prefix of the next one.
fn standard_prefix(quotients: &PartialQuotients, n: usize) -> Result<Vec<u8>> {
    let mut older = vec![1u8];
    let mut newer = vec![0u8];
    let mut index = 0;
    while newer.len() < n || index == 0 {
        let d = quotients
            .get(index)
            .ok_or(Error::QuotientsExhausted { index })?;
        let mut next = Vec::with_capacity(newer.len() * d as usize + older.len());
        for _ in 0..d {
            next.extend_from_slice(&newer);
        }
        next.extend_from_slice(&older);
        older = std::mem::replace(&mut newer, next);
        index += 1;
    }
    newer.truncate(n);
    Ok(newer)
}

impl fmt::Display for WordSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordSource::Periodic(p) => write!(f, "periodic:{p}"),
            WordSource::Morphic { morphism, seed } => {
                f.write_str("morphic:")?;
                for (a, image) in morphism.images().iter().enumerate() {
                    if a > 0 {
                        f.write_str(",")?;
                    }
                    write!(
                        f,
                        "{}>{image}",
                        Letter::new(a as u8).map_err(|_| fmt::Error)?
                    )?;
                }
                write!(f, ":seed={seed}")
            }
            WordSource::Sturmian(q) => {
                f.write_str("cf:")?;
                let terms: Vec<String> = q.terms.iter().map(u32::to_string).collect();
                f.write_str(&terms.join(","))?;
                if q.repeat_last {
                    f.write_str(",...")?;
                }
                Ok(())
            }
            WordSource::Choice { pieces, selector } => {
                f.write_str("choice:")?;
                let pieces: Vec<String> = pieces.iter().map(Word::to_string).collect();
                write!(f, "{}:selector={selector}", pieces.join("|"))
            }
        }
    }
}

impl FromStr for WordSource {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_source(s)
    }
}

fn parse_source(text: &str) -> Result<WordSource, ParseError> {
    let Some(colon) = text.find(':') else {
        return Err(ParseError::new(0, "expected `<kind>:`"));
    };
    let body_at = colon + 1;
    let body = &text[body_at..];
    match &text[..colon] {
        "periodic" => {
            if body.is_empty() {
                return Err(ParseError::new(body_at, "empty period"));
            }
            let period = Word::parse(body).map_err(|e| e.shifted(body_at))?;
            Ok(WordSource::Periodic(period))
        }
        "morphic" => parse_morphic(body).map_err(|e| e.shifted(body_at)),
        "cf" => parse_cf(body).map_err(|e| e.shifted(body_at)),
        "choice" => parse_choice(body).map_err(|e| e.shifted(body_at)),
        other => Err(ParseError::new(
            0,
            format!("unknown source kind `{other}` (periodic, morphic, cf, choice)"),
        )),
    }
}

/// Splits `text` on `sep`, yielding each item with its byte offset.
fn split_offsets<'a>(text: &'a str, sep: char) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    let mut offset = 0;
    text.split(sep).map(move |item| {
        let at = offset;
        offset += item.len() + sep.len_utf8();
        (at, item)
    })
}

fn parse_letter(text: &str, at: usize) -> Result<Letter, ParseError> {
    let mut chars = text.chars();
    match (chars.next().and_then(Letter::from_char), chars.next()) {
        (Some(l), None) => Ok(l),
        _ => Err(ParseError::new(
            at,
            format!("expected a single letter, found `{text}`"),
        )),
    }
}

fn parse_morphic(body: &str) -> Result<WordSource, ParseError> {
    let seed_key = ":seed=";
    let Some(seed_at) = body.find(seed_key) else {
        return Err(ParseError::new(body.len(), "expected `:seed=<letter>`"));
    };
    let seed = parse_letter(&body[seed_at + seed_key.len()..], seed_at + seed_key.len())?;

    let mut rules: Vec<Option<Word>> = Vec::new();
    for (at, rule) in split_offsets(&body[..seed_at], ',') {
        let Some(arrow) = rule.find('>') else {
            return Err(ParseError::new(at, "expected `<letter>><image>`"));
        };
        let letter = parse_letter(&rule[..arrow], at)?;
        let image_at = at + arrow + 1;
        let image_text = &rule[arrow + 1..];
        if image_text.is_empty() {
            return Err(ParseError::new(image_at, "empty image"));
        }
        let image = Word::parse(image_text).map_err(|e| e.shifted(image_at))?;
        let slot = letter.index();
        if rules.len() <= slot {
            rules.resize(slot + 1, None);
        }
        if rules[slot].replace(image).is_some() {
            return Err(ParseError::new(
                at,
                format!("letter {letter} has two images"),
            ));
        }
    }
    let domain = rules.len().max(2);
    let mut images = Vec::with_capacity(domain);
    for (a, image) in rules.into_iter().enumerate() {
        let image =
            image.ok_or_else(|| ParseError::new(0, format!("letter {a:x} has no image")))?;
        images.push(image);
    }
    if images.len() < domain {
        return Err(ParseError::new(
            0,
            format!("letter {:x} has no image", images.len()),
        ));
    }
    let alphabet = images
        .iter()
        .map(Word::alphabet)
        .max()
        .unwrap_or(2)
        .max(domain);
    let images = images
        .into_iter()
        .map(|w| Word::new(w.into_letters(), alphabet))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ParseError::new(0, e.to_string()))?;
    let morphism = Morphism::new(images).map_err(|e| ParseError::new(0, e.to_string()))?;
    Ok(WordSource::Morphic { morphism, seed })
}

fn parse_cf(body: &str) -> Result<WordSource, ParseError> {
    let mut terms = Vec::new();
    let mut repeat_last = false;
    for (at, item) in split_offsets(body, ',') {
        if repeat_last {
            return Err(ParseError::new(at, "nothing may follow `...`"));
        }
        match item.trim() {
            "..." | "…" => repeat_last = true,
            t => {
                let d: u32 = t
                    .parse()
                    .map_err(|_| ParseError::new(at, format!("`{t}` is not a positive integer")))?;
                if d == 0 {
                    return Err(ParseError::new(at, "partial quotients must be positive"));
                }
                terms.push(d);
            }
        }
    }
    if terms.is_empty() {
        return Err(ParseError::new(0, "expected at least one partial quotient"));
    }
    Ok(WordSource::Sturmian(PartialQuotients {
        terms,
        repeat_last,
    }))
}

fn parse_choice(body: &str) -> Result<WordSource, ParseError> {
    let key = ":selector=";
    let Some(sel_at) = body.find(key) else {
        return Err(ParseError::new(body.len(), "expected `:selector=<source>`"));
    };
    let mut pieces = Vec::new();
    for (at, piece) in split_offsets(&body[..sel_at], '|') {
        if piece.is_empty() {
            return Err(ParseError::new(at, "empty piece"));
        }
        pieces.push(Word::parse(piece).map_err(|e| e.shifted(at))?);
    }
    let alphabet = pieces.iter().map(Word::alphabet).max().unwrap_or(2);
    let pieces = pieces
        .into_iter()
        .map(|w| Word::new(w.into_letters(), alphabet).expect("letters fit the widest alphabet"))
        .collect();
    let selector_at = sel_at + key.len();
    let selector = parse_source(&body[selector_at..]).map_err(|e| e.shifted(selector_at))?;
    Ok(WordSource::Choice {
        pieces,
        selector: Box::new(selector),
    })
}
