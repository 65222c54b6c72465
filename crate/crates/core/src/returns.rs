//! Occurrence scanning, return words and abelian return words.
//!
//! All scans are over a finite prefix of an infinite word. The trailing
//! segment after the last occurrence is never reported as a return.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::source::WordSource;
use crate::word::{ParikhVector, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Exact,
    Abelian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Occurrence {
    pub position: usize,
    pub length: usize,
}

/// An abelian class, identified by its Parikh vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassId {
    pub length: usize,
    pub vector: ParikhVector,
}

impl ClassId {
    pub fn of(word: &Word) -> Self {
        ClassId {
            length: word.len(),
            vector: word.parikh(),
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vector)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnClass {
    #[serde(flatten)]
    pub id: ClassId,
    /// Lexicographically least return observed in this class.
    pub representative: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnSet {
    pub target: ClassId,
    /// Sorted by (length, representative).
    pub classes: Vec<ReturnClass>,
    /// Number of abelian occurrences of the target class in the scanned prefix.
    pub occurrences: usize,
}

impl ReturnSet {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_ids(&self) -> BTreeSet<ClassId> {
        self.classes.iter().map(|c| c.id).collect()
    }

    pub fn representatives(&self) -> Vec<&Word> {
        self.classes.iter().map(|c| &c.representative).collect()
    }
}

/// Which window a return is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `w[n_i .. n_{i+1}]`: from one occurrence to the start of the next.
    Left,
    /// `w[n_i + |v| .. n_{i+1} + |v|]`: from the end of one occurrence to the end of the next.
    Right,
}

/// Start positions of windows whose Parikh vector equals `target`.
///
/// Keeps a count of letters where the window and the target disagree so each
/// step costs O(1).
fn abelian_positions(letters: &[u8], target: &ParikhVector) -> Vec<usize> {
    let n = target.total();
    if n == 0 || n > letters.len() {
        return Vec::new();
    }
    let mut diff = [0i64; crate::word::MAX_ALPHABET];
    for (d, &c) in diff.iter_mut().zip(target.counts()) {
        *d = -(c as i64);
    }
    for &l in &letters[..n] {
        diff[l as usize] += 1;
    }
    let mut mismatched = diff.iter().filter(|&&d| d != 0).count();
    let mut out = Vec::new();
    if mismatched == 0 {
        out.push(0);
    }
    for i in n..letters.len() {
        let (enter, leave) = (letters[i] as usize, letters[i - n] as usize);
        if enter != leave {
            for (slot, delta) in [(enter, 1i64), (leave, -1i64)] {
                let before = diff[slot] != 0;
                diff[slot] += delta;
                let after = diff[slot] != 0;
                match (before, after) {
                    (true, false) => mismatched -= 1,
                    (false, true) => mismatched += 1,
                    _ => {}
                }
            }
        }
        if mismatched == 0 {
            out.push(i + 1 - n);
        }
    }
    out
}

fn exact_positions(letters: &[u8], target: &[u8]) -> Vec<usize> {
    if target.is_empty() || target.len() > letters.len() {
        return Vec::new();
    }
    letters
        .windows(target.len())
        .enumerate()
        .filter(|(_, w)| *w == target)
        .map(|(i, _)| i)
        .collect()
}

pub fn occurrences(prefix: &Word, target: &Word, mode: MatchMode) -> Result<Vec<Occurrence>> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let positions = match mode {
        MatchMode::Exact => exact_positions(prefix.letters(), target.letters()),
        MatchMode::Abelian => abelian_positions(prefix.letters(), &target.parikh()),
    };
    Ok(positions
        .into_iter()
        .map(|position| Occurrence {
            position,
            length: target.len(),
        })
        .collect())
}

/// Classical return words of `v`: segments between consecutive exact occurrences.
pub fn return_words(prefix: &Word, v: &Word) -> Result<BTreeSet<Word>> {
    if v.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let positions = exact_positions(prefix.letters(), v.letters());
    if positions.len() < 2 {
        return Err(Error::InsufficientOccurrences {
            found: positions.len(),
        });
    }
    Ok(positions
        .windows(2)
        .map(|p| prefix.factor(p[0], p[1]))
        .collect())
}

/// Index ranges of the abelian returns of the class of `v`, in prefix order.
pub fn return_segments(prefix: &Word, v: &Word, side: Side) -> Result<Vec<Range<usize>>> {
    if v.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let positions = abelian_positions(prefix.letters(), &v.parikh());
    if positions.len() < 2 {
        return Err(Error::InsufficientOccurrences {
            found: positions.len(),
        });
    }
    let shift = match side {
        Side::Left => 0,
        Side::Right => v.len(),
    };
    Ok(positions
        .windows(2)
        .map(|p| p[0] + shift..p[1] + shift)
        .collect())
}

fn group_returns(prefix: &Word, v: &Word, side: Side) -> Result<ReturnSet> {
    let segments = return_segments(prefix, v, side)?;
    let letters = prefix.letters();
    let alphabet = prefix.alphabet().max(v.alphabet());
    let mut least: HashMap<ParikhVector, Range<usize>> = HashMap::new();
    for seg in &segments {
        let vector = ParikhVector::of(&letters[seg.clone()], alphabet);
        least
            .entry(vector)
            .and_modify(|best| {
                if letters[seg.clone()] < letters[best.clone()] {
                    *best = seg.clone();
                }
            })
            .or_insert_with(|| seg.clone());
    }
    let mut classes: Vec<ReturnClass> = least
        .into_iter()
        .map(|(vector, seg)| ReturnClass {
            id: ClassId {
                length: seg.len(),
                vector,
            },
            representative: prefix.factor(seg.start, seg.end),
        })
        .collect();
    classes.sort_by(|a, b| (a.id.length, &a.representative).cmp(&(b.id.length, &b.representative)));
    Ok(ReturnSet {
        target: ClassId {
            length: v.len(),
            vector: ParikhVector::of(v.letters(), alphabet),
        },
        classes,
        occurrences: segments.len() + 1,
    })
}

/// Abelian returns of the class of `v`, grouped into abelian classes.
pub fn abelian_returns(prefix: &Word, v: &Word) -> Result<ReturnSet> {
    group_returns(prefix, v, Side::Left)
}

/// Abelian returns "to the right": the segment after an occurrence up to the
/// end of the next occurrence.
pub fn right_abelian_returns(prefix: &Word, v: &Word) -> Result<ReturnSet> {
    group_returns(prefix, v, Side::Right)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StabilizationPolicy {
    pub initial: usize,
    pub growth: usize,
    #[serde(rename = "cap")]
    pub max: usize,
}

impl Default for StabilizationPolicy {
    fn default() -> Self {
        StabilizationPolicy {
            initial: 4096,
            growth: 2,
            max: 1 << 20,
        }
    }
}

impl StabilizationPolicy {
    pub fn new(initial: usize, growth: usize, max: usize) -> Result<Self> {
        let p = StabilizationPolicy {
            initial,
            growth,
            max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial == 0 {
            return Err(Error::Policy(
                "initial prefix length must be positive".into(),
            ));
        }
        if self.growth < 2 {
            return Err(Error::Policy("growth factor must be at least 2".into()));
        }
        if self.max < self.initial {
            return Err(Error::Policy(
                "cap must be at least the initial length".into(),
            ));
        }
        Ok(())
    }

    /// Prefix lengths tried for a factor of length `factor_len`: starting at
    /// `max(initial, 64 * factor_len)`, multiplied by `growth`, ending at `max`.
    pub fn schedule(&self, factor_len: usize) -> Vec<usize> {
        let mut len = self.initial.max(64 * factor_len).min(self.max);
        let mut out = vec![len];
        while len < self.max {
            len = len.saturating_mul(self.growth).min(self.max);
            out.push(len);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilizationReport {
    pub prefix_used: usize,
    pub stable: bool,
    /// (prefix length, number of return classes); 0 when the class did not recur.
    pub history: Vec<(usize, usize)>,
}

/// Abelian returns of `v` over growing prefixes of `word`, stopping once two
/// consecutive prefixes give the same set of classes.
pub fn stabilize(
    word: &Word,
    v: &Word,
    policy: &StabilizationPolicy,
    side: Side,
) -> Result<(ReturnSet, StabilizationReport)> {
    policy.validate()?;
    if v.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let mut history = Vec::new();
    let mut last: Option<ReturnSet> = None;
    let mut stable = false;
    let mut used = 0;
    for len in policy.schedule(v.len()) {
        let len = len.min(word.len());
        if used == len && used > 0 {
            break;
        }
        used = len;
        let prefix = word.prefix(len);
        match group_returns(&prefix, v, side) {
            Ok(set) => {
                history.push((len, set.len()));
                let same = last
                    .as_ref()
                    .is_some_and(|prev| prev.class_ids() == set.class_ids());
                last = Some(set);
                if same {
                    stable = true;
                    break;
                }
            }
            Err(Error::InsufficientOccurrences { .. }) => history.push((len, 0)),
            Err(e) => return Err(e),
        }
    }
    match last {
        Some(set) => Ok((
            set,
            StabilizationReport {
                prefix_used: used,
                stable,
                history,
            },
        )),
        None => Err(Error::NeverRecurs { max_prefix: used }),
    }
}

/// Stabilized abelian returns of `v` in the word described by `source`.
pub fn stabilized_abelian_returns(
    source: &WordSource,
    v: &Word,
    policy: &StabilizationPolicy,
) -> Result<(ReturnSet, StabilizationReport)> {
    policy.validate()?;
    let word = source.prefix(policy.max)?;
    stabilize(&word, v, policy, Side::Left)
}

/// The sequence of abelian classes of consecutive length-`n` windows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianTrace {
    pub n: usize,
    pub ids: Vec<ClassId>,
}

impl AbelianTrace {
    pub fn distinct(&self) -> BTreeSet<ClassId> {
        self.ids.iter().copied().collect()
    }

    /// True when `id` occurs but never at two adjacent positions.
    pub fn is_isolated(&self, id: &ClassId) -> bool {
        self.ids.contains(id) && !self.ids.windows(2).any(|w| w[0] == *id && w[1] == *id)
    }
}

pub fn abelian_trace(prefix: &Word, n: usize) -> Result<AbelianTrace> {
    if n == 0 || n > prefix.len() {
        return Err(Error::LengthOutOfRange {
            n,
            len: prefix.len(),
        });
    }
    let letters = prefix.letters();
    let mut window = ParikhVector::of(&letters[..n], prefix.alphabet());
    let mut ids = Vec::with_capacity(letters.len() - n + 1);
    ids.push(ClassId {
        length: n,
        vector: window,
    });
    for i in n..letters.len() {
        window.push(letters[i]);
        window.pop(letters[i - n]);
        ids.push(ClassId {
            length: n,
            vector: window,
        });
    }
    Ok(AbelianTrace { n, ids })
}
