//! Factor combinatorics on prefixes and the statement verifiers.
//!
//! Every check works on a finite prefix. A class whose abelian returns did not
//! stabilize within the policy budget is reported as a caveat and never as a
//! violation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::returns::{
    stabilize, ClassId, ReturnSet, Side, StabilizationPolicy, StabilizationReport,
};
use crate::source::WordSource;
use crate::word::{run_spectrum, ParikhVector, RunSpectrum, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorSet {
    pub n: usize,
    pub members: BTreeSet<Word>,
}

impl FactorSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.members.contains(w)
    }
}

fn check_length(prefix: &Word, n: usize) -> Result<()> {
    if n == 0 || n > prefix.len() {
        return Err(Error::LengthOutOfRange {
            n,
            len: prefix.len(),
        });
    }
    Ok(())
}

fn distinct_windows(letters: &[u8], n: usize) -> HashSet<&[u8]> {
    letters.windows(n).collect()
}

pub fn factors(prefix: &Word, n: usize) -> Result<FactorSet> {
    check_length(prefix, n)?;
    let alphabet = prefix.alphabet();
    let members = distinct_windows(prefix.letters(), n)
        .into_iter()
        .map(|f| Word::new(f.to_vec(), alphabet).expect("factor of a valid word"))
        .collect();
    Ok(FactorSet { n, members })
}

pub fn subword_complexity(prefix: &Word, n: usize) -> Result<usize> {
    check_length(prefix, n)?;
    Ok(distinct_windows(prefix.letters(), n).len())
}

/// Distinct factors of length `n` grouped by Parikh vector.
pub fn factor_classes(prefix: &Word, n: usize) -> Result<BTreeMap<ClassId, BTreeSet<Word>>> {
    let set = factors(prefix, n)?;
    let mut classes: BTreeMap<ClassId, BTreeSet<Word>> = BTreeMap::new();
    for f in set.members {
        classes.entry(ClassId::of(&f)).or_default().insert(f);
    }
    Ok(classes)
}

pub fn abelian_complexity(prefix: &Word, n: usize) -> Result<usize> {
    check_length(prefix, n)?;
    let alphabet = prefix.alphabet();
    let vectors: HashSet<ParikhVector> = prefix
        .letters()
        .windows(n)
        .map(|f| ParikhVector::of(f, alphabet))
        .collect();
    Ok(vectors.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialFactors {
    pub right: FactorSet,
    pub left: FactorSet,
    pub bispecial: FactorSet,
}

/// Right (left) special factors: at least two distinct letters follow
/// (precede) their occurrences inside the prefix.
pub fn special_factors(prefix: &Word, n: usize) -> Result<SpecialFactors> {
    if n == 0 || n + 1 > prefix.len() {
        return Err(Error::LengthOutOfRange {
            n,
            len: prefix.len().saturating_sub(1),
        });
    }
    let letters = prefix.letters();
    let mut right: HashMap<&[u8], u16> = HashMap::new();
    let mut left: HashMap<&[u8], u16> = HashMap::new();
    for i in 0..=letters.len() - n {
        let f = &letters[i..i + n];
        if let Some(&next) = letters.get(i + n) {
            *right.entry(f).or_default() |= 1 << next;
        }
        if i > 0 {
            *left.entry(f).or_default() |= 1 << letters[i - 1];
        }
    }
    let alphabet = prefix.alphabet();
    let special = |ext: HashMap<&[u8], u16>| -> FactorSet {
        let members = ext
            .into_iter()
            .filter(|(_, mask)| mask.count_ones() >= 2)
            .map(|(f, _)| Word::new(f.to_vec(), alphabet).expect("factor of a valid word"))
            .collect();
        FactorSet { n, members }
    };
    let right = special(right);
    let left = special(left);
    let bispecial = FactorSet {
        n,
        members: right.members.intersection(&left.members).cloned().collect(),
    };
    Ok(SpecialFactors {
        right,
        left,
        bispecial,
    })
}

/// Whether `b` is bispecial in `prefix`. The empty word counts as bispecial
/// as soon as two distinct letters occur.
pub fn is_bispecial(prefix: &Word, b: &Word) -> bool {
    let letters = prefix.letters();
    if b.is_empty() {
        let seen: BTreeSet<u8> = letters.iter().copied().collect();
        return seen.len() >= 2;
    }
    let n = b.len();
    if n >= letters.len() {
        return false;
    }
    let (mut left, mut right) = (0u16, 0u16);
    let first = b[0];
    for i in 0..=letters.len() - n {
        if letters[i] != first || &letters[i..i + n] != b.letters() {
            continue;
        }
        if i > 0 {
            left |= 1 << letters[i - 1];
        }
        if let Some(&next) = letters.get(i + n) {
            right |= 1 << next;
        }
        if left.count_ones() >= 2 && right.count_ones() >= 2 {
            return true;
        }
    }
    false
}

/// A singular factor with its `aBa` decomposition when it has one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularFactor {
    pub word: Word,
    pub decomposition: Option<Decomposition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub letter: Word,
    pub middle: Word,
}

/// Factors that are alone in their abelian class among factors of length `n`.
pub fn singular_factors(prefix: &Word, n: usize) -> Result<Vec<SingularFactor>> {
    let classes = factor_classes(prefix, n)?;
    let mut out: Vec<SingularFactor> = classes
        .into_values()
        .filter(|members| members.len() == 1)
        .flat_map(|members| members.into_iter())
        .map(|word| {
            let decomposition =
                (word.len() >= 2 && word[0] == word[word.len() - 1]).then(|| Decomposition {
                    letter: word.factor(0, 1),
                    middle: word.factor(1, word.len() - 1),
                });
            SingularFactor {
                word,
                decomposition,
            }
        })
        .collect();
    out.sort_by(|a, b| a.word.cmp(&b.word));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReturnShape {
    Letter {
        letter: Word,
    },
    /// `a B b` with `a != b` and `B` bispecial.
    #[serde(rename = "aBb")]
    ABb {
        a: Word,
        middle: Word,
        b: Word,
    },
    Other,
}

pub fn classify_return_shape(r: &Word, prefix: &Word) -> ReturnShape {
    ShapeClassifier::new(prefix).classify(r)
}

/// Return-shape classification with a memo of bispecial checks.
pub struct ShapeClassifier<'a> {
    prefix: &'a Word,
    bispecial: HashMap<Word, bool>,
}

impl<'a> ShapeClassifier<'a> {
    pub fn new(prefix: &'a Word) -> Self {
        ShapeClassifier {
            prefix,
            bispecial: HashMap::new(),
        }
    }

    pub fn classify(&mut self, r: &Word) -> ReturnShape {
        match r.len() {
            0 => ReturnShape::Other,
            1 => ReturnShape::Letter { letter: r.clone() },
            len => {
                if r[0] == r[len - 1] {
                    return ReturnShape::Other;
                }
                let middle = r.factor(1, len - 1);
                let prefix = self.prefix;
                let ok = *self
                    .bispecial
                    .entry(middle.clone())
                    .or_insert_with(|| is_bispecial(prefix, &middle));
                if ok {
                    ReturnShape::ABb {
                        a: r.factor(0, 1),
                        middle,
                        b: r.factor(len - 1, len),
                    }
                } else {
                    ReturnShape::Other
                }
            }
        }
    }
}

/// Least period `T` of the whole prefix, if `3T <= |prefix|`.
pub fn detect_period(prefix: &Word) -> Option<usize> {
    let s = prefix.letters();
    let n = s.len();
    if n == 0 {
        return None;
    }
    // prefix function
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && s[i] != s[k] {
            k = pi[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let period = n - pi[n - 1];
    (3 * period <= n).then_some(period)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunClassification {
    pub per_letter: RunSpectrum,
    /// A letter `a` such that `aa` never occurs; `1` is preferred when both are.
    pub isolated_letter: Option<Word>,
}

pub fn classify_runs(prefix: &Word) -> RunClassification {
    let per_letter = run_spectrum(prefix);
    let isolated = |a: u8| {
        prefix.letters().contains(&a)
            && !prefix.letters().windows(2).any(|p| p[0] == a && p[1] == a)
    };
    let isolated_letter = (0..prefix.alphabet() as u8)
        .rev()
        .find(|&a| isolated(a))
        .map(|a| Word::new(vec![a], prefix.alphabet()).expect("letter in alphabet"));
    RunClassification {
        per_letter,
        isolated_letter,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LengthRange {
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub length: usize,
    pub factor: Word,
    pub observed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Caveat {
    pub length: usize,
    pub factor: Word,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub theorem: String,
    pub holds: bool,
    pub checked_lengths: LengthRange,
    pub witnesses: Vec<Witness>,
    pub caveats: Vec<Caveat>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(
        theorem: &str,
        checked_lengths: LengthRange,
        mut witnesses: Vec<Witness>,
        mut caveats: Vec<Caveat>,
        notes: Vec<String>,
    ) -> Self {
        witnesses.sort_by(|a, b| {
            (a.length, &a.factor, &a.observed).cmp(&(b.length, &b.factor, &b.observed))
        });
        caveats.sort_by(|a, b| {
            (a.length, &a.factor, &a.reason).cmp(&(b.length, &b.factor, &b.reason))
        });
        Verdict {
            theorem: theorem.to_string(),
            holds: witnesses.is_empty(),
            checked_lengths,
            witnesses,
            caveats,
            notes,
        }
    }

    pub fn smallest_witness_length(&self) -> Option<usize> {
        self.witnesses.iter().map(|w| w.length).min()
    }
}

/// Stabilized abelian returns of one abelian class of factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassSurvey {
    pub id: ClassId,
    /// Distinct factors in the class, in increasing order.
    pub members: Vec<Word>,
    pub returns: Option<ReturnSet>,
    pub stabilization: Option<StabilizationReport>,
    pub error: Option<String>,
}

impl ClassSurvey {
    pub fn representative(&self) -> &Word {
        &self.members[0]
    }

    pub fn is_singular(&self) -> bool {
        self.members.len() == 1
    }

    /// The return set when it stabilized.
    pub fn stable_returns(&self) -> Option<&ReturnSet> {
        match (&self.returns, &self.stabilization) {
            (Some(set), Some(report)) if report.stable => Some(set),
            _ => None,
        }
    }

    fn caveat(&self) -> Option<Caveat> {
        let reason = match (&self.error, &self.stabilization) {
            (Some(e), _) => e.clone(),
            (None, Some(r)) if !r.stable => {
                format!("returns did not stabilize by prefix {}", r.prefix_used)
            }
            _ => return None,
        };
        Some(Caveat {
            length: self.id.length,
            factor: self.representative().clone(),
            reason,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthSurvey {
    pub n: usize,
    pub classes: Vec<ClassSurvey>,
}

/// Every abelian class of factors of lengths `1..=max_len` found in `word`,
/// with stabilized abelian returns. Lengths are processed in parallel.
pub fn survey(
    word: &Word,
    max_len: usize,
    policy: &StabilizationPolicy,
) -> Result<Vec<LengthSurvey>> {
    policy.validate()?;
    if max_len == 0 || max_len > word.len() {
        return Err(Error::LengthOutOfRange {
            n: max_len,
            len: word.len(),
        });
    }
    (1..=max_len)
        .into_par_iter()
        .map(|n| {
            let classes = factor_classes(word, n)?
                .into_iter()
                .map(|(id, members)| {
                    let members: Vec<Word> = members.into_iter().collect();
                    let (returns, stabilization, error) =
                        match stabilize(word, &members[0], policy, Side::Left) {
                            Ok((set, report)) => (Some(set), Some(report), None),
                            Err(e) => (None, None, Some(e.to_string())),
                        };
                    ClassSurvey {
                        id,
                        members,
                        returns,
                        stabilization,
                        error,
                    }
                })
                .collect();
            Ok(LengthSurvey { n, classes })
        })
        .collect()
}

fn describe(set: &ReturnSet) -> String {
    let reps: Vec<String> = set
        .classes
        .iter()
        .map(|c| c.representative.to_string())
        .collect();
    format!("{} abelian returns {{{}}}", set.len(), reps.join(", "))
}

fn range(max_len: usize) -> LengthRange {
    LengthRange {
        from: 1,
        to: max_len,
    }
}

fn survey_source(
    source: &WordSource,
    max_len: usize,
    policy: &StabilizationPolicy,
) -> Result<(Word, Vec<LengthSurvey>)> {
    if max_len == 0 {
        return Err(Error::LengthOutOfRange {
            n: 0,
            len: policy.max,
        });
    }
    policy.validate()?;
    let word = source.prefix(policy.max)?;
    let surveys = survey(&word, max_len, policy)?;
    Ok((word, surveys))
}

fn caveats_of(surveys: &[LengthSurvey]) -> Vec<Caveat> {
    surveys
        .iter()
        .flat_map(|s| s.classes.iter().filter_map(ClassSurvey::caveat))
        .collect()
}

/// Every abelian class of factors has two or three abelian returns.
pub fn verify_sturmian_characterization(
    source: &WordSource,
    max_len: usize,
    policy: &StabilizationPolicy,
) -> Result<Verdict> {
    let (_, surveys) = survey_source(source, max_len, policy)?;
    Ok(characterization_verdict(&surveys, max_len))
}

fn characterization_verdict(surveys: &[LengthSurvey], max_len: usize) -> Verdict {
    let witnesses = surveys
        .iter()
        .flat_map(|s| &s.classes)
        .filter_map(|c| {
            let set = c.stable_returns()?;
            (!(2..=3).contains(&set.len())).then(|| Witness {
                length: c.id.length,
                factor: c.representative().clone(),
                observed: describe(set),
            })
        })
        .collect();
    Verdict::new(
        "main",
        range(max_len),
        witnesses,
        caveats_of(surveys),
        Vec::new(),
    )
}

/// A class has exactly two abelian returns iff it is a single factor.
pub fn verify_singular_theorem(
    source: &WordSource,
    max_len: usize,
    policy: &StabilizationPolicy,
) -> Result<Verdict> {
    let (_, surveys) = survey_source(source, max_len, policy)?;
    Ok(singular_verdict(&surveys, max_len))
}

fn singular_verdict(surveys: &[LengthSurvey], max_len: usize) -> Verdict {
    let witnesses = surveys
        .iter()
        .flat_map(|s| &s.classes)
        .filter_map(|c| {
            let set = c.stable_returns()?;
            ((set.len() == 2) != c.is_singular()).then(|| Witness {
                length: c.id.length,
                factor: c.representative().clone(),
                observed: format!("{}; class has {} member(s)", describe(set), c.members.len()),
            })
        })
        .collect();
    Verdict::new(
        "singular",
        range(max_len),
        witnesses,
        caveats_of(surveys),
        Vec::new(),
    )
}

/// At most one return class per length `>= 2`, and every return is a letter
/// or `aBb` with `B` bispecial.
pub fn verify_return_structure(
    source: &WordSource,
    max_len: usize,
    policy: &StabilizationPolicy,
) -> Result<Verdict> {
    let (word, surveys) = survey_source(source, max_len, policy)?;
    Ok(structure_verdict(&word, &surveys, max_len))
}

fn structure_verdict(word: &Word, surveys: &[LengthSurvey], max_len: usize) -> Verdict {
    let witnesses: Vec<Witness> = surveys
        .par_iter()
        .flat_map_iter(|s| {
            let mut classifier = ShapeClassifier::new(word);
            let mut found = Vec::new();
            for c in &s.classes {
                let Some(set) = c.stable_returns() else {
                    continue;
                };
                let mut per_length: BTreeMap<usize, Vec<&Word>> = BTreeMap::new();
                for rc in &set.classes {
                    per_length
                        .entry(rc.id.length)
                        .or_default()
                        .push(&rc.representative);
                }
                for (len, reps) in per_length.iter().filter(|(&l, r)| l >= 2 && r.len() > 1) {
                    let reps: Vec<String> = reps.iter().map(|r| r.to_string()).collect();
                    found.push(Witness {
                        length: c.id.length,
                        factor: c.representative().clone(),
                        observed: format!(
                            "{} returns of length {len}: {}",
                            reps.len(),
                            reps.join(", ")
                        ),
                    });
                }
                for rc in &set.classes {
                    if classifier.classify(&rc.representative) == ReturnShape::Other {
                        found.push(Witness {
                            length: c.id.length,
                            factor: c.representative().clone(),
                            observed: format!(
                                "return {} is neither a letter nor aBb",
                                rc.representative
                            ),
                        });
                    }
                }
            }
            found
        })
        .collect();
    Verdict::new(
        "structure",
        range(max_len),
        witnesses,
        caveats_of(surveys),
        Vec::new(),
    )
}

/// Relation between small numbers of abelian returns and periodicity, for an
/// alphabet of size `k`:
///
/// (a) if every class has at most `k` returns, a period is detected;
/// (b) if no period is detected, every tail band `(N, max_len]` contains a
///     length with a class of at least `k + 1` returns.
pub fn verify_periodicity_lemma(
    source: &WordSource,
    max_len: usize,
    policy: &StabilizationPolicy,
) -> Result<Verdict> {
    let (word, surveys) = survey_source(source, max_len, policy)?;
    Ok(periodicity_verdict(
        &word,
        &surveys,
        max_len,
        source.alphabet(),
    ))
}

fn periodicity_verdict(word: &Word, surveys: &[LengthSurvey], max_len: usize, k: usize) -> Verdict {
    let period = detect_period(word);
    let mut notes = Vec::new();
    match period {
        Some(t) => notes.push(format!("detected period {t}")),
        None => notes.push(format!(
            "no period detected on a prefix of length {}",
            word.len()
        )),
    }

    let stable: Vec<&ClassSurvey> = surveys
        .iter()
        .flat_map(|s| &s.classes)
        .filter(|c| c.stable_returns().is_some())
        .collect();
    let count = |c: &ClassSurvey| c.stable_returns().map_or(0, ReturnSet::len);
    if let Some(min) = stable.iter().map(|c| count(c)).min() {
        notes.push(format!("minimum abelian return count {min}"));
    }
    if let Some(max) = stable.iter().map(|c| count(c)).max() {
        notes.push(format!("maximum abelian return count {max}"));
    }
    let single: Vec<String> = stable
        .iter()
        .filter(|c| count(c) == 1)
        .map(|c| {
            format!(
                "{} ({})",
                c.representative(),
                describe(c.stable_returns().unwrap())
            )
        })
        .collect();
    if !single.is_empty() {
        notes.push(format!(
            "classes with one abelian return: {}",
            single.join("; ")
        ));
    }
    let rich_lengths: BTreeSet<usize> = stable
        .iter()
        .filter(|c| count(c) > k)
        .map(|c| c.id.length)
        .collect();
    let poor: Vec<String> = (1..=max_len)
        .filter(|n| !rich_lengths.contains(n))
        .map(|n| n.to_string())
        .collect();
    if !poor.is_empty() {
        notes.push(format!(
            "lengths without a class of more than {k} returns: {}",
            poor.join(",")
        ));
    }

    let mut witnesses = Vec::new();
    let everywhere_small = !stable.is_empty() && stable.iter().all(|c| count(c) <= k);
    if everywhere_small && period.is_none() {
        witnesses.push(Witness {
            length: max_len,
            factor: surveys[0].classes[0].representative().clone(),
            observed: format!(
                "every class has at most {k} abelian returns but no period was detected"
            ),
        });
    }
    if period.is_none() {
        if let Some(n) = (0..max_len).find(|&n| !rich_lengths.iter().any(|&l| l > n)) {
            witnesses.push(Witness {
                length: n + 1,
                factor: surveys[n].classes[0].representative().clone(),
                observed: format!(
                    "no class of length in {}..={max_len} has more than {k} abelian returns",
                    n + 1
                ),
            });
        }
    }
    Verdict::new(
        "periodicity",
        range(max_len),
        witnesses,
        caveats_of(surveys),
        notes,
    )
}

/// After naming letters so that `1` is isolated, the interior runs of `0`
/// have lengths `{l}` or `{l, l + 1}`.
pub fn corollary_w_form_check(prefix: &Word) -> Verdict {
    let checked = LengthRange {
        from: 1,
        to: prefix.len(),
    };
    let fail = |observed: String| {
        Verdict::new(
            "corollary-w",
            checked,
            vec![Witness {
                length: prefix.len(),
                factor: prefix.prefix(prefix.len().min(32)),
                observed,
            }],
            Vec::new(),
            Vec::new(),
        )
    };
    if !prefix.letters().iter().all(|&l| l < 2) {
        return fail("word is not binary".into());
    }
    let runs = classify_runs(prefix);
    let Some(isolated) = runs.isolated_letter.as_ref().map(|w| w[0]) else {
        return fail(format!(
            "no isolated letter; runs of 0: {:?}, runs of 1: {:?}",
            runs.per_letter.of(0),
            runs.per_letter.of(1)
        ));
    };
    let other = 1 - isolated;
    let spectrum = runs.per_letter.of(other);
    let lengths: Vec<usize> = spectrum.iter().copied().collect();
    let ok = match lengths.as_slice() {
        [l] => *l >= 1,
        [l, m] => *l >= 1 && *m == l + 1,
        _ => false,
    };
    if !ok {
        return fail(format!(
            "isolated letter {isolated}; runs of {other}: {lengths:?}"
        ));
    }
    let notes = vec![format!(
        "isolated letter {isolated}; runs of {other}: {lengths:?}; l1 = {}",
        lengths[0]
    )];
    Verdict::new("corollary-w", checked, Vec::new(), Vec::new(), notes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Main,
    Singular,
    Structure,
    Periodicity,
    CorollaryW,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Theorem::Main,
        Theorem::Singular,
        Theorem::Structure,
        Theorem::Periodicity,
        Theorem::CorollaryW,
    ];
}

/// Runs several verifiers over one shared survey of the source.
pub fn verify_all(
    source: &WordSource,
    theorems: &[Theorem],
    max_len: usize,
    policy: &StabilizationPolicy,
) -> Result<Vec<Verdict>> {
    let needs_survey = theorems.iter().any(|t| *t != Theorem::CorollaryW);
    let (word, surveys) = if needs_survey {
        survey_source(source, max_len, policy)?
    } else {
        policy.validate()?;
        (source.prefix(policy.max)?, Vec::new())
    };
    Ok(theorems
        .iter()
        .map(|t| match t {
            Theorem::Main => characterization_verdict(&surveys, max_len),
            Theorem::Singular => singular_verdict(&surveys, max_len),
            Theorem::Structure => structure_verdict(&word, &surveys, max_len),
            Theorem::Periodicity => {
                periodicity_verdict(&word, &surveys, max_len, source.alphabet())
            }
            Theorem::CorollaryW => corollary_w_form_check(&word),
        })
        .collect())
}
