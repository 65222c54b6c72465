//! Orbits of binary words under the cyclic shift, lexicographic arrays, and
//! balance checks.
//!
//! For coprime `(p, q)`, the set of binary words of length `q` with `p` ones
//! splits into orbits of exactly `q` cyclic shifts. The lexicographic array of
//! an orbit is the `q x q` matrix of its shifts in increasing order. Exactly
//! one orbit is balanced, and its array can be written down directly:
//! column `j` is `u` shifted by `j * p`, where `u = 0^(q-p) 1^p`.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::returns::{ClassId, ReturnClass, ReturnSet};
use crate::word::{gcd, ParikhVector, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub p: usize,
    pub q: usize,
    /// The `q` cyclic shifts in increasing lexicographic order.
    pub elements: Vec<Word>,
}

fn is_binary_content(w: &Word) -> bool {
    w.letters().iter().all(|&l| l < 2)
}

fn ones(letters: &[u8]) -> usize {
    letters.iter().filter(|&&l| l == 1).count()
}

fn orbit_params(w: &Word) -> Result<(usize, usize)> {
    if !is_binary_content(w) {
        return Err(Error::NotBinary);
    }
    let (p, q) = (ones(w.letters()), w.len());
    if p == 0 || p >= q || gcd(p, q) != 1 {
        return Err(Error::OrbitDegenerate { ones: p, length: q });
    }
    Ok((p, q))
}

pub fn conjugates(w: &Word) -> Result<Orbit> {
    let (p, q) = orbit_params(w)?;
    let binary = Word::binary(w.letters());
    let mut elements: Vec<Word> = (0..q).map(|k| binary.rotate(k)).collect();
    elements.sort();
    debug_assert!(elements.windows(2).all(|e| e[0] < e[1]));
    Ok(Orbit { p, q, elements })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexArray {
    pub p: usize,
    pub q: usize,
    rows: Vec<Word>,
}

impl LexArray {
    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    pub fn cell(&self, i: usize, j: usize) -> u8 {
        self.rows[i][j]
    }

    /// One row per line, letters only, newline-terminated.
    pub fn grid(&self) -> String {
        let mut s = String::with_capacity(self.q * (self.q + 1));
        for row in &self.rows {
            s.push_str(&row.to_string());
            s.push('\n');
        }
        s
    }

    /// Abelian returns of the class of `v` read off the array: for every row
    /// starting with a member of the class, the shortest row prefix after
    /// which the next (cyclic) window of length `|v|` is again in the class.
    pub fn abelian_returns(&self, v: &Word) -> Result<ReturnSet> {
        if v.is_empty() {
            return Err(Error::EmptyTarget);
        }
        if !is_binary_content(v) {
            return Err(Error::NotBinary);
        }
        let (n, q) = (v.len(), self.q);
        let target_ones = ones(v.letters());
        let mut least: HashMap<ParikhVector, Word> = HashMap::new();
        let mut matching_rows = 0;
        for row in &self.rows {
            let at = |k: usize| row[k % q] as usize;
            let mut window: usize = (0..n).map(at).sum();
            if window != target_ones {
                continue;
            }
            matching_rows += 1;
            let mut k = 1;
            loop {
                window = window + at(k + n - 1) - at(k - 1);
                if window == target_ones {
                    break;
                }
                k += 1;
            }
            let ret = Word::binary(&(0..k).map(|i| row[i % q]).collect::<Vec<_>>());
            least
                .entry(ret.parikh())
                .and_modify(|best| {
                    if ret < *best {
                        *best = ret.clone();
                    }
                })
                .or_insert(ret);
        }
        if matching_rows < 1 {
            return Err(Error::InsufficientOccurrences { found: 0 });
        }
        let mut classes: Vec<ReturnClass> = least
            .into_values()
            .map(|representative| ReturnClass {
                id: ClassId::of(&representative),
                representative,
            })
            .collect();
        classes.sort_by(|a, b| {
            (a.id.length, &a.representative).cmp(&(b.id.length, &b.representative))
        });
        Ok(ReturnSet {
            target: ClassId::of(&Word::binary(v.letters())),
            classes,
            occurrences: matching_rows,
        })
    }
}

impl fmt::Display for LexArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.grid())
    }
}

impl Serialize for LexArray {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            p: usize,
            q: usize,
            rows: &'a [Word],
        }
        Repr {
            p: self.p,
            q: self.q,
            rows: &self.rows,
        }
        .serialize(serializer)
    }
}

pub fn lex_array(w: &Word) -> Result<LexArray> {
    let orbit = conjugates(w)?;
    Ok(LexArray {
        p: orbit.p,
        q: orbit.q,
        rows: orbit.elements,
    })
}

/// Array of the balanced orbit built column by column from `u = 0^(q-p) 1^p`:
/// cell `(i, j)` is `u[(i + j p) mod q]`.
pub fn balanced_orbit_array(p: usize, q: usize) -> Result<LexArray> {
    if p == 0 || p >= q {
        return Err(Error::InvalidSlope { p, q });
    }
    if gcd(p, q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    let u: Vec<u8> = (0..q).map(|i| (i >= q - p) as u8).collect();
    let rows = (0..q)
        .map(|i| Word::binary(&(0..q).map(|j| u[(i + j * p) % q]).collect::<Vec<_>>()))
        .collect();
    Ok(LexArray { p, q, rows })
}

/// Balance via the array: the number of ones in every column prefix must be
/// non-decreasing down the sorted rows. Words without a proper orbit (unary,
/// non-coprime) are checked directly for cyclic balance.
pub fn is_balanced_jz(w: &Word) -> bool {
    if !is_binary_content(w) {
        return false;
    }
    let Ok(array) = lex_array(w) else {
        return is_cyclically_balanced(w);
    };
    let q = array.q;
    let mut counts = vec![0usize; q];
    for j in 0..q {
        for (i, c) in counts.iter_mut().enumerate() {
            *c += array.cell(i, j) as usize;
        }
        if counts.windows(2).any(|c| c[0] > c[1]) {
            return false;
        }
    }
    true
}

/// Every two windows of equal length of the circular word `w` differ by at
/// most one in their number of ones.
pub fn is_cyclically_balanced(w: &Word) -> bool {
    if !is_binary_content(w) {
        return false;
    }
    let q = w.len();
    let doubled: Vec<u8> = w.letters().iter().chain(w.letters()).copied().collect();
    (1..=q).all(|m| {
        let mut count = ones(&doubled[..m]);
        let (mut lo, mut hi) = (count, count);
        for i in 1..q {
            count = count + doubled[i + m - 1] as usize - doubled[i - 1] as usize;
            lo = lo.min(count);
            hi = hi.max(count);
        }
        hi - lo <= 1
    })
}

/// For every window length, the spread between the most and fewest ones over
/// all windows of that length is at most `k`.
pub fn is_k_balanced(u: &Word, k: usize) -> bool {
    if !is_binary_content(u) {
        return false;
    }
    let letters = u.letters();
    let mut sums = Vec::with_capacity(letters.len() + 1);
    sums.push(0u32);
    for &l in letters {
        sums.push(sums.last().unwrap() + l as u32);
    }
    let n = letters.len();
    let result = (1..n).all(|m| {
        let (mut lo, mut hi) = (u32::MAX, 0u32);
        for (a, b) in sums.iter().zip(&sums[m..]) {
            let c = b - a;
            lo = lo.min(c);
            hi = hi.max(c);
        }
        (hi - lo) as usize <= k
    });
    if n <= 64 {
        debug_assert_eq!(result, is_k_balanced_pairwise(u, k));
    }
    result
}

/// Quadratic cross-check of [`is_k_balanced`]: compares every pair of
/// equal-length factors.
pub fn is_k_balanced_pairwise(u: &Word, k: usize) -> bool {
    let letters = u.letters();
    let n = letters.len();
    for m in 1..=n {
        for i in 0..=n - m {
            for j in i + 1..=n - m {
                let (a, b) = (ones(&letters[i..i + m]), ones(&letters[j..j + m]));
                if a.abs_diff(b) > k {
                    return false;
                }
            }
        }
    }
    true
}

/// Checks `A[i][m] == A[(i + q - p) mod q][(m + 1) mod q]` for every cell.
pub fn column_shift_check(a: &LexArray) -> bool {
    let (p, q) = (a.p, a.q);
    (0..q).all(|i| (0..q).all(|m| a.cell(i, m) == a.cell((i + q - p) % q, (m + 1) % q)))
}
