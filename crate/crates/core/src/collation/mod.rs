//! Ordering and structure analysis of alphanumeric position designations.
//!
//! A designation such as `(A1-30-45)` or `5B8-3/8-12` is split left to right
//! into parts at the separators `-`, `/`, `(` and `)`. Parts are compared in
//! order; each part is a sequence of runs (digits, Cyrillic letters, Latin
//! letters) or a whole-part Roman numeral. Numbers sort before letters,
//! Arabic before Roman, numbers by value, Cyrillic before Latin, then
//! alphabetical position, then uppercase before lowercase.

mod frequency;

pub use frequency::{anomaly_hints, structure_frequencies, AnomalyHint, AnomalyThresholds, HintKind};

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub const SEPARATORS: [char; 4] = ['-', '/', '(', ')'];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CollationError {
    #[error("designation is empty")]
    Empty,
}

/// A separator together with the index of the part it precedes.
/// `slot == parts.len()` marks a trailing separator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Separator {
    pub ch: char,
    pub slot: usize,
}

impl Separator {
    fn ordinal(self) -> usize {
        SEPARATORS.iter().position(|&c| c == self.ch).unwrap_or(SEPARATORS.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Tokenization {
    pub parts: Vec<String>,
    pub separators: Vec<Separator>,
}

impl Tokenization {
    /// Rebuilds the original text.
    pub fn reassemble(&self) -> String {
        let mut out = String::new();
        let mut seps = self.separators.iter().peekable();
        for slot in 0..=self.parts.len() {
            while let Some(s) = seps.next_if(|s| s.slot == slot) {
                out.push(s.ch);
            }
            if let Some(p) = self.parts.get(slot) {
                out.push_str(p);
            }
        }
        out
    }

    pub fn separator_chars(&self) -> Vec<char> {
        self.separators.iter().map(|s| s.ch).collect()
    }
}

pub fn is_separator(c: char) -> bool {
    SEPARATORS.contains(&c)
}

/// Splits a designation into parts and separators. Adjacent separators yield
/// no empty parts; every separator is kept with its slot.
pub fn tokenize(designation: &str) -> Result<Tokenization, CollationError> {
    if designation.trim().is_empty() {
        return Err(CollationError::Empty);
    }
    Ok(split(designation))
}

fn split(designation: &str) -> Tokenization {
    let mut parts = Vec::new();
    let mut separators = Vec::new();
    let mut current = String::new();
    for c in designation.chars() {
        if is_separator(c) {
            if !current.is_empty() {
                parts.push(std::mem::take(&mut current));
            }
            separators.push(Separator { ch: c, slot: parts.len() });
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        parts.push(current);
    }
    Tokenization { parts, separators }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Alphabet {
    Cyrillic,
    Latin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RunClass {
    Digits,
    Letters(Alphabet),
}

impl RunClass {
    fn symbol(self) -> char {
        match self {
            RunClass::Digits => 'N',
            RunClass::Letters(Alphabet::Cyrillic) => 'C',
            RunClass::Letters(Alphabet::Latin) => 'L',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum PartClass {
    Arabic,
    Roman,
    CyrillicAlpha,
    LatinAlpha,
    Mixed(Vec<RunClass>),
}

impl PartClass {
    fn push_signature(&self, out: &mut String) {
        match self {
            PartClass::Arabic => out.push('N'),
            PartClass::Roman => out.push('R'),
            PartClass::CyrillicAlpha => out.push('C'),
            PartClass::LatinAlpha => out.push('L'),
            PartClass::Mixed(runs) => out.extend(runs.iter().map(|r| r.symbol())),
        }
    }
}

pub(crate) fn is_cyrillic_letter(c: char) -> bool {
    ('\u{0400}'..='\u{04FF}').contains(&c) && c.is_alphabetic()
}

/// Anything that is not a digit or a Cyrillic letter belongs to a Latin run.
pub(crate) fn char_class(c: char) -> RunClass {
    if c.is_ascii_digit() {
        RunClass::Digits
    } else if is_cyrillic_letter(c) {
        RunClass::Letters(Alphabet::Cyrillic)
    } else {
        RunClass::Letters(Alphabet::Latin)
    }
}

/// Characters outside digits, Cyrillic and Latin letters.
pub fn is_foreign_char(c: char) -> bool {
    !(c.is_ascii_alphanumeric() || is_cyrillic_letter(c) || is_separator(c))
}

/// Maximal same-class runs of a part.
pub(crate) fn runs(part: &str) -> Vec<(RunClass, &str)> {
    let mut out: Vec<(RunClass, &str)> = Vec::new();
    let mut start = 0;
    let mut class = None;
    for (i, c) in part.char_indices() {
        let k = char_class(c);
        match class {
            Some(prev) if prev == k => {}
            Some(prev) => {
                out.push((prev, &part[start..i]));
                start = i;
                class = Some(k);
            }
            None => class = Some(k),
        }
    }
    if let Some(k) = class {
        out.push((k, &part[start..]));
    }
    out
}

const ROMAN_TABLE: [(u32, &str); 13] = [
    (1000, "M"),
    (900, "CM"),
    (500, "D"),
    (400, "CD"),
    (100, "C"),
    (90, "XC"),
    (50, "L"),
    (40, "XL"),
    (10, "X"),
    (9, "IX"),
    (5, "V"),
    (4, "IV"),
    (1, "I"),
];

fn to_roman(mut value: u32) -> String {
    let mut out = String::new();
    for (v, s) in ROMAN_TABLE {
        while value >= v {
            out.push_str(s);
            value -= v;
        }
    }
    out
}

/// Value of a canonical uppercase Roman numeral (1..=3999), if `s` is one.
pub fn roman_value(s: &str) -> Option<u32> {
    if s.is_empty() || s.len() > 15 {
        return None;
    }
    let digit = |c: char| match c {
        'I' => Some(1),
        'V' => Some(5),
        'X' => Some(10),
        'L' => Some(50),
        'C' => Some(100),
        'D' => Some(500),
        'M' => Some(1000),
        _ => None,
    };
    let values: Option<Vec<u32>> = s.chars().map(digit).collect();
    let values = values?;
    let mut total: i64 = 0;
    for (i, &v) in values.iter().enumerate() {
        match values.get(i + 1) {
            Some(&next) if next > v => total -= i64::from(v),
            _ => total += i64::from(v),
        }
    }
    // Re-encoding rejects non-canonical spellings such as "IIII" or "VX".
    let total = u32::try_from(total).ok()?;
    (total > 0 && total < 4000 && to_roman(total) == s).then_some(total)
}

pub fn classify(part: &str) -> PartClass {
    let rs = runs(part);
    if rs.len() == 1 {
        let (class, text) = rs[0];
        match class {
            RunClass::Digits => return PartClass::Arabic,
            RunClass::Letters(Alphabet::Cyrillic) => return PartClass::CyrillicAlpha,
            RunClass::Letters(Alphabet::Latin) => {
                if roman_value(text).is_some() {
                    return PartClass::Roman;
                }
                if text.chars().all(|c| c.is_ascii_alphabetic()) {
                    return PartClass::LatinAlpha;
                }
            }
        }
    }
    PartClass::Mixed(rs.into_iter().map(|(k, _)| k).collect())
}

/// Structure signature, e.g. `(A1-30-45)` → `(LN-N-N)`.
pub fn signature(designation: &str) -> Result<String, CollationError> {
    Ok(signature_of(&tokenize(designation)?))
}

pub fn signature_of(t: &Tokenization) -> String {
    let mut out = String::new();
    let mut seps = t.separators.iter().peekable();
    for slot in 0..=t.parts.len() {
        while let Some(s) = seps.next_if(|s| s.slot == slot) {
            out.push(s.ch);
        }
        if let Some(p) = t.parts.get(slot) {
            classify(p).push_signature(&mut out);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

enum Atom<'a> {
    Number(&'a str),
    Roman(u32),
    Letters(Alphabet, &'a str),
}

impl Atom<'_> {
    fn category(&self) -> u8 {
        match self {
            Atom::Number(_) => 0,
            Atom::Roman(_) => 1,
            Atom::Letters(..) => 2,
        }
    }
}

fn atoms(part: &str) -> Vec<Atom<'_>> {
    if let Some(v) = roman_value(part) {
        return vec![Atom::Roman(v)];
    }
    runs(part)
        .into_iter()
        .map(|(class, text)| match class {
            RunClass::Digits => Atom::Number(text),
            RunClass::Letters(a) => Atom::Letters(a, text),
        })
        .collect()
}

fn compare_digit_values(a: &str, b: &str) -> Ordering {
    let a = a.trim_start_matches('0');
    let b = b.trim_start_matches('0');
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Alphabetical position of a case-folded letter within its alphabet.
/// Ё follows Е as in the Russian alphabet.
pub(crate) fn letter_position(c: char) -> (u32, bool) {
    let lower = c.to_lowercase().next().unwrap_or(c);
    let upper = lower != c;
    let pos = match lower {
        'a'..='z' => lower as u32 - 'a' as u32,
        'а'..='е' => lower as u32 - 'а' as u32,
        'ё' => 6,
        'ж'..='я' => lower as u32 - 'ж' as u32 + 7,
        other if is_cyrillic_letter(other) => 100 + other as u32,
        other => 1000 + other as u32,
    };
    (pos, upper)
}

fn compare_letters(a: &str, b: &str) -> Ordering {
    let fold = |s: &str| s.chars().map(|c| letter_position(c).0).collect::<Vec<_>>();
    // Uppercase sorts first, so it maps to the smaller key.
    let case = |s: &str| s.chars().map(|c| !letter_position(c).1).collect::<Vec<_>>();
    fold(a).cmp(&fold(b)).then_with(|| case(a).cmp(&case(b)))
}

fn compare_atoms(a: &Atom<'_>, b: &Atom<'_>) -> Ordering {
    a.category().cmp(&b.category()).then_with(|| match (a, b) {
        (Atom::Number(x), Atom::Number(y)) => compare_digit_values(x, y),
        (Atom::Roman(x), Atom::Roman(y)) => x.cmp(y),
        (Atom::Letters(ax, x), Atom::Letters(ay, y)) => ax.cmp(ay).then_with(|| compare_letters(x, y)),
        _ => Ordering::Equal,
    })
}

/// Compares two parts run by run; leading zeros and raw text break ties.
pub fn compare_parts(a: &str, b: &str) -> Ordering {
    let xa = atoms(a);
    let xb = atoms(b);
    for (p, q) in xa.iter().zip(&xb) {
        let o = compare_atoms(p, q);
        if o != Ordering::Equal {
            return o;
        }
    }
    xa.len().cmp(&xb.len()).then_with(|| a.chars().count().cmp(&b.chars().count())).then_with(|| a.cmp(b))
}

pub fn compare_tokenized(a: &Tokenization, b: &Tokenization) -> Ordering {
    for (p, q) in a.parts.iter().zip(&b.parts) {
        let o = compare_parts(p, q);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.parts.len().cmp(&b.parts.len()).then_with(|| {
        let key = |t: &Tokenization| t.separators.iter().map(|s| (s.slot, s.ordinal())).collect::<Vec<_>>();
        key(a).cmp(&key(b))
    })
}

/// Total order over designations.
pub fn compare(a: &str, b: &str) -> Ordering {
    compare_tokenized(&split(a), &split(b))
}

/// Stable sort of designations under [`compare`].
pub fn sort_designations<S: AsRef<str>>(items: &mut [S]) {
    items.sort_by(|a, b| compare(a.as_ref(), b.as_ref()));
}

/// Wrapper giving designations `Ord` under [`compare`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Designation(pub String);

impl Ord for Designation {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(&self.0, &other.0)
    }
}

impl PartialOrd for Designation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Designation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
