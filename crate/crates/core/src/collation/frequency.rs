//! Structure frequency lists and the error hints derived from them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{is_foreign_char, runs, signature_of, split, RunClass, Tokenization, SEPARATORS};

/// Signature counts, most frequent first, ties by signature text.
pub fn structure_frequencies<S: AsRef<str>>(designations: &[S]) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for d in designations {
        *counts.entry(signature_of(&split(d.as_ref()))).or_default() += 1;
    }
    let mut out: Vec<(String, usize)> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum HintKind {
    AlphabetConfusion,
    ZeroOhConfusion,
    SeparatorAnomaly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnomalyHint {
    pub designation: String,
    pub kind: HintKind,
    pub evidence: String,
}

/// A signature is rare at or below `rare` occurrences and frequent at or
/// above `frequent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnomalyThresholds {
    pub rare: usize,
    pub frequent: usize,
}

impl Default for AnomalyThresholds {
    fn default() -> Self {
        AnomalyThresholds { rare: 1, frequent: 3 }
    }
}

struct Corpus {
    counts: HashMap<String, usize>,
    thresholds: AnomalyThresholds,
}

impl Corpus {
    fn count(&self, sig: &str) -> usize {
        self.counts.get(sig).copied().unwrap_or(0)
    }

    fn is_rare(&self, sig: &str) -> bool {
        self.count(sig) <= self.thresholds.rare
    }

    fn is_frequent(&self, sig: &str) -> bool {
        self.count(sig) >= self.thresholds.frequent
    }
}

pub fn anomaly_hints<S: AsRef<str>>(designations: &[S], thresholds: AnomalyThresholds) -> Vec<AnomalyHint> {
    let tokens: Vec<Tokenization> = designations.iter().map(|d| split(d.as_ref())).collect();
    let sigs: Vec<String> = tokens.iter().map(signature_of).collect();
    let mut counts = HashMap::new();
    for s in &sigs {
        *counts.entry(s.clone()).or_insert(0usize) += 1;
    }
    let corpus = Corpus { counts, thresholds };

    let mut hints = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |hints: &mut Vec<AnomalyHint>, designation: &str, kind: HintKind, evidence: String| {
        if seen.insert((designation.to_string(), kind)) {
            hints.push(AnomalyHint { designation: designation.to_string(), kind, evidence });
        }
    };

    let separator_groups = separator_variants(&tokens);

    for (i, d) in designations.iter().enumerate() {
        let d = d.as_ref();
        let sig = &sigs[i];
        if let Some(ev) = alphabet_confusion(&tokens[i], sig, &corpus) {
            push(&mut hints, d, HintKind::AlphabetConfusion, ev);
        }
        if let Some(ev) = zero_oh_confusion(d, sig, &corpus) {
            push(&mut hints, d, HintKind::ZeroOhConfusion, ev);
        }
        if let Some(ev) = separator_groups.get(&i) {
            push(&mut hints, d, HintKind::SeparatorAnomaly, ev.clone());
        } else if let Some(ev) = separator_edit(sig, &corpus) {
            push(&mut hints, d, HintKind::SeparatorAnomaly, ev);
        }
        let foreign: BTreeSet<char> = tokens[i].parts.iter().flat_map(|p| p.chars()).filter(|&c| is_foreign_char(c)).collect();
        if !foreign.is_empty() {
            let list: String = foreign.into_iter().collect();
            push(&mut hints, d, HintKind::SeparatorAnomaly, format!("unexpected characters {list:?} inside parts"));
        }
    }
    hints
}

fn alphabet_confusion(t: &Tokenization, sig: &str, corpus: &Corpus) -> Option<String> {
    // A part that mixes both alphabets is suspicious regardless of counts.
    for part in &t.parts {
        let classes: Vec<RunClass> = runs(part).into_iter().map(|(k, _)| k).collect();
        let mixed = classes.windows(2).any(|w| matches!((w[0], w[1]), (RunClass::Letters(a), RunClass::Letters(b)) if a != b));
        if mixed {
            return Some(format!("part {part:?} mixes Cyrillic and Latin letters"));
        }
    }
    if !corpus.is_rare(sig) {
        return None;
    }
    let swapped = |c: char| match c {
        'C' => 'L',
        'L' => 'C',
        other => other,
    };
    let chars: Vec<char> = sig.chars().collect();
    let mut candidates: Vec<String> = Vec::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == 'C' || c == 'L' {
            let mut v = chars.clone();
            v[i] = swapped(c);
            candidates.push(v.into_iter().collect());
        }
    }
    candidates.push(chars.iter().map(|&c| swapped(c)).collect());
    candidates
        .into_iter()
        .filter(|c| c != sig)
        .find(|c| corpus.is_frequent(c))
        .map(|c| format!("signature {sig} (count {}) vs {c} (count {})", corpus.count(sig), corpus.count(&c)))
}

const OH: [char; 4] = ['O', 'О', 'o', 'о'];

fn zero_oh_confusion(d: &str, sig: &str, corpus: &Corpus) -> Option<String> {
    if !corpus.is_rare(sig) {
        return None;
    }
    let chars: Vec<char> = d.chars().collect();
    // Group character indices into runs: separators end a run, and a run is
    // a maximal stretch of the same class.
    let mut run_ranges: Vec<(usize, usize)> = Vec::new();
    let mut start = None;
    for i in 0..=chars.len() {
        let boundary = i == chars.len()
            || SEPARATORS.contains(&chars[i])
            || start.is_some_and(|s: usize| super::char_class(chars[s]) != super::char_class(chars[i]));
        if boundary {
            if let Some(s) = start.take() {
                run_ranges.push((s, i));
            }
        }
        if i < chars.len() && !SEPARATORS.contains(&chars[i]) && start.is_none() {
            start = Some(i);
        }
    }
    let mut variants: Vec<String> = Vec::new();
    for &(s, e) in &run_ranges {
        if chars[s..e].iter().any(|c| OH.contains(c)) {
            let mut v = chars.clone();
            for c in &mut v[s..e] {
                if OH.contains(c) {
                    *c = '0';
                }
            }
            variants.push(v.into_iter().collect());
        }
        if chars[s..e].contains(&'0') {
            for oh in ['O', 'О'] {
                let mut v = chars.clone();
                for c in &mut v[s..e] {
                    if *c == '0' {
                        *c = oh;
                    }
                }
                variants.push(v.into_iter().collect());
            }
        }
    }
    variants.into_iter().find_map(|v| {
        let vs = signature_of(&split(&v));
        (vs != sig && corpus.is_frequent(&vs))
            .then(|| format!("{v:?} has signature {vs} (count {}) instead of {sig}", corpus.count(&vs)))
    })
}

/// Designations whose parts match another designation's parts but whose
/// separators differ; the less common separator patterns are flagged.
fn separator_variants(tokens: &[Tokenization]) -> HashMap<usize, String> {
    let mut groups: HashMap<&[String], Vec<usize>> = HashMap::new();
    for (i, t) in tokens.iter().enumerate() {
        if !t.parts.is_empty() {
            groups.entry(t.parts.as_slice()).or_default().push(i);
        }
    }
    let mut out = HashMap::new();
    for members in groups.values() {
        let mut patterns: BTreeMap<String, usize> = BTreeMap::new();
        for &i in members {
            *patterns.entry(sep_pattern(&tokens[i])).or_default() += 1;
        }
        if patterns.len() < 2 {
            continue;
        }
        let best = patterns.values().copied().max().unwrap_or(0);
        let all_tied = patterns.values().all(|&n| n == best);
        for &i in members {
            let p = sep_pattern(&tokens[i]);
            if all_tied || patterns[&p] < best {
                let others: Vec<&String> = patterns.keys().filter(|k| **k != p).collect();
                out.insert(i, format!("same parts written with separators {p:?}, elsewhere {others:?}"));
            }
        }
    }
    out
}

fn sep_pattern(t: &Tokenization) -> String {
    t.separators.iter().map(|s| format!("{}{}", s.slot, s.ch)).collect::<Vec<_>>().join(" ")
}

/// A rare signature one separator edit away from a frequent one.
fn separator_edit(sig: &str, corpus: &Corpus) -> Option<String> {
    if !corpus.is_rare(sig) {
        return None;
    }
    let chars: Vec<char> = sig.chars().collect();
    let mut candidates: Vec<(String, &str)> = Vec::new();
    for i in 0..chars.len() {
        if SEPARATORS.contains(&chars[i]) {
            let mut v = chars.clone();
            v.remove(i);
            candidates.push((v.into_iter().collect(), "extra separator"));
            for s in SEPARATORS {
                if s != chars[i] {
                    let mut v = chars.clone();
                    v[i] = s;
                    candidates.push((v.into_iter().collect(), "wrong separator"));
                }
            }
        }
    }
    for i in 0..=chars.len() {
        for s in SEPARATORS {
            let mut v = chars.clone();
            v.insert(i, s);
            candidates.push((v.into_iter().collect(), "missing separator"));
        }
    }
    candidates
        .into_iter()
        .find(|(c, _)| c != sig && corpus.is_frequent(c))
        .map(|(c, why)| format!("{why}: signature {sig} vs frequent {c} (count {})", corpus.count(&c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(hints: &[AnomalyHint], d: &str) -> Vec<HintKind> {
        hints.iter().filter(|h| h.designation == d).map(|h| h.kind).collect()
    }

    #[test]
    fn frequencies_sorted_by_count() {
        let f = structure_frequencies(&["1", "2", "A1"]);
        assert_eq!(f, vec![("N".to_string(), 2), ("LN".to_string(), 1)]);
        assert!(structure_frequencies::<&str>(&[]).is_empty());
        let many = vec!["K-1"; 100];
        assert_eq!(structure_frequencies(&many), vec![("L-N".to_string(), 100)]);
    }

    #[test]
    fn frequency_ties_by_text() {
        let f = structure_frequencies(&["A", "1"]);
        assert_eq!(f, vec![("L".to_string(), 1), ("N".to_string(), 1)]);
    }

    #[test]
    fn latin_b_among_cyrillic() {
        let list = ["B1", "В2", "В3", "В4"];
        let h = anomaly_hints(&list, AnomalyThresholds::default());
        assert_eq!(kinds(&h, "B1"), [HintKind::AlphabetConfusion]);
        assert!(kinds(&h, "В2").is_empty());
    }

    #[test]
    fn letter_o_for_zero() {
        let list = ["K-O1", "K-01", "K-02", "K-03"];
        let h = anomaly_hints(&list, AnomalyThresholds::default());
        assert!(kinds(&h, "K-O1").contains(&HintKind::ZeroOhConfusion), "{h:?}");
        assert!(kinds(&h, "K-01").is_empty());
    }

    #[test]
    fn homogeneous_list_is_clean() {
        assert!(anomaly_hints(&["1", "2", "3"], AnomalyThresholds::default()).is_empty());
    }

    #[test]
    fn missing_separator() {
        let list = ["K-1", "K-2", "K-3", "K4"];
        let h = anomaly_hints(&list, AnomalyThresholds::default());
        assert_eq!(kinds(&h, "K4"), [HintKind::SeparatorAnomaly]);
    }

    #[test]
    fn wrong_separator_same_parts() {
        let list = ["A-1", "A-1", "A/1"];
        let h = anomaly_hints(&list, AnomalyThresholds::default());
        assert_eq!(kinds(&h, "A/1"), [HintKind::SeparatorAnomaly]);
        assert!(kinds(&h, "A-1").is_empty());
    }

    #[test]
    fn foreign_characters_flagged() {
        let h = anomaly_hints(&["(A5,10)"], AnomalyThresholds::default());
        assert_eq!(kinds(&h, "(A5,10)"), [HintKind::SeparatorAnomaly]);
    }

    #[test]
    fn mixed_alphabet_part() {
        // Latin "K" followed by Cyrillic "В"
        let h = anomaly_hints(&["KВ1"], AnomalyThresholds::default());
        assert_eq!(kinds(&h, "KВ1"), [HintKind::AlphabetConfusion]);
    }
}
