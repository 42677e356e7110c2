//! Helpers shared by the integration tests: fixtures, generators and an
//! independent designation ordering used as an oracle.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::Rng;
use specforge::catalog::{load_catalog_set, CatalogSet};
use specforge::drawing::{Document, ElementBody, StubData};
use specforge::geom::Point;
use specforge::po::{make_po, ObjectType, PoType, SpecProps};
use specforge::table::{load_table_kind, GoodsBuffer, TableInstance, TableKind};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn kind(name: &str) -> TableKind {
    load_table_kind(&fixtures().join("kinds").join(format!("{name}.json"))).unwrap()
}

pub fn catalog() -> CatalogSet {
    load_catalog_set(fixtures().join("catalog")).unwrap()
}

pub fn load_table(rel: &str) -> TableInstance {
    TableInstance::from_json(&std::fs::read_to_string(fixtures().join(rel)).unwrap()).unwrap()
}

pub mod tables;

/// Key-tuple ordering of designations written from the rules alone, with
/// its own tokenizer, Roman table and alphabets.
pub mod oracle {
    use std::collections::HashMap;
    use std::sync::OnceLock;

    const LATIN_LOWER: &str = "abcdefghijklmnopqrstuvwxyz";
    const LATIN_UPPER: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    const CYR_LOWER: &str = "абвгдеёжзийклмнопрстуфхцчшщъыьэюя";
    const CYR_UPPER: &str = "АБВГДЕЁЖЗИЙКЛМНОПРСТУФХЦЧШЩЪЫЬЭЮЯ";
    const SEPARATORS: &str = "-/()";

    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum AtomKey {
        Number(u128),
        Roman(u32),
        /// Alphabet (Cyrillic 0, Latin 1), folded positions, lowercase flags.
        Letters(u8, Vec<usize>, Vec<bool>),
    }

    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
    struct PartKey {
        atoms: Vec<AtomKey>,
        chars: usize,
        raw: String,
    }

    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
    pub struct Key {
        parts: Vec<PartKey>,
        separators: Vec<(usize, usize)>,
    }

    fn romans() -> &'static HashMap<String, u32> {
        static TABLE: OnceLock<HashMap<String, u32>> = OnceLock::new();
        TABLE.get_or_init(|| {
            let th = ["", "M", "MM", "MMM"];
            let hu = ["", "C", "CC", "CCC", "CD", "D", "DC", "DCC", "DCCC", "CM"];
            let te = ["", "X", "XX", "XXX", "XL", "L", "LX", "LXX", "LXXX", "XC"];
            let on = ["", "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX"];
            (1..4000u32)
                .map(|v| {
                    let s =
                        [th[(v / 1000) as usize], hu[(v / 100 % 10) as usize], te[(v / 10 % 10) as usize], on[(v % 10) as usize]];
                    (s.concat(), v)
                })
                .collect()
        })
    }

    /// (alphabet, position, lowercase) of a letter; anything unknown is
    /// treated as Latin past the end of the alphabet.
    fn letter(c: char) -> (u8, usize, bool) {
        let find = |s: &str| s.chars().position(|x| x == c);
        if let Some(p) = find(CYR_LOWER) {
            (0, p, true)
        } else if let Some(p) = find(CYR_UPPER) {
            (0, p, false)
        } else if let Some(p) = find(LATIN_LOWER) {
            (1, p, true)
        } else if let Some(p) = find(LATIN_UPPER) {
            (1, p, false)
        } else {
            (1, 1000 + c as usize, true)
        }
    }

    fn part_key(part: &str) -> PartKey {
        let atoms = match romans().get(part) {
            Some(&v) => vec![AtomKey::Roman(v)],
            None => {
                let mut atoms = Vec::new();
                let chars: Vec<char> = part.chars().collect();
                let mut i = 0;
                while i < chars.len() {
                    if chars[i].is_ascii_digit() {
                        let mut v = 0u128;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            v = v * 10 + chars[i].to_digit(10).unwrap() as u128;
                            i += 1;
                        }
                        atoms.push(AtomKey::Number(v));
                    } else {
                        let alphabet = letter(chars[i]).0;
                        let (mut pos, mut lower) = (Vec::new(), Vec::new());
                        while i < chars.len() && !chars[i].is_ascii_digit() && letter(chars[i]).0 == alphabet {
                            let (_, p, l) = letter(chars[i]);
                            pos.push(p);
                            lower.push(l);
                            i += 1;
                        }
                        atoms.push(AtomKey::Letters(alphabet, pos, lower));
                    }
                }
                atoms
            }
        };
        PartKey { atoms, chars: part.chars().count(), raw: part.to_string() }
    }

    pub fn key(d: &str) -> Key {
        let mut parts = Vec::new();
        let mut separators = Vec::new();
        let mut cur = String::new();
        for c in d.chars() {
            match SEPARATORS.chars().position(|s| s == c) {
                Some(ord) => {
                    if !cur.is_empty() {
                        parts.push(part_key(&cur));
                        cur.clear();
                    }
                    separators.push((parts.len(), ord));
                }
                None => cur.push(c),
            }
        }
        if !cur.is_empty() {
            parts.push(part_key(&cur));
        }
        Key { parts, separators }
    }
}

/// A designation built from digit runs, Roman numerals, Latin and Cyrillic
/// letters and separators. Small alphabets make ties and near ties common.
pub fn designation(rng: &mut impl Rng) -> String {
    const ROMAN: [&str; 12] = ["I", "II", "IV", "V", "IX", "X", "XIV", "XL", "MCM", "IIII", "VX", "C"];
    const LATIN: [char; 12] = ['a', 'b', 'c', 'x', 'A', 'B', 'C', 'I', 'V', 'X', 'M', 'z'];
    const CYR: [char; 12] = ['а', 'б', 'е', 'ё', 'ж', 'я', 'А', 'Б', 'Е', 'Ё', 'Ж', 'К'];
    const SEP: [char; 4] = ['-', '/', '(', ')'];
    let mut s = String::new();
    for _ in 0..rng.random_range(1..=5) {
        match rng.random_range(0..5) {
            0 => {
                for i in 0..rng.random_range(1..=3) {
                    let d = if i == 0 && rng.random_bool(0.2) { 0 } else { rng.random_range(0..10) };
                    s.push(char::from(b'0' + d));
                }
            }
            1 => s.push_str(ROMAN.choose(rng).unwrap()),
            2 => (0..rng.random_range(1..=2)).for_each(|_| s.push(*LATIN.choose(rng).unwrap())),
            3 => (0..rng.random_range(1..=2)).for_each(|_| s.push(*CYR.choose(rng).unwrap())),
            _ => s.push(*SEP.choose(rng).unwrap()),
        }
    }
    s
}

/// Any string over ASCII alphanumerics, a few Cyrillic letters, spaces and
/// the separators.
pub fn raw_string(rng: &mut impl Rng) -> String {
    const ALPHABET: &str = "0123456789abcXYZIVMжЁ -/()";
    let chars: Vec<char> = ALPHABET.chars().collect();
    (0..rng.random_range(0..16)).map(|_| *chars.choose(rng).unwrap()).collect()
}

/// Field values of a specification row: designation, name, quantity and
/// an optional multi-line note.
pub fn spec_row(rng: &mut impl Rng) -> BTreeMap<String, String> {
    const NAMES: [&str; 4] = ["Труба 57х3", "Труба 76х3", "Отвод 90-57х3", "Задвижка 30с41нж"];
    const NOTES: [&str; 3] = ["L=6 м", "по месту", "см.\nприм. 2"];
    let mut m = BTreeMap::new();
    m.insert("marka_poz".to_string(), rng.random_range(1..5).to_string());
    m.insert("naimenovanie".to_string(), NAMES.choose(rng).unwrap().to_string());
    let qty = if rng.random_bool(0.15) { "компл.".to_string() } else { rng.random_range(1..30).to_string() };
    m.insert("kolichestvo".to_string(), qty);
    if rng.random_bool(0.3) {
        m.insert("primechanie".to_string(), NOTES.choose(rng).unwrap().to_string());
    }
    m
}

/// A table of `kind` filled with `rows` through the goods buffer, with a
/// section title before each index in `sections`.
pub fn filled(kind: TableKind, rows: Vec<BTreeMap<String, String>>, sections: &[usize]) -> TableInstance {
    let mut t = TableInstance::new(kind);
    if !rows.is_empty() {
        t.from_buffer(&GoodsBuffer { rows }).unwrap();
    }
    for (i, &at) in sections.iter().enumerate() {
        t.add_section(&format!("Раздел {i}"), at.min(t.len())).unwrap();
    }
    t
}

/// A document with one PO per entry, plus axonometric and profile stubs
/// carrying designations of their own.
pub fn mixed_document(rng: &mut impl Rng, n: usize) -> Document {
    let mut doc = Document::new();
    for _ in 0..n {
        let designation = rng.random_range(1..8).to_string();
        match rng.random_range(0..5) {
            0 => {
                doc.add("0", Point::ORIGIN, ElementBody::AxonoSchemeStub(StubData { designations: vec![designation] }));
            }
            1 => {
                doc.add("0", Point::ORIGIN, ElementBody::VkProfileStub(StubData { designations: vec![designation] }));
            }
            _ => {
                let t = *[ObjectType::None, ObjectType::Pipe, ObjectType::Well].choose(rng).unwrap();
                let count = rng.random_range(1..=3);
                let props: Vec<SpecProps> = (0..count)
                    .map(|k| {
                        SpecProps::from_ids([("naimenovanie", format!("Изделие {k}").as_str()), ("kolichestvo", "1")]).unwrap()
                    })
                    .collect();
                let potype = if count == 1 { PoType::OneProduct } else { PoType::Assembly };
                make_po(&mut doc, vec![designation], potype, t, props, Point::ORIGIN).unwrap();
            }
        }
    }
    doc
}
