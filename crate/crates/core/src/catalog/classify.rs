//! Classification of data tables and narrowing queries over them.

use serde::{Deserialize, Serialize};

use super::{CatalogError, CatalogSet, DataTable, RegistryEntry};
use crate::po::ObjectType;
use crate::quantity::leading_number;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KipClass {
    Primary,
    Secondary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntervalKey {
    /// Nominal bore.
    #[serde(rename = "DN")]
    Dn,
    /// Pressure.
    #[serde(rename = "P")]
    P,
    /// Temperature.
    #[serde(rename = "T")]
    T,
    /// Outer diameter.
    #[serde(rename = "D")]
    D,
    /// Thread diameter.
    #[serde(rename = "THREAD")]
    Thread,
}

impl IntervalKey {
    pub fn parse(s: &str) -> Option<IntervalKey> {
        Some(match s.trim().to_uppercase().as_str() {
            "DN" => IntervalKey::Dn,
            "P" => IntervalKey::P,
            "T" => IntervalKey::T,
            "D" => IntervalKey::D,
            "THREAD" => IntervalKey::Thread,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Intervals {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dn: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thread: Option<Interval>,
}

impl Intervals {
    pub fn get(&self, k: IntervalKey) -> Option<Interval> {
        match k {
            IntervalKey::Dn => self.dn,
            IntervalKey::P => self.p,
            IntervalKey::T => self.t,
            IntervalKey::D => self.d,
            IntervalKey::Thread => self.thread,
        }
    }

    fn slot(&mut self, k: IntervalKey) -> &mut Option<Interval> {
        match k {
            IntervalKey::Dn => &mut self.dn,
            IntervalKey::P => &mut self.p,
            IntervalKey::T => &mut self.t,
            IntervalKey::D => &mut self.d,
            IntervalKey::Thread => &mut self.thread,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// Instrumentation: primary or secondary device plus measured-quantity
    /// letters (F flow, P pressure, T temperature, ...).
    Kip {
        class: KipClass,
        letters: String,
    },
    /// Group path such as `Оборудование/Насос`.
    Group {
        path: Vec<String>,
    },
    Interval {
        intervals: Intervals,
    },
    None,
}

fn number(s: &str) -> Option<f64> {
    match leading_number(s) {
        Some((d, rest)) if rest.trim().is_empty() => Some(d.to_f64()),
        _ => None,
    }
}

impl Classification {
    /// Reads the registry's `class_kind` and `class_args` columns.
    pub fn parse(kind: &str, args: &str) -> Result<Classification, String> {
        let args = args.trim();
        match kind.trim() {
            "kip" => {
                let (class, letters) = args.split_once(';').ok_or("kip arguments are `primary|secondary;LETTERS`")?;
                let class = match class.trim() {
                    "primary" => KipClass::Primary,
                    "secondary" => KipClass::Secondary,
                    other => return Err(format!("kip class {other:?} is neither primary nor secondary")),
                };
                let letters = letters.trim().to_string();
                if letters.is_empty() || !letters.chars().all(|c| c.is_ascii_uppercase()) {
                    return Err(format!("kip letters {letters:?} must be capital Latin letters"));
                }
                Ok(Classification::Kip { class, letters })
            }
            "group" => {
                let path: Vec<String> = args.split('/').map(|s| s.trim().to_string()).collect();
                if path.iter().any(String::is_empty) {
                    return Err(format!("group path {args:?} has an empty segment"));
                }
                Ok(Classification::Group { path })
            }
            "interval" => {
                let mut iv = Intervals::default();
                for part in args.split(';').filter(|p| !p.trim().is_empty()) {
                    let (k, range) = part.split_once('=').ok_or_else(|| format!("interval {part:?} is not KEY=min..max"))?;
                    let key = IntervalKey::parse(k).ok_or_else(|| format!("unknown interval key {k:?}"))?;
                    let (lo, hi) = range.split_once("..").ok_or_else(|| format!("interval {part:?} is not KEY=min..max"))?;
                    let (min, max) = match (number(lo), number(hi)) {
                        (Some(a), Some(b)) if a <= b => (a, b),
                        _ => return Err(format!("bad interval {range:?}")),
                    };
                    if iv.slot(key).replace(Interval { min, max }).is_some() {
                        return Err(format!("interval key {k:?} given twice"));
                    }
                }
                if iv == Intervals::default() {
                    return Err("interval classification without intervals".into());
                }
                Ok(Classification::Interval { intervals: iv })
            }
            "none" | "" if args.is_empty() => Ok(Classification::None),
            "none" | "" => Err("classification none takes no arguments".into()),
            other => Err(format!("unknown classification kind {other:?}")),
        }
    }

    pub fn is_pipe(&self) -> bool {
        match self {
            Classification::Group { path } => path.iter().any(|seg| {
                let first = seg.split_whitespace().next().unwrap_or("").to_lowercase();
                first == "труба" || first == "трубы"
            }),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KipQuery {
    pub class: Option<KipClass>,
    pub letter: Option<char>,
}

/// All given criteria must hold.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterCriteria {
    pub profile: Option<String>,
    pub object_type: Option<ObjectType>,
    pub group_keyword: Option<String>,
    pub kip: Option<KipQuery>,
    pub intervals: Vec<(IntervalKey, f64)>,
}

impl FilterCriteria {
    pub fn matches(&self, e: &RegistryEntry) -> bool {
        if self.profile.as_ref().is_some_and(|p| *p != e.profile) {
            return false;
        }
        if self.object_type == Some(ObjectType::Pipe) && !e.classification.is_pipe() {
            return false;
        }
        if let Some(k) = &self.group_keyword {
            let k = k.to_lowercase();
            match &e.classification {
                Classification::Group { path } if path.iter().any(|s| s.to_lowercase().contains(&k)) => {}
                _ => return false,
            }
        }
        if let Some(q) = &self.kip {
            match &e.classification {
                Classification::Kip { class, letters }
                    if q.class.is_none_or(|c| c == *class) && q.letter.is_none_or(|l| letters.contains(l)) => {}
                _ => return false,
            }
        }
        self.intervals.iter().all(|(k, v)| match &e.classification {
            Classification::Interval { intervals } => intervals.get(*k).is_some_and(|i| i.contains(*v)),
            _ => false,
        })
    }
}

pub fn filter_tables<'a>(set: &'a CatalogSet, criteria: &FilterCriteria) -> Vec<&'a RegistryEntry> {
    set.registry().iter().filter(|e| criteria.matches(e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Predicate {
    Equals { value: String },
    Contains { value: String },
    Range { min: Option<f64>, max: Option<f64> },
}

impl Predicate {
    fn holds(&self, text: &str) -> bool {
        match self {
            Predicate::Equals { value } => text == value,
            Predicate::Contains { value } => text.to_lowercase().contains(&value.to_lowercase()),
            Predicate::Range { min, max } => leading_number(text)
                .map(|(d, _)| d.to_f64())
                .is_some_and(|v| min.is_none_or(|m| v >= m) && max.is_none_or(|m| v <= m)),
        }
    }
}

/// Indices of the rows satisfying every predicate, in table order.
pub fn query_rows(table: &DataTable, predicates: &[(String, Predicate)]) -> Result<Vec<usize>, CatalogError> {
    let cols = predicates
        .iter()
        .map(|(c, p)| {
            table
                .column_index(c)
                .map(|i| (i, p))
                .ok_or_else(|| CatalogError::UnknownColumn { table: table.name.clone(), column: c.clone() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..table.rows.len())
        .filter(|&r| cols.iter().all(|(i, p)| table.rows[r][*i].texts().iter().any(|t| p.holds(t))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CellValue;

    #[test]
    fn parse_variants() {
        assert_eq!(
            Classification::parse("kip", "primary;PT").unwrap(),
            Classification::Kip { class: KipClass::Primary, letters: "PT".into() }
        );
        assert!(Classification::parse("kip", "tertiary;P").is_err());
        let Classification::Interval { intervals } = Classification::parse("interval", "DN=10..40; P=0..1,6").unwrap() else {
            panic!()
        };
        assert_eq!(intervals.dn, Some(Interval { min: 10.0, max: 40.0 }));
        assert_eq!(intervals.p, Some(Interval { min: 0.0, max: 1.6 }));
        assert!(Classification::parse("interval", "DN=40..10").is_err());
        assert!(Classification::parse("group", "Трубы стальные/Трубы электросварные").unwrap().is_pipe());
        assert!(!Classification::parse("group", "Деталь/Тройник").unwrap().is_pipe());
        assert!(!Classification::parse("group", "Арматура/Трубопроводная").unwrap().is_pipe());
        assert_eq!(Classification::parse("none", "").unwrap(), Classification::None);
        assert!(Classification::parse("none", "x").is_err());
    }

    #[test]
    fn rows_by_predicate() {
        let t = DataTable {
            name: "t".into(),
            columns: vec!["MARKA".into(), "X_1".into(), "X_2".into()],
            rows: vec![
                vec![CellValue::parse("A"), CellValue::parse("40"), CellValue::parse("радиальный|осевой")],
                vec![CellValue::parse("B"), CellValue::parse("65"), CellValue::parse("радиальный")],
                vec![CellValue::parse("C"), CellValue::parse("50"), CellValue::parse("")],
            ],
        };
        let q = |c: &str, p| query_rows(&t, &[(c.to_string(), p)]).unwrap();
        assert_eq!(q("MARKA", Predicate::Equals { value: "B".into() }), [1]);
        assert_eq!(q("X_1", Predicate::Range { min: Some(40.0), max: Some(60.0) }), [0, 2]);
        assert_eq!(q("X_2", Predicate::Contains { value: "осевой".into() }), [0]);
        assert!(query_rows(&t, &[("X_9".into(), Predicate::Equals { value: "".into() })]).is_err());
    }
}
