use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PoError;
use crate::quantity::leading_number;

/// The specifying fields: the union of the specification and order
/// specification columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecField {
    MarkaPoz,
    Pozicija,
    Oboznachenie,
    Naimenovanie,
    Kolichestvo,
    MassaEd,
    Primechanie,
    TipMarka,
    NaimTeh,
    EdIzm,
    KodOborud,
    Zavod,
}

impl SpecField {
    pub const ALL: [SpecField; 12] = [
        SpecField::MarkaPoz,
        SpecField::Pozicija,
        SpecField::Oboznachenie,
        SpecField::Naimenovanie,
        SpecField::Kolichestvo,
        SpecField::MassaEd,
        SpecField::Primechanie,
        SpecField::TipMarka,
        SpecField::NaimTeh,
        SpecField::EdIzm,
        SpecField::KodOborud,
        SpecField::Zavod,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SpecField::MarkaPoz => "marka_poz",
            SpecField::Pozicija => "pozicija",
            SpecField::Oboznachenie => "oboznachenie",
            SpecField::Naimenovanie => "naimenovanie",
            SpecField::Kolichestvo => "kolichestvo",
            SpecField::MassaEd => "massa_ed",
            SpecField::Primechanie => "primechanie",
            SpecField::TipMarka => "tip_marka",
            SpecField::NaimTeh => "naim_teh",
            SpecField::EdIzm => "ed_izm",
            SpecField::KodOborud => "kod_oborud",
            SpecField::Zavod => "zavod",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            SpecField::MarkaPoz => "Марка, Поз.",
            SpecField::Pozicija => "Позиция",
            SpecField::Oboznachenie => "Обозначение",
            SpecField::Naimenovanie => "Наименование",
            SpecField::Kolichestvo => "Количество",
            SpecField::MassaEd => "Масса ед.",
            SpecField::Primechanie => "Примечание",
            SpecField::TipMarka => "Тип, марка",
            SpecField::NaimTeh => "Наименование и техническая характеристика",
            SpecField::EdIzm => "ЕдИзм",
            SpecField::KodOborud => "Код оборудования",
            SpecField::Zavod => "Завод-изготовитель",
        }
    }

    /// Fields that carry designations and sort by designation collation.
    pub fn is_designation(self) -> bool {
        matches!(self, SpecField::MarkaPoz | SpecField::Pozicija | SpecField::Oboznachenie)
    }
}

impl fmt::Display for SpecField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SpecField {
    type Err = PoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpecField::ALL.into_iter().find(|f| f.id() == s).ok_or_else(|| PoError::UnknownField(s.to_string()))
    }
}

/// Specifying properties of one product.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<SpecField, String>", into = "BTreeMap<SpecField, String>")]
pub struct SpecProps(BTreeMap<SpecField, String>);

impl SpecProps {
    pub fn new() -> Self {
        SpecProps::default()
    }

    pub fn get(&self, field: SpecField) -> Option<&str> {
        self.0.get(&field).map(String::as_str)
    }

    pub fn set(&mut self, field: SpecField, value: impl Into<String>) -> Result<(), PoError> {
        let value = value.into();
        check_value(field, &value)?;
        self.0.insert(field, value);
        Ok(())
    }

    pub fn remove(&mut self, field: SpecField) -> Option<String> {
        self.0.remove(&field)
    }

    pub fn with(mut self, field: SpecField, value: impl Into<String>) -> Result<Self, PoError> {
        self.set(field, value)?;
        Ok(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpecField, &str)> {
        self.0.iter().map(|(k, v)| (*k, v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a map keyed by canonical field ids.
    pub fn from_ids<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, PoError> {
        let mut p = SpecProps::new();
        for (k, v) in pairs {
            p.set(k.parse()?, v)?;
        }
        Ok(p)
    }
}

fn check_value(field: SpecField, value: &str) -> Result<(), PoError> {
    if field == SpecField::Kolichestvo {
        if let Some((n, _)) = leading_number(value) {
            if n.is_negative() {
                return Err(PoError::NegativeQuantity(value.to_string()));
            }
        }
    }
    Ok(())
}

impl TryFrom<BTreeMap<SpecField, String>> for SpecProps {
    type Error = PoError;

    fn try_from(map: BTreeMap<SpecField, String>) -> Result<Self, Self::Error> {
        for (k, v) in &map {
            check_value(*k, v)?;
        }
        Ok(SpecProps(map))
    }
}

impl From<SpecProps> for BTreeMap<SpecField, String> {
    fn from(p: SpecProps) -> Self {
        p.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectType {
    #[default]
    None,
    Pipe,
    Well,
}

/// How the visible text of a PO module is read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoType {
    /// The whole text is one designation of one product.
    #[default]
    OneProduct,
    /// Each line designates its own product.
    ProductPerLine,
    /// The whole text designates an assembly of one or more products
    /// (for instance a flange joint kit).
    Assembly,
}

impl PoType {
    pub fn check_arity(self, lines: usize, props: usize) -> Result<(), PoError> {
        let ok = match self {
            PoType::OneProduct => props == 1,
            PoType::ProductPerLine => props == lines,
            PoType::Assembly => props >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(PoError::Arity { potype: self, lines, props })
        }
    }
}

/// A position-designation module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PoRecord", into = "PoRecord")]
pub struct PoModule {
    lines: Vec<String>,
    potype: PoType,
    objecttype: ObjectType,
    props: Vec<SpecProps>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoRecord {
    lines: Vec<String>,
    #[serde(default)]
    potype: PoType,
    #[serde(default)]
    objecttype: ObjectType,
    props: Vec<SpecProps>,
}

impl TryFrom<PoRecord> for PoModule {
    type Error = PoError;

    fn try_from(r: PoRecord) -> Result<Self, Self::Error> {
        PoModule::new(r.lines, r.potype, r.objecttype, r.props)
    }
}

impl From<PoModule> for PoRecord {
    fn from(m: PoModule) -> Self {
        PoRecord { lines: m.lines, potype: m.potype, objecttype: m.objecttype, props: m.props }
    }
}

impl PoModule {
    pub fn new(lines: Vec<String>, potype: PoType, objecttype: ObjectType, props: Vec<SpecProps>) -> Result<Self, PoError> {
        if lines.is_empty() || lines.iter().all(|l| l.trim().is_empty()) {
            return Err(PoError::NoText);
        }
        potype.check_arity(lines.len(), props.len())?;
        Ok(PoModule { lines, potype, objecttype, props })
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn potype(&self) -> PoType {
        self.potype
    }

    pub fn objecttype(&self) -> ObjectType {
        self.objecttype
    }

    pub fn set_objecttype(&mut self, t: ObjectType) {
        self.objecttype = t;
    }

    pub fn props(&self) -> &[SpecProps] {
        &self.props
    }

    pub fn props_mut(&mut self) -> &mut [SpecProps] {
        &mut self.props
    }

    /// Replaces the product rows, switching a single-product module to an
    /// assembly when several rows are given.
    pub fn replace_props(&mut self, props: Vec<SpecProps>) -> Result<(), PoError> {
        let potype = match self.potype {
            PoType::OneProduct if props.len() > 1 => PoType::Assembly,
            PoType::Assembly if props.len() == 1 => PoType::OneProduct,
            other => other,
        };
        potype.check_arity(self.lines.len(), props.len())?;
        self.potype = potype;
        self.props = props;
        Ok(())
    }

    /// Designations written by this module, trimmed.
    pub fn designations(&self) -> Vec<String> {
        match self.potype {
            PoType::ProductPerLine => self.lines.iter().map(|l| l.trim().to_string()).collect(),
            PoType::OneProduct | PoType::Assembly => {
                let joined: Vec<&str> = self.lines.iter().map(|l| l.trim()).filter(|l| !l.is_empty()).collect();
                vec![joined.join(" ")]
            }
        }
    }

    /// Product rows as (designation, props) pairs.
    pub fn products(&self) -> Vec<(String, &SpecProps)> {
        let ds = self.designations();
        match self.potype {
            PoType::ProductPerLine => ds.into_iter().zip(&self.props).collect(),
            PoType::OneProduct | PoType::Assembly => self.props.iter().map(|p| (ds[0].clone(), p)).collect(),
        }
    }
}

/// Which module kinds take part in duplicate control.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct DuplicateScope {
    pub include_po_modules: bool,
    pub include_axono_modules: bool,
    pub include_vk_profile_modules: bool,
}

impl DuplicateScope {
    pub const ALL: DuplicateScope =
        DuplicateScope { include_po_modules: true, include_axono_modules: true, include_vk_profile_modules: true };
    pub const PO_ONLY: DuplicateScope =
        DuplicateScope { include_po_modules: true, include_axono_modules: false, include_vk_profile_modules: false };
    pub const NONE: DuplicateScope =
        DuplicateScope { include_po_modules: false, include_axono_modules: false, include_vk_profile_modules: false };

    pub fn is_disabled(&self) -> bool {
        !(self.include_po_modules || self.include_axono_modules || self.include_vk_profile_modules)
    }

    /// Parses a comma list of `po`, `axono`, `vk`; `all` and `none` are accepted too.
    pub fn parse_list(s: &str) -> Result<Self, PoError> {
        let mut scope = DuplicateScope::NONE;
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            match item {
                "po" => scope.include_po_modules = true,
                "axono" => scope.include_axono_modules = true,
                "vk" => scope.include_vk_profile_modules = true,
                "all" => scope = DuplicateScope::ALL,
                "none" => {}
                other => return Err(PoError::BadScope(other.to_string())),
            }
        }
        Ok(scope)
    }

    /// `self` admits everything `other` admits.
    pub fn contains(&self, other: &DuplicateScope) -> bool {
        (self.include_po_modules || !other.include_po_modules)
            && (self.include_axono_modules || !other.include_axono_modules)
            && (self.include_vk_profile_modules || !other.include_vk_profile_modules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_field_rejected() {
        let r: Result<SpecProps, _> = serde_json::from_str(r#"{"bogus":"x"}"#);
        assert!(r.is_err());
        let ok: SpecProps = serde_json::from_str(r#"{"zavod":"З-д А","kolichestvo":"2"}"#).unwrap();
        assert_eq!(ok.get(SpecField::Zavod), Some("З-д А"));
    }

    #[test]
    fn negative_quantity_rejected() {
        assert!(SpecProps::new().with(SpecField::Kolichestvo, "-1").is_err());
        assert!(SpecProps::new().with(SpecField::Kolichestvo, "-").is_ok());
        let r: Result<SpecProps, _> = serde_json::from_str(r#"{"kolichestvo":"-3"}"#);
        assert!(r.is_err());
    }

    #[test]
    fn arity_rules() {
        let one = || vec![SpecProps::new()];
        assert!(PoModule::new(vec!["K1".into()], PoType::OneProduct, ObjectType::None, one()).is_ok());
        let three = PoModule::new(
            vec!["1".into(), "2".into(), "3".into()],
            PoType::ProductPerLine,
            ObjectType::None,
            vec![SpecProps::new(); 3],
        )
        .unwrap();
        assert_eq!(three.designations(), ["1", "2", "3"]);
        let err = PoModule::new(vec!["1".into(), "2".into()], PoType::OneProduct, ObjectType::None, vec![SpecProps::new(); 2]);
        assert!(matches!(err, Err(PoError::Arity { .. })));
    }

    #[test]
    fn scope_list() {
        assert_eq!(DuplicateScope::parse_list("po").unwrap(), DuplicateScope::PO_ONLY);
        assert!(DuplicateScope::parse_list("").unwrap().is_disabled());
        assert!(DuplicateScope::parse_list("po,foo").is_err());
        assert!(DuplicateScope::ALL.contains(&DuplicateScope::PO_ONLY));
        assert!(!DuplicateScope::PO_ONLY.contains(&DuplicateScope::ALL));
    }
}
