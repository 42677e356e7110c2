//! Unit normalization with exact rational factors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RuleError;
use crate::quantity::Decimal;

const DEFAULT_UNITS: &str = include_str!("units.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Factor {
    num: i128,
    den: i128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitTable {
    units: BTreeMap<String, (String, Factor)>,
}

/// A number in core units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

#[derive(Deserialize)]
struct UnitRow {
    unit: String,
    core_unit: String,
    numerator: i128,
    denominator: i128,
}

impl Default for UnitTable {
    fn default() -> Self {
        UnitTable::parse(DEFAULT_UNITS).expect("shipped unit table is valid")
    }
}

impl UnitTable {
    /// Reads `unit,core_unit,numerator,denominator` rows.
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let mut units = BTreeMap::new();
        for (i, row) in rd.deserialize::<UnitRow>().enumerate() {
            let line = i + 2;
            let r = row.map_err(|e| RuleError::Units { line, message: e.to_string() })?;
            if r.numerator <= 0 || r.denominator <= 0 {
                return Err(RuleError::Units { line, message: "factor must be positive".into() });
            }
            let key = r.unit.trim().to_string();
            if units
                .insert(key.clone(), (r.core_unit.trim().to_string(), Factor { num: r.numerator, den: r.denominator }))
                .is_some()
            {
                return Err(RuleError::Units { line, message: format!("unit {key:?} listed twice") });
            }
        }
        Ok(UnitTable { units })
    }

    pub fn knows(&self, unit: &str) -> bool {
        self.units.contains_key(unit.trim())
    }

    pub fn core_unit(&self, unit: &str) -> Option<&str> {
        self.units.get(unit.trim()).map(|(c, _)| c.as_str())
    }

    /// Converts `value` given in `unit` to the unit's core unit.
    pub fn convert(&self, value: Decimal, unit: &str) -> Result<Quantity, RuleError> {
        let (core, f) = self.units.get(unit.trim()).ok_or_else(|| RuleError::UnknownUnit(unit.to_string()))?;
        let (mantissa, scale) = value.parts();
        let num = mantissa.checked_mul(f.num).ok_or_else(|| RuleError::UnknownUnit(unit.to_string()))?;
        let den = 10i128.pow(scale) * f.den;
        let value = if num % den == 0 { (num / den) as f64 } else { num as f64 / den as f64 };
        Ok(Quantity { value, unit: core.clone() })
    }
}

/// Converts with the shipped unit table.
pub fn convert_units(value: f64, unit: &str) -> Result<f64, RuleError> {
    let d = crate::quantity::leading_number(&format!("{value}"))
        .map(|(d, _)| d)
        .ok_or_else(|| RuleError::UnknownUnit(unit.to_string()))?;
    UnitTable::default().convert(d, unit).map(|q| q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantity::leading_number;

    fn dec(s: &str) -> Decimal {
        leading_number(s).unwrap().0
    }

    #[test]
    fn metric_lengths() {
        let t = UnitTable::default();
        assert_eq!(t.convert(dec("2"), "м").unwrap(), Quantity { value: 2000.0, unit: "мм".into() });
        assert_eq!(t.convert(dec("50"), "мм").unwrap().value, 50.0);
        assert_eq!(t.convert(dec("0.057"), "м").unwrap().value, 57.0);
        assert!(matches!(t.convert(dec("1"), "фут"), Err(RuleError::UnknownUnit(_))));
    }

    #[test]
    fn pressure() {
        let t = UnitTable::default();
        let q = t.convert(dec("1"), "кгс/см2").unwrap();
        assert_eq!(q.unit, "кПа");
        assert!((q.value - 98.0665).abs() < 1e-12);
    }

    #[test]
    fn free_function() {
        assert_eq!(convert_units(2.0, "м").unwrap(), 2000.0);
        assert!(convert_units(1.0, "фут").is_err());
    }
}
