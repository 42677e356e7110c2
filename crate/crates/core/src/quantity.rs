//! Exact decimal quantities read from the leading numeric token of a cell.

use std::cmp::Ordering;
use std::fmt;

/// A decimal number `mantissa × 10^-scale`.
#[derive(Debug, Clone, Copy)]
pub struct Decimal {
    mantissa: i128,
    scale: u32,
}

impl Decimal {
    pub fn zero() -> Self {
        Decimal { mantissa: 0, scale: 0 }
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa < 0
    }

    fn rescaled(self, scale: u32) -> i128 {
        self.mantissa * 10i128.pow(scale - self.scale)
    }

    pub fn checked_add(self, other: Decimal) -> Option<Decimal> {
        let scale = self.scale.max(other.scale);
        let m = self.rescaled(scale).checked_add(other.rescaled(scale))?;
        Some(Decimal { mantissa: m, scale })
    }

    /// `(mantissa, scale)` with value `mantissa × 10^-scale`.
    pub fn parts(self) -> (i128, u32) {
        (self.mantissa, self.scale)
    }

    pub fn to_f64(self) -> f64 {
        self.mantissa as f64 / 10f64.powi(self.scale as i32)
    }
}

impl PartialEq for Decimal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Decimal {}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let scale = self.scale.max(other.scale);
        self.rescaled(scale).cmp(&other.rescaled(scale))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.mantissa);
        }
        let sign = if self.mantissa < 0 { "-" } else { "" };
        let abs = self.mantissa.unsigned_abs();
        let div = 10u128.pow(self.scale);
        let frac = format!("{:0width$}", abs % div, width = self.scale as usize);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            write!(f, "{sign}{}", abs / div)
        } else {
            write!(f, "{sign}{}.{frac}", abs / div)
        }
    }
}

/// Splits `text` into its leading number and the remaining annotation.
/// Accepts an optional sign and either `.` or `,` as decimal mark.
/// Returns `None` when the text does not start with a number.
pub fn leading_number(text: &str) -> Option<(Decimal, &str)> {
    let t = text.trim_start();
    let bytes = t.as_bytes();
    let mut i = 0;
    let negative = match bytes.first() {
        Some(b'-') => {
            i += 1;
            true
        }
        Some(b'+') => {
            i += 1;
            false
        }
        _ => false,
    };
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i == int_start {
        return None;
    }
    let mut digits = String::from(&t[int_start..i]);
    let mut scale = 0u32;
    if i + 1 < bytes.len() && (bytes[i] == b'.' || bytes[i] == b',') && bytes[i + 1].is_ascii_digit() {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        digits.push_str(&t[frac_start..i]);
        scale = (i - frac_start) as u32;
    }
    if digits.len() > 30 {
        return None;
    }
    let mut mantissa: i128 = digits.parse().ok()?;
    if negative {
        mantissa = -mantissa;
    }
    Some((Decimal { mantissa, scale }, &t[i..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_leading_token() {
        let (d, rest) = leading_number("9 шт").unwrap();
        assert_eq!(d.to_string(), "9");
        assert_eq!(rest, " шт");
        let (d, _) = leading_number("1,50").unwrap();
        assert_eq!(d.to_string(), "1.5");
        assert!(leading_number("-").is_none());
        assert!(leading_number("шт 2").is_none());
        assert!(leading_number("-2").unwrap().0.is_negative());
    }

    #[test]
    fn exact_sums() {
        let a = leading_number("0.1").unwrap().0;
        let b = leading_number("0.2").unwrap().0;
        assert_eq!(a.checked_add(b).unwrap().to_string(), "0.3");
        let c = leading_number("2").unwrap().0;
        let d = leading_number("3").unwrap().0;
        assert_eq!(c.checked_add(d).unwrap().to_string(), "5");
    }
}
