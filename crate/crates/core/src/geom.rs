//! Sheet geometry in millimetres.
//!
//! Lengths are stored as integer thousandths of a millimetre so that
//! translation and layout arithmetic is exact and files round-trip without
//! drift. On disk they are plain JSON numbers with at most three fractional
//! digits.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A length on the drawing sheet, in thousandths of a millimetre.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mm(i64);

impl Mm {
    pub const ZERO: Mm = Mm(0);

    pub const fn from_thousandths(t: i64) -> Self {
        Mm(t)
    }

    pub const fn whole(mm: i64) -> Self {
        Mm(mm * 1000)
    }

    /// Rounds to the nearest thousandth.
    pub fn from_f64(mm: f64) -> Self {
        Mm((mm * 1000.0).round() as i64)
    }

    pub fn thousandths(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn max(self, other: Mm) -> Mm {
        Mm(self.0.max(other.0))
    }

    pub fn min(self, other: Mm) -> Mm {
        Mm(self.0.min(other.0))
    }
}

impl fmt::Display for Mm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let frac = abs % 1000;
        if frac == 0 {
            write!(f, "{sign}{}", abs / 1000)
        } else {
            let digits = format!("{frac:03}");
            write!(f, "{sign}{}.{}", abs / 1000, digits.trim_end_matches('0'))
        }
    }
}

impl Add for Mm {
    type Output = Mm;
    fn add(self, rhs: Mm) -> Mm {
        Mm(self.0 + rhs.0)
    }
}

impl AddAssign for Mm {
    fn add_assign(&mut self, rhs: Mm) {
        self.0 += rhs.0;
    }
}

impl Sub for Mm {
    type Output = Mm;
    fn sub(self, rhs: Mm) -> Mm {
        Mm(self.0 - rhs.0)
    }
}

impl Neg for Mm {
    type Output = Mm;
    fn neg(self) -> Mm {
        Mm(-self.0)
    }
}

impl Mul<i64> for Mm {
    type Output = Mm;
    fn mul(self, rhs: i64) -> Mm {
        Mm(self.0 * rhs)
    }
}

impl std::iter::Sum for Mm {
    fn sum<I: Iterator<Item = Mm>>(iter: I) -> Mm {
        Mm(iter.map(|m| m.0).sum())
    }
}

impl Serialize for Mm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 % 1000 == 0 {
            s.serialize_i64(self.0 / 1000)
        } else {
            s.serialize_f64(self.as_f64())
        }
    }
}

impl<'de> Deserialize<'de> for Mm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if !v.is_finite() {
            return Err(serde::de::Error::custom("length must be finite"));
        }
        Ok(Mm::from_f64(v))
    }
}

/// A point on the sheet. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[Mm; 2]", into = "[Mm; 2]")]
pub struct Point {
    pub x: Mm,
    pub y: Mm,
}

impl Point {
    pub const ORIGIN: Point = Point { x: Mm::ZERO, y: Mm::ZERO };

    pub fn new(x: Mm, y: Mm) -> Self {
        Point { x, y }
    }

    pub fn mm(x: f64, y: f64) -> Self {
        Point { x: Mm::from_f64(x), y: Mm::from_f64(y) }
    }

    pub fn offset(self, dx: Mm, dy: Mm) -> Self {
        Point { x: self.x + dx, y: self.y + dy }
    }
}

impl From<[Mm; 2]> for Point {
    fn from(v: [Mm; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl From<Point> for [Mm; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Axis-aligned rectangle, half-open: `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: Mm,
    pub y0: Mm,
    pub x1: Mm,
    pub y1: Mm,
}

impl Rect {
    pub fn new(x0: Mm, y0: Mm, x1: Mm, y1: Mm) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x < self.x1 && p.y >= self.y0 && p.y < self.y1
    }

    pub fn width(&self) -> Mm {
        self.x1 - self.x0
    }

    pub fn height(&self) -> Mm {
        self.y1 - self.y0
    }

    pub fn center(&self) -> Point {
        Point {
            x: Mm::from_thousandths((self.x0.thousandths() + self.x1.thousandths()) / 2),
            y: Mm::from_thousandths((self.y0.thousandths() + self.y1.thousandths()) / 2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_trims_fraction() {
        assert_eq!(Mm::from_f64(12.5).to_string(), "12.5");
        assert_eq!(Mm::whole(40).to_string(), "40");
        assert_eq!(Mm::from_f64(-0.125).to_string(), "-0.125");
    }

    #[test]
    fn json_round_trip_keeps_three_digits() {
        let p = Point::mm(10.1234, -3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[10.123,-3]");
        let back: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rect_is_half_open() {
        let r = Rect::new(Mm::ZERO, Mm::ZERO, Mm::whole(10), Mm::whole(5));
        assert!(r.contains(Point::mm(0.0, 0.0)));
        assert!(!r.contains(Point::mm(10.0, 1.0)));
        assert!(!r.contains(Point::mm(1.0, 5.0)));
    }
}
