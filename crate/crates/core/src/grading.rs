//! Z2 x Z2 grades and the bicharacter sign rule.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An element `[g1 g2]` of Z2 x Z2.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Grade {
    g1: u8,
    g2: u8,
}

impl Grade {
    pub const G00: Grade = Grade { g1: 0, g2: 0 };
    pub const G10: Grade = Grade { g1: 1, g2: 0 };
    pub const G01: Grade = Grade { g1: 0, g2: 1 };
    pub const G11: Grade = Grade { g1: 1, g2: 1 };

    pub const ALL: [Grade; 4] = [Grade::G00, Grade::G10, Grade::G01, Grade::G11];

    pub fn new(g1: u8, g2: u8) -> Self {
        Grade {
            g1: g1 & 1,
            g2: g2 & 1,
        }
    }

    pub fn components(self) -> (u8, u8) {
        (self.g1, self.g2)
    }

    /// Inner product `a1 b1 + a2 b2` mod 2.
    pub fn dot(self, other: Grade) -> u8 {
        (self.g1 * other.g1 + self.g2 * other.g2) & 1
    }

    /// `(-1)^{a.b}` as +1 / -1.
    pub fn sign(self, other: Grade) -> i8 {
        if self.dot(other) == 0 {
            1
        } else {
            -1
        }
    }

    /// Z2 parity: [00],[11] even, [10],[01] odd.
    pub fn is_odd(self) -> bool {
        self.g1 != self.g2
    }

    /// `self` added to itself `n` times.
    pub fn times(self, n: u32) -> Grade {
        if n.is_multiple_of(2) {
            Grade::G00
        } else {
            self
        }
    }
}

impl Add for Grade {
    type Output = Grade;

    fn add(self, rhs: Grade) -> Grade {
        Grade {
            g1: self.g1 ^ rhs.g1,
            g2: self.g2 ^ rhs.g2,
        }
    }
}

/// Componentwise sum mod 2.
pub fn grade_add(a: Grade, b: Grade) -> Grade {
    a + b
}

/// `(-1)^{a.b}`.
pub fn grade_sign(a: Grade, b: Grade) -> i8 {
    a.sign(b)
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}{}]", self.g1, self.g2)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid grade literal {0:?}, expected one of [00], [10], [01], [11]")]
pub struct ParseGradeError(String);

impl FromStr for Grade {
    type Err = ParseGradeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| ParseGradeError(s.to_string()))?;
        let bits: Vec<char> = inner.chars().filter(|c| !c.is_whitespace()).collect();
        match bits.as_slice() {
            [a, b] if matches!(a, '0' | '1') && matches!(b, '0' | '1') => {
                Ok(Grade::new(*a as u8 - b'0', *b as u8 - b'0'))
            }
            _ => Err(ParseGradeError(s.to_string())),
        }
    }
}

impl Serialize for Grade {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Grade {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
