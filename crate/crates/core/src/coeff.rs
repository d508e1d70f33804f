//! Exact Gaussian-rational coefficients `re + i im`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Coeff {
    pub re: Rational,
    pub im: Rational,
}

impl Coeff {
    pub const fn from_parts(re: Rational, im: Rational) -> Self {
        Coeff { re, im }
    }

    pub fn int(n: i128) -> Self {
        Coeff::real(Rational::from_integer(n))
    }

    pub fn real(re: Rational) -> Self {
        Coeff {
            re,
            im: Rational::zero(),
        }
    }

    pub fn frac(n: i128, d: i128) -> Self {
        Coeff::real(rat(n, d))
    }

    pub fn i() -> Self {
        Coeff {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    /// `n * i`.
    pub fn imag(n: i128) -> Self {
        Coeff {
            re: Rational::zero(),
            im: Rational::from_integer(n),
        }
    }

    pub fn from_sign(s: i8) -> Self {
        Coeff::int(s as i128)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(self) -> Self {
        Coeff {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Rational {
        self.re * self.re + self.im * self.im
    }

    pub fn inv(self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Coeff {
            re: self.re / n,
            im: -self.im / n,
        })
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff::int(1)
    }
}

impl From<i128> for Coeff {
    fn from(n: i128) -> Self {
        Coeff::int(n)
    }
}

impl From<Rational> for Coeff {
    fn from(r: Rational) -> Self {
        Coeff::real(r)
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, o: Coeff) -> Coeff {
        Coeff {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl AddAssign for Coeff {
    fn add_assign(&mut self, o: Coeff) {
        *self = *self + o;
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, o: Coeff) -> Coeff {
        Coeff {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl SubAssign for Coeff {
    fn sub_assign(&mut self, o: Coeff) {
        *self = *self - o;
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, o: Coeff) -> Coeff {
        if self.im.is_zero() && o.im.is_zero() {
            return Coeff::real(self.re * o.re);
        }
        Coeff {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl MulAssign for Coeff {
    fn mul_assign(&mut self, o: Coeff) {
        *self = *self * o;
    }
}

impl Div for Coeff {
    type Output = Coeff;
    fn div(self, o: Coeff) -> Coeff {
        self * o.inv().expect("division by zero coefficient")
    }
}

fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-self.im).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}i", fmt_rat(&self.im))
                }
            }
            (false, false) => {
                let sep = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({}{}{}i)", fmt_rat(&self.re), sep, fmt_rat(&self.im.abs()))
            }
        }
    }
}

/// Serialized as `{"re": "p/q", "im": "p/q"}`.
#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    re: String,
    im: String,
}

#[derive(Debug, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(String);

pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    match s.trim().split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| err())?;
            let d: i128 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| err())?)),
    }
}

pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Serialize for Coeff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CoeffRepr {
            re: rational_to_string(&self.re),
            im: rational_to_string(&self.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CoeffRepr::deserialize(d)?;
        Ok(Coeff {
            re: parse_rational(&r.re).map_err(serde::de::Error::custom)?,
            im: parse_rational(&r.im).map_err(serde::de::Error::custom)?,
        })
    }
}

impl FromStr for Coeff {
    type Err = ParseRationalError;

    /// Accepts a real rational (`-3/2`) or a purely imaginary one (`i`, `-i`, `3/2i`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(body) = t.strip_suffix('i') {
            let body = body.trim();
            let im = match body {
                "" | "+" => Rational::one(),
                "-" => -Rational::one(),
                b => parse_rational(b)?,
            };
            Ok(Coeff {
                re: Rational::zero(),
                im,
            })
        } else {
            Ok(Coeff::real(parse_rational(t)?))
        }
    }
}
