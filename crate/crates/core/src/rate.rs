//! Hopping rates, kept both as exact rationals and as floats.

use crate::error::{invalid, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// A nonnegative rate. Fractions like `2/3` and decimals like `0.8` are held exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Rate {
    exact: BigRational,
    value: f64,
}

impl Rate {
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return invalid("zero denominator in rate");
        }
        Self::from_exact(BigRational::new(num.into(), den.into()))
    }

    pub fn from_exact(exact: BigRational) -> Result<Self> {
        if exact.is_negative() {
            return invalid(format!("negative rate {exact}"));
        }
        let value = exact.to_f64().unwrap_or(f64::NAN);
        Ok(Self { exact, value })
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() || v < 0.0 {
            return invalid(format!("rate must be finite and nonnegative, got {v}"));
        }
        let exact = BigRational::from_float(v).unwrap_or_else(BigRational::zero);
        Ok(Self { exact, value: v })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(num, den))
}

impl FromStr for Rate {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((a, b)) = t.split_once('/') {
            let num = parse_decimal(a.trim());
            let den = parse_decimal(b.trim());
            return match (num, den) {
                (Some(n), Some(d)) if !d.is_zero() => Self::from_exact(n / d),
                _ => invalid(format!("cannot parse rate '{s}'")),
            };
        }
        if let Some(r) = parse_decimal(t) {
            return Self::from_exact(r);
        }
        match t.parse::<f64>() {
            Ok(v) => Self::from_f64(v),
            Err(_) => invalid(format!("cannot parse rate '{s}'")),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact.denom().is_one() {
            write!(f, "{}", self.exact.numer())
        } else {
            write!(f, "{}", self.exact)
        }
    }
}

/// The pair of hopping rates: `p` for a larger label hopping right, `q` left.
#[derive(Clone, Debug, PartialEq)]
pub struct Rates {
    pub p: Rate,
    pub q: Rate,
}

impl Rates {
    pub fn new(p: Rate, q: Rate) -> Result<Self> {
        if p.exact.is_zero() && q.exact.is_zero() {
            return invalid("p + q must be positive");
        }
        Ok(Self { p, q })
    }

    pub fn parse(p: &str, q: &str) -> Result<Self> {
        Self::new(p.parse()?, q.parse()?)
    }

    pub fn from_f64(p: f64, q: f64) -> Result<Self> {
        Self::new(Rate::from_f64(p)?, Rate::from_f64(q)?)
    }

    pub fn p(&self) -> f64 {
        self.p.value
    }

    pub fn q(&self) -> f64 {
        self.q.value
    }

    /// The same rates with p and q exchanged.
    pub fn swapped(&self) -> Self {
        Self { p: self.q.clone(), q: self.p.clone() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.p.exact == self.q.exact
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_decimals_are_exact() {
        let r: Rate = "2/3".parse().unwrap();
        assert_eq!(r.exact(), &BigRational::new(2.into(), 3.into()));
        let r: Rate = "0.8".parse().unwrap();
        assert_eq!(r.exact(), &BigRational::new(4.into(), 5.into()));
        assert!((r.value() - 0.8).abs() < 1e-16);
        let r: Rate = "1e-1".parse().unwrap();
        assert!((r.value() - 0.1).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!("-1".parse::<Rate>().is_err());
        assert!("1/0".parse::<Rate>().is_err());
        assert!("abc".parse::<Rate>().is_err());
        assert!(Rates::parse("0", "0").is_err());
    }
}
