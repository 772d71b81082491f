use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cf::PrimitiveVector;
use crate::error::{Error, Result};

/// An interval with exact rational endpoints, each open or closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInput(format!(
                "interval needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(RationalInterval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: BigRational, hi: BigRational) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: BigRational, hi: BigRational) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    /// `[center - radius, center + radius]`
    pub fn around(center: &BigRational, radius: &BigRational) -> Result<Self> {
        Self::closed(center - radius, center + radius)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let above = if self.lo_closed {
            *x >= self.lo
        } else {
            *x > self.lo
        };
        let below = if self.hi_closed {
            *x <= self.hi
        } else {
            *x < self.hi
        };
        above && below
    }

    /// Whether `other` lies inside `self`.
    pub fn contains_interval(&self, other: &RationalInterval) -> bool {
        let lo_ok =
            other.lo > self.lo || (other.lo == self.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok =
            other.hi < self.hi || (other.hi == self.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Parse a rational written as `a/b`, an integer, or a finite decimal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(n, d);
    Ok(if neg { -r } else { r })
}

impl FromStr for RationalInterval {
    type Err = Error;

    /// `[lo,hi]`, `(lo,hi)`, mixed brackets, or bare `lo,hi` (closed).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (lo_closed, rest) = match s.chars().next() {
            Some('[') => (true, &s[1..]),
            Some('(') => (false, &s[1..]),
            _ => (true, s),
        };
        let (hi_closed, body) = match rest.chars().last() {
            Some(']') => (true, &rest[..rest.len() - 1]),
            Some(')') => (false, &rest[..rest.len() - 1]),
            _ => (true, rest),
        };
        let (lo, hi) = body
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("interval `{s}` needs a comma")))?;
        Self::new(
            parse_rational(lo)?,
            parse_rational(hi)?,
            lo_closed,
            hi_closed,
        )
    }
}

/// The rational of least height in `I`, the smaller one on ties.
pub fn min_height_in_interval(i: &RationalInterval) -> PrimitiveVector {
    let r = simplest(&i.lo, i.lo_closed, Some(&i.hi), i.hi_closed);
    PrimitiveVector::from_ratio(&r)
}

/// Stern–Brocot descent; `hi = None` means `+inf`.
fn simplest(
    lo: &BigRational,
    lo_closed: bool,
    hi: Option<&BigRational>,
    hi_closed: bool,
) -> BigRational {
    let n = lo.floor();
    let first_int = if lo.is_integer() && lo_closed {
        n.clone()
    } else {
        &n + BigRational::one()
    };
    let inside = match hi {
        None => true,
        Some(h) => first_int < *h || (first_int == *h && hi_closed),
    };
    if inside {
        return first_int;
    }
    // no integer in the interval, so n < lo < hi <= n + 1: recurse on 1/(x - n)
    let hi = hi.expect("finite upper end");
    let new_lo = (hi - &n).recip();
    let gap = lo - &n;
    let new_hi = if gap.is_zero() {
        None
    } else {
        Some(gap.recip())
    };
    let y = simplest(&new_lo, hi_closed, new_hi.as_ref(), lo_closed);
    n + y.recip()
}

/// Smallest height of a rational in `I`.
pub fn min_height(i: &RationalInterval) -> BigInt {
    min_height_in_interval(i).height().clone()
}
