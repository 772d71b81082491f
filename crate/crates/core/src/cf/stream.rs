use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// How a stream continues past its explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The prefix is the whole expansion of a rational.
    Terminated,
    /// The block repeats forever (quadratic irrationals).
    Periodic(Vec<BigUint>),
    /// Euler's number: 1, 2k, 1 in blocks of three.
    EulerE,
    /// An irrational whose quotients beyond the prefix are not known.
    Unknown,
}

/// A simple continued fraction `[a0; a1, a2, ...]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialQuotientStream {
    a0: BigInt,
    prefix: Vec<BigUint>,
    tail: Tail,
}

impl PartialQuotientStream {
    /// Build from explicit quotients. A terminated stream is normalised so that
    /// its last quotient is at least 2.
    pub fn new(a0: impl Into<BigInt>, quotients: Vec<BigUint>, tail: Tail) -> Result<Self> {
        if quotients.iter().any(Zero::is_zero) {
            return Err(Error::InvalidInput(
                "partial quotients must be positive".into(),
            ));
        }
        if let Tail::Periodic(block) = &tail {
            if block.is_empty() || block.iter().any(Zero::is_zero) {
                return Err(Error::InvalidInput(
                    "periodic block must be nonempty and positive".into(),
                ));
            }
        }
        let mut s = PartialQuotientStream {
            a0: a0.into(),
            prefix: quotients,
            tail,
        };
        if s.tail == Tail::Terminated {
            s.normalize_last();
        }
        Ok(s)
    }

    pub fn from_u64s(a0: i64, quotients: &[u64], tail: Tail) -> Result<Self> {
        Self::new(
            a0,
            quotients.iter().map(|&a| BigUint::from(a)).collect(),
            tail,
        )
    }

    fn normalize_last(&mut self) {
        // [.., a, 1] == [.., a + 1]
        if self.prefix.last().is_some_and(One::is_one) {
            self.prefix.pop();
            match self.prefix.last_mut() {
                Some(last) => *last += 1u32,
                None => self.a0 += 1,
            }
        }
    }

    /// Euclidean algorithm; always terminates.
    pub fn from_rational(x: &BigRational) -> Self {
        let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
        let a0 = n.div_floor(&d);
        let mut quotients = Vec::new();
        let r = n.mod_floor(&d);
        n = d;
        d = r;
        while !d.is_zero() {
            let (a, rem) = n.div_mod_floor(&d);
            quotients.push(a.to_biguint().expect("positive quotient"));
            n = d;
            d = rem;
        }
        let mut s = PartialQuotientStream {
            a0,
            prefix: quotients,
            tail: Tail::Terminated,
        };
        s.normalize_last();
        s
    }

    /// The named constants shipped with the CLI.
    pub fn named(name: &str) -> Result<Self> {
        let one = || BigUint::one();
        let two = || BigUint::from(2u32);
        match name {
            "sqrt2" => Self::new(1, vec![], Tail::Periodic(vec![two()])),
            "sqrt3" => Self::new(1, vec![], Tail::Periodic(vec![one(), two()])),
            "golden" | "phi" => Self::new(1, vec![], Tail::Periodic(vec![one()])),
            "sqrt2p1" => Self::new(2, vec![], Tail::Periodic(vec![two()])),
            "e" => Self::new(2, vec![], Tail::EulerE),
            other => Err(Error::InvalidInput(format!("unknown constant `{other}`"))),
        }
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    pub fn is_rational(&self) -> bool {
        self.tail == Tail::Terminated
    }

    /// Number of quotients after `a0` that can be produced, `None` if unbounded.
    pub fn available(&self) -> Option<usize> {
        match self.tail {
            Tail::Terminated | Tail::Unknown => Some(self.prefix.len()),
            _ => None,
        }
    }

    /// Quotient `a_i` for `i >= 1`, if known.
    pub fn quotient(&self, i: usize) -> Option<BigUint> {
        assert!(i >= 1);
        if i <= self.prefix.len() {
            return Some(self.prefix[i - 1].clone());
        }
        let j = i - 1 - self.prefix.len();
        match &self.tail {
            Tail::Terminated | Tail::Unknown => None,
            Tail::Periodic(block) => Some(block[j % block.len()].clone()),
            Tail::EulerE => {
                let idx = j + 1;
                Some(if idx % 3 == 2 {
                    BigUint::from(2 * (idx + 1) / 3)
                } else {
                    BigUint::one()
                })
            }
        }
    }

    /// First `k` terms (including `a0`), as a stream. A cut stream keeps an unknown tail.
    pub fn truncate(&self, k: usize) -> PartialQuotientStream {
        assert!(k >= 1);
        let want = k - 1;
        let quotients: Vec<BigUint> = (1..=want).map_while(|i| self.quotient(i)).collect();
        let complete = self.is_rational() && quotients.len() == self.prefix.len();
        PartialQuotientStream {
            a0: self.a0.clone(),
            prefix: quotients,
            tail: if complete {
                Tail::Terminated
            } else {
                Tail::Unknown
            },
        }
    }

    /// Exact value of the truncation at `k` terms.
    pub fn convergent_value(&self, k: usize) -> BigRational {
        let t = self.truncate(k);
        let mut value = BigRational::zero();
        let mut first = true;
        for a in t.prefix.iter().rev() {
            let a = BigRational::from(BigInt::from(a.clone()));
            value = if first { a } else { a + value.recip() };
            first = false;
        }
        let a0 = BigRational::from(t.a0.clone());
        if first {
            a0
        } else {
            a0 + value.recip()
        }
    }
}

/// Expand `x` to at most `k` terms (`a0` included).
pub fn canonical_expand(x: &StreamSource, k: usize) -> Result<PartialQuotientStream> {
    if k == 0 {
        return Err(Error::InvalidInput("term count must be at least 1".into()));
    }
    Ok(match x {
        StreamSource::Rational(r) => PartialQuotientStream::from_rational(r).truncate(k),
        StreamSource::Stream(s) => s.truncate(k),
    })
}

/// Input accepted by [`canonical_expand`].
#[derive(Clone, Debug)]
pub enum StreamSource {
    Rational(BigRational),
    Stream(PartialQuotientStream),
}

impl fmt::Display for PartialQuotientStream {
    /// `cf v1: a0; a1 a2 ...` with a trailing `...` when the stream goes on.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cf v1: {};", self.a0)?;
        for a in &self.prefix {
            write!(f, " {a}")?;
        }
        if !self.is_rational() {
            write!(f, " ...")?;
        }
        Ok(())
    }
}

impl FromStr for PartialQuotientStream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix("cf v1:")
            .ok_or_else(|| Error::Parse(format!("missing `cf v1:` header in `{s}`")))?;
        let (a0, rest) = body
            .split_once(';')
            .ok_or_else(|| Error::Parse("missing `;` after a0".into()))?;
        let a0: BigInt = a0
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad a0 `{a0}`")))?;
        let mut quotients = Vec::new();
        let mut tail = Tail::Terminated;
        for tok in rest.split_whitespace() {
            if tok == "..." {
                tail = Tail::Unknown;
                continue;
            }
            quotients.push(
                tok.parse::<BigUint>()
                    .map_err(|_| Error::Parse(format!("bad quotient `{tok}`")))?,
            );
        }
        PartialQuotientStream::new(a0, quotients, tail)
    }
}

/// Parse the CLI shorthand `a0;a1,a2,...` (an explicit finite expansion).
/// A trailing `,...` marks an irrational with unknown continuation.
pub fn parse_cf_list(s: &str) -> Result<PartialQuotientStream> {
    let (a0, rest) = s.split_once(';').unwrap_or((s, ""));
    let a0: BigInt = a0
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad a0 `{a0}`")))?;
    let mut quotients = Vec::new();
    let mut tail = Tail::Terminated;
    for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if tok == "..." {
            tail = Tail::Unknown;
            continue;
        }
        quotients.push(
            tok.parse::<BigUint>()
                .map_err(|_| Error::Parse(format!("bad quotient `{tok}`")))?,
        );
    }
    PartialQuotientStream::new(a0, quotients, tail)
}

/// Small-number view of the known prefix, handy in tests and bindings.
pub fn prefix_u64(s: &PartialQuotientStream) -> Vec<u64> {
    s.prefix()
        .iter()
        .map(|a| a.to_u64().unwrap_or(u64::MAX))
        .collect()
}

pub(crate) fn big(a: &BigUint) -> BigInt {
    BigInt::from(a.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn euclid_examples() {
        let s = canonical_expand(&StreamSource::Rational(rat(7, 5)), 5).unwrap();
        assert_eq!(s.to_string(), "cf v1: 1; 2 2");
        let s = canonical_expand(&StreamSource::Rational(rat(1, 4)), 5).unwrap();
        assert_eq!(s.to_string(), "cf v1: 0; 4");
        let s = canonical_expand(&StreamSource::Rational(rat(-7, 3)), 5).unwrap();
        assert_eq!(s.to_string(), "cf v1: -3; 1 2");
        assert_eq!(s.convergent_value(3), rat(-7, 3));
    }

    #[test]
    fn golden_prefix() {
        let g = PartialQuotientStream::named("golden").unwrap();
        let s = canonical_expand(&StreamSource::Stream(g), 4).unwrap();
        assert_eq!(s.to_string(), "cf v1: 1; 1 1 1 ...");
    }

    #[test]
    fn euler_quotients() {
        let e = PartialQuotientStream::named("e").unwrap();
        let q: Vec<u64> = (1..=9)
            .map(|i| e.quotient(i).unwrap().to_u64().unwrap())
            .collect();
        assert_eq!(q, vec![1, 2, 1, 1, 4, 1, 1, 6, 1]);
    }

    #[test]
    fn trailing_one_is_folded() {
        let s = PartialQuotientStream::from_u64s(1, &[2, 1], Tail::Terminated).unwrap();
        assert_eq!(prefix_u64(&s), vec![3]);
        let s = PartialQuotientStream::from_u64s(1, &[1], Tail::Terminated).unwrap();
        assert_eq!(s.a0(), &BigInt::from(2));
        assert!(s.prefix().is_empty());
        assert!(PartialQuotientStream::from_u64s(1, &[0, 2], Tail::Terminated).is_err());
    }

    #[test]
    fn text_format_parses_back() {
        for text in [
            "cf v1: 1; 2 2",
            "cf v1: 0; 4",
            "cf v1: 3; 7 15 1 292 ...",
            "cf v1: -2;",
        ] {
            let s: PartialQuotientStream = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!("cf v2: 1; 2".parse::<PartialQuotientStream>().is_err());
    }

    #[test]
    fn cli_list() {
        let s = parse_cf_list("1;2,2,2").unwrap();
        assert_eq!(s.to_string(), "cf v1: 1; 2 2 2");
        let s = parse_cf_list("0;1,1,...").unwrap();
        assert_eq!(s.to_string(), "cf v1: 0; 1 1 ...");
    }
}
