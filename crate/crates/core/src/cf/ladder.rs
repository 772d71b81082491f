use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::stream::{big, PartialQuotientStream, Tail};
use super::vector::{IntVec, PrimitiveVector};
use crate::error::{Error, Result};

/// A sequence `v_0, v_1, ...` with `v_{k+1} = a v_k + v_{k-1}` and `v_{-1} = seed * (1, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentLadder {
    entries: Vec<PrimitiveVector>,
    seed: i8,
    quotients: Vec<BigInt>,
    complete: bool,
}

impl ConvergentLadder {
    /// Single-entry ladder `v_0`, with the seed sign for `v_{-1}`.
    pub fn start(v0: PrimitiveVector, seed: i8) -> Result<Self> {
        if !v0.height().is_one() {
            return Err(Error::InvalidInput(format!(
                "v_0 must have height 1, got {v0}"
            )));
        }
        Ok(ConvergentLadder {
            entries: vec![v0],
            seed: if seed < 0 { -1 } else { 1 },
            quotients: Vec::new(),
            complete: false,
        })
    }

    /// Rebuild from entries and seed, checking every ladder invariant.
    pub fn from_entries(entries: Vec<PrimitiveVector>, seed: i8) -> Result<Self> {
        let mut it = entries.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidInput("empty ladder".into()))?;
        let mut ladder = ConvergentLadder::start(first, seed)?;
        for v in it {
            ladder.push_entry(v)?;
        }
        Ok(ladder)
    }

    pub fn entries(&self) -> &[PrimitiveVector] {
        &self.entries
    }

    pub fn seed(&self) -> i8 {
        self.seed
    }

    /// The integer `a` used for each step `v_k -> v_{k+1}`.
    pub fn quotient_trace(&self) -> &[BigInt] {
        &self.quotients
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> &PrimitiveVector {
        self.entries.last().expect("ladder is never empty")
    }

    pub fn heights(&self) -> Vec<BigInt> {
        self.entries.iter().map(|v| v.height().clone()).collect()
    }

    /// True when the ladder ends at the value of a finite (rational) stream.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub(crate) fn mark_complete(&mut self) {
        self.complete = true;
    }

    /// `v_{k-1}` for the current last entry, as a plain vector.
    fn previous(&self) -> IntVec {
        match self.entries.len() {
            0 | 1 => IntVec::seed(self.seed),
            n => self.entries[n - 2].as_vec(),
        }
    }

    /// Append `a v_k + v_{k-1}`.
    pub fn push_quotient(&mut self, a: BigInt) -> Result<&PrimitiveVector> {
        let min = if self.entries.len() == 1 { 2 } else { 1 };
        if a < BigInt::from(min) {
            return Err(Error::InvalidInput(format!(
                "step {} needs a >= {min}, got {a}",
                self.entries.len() - 1
            )));
        }
        let next = self.last().as_vec().mul_add(&a, &self.previous());
        let v = PrimitiveVector::try_from(next)?;
        self.entries.push(v);
        self.quotients.push(a);
        Ok(self.last())
    }

    /// Append an explicit vector, recovering its quotient.
    pub fn push_entry(&mut self, v: PrimitiveVector) -> Result<()> {
        let prev = self.previous();
        let last = self.last().as_vec();
        let diff = IntVec::new(v.p() - &prev.p, v.height() - &prev.q);
        // diff must be a multiple a * last
        let a = if !last.q.is_zero() {
            &diff.q / &last.q
        } else {
            BigInt::zero()
        };
        if diff != IntVec::new(&a * &last.p, &a * &last.q) {
            return Err(Error::InvalidInput(format!(
                "{v} does not follow {} in a ladder",
                self.last()
            )));
        }
        self.push_quotient(a).map(|_| ())
    }

    /// Check every invariant; used in tests and after deserialisation.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !self.entries[0].height().is_one() {
            return bad("|v_0| != 1".into());
        }
        let mut prev = IntVec::seed(self.seed);
        for (k, w) in self.entries.windows(2).enumerate() {
            let (u, v) = (&w[0], &w[1]);
            let a = &self.quotients[k];
            if u.as_vec().mul_add(a, &prev) != v.as_vec() {
                return bad(format!("recurrence broken at step {k}"));
            }
            if *a < BigInt::from(if k == 0 { 2 } else { 1 }) {
                return bad(format!("quotient too small at step {k}"));
            }
            if u.height() >= v.height() || !u.unimodular_with(v) {
                return bad(format!("heights or cross product fail at step {k}"));
            }
            prev = u.as_vec();
        }
        Ok(())
    }

    /// Continued-fraction quotients reproducing this ladder, with the given tail.
    pub fn to_stream(&self, tail: Tail) -> Result<PartialQuotientStream> {
        let to_u = |a: &BigInt| a.to_biguint().expect("positive quotient");
        let mut quotients = Vec::new();
        let a0;
        if self.seed < 0 {
            a0 = self.entries[0].p() - 1;
            quotients.push(num_bigint::BigUint::one());
            if let Some((first, rest)) = self.quotients.split_first() {
                quotients.push(to_u(&(first - 1)));
                quotients.extend(rest.iter().map(to_u));
            }
        } else {
            a0 = self.entries[0].p().clone();
            quotients.extend(self.quotients.iter().map(to_u));
        }
        PartialQuotientStream::new(a0, quotients, tail)
    }
}

/// Best approximations of the second kind of the stream's value, `k` at most.
///
/// A finite stream may run out first; the result then has fewer than `k`
/// entries and `is_complete()` is set. For an unknown tail, a prefix `[a0]`
/// alone does not fix `v_0` and an error is returned.
pub fn ladder_from_stream(stream: &PartialQuotientStream, k: usize) -> Result<ConvergentLadder> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "ladder length must be at least 1".into(),
        ));
    }
    let a0 = stream.a0().clone();
    let rewrite = match stream.quotient(1) {
        Some(a1) => a1.is_one(),
        None if stream.is_rational() => false,
        None => {
            return Err(Error::Undecidable(
                "the nearest integer needs the first quotient after a0".into(),
            ))
        }
    };
    // [a0; 1, a2, ...]: start at a0 + 1 with v_{-1} = -(1, 0), first step a2 + 1
    let step_quotient = |j: usize| -> Option<BigInt> {
        if rewrite {
            stream
                .quotient(j + 2)
                .map(|a| if j == 0 { big(&a) + 1 } else { big(&a) })
        } else {
            stream.quotient(j + 1).map(|a| big(&a))
        }
    };
    let (v0, seed) = if rewrite { (a0 + 1, -1) } else { (a0, 1) };
    let mut ladder = ConvergentLadder::start(PrimitiveVector::integer(v0), seed)?;
    while ladder.len() < k {
        match step_quotient(ladder.len() - 1) {
            Some(a) => {
                ladder.push_quotient(a)?;
            }
            None => break,
        }
    }
    if stream.is_rational() && step_quotient(ladder.len() - 1).is_none() {
        ladder.mark_complete();
    }
    Ok(ladder)
}

impl fmt::Display for ConvergentLadder {
    /// `ladder v1 seed=<+1|-1>` followed by one `p q` line per entry.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "ladder v1 seed={}",
            if self.seed < 0 { "-1" } else { "+1" }
        )?;
        for v in &self.entries {
            writeln!(f, "{} {}", v.p(), v.height())?;
        }
        Ok(())
    }
}

impl FromStr for ConvergentLadder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty ladder text".into()))?;
        let seed = match header {
            "ladder v1 seed=+1" => 1,
            "ladder v1 seed=-1" => -1,
            other => return Err(Error::Parse(format!("bad ladder header `{other}`"))),
        };
        let mut entries = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let (Some(p), Some(q), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("bad ladder line `{line}`")));
            };
            let p: BigInt = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad p `{p}`")))?;
            let q: BigInt = q
                .parse()
                .map_err(|_| Error::Parse(format!("bad q `{q}`")))?;
            entries.push(PrimitiveVector::new(p, q)?);
        }
        ConvergentLadder::from_entries(entries, seed)
    }
}

/// `|x - p_k/q_k| < 1/(q_k q_{k+1})` for every consecutive pair, checked exactly.
pub fn approximation_gaps_hold(ladder: &ConvergentLadder, x: &num_rational::BigRational) -> bool {
    ladder.entries().windows(2).all(|w| {
        let gap = (x - w[0].value()).abs();
        let bound = num_rational::BigRational::new(BigInt::one(), w[0].height() * w[1].height());
        gap < bound
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::vector::pv;

    fn ladder_of(a0: i64, q: &[u64], tail: Tail, k: usize) -> ConvergentLadder {
        let s = PartialQuotientStream::from_u64s(a0, q, tail).unwrap();
        ladder_from_stream(&s, k).unwrap()
    }

    #[test]
    fn sqrt2_prefix() {
        let l = ladder_of(1, &[2, 2, 2], Tail::Terminated, 10);
        assert_eq!(l.entries(), &[pv(1, 1), pv(3, 2), pv(7, 5), pv(17, 12)]);
        assert_eq!(l.seed(), 1);
        assert!(l.is_complete());
        l.validate().unwrap();
    }

    #[test]
    fn golden_uses_rewrite() {
        let l = ladder_of(1, &[1, 1, 1, 1], Tail::Unknown, 10);
        assert_eq!(l.entries(), &[pv(2, 1), pv(3, 2), pv(5, 3), pv(8, 5)]);
        assert_eq!(l.seed(), -1);
        assert_eq!(l.quotient_trace()[0], BigInt::from(2));
        l.validate().unwrap();
    }

    #[test]
    fn quarter() {
        let l = ladder_of(0, &[4], Tail::Terminated, 5);
        assert_eq!(l.entries(), &[pv(0, 1), pv(1, 4)]);
        assert!(l.is_complete());
    }

    #[test]
    fn two_thirds() {
        let l = ladder_of(0, &[1, 2], Tail::Terminated, 5);
        assert_eq!(l.entries(), &[pv(1, 1), pv(2, 3)]);
        assert!(l.is_complete());
    }

    #[test]
    fn truncated_request() {
        let l = ladder_of(1, &[2, 2, 2], Tail::Terminated, 2);
        assert_eq!(l.len(), 2);
        assert!(!l.is_complete());
    }

    #[test]
    fn stream_round_trip() {
        for (a0, q) in [
            (1i64, vec![2u64, 2, 2]),
            (1, vec![1, 1, 1, 1, 3]),
            (0, vec![1, 2]),
            (-2, vec![5, 1, 4]),
        ] {
            let l = ladder_of(a0, &q, Tail::Unknown, 20);
            let back = ladder_from_stream(&l.to_stream(Tail::Unknown).unwrap(), 20).unwrap();
            assert_eq!(back.entries(), l.entries());
        }
    }

    #[test]
    fn text_round_trip() {
        let l = ladder_of(1, &[1, 1, 1, 1], Tail::Unknown, 10);
        let text = l.to_string();
        assert!(text.starts_with("ladder v1 seed=-1\n2 1\n3 2\n"));
        let back: ConvergentLadder = text.parse().unwrap();
        assert_eq!(
            back,
            ConvergentLadder {
                complete: false,
                ..l
            }
        );
        assert!("ladder v1 seed=+1\n1 1\n2 1\n"
            .parse::<ConvergentLadder>()
            .is_err());
    }
}
