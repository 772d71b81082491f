use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::ladder::{ladder_from_stream, ConvergentLadder};
use super::stream::{PartialQuotientStream, Tail};
use crate::error::{Error, Result};

/// A real number given by its quotient stream, with a lazily grown ladder.
#[derive(Debug)]
pub struct RealHandle {
    stream: PartialQuotientStream,
    cache: Mutex<Option<(ConvergentLadder, usize)>>,
}

impl Clone for RealHandle {
    fn clone(&self) -> Self {
        RealHandle {
            stream: self.stream.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl RealHandle {
    pub fn new(stream: PartialQuotientStream) -> Self {
        RealHandle {
            stream,
            cache: Mutex::new(None),
        }
    }

    pub fn rational(x: &BigRational) -> Self {
        Self::new(PartialQuotientStream::from_rational(x))
    }

    pub fn named(name: &str) -> Result<Self> {
        Ok(Self::new(PartialQuotientStream::named(name)?))
    }

    /// A real whose known convergents are exactly the given ladder.
    pub fn from_ladder(ladder: &ConvergentLadder) -> Result<Self> {
        let tail = if ladder.is_complete() {
            Tail::Terminated
        } else {
            Tail::Unknown
        };
        Ok(Self::new(ladder.to_stream(tail)?))
    }

    pub fn stream(&self) -> &PartialQuotientStream {
        &self.stream
    }

    pub fn is_rational(&self) -> bool {
        self.stream.is_rational()
    }

    /// True when the stream can always be extended.
    pub fn is_unbounded(&self) -> bool {
        self.stream.available().is_none()
    }

    /// Ladder prefix with at most `k` entries.
    pub fn ladder(&self, k: usize) -> Result<ConvergentLadder> {
        let mut cache = self.cache.lock().unwrap();
        if let Some((l, asked)) = cache.as_ref() {
            // a short answer to a bigger request means the stream ran out
            if l.len() >= k || l.len() < *asked {
                return Ok(truncated(l, k));
            }
        }
        let want = k.max(cache.as_ref().map_or(0, |(l, _)| 2 * l.len()));
        let l = ladder_from_stream(&self.stream, want)?;
        let out = truncated(&l, k);
        *cache = Some((l, want));
        Ok(out)
    }

    /// Grow the ladder until its last height exceeds `q` or the stream runs out.
    pub fn ladder_past(&self, q: &BigInt) -> Result<ConvergentLadder> {
        let mut k = 8;
        loop {
            let l = self.ladder(k)?;
            if l.last().height() > q || l.len() < k {
                return Ok(l);
            }
            k *= 2;
        }
    }

    /// Every known ladder entry with height at most `h`, plus whether the list
    /// is known to be exhaustive.
    pub fn ladder_through(&self, h: &BigInt) -> Result<(ConvergentLadder, bool)> {
        let l = self.ladder_past(h)?;
        let exhaustive = l.last().height() > h || l.is_complete();
        Ok((l, exhaustive))
    }

    /// Floating approximation of the value.
    pub fn approx(&self) -> f64 {
        let l = match self.ladder(64) {
            Ok(l) => l,
            Err(_) => return self.stream.a0().to_f64().unwrap_or(f64::NAN) + 0.5,
        };
        l.last().value().to_f64().unwrap_or(f64::NAN)
    }
}

fn truncated(l: &ConvergentLadder, k: usize) -> ConvergentLadder {
    if l.len() <= k {
        return l.clone();
    }
    let entries = l.entries()[..k].to_vec();
    ConvergentLadder::from_entries(entries, l.seed()).expect("prefix of a valid ladder")
}

/// Whether `q` is a best-approximation denominator of `x`, i.e. `‖q x‖ < ‖q' x‖`
/// for every `1 <= q' < q`. Decided by ladder membership.
pub fn is_best_approx(q: &BigInt, x: &RealHandle) -> Result<bool> {
    if *q < BigInt::from(1) {
        return Err(Error::InvalidInput(format!("q must be positive, got {q}")));
    }
    if *q == BigInt::from(1) {
        return Ok(true);
    }
    let l = x.ladder_past(q)?;
    if l.entries().iter().any(|v| v.height() == q) {
        return Ok(true);
    }
    if l.last().height() > q || l.is_complete() {
        return Ok(false);
    }
    Err(Error::Undecidable(format!(
        "ladder stops at height {} below {q}",
        l.last().height()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_examples() {
        let x = RealHandle::named("sqrt2").unwrap();
        assert!(is_best_approx(&BigInt::from(5), &x).unwrap());
        assert!(!is_best_approx(&BigInt::from(4), &x).unwrap());
        assert!(is_best_approx(&BigInt::from(1), &x).unwrap());
        assert!(is_best_approx(&BigInt::from(985), &x).unwrap());
    }

    #[test]
    fn unknown_tail_is_undecidable() {
        let s = PartialQuotientStream::from_u64s(0, &[3, 4], Tail::Unknown).unwrap();
        let x = RealHandle::new(s);
        assert!(is_best_approx(&BigInt::from(13), &x).unwrap());
        assert!(matches!(
            is_best_approx(&BigInt::from(20), &x),
            Err(Error::Undecidable(_))
        ));
    }

    #[test]
    fn cache_grows() {
        let x = RealHandle::named("e").unwrap();
        assert_eq!(x.ladder(3).unwrap().len(), 3);
        assert_eq!(x.ladder(40).unwrap().len(), 40);
        assert_eq!(x.ladder(5).unwrap().len(), 5);
        assert!((x.approx() - std::f64::consts::E).abs() < 1e-15);
    }
}
