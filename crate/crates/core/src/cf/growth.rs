//! Ladders with prescribed growth `q_k^(1+δ) <= q_{k+1} <= 2 q_k^(1+δ)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::ladder::ConvergentLadder;
use crate::error::{Error, Result};
use crate::logs::{exact, ln_bounds, Bounds};

/// Largest exponent size (bits of the exact powers) handled without logs.
const EXACT_BITS: u64 = 1 << 22;

/// Result of [`jb_ladder`]: the extended ladder and the first index `k` from
/// which every step obeys the growth window.
#[derive(Clone, Debug)]
pub struct JbLadder {
    pub ladder: ConvergentLadder,
    pub threshold: usize,
}

/// The growth exponent, kept exactly when it is a dyadic with a small denominator.
#[derive(Clone, Copy, Debug)]
struct Exponent {
    delta: f64,
    ratio: Option<(u64, u64)>,
}

impl Exponent {
    fn new(delta: f64) -> Self {
        let r = exact(delta);
        let ratio = match (r.numer().to_u64(), r.denom().to_u64()) {
            (Some(n), Some(d)) if d <= 1024 => Some((n, d)),
            _ => None,
        };
        Exponent { delta, ratio }
    }

    /// Is `n >= q^(1+δ)`? `None` when the certified logs cannot tell.
    fn at_least_power(&self, n: &BigInt, q: &BigInt) -> Option<bool> {
        if let Some((num, den)) = self.ratio {
            if q.bits() * (num + den) <= EXACT_BITS {
                let lhs = num_traits::pow(n.clone(), den as usize);
                let rhs = num_traits::pow(q.clone(), (num + den) as usize);
                return Some(lhs >= rhs);
            }
        }
        let (ln_n, target) = (ln_bounds(n), self.target(q));
        if ln_n.lo >= target.hi {
            Some(true)
        } else if ln_n.hi < target.lo {
            Some(false)
        } else {
            None
        }
    }

    /// Is `n <= 2 q^(1+δ)`?
    fn at_most_twice_power(&self, n: &BigInt, q: &BigInt) -> Option<bool> {
        if let Some((num, den)) = self.ratio {
            if q.bits() * (num + den) <= EXACT_BITS {
                let lhs = num_traits::pow(n.clone(), den as usize);
                let rhs = num_traits::pow(q.clone(), (num + den) as usize) << den;
                return Some(lhs <= rhs);
            }
        }
        let (ln_n, target) = (ln_bounds(n), self.target(q));
        let ln2 = std::f64::consts::LN_2;
        let twice = Bounds {
            lo: target.lo + ln2 * (1.0 - 1e-15),
            hi: target.hi + ln2 * (1.0 + 1e-15),
        };
        if ln_n.hi <= twice.lo {
            Some(true)
        } else if ln_n.lo > twice.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Bounds on `(1+δ) ln q`.
    fn target(&self, q: &BigInt) -> Bounds {
        ln_bounds(q).scale(1.0 + self.delta)
    }
}

/// Extend `start` to `v_0 .. v_k` choosing, at each step, the smallest
/// quotient whose height lands in the growth window.
pub fn jb_ladder(delta: f64, k: usize, start: &ConvergentLadder) -> Result<JbLadder> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "growth exponent must be positive, got {delta}"
        )));
    }
    start.validate()?;
    let exponent = Exponent::new(delta);
    let threshold = start.len() - 1;
    let mut ladder = start.clone();
    while ladder.len() <= k {
        let step = ladder.len() - 1;
        let q = ladder.last().height().clone();
        let q_prev = if step == 0 {
            BigInt::from(0)
        } else {
            ladder.entries()[step - 1].height().clone()
        };
        let min_a = BigInt::from(if step == 0 { 2 } else { 1 });
        let height = |a: &BigInt| a * &q + &q_prev;
        let reaches = |a: &BigInt| -> Result<bool> {
            exponent.at_least_power(&height(a), &q).ok_or_else(|| {
                Error::Undecidable(format!("growth window lower edge at step {step}"))
            })
        };
        // doubling bracket, then binary search for the smallest a reaching the window
        let mut lo = min_a.clone();
        let a = if reaches(&lo)? {
            lo
        } else {
            let mut hi = &lo * 2;
            while !reaches(&hi)? {
                lo = hi.clone();
                hi *= 2;
            }
            // reaches(lo) is false, reaches(hi) is true
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
                if reaches(&mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        let next = height(&a);
        match exponent.at_most_twice_power(&next, &q) {
            Some(true) => {}
            Some(false) => {
                return Err(Error::EmptyWindow {
                    step,
                    lower: window_edge(&q, delta, 1.0),
                    upper: window_edge(&q, delta, 2.0),
                })
            }
            None => {
                return Err(Error::Undecidable(format!(
                    "growth window upper edge at step {step}"
                )))
            }
        }
        debug_assert!(a.is_positive());
        ladder.push_quotient(a)?;
    }
    Ok(JbLadder { ladder, threshold })
}

fn window_edge(q: &BigInt, delta: f64, factor: f64) -> String {
    let ln = crate::logs::ln_big(q) * (1.0 + delta) + factor.ln();
    if ln < 700.0 {
        crate::logs::fmt_g(ln.exp(), 12)
    } else {
        format!("exp({})", crate::logs::fmt_g(ln, 12))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::ladder::ladder_from_stream;
    use crate::cf::stream::{PartialQuotientStream, Tail};

    fn start() -> ConvergentLadder {
        let s = PartialQuotientStream::from_u64s(0, &[2], Tail::Unknown).unwrap();
        ladder_from_stream(&s, 2).unwrap()
    }

    fn heights(l: &ConvergentLadder) -> Vec<u64> {
        l.heights().iter().map(|h| h.to_u64().unwrap()).collect()
    }

    #[test]
    fn square_growth() {
        let jb = jb_ladder(1.0, 4, &start()).unwrap();
        assert_eq!(heights(&jb.ladder), vec![1, 2, 5, 27, 734]);
        assert_eq!(jb.threshold, 1);
        let jb = jb_ladder(1.0, 2, &start()).unwrap();
        assert_eq!(heights(&jb.ladder), vec![1, 2, 5]);
    }

    #[test]
    fn slow_growth() {
        let jb = jb_ladder(0.01, 2, &start()).unwrap();
        assert_eq!(heights(&jb.ladder), vec![1, 2, 3]);
    }

    #[test]
    fn log_path_agrees_with_exact_path() {
        // δ = 0.75 is handled exactly; 0.75 + tiny forces the log path
        let a = jb_ladder(0.75, 8, &start()).unwrap();
        let b = jb_ladder(0.75 + 1e-13, 8, &start()).unwrap();
        assert_eq!(a.ladder.heights(), b.ladder.heights());
        a.ladder.validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive_delta() {
        assert!(jb_ladder(0.0, 3, &start()).is_err());
        assert!(jb_ladder(-1.0, 3, &start()).is_err());
    }
}
