//! Counting reduced rationals of bounded height in an interval.
//!
//! The exhaustive scan is the reference. Two faster tiers serve large
//! heights: an exact Möbius sum over lattice counts, and a certified lower
//! bound that sieves small primes exactly and bounds the rest.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::interval::{min_height, RationalInterval};
use crate::error::{Error, Result};

/// Default work cap for exhaustive scans, in numerator candidates.
pub const DEFAULT_SCAN_BUDGET: u64 = 50_000_000;
/// Default largest Möbius range for the exact sum.
pub const DEFAULT_MOBIUS_LIMIT: u64 = 2_000_000;

const SMALL_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
const PRIME_CUTOFF: u64 = 10_000;

/// `Σ_{i=0}^{n-1} floor((a i + b) / m)` for `n >= 0`, `m > 0`, any sign of `a`, `b`.
pub fn floor_sum(n: &BigInt, m: &BigInt, a: &BigInt, b: &BigInt) -> BigInt {
    assert!(m.is_positive() && !n.is_negative());
    let mut ans = BigInt::zero();
    let (mut n, mut m, mut a, mut b) = (n.clone(), m.clone(), a.clone(), b.clone());
    let tri = |n: &BigInt| n * (n - 1) / 2;
    let (qa, ra) = a.div_mod_floor(&m);
    ans += tri(&n) * qa;
    a = ra;
    let (qb, rb) = b.div_mod_floor(&m);
    ans += &n * qb;
    b = rb;
    loop {
        if a >= m {
            let (q, r) = a.div_rem(&m);
            ans += tri(&n) * q;
            a = r;
        }
        if b >= m {
            let (q, r) = b.div_rem(&m);
            ans += &n * q;
            b = r;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            break;
        }
        let (q, r) = y_max.div_rem(&m);
        n = q;
        b = r;
        std::mem::swap(&mut m, &mut a);
    }
    ans
}

/// Integers `p` with `p/q ∈ I`, as an inclusive range.
fn numerator_range(i: &RationalInterval, q: &BigInt) -> (BigInt, BigInt) {
    let qr = BigRational::from(q.clone());
    let lo = &i.lo * &qr;
    let hi = &i.hi * &qr;
    let p_lo = if i.lo_closed || !lo.is_integer() {
        lo.ceil().to_integer()
    } else {
        lo.to_integer() + 1
    };
    let p_hi = if i.hi_closed || !hi.is_integer() {
        hi.floor().to_integer()
    } else {
        hi.to_integer() - 1
    };
    (p_lo, p_hi)
}

/// Upper estimate of the numerator candidates scanned for heights in `[q_lo, q_hi]`.
fn scan_work(i: &RationalInterval, q_lo: &BigInt, q_hi: &BigInt) -> BigInt {
    if q_hi < q_lo {
        return BigInt::zero();
    }
    let rows = q_hi - q_lo + 1;
    let per_row = (i.width() * BigRational::from(q_hi.clone()))
        .ceil()
        .to_integer()
        + 1;
    rows * per_row
}

/// Reduced `p/q ∈ I` with `q_lo <= q <= q_hi`, by scanning `q` then `p`.
pub fn count_reduced_scan(
    i: &RationalInterval,
    q_lo: &BigInt,
    q_hi: &BigInt,
    budget: u64,
) -> Result<u64> {
    let work = scan_work(i, q_lo, q_hi);
    if work > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: work.to_string(),
            budget,
        });
    }
    let mut count = 0u64;
    let mut q = q_lo.max(&BigInt::one()).clone();
    while &q <= q_hi {
        let (p_lo, p_hi) = numerator_range(i, &q);
        let mut p = p_lo;
        while p <= p_hi {
            if p.gcd(&q).is_one() {
                count += 1;
            }
            p += 1;
        }
        q += 1;
    }
    Ok(count)
}

/// Exact number of reduced `p/q ∈ I` with `h <= q <= 2h`, by exhaustive scan.
pub fn count_heights_in_band(i: &RationalInterval, h: &BigInt, budget: u64) -> Result<u64> {
    if !h.is_positive() {
        return Err(Error::InvalidInput(format!(
            "band height must be positive, got {h}"
        )));
    }
    count_reduced_scan(i, h, &(h * 2), budget)
}

/// Pairs `(p, q)`, not necessarily reduced, with `p/q ∈ I` and `q_lo <= q <= q_hi`.
pub fn lattice_count(i: &RationalInterval, q_lo: &BigInt, q_hi: &BigInt) -> BigInt {
    let q_lo = q_lo.max(&BigInt::one()).clone();
    if *q_hi < q_lo {
        return BigInt::zero();
    }
    let n = q_hi - &q_lo + 1;
    let (a, b) = (i.hi.numer(), i.hi.denom());
    let (c, e) = (i.lo.numer(), i.lo.denom());
    let s_hi = if i.hi_closed { 0 } else { 1 };
    let s_lo = if i.lo_closed { 0 } else { 1 };
    // p_hi(q) = floor((a q - s_hi) / b), p_lo(q) = floor((c q + e - 1 + s_lo) / e)
    let hi_sum = floor_sum(&n, b, a, &(a * &q_lo - s_hi));
    let lo_sum = floor_sum(&n, e, c, &(c * &q_lo + e - 1 + s_lo));
    hi_sum - lo_sum + n
}

/// Pairs with `d | gcd(p, q)` and `q` in the band `[h, 2h]`.
fn band_multiples(i: &RationalInterval, h: &BigInt, d: &BigInt) -> BigInt {
    let lo = Integer::div_ceil(h, d);
    let hi: BigInt = Integer::div_floor(&(h * 2), d);
    lattice_count(i, &lo, &hi)
}

/// Möbius function on `1..=n`.
fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    if n >= 1 {
        mu[0] = 0;
    }
    for k in 2..=n {
        if !composite[k] {
            primes.push(k);
            mu[k] = -1;
        }
        for &p in &primes {
            let m = k * p;
            if m > n {
                break;
            }
            composite[m] = true;
            if k % p == 0 {
                mu[m] = 0;
                break;
            }
            mu[m] = -mu[k];
        }
    }
    mu
}

fn primes_upto(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for k in 2..=n {
        if sieve[k] {
            out.push(k as u64);
            let mut m = k * k;
            while m <= n {
                sieve[m] = false;
                m += k;
            }
        }
    }
    out
}

/// Largest `d` for which some pair with `d | gcd` can exist in the band.
fn mobius_range(i: &RationalInterval, h: &BigInt) -> BigInt {
    Integer::div_floor(&(h * 2), &min_height(i))
}

/// Exact band count as `Σ μ(d) L_d`; errors if the range of `d` exceeds `limit`.
pub fn count_band_mobius(i: &RationalInterval, h: &BigInt, limit: u64) -> Result<BigInt> {
    if !h.is_positive() {
        return Err(Error::InvalidInput(format!(
            "band height must be positive, got {h}"
        )));
    }
    let range = mobius_range(i, h);
    let d_max = match range.to_u64() {
        Some(d) if d <= limit => d as usize,
        _ => {
            return Err(Error::BudgetExceeded {
                needed: range.to_string(),
                budget: limit,
            })
        }
    };
    let mu = mobius_table(d_max);
    let mut total = BigInt::zero();
    for (d, &m) in mu.iter().enumerate().skip(1) {
        if m != 0 {
            let l = band_multiples(i, h, &BigInt::from(d));
            if m > 0 {
                total += l;
            } else {
                total -= l;
            }
        }
    }
    Ok(total)
}

/// Certified lower bound on the band count for any height.
///
/// Pairs whose gcd avoids the primes up to 29 are counted exactly; from these
/// the pairs divisible by a prime `p` in `(29, 10^4]` are removed exactly,
/// and those divisible by a larger prime are removed via
/// `L_d <= ζ(2)|I|(2h/d)^2 + 2h/(d q_min)`.
pub fn count_band_lower_bound(i: &RationalInterval, h: &BigInt) -> Result<BigInt> {
    if !h.is_positive() {
        return Err(Error::InvalidInput(format!(
            "band height must be positive, got {h}"
        )));
    }
    let mut sieved = BigInt::zero();
    for mask in 0u32..(1 << SMALL_PRIMES.len()) {
        let mut d = BigInt::one();
        for (k, &p) in SMALL_PRIMES.iter().enumerate() {
            if mask & (1 << k) != 0 {
                d *= p;
            }
        }
        let l = band_multiples(i, h, &d);
        if mask.count_ones() % 2 == 0 {
            sieved += l;
        } else {
            sieved -= l;
        }
    }
    let range = mobius_range(i, h);
    let mut removed = BigInt::zero();
    for p in primes_upto(PRIME_CUTOFF).into_iter().filter(|&p| p > 29) {
        let p = BigInt::from(p);
        if p > range {
            break;
        }
        removed += band_multiples(i, h, &p);
    }
    let cutoff = BigInt::from(PRIME_CUTOFF);
    if range > cutoff {
        removed += tail_bound(i, h, &range, &cutoff);
    }
    let bound = sieved - removed;
    Ok(if bound.is_negative() {
        BigInt::zero()
    } else {
        bound
    })
}

/// Upper bound on `Σ_{cutoff < d <= range} L_d`, rounded up.
fn tail_bound(i: &RationalInterval, h: &BigInt, range: &BigInt, cutoff: &BigInt) -> BigInt {
    let top = BigRational::from(h * 2);
    let zeta2 = BigRational::new(1645.into(), 1000.into());
    let quadratic = zeta2 * i.width() * &top * &top / BigRational::from(cutoff.clone());
    let ratio = BigRational::new(range.clone(), cutoff.clone())
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let ln_up = ratio.ln() * (1.0 + 1e-12) + 1e-12;
    let linear = BigRational::new(h * 2, min_height(i))
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let linear = (linear * ln_up * (1.0 + 1e-12)).ceil();
    let linear = BigInt::from_f64(linear).expect("finite tail bound");
    quadratic.ceil().to_integer() + linear
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Exhaustive,
    Mobius,
    LowerBound,
}

/// A band count and how it was obtained; `LowerBound` values are certified minima.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BandCount {
    #[serde(serialize_with = "as_decimal")]
    pub value: BigInt,
    pub method: CountMethod,
}

pub(crate) fn as_decimal<S: serde::Serializer>(
    v: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl BandCount {
    pub fn is_exact(&self) -> bool {
        self.method != CountMethod::LowerBound
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CountLimits {
    pub scan_budget: u64,
    pub mobius_limit: u64,
}

impl Default for CountLimits {
    fn default() -> Self {
        CountLimits {
            scan_budget: DEFAULT_SCAN_BUDGET,
            mobius_limit: DEFAULT_MOBIUS_LIMIT,
        }
    }
}

/// Band count using the cheapest tier that fits the limits.
pub fn count_band(i: &RationalInterval, h: &BigInt, limits: CountLimits) -> Result<BandCount> {
    if !h.is_positive() {
        return Err(Error::InvalidInput(format!(
            "band height must be positive, got {h}"
        )));
    }
    if scan_work(i, h, &(h * 2)) <= BigInt::from(limits.scan_budget) {
        let n = count_heights_in_band(i, h, limits.scan_budget)?;
        return Ok(BandCount {
            value: n.into(),
            method: CountMethod::Exhaustive,
        });
    }
    if mobius_range(i, h) <= BigInt::from(limits.mobius_limit) {
        return Ok(BandCount {
            value: count_band_mobius(i, h, limits.mobius_limit)?,
            method: CountMethod::Mobius,
        });
    }
    Ok(BandCount {
        value: count_band_lower_bound(i, h)?,
        method: CountMethod::LowerBound,
    })
}

/// `2 b q^2 |I|`
pub fn floor_ratio_bound(i: &RationalInterval, q: &BigInt, b: &BigInt) -> BigRational {
    BigRational::from(BigInt::from(2) * b * q * q) * i.width()
}

/// Reduced rationals in `I` whose height `q'` has `floor(q'/q) = b`, where
/// `q` must be the least height in `I`. Errors if the count exceeds `2bq²|I|`.
pub fn count_floor_ratio(i: &RationalInterval, q: &BigInt, b: &BigInt, budget: u64) -> Result<u64> {
    if !q.is_positive() || b.is_negative() {
        return Err(Error::InvalidInput(format!(
            "need q > 0 and b >= 0, got q = {q}, b = {b}"
        )));
    }
    let least = min_height(i);
    if least != *q {
        return Err(Error::Precondition(format!(
            "q = {q} is not the least height in {i} (that is {least})"
        )));
    }
    let q_lo = b * q;
    let q_hi = &q_lo + q - 1;
    let n = count_reduced_scan(i, &q_lo, &q_hi, budget)?;
    let bound = floor_ratio_bound(i, q, b);
    if BigRational::from(BigInt::from(n)) > bound {
        return Err(Error::Inequality {
            inequality: "floor-ratio-count",
            step: 0,
            detail: format!("{n} rationals exceed 2bq^2|I| = {bound}"),
        });
    }
    Ok(n)
}

/// `count / (h^2 |I|)`, the empirical constant of the band lower bound.
pub fn band_ratio(count: &BigInt, h: &BigInt, i: &RationalInterval) -> f64 {
    let denom = BigRational::from(h * h) * i.width();
    (BigRational::from(count.clone()) / denom)
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// A ladder height `q` with `1/(h d) <= q <= h`, witnessing the band precondition
/// for `I = [x - d, x + d]`.
pub fn band_precondition_witness<'a>(
    heights: &'a [BigInt],
    h: &BigInt,
    d: &BigRational,
) -> Option<&'a BigInt> {
    let floor = (BigRational::from(h.clone()) * d).recip();
    heights
        .iter()
        .find(|q| BigRational::from((*q).clone()) >= floor && *q <= h)
}
