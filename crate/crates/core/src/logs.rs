//! Logarithms of big integers and a few float helpers.
//!
//! Heights grow far past `f64::MAX`, so logs are taken from the bit length
//! and the leading 64 bits. `ln_bounds` pads the result outward so callers
//! can make certified comparisons.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

const PAD_ULPS: f64 = 16.0;

/// Closed interval known to contain a real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn point(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn certainly_lt(&self, other: &Bounds) -> bool {
        self.hi < other.lo
    }

    pub fn add(&self, other: &Bounds) -> Bounds {
        pad(self.lo + other.lo, self.hi + other.hi)
    }

    pub fn scale(&self, k: f64) -> Bounds {
        let (a, b) = (self.lo * k, self.hi * k);
        pad(a.min(b), a.max(b))
    }
}

fn pad(lo: f64, hi: f64) -> Bounds {
    let slack = |v: f64| PAD_ULPS * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE);
    Bounds {
        lo: lo - slack(lo),
        hi: hi + slack(hi),
    }
}

/// Leading 64 bits of `n` and the number of bits shifted away.
fn leading(n: &BigUint) -> (u64, u64) {
    let bits = n.bits();
    if bits <= 64 {
        (n.to_u64().unwrap_or(u64::MAX), 0)
    } else {
        let shift = bits - 64;
        ((n >> shift).to_u64().unwrap_or(u64::MAX), shift)
    }
}

/// Natural log of a positive integer, certified to lie in the returned bounds.
pub fn ln_bounds_u(n: &BigUint) -> Bounds {
    assert!(!n.is_zero(), "ln of zero");
    let (m, shift) = leading(n);
    let base = shift as f64 * std::f64::consts::LN_2;
    let lo = (m as f64).ln() + base;
    let hi = if shift == 0 {
        lo
    } else {
        ((m as f64) + 1.0).ln() + base
    };
    pad(lo, hi)
}

pub fn ln_bounds(n: &BigInt) -> Bounds {
    assert!(n.sign() == Sign::Plus, "ln of non-positive integer");
    ln_bounds_u(n.magnitude())
}

/// Best-effort natural log of a positive integer.
pub fn ln_big(n: &BigInt) -> f64 {
    let (m, shift) = leading(n.magnitude());
    (m as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_big_u(n: &BigUint) -> f64 {
    let (m, shift) = leading(n);
    (m as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// ln(a/b) for positive integers.
pub fn ln_ratio(a: &BigInt, b: &BigInt) -> f64 {
    ln_big(a) - ln_big(b)
}

/// ln of a positive rational, robust to huge numerators and denominators.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "ln of non-positive rational");
    ln_ratio(r.numer(), r.denom())
}

/// Certified bounds on ln of a positive rational.
pub fn ln_rational_bounds(r: &BigRational) -> Bounds {
    assert!(r.is_positive(), "ln of non-positive rational");
    let (a, b) = (ln_bounds(r.numer()), ln_bounds(r.denom()));
    pad(a.lo - b.hi, a.hi - b.lo)
}

/// An integer at least `e^y`.
pub fn exp_ceil(y: f64) -> BigInt {
    if y <= 0.0 {
        return BigInt::from(1);
    }
    if y < 600.0 {
        let v = (y.exp() * (1.0 + 1e-12)).ceil();
        return BigInt::from_f64(v).expect("finite");
    }
    // e^y = 2^(y / ln 2); keep 52 bits of mantissa and shift the rest
    let e2 = y / std::f64::consts::LN_2;
    let shift = e2.floor() as u64 - 52;
    let m = (2f64.powf(e2 - shift as f64) * (1.0 + 1e-12)).ceil();
    BigInt::from_f64(m).expect("finite") << shift
}

/// `2^prec · atanh(a/b)` rounded down, for `0 <= a/b <= 1/3`; the true value
/// exceeds the result by less than `2 · (terms + 1)` units.
fn atanh_fixed(a: &BigInt, b: &BigInt, prec: u64) -> (BigInt, u64) {
    let mut power: BigInt = (BigInt::from(1) << prec) * a / b;
    let (a2, b2) = (a * a, b * b);
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        sum += &power / (2 * k + 1);
        power = power * &a2 / &b2;
        k += 1;
    }
    (sum, k + 1)
}

/// Fixed-point bounds `(lo, hi)` with `lo <= 2^prec · ln n <= hi`, for `n >= 1`.
pub fn ln_fixed(n: &BigInt, prec: u64) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "ln of non-positive integer");
    let e = n.bits() - 1;
    let base = BigInt::from(1) << e;
    // ln n = e ln 2 + 2 atanh((n - 2^e) / (n + 2^e)), ln 2 = 2 atanh(1/3)
    let (ln2, err2) = atanh_fixed(&BigInt::from(1), &BigInt::from(3), prec);
    let (lnm, errm) = atanh_fixed(&(n - &base), &(n + &base), prec);
    let lo = (ln2 * e + lnm) * 2;
    let slack = BigInt::from(4 * (err2 * e + errm + 2));
    let hi = &lo + slack;
    (lo, hi)
}

/// `floor(n / ln n)` exactly, for `n >= 2`.
pub fn floor_over_ln(n: &BigInt) -> BigInt {
    assert!(*n >= BigInt::from(2), "need n >= 2");
    let mut prec = n.bits() + 64;
    loop {
        let (lo, hi) = ln_fixed(n, prec);
        let scaled = n << prec;
        let (a, b) = (&scaled / &hi, &scaled / &lo);
        if a == b {
            return a;
        }
        prec *= 2;
    }
}

/// Exact rational value of a finite float.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// `%.{sig}g`-style formatting, used for every decimal the crate emits.
pub fn fmt_g(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    // re-derive the exponent after rounding, 9.9999 may round up to 10
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, e) = sci.split_once('e').unwrap();
    let e: i32 = e.parse().unwrap();
    let exp = if e != exp { e } else { exp };
    if exp < -5 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn fixed_point_logs() {
        for n in [2u64, 3, 10, 734, 538_783, 1 << 40, u64::MAX] {
            let prec = 80;
            let (lo, hi) = ln_fixed(&BigInt::from(n), prec);
            let scale = 2f64.powi(prec as i32);
            let want = (n as f64).ln();
            assert!((lo.to_f64().unwrap() / scale - want).abs() < 1e-14);
            assert!(lo < hi && &hi - &lo < BigInt::from(1 << 16));
        }
        assert_eq!(floor_over_ln(&BigInt::from(734)), BigInt::from(111));
        assert_eq!(floor_over_ln(&BigInt::from(2)), BigInt::from(2));
        assert_eq!(floor_over_ln(&BigInt::from(100)), BigInt::from(21));
    }

    #[test]
    fn small_logs_match_std() {
        for n in [1u64, 2, 3, 10, 734, 1 << 40, u64::MAX] {
            let b = ln_bounds_u(&BigUint::from(n));
            let exact = (n as f64).ln();
            assert!(b.lo <= exact && exact <= b.hi, "{n}: {b:?}");
            assert!(b.hi - b.lo < 1e-12);
        }
    }

    #[test]
    fn huge_logs_are_bracketed() {
        // 3^500: ln = 500 ln 3
        let n = num_traits::pow(BigUint::from(3u32), 500);
        let b = ln_bounds_u(&n);
        let want = 500.0 * 3f64.ln();
        assert!(b.lo <= want + 1e-9 && want - 1e-9 <= b.hi);
        assert!((ln_big_u(&n) - want).abs() < 1e-9);
        assert_eq!(ln_big(&BigInt::one()), 0.0);
    }

    #[test]
    fn exp_ceil_is_an_upper_bound() {
        for y in [0.5, 3.0, 30.0, 599.0, 650.0, 5000.0] {
            let n = exp_ceil(y);
            let ln = ln_bounds(&n);
            assert!(ln.hi >= y, "{y}");
            let below = ln_bounds(&(n - 1));
            assert!(below.lo <= y + 1e-9, "{y}");
        }
        let r = BigRational::new(BigInt::from(3), BigInt::from(7));
        let b = ln_rational_bounds(&r);
        assert!(b.lo <= (3.0f64 / 7.0).ln() && (3.0f64 / 7.0).ln() <= b.hi);
    }

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(1.0, 12), "1");
        assert_eq!(fmt_g(0.5, 12), "0.5");
        assert_eq!(fmt_g(2.0f64.ln(), 12), "0.69314718056");
        assert_eq!(fmt_g(-1.5e-7, 12), "-1.5e-07");
        assert_eq!(fmt_g(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(fmt_g(30.0, 12), "30");
        assert_eq!(fmt_g(0.01, 12), "0.01");
    }
}
