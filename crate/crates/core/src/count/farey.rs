//! Walking the Farey sequence of order `n` near a given rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A fraction `p/q` kept as a pair (`q = 0` allowed for the `1/0` sentinel).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frac {
    pub p: BigInt,
    pub q: BigInt,
}

impl Frac {
    fn new(p: BigInt, q: BigInt) -> Self {
        Frac { p, q }
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

/// Adjacent terms `lo <= x < hi` of the Farey sequence of order `n`.
pub fn farey_bracket(x: &BigRational, n: &BigInt) -> (Frac, Frac) {
    assert!(n.is_positive());
    let (xn, xd) = (x.numer().clone(), x.denom().clone());
    let mut lo = Frac::new(xn.div_floor(&xd), BigInt::one());
    let mut hi = Frac::new(&lo.p + 1, BigInt::one());
    loop {
        // lo + k hi stays <= x: k (hi.p xd - xn hi.q) <= xn lo.q - lo.p xd
        let gap_lo = &xn * &lo.q - &lo.p * &xd;
        let gap_hi = &hi.p * &xd - &xn * &hi.q;
        let mut moved = false;
        let k_den = (n - &lo.q).div_floor(&hi.q);
        let k = gap_lo.div_floor(&gap_hi).min(k_den);
        if k.is_positive() {
            lo = Frac::new(&lo.p + &k * &hi.p, &lo.q + &k * &hi.q);
            moved = true;
        }
        let gap_lo = &xn * &lo.q - &lo.p * &xd;
        let gap_hi = &hi.p * &xd - &xn * &hi.q;
        // hi + k lo stays > x: k gap_lo < gap_hi
        let k_den = (n - &hi.q).div_floor(&lo.q);
        let k = if gap_lo.is_zero() {
            k_den
        } else {
            (&gap_hi - 1i32).div_floor(&gap_lo).min(k_den)
        };
        if k.is_positive() {
            hi = Frac::new(&hi.p + &k * &lo.p, &hi.q + &k * &lo.q);
            moved = true;
        }
        if !moved {
            return (lo, hi);
        }
    }
}

/// The term after `b` in order `n`, given its predecessor `a`.
pub fn farey_next(a: &Frac, b: &Frac, n: &BigInt) -> Frac {
    let k = (n + &a.q).div_floor(&b.q);
    Frac::new(&k * &b.p - &a.p, &k * &b.q - &a.q)
}

/// The term before `a` in order `n`, given its successor `b`.
pub fn farey_prev(a: &Frac, b: &Frac, n: &BigInt) -> Frac {
    let k = (n + &b.q).div_floor(&a.q);
    Frac::new(&k * &a.p - &b.p, &k * &a.q - &b.q)
}

/// Terms of order `n` in `[lo, hi]` whose height lies in `[h_min, n]`,
/// ordered by distance to `target` (left first on ties), at most `cap` of them.
pub fn nearest_in_band(
    target: &BigRational,
    lo: &BigRational,
    hi: &BigRational,
    h_min: &BigInt,
    n: &BigInt,
    cap: usize,
) -> Vec<Frac> {
    let (l0, r0) = farey_bracket(target, n);
    // left walker at l0 (its right neighbour r0), right walker at r0
    let (mut left, mut left_next) = (Some(l0.clone()), r0.clone());
    let (mut right, mut right_prev) = (Some(r0), l0);
    let mut out = Vec::new();
    while out.len() < cap {
        let l_ok = left.as_ref().filter(|f| f.value() >= *lo);
        let r_ok = right.as_ref().filter(|f| f.value() <= *hi);
        let take_left = match (l_ok, r_ok) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(l), Some(r)) => (target - l.value()) <= (r.value() - target),
        };
        if take_left {
            let f = left.take().unwrap();
            let prev = farey_prev(&f, &left_next, n);
            if &f.q >= h_min {
                out.push(f.clone());
            }
            left_next = f;
            left = Some(prev);
        } else {
            let f = right.take().unwrap();
            let next = farey_next(&right_prev, &f, n);
            if &f.q >= h_min {
                out.push(f.clone());
            }
            right_prev = f;
            right = Some(next);
        }
    }
    out
}
