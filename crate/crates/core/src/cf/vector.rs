use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

/// An integer vector `(p, q)` with no constraints; used for the seeds `±(1, 0)`
/// and for intermediate arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntVec {
    pub p: BigInt,
    pub q: BigInt,
}

impl IntVec {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        IntVec {
            p: p.into(),
            q: q.into(),
        }
    }

    /// `(sign, 0)`, the admissible values of `v_{-1}`.
    pub fn seed(sign: i8) -> Self {
        IntVec::new(if sign < 0 { -1 } else { 1 }, 0)
    }

    pub fn cross(&self, other: &IntVec) -> BigInt {
        &self.p * &other.q - &other.p * &self.q
    }

    /// `a * self + other`
    pub fn mul_add(&self, a: &BigInt, other: &IntVec) -> IntVec {
        IntVec {
            p: a * &self.p + &other.p,
            q: a * &self.q + &other.q,
        }
    }

    /// `self - a * other`
    pub fn sub_mul(&self, a: &BigInt, other: &IntVec) -> IntVec {
        IntVec {
            p: &self.p - a * &other.p,
            q: &self.q - a * &other.q,
        }
    }

    pub fn neg(&self) -> IntVec {
        IntVec {
            p: -&self.p,
            q: -&self.q,
        }
    }

    /// Reinterpret as a primitive vector when `q >= 1` and `gcd(p, q) = 1`.
    pub fn primitive(&self) -> Option<PrimitiveVector> {
        PrimitiveVector::new(self.p.clone(), self.q.clone()).ok()
    }
}

/// A reduced fraction `p/q` with `q >= 1`, viewed as a lattice vector.
///
/// `height` is `q`, `value` is `p/q` and `cross` is `p q' - p' q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitiveVector {
    // field order gives Ord by (q, p)
    q: BigInt,
    p: BigInt,
}

impl PrimitiveVector {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if q < BigInt::one() {
            return Err(Error::InvalidInput(format!(
                "height must be positive, got ({p}, {q})"
            )));
        }
        if !p.gcd(&q).is_one() {
            return Err(Error::InvalidInput(format!("({p}, {q}) is not primitive")));
        }
        Ok(PrimitiveVector { q, p })
    }

    /// Reduce an arbitrary fraction.
    pub fn from_ratio(r: &BigRational) -> Self {
        PrimitiveVector {
            p: r.numer().clone(),
            q: r.denom().clone(),
        }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        PrimitiveVector {
            p: n.into(),
            q: BigInt::one(),
        }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn height(&self) -> &BigInt {
        &self.q
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    pub fn value_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.value().to_f64().unwrap_or(f64::NAN)
    }

    pub fn cross(&self, other: &PrimitiveVector) -> BigInt {
        &self.p * &other.q - &other.p * &self.q
    }

    pub fn as_vec(&self) -> IntVec {
        IntVec {
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }

    /// Translate by an integer: `(p + n q, q)`. Preserves heights and cross products.
    pub fn shift(&self, n: &BigInt) -> PrimitiveVector {
        PrimitiveVector {
            p: &self.p + n * &self.q,
            q: self.q.clone(),
        }
    }

    /// `|self × other| == 1`
    pub fn unimodular_with(&self, other: &PrimitiveVector) -> bool {
        self.cross(other).abs().is_one()
    }
}

impl fmt::Display for PrimitiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

impl TryFrom<IntVec> for PrimitiveVector {
    type Error = Error;

    fn try_from(v: IntVec) -> Result<Self> {
        PrimitiveVector::new(v.p, v.q)
    }
}

/// Shorthand used all over the tests.
pub fn pv(p: i64, q: i64) -> PrimitiveVector {
    PrimitiveVector::new(p, q).expect("primitive vector")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_primitive() {
        assert!(PrimitiveVector::new(2, 4).is_err());
        assert!(PrimitiveVector::new(1, 0).is_err());
        assert!(PrimitiveVector::new(1, -3).is_err());
        assert!(PrimitiveVector::new(0, 1).is_ok());
        assert!(PrimitiveVector::new(-3, 7).is_ok());
    }

    #[test]
    fn cross_and_shift() {
        let u = pv(3, 2);
        let v = pv(7, 5);
        assert_eq!(u.cross(&v), BigInt::from(1));
        let n = BigInt::from(-4);
        assert_eq!(u.shift(&n).cross(&v.shift(&n)), BigInt::from(1));
        assert_eq!(u.shift(&n), pv(-5, 2));
    }
}
