use num_bigint::BigInt;
use num_traits::One;

use crate::cf::{ConvergentLadder, PrimitiveVector, RealHandle};
use crate::error::{Error, Result};
use crate::logs::ln_big;

/// Distance from `t` to the zero set `{2 ln q_k}`, with a slope -1 tail
/// before the first zero and, for a complete sequence, slope +1 after the last.
#[derive(Clone, Debug)]
pub struct TentFunction {
    heights: Vec<BigInt>,
    vectors: Option<Vec<PrimitiveVector>>,
    zero_times: Vec<f64>,
    finite: bool,
}

impl TentFunction {
    pub fn from_heights(heights: Vec<BigInt>, finite: bool) -> Result<Self> {
        if heights.first().is_none_or(|h| !h.is_one()) {
            return Err(Error::InvalidInput("zero heights must start at 1".into()));
        }
        if heights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "zero heights must increase strictly".into(),
            ));
        }
        let zero_times = heights.iter().map(|q| 2.0 * ln_big(q)).collect();
        Ok(TentFunction {
            heights,
            vectors: None,
            zero_times,
            finite,
        })
    }

    pub fn from_u64s(heights: &[u64], finite: bool) -> Result<Self> {
        Self::from_heights(heights.iter().map(|&h| BigInt::from(h)).collect(), finite)
    }

    pub fn from_ladder(ladder: &ConvergentLadder) -> Self {
        let mut tent = Self::from_heights(ladder.heights(), ladder.is_complete())
            .expect("ladder heights start at 1 and increase");
        tent.vectors = Some(ladder.entries().to_vec());
        tent
    }

    /// Tent of `x`, with enough zeros to be valid up to `horizon`.
    pub fn for_real(x: &RealHandle, horizon: f64) -> Result<Self> {
        let need = if horizon <= 0.0 {
            BigInt::one()
        } else {
            // smallest integer with 2 ln q >= horizon, plus slack
            crate::logs::exp_ceil(horizon / 2.0) + 1
        };
        let ladder = x.ladder_past(&need)?;
        let tent = Self::from_ladder(&ladder);
        let valid = tent.validity_horizon();
        if valid < horizon {
            return Err(Error::HorizonBeyondValidity {
                requested: horizon,
                valid,
            });
        }
        Ok(tent)
    }

    pub fn zero_heights(&self) -> &[BigInt] {
        &self.heights
    }

    pub fn zero_times(&self) -> &[f64] {
        &self.zero_times
    }

    /// Ladder entries behind the zeros, when the tent came from a ladder.
    pub fn vectors(&self) -> Option<&[PrimitiveVector]> {
        self.vectors.as_deref()
    }

    pub fn is_finite(&self) -> bool {
        self.finite
    }

    /// Largest time at which evaluation is exact.
    pub fn validity_horizon(&self) -> f64 {
        if self.finite {
            f64::INFINITY
        } else {
            *self.zero_times.last().unwrap()
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let z = &self.zero_times;
        let i = z.partition_point(|&s| s <= t);
        match i {
            0 => z[0] - t,
            n if n == z.len() => t - z[n - 1],
            n => (t - z[n - 1]).min(z[n] - t),
        }
    }

    pub fn eval_checked(&self, t: f64) -> Result<f64> {
        let valid = self.validity_horizon();
        if t > valid {
            return Err(Error::HorizonBeyondValidity {
                requested: t,
                valid,
            });
        }
        Ok(self.eval(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        let w = TentFunction::from_u64s(&[1, 2, 5], false).unwrap();
        assert!(w.eval(2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((w.eval(2.0) - (2.0 - 2.0 * 2f64.ln())).abs() < 1e-12);
        assert!((w.eval(-1.0) - 1.0).abs() < 1e-15);
        assert!((w.eval(2.5) - (2.0 * 5f64.ln() - 2.5)).abs() < 1e-12);
        assert!(w.eval_checked(3.3).is_err());
        assert!(TentFunction::from_u64s(&[2, 3], true).is_err());
        assert!(TentFunction::from_u64s(&[1, 3, 3], true).is_err());
    }

    #[test]
    fn finite_tail_rises() {
        let w = TentFunction::from_u64s(&[1, 2], true).unwrap();
        assert!((w.eval(10.0) - (10.0 - 2.0 * 2f64.ln())).abs() < 1e-12);
        assert_eq!(w.validity_horizon(), f64::INFINITY);
    }

    #[test]
    fn rule_streams_extend() {
        let x = RealHandle::named("sqrt2").unwrap();
        let w = TentFunction::for_real(&x, 30.0).unwrap();
        assert!(w.validity_horizon() >= 30.0);
    }
}
