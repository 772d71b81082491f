use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::levels::CantorLevel;
use crate::error::{Error, Result};
use crate::logs::{ln_big, ln_rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    /// `(j, ln(m_1 ⋯ m_{j-1}) / -ln(m_j eps_j))` for `j = 1, 2, …`
    pub quotients: Vec<(usize, f64)>,
    /// Largest quotient with `j >= j_min`.
    pub limsup_proxy: f64,
    pub j_min: usize,
}

/// Cantor set dimension lower bound quotients; `m[i]`, `eps[i]` belong to `j = i + 1`.
pub fn lower_dim_estimate(
    m: &[BigInt],
    eps: &[BigRational],
    j_min: usize,
) -> Result<DimensionEstimate> {
    if m.len() != eps.len() {
        return Err(Error::InvalidInput(format!(
            "{} counts but {} gaps",
            m.len(),
            eps.len()
        )));
    }
    if m.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidInput("counts must be at least 1".into()));
    }
    if eps.iter().any(|e| !e.is_positive()) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "gaps must be positive and strictly decreasing".into(),
        ));
    }
    let mut log_product = 0.0;
    let mut quotients = Vec::with_capacity(m.len());
    for (i, (mj, ej)) in m.iter().zip(eps).enumerate() {
        let denom = -(ln_big(mj) + ln_rational(ej));
        quotients.push((i + 1, log_product / denom));
        log_product += ln_big(mj);
    }
    let limsup_proxy = quotients
        .iter()
        .filter(|(j, _)| *j >= j_min)
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DimensionEstimate {
        quotients,
        limsup_proxy,
        j_min,
    })
}

/// Estimator inputs recorded by a construction: `(m_j, eps_j)` for `j >= 1`.
pub fn recorded_counts(levels: &[CantorLevel]) -> (Vec<BigInt>, Vec<BigRational>) {
    levels
        .iter()
        .skip(1)
        .map(|l| {
            let m = l.m.as_ref().map_or_else(BigInt::one, |m| m.value.clone());
            (m, l.eps().clone())
        })
        .unzip()
}

/// Dimension of a product or fibred set from the fibre and base lower bounds.
pub fn combine_dimensions(fiber_lower: f64, base_lower: f64) -> Result<f64> {
    if !(fiber_lower >= 0.0 && base_lower >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "dimensions must be nonnegative, got {fiber_lower} and {base_lower}"
        )));
    }
    Ok(fiber_lower + base_lower)
}
