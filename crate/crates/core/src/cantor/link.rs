//! The pair `(x, y)` behind a construction and the divergence check on it.

use super::levels::CantorLevel;
use super::verify::VerifyReport;
use crate::cf::{ConvergentLadder, RealHandle};
use crate::error::{Error, Result};
use crate::lattice::{divergence_certificate, DivergenceReport};
use crate::logs::ln_big;

/// Threshold and horizon that the levels can speak for.
///
/// Every minimum past the first base height is at least `ln(ln Q_0 / 4)`, so
/// `δ` sits just above `(ln Q_0 / 4)^-1`; the horizon is `2 ln` of the deepest
/// base height.
pub fn linked_parameters(levels: &[CantorLevel]) -> Result<(f64, f64)> {
    let (first, last) = match (levels.first(), levels.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::InvalidInput("no levels".into())),
    };
    let floor = (ln_big(&first.params.base_height) / 4.0).ln();
    if floor <= 0.0 {
        return Err(Error::Precondition(format!(
            "base height {} too small for a positive threshold",
            first.params.base_height
        )));
    }
    let delta = (-floor).exp() * (1.0 + 1e-9);
    let horizon = 2.0 * ln_big(&last.params.base_height);
    Ok((delta, horizon))
}

/// Run the divergence certificate on `x` (the base ladder) and `y` (the
/// sampled nested point).
pub fn linked_divergence(
    base: &ConvergentLadder,
    levels: &[CantorLevel],
    report: &VerifyReport,
) -> Result<(f64, DivergenceReport)> {
    let (delta, horizon) = linked_parameters(levels)?;
    let x = RealHandle::from_ladder(base)?;
    let y = report.nested_real();
    Ok((delta, divergence_certificate(&[x, y], delta, horizon)?))
}
