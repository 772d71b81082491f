//! Local minima of `max_i W_i` computed from the zero heights alone.
//!
//! A minimum sits where a falling branch of one tent (heading to the zero
//! `2 ln a`) meets a rising branch of another (leaving the zero `2 ln b`):
//! at `t = ln(ab)` with value `ln(a/b)`. All tests are done on the integer
//! product `ab`, never on the float times.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::tent::TentFunction;
use crate::cf::{PrimitiveVector, RealHandle};
use crate::error::{Error, Result};
use crate::logs::ln_big;

/// Slack for comparing `ln(ab)` with a float horizon.
pub const TAU: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct MinimumEvent {
    pub t: f64,
    pub value: f64,
    /// `e^t`, exactly.
    pub product: BigInt,
    /// Coordinate whose tent falls into the minimum, and its next zero height.
    pub falling: usize,
    pub a: BigInt,
    /// Zero height before `a` on the falling coordinate, 0 if `a = 1`.
    pub a_prev: BigInt,
    /// Coordinate whose tent rises out of the minimum, and its last zero height.
    pub rising: usize,
    pub b: BigInt,
    /// Zero height after `b` on the rising coordinate, if known.
    pub b_next: Option<BigInt>,
    /// For each coordinate, the zero height closest to `t`.
    pub nearest: Vec<BigInt>,
    /// Ladder entries behind `nearest`, when the tents came from ladders.
    pub nearest_vectors: Vec<Option<PrimitiveVector>>,
    /// Coordinates whose tent attains the maximum at `t`.
    pub active: Vec<usize>,
}

impl MinimumEvent {
    /// Height of the first coordinate's closest convergent.
    pub fn u_height(&self) -> &BigInt {
        &self.nearest[0]
    }

    /// Height of the second coordinate's closest convergent (the first if `n = 1`).
    pub fn v_height(&self) -> &BigInt {
        self.nearest.get(1).unwrap_or(&self.nearest[0])
    }
}

/// Largest index with `zeros[i] <= h`.
fn floor_index(zeros: &[BigInt], h: &BigInt) -> Option<usize> {
    zeros.partition_point(|z| z <= h).checked_sub(1)
}

fn within_horizon(p: &BigInt, horizon: f64) -> bool {
    ln_big(p) <= horizon + TAU
}

/// Events of `max_i W_i` on `(0, horizon]`, in time order.
pub fn local_minima_tents(tents: &[TentFunction], horizon: f64) -> Result<Vec<MinimumEvent>> {
    if tents.is_empty() {
        return Err(Error::InvalidInput("need at least one coordinate".into()));
    }
    for w in tents {
        let valid = w.validity_horizon();
        if valid < horizon {
            return Err(Error::HorizonBeyondValidity {
                requested: horizon,
                valid,
            });
        }
    }
    let mut found: BTreeMap<BigInt, MinimumEvent> = BTreeMap::new();
    for (i, wi) in tents.iter().enumerate() {
        let zi = wi.zero_heights();
        for (ia, a) in zi.iter().enumerate() {
            if !within_horizon(a, horizon) {
                break;
            }
            let a_prev = if ia == 0 {
                BigInt::zero()
            } else {
                zi[ia - 1].clone()
            };
            for (j, wj) in tents.iter().enumerate() {
                let zj = wj.zero_heights();
                let Some(ib) = floor_index(zj, a) else {
                    continue;
                };
                let b = &zj[ib];
                // falling side: a_prev * a < ab, rising side: ab < b * b_next
                if *b <= a_prev {
                    continue;
                }
                let b_next = zj.get(ib + 1).cloned();
                if b_next.is_none() && !wj.is_finite() && a != b {
                    continue;
                }
                let product = a * b;
                if product <= BigInt::from(1) || !within_horizon(&product, horizon) {
                    continue;
                }
                if found.contains_key(&product) {
                    continue;
                }
                // no tent may exceed the crossing value: each needs a zero in [b, a]
                let covered = tents.iter().all(|w| {
                    let z = w.zero_heights();
                    floor_index(z, a).is_some_and(|k| &z[k] >= b)
                });
                if !covered {
                    continue;
                }
                let event = build_event(
                    tents,
                    i,
                    a.clone(),
                    a_prev.clone(),
                    j,
                    b.clone(),
                    b_next,
                    product.clone(),
                );
                found.insert(product, event);
            }
        }
    }
    Ok(found.into_values().collect())
}

#[allow(clippy::too_many_arguments)]
fn build_event(
    tents: &[TentFunction],
    falling: usize,
    a: BigInt,
    a_prev: BigInt,
    rising: usize,
    b: BigInt,
    b_next: Option<BigInt>,
    product: BigInt,
) -> MinimumEvent {
    let mut nearest = Vec::with_capacity(tents.len());
    let mut nearest_vectors = Vec::with_capacity(tents.len());
    let mut active = Vec::new();
    for (k, w) in tents.iter().enumerate() {
        let z = w.zero_heights();
        // z1^2 <= ab <= z2^2; z1 is closer iff ab <= z1 z2
        let i1 = z.partition_point(|h| h * h <= product) - 1;
        let idx = match z.get(i1 + 1) {
            Some(z2) if product > &z[i1] * z2 => i1 + 1,
            _ => i1,
        };
        nearest.push(z[idx].clone());
        nearest_vectors.push(w.vectors().map(|v| v[idx].clone()));
        if z[idx] == a || z[idx] == b {
            active.push(k);
        }
    }
    let t = ln_big(&product);
    let value = ln_big(&a) - ln_big(&b);
    MinimumEvent {
        t,
        value,
        product,
        falling,
        a,
        a_prev,
        rising,
        b,
        b_next,
        nearest,
        nearest_vectors,
        active,
    }
}

/// Events for real coordinates; ladders are extended to cover the horizon.
pub fn local_minima(x: &[RealHandle], horizon: f64) -> Result<Vec<MinimumEvent>> {
    let tents = x
        .iter()
        .map(|xi| TentFunction::for_real(xi, horizon))
        .collect::<Result<Vec<_>>>()?;
    local_minima_tents(&tents, horizon)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedAboveThreshold { t0: f64 },
    ViolatedAt { t: f64 },
    Undecided,
}

#[derive(Clone, Debug)]
pub struct DivergenceReport {
    pub horizon: f64,
    pub threshold: f64,
    pub events: Vec<MinimumEvent>,
    pub verdict: Verdict,
}

/// Does `max_i W_i` stay above `-ln δ` at every minimum after some `t0`?
///
/// `t0` is the start of the final run of events above the threshold: the
/// verdict is certified when the last event is above it, violated at the last
/// event otherwise, and undecided when there are no events in `(0, T]`.
pub fn divergence_certificate(
    x: &[RealHandle],
    delta: f64,
    horizon: f64,
) -> Result<DivergenceReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "δ must lie in (0, 1), got {delta}"
        )));
    }
    if let Some(index) = x.iter().position(RealHandle::is_rational) {
        return Err(Error::RationalCoordinate { index });
    }
    let events = local_minima(x, horizon)?;
    Ok(report_from_events(events, delta, horizon))
}

/// Same as [`divergence_certificate`] on tents given directly.
pub fn divergence_from_tents(
    tents: &[TentFunction],
    delta: f64,
    horizon: f64,
) -> Result<DivergenceReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "δ must lie in (0, 1), got {delta}"
        )));
    }
    if let Some(index) = tents.iter().position(TentFunction::is_finite) {
        return Err(Error::RationalCoordinate { index });
    }
    let events = local_minima_tents(tents, horizon)?;
    Ok(report_from_events(events, delta, horizon))
}

fn report_from_events(events: Vec<MinimumEvent>, delta: f64, horizon: f64) -> DivergenceReport {
    let threshold = -delta.ln();
    let verdict = match events.last() {
        None => Verdict::Undecided,
        Some(last) if last.value <= threshold => Verdict::ViolatedAt { t: last.t },
        Some(_) => {
            let start = events
                .iter()
                .rposition(|e| e.value <= threshold)
                .map_or(0, |k| k + 1);
            Verdict::CertifiedAboveThreshold {
                t0: events[start].t,
            }
        }
    };
    DivergenceReport {
        horizon,
        threshold,
        events,
        verdict,
    }
}
