//! Two-coordinate cover: nodes `(u, v)`, their successors and fibers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;
use serde::Serialize;

use super::bounds::{analytic_bound2, tail_bound2};
use crate::cf::{decompose, predecessors, reach_rel, succ_rel, IntVec, PrimitiveVector};
use crate::error::{Error, Result};

/// A pair of coordinates with one much taller than the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverNode2 {
    pub u: PrimitiveVector,
    pub v: PrimitiveVector,
    pub delta: BigRational,
}

/// Fiber coordinates of a successor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FiberIndex {
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub a: BigInt,
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub b: BigInt,
}

fn ht(v: &PrimitiveVector) -> BigRational {
    BigRational::from(v.height().clone())
}

/// `|u| < δ|v|` or `|v| < δ|u|`.
pub fn node2_in_j(u: &PrimitiveVector, v: &PrimitiveVector, delta: &BigRational) -> bool {
    ht(u) < delta * ht(v) || ht(v) < delta * ht(u)
}

impl CoverNode2 {
    pub fn new(u: PrimitiveVector, v: PrimitiveVector, delta: BigRational) -> Result<Self> {
        if !(delta.is_positive() && delta < BigRational::one()) {
            return Err(Error::InvalidInput(format!(
                "δ must lie in (0, 1), got {delta}"
            )));
        }
        if !node2_in_j(&u, &v, &delta) {
            return Err(Error::InvalidInput(format!(
                "({u}, {v}) is not a cover node for δ = {delta}"
            )));
        }
        Ok(CoverNode2 { u, v, delta })
    }

    /// Sup-metric radius `1/(|u||v|)` of the ball around `(u̇, v̇)`.
    pub fn radius(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.u.height() * self.v.height())
    }

    pub fn diameter(&self) -> BigRational {
        self.radius() * BigRational::from(BigInt::from(2))
    }

    /// `(short, tall, mirrored)`: the short coordinate first.
    fn oriented(&self) -> (&PrimitiveVector, &PrimitiveVector, bool) {
        if ht(&self.u) < &self.delta * ht(&self.v) {
            (&self.u, &self.v, false)
        } else {
            (&self.v, &self.u, true)
        }
    }
}

/// One element of `σ(node)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor2 {
    pub node: CoverNode2,
    pub index: FiberIndex,
    /// Coefficient of the tall coordinate's predecessor: `v' = b v + c ṽ`.
    pub c: BigInt,
    /// `diam'/diam = |u||v| / (|u'||v'|)`
    pub ratio: BigRational,
}

#[derive(Clone, Debug, Default)]
pub struct Sigma2 {
    pub successors: Vec<Successor2>,
    /// Set when the cap leaves no room for any successor.
    pub warning: Option<String>,
    /// Broken invariants, one line each; empty on a clean run.
    pub violations: Vec<String>,
}

impl Sigma2 {
    /// Fiber sizes keyed by `(a, b)`.
    pub fn fibers(&self) -> BTreeMap<FiberIndex, usize> {
        let mut out = BTreeMap::new();
        for s in &self.successors {
            *out.entry(s.index.clone()).or_insert(0) += 1;
        }
        out
    }
}

fn start_rests(v: &PrimitiveVector) -> Vec<IntVec> {
    if v.height().is_one() {
        vec![IntVec::seed(1), IntVec::seed(-1)]
    } else {
        predecessors(v)
            .iter()
            .map(PrimitiveVector::as_vec)
            .collect()
    }
}

/// Every `v'` with `v ⊨ v'` and `|v'| < cap`, paired with the predecessor `ṽ`
/// of `v` on the ladder that reaches it.
fn reachable_below(v: &PrimitiveVector, cap: &BigRational) -> Vec<(PrimitiveVector, IntVec)> {
    let mut out = Vec::new();
    if ht(v) >= *cap {
        return out;
    }
    for rest in start_rests(v) {
        out.push((v.clone(), rest.clone()));
        let mut stack = vec![(rest.clone(), v.clone())];
        while let Some((prev, cur)) = stack.pop() {
            let mut a = BigInt::from(if cur.height().is_one() { 2 } else { 1 });
            loop {
                let next = cur.as_vec().mul_add(&a, &prev);
                if BigRational::from(next.q.clone()) >= *cap {
                    break;
                }
                if let Some(w) = next.primitive() {
                    out.push((w.clone(), rest.clone()));
                    stack.push((cur.as_vec(), w));
                }
                a += 1;
            }
        }
    }
    out
}

/// `(b, c)` with `w = b v + c rest`; `v × rest = ±1`.
fn combination(v: &PrimitiveVector, rest: &IntVec, w: &PrimitiveVector) -> (BigInt, BigInt) {
    let v = v.as_vec();
    let w = w.as_vec();
    let det = v.cross(rest);
    (w.cross(rest) / &det, v.cross(&w) / &det)
}

/// All `(u', v')` with `u ⊢ u'`, `v ⊨ v'`, `|v'| < δ|u'|` and `a <= a_max`,
/// where `u` is the short coordinate. Each one is re-checked against the
/// relations and the range, ratio and contraction bounds.
pub fn sigma2_enumerate(node: &CoverNode2, a_max: u64) -> Result<Sigma2> {
    if !node2_in_j(&node.u, &node.v, &node.delta) {
        return Err(Error::InvalidInput("node is not in J".into()));
    }
    let delta = &node.delta;
    let (u, v, mirrored) = node.oriented();
    let mut out = Sigma2::default();
    let a_cap = BigRational::from(BigInt::from(a_max));
    let two_d2 = delta * delta * BigRational::from(BigInt::from(2));
    if &a_cap * &two_d2 <= BigRational::one() {
        out.warning = Some(format!(
            "a_max = {a_max} does not exceed 1/(2δ²) = {}",
            two_d2.recip()
        ));
        return Ok(out);
    }

    let min_a = if u.height().is_one() { 2 } else { 1 };
    let mut tops = Vec::new();
    for rest in start_rests(u) {
        for a in min_a..=a_max {
            if let Some(w) = u.as_vec().mul_add(&BigInt::from(a), &rest).primitive() {
                tops.push(w);
            }
        }
    }
    tops.sort();
    tops.dedup();
    let Some(tallest) = tops.iter().map(|w| w.height()).max().cloned() else {
        return Ok(out);
    };
    let cap = delta * BigRational::from(tallest);

    let mut bottoms: BTreeMap<PrimitiveVector, (BigInt, BigInt)> = BTreeMap::new();
    for (w, rest) in reachable_below(v, &cap) {
        let bc = combination(v, &rest, &w);
        bottoms
            .entry(w)
            .and_modify(|old| {
                if bc < *old {
                    *old = bc.clone();
                }
            })
            .or_insert(bc);
    }

    let parent_hh = u.height() * v.height();
    for u2 in &tops {
        let (a, _) = decompose(u, u2).expect("constructed successor decomposes");
        for (v2, (b, c)) in &bottoms {
            if ht(v2) >= delta * ht(u2) {
                continue;
            }
            let ratio = BigRational::new(parent_hh.clone(), u2.height() * v2.height());
            let index = FiberIndex {
                a: a.clone(),
                b: b.clone(),
            };
            let here = format!("successor ({u2}, {v2})");
            if !node2_in_j(u2, v2, delta) || !succ_rel(u, u2) || !reach_rel(v, v2) {
                out.violations.push(format!("{here}: membership fails"));
            }
            let (ar, br) = (BigRational::from(a.clone()), BigRational::from(b.clone()));
            if &ar * &two_d2 <= BigRational::one() || b < &BigInt::one() || br > &ar * &two_d2 {
                out.violations
                    .push(format!("{here}: (a, b) = ({a}, {b}) outside range"));
            }
            if c.is_negative() || c > b {
                out.violations
                    .push(format!("{here}: c = {c} outside [0, b]"));
            }
            let ab = &ar * &br;
            let four = BigRational::from(BigInt::from(4));
            if ratio < (&four * &ab).recip() || ratio > ab.recip() {
                out.violations
                    .push(format!("{here}: ratio {ratio} outside [1/(4ab), 1/(ab)]"));
            }
            if ratio >= delta * delta {
                out.violations
                    .push(format!("{here}: ratio {ratio} not below δ²"));
            }
            let node = if mirrored {
                CoverNode2 {
                    u: v2.clone(),
                    v: u2.clone(),
                    delta: delta.clone(),
                }
            } else {
                CoverNode2 {
                    u: u2.clone(),
                    v: v2.clone(),
                    delta: delta.clone(),
                }
            };
            out.successors.push(Successor2 {
                node,
                index,
                c: c.clone(),
                ratio,
            });
        }
    }
    for (ix, n) in out.fibers() {
        if BigInt::from(n) > &ix.b * 8 {
            out.violations
                .push(format!("fiber ({}, {}) has {n} > 8b elements", ix.a, ix.b));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberRow {
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub a: BigInt,
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub b: BigInt,
    pub count: usize,
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub bound: BigInt,
}

/// Certified pieces of the cover sum at one node.
#[derive(Clone, Debug, Serialize)]
pub struct CoverAudit {
    pub node: [String; 2],
    pub s: f64,
    pub delta: String,
    pub a_max: u64,
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub analytic_bound: f64,
    pub successors: usize,
    pub fibers: Vec<FiberRow>,
    pub warning: Option<String>,
    pub violations: Vec<String>,
}

impl CoverAudit {
    /// `partial + tail <= analytic`, allowing relative slack `tol`.
    pub fn within_bound(&self, tol: f64) -> bool {
        self.partial_sum + self.tail_bound <= self.analytic_bound * (1.0 + tol)
    }
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

/// Sum `(diam'/diam)^s` over successors with `a <= a_max`, plus a majorant
/// for the rest and the closed-form bound.
pub fn cover_sum_audit(node: &CoverNode2, s: f64, a_max: u64) -> Result<CoverAudit> {
    let delta = ratio_f64(&node.delta);
    analytic_bound2(delta, s)?;
    let sigma = sigma2_enumerate(node, a_max)?;
    audit_sigma(node, &sigma, s, a_max)
}

/// [`cover_sum_audit`] on successors already enumerated with the same `a_max`,
/// for sweeping `s` without repeating the enumeration.
pub fn audit_sigma(node: &CoverNode2, sigma: &Sigma2, s: f64, a_max: u64) -> Result<CoverAudit> {
    let delta = ratio_f64(&node.delta);
    let analytic = analytic_bound2(delta, s)?;
    let tail = tail_bound2(delta, s, a_max)?;
    let partial: f64 = sigma
        .successors
        .iter()
        .map(|x| ratio_f64(&x.ratio).powf(s))
        .sum();
    // terms are below 1; pad for the rounding of each term and of the sum
    let partial = partial * (1.0 + 1e-12) + sigma.successors.len() as f64 * f64::EPSILON;
    let fibers = sigma
        .fibers()
        .into_iter()
        .map(|(ix, count)| FiberRow {
            bound: &ix.b * 8,
            a: ix.a,
            b: ix.b,
            count,
        })
        .collect();
    Ok(CoverAudit {
        node: [node.u.to_string(), node.v.to_string()],
        s,
        delta: node.delta.to_string(),
        a_max,
        partial_sum: if sigma.successors.is_empty() {
            0.0
        } else {
            partial
        },
        tail_bound: tail,
        analytic_bound: analytic,
        successors: sigma.successors.len(),
        fibers,
        warning: sigma.warning.clone(),
        violations: sigma.violations.clone(),
    })
}

/// `count` random cover nodes for `δ`: the short coordinate has height at most
/// `short_max` and value in `[0, 1)`, the tall one height in `(|u|/δ, 2|u|/δ]`.
/// Half of them, at random, list the tall coordinate first.
pub fn sample_nodes<R: Rng>(
    rng: &mut R,
    delta: &BigRational,
    count: usize,
    short_max: u64,
) -> Vec<CoverNode2> {
    let unit = |rng: &mut R, q: u64| loop {
        let p = rng.gen_range(0..q);
        if p.gcd(&q) == 1 {
            return PrimitiveVector::new(p, q).expect("reduced");
        }
    };
    let inv = delta.recip();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = rng.gen_range(1..=short_max);
        let u = unit(rng, q);
        let lo: BigInt = (&inv * ht(&u)).floor().to_integer() + 1u32;
        let hi = (&inv * ht(&u) * BigRational::from(BigInt::from(2)))
            .floor()
            .to_integer();
        let (Some(lo), Some(hi)) = (lo.to_u64(), hi.to_u64()) else {
            continue;
        };
        if lo > hi {
            continue;
        }
        let q = rng.gen_range(lo..=hi);
        let v = unit(rng, q);
        let (u, v) = if rng.gen_bool(0.5) { (v, u) } else { (u, v) };
        if let Ok(node) = CoverNode2::new(u, v, delta.clone()) {
            out.push(node);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::pv;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn membership() {
        assert!(node2_in_j(&pv(1, 1), &pv(5, 3), &r(1, 2)));
        assert!(!node2_in_j(&pv(3, 2), &pv(5, 3), &r(1, 2)));
        assert!(!node2_in_j(&pv(1, 1), &pv(1, 1), &r(1, 2)));
        assert!(node2_in_j(&pv(5, 3), &pv(1, 1), &r(1, 2)));
    }

    #[test]
    fn small_successor_set() {
        let node = CoverNode2::new(pv(1, 1), pv(5, 3), r(1, 2)).unwrap();
        let sigma = sigma2_enumerate(&node, 7).unwrap();
        assert!(sigma.violations.is_empty(), "{:?}", sigma.violations);
        let at = |a: i64, b: i64| -> Vec<(PrimitiveVector, PrimitiveVector)> {
            let ix = FiberIndex {
                a: a.into(),
                b: b.into(),
            };
            sigma
                .successors
                .iter()
                .filter(|s| s.index == ix)
                .map(|s| (s.node.u.clone(), s.node.v.clone()))
                .collect()
        };
        let fiber = at(7, 1);
        assert_eq!(fiber, vec![(pv(6, 7), pv(5, 3)), (pv(8, 7), pv(5, 3))]);
        assert_eq!(
            sigma.fibers()[&FiberIndex {
                a: 7.into(),
                b: 1.into()
            }],
            2
        );
    }

    #[test]
    fn cap_too_small_warns() {
        let node = CoverNode2::new(pv(1, 1), pv(5, 3), r(1, 2)).unwrap();
        let sigma = sigma2_enumerate(&node, 1).unwrap();
        assert!(sigma.successors.is_empty());
        assert!(sigma.warning.is_some());
        let sigma = sigma2_enumerate(&node, 2).unwrap();
        assert!(sigma.warning.is_some());
    }

    #[test]
    fn mirrored_node_swaps_back() {
        let node = CoverNode2::new(pv(5, 3), pv(1, 1), r(1, 2)).unwrap();
        let sigma = sigma2_enumerate(&node, 7).unwrap();
        assert!(sigma
            .successors
            .iter()
            .any(|s| s.node.u == pv(5, 3) && s.node.v == pv(8, 7)));
    }

    #[test]
    fn sampled_nodes_are_in_j() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let nodes = sample_nodes(&mut rng, &r(1, 8), 20, 4);
        assert_eq!(nodes.len(), 20);
        assert!(nodes.iter().all(|n| node2_in_j(&n.u, &n.v, &n.delta)));
    }

    #[test]
    fn audit_against_closed_form() {
        let node = CoverNode2::new(pv(1, 1), pv(17, 10), r(1, 8)).unwrap();
        let audit = cover_sum_audit(&node, 1.75, 1000).unwrap();
        assert!(audit.violations.is_empty(), "{:?}", audit.violations);
        assert!(audit.successors > 0);
        assert_eq!(audit.analytic_bound, 16.0);
        assert!(audit.within_bound(0.0));
        assert!(cover_sum_audit(&node, 1.5, 10).is_err());
        assert!(cover_sum_audit(&node, 2.0, 10).is_err());
    }
}
