//! Shortest sup-norm vector of the lattice `{(e^{t/2}(p - q x), e^{-t/2} q)}`.
//!
//! A vector `(p, q)` whose approximation `|q x - p|` is beaten by a smaller
//! `q'` is dominated coordinatewise, so only `(1, 0)` and the ladder entries
//! compete. They are scanned by increasing `q` and the scan stops once the
//! second coordinate alone, `e^{-t/2} q`, is no better than the running best.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::tent::TentFunction;
use crate::cf::{ConvergentLadder, PrimitiveVector, RealHandle};
use crate::error::{Error, Result};
use crate::logs::{exp_ceil, ln_rational_bounds, Bounds};

/// The point set `g_t h_x^{-1} Z^2`.
#[derive(Clone, Debug)]
pub struct LatticeSlice<'a> {
    pub x: &'a RealHandle,
    pub t: f64,
}

/// Shortest vector: its sup-norm (and log) and the integer pair `(p, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Shortest {
    pub ln_length: f64,
    pub length: f64,
    pub p: BigInt,
    pub q: BigInt,
}

/// Precomputed ladder entries with certified `ln q` and `ln |q x - p|`,
/// reusable for every `t <= t_max`.
#[derive(Clone, Debug)]
pub struct SupNormSolver {
    entries: Vec<Entry>,
    t_max: f64,
}

#[derive(Clone, Debug)]
struct Entry {
    p: BigInt,
    q: BigInt,
    ln_q: Bounds,
    /// Bounds on `ln |q x - p|`; `-inf` when the distance may vanish.
    ln_d: Bounds,
}

struct Candidate {
    p: BigInt,
    q: BigInt,
    ln_len: Bounds,
}

/// Log-lengths closer than this are treated as equal.
pub const TAU: f64 = 1e-9;

impl SupNormSolver {
    pub fn new(x: &RealHandle, t_max: f64) -> Result<Self> {
        let cap = exp_ceil(t_max.max(0.0)) + 1;
        let ladder = x.ladder_past(&cap)?;
        let top = ladder.last().height().clone();
        // enclosure of x from a ladder far beyond the candidates
        let deep = x.ladder_past(&((&top * &top) << 64))?;
        let (x_lo, x_hi) = enclosure(&deep);
        let entries = ladder
            .entries()
            .iter()
            .map(|v| Entry::new(v, &x_lo, &x_hi))
            .collect();
        Ok(SupNormSolver { entries, t_max })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn solve(&self, t: f64) -> Result<Shortest> {
        if !t.is_finite() {
            return Err(Error::InvalidInput("time must be finite".into()));
        }
        if t > self.t_max {
            return Err(Error::HorizonBeyondValidity {
                requested: t,
                valid: self.t_max,
            });
        }
        let half = Bounds {
            lo: t / 2.0,
            hi: t / 2.0,
        };
        let minus_half = Bounds {
            lo: -t / 2.0,
            hi: -t / 2.0,
        };
        let mut best = Candidate {
            p: BigInt::one(),
            q: BigInt::zero(),
            ln_len: half,
        };
        for e in &self.entries {
            let second = e.ln_q.add(&minus_half);
            if second.lo >= best.ln_len.hi + TAU {
                break;
            }
            let first = if e.ln_d.hi == f64::NEG_INFINITY {
                e.ln_d
            } else {
                let b = e.ln_d.add(&half);
                Bounds {
                    lo: if e.ln_d.lo == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        b.lo
                    },
                    hi: b.hi,
                }
            };
            let c = Candidate {
                p: e.p.clone(),
                q: e.q.clone(),
                ln_len: Bounds {
                    lo: first.lo.max(second.lo),
                    hi: first.hi.max(second.hi),
                },
            };
            match compare(&c, &best)? {
                Ordering::Less => best = c,
                Ordering::Equal if tie_prefers(&c, &best) => best = c,
                _ => {}
            }
        }
        let ln_length = best.ln_len.point();
        Ok(Shortest {
            ln_length,
            length: ln_length.exp(),
            p: best.p,
            q: best.q,
        })
    }
}

impl Entry {
    fn new(v: &PrimitiveVector, x_lo: &BigRational, x_hi: &BigRational) -> Self {
        let q = v.height().clone();
        let mut p = v.p().clone();
        if x_lo == x_hi && q.is_one() {
            // x a half-integer: both roundings tie, keep the smaller |p|
            let alt: BigInt = &p
                + if *x_lo > BigRational::from(p.clone()) {
                    1
                } else {
                    -1
                };
            let d_alt = (x_lo - BigRational::from(alt.clone())).abs();
            let d = (x_lo - BigRational::from(p.clone())).abs();
            if d_alt == d && alt.abs() < p.abs() {
                p = alt;
            }
        }
        let qr = BigRational::from(q.clone());
        let pr = BigRational::from(p.clone());
        let a = &qr * x_lo - &pr;
        let b = &qr * x_hi - &pr;
        let (d_lo, d_hi) = if a.is_negative() != b.is_negative() && !a.is_zero() && !b.is_zero() {
            (BigRational::zero(), a.abs().max(b.abs()))
        } else {
            let (a, b) = (a.abs(), b.abs());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        let ln_or_neg_inf = |d: &BigRational, upper: bool| {
            if d.is_zero() {
                f64::NEG_INFINITY
            } else {
                let b = ln_rational_bounds(d);
                if upper {
                    b.hi
                } else {
                    b.lo
                }
            }
        };
        Entry {
            ln_q: crate::logs::ln_bounds(&q),
            ln_d: Bounds {
                lo: ln_or_neg_inf(&d_lo, false),
                hi: ln_or_neg_inf(&d_hi, true),
            },
            p,
            q,
        }
    }
}

/// `[lo, hi]` containing `x`, from the last two ladder entries.
fn enclosure(ladder: &ConvergentLadder) -> (BigRational, BigRational) {
    let entries = ladder.entries();
    let last = entries.last().unwrap().value();
    if ladder.is_complete() {
        return (last.clone(), last);
    }
    if entries.len() < 2 {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        return (&last - &half, &last + &half);
    }
    let prev = entries[entries.len() - 2].value();
    if prev < last {
        (prev, last)
    } else {
        (last, prev)
    }
}

fn tie_prefers(c: &Candidate, best: &Candidate) -> bool {
    (&c.q, c.p.abs()) < (&best.q, best.p.abs())
}

/// Compare two candidate lengths. Lengths agreeing to within `TAU` count as
/// a tie; an enclosure too wide to decide is an error.
fn compare(a: &Candidate, b: &Candidate) -> Result<Ordering> {
    if a.ln_len.hi < b.ln_len.lo - TAU {
        return Ok(Ordering::Less);
    }
    if a.ln_len.lo > b.ln_len.hi + TAU {
        return Ok(Ordering::Greater);
    }
    let narrow = |c: &Candidate| c.ln_len.hi - c.ln_len.lo <= TAU;
    if narrow(a) && narrow(b) {
        return Ok(Ordering::Equal);
    }
    Err(Error::Undecidable(format!(
        "sup-norm lengths of ({}, {}) and ({}, {}) too close",
        a.p, a.q, b.p, b.q
    )))
}

pub fn shortest_sup(slice: &LatticeSlice) -> Result<Shortest> {
    SupNormSolver::new(slice.x, slice.t)?.solve(slice.t)
}

/// `-2 ln` of the shortest sup-norm length.
pub fn w_lattice(slice: &LatticeSlice) -> Result<f64> {
    Ok(-2.0 * shortest_sup(slice)?.ln_length)
}

/// One sample of the sandwich check.
#[derive(Clone, Debug, PartialEq)]
pub struct PlSample {
    pub t: f64,
    pub w_lattice: f64,
    pub tent: f64,
    pub excess: f64,
}

/// `w_lattice - tent` over a grid.
pub fn pl_sweep(x: &RealHandle, grid: &[f64]) -> Result<Vec<PlSample>> {
    let t_max = grid.iter().copied().fold(0.0f64, f64::max);
    let solver = SupNormSolver::new(x, t_max)?;
    let tent = TentFunction::for_real(x, t_max)?;
    grid.iter()
        .map(|&t| {
            let w = -2.0 * solver.solve(t)?.ln_length;
            let h = tent.eval_checked(t)?;
            Ok(PlSample {
                t,
                w_lattice: w,
                tent: h,
                excess: w - h,
            })
        })
        .collect()
}

/// Extremes of `w_lattice - tent` over the grid: `(max_excess, min_excess)`.
pub fn verify_pl(x: &RealHandle, grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty time grid".into()));
    }
    let samples = pl_sweep(x, grid)?;
    let max = samples
        .iter()
        .map(|s| s.excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = samples
        .iter()
        .map(|s| s.excess)
        .fold(f64::INFINITY, f64::min);
    Ok((max, min))
}

/// `lo, lo + step, ...` up to `hi` inclusive (within rounding).
pub fn time_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as i64;
    (0..=n.max(0)).map(|i| lo + i as f64 * step).collect()
}

/// Brute force over `0 <= q <= q_max`, nearest `p`, for cross-checking; `x` rational.
pub fn shortest_sup_scan(x: &BigRational, t: f64, q_max: u64) -> (f64, BigInt, BigInt) {
    let half = t / 2.0;
    let mut best = (half, BigInt::one(), BigInt::zero());
    for q in 1..=q_max {
        let qx = x * BigRational::from(BigInt::from(q));
        let floor = qx.floor().to_integer();
        for p in [floor.clone(), floor + 1] {
            let d = (&qx - BigRational::from(p.clone())).abs();
            let first = if d.is_zero() {
                f64::NEG_INFINITY
            } else {
                crate::logs::ln_rational(&d) + half
            };
            let len = first.max((q as f64).ln() - half);
            if len < best.0 - 1e-12 {
                best = (len, p, BigInt::from(q));
            }
        }
    }
    best
}
