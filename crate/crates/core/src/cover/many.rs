//! Covers in `n >= 3` coordinates: nodes `(c, i, j)`, the successor predicate
//! and an exhaustive fiber check for `n = 3`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::cf::{enumerate_successors, reach_rel, succ_rel, PrimitiveVector};
use crate::count::{min_height_in_interval, RationalInterval};
use crate::error::{Error, Result};

/// `n` rational coordinates with a distinguished tall index `i` and short index `j`
/// (zero-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverNodeN {
    pub c: Vec<PrimitiveVector>,
    pub i: usize,
    pub j: usize,
    pub delta: BigRational,
}

fn ht(v: &PrimitiveVector) -> BigRational {
    BigRational::from(v.height().clone())
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from(n.into())
}

/// `|c_j| < sqrt(δ) |c_i|` and every `|c_k|` divides `|c_i||c_j|`.
pub fn node_n_in_j(c: &[PrimitiveVector], i: usize, j: usize, delta: &BigRational) -> bool {
    if i == j || i >= c.len() || j >= c.len() {
        return false;
    }
    let (hi, hj) = (ht(&c[i]), ht(&c[j]));
    if &hj * &hj >= delta * &hi * &hi {
        return false;
    }
    let prod = c[i].height() * c[j].height();
    c.iter().all(|ck| prod.is_multiple_of(ck.height()))
}

impl CoverNodeN {
    pub fn new(c: Vec<PrimitiveVector>, i: usize, j: usize, delta: BigRational) -> Result<Self> {
        if !(delta.is_positive() && delta < BigRational::one()) {
            return Err(Error::InvalidInput(format!(
                "δ must lie in (0, 1), got {delta}"
            )));
        }
        if !node_n_in_j(&c, i, j, &delta) {
            return Err(Error::InvalidInput("not a cover node".into()));
        }
        Ok(CoverNodeN { c, i, j, delta })
    }

    /// `|c_i||c_j|`
    pub fn scale(&self) -> BigInt {
        self.c[self.i].height() * self.c[self.j].height()
    }

    /// Radius of the ball: `1/(|c_i||c_j|)`.
    pub fn radius(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.scale())
    }

    /// Per-coordinate radii of the inner box: coordinate `i` shrinks to `1/|c_i|²`.
    pub fn inner_radii(&self) -> Vec<BigRational> {
        let hi = self.c[self.i].height();
        (0..self.c.len())
            .map(|k| {
                if k == self.i {
                    BigRational::new(BigInt::one(), hi * hi)
                } else {
                    self.radius()
                }
            })
            .collect()
    }
}

/// Do the open inner boxes of two nodes meet?
pub fn inner_boxes_meet(a: &CoverNodeN, b: &CoverNodeN) -> bool {
    let (ra, rb) = (a.inner_radii(), b.inner_radii());
    (0..a.c.len()).all(|k| (a.c[k].value() - b.c[k].value()).abs() < &ra[k] + &rb[k])
}

/// Is `child` in `σ(parent)`? Both must be cover nodes for the same `δ`.
pub fn sigma_n_member(parent: &CoverNodeN, child: &CoverNodeN) -> bool {
    let n = parent.c.len();
    if child.c.len() != n || child.delta != parent.delta {
        return false;
    }
    if !node_n_in_j(&parent.c, parent.i, parent.j, &parent.delta)
        || !node_n_in_j(&child.c, child.i, child.j, &child.delta)
    {
        return false;
    }
    let (c, d) = (&parent.c, &child.c);
    let (i, j, i2, j2) = (parent.i, parent.j, child.i, child.j);
    // (a)
    if i2 != j || !succ_rel(&c[j], &d[j]) {
        return false;
    }
    // (b)
    if j2 == i && !reach_rel(&c[i], &d[i]) {
        return false;
    }
    // (c)
    if c[i].height() >= d[j].height() || c[j].height() >= d[j2].height() {
        return false;
    }
    // (d)
    if !inner_boxes_meet(parent, child) {
        return false;
    }
    // (e)
    c[i].height() * c[i].height() < d[i2].height() * d[j2].height()
}

/// Caps for [`fiber_n_audit`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FiberCaps {
    pub a_max: u64,
    pub height_max: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChildN {
    pub c: Vec<String>,
    /// The child's short index `j'` (zero-based), i.e. the fiber map used.
    pub k: usize,
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub a: BigInt,
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub b: BigInt,
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub q_k: BigInt,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberRowN {
    pub k: usize,
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub a: BigInt,
    #[serde(serialize_with = "crate::count::as_decimal")]
    pub b: BigInt,
    pub count: usize,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberNReport {
    pub caps: FiberCaps,
    pub children: Vec<ChildN>,
    pub fibers: Vec<FiberRowN>,
    /// Some child with `a <= a_max` may need a height above `height_max`.
    pub partial: bool,
    pub violations: Vec<String>,
}

/// Rationals `p/q` with `|p/q - x| < r` and `q` in `heights`.
fn near(
    x: &BigRational,
    r: &BigRational,
    heights: impl Iterator<Item = BigInt>,
) -> Vec<PrimitiveVector> {
    let mut out = Vec::new();
    for q in heights {
        let qr = rat(q.clone());
        let lo = ((x - r) * &qr).floor().to_integer();
        let hi = ((x + r) * &qr).ceil().to_integer();
        let mut p = lo;
        while p <= hi {
            if p.gcd(&q).is_one() {
                let v = BigRational::new(p.clone(), q.clone());
                if (&v - x).abs() < *r {
                    out.push(PrimitiveVector::new(p.clone(), q.clone()).expect("reduced"));
                }
            }
            p += 1;
        }
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.to_u64().expect("small product");
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    out.sort();
    out
}

/// `q_k`: `|c_i|` when `k = i`, otherwise the least height in the open interval
/// of length `4/(|c_i||c_j|)` centered at `ċ_k`.
pub fn fiber_base_height(parent: &CoverNodeN, k: usize) -> BigInt {
    if k == parent.i {
        return parent.c[parent.i].height().clone();
    }
    let r = parent.radius() * rat(2);
    let x = parent.c[k].value();
    let iv = RationalInterval::open(&x - &r, &x + &r).expect("nonempty");
    min_height_in_interval(&iv).height().clone()
}

/// Enumerate `σ(parent)` for `n = 3` within the caps, group it by `(k; a, b)`
/// and check the fiber, ratio, range and contraction bounds on every child.
pub fn fiber_n_audit(parent: &CoverNodeN, caps: FiberCaps) -> Result<FiberNReport> {
    let n = parent.c.len();
    if n != 3 {
        return Err(Error::InvalidInput(format!(
            "exhaustive fiber audit needs n = 3, got {n}"
        )));
    }
    if !node_n_in_j(&parent.c, parent.i, parent.j, &parent.delta) {
        return Err(Error::InvalidInput("parent is not a cover node".into()));
    }
    let (i, j, delta) = (parent.i, parent.j, &parent.delta);
    let c = &parent.c;
    let (hi, hj) = (c[i].height().clone(), c[j].height().clone());
    let hmax = BigInt::from(caps.height_max);
    let mut partial = false;

    let top = &hj * caps.a_max;
    if top > hmax {
        partial = true;
    }
    let tops: Vec<PrimitiveVector> = enumerate_successors(&c[j], &top.clone().min(hmax.clone()))
        .into_iter()
        .filter(|w| Integer::div_ceil(w.height(), &hj) <= BigInt::from(caps.a_max))
        .collect();

    let window = parent.radius() * rat(2);
    let mut children = Vec::new();
    let mut violations = Vec::new();
    for cj in &tops {
        let hcj = ht(cj);
        for k in (0..n).filter(|&k| k != j) {
            let l = (0..n)
                .find(|&l| l != j && l != k)
                .expect("three coordinates");
            // J: |c'_k|² < δ|c'_j|²; (c): |c_j| < |c'_k|
            let mut kh = Vec::new();
            let mut q: BigInt = &hj + 1u32;
            while rat(&q * &q) < delta * &hcj * &hcj {
                if q > hmax {
                    partial = true;
                    break;
                }
                kh.push(q.clone());
                q += 1;
            }
            for ck in near(&c[k].value(), &window, kh.into_iter()) {
                let prod = cj.height() * ck.height();
                let r_l =
                    parent.inner_radii()[l].clone() + BigRational::new(BigInt::one(), prod.clone());
                let ds = divisors(&prod);
                if ds.iter().any(|d| d > &hmax) {
                    partial = true;
                }
                for cl in near(&c[l].value(), &r_l, ds.into_iter().filter(|d| d <= &hmax)) {
                    let mut v = vec![cj.clone(); 3];
                    v[k] = ck.clone();
                    v[l] = cl;
                    let child = CoverNodeN {
                        c: v,
                        i: j,
                        j: k,
                        delta: delta.clone(),
                    };
                    if sigma_n_member(parent, &child) {
                        children.push(child);
                    }
                }
            }
        }
    }

    let sqrt_d_hj2 = delta * rat(&hj * &hj);
    let mut rows: BTreeMap<(usize, BigInt, BigInt), (usize, BigRational)> = BTreeMap::new();
    let mut out_children = Vec::new();
    for child in &children {
        let k = child.j;
        let (cj, ck) = (&child.c[j], &child.c[k]);
        let a = Integer::div_ceil(cj.height(), &hj);
        let q_k = fiber_base_height(parent, k);
        let b = Integer::div_floor(ck.height(), &q_k);
        let ratio = BigRational::new(&hi * &hj, cj.height() * ck.height());
        let here = format!(
            "child ({}; k = {})",
            child
                .c
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            k
        );
        let (ar, br, qr) = (rat(a.clone()), rat(b.clone()), rat(q_k.clone()));
        if &ar * &ar * delta <= BigRational::one() {
            violations.push(format!("{here}: a = {a} not above δ^(-1/2)"));
        }
        if b < BigInt::one() || (&br * &qr) * (&br * &qr) > &ar * &ar * &sqrt_d_hj2 {
            violations.push(format!("{here}: b = {b} outside [1, a sqrt(δ)|c_j|/q_k]"));
        }
        let lower = rat(hi.clone()) / (rat(2) * &ar * &br * &qr);
        let upper = rat(2) * rat(hi.clone()) / (&ar * &br * &qr);
        if b >= BigInt::one() && (ratio < lower || ratio > upper) {
            violations.push(format!("{here}: ratio {ratio} outside [{lower}, {upper}]"));
        }
        if &ratio * &ratio >= *delta {
            violations.push(format!("{here}: ratio {ratio} not below sqrt(δ)"));
        }
        let nn = n as i32;
        let base = rat(8).pow(nn - 1) * ar.pow(nn - 2) * br.pow(nn - 1);
        let bound = if k == i {
            base
        } else {
            rat(2) * (&qr / rat(hi.clone())).pow(nn) * base
        };
        let e = rows.entry((k, a.clone(), b.clone())).or_insert((0, bound));
        e.0 += 1;
        out_children.push(ChildN {
            c: child.c.iter().map(|v| v.to_string()).collect(),
            k,
            a,
            b,
            q_k,
            ratio: ratio.to_f64().unwrap_or(0.0),
        });
    }
    let fibers = rows
        .into_iter()
        .map(|((k, a, b), (count, bound))| {
            if rat(count as u64) > bound {
                violations.push(format!(
                    "fiber (k = {k}; {a}, {b}) has {count} > {bound} elements"
                ));
            }
            FiberRowN {
                k,
                a,
                b,
                count,
                bound: bound.to_f64().unwrap_or(f64::INFINITY),
            }
        })
        .collect();
    Ok(FiberNReport {
        caps,
        children: out_children,
        fibers,
        partial,
        violations,
    })
}
