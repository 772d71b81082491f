//! The successor relation `u ⊢ v` (consecutive in some ladder) and its
//! transitive closure `u ⊨ v` (same ladder, `u` no later than `v`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::vector::{IntVec, PrimitiveVector};

/// `v = a u + rest` with `|rest| < |u|`, or `None` when `|u x v| != 1` or `|u| >= |v|`.
pub fn decompose(u: &PrimitiveVector, v: &PrimitiveVector) -> Option<(BigInt, IntVec)> {
    if u.height() >= v.height() || !u.unimodular_with(v) {
        return None;
    }
    // for |u| = 1 the remainder height is 0 and rest is a seed ±(1, 0)
    let a = v.height().div_floor(u.height());
    let rest = v.as_vec().sub_mul(&a, &u.as_vec());
    Some((a, rest))
}

/// Decides `u ⊢ v`.
pub fn succ_rel(u: &PrimitiveVector, v: &PrimitiveVector) -> bool {
    let Some((a, rest)) = decompose(u, v) else {
        return false;
    };
    if u.height().is_one() {
        return a >= BigInt::from(2) && rest.q.is_zero() && rest.p.abs().is_one();
    }
    // rest is a primitive vector below u; the chain (rest, u) must descend to height 1
    match rest.primitive() {
        Some(w) => a >= BigInt::one() && chain_reaches_base(&w, u),
        None => false,
    }
}

/// Follow the unique backward chain from the pair `(prev, cur)` down to height 1.
fn chain_reaches_base(prev: &PrimitiveVector, cur: &PrimitiveVector) -> bool {
    backward_chain(prev, cur).is_some()
}

/// The ladder ending in `prev, cur`, listed from the top down. `None` when the
/// pair is not consecutive in any ladder.
pub fn backward_chain(
    prev: &PrimitiveVector,
    cur: &PrimitiveVector,
) -> Option<Vec<PrimitiveVector>> {
    let mut out = vec![cur.clone(), prev.clone()];
    let (mut prev, mut cur) = (prev.clone(), cur.clone());
    loop {
        let (a, rest) = decompose(&prev, &cur)?;
        if prev.height().is_one() {
            return (a >= BigInt::from(2) && rest.q.is_zero() && rest.p.abs().is_one())
                .then_some(out);
        }
        let w = rest.primitive()?;
        out.push(w.clone());
        cur = prev;
        prev = w;
    }
}

/// All `w` with `w ⊢ v`; at most two.
pub fn predecessors(v: &PrimitiveVector) -> Vec<PrimitiveVector> {
    let q = v.height();
    if q.is_one() {
        return Vec::new();
    }
    let p = v.p().mod_floor(q);
    let inv = mod_inverse(&p, q).expect("p and q coprime");
    let mut out = Vec::new();
    // m q - p h = ±1 with 1 <= h < q
    for sign in [1i32, -1] {
        let h = if sign > 0 {
            (q - &inv).mod_floor(q)
        } else {
            inv.clone()
        };
        if h.is_zero() {
            continue;
        }
        let m = (v.p() * &h + BigInt::from(sign)) / q;
        if let Ok(w) = PrimitiveVector::new(m, h) {
            if succ_rel(&w, v) && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out.sort();
    out
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Decides `u ⊨ v`: `u == v`, or some single ladder passes through `u` and later `v`.
pub fn reach_rel(u: &PrimitiveVector, v: &PrimitiveVector) -> bool {
    if u == v {
        return true;
    }
    if u.height() >= v.height() {
        return false;
    }
    predecessors(v)
        .iter()
        .any(|w| backward_chain(w, v).is_some_and(|chain| chain.contains(u)))
}

/// Every `v` with `u ⊢ v` and `|v| <= cap`, sorted by height then value.
pub fn enumerate_successors(u: &PrimitiveVector, cap: &BigInt) -> Vec<PrimitiveVector> {
    let rests: Vec<IntVec> = if u.height().is_one() {
        vec![IntVec::seed(1), IntVec::seed(-1)]
    } else {
        predecessors(u)
            .iter()
            .map(PrimitiveVector::as_vec)
            .collect()
    };
    let min_a = if u.height().is_one() { 2 } else { 1 };
    let mut out = Vec::new();
    for rest in rests {
        let mut a = BigInt::from(min_a);
        loop {
            let v = u.as_vec().mul_add(&a, &rest);
            if &v.q > cap {
                break;
            }
            if let Some(v) = v.primitive() {
                if succ_rel(u, &v) {
                    out.push(v);
                }
            }
            a += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::vector::pv;

    #[test]
    fn succ_examples() {
        assert!(succ_rel(&pv(1, 1), &pv(3, 2)));
        assert!(!succ_rel(&pv(1, 1), &pv(2, 1)));
        assert!(succ_rel(&pv(3, 2), &pv(7, 5)));
        assert!(!succ_rel(&pv(1, 1), &pv(1, 1)));
        assert!(!succ_rel(&pv(3, 2), &pv(2, 1)));
        let (a, rest) = decompose(&pv(3, 2), &pv(7, 5)).unwrap();
        assert_eq!(a, BigInt::from(2));
        assert_eq!(rest, IntVec::new(1, 1));
    }

    #[test]
    fn reach_examples() {
        assert!(reach_rel(&pv(3, 2), &pv(3, 2)));
        assert!(reach_rel(&pv(2, 1), &pv(8, 5)));
        assert!(!reach_rel(&pv(5, 3), &pv(7, 5)));
        assert!(reach_rel(&pv(1, 1), &pv(7, 5)));
        assert!(reach_rel(&pv(4, 3), &pv(7, 5)));
    }

    #[test]
    fn predecessor_sets() {
        assert_eq!(predecessors(&pv(7, 5)), vec![pv(3, 2), pv(4, 3)]);
        assert_eq!(predecessors(&pv(3, 2)), vec![pv(1, 1), pv(2, 1)]);
        assert!(predecessors(&pv(4, 1)).is_empty());
    }

    #[test]
    fn successor_lists() {
        let cap = |c: i64| BigInt::from(c);
        assert_eq!(
            enumerate_successors(&pv(1, 1), &cap(3)),
            vec![pv(1, 2), pv(3, 2), pv(2, 3), pv(4, 3)]
        );
        assert!(enumerate_successors(&pv(3, 2), &cap(2)).is_empty());
        assert_eq!(
            enumerate_successors(&pv(3, 2), &cap(5)),
            vec![pv(4, 3), pv(5, 3), pv(7, 5), pv(8, 5)]
        );
    }
}
