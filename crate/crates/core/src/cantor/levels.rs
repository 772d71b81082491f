//! Nested interval construction around a ladder with prescribed growth.
//!
//! Level `j` uses the base height `Q = q_{k0+j}` and
//! `h = floor(Q / ln Q)`, `eps = 1/(8h^2)`, `d = 1/Q^2`. Every interval is
//! `[c - d, c + d]` around a rational `c` of height in `[h, 2h]`; children of
//! a parent centered at `c` come from the band `[h', 2h']` of the sub-interval
//! of radius `d/6` around `c + d/2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::cf::{
    jb_ladder, ladder_from_stream, ConvergentLadder, PartialQuotientStream, PrimitiveVector, Tail,
};
use crate::count::{count_band, nearest_in_band, BandCount, CountLimits, RationalInterval};
use crate::error::{Error, Result};
use crate::logs::floor_over_ln;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelParams {
    pub base_height: BigInt,
    pub h: BigInt,
    pub eps: BigRational,
    pub d: BigRational,
}

impl LevelParams {
    pub fn from_base_height(q: &BigInt) -> Result<Self> {
        if *q < BigInt::from(2) {
            return Err(Error::InvalidInput(format!(
                "base height must be at least 2, got {q}"
            )));
        }
        let h = floor_over_ln(q);
        let eps = BigRational::new(BigInt::one(), BigInt::from(8) * &h * &h);
        let d = BigRational::new(BigInt::one(), q * q);
        Ok(LevelParams {
            base_height: q.clone(),
            h,
            eps,
            d,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorInterval {
    pub center: PrimitiveVector,
    /// Index of the enclosing interval one level up.
    pub parent: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorLevel {
    pub j: usize,
    pub params: LevelParams,
    pub intervals: Vec<CantorInterval>,
    /// Band count of each parent's sub-interval, indexed like the previous level.
    pub parent_counts: Vec<BandCount>,
    /// Least of `parent_counts`; `None` at level 0.
    pub m: Option<BandCount>,
}

impl CantorLevel {
    pub fn h(&self) -> &BigInt {
        &self.params.h
    }

    pub fn eps(&self) -> &BigRational {
        &self.params.eps
    }

    pub fn d(&self) -> &BigRational {
        &self.params.d
    }

    /// The closed interval `[c - d, c + d]` of interval `k`.
    pub fn interval(&self, k: usize) -> RationalInterval {
        RationalInterval::around(&self.intervals[k].center.value(), self.d())
            .expect("positive radius")
    }

    pub fn children_of(&self, parent: usize) -> impl Iterator<Item = usize> + '_ {
        self.intervals
            .iter()
            .enumerate()
            .filter(move |(_, iv)| iv.parent == Some(parent))
            .map(|(k, _)| k)
    }
}

fn fail(inequality: &'static str, step: usize, detail: String) -> Error {
    Error::Inequality {
        inequality,
        step,
        detail,
    }
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from(n)
}

/// Level-wide inequalities at step `j`, given the parameters of `j` and `j+1`.
fn check_step(j: usize, cur: &LevelParams, next: Option<&LevelParams>) -> Result<()> {
    if cur.d > cur.eps {
        return Err(fail(
            "scc",
            j,
            format!("d = {} exceeds 1/(8h^2) = {}", cur.d, cur.eps),
        ));
    }
    if &cur.d * BigRational::from(BigInt::from(2)) >= cur.eps {
        return Err(fail(
            "gap",
            j,
            format!("2d = 2·{} is not below eps = {}", cur.d, cur.eps),
        ));
    }
    let Some(next) = next else { return Ok(()) };
    if &next.d * BigRational::from(BigInt::from(3)) > cur.d {
        return Err(fail(
            "containment",
            j,
            format!("next d = {} exceeds d/3 with d = {}", next.d, cur.d),
        ));
    }
    if next.h <= BigInt::from(24) * &cur.h {
        return Err(fail(
            "next",
            j,
            format!(
                "next h = {} is not above 24h = {}",
                next.h,
                BigInt::from(24) * &cur.h
            ),
        ));
    }
    let window = BigRational::new(
        BigInt::from(3) * &cur.base_height * &cur.base_height,
        cur.h.clone(),
    );
    if window >= rat(next.h.clone()) {
        return Err(fail(
            "window",
            j,
            format!("3Q^2/h = {} is not below next h = {}", window, next.h),
        ));
    }
    Ok(())
}

/// The point `c + d/2` around which children of the interval at `c` are sought.
pub fn child_target(center: &PrimitiveVector, d: &BigRational) -> BigRational {
    center.value() + d / BigRational::from(BigInt::from(2))
}

/// A convergent height of `x` in `[lo, hi]`, if any.
fn convergent_height_in(x: &BigRational, lo: &BigRational, hi: &BigInt) -> Option<BigInt> {
    let stream = PartialQuotientStream::from_rational(x);
    let ladder = ladder_from_stream(&stream, usize::MAX).ok()?;
    ladder
        .heights()
        .into_iter()
        .find(|q| rat(q.clone()) >= *lo && q <= hi)
}

/// Build levels `0..=depth` over the base heights `q_{k0}, …, q_{k0+depth}`,
/// keeping at most `branch_cap` children per parent, nearest to the target first.
pub fn build_levels(
    base: &ConvergentLadder,
    k0: usize,
    depth: usize,
    branch_cap: usize,
    limits: CountLimits,
) -> Result<Vec<CantorLevel>> {
    if branch_cap == 0 {
        return Err(Error::InvalidInput("branch cap must be at least 1".into()));
    }
    let heights = base.heights();
    if heights.len() <= k0 + depth {
        return Err(Error::InvalidInput(format!(
            "base ladder has {} entries, need index {}",
            heights.len(),
            k0 + depth
        )));
    }
    let params = (0..=depth)
        .map(|j| LevelParams::from_base_height(&heights[k0 + j]))
        .collect::<Result<Vec<_>>>()?;
    for j in 0..=depth {
        check_step(j, &params[j], params.get(j + 1))?;
    }

    let h0 = &params[0].h;
    let seed = if h0.is_one() {
        PrimitiveVector::integer(0)
    } else {
        PrimitiveVector::new(1, h0.clone())?
    };
    let mut levels = vec![CantorLevel {
        j: 0,
        params: params[0].clone(),
        intervals: vec![CantorInterval {
            center: seed,
            parent: None,
        }],
        parent_counts: Vec::new(),
        m: None,
    }];

    for j in 0..depth {
        let (cur, next) = (&params[j], &params[j + 1]);
        let radius = &cur.d / BigRational::from(BigInt::from(6));
        let band_top = &next.h * 2;
        let precondition_lo = BigRational::new(
            BigInt::from(6) * &cur.base_height * &cur.base_height,
            next.h.clone(),
        );
        let mut intervals = Vec::new();
        let mut counts = Vec::new();
        for (k, parent) in levels[j].intervals.iter().enumerate() {
            let q = parent.center.height();
            if &cur.d * BigRational::from(BigInt::from(2) * q * q) > BigRational::one() {
                return Err(fail(
                    "scc",
                    j,
                    format!("d exceeds 1/(2q^2) for center {}", parent.center),
                ));
            }
            let target = child_target(&parent.center, &cur.d);
            let band = RationalInterval::around(&target, &radius)?;
            if convergent_height_in(&target, &precondition_lo, &next.h).is_none() {
                return Err(fail(
                    "count-precondition",
                    j,
                    format!(
                        "{target} has no convergent height in [{precondition_lo}, {}]",
                        next.h
                    ),
                ));
            }
            let count = count_band(&band, &next.h, limits)?;
            let found =
                nearest_in_band(&target, &band.lo, &band.hi, &next.h, &band_top, branch_cap);
            if found.is_empty() {
                return Err(Error::Precondition(format!(
                    "no rational of height in [{}, {band_top}] in {band} (step {j})",
                    next.h
                )));
            }
            for f in found {
                intervals.push(CantorInterval {
                    center: PrimitiveVector::new(f.p, f.q)?,
                    parent: Some(k),
                });
            }
            counts.push(count);
        }
        let m = counts.iter().min_by(|a, b| a.value.cmp(&b.value)).cloned();
        levels.push(CantorLevel {
            j: j + 1,
            params: next.clone(),
            intervals,
            parent_counts: counts,
            m,
        });
    }
    Ok(levels)
}

/// The ladder `v_0 = (0, 1), v_1 = (1, 2)` that growth ladders start from.
pub fn default_start() -> ConvergentLadder {
    let s = PartialQuotientStream::from_u64s(0, &[2], Tail::Unknown).expect("valid stream");
    ladder_from_stream(&s, 2).expect("two entries")
}

#[derive(Clone, Debug)]
pub struct AutoBuild {
    pub k0: usize,
    pub base: ConvergentLadder,
    pub levels: Vec<CantorLevel>,
    /// `(k0, inequality, step)` of each rejected attempt.
    pub rejected: Vec<(usize, &'static str, usize)>,
}

/// Build over a growth ladder for `delta`, doubling `k0` while a construction
/// inequality fails.
pub fn build_levels_auto(
    delta: f64,
    depth: usize,
    branch_cap: usize,
    k0_start: usize,
    max_attempts: usize,
    limits: CountLimits,
) -> Result<AutoBuild> {
    let start = default_start();
    let mut k0 = k0_start.max(start.len() - 1);
    let mut rejected = Vec::new();
    for _ in 0..max_attempts {
        let jb = jb_ladder(delta, k0 + depth, &start)?;
        match build_levels(&jb.ladder, k0, depth, branch_cap, limits) {
            Ok(levels) => {
                return Ok(AutoBuild {
                    k0,
                    base: jb.ladder,
                    levels,
                    rejected,
                })
            }
            Err(Error::Inequality {
                inequality, step, ..
            }) => {
                rejected.push((k0, inequality, step));
                k0 *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Precondition(format!(
        "no k0 up to {} satisfies the construction inequalities",
        k0 / 2
    )))
}

/// Levels as JSON: `{j, h, eps, d, base_height, intervals: [{p, q, parent}], m, m_method,
/// parent_counts: [{value, method}]}`.
pub fn levels_to_json(levels: &[CantorLevel]) -> serde_json::Value {
    use serde_json::json;
    let rows: Vec<_> = levels
        .iter()
        .map(|l| {
            let intervals: Vec<_> = l
                .intervals
                .iter()
                .map(|iv| {
                    json!({
                        "p": iv.center.p().to_string(),
                        "q": iv.center.height().to_string(),
                        "parent": iv.parent,
                    })
                })
                .collect();
            json!({
                "j": l.j,
                "base_height": l.params.base_height.to_string(),
                "h": l.h().to_string(),
                "eps": l.eps().to_string(),
                "d": l.d().to_string(),
                "intervals": intervals,
                "m": l.m.as_ref().map(|m| m.value.to_string()),
                "m_method": l.m.as_ref().map(|m| m.method),
                "parent_counts": l.parent_counts,
            })
        })
        .collect();
    serde_json::Value::Array(rows)
}

/// Inverse of [`levels_to_json`] (counts are read back as recorded).
pub fn levels_from_json(v: &serde_json::Value) -> Result<Vec<CantorLevel>> {
    use crate::count::{parse_rational, CountMethod};
    let method_from_name = |name: &str| match name {
        "exhaustive" => Some(CountMethod::Exhaustive),
        "mobius" => Some(CountMethod::Mobius),
        "lower-bound" => Some(CountMethod::LowerBound),
        _ => None,
    };
    let bad = |what: &str| Error::Parse(format!("levels JSON: bad {what}"));
    let int = |v: &serde_json::Value, what: &str| -> Result<BigInt> {
        v.as_str()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(what))
    };
    let rows = v.as_array().ok_or_else(|| bad("top level"))?;
    let mut levels = Vec::new();
    for row in rows {
        let j = row["j"].as_u64().ok_or_else(|| bad("j"))? as usize;
        let base_height = int(&row["base_height"], "base_height")?;
        let h = int(&row["h"], "h")?;
        let eps = parse_rational(row["eps"].as_str().ok_or_else(|| bad("eps"))?)?;
        let d = parse_rational(row["d"].as_str().ok_or_else(|| bad("d"))?)?;
        let mut intervals = Vec::new();
        for iv in row["intervals"]
            .as_array()
            .ok_or_else(|| bad("intervals"))?
        {
            let center = PrimitiveVector::new(int(&iv["p"], "p")?, int(&iv["q"], "q")?)?;
            let parent = iv["parent"].as_u64().map(|p| p as usize);
            intervals.push(CantorInterval { center, parent });
        }
        let method = match row["m_method"].as_str() {
            None => None,
            Some(name) => Some(method_from_name(name).ok_or_else(|| bad("m_method"))?),
        };
        let mut parent_counts = Vec::new();
        for c in row["parent_counts"]
            .as_array()
            .ok_or_else(|| bad("parent_counts"))?
        {
            let method = match c["method"].as_str() {
                Some(name) => method_from_name(name).ok_or_else(|| bad("count method"))?,
                None => return Err(bad("count method")),
            };
            parent_counts.push(BandCount {
                value: int(&c["value"], "parent count")?,
                method,
            });
        }
        let m = match (&row["m"], method) {
            (serde_json::Value::Null, _) => None,
            (m, Some(method)) => Some(BandCount {
                value: int(m, "m")?,
                method,
            }),
            _ => return Err(bad("m")),
        };
        levels.push(CantorLevel {
            j,
            params: LevelParams {
                base_height,
                h,
                eps,
                d,
            },
            intervals,
            parent_counts,
            m,
        });
    }
    Ok(levels)
}

/// Number of stored intervals per level.
pub fn level_sizes(levels: &[CantorLevel]) -> Vec<usize> {
    levels.iter().map(|l| l.intervals.len()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(k: usize) -> ConvergentLadder {
        jb_ladder(1.0, k, &default_start()).unwrap().ladder
    }

    #[test]
    fn level_zero_only() {
        let levels = build_levels(&base(4), 4, 0, 4, CountLimits::default()).unwrap();
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].intervals.len(), 1);
        assert_eq!(levels[0].intervals[0].center, crate::cf::pv(1, 111));
        assert_eq!(*levels[0].h(), BigInt::from(111));
    }

    #[test]
    fn small_k0_names_inequality() {
        match build_levels(&base(4), 1, 2, 4, CountLimits::default()) {
            Err(Error::Inequality {
                inequality, step, ..
            }) => {
                assert_eq!((inequality, step), ("scc", 0));
            }
            other => panic!("expected an inequality failure, got {other:?}"),
        }
    }

    #[test]
    fn two_levels() {
        let levels = build_levels(&base(6), 4, 2, 4, CountLimits::default()).unwrap();
        assert_eq!(level_sizes(&levels), vec![1, 4, 16]);
        let m1 = levels[1].m.as_ref().unwrap();
        assert!(m1.is_exact() && m1.value > BigInt::from(4));
        assert!(levels[2]
            .m
            .as_ref()
            .is_some_and(|m| m.value > BigInt::from(0)));
        let back = levels_from_json(&levels_to_json(&levels)).unwrap();
        assert_eq!(back, levels);
    }

    #[test]
    fn auto_doubles_k0() {
        let auto = build_levels_auto(1.0, 1, 2, 1, 6, CountLimits::default()).unwrap();
        assert_eq!(auto.k0, 4);
        assert_eq!(auto.rejected.len(), 2);
    }
}
