//! Independent re-checking of constructed levels.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::levels::{CantorLevel, LevelParams};
use crate::cf::{ladder_from_stream, PartialQuotientStream, RealHandle, Tail};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub name: &'static str,
    pub level: usize,
    pub ok: bool,
    /// Where a failure happened, or a note on a vacuous pass.
    pub locus: Option<String>,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub certificates: Vec<Certificate>,
    /// Index of the sampled interval at each level, root to leaf.
    pub chain: Vec<usize>,
    /// The sampled point: every real whose expansion starts with this prefix.
    pub nested_point: PartialQuotientStream,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Certificate> {
        self.certificates.iter().filter(|c| !c.ok)
    }

    pub fn nested_real(&self) -> RealHandle {
        RealHandle::new(self.nested_point.clone())
    }
}

struct Log(Vec<Certificate>);

impl Log {
    fn record(&mut self, name: &'static str, level: usize, failures: Vec<String>) {
        let ok = failures.is_empty();
        let locus = if ok { None } else { Some(failures.join("; ")) };
        self.0.push(Certificate {
            name,
            level,
            ok,
            locus,
        });
    }
}

fn two() -> BigRational {
    BigRational::from(BigInt::from(2))
}

/// The leftmost chain: from the root, always the child with the smallest center.
fn leftmost_chain(levels: &[CantorLevel]) -> Vec<usize> {
    let mut chain = vec![0usize];
    for w in levels.windows(2) {
        let parent = *chain.last().unwrap();
        let next = w[1].children_of(parent).min_by(|&a, &b| {
            w[1].intervals[a]
                .center
                .value()
                .cmp(&w[1].intervals[b].center.value())
        });
        match next {
            Some(k) => chain.push(k),
            None => break,
        }
    }
    chain
}

/// Re-derive parameters, then check heights, gaps, nesting and the
/// convergent witnesses along a sampled nested point.
pub fn verify_levels(levels: &[CantorLevel]) -> Result<VerifyReport> {
    if levels.is_empty() {
        return Err(Error::InvalidInput("no levels to verify".into()));
    }
    let mut log = Log(Vec::new());

    for level in levels {
        let j = level.j;
        let mut bad = Vec::new();
        match LevelParams::from_base_height(&level.params.base_height) {
            Ok(p) if p == level.params => {}
            Ok(p) => bad.push(format!(
                "recorded (h, eps, d) differ from ({}, {}, {})",
                p.h, p.eps, p.d
            )),
            Err(e) => bad.push(e.to_string()),
        }
        log.record("parameters", j, bad);

        let (h, d, eps) = (level.h(), level.d(), level.eps());
        let top = h * 2;
        let bad = level
            .intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| iv.center.height() < h || iv.center.height() > &top)
            .map(|(k, iv)| format!("interval {k}: center {} outside [{h}, {top}]", iv.center))
            .collect();
        log.record("height", j, bad);

        let bad = level
            .intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| {
                let q = iv.center.height();
                d * BigRational::from(BigInt::from(2) * q * q) > BigRational::one()
            })
            .map(|(k, iv)| format!("interval {k}: d > 1/(2q^2) at {}", iv.center))
            .collect();
        log.record("scc", j, bad);

        let mut order: Vec<usize> = (0..level.intervals.len()).collect();
        order.sort_by_key(|&k| level.intervals[k].center.value());
        let bad = order
            .windows(2)
            .filter_map(|w| {
                let (a, b) = (
                    level.intervals[w[0]].center.value(),
                    level.intervals[w[1]].center.value(),
                );
                let gap = (b - d) - (a + d);
                (gap < *eps).then(|| format!("intervals {} and {}: gap {gap} < eps", w[0], w[1]))
            })
            .collect();
        log.record("gap", j, bad);
    }

    for w in levels.windows(2) {
        let (up, down) = (&w[0], &w[1]);
        let mut bad = Vec::new();
        for (k, iv) in down.intervals.iter().enumerate() {
            match iv.parent {
                Some(p) if p < up.intervals.len() => {
                    if !up.interval(p).contains_interval(&down.interval(k)) {
                        bad.push(format!("interval {k} leaves parent {p}"));
                    }
                }
                _ => bad.push(format!("interval {k} has no valid parent")),
            }
        }
        if bad.is_empty() && up.j + 1 != down.j {
            bad.push(format!("level {} follows level {}", down.j, up.j));
        }
        log.record("nesting", down.j, bad);
    }

    let chain = leftmost_chain(levels);
    let leaf_level = &levels[chain.len() - 1];
    let leaf = &leaf_level.intervals[*chain.last().unwrap()].center;
    let z = leaf.value() + leaf_level.d() / two();
    let exact = PartialQuotientStream::from_rational(&z);
    let nested_point =
        PartialQuotientStream::new(exact.a0().clone(), exact.prefix().to_vec(), Tail::Unknown)?;
    let ladder = ladder_from_stream(&nested_point, usize::MAX)?;
    let entries = ladder.entries();

    for (j, &k) in chain.iter().enumerate() {
        let level = &levels[j];
        let c = &level.intervals[k].center;
        let mut bad = Vec::new();
        let pos = entries.iter().position(|e| e == c);
        if pos.is_none() {
            bad.push(format!(
                "center {c} is not a convergent of the nested point"
            ));
        }
        let two_h = level.h() * 2;
        if c.height() >= &two_h {
            bad.push(format!("q = {} is not below 2h = {two_h}", c.height()));
        }
        log.record("convergent", j, bad);

        let mut bad = Vec::new();
        if j + 1 < levels.len() {
            // q' > 1/(4 h d) = Q^2/(4h)
            let floor = BigRational::new(
                &level.params.base_height * &level.params.base_height,
                level.h() * 4,
            );
            match pos.and_then(|i| entries.get(i + 1)) {
                Some(next) if BigRational::from(next.height().clone()) > floor => {}
                Some(next) => bad.push(format!(
                    "next height {} is not above {floor}",
                    next.height()
                )),
                None => bad.push("no next convergent".into()),
            }
            log.record("next-height", j, bad);
        } else {
            log.0.push(Certificate {
                name: "next-height",
                level: j,
                ok: true,
                locus: Some("leaf level: no deeper witness needed".into()),
            });
        }
    }
    if chain.len() < levels.len() {
        log.record(
            "chain",
            chain.len(),
            vec![format!(
                "interval {} at level {} has no children",
                chain.last().unwrap(),
                chain.len() - 1
            )],
        );
    }

    Ok(VerifyReport {
        certificates: log.0,
        chain,
        nested_point,
    })
}
