use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use excursion::cantor::{
    build_levels_auto, default_start, level_sizes, levels_from_json, levels_to_json,
    linked_divergence, lower_dim_estimate, recorded_counts, verify_levels,
};
use excursion::cf::jb_ladder;
use excursion::count::{
    count_band, count_floor_ratio, floor_ratio_bound, min_height_in_interval, parse_rational,
    CountLimits, RationalInterval, DEFAULT_MOBIUS_LIMIT, DEFAULT_SCAN_BUDGET,
};
use excursion::cover::{
    cover_sum_audit, fiber_n_audit, sample_nodes, upper_dim2, upper_dim_n, CoverNode2, CoverNodeN,
    FiberCaps,
};
use excursion::io::{divergence_json, events_csv, json_num, num, parse_real, pl_csv, pretty};
use excursion::lattice::{divergence_certificate, local_minima, pl_sweep, time_grid, Verdict};
use excursion::Error;

#[derive(Parser)]
#[command(
    name = "excursion",
    version,
    about = "Cusp excursions, divergence certificates and dimension bounds"
)]
struct Cli {
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for subcommands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Sweep {
    /// Named constant, `a0;a1,a2,...[,...]`, `cf v1:` line, or rational.
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, default_value_t = 30.0)]
    t1: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Args)]
struct Limits {
    #[arg(long, default_value_t = DEFAULT_SCAN_BUDGET)]
    scan_budget: u64,
    #[arg(long, default_value_t = DEFAULT_MOBIUS_LIMIT)]
    mobius_limit: u64,
}

impl Limits {
    fn get(&self) -> CountLimits {
        CountLimits {
            scan_budget: self.scan_budget,
            mobius_limit: self.mobius_limit,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// CSV of lattice excursion, tent and excess over a time grid.
    Wfunc(Sweep),
    /// Check that the excess stays in [0, 2 ln 2] over a grid.
    VerifyPl(Sweep),
    /// Local minima of the maximum of tents, as CSV.
    Minima {
        /// One coordinate per flag, in order.
        #[arg(long = "x", required = true)]
        xs: Vec<String>,
        #[arg(long = "y")]
        ys: Vec<String>,
        #[arg(long = "T")]
        horizon: f64,
    },
    /// Divergence report for a tuple of reals.
    Certify {
        #[arg(long = "x", required = true)]
        xs: Vec<String>,
        #[arg(long = "y")]
        ys: Vec<String>,
        #[arg(long)]
        delta: f64,
        #[arg(long = "T")]
        horizon: f64,
    },
    /// Reduced fractions with heights in [h, 2h] inside an interval.
    CountBand {
        #[arg(long)]
        interval: String,
        #[arg(long)]
        h: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Count of heights with floor(|p/q'| / q) = b, against the bound 2 b q² |I|.
    CountFloor {
        #[arg(long)]
        interval: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = DEFAULT_SCAN_BUDGET)]
        scan_budget: u64,
    },
    /// The rational of least height in an interval.
    MinHeight {
        #[arg(long)]
        interval: String,
    },
    /// Build nested levels and write them as JSON.
    CantorBuild {
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        cap: usize,
        #[arg(long, default_value_t = 1)]
        k0: usize,
        #[arg(long, default_value_t = 6)]
        attempts: usize,
        #[command(flatten)]
        limits: Limits,
    },
    /// Re-check levels written by cantor-build.
    CantorVerify {
        #[arg(long)]
        levels: PathBuf,
        /// Also run the divergence certificate on the sampled pair.
        #[arg(long)]
        divergence: bool,
    },
    /// Lower dimension quotients from recorded counts.
    DimLower {
        #[arg(long)]
        levels: PathBuf,
        #[arg(long, default_value_t = 1)]
        j_min: usize,
    },
    /// Audit the cover sum at a node (two coordinates) or the fibers of a node (three).
    CoverAudit {
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        /// Comma-separated rationals for the three-coordinate audit.
        #[arg(long)]
        c: Option<String>,
        /// One-based tall and short indices for `--c`.
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = 1.75)]
        s: f64,
        #[arg(long, default_value_t = 1000)]
        a_max: u64,
        #[arg(long, default_value_t = 200)]
        height_max: u64,
        /// Audit this many sampled nodes instead of one given node.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Closed-form upper dimension bound.
    DimUpper {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        delta: f64,
    },
}

/// Output plus whether every certificate in it held.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, ok: true }
    }
}

type Run = Result<Outcome, Error>;

fn reals(inputs: &[String]) -> Result<Vec<excursion::cf::RealHandle>, Error> {
    inputs.iter().map(|s| parse_real(s)).collect()
}

fn interval(s: &str) -> Result<RationalInterval, Error> {
    s.parse()
}

fn big(s: &str) -> Result<num_bigint::BigInt, Error> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer `{s}`")))
}

fn vector(s: &str) -> Result<excursion::cf::PrimitiveVector, Error> {
    Ok(excursion::cf::PrimitiveVector::from_ratio(&parse_rational(
        s,
    )?))
}

fn read_json(path: &PathBuf) -> Result<Value, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Run {
    match &cli.cmd {
        Cmd::Wfunc(sw) => {
            let x = parse_real(&sw.x)?;
            let samples = pl_sweep(&x, &time_grid(sw.t0, sw.t1, sw.step))?;
            Ok(Outcome::ok(pl_csv(&samples)?))
        }
        Cmd::VerifyPl(sw) => {
            let x = parse_real(&sw.x)?;
            let samples = pl_sweep(&x, &time_grid(sw.t0, sw.t1, sw.step))?;
            let max = samples
                .iter()
                .map(|s| s.excess)
                .fold(f64::NEG_INFINITY, f64::max);
            let min = samples
                .iter()
                .map(|s| s.excess)
                .fold(f64::INFINITY, f64::min);
            let tol = 1e-9;
            let ok = min >= -tol && max <= 2.0 * std::f64::consts::LN_2 + tol;
            let v = json!({
                "x": sw.x,
                "samples": samples.len(),
                "min_excess": json_num(min),
                "max_excess": json_num(max),
                "ok": ok,
            });
            Ok(Outcome {
                text: pretty(&v),
                ok,
            })
        }
        Cmd::Minima { xs, ys, horizon } => {
            let x = reals(&[xs.clone(), ys.clone()].concat())?;
            Ok(Outcome::ok(events_csv(&local_minima(&x, *horizon)?)?))
        }
        Cmd::Certify {
            xs,
            ys,
            delta,
            horizon,
        } => {
            let x = reals(&[xs.clone(), ys.clone()].concat())?;
            let r = divergence_certificate(&x, *delta, *horizon)?;
            let ok = matches!(r.verdict, Verdict::CertifiedAboveThreshold { .. });
            Ok(Outcome {
                text: pretty(&divergence_json(&r)),
                ok,
            })
        }
        Cmd::CountBand {
            interval: i,
            h,
            limits,
        } => {
            let i = interval(i)?;
            let c = count_band(&i, &big(h)?, limits.get())?;
            let v = json!({
                "interval": i.to_string(),
                "h": h,
                "value": c.value.to_string(),
                "method": serde_json::to_value(c.method).expect("serializable"),
                "exact": c.is_exact(),
            });
            Ok(Outcome::ok(pretty(&v)))
        }
        Cmd::CountFloor {
            interval: i,
            q,
            b,
            scan_budget,
        } => {
            let i = interval(i)?;
            let (q, b) = (big(q)?, big(b)?);
            let count = count_floor_ratio(&i, &q, &b, *scan_budget)?;
            let bound = floor_ratio_bound(&i, &q, &b);
            let v = json!({
                "interval": i.to_string(),
                "q": q.to_string(),
                "b": b.to_string(),
                "count": count,
                "bound": bound.to_string(),
            });
            Ok(Outcome::ok(pretty(&v)))
        }
        Cmd::MinHeight { interval: i } => {
            let i = interval(i)?;
            let w = min_height_in_interval(&i);
            let v = json!({"interval": i.to_string(), "p": w.p().to_string(), "q": w.height().to_string()});
            Ok(Outcome::ok(pretty(&v)))
        }
        Cmd::CantorBuild {
            delta,
            depth,
            cap,
            k0,
            attempts,
            limits,
        } => {
            let auto = build_levels_auto(*delta, *depth, *cap, *k0, *attempts, limits.get())?;
            let mut v = levels_to_json(&auto.levels);
            let rejected: Vec<Value> = auto
                .rejected
                .iter()
                .map(|(k, name, step)| json!({"k0": k, "inequality": name, "step": step}))
                .collect();
            v = json!({
                "delta": json_num(*delta),
                "k0": auto.k0,
                "rejected": rejected,
                "sizes": level_sizes(&auto.levels),
                "levels": v,
            });
            Ok(Outcome::ok(pretty(&v)))
        }
        Cmd::CantorVerify { levels, divergence } => {
            let doc = read_json(levels)?;
            let lv = levels_from_json(doc.get("levels").unwrap_or(&doc))?;
            let report = verify_levels(&lv)?;
            let mut ok = report.passed();
            let certs: Vec<Value> = report
                .certificates
                .iter()
                .map(|c| json!({"name": c.name, "level": c.level, "ok": c.ok, "locus": c.locus}))
                .collect();
            let mut v = json!({
                "passed": report.passed(),
                "chain": report.chain,
                "nested_point": report.nested_point.to_string(),
                "certificates": certs,
            });
            if *divergence {
                let delta = doc.get("delta").and_then(Value::as_f64).unwrap_or(1.0);
                let k0 = doc.get("k0").and_then(Value::as_u64).unwrap_or(1) as usize;
                let base = jb_ladder(delta, k0 + lv.len() - 1, &default_start())?.ladder;
                let (d, r) = linked_divergence(&base, &lv, &report)?;
                ok &= matches!(r.verdict, Verdict::CertifiedAboveThreshold { .. });
                v["divergence"] = json!({"delta": json_num(d), "report": divergence_json(&r)});
            }
            Ok(Outcome {
                text: pretty(&v),
                ok,
            })
        }
        Cmd::DimLower { levels, j_min } => {
            let doc = read_json(levels)?;
            let lv = levels_from_json(doc.get("levels").unwrap_or(&doc))?;
            let (m, eps) = recorded_counts(&lv);
            let est = lower_dim_estimate(&m, &eps, *j_min)?;
            let rows: Vec<Value> = est
                .quotients
                .iter()
                .map(|(j, q)| json!({"j": j, "quotient": json_num(*q)}))
                .collect();
            let v = json!({"j_min": est.j_min, "quotients": rows, "limsup_proxy": json_num(est.limsup_proxy)});
            Ok(Outcome::ok(pretty(&v)))
        }
        Cmd::CoverAudit {
            u,
            v,
            c,
            i,
            j,
            delta,
            s,
            a_max,
            height_max,
            sample,
        } => {
            let d: BigRational = parse_rational(delta)?;
            if let Some(c) = c {
                let coords = c.split(',').map(vector).collect::<Result<Vec<_>, _>>()?;
                if *i == 0 || *j == 0 {
                    return Err(Error::InvalidInput("indices are one-based".into()));
                }
                let node = CoverNodeN::new(coords, i - 1, j - 1, d)?;
                let rep = fiber_n_audit(
                    &node,
                    FiberCaps {
                        a_max: *a_max,
                        height_max: *height_max,
                    },
                )?;
                let ok = rep.violations.is_empty();
                let v = serde_json::to_value(&rep).expect("serializable");
                return Ok(Outcome {
                    text: pretty(&v),
                    ok,
                });
            }
            let nodes = match (u, v, sample) {
                (_, _, Some(n)) => {
                    sample_nodes(&mut ChaCha8Rng::seed_from_u64(cli.seed), &d, *n, 4)
                }
                (Some(u), Some(v), None) => vec![CoverNode2::new(vector(u)?, vector(v)?, d)?],
                _ => {
                    return Err(Error::InvalidInput(
                        "give --u and --v, --c, or --sample".into(),
                    ))
                }
            };
            let mut ok = true;
            let mut reports = Vec::new();
            for node in &nodes {
                let a = cover_sum_audit(node, *s, *a_max)?;
                ok &= a.violations.is_empty() && a.within_bound(1e-9);
                let mut v = serde_json::to_value(&a).expect("serializable");
                for key in ["partial_sum", "tail_bound", "analytic_bound"] {
                    v[key] = json_num(v[key].as_f64().unwrap_or(f64::NAN));
                }
                reports.push(v);
            }
            let v = if reports.len() == 1 {
                reports.pop().unwrap()
            } else {
                Value::Array(reports)
            };
            Ok(Outcome {
                text: pretty(&v),
                ok,
            })
        }
        Cmd::DimUpper { n, delta } => {
            let s = match n {
                2 => upper_dim2(*delta)?,
                _ => upper_dim_n(*n, *delta)?,
            };
            Ok(Outcome::ok(format!("{}\n", num(s))))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &out.text) {
                        eprintln!(
                            "{}",
                            json!({"error": "io", "message": format!("{}: {e}", path.display())})
                        );
                        return ExitCode::from(1);
                    }
                }
                None => {
                    // a closed pipe downstream is not an error of ours
                    let _ = std::io::stdout().write_all(out.text.as_bytes());
                }
            }
            ExitCode::from(if out.ok { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(2)
        }
    }
}
