//! Python bindings. Structured reports come back as JSON text.

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use excursion::cantor::{build_levels_auto, level_sizes, levels_to_json, verify_levels};
use excursion::count::{
    count_band, min_height_in_interval, parse_rational, CountLimits, RationalInterval,
};
use excursion::cover::{cover_sum_audit, upper_dim2, upper_dim_n, CoverNode2};
use excursion::io::{divergence_json, parse_real};
use excursion::lattice::{divergence_certificate, pl_sweep, time_grid};
use excursion::Error;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

fn interval(s: &str) -> PyResult<RationalInterval> {
    s.parse().map_err(py_err)
}

/// Convergents (p, q) of a real, first `k` of them.
#[pyfunction]
fn convergents(x: &str, k: usize) -> PyResult<Vec<(BigInt, BigInt)>> {
    let ladder = parse_real(x).and_then(|x| x.ladder(k)).map_err(py_err)?;
    Ok(ladder
        .entries()
        .iter()
        .map(|v| (v.p().clone(), v.height().clone()))
        .collect())
}

/// Rows (t, lattice value, tent value, excess) on an even time grid.
#[pyfunction]
fn wfunc(x: &str, t0: f64, t1: f64, step: f64) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let x = parse_real(x).map_err(py_err)?;
    let samples = pl_sweep(&x, &time_grid(t0, t1, step)).map_err(py_err)?;
    Ok(samples
        .iter()
        .map(|s| (s.t, s.w_lattice, s.tent, s.excess))
        .collect())
}

#[pyfunction]
fn certify(xs: Vec<String>, delta: f64, horizon: f64) -> PyResult<String> {
    let reals = xs
        .iter()
        .map(|s| parse_real(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    let report = divergence_certificate(&reals, delta, horizon).map_err(py_err)?;
    Ok(divergence_json(&report).to_string())
}

/// Reduced fractions in the interval with height in [h, 2h].
#[pyfunction]
fn count_heights(text: &str, h: BigInt) -> PyResult<(BigInt, bool)> {
    let c = count_band(&interval(text)?, &h, CountLimits::default()).map_err(py_err)?;
    let exact = c.is_exact();
    Ok((c.value, exact))
}

#[pyfunction]
fn min_height(text: &str) -> PyResult<(BigInt, BigInt)> {
    let w = min_height_in_interval(&interval(text)?);
    Ok((w.p().clone(), w.height().clone()))
}

/// Nested levels as JSON, plus whether every certificate passed.
#[pyfunction]
#[pyo3(signature = (depth, delta=1.0, cap=4, k0=1, attempts=6))]
fn cantor_build(
    depth: usize,
    delta: f64,
    cap: usize,
    k0: usize,
    attempts: usize,
) -> PyResult<(String, bool)> {
    let auto = build_levels_auto(delta, depth, cap, k0, attempts, CountLimits::default())
        .map_err(py_err)?;
    let passed = verify_levels(&auto.levels).map_err(py_err)?.passed();
    let doc = serde_json::json!({
        "k0": auto.k0,
        "sizes": level_sizes(&auto.levels),
        "levels": levels_to_json(&auto.levels),
    });
    Ok((doc.to_string(), passed))
}

/// Sum audit of one planar cover node; vectors are rationals like "17/10".
#[pyfunction]
#[pyo3(signature = (u, v, delta, s=1.75, a_max=1000))]
fn cover_audit(u: &str, v: &str, delta: &str, s: f64, a_max: u64) -> PyResult<String> {
    let vector =
        |t: &str| parse_rational(t).map(|r| excursion::cf::PrimitiveVector::from_ratio(&r));
    let node = CoverNode2::new(
        vector(u).map_err(py_err)?,
        vector(v).map_err(py_err)?,
        parse_rational(delta).map_err(py_err)?,
    )
    .map_err(py_err)?;
    let audit = cover_sum_audit(&node, s, a_max).map_err(py_err)?;
    serde_json::to_string(&audit).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn dim_upper(n: u32, delta: f64) -> PyResult<f64> {
    match n {
        2 => upper_dim2(delta),
        _ => upper_dim_n(n, delta),
    }
    .map_err(py_err)
}

#[pymodule]
fn excursion_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(convergents, m)?)?;
    m.add_function(wrap_pyfunction!(wfunc, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(count_heights, m)?)?;
    m.add_function(wrap_pyfunction!(min_height, m)?)?;
    m.add_function(wrap_pyfunction!(cantor_build, m)?)?;
    m.add_function(wrap_pyfunction!(cover_audit, m)?)?;
    m.add_function(wrap_pyfunction!(dim_upper, m)?)?;
    Ok(())
}
