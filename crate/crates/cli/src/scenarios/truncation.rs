use momentumlab::momentum::{classify_truncation_family, BoundednessKind, BoundednessVerdict};
use momentumlab::unirep::{heisenberg_truncated, oscillator_truncated, UnitaryRep};
use momentumlab::Result as CoreResult;

use crate::config::{CheckTolerances, ScenarioConfig};
use crate::error::{usage, CliError};
use crate::report::{ReportBuilder, Table};

pub const OSCILLATOR_TOLERANCES: &[(&str, f64)] = &[("growth", 1e-6), ("slope", 0.05)];
pub const HEISENBERG_TOLERANCES: &[(&str, f64)] = &[("growth", 1e-6)];

fn family(cfg: &ScenarioConfig, build: fn(usize) -> CoreResult<UnitaryRep>) -> Result<Vec<(usize, UnitaryRep)>, CliError> {
    let levels = cfg.levels.clone().unwrap_or_else(|| vec![32, 64, 128]);
    if levels.len() < 3 {
        return usage("levels needs at least 3 truncation levels");
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return usage("levels must be strictly increasing");
    }
    levels
        .iter()
        .map(|&n| build(n).map(|r| (n, r)).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn growth_table(v: &BoundednessVerdict) -> Table {
    let mut t = Table::new(
        "growth",
        &["level", "direction_index", "support_value"],
    );
    for (k, g) in v.growth.iter().enumerate() {
        for (level, value) in v.levels.iter().zip(&g.values) {
            t.push(vec![*level as f64, k as f64, *value]);
        }
    }
    t
}

fn record_growth(b: &mut ReportBuilder, v: &BoundednessVerdict) -> Result<(), CliError> {
    b.verdict("boundedness", v.kind)?;
    b.verdict("witness", &v.witness)?;
    b.verdict("levels", &v.levels)?;
    b.verdict("directions", v.growth.iter().map(|g| &g.direction).collect::<Vec<_>>())?;
    b.verdict("slopes", v.growth.iter().map(|g| g.slope).collect::<Vec<_>>())?;
    b.table(growth_table(v));
    Ok(())
}

fn basis(d: usize, i: usize, sign: f64) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = sign;
    e
}

/// Basis order `(h, p, q, c)`.
pub fn run_oscillator(cfg: &ScenarioConfig, tol: &CheckTolerances, b: &mut ReportBuilder) -> Result<(), CliError> {
    let fam = family(cfg, oscillator_truncated)?;
    b.parameter("levels", fam.iter().map(|(n, _)| *n).collect::<Vec<_>>())?;
    let v = classify_truncation_family(&fam)?;
    b.check_flag("semibounded", v.kind == BoundednessKind::Semibounded, format!("classified {:?}", v.kind));
    let minus_h = basis(4, 0, -1.0);
    b.check_flag(
        "witness_minus_h",
        v.witness.iter().any(|w| w.coords() == minus_h.as_slice()),
        "-h among the bounded witnesses",
    );
    let mh = v.growth_of(&minus_h).map(|g| g.increase).unwrap_or(f64::INFINITY);
    b.check("minus_h_growth", mh.max(0.0), tol.get("growth"));
    let slope = v.growth_of(&basis(4, 0, 1.0)).and_then(|g| g.slope).unwrap_or(f64::NAN);
    b.check_with("plus_h_slope", (slope - 1.0).abs(), tol.get("slope"), Some(format!("slope {slope}")));
    record_growth(b, &v)
}

/// Basis order `(p, q, c)`. Only `±c` stay bounded, so the domain cone is a
/// line and the family is not semibounded.
pub fn run_heisenberg(cfg: &ScenarioConfig, tol: &CheckTolerances, b: &mut ReportBuilder) -> Result<(), CliError> {
    let fam = family(cfg, heisenberg_truncated)?;
    b.parameter("levels", fam.iter().map(|(n, _)| *n).collect::<Vec<_>>())?;
    let v = classify_truncation_family(&fam)?;
    b.check_flag(
        "unbounded_directionwise",
        v.kind == BoundednessKind::UnboundedDirectionwise,
        format!("classified {:?}", v.kind),
    );
    let center = [basis(3, 2, 1.0), basis(3, 2, -1.0)]
        .iter()
        .map(|c| v.growth_of(c).map(|g| g.increase.abs()).unwrap_or(f64::INFINITY))
        .fold(0.0_f64, f64::max);
    b.check("center_growth", center, tol.get("growth"));
    for (name, i) in [("p_unbounded", 0), ("q_unbounded", 1)] {
        let g = v.growth_of(&basis(3, i, 1.0));
        let slope = g.and_then(|g| g.slope).unwrap_or(f64::NAN);
        b.check_flag(name, g.is_some_and(|g| !g.bounded), format!("log-log slope {slope}"));
    }
    record_growth(b, &v)
}
