//! Run reports and their JSON and CSV renderings.

use std::collections::BTreeMap;
use std::io::Write;

use momentumlab::convex::{ConvexSetV, Vector};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// One asserted check: passes when `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub residual: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportTableRow {
    pub direction: Vector,
    pub inner: f64,
    pub outer: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub passed: bool,
    pub failures: Vec<String>,
    pub checks: Vec<Check>,
    pub verdicts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum_set: Option<ConvexSetV>,
    pub support_table: Vec<SupportTableRow>,
    pub tables: Vec<Table>,
    pub timing: Timing,
}

/// Accumulates checks and data while a scenario runs.
#[derive(Debug, Default)]
pub struct ReportBuilder {
    checks: Vec<Check>,
    verdicts: BTreeMap<String, Value>,
    parameters: BTreeMap<String, Value>,
    momentum_set: Option<ConvexSetV>,
    support_table: Vec<SupportTableRow>,
    tables: Vec<Table>,
}

impl ReportBuilder {
    pub fn check(&mut self, name: &str, residual: f64, tolerance: f64) -> bool {
        self.check_with(name, residual, tolerance, None)
    }

    pub fn check_with(&mut self, name: &str, residual: f64, tolerance: f64, note: Option<String>) -> bool {
        // NaN residuals fail.
        let passed = residual <= tolerance;
        self.checks.push(Check { name: name.into(), tolerance, residual, passed, note });
        passed
    }

    /// A yes/no check, recorded with residual 0 or 1 against tolerance 0.
    pub fn check_flag(&mut self, name: &str, holds: bool, note: impl Into<String>) -> bool {
        self.check_with(name, if holds { 0.0 } else { 1.0 }, 0.0, Some(note.into()))
    }

    pub fn verdict(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        self.verdicts.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn parameter(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        self.parameters.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn momentum_set(&mut self, set: ConvexSetV) {
        self.momentum_set = Some(set);
    }

    pub fn support_row(&mut self, direction: Vector, inner: f64, outer: Option<f64>) {
        let gap = outer.map(|o| o - inner);
        self.support_table.push(SupportTableRow { direction, inner, outer, gap });
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn finish(self, scenario: &str, seed: u64, tolerances: BTreeMap<String, f64>, elapsed_ms: f64) -> RunReport {
        let failures: Vec<String> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        RunReport {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.into(),
            seed,
            parameters: self.parameters,
            tolerances,
            passed: failures.is_empty(),
            failures,
            checks: self.checks,
            verdicts: self.verdicts,
            momentum_set: self.momentum_set,
            support_table: self.support_table,
            tables: self.tables,
            timing: Timing { elapsed_ms },
        }
    }
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// The JSON report with the timing field removed, for reproducibility
    /// comparisons.
    pub fn json_without_timing(&self) -> Result<String, CliError> {
        let mut v = serde_json::to_value(self)?;
        if let Value::Object(map) = &mut v {
            map.remove("timing");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    /// CSV rendering: the support table when there is one (direction
    /// components, inner, outer, gap), else the first sweep table, else the
    /// checks.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let fmt = |x: f64| format!("{x:e}");
        if let Some(first) = self.support_table.first() {
            let d = first.direction.dim();
            let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
            header.extend(["inner", "outer", "gap"].map(String::from));
            w.write_record(&header)?;
            for r in &self.support_table {
                let mut rec: Vec<String> = r.direction.coords().iter().map(|&x| fmt(x)).collect();
                rec.push(fmt(r.inner));
                rec.push(r.outer.map(fmt).unwrap_or_default());
                rec.push(r.gap.map(fmt).unwrap_or_default());
                w.write_record(&rec)?;
            }
        } else if let Some(t) = self.tables.first() {
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|&x| fmt(x)))?;
            }
        } else {
            w.write_record(["check", "tolerance", "residual", "passed"])?;
            for c in &self.checks {
                w.write_record([c.name.clone(), fmt(c.tolerance), fmt(c.residual), c.passed.to_string()])?;
            }
        }
        w.flush().map_err(|source| CliError::Io { path: "csv output".into(), source })?;
        Ok(())
    }

    /// One line per failed check: `check-failed<TAB>name<TAB>residual=r<TAB>tolerance=t`.
    pub fn failure_records(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("check-failed\t{}\tresidual={:e}\ttolerance={:e}", c.name, c.residual, c.tolerance))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut b = ReportBuilder::default();
        b.check("ok", 1e-12, 1e-10);
        b.check("bad", 1.0, 1e-10);
        b.check("nan", f64::NAN, 1.0);
        b.support_row(Vector::new(vec![1.0, 0.0]), 0.5, Some(0.5));
        b.finish("demo", 3, BTreeMap::new(), 1.5)
    }

    #[test]
    fn failures_and_exit_code() {
        let r = sample();
        assert!(!r.passed);
        assert_eq!(r.failures, vec!["bad", "nan"]);
        assert_eq!(r.exit_code(), 1);
        assert!(r.failure_records()[0].starts_with("check-failed\tbad\t"));
    }

    #[test]
    fn json_has_schema_and_timing_last() {
        let s = sample().to_json().unwrap();
        assert!(s.contains("\"schema_version\": 1"));
        let t = s.find("\"timing\"").unwrap();
        assert!(s[t..].lines().count() <= 4);
        assert!(!sample().json_without_timing().unwrap().contains("timing"));
    }

    #[test]
    fn csv_support_table() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x0,x1,inner,outer,gap");
        assert_eq!(lines.next().unwrap(), "1e0,0e0,5e-1,5e-1,0e0");
    }
}
