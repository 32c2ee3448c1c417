//! Human-readable tables on stdout plus optional line-delimited records.

use std::io::Write;

use hyperwave::C64;
use serde::Serialize;

#[derive(Serialize)]
struct ValueRecord<'a> {
    name: &'a str,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    name: &'a str,
    re: f64,
    im: f64,
    threshold: f64,
    pass: bool,
}

/// One verification row.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            threshold: 1.0,
            pass,
        }
    }
}

#[derive(Default)]
pub struct Report {
    values: Vec<(String, C64)>,
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Report {
    pub fn value(&mut self, name: impl Into<String>, v: C64) {
        self.values.push((name.into(), v));
    }

    pub fn real(&mut self, name: impl Into<String>, v: f64) {
        self.value(name, C64::new(v, 0.0));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write_table(&self, mut out: impl Write) -> std::io::Result<()> {
        if !self.values.is_empty() {
            let w = self.values.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(4);
            writeln!(out, "{:<w$}  {:>24}  {:>24}", "name", "re", "im")?;
            for (name, v) in &self.values {
                writeln!(out, "{name:<w$}  {:>24.16e}  {:>24.16e}", v.re, v.im)?;
            }
        }
        if !self.checks.is_empty() {
            let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
            writeln!(out, "{:<w$}  {:>12}  {:>12}  result", "check", "value", "threshold")?;
            for c in &self.checks {
                let verdict = if c.pass { "pass" } else { "FAIL" };
                writeln!(out, "{:<w$}  {:>12.4e}  {:>12.4e}  {verdict}", c.name, c.value, c.threshold)?;
            }
        }
        for n in &self.notes {
            writeln!(out, "note: {n}")?;
        }
        Ok(())
    }

    pub fn write_records(&self, mut out: impl Write) -> std::io::Result<()> {
        for (name, v) in &self.values {
            let r = ValueRecord { name, re: v.re, im: v.im };
            writeln!(out, "{}", serde_json::to_string(&r)?)?;
        }
        for c in &self.checks {
            let r = CheckRecord {
                name: &c.name,
                re: c.value,
                im: 0.0,
                threshold: c.threshold,
                pass: c.pass,
            };
            writeln!(out, "{}", serde_json::to_string(&r)?)?;
        }
        Ok(())
    }
}
