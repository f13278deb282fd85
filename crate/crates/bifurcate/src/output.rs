//! Curve CSV and events JSON.
//!
//! Numbers in the CSV use `{:.16e}` (17 significant digits), which
//! round-trips every finite `f64` exactly. Eigenvalues are written in
//! descending order of real part, then imaginary part.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use bifurcate_core::continuation::{CurvePoint, Stability};
use serde::Serialize;
use thiserror::Error;

use crate::pipeline::{EventRecord, RunOutput};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("empty CSV")]
    Empty,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

fn header(n: usize, eigs: usize) -> String {
    let mut h = String::from("s,lambda");
    for i in 1..=n {
        write!(h, ",u{i}").unwrap();
    }
    h.push_str(",psi_lp,psi_h,stability");
    for k in 1..=eigs {
        write!(h, ",eig_re_{k},eig_im_{k}").unwrap();
    }
    h
}

fn num(out: &mut String, x: f64) {
    write!(out, ",{x:.16e}").unwrap();
}

/// The whole curve as CSV text, one row per point in trace order.
pub fn curve_csv_string(points: &[CurvePoint]) -> String {
    let n = points.first().map_or(0, |p| p.u.len());
    let mut out = header(n, n);
    out.push('\n');
    for p in points {
        let mut row = format!("{:.16e}", p.s);
        num(&mut row, p.lambda);
        for &x in &p.u {
            num(&mut row, x);
        }
        num(&mut row, p.psi_lp);
        num(&mut row, p.psi_h);
        row.push(',');
        row.push_str(p.stability.as_str());
        for z in p.eigenvalues.sorted() {
            num(&mut row, z.re);
            num(&mut row, z.im);
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn write_curve_csv(points: &[CurvePoint], path: &Path) -> io::Result<()> {
    std::fs::write(path, curve_csv_string(points))
}

/// One parsed CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub s: f64,
    pub lambda: f64,
    pub u: Vec<f64>,
    pub psi_lp: f64,
    pub psi_h: f64,
    pub stability: Stability,
    /// `(re, im)` pairs in file order.
    pub eigenvalues: Vec<(f64, f64)>,
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CsvRow>, CsvError> {
    let mut lines = text.lines();
    let head = lines.next().ok_or(CsvError::Empty)?;
    let cols: Vec<&str> = head.split(',').collect();
    let n = cols.iter().filter(|c| c.starts_with('u')).count();
    if cols.len() != 5 + 3 * n || head != header(n, n) {
        return Err(CsvError::Malformed {
            line: 1,
            msg: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let bad = |msg: String| CsvError::Malformed { line: i + 2, msg };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(bad(format!("{} fields, expected {}", f.len(), cols.len())));
        }
        let x = |k: usize| f[k].parse::<f64>().map_err(|e| bad(format!("column {}: {e}", cols[k])));
        let stability = match f[4 + n] {
            "stable" => Stability::Stable,
            "unstable" => Stability::Unstable,
            "marginal" => Stability::Marginal,
            other => return Err(bad(format!("unknown stability {other:?}"))),
        };
        let mut eigenvalues = Vec::with_capacity(n);
        for k in 0..n {
            eigenvalues.push((x(5 + n + 2 * k)?, x(6 + n + 2 * k)?));
        }
        rows.push(CsvRow {
            s: x(0)?,
            lambda: x(1)?,
            u: (0..n).map(|k| x(2 + k)).collect::<Result<_, _>>()?,
            psi_lp: x(2 + n)?,
            psi_h: x(3 + n)?,
            stability,
            eigenvalues,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct EventsFile<'a> {
    model: &'a str,
    seed: SeedRecord<'a>,
    settings: SettingsRecord,
    curve_points: usize,
    status: &'a str,
    events: &'a [EventRecord],
    neutral_saddles: &'a [EventRecord],
}

#[derive(Serialize)]
struct SeedRecord<'a> {
    lambda: f64,
    u: &'a [f64],
}

#[derive(Serialize)]
struct SettingsRecord {
    ds: f64,
    max_steps: usize,
    newton_tol: f64,
    newton_max_iter: usize,
    direction: i64,
    lambda_min: f64,
    lambda_max: f64,
    locate_tol: f64,
    locate_max_iter: usize,
}

/// The events report as pretty-printed JSON.
pub fn events_json_string(run: &RunOutput) -> String {
    let s = &run.config.settings;
    let file = EventsFile {
        model: run.config.model.as_str(),
        seed: SeedRecord {
            lambda: run.config.seed_lambda,
            u: &run.seed,
        },
        settings: SettingsRecord {
            ds: s.ds,
            max_steps: s.max_steps,
            newton_tol: s.newton_tol,
            newton_max_iter: s.newton_max_iter,
            direction: s.direction.into(),
            lambda_min: s.lambda_min,
            lambda_max: s.lambda_max,
            locate_tol: run.config.locate.tol,
            locate_max_iter: run.config.locate.max_iter,
        },
        curve_points: run.curve.len(),
        status: run.status(),
        events: &run.events,
        neutral_saddles: &run.neutral_saddles,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("events serialize");
    text.push('\n');
    text
}

pub fn write_events_json(run: &RunOutput, path: &Path) -> io::Result<()> {
    std::fs::write(path, events_json_string(run))
}
