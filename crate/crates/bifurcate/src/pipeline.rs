//! Seed → trace → scan → locate.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use bifurcate_core::continuation::{seed_equilibrium, trace_curve, CurvePoint};
use bifurcate_core::detect::{scan_events, BifurcationEvent, EventKind};
use bifurcate_core::locate::{locate_hopf, locate_lp};
use bifurcate_core::{eigenvalues, Error, System};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::output::{write_curve_csv, write_events_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SEED: i32 = 3;
pub const EXIT_TRACE: i32 = 4;
pub const EXIT_LOCATE: i32 = 5;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("seed solve failed: {0}")]
    Seed(Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Seed(_) => EXIT_SEED,
            RunError::Io { .. } => EXIT_IO,
        }
    }
}

/// A refined bifurcation point as written to the events file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocatedRecord {
    pub lambda: f64,
    pub u: Vec<f64>,
    pub h: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// Normalization index (0-based).
    pub k: usize,
    pub residual: f64,
    pub iterations: usize,
    /// `(re, im)` pairs of `D_uF` at the located point, sorted.
    pub eigenvalues: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRecord {
    pub kind: EventKind,
    /// Index of the left bracketing point in the curve.
    pub index: usize,
    /// `[min, max]` of `λ` over the bracketing step.
    pub bracket: [f64; 2],
    pub test_values: [f64; 2],
    pub ambiguous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub located: Option<LocatedRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EventRecord {
    fn from_event(e: &BifurcationEvent) -> Self {
        let (lo, hi) = e.lambda_bracket();
        Self {
            kind: e.kind,
            index: e.index,
            bracket: [lo, hi],
            test_values: [e.test_values.0, e.test_values.1],
            ambiguous: e.ambiguous,
            located: None,
            error: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub config: RunConfig,
    /// Converged seed equilibrium.
    pub seed: Vec<f64>,
    pub curve: Vec<CurvePoint>,
    /// Limit points and Hopf candidates in curve order.
    pub events: Vec<EventRecord>,
    /// `ψ_H` sign changes without a crossing complex pair.
    pub neutral_saddles: Vec<EventRecord>,
    /// Set when tracing stopped early; `curve` then holds the partial curve.
    pub trace_error: Option<String>,
    pub timings: Timings,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Timings {
    pub seed: Duration,
    pub trace: Duration,
    pub locate: Duration,
}

impl RunOutput {
    pub fn locate_failures(&self) -> usize {
        self.events.iter().filter(|e| e.error.is_some()).count()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn status(&self) -> &'static str {
        if self.trace_error.is_some() {
            "trace_aborted"
        } else if self.locate_failures() > 0 {
            "locate_failed"
        } else {
            "ok"
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status() {
            "trace_aborted" => EXIT_TRACE,
            "locate_failed" => EXIT_LOCATE,
            _ => EXIT_OK,
        }
    }

    pub fn curve_path(&self, prefix: &str) -> PathBuf {
        PathBuf::from(format!("{prefix}_curve.csv"))
    }

    pub fn events_path(&self, prefix: &str) -> PathBuf {
        PathBuf::from(format!("{prefix}_events.json"))
    }

    /// Writes `<prefix>_curve.csv` and `<prefix>_events.json`.
    pub fn write(&self, prefix: &str) -> Result<(PathBuf, PathBuf), RunError> {
        let curve = self.curve_path(prefix);
        let events = self.events_path(prefix);
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| RunError::Io { path, source }
        };
        if let Some(dir) = curve.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io(dir))?;
        }
        write_curve_csv(&self.curve, &curve).map_err(io(&curve))?;
        write_events_json(self, &events).map_err(io(&events))?;
        Ok((curve, events))
    }
}

fn located_eigenvalues(sys: &dyn System, lambda: f64, u: &[f64]) -> Vec<[f64; 2]> {
    sys.jac_u(lambda, u)
        .ok()
        .and_then(|j| eigenvalues(&j).ok())
        .map(|e| e.sorted().iter().map(|z| [z.re, z.im]).collect())
        .unwrap_or_default()
}

fn locate_event(sys: &dyn System, event: &BifurcationEvent, config: &RunConfig) -> EventRecord {
    let mut rec = EventRecord::from_event(event);
    let result = match event.kind {
        EventKind::LimitPoint => locate_lp(sys, event, &config.locate).map(|s| LocatedRecord {
            eigenvalues: located_eigenvalues(sys, s.lambda, &s.u),
            lambda: s.lambda,
            u: s.u,
            h: s.h,
            g: None,
            beta: None,
            period: None,
            k: s.k,
            residual: s.residual,
            iterations: s.iterations,
        }),
        EventKind::HopfCandidate => locate_hopf(sys, event, &config.locate).map(|s| LocatedRecord {
            eigenvalues: located_eigenvalues(sys, s.lambda, &s.u),
            period: Some(s.period()),
            lambda: s.lambda,
            beta: Some(s.beta),
            u: s.u,
            h: s.h,
            g: Some(s.g),
            k: s.k,
            residual: s.residual,
            iterations: s.iterations,
        }),
        EventKind::NeutralSaddle => return rec,
    };
    match result {
        Ok(l) => rec.located = Some(l),
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Runs the full pipeline. Only configuration and seed failures are errors;
/// a trace abort or a failed locate is reported in the returned output.
pub fn run(config: &RunConfig) -> Result<RunOutput, RunError> {
    config.validate()?;
    let sys = config.system()?;
    let sys: &dyn System = &*sys;
    let guess = config.initial_guess()?;

    let t0 = Instant::now();
    let seed = seed_equilibrium(sys, config.seed_lambda, &guess, &config.settings).map_err(RunError::Seed)?;
    let t_seed = t0.elapsed();

    let t1 = Instant::now();
    let (curve, trace_error) = match trace_curve(sys, config.seed_lambda, &seed, &config.settings) {
        Ok(c) => (c, None),
        Err(abort) => {
            let msg = abort.to_string();
            (abort.partial, Some(msg))
        }
    };
    let t_trace = t1.elapsed();

    let t2 = Instant::now();
    let mut events = Vec::new();
    let mut neutral_saddles = Vec::new();
    for e in scan_events(&curve) {
        if e.kind == EventKind::NeutralSaddle {
            neutral_saddles.push(EventRecord::from_event(&e));
        } else {
            events.push(locate_event(sys, &e, config));
        }
    }
    let t_locate = t2.elapsed();

    Ok(RunOutput {
        config: config.clone(),
        seed,
        curve,
        events,
        neutral_saddles,
        trace_error,
        timings: Timings {
            seed: t_seed,
            trace: t_trace,
            locate: t_locate,
        },
    })
}
