//! Grid sweeps: one [`SweepRecord`] per grid point, written as CSV in grid order.

use std::io::Write;

use chsh_lab::chsh::{epsilon_deficit, ChshStrategy, SMALL_EPS_CUTOFF};
use chsh_lab::extraction::{bound_report, extract, TheoremBounds};
use chsh_lab::{LabError, Result};
use rayon::prelude::*;

pub const CSV_HEADER: &str =
    "param,epsilon,delta,state_err,state_bound,a0_err,a0_bound,a1_err,a1_bound,\
b0_err,b0_bound,b1_err,b1_bound,all_pass,small_eps";

/// Measured errors; absent when the junk projection degenerates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredErrors {
    pub state: f64,
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub param: f64,
    pub epsilon: f64,
    pub bounds: TheoremBounds,
    pub errors: Option<MeasuredErrors>,
    pub all_pass: bool,
    pub small_eps: bool,
}

impl SweepRecord {
    pub fn evaluate(param: f64, s: &ChshStrategy) -> Result<Self> {
        let epsilon = epsilon_deficit(s);
        let small_eps = epsilon <= SMALL_EPS_CUTOFF;
        match extract(s) {
            Ok(r) => {
                let report = bound_report(&r);
                Ok(Self {
                    param,
                    epsilon: r.epsilon,
                    bounds: TheoremBounds::at(r.epsilon),
                    errors: Some(MeasuredErrors {
                        state: r.state_error,
                        a0: r.a0_error,
                        a1: r.a1_error,
                        b0: r.b0_error,
                        b1: r.b1_error,
                    }),
                    all_pass: report.all_satisfied(),
                    small_eps,
                })
            }
            Err(LabError::DegenerateJunk { .. }) => Ok(Self {
                param,
                epsilon,
                bounds: TheoremBounds::at(epsilon),
                errors: None,
                all_pass: false,
                small_eps,
            }),
            Err(e) => Err(e),
        }
    }

    pub fn csv_row(&self) -> String {
        let b = &self.bounds;
        let err = |f: fn(&MeasuredErrors) -> f64| {
            self.errors
                .as_ref()
                .map(|e| format_number(f(e)))
                .unwrap_or_default()
        };
        [
            format_number(self.param),
            format_number(self.epsilon),
            format_number(b.delta),
            err(|e| e.state),
            format_number(b.state),
            err(|e| e.a0),
            format_number(b.state),
            err(|e| e.a1),
            format_number(b.rotated_operator),
            err(|e| e.b0),
            format_number(b.state),
            err(|e| e.b1),
            format_number(b.rotated_operator),
            self.all_pass.to_string(),
            self.small_eps.to_string(),
        ]
        .join(",")
    }
}

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Builds and evaluates every point concurrently; the output keeps input order.
pub fn run_sweep<F>(params: &[f64], build: F) -> anyhow::Result<Vec<SweepRecord>>
where
    F: Fn(f64) -> anyhow::Result<ChshStrategy> + Sync,
{
    params
        .par_iter()
        .map(|&p| {
            let s = build(p)?;
            Ok(SweepRecord::evaluate(p, &s)?)
        })
        .collect()
}

pub fn write_csv(out: &mut dyn Write, records: &[SweepRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
