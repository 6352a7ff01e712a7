//! The five subcommands. Each writes its report to `out` and returns whether
//! the run passed; errors map to exit code 1 in [`crate::run`].

use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::{bail, Context};
use chsh_lab::canonical::TSIRELSON;
use chsh_lab::chsh::{bias, epsilon_deficit, tsirelson_sos_residual, ChshStrategy};
use chsh_lab::extraction::{bound_report, extract};
use chsh_lab::gap::reproduce_counterexample;
use chsh_lab::strategies::{
    canonical_strategy, degenerate_strategy, noisy_strategy, random_strategy, rotated_strategy,
    seesaw_optimize,
};
use chsh_lab::LabError;

use crate::config::{Command, RunConfig, StrategyChoice, SEESAW_GAIN_TOL};
use crate::strategy_file::{read_strategy, write_strategy};
use crate::sweep::{format_number, run_sweep, write_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Theorem-regime failure: degenerate junk or an unsatisfied bound.
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 2,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

pub fn dispatch(cfg: &RunConfig, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    match cfg.command {
        Command::Verify => cmd_verify(cfg, out),
        Command::Sweep => cmd_sweep(cfg, out),
        Command::Counterexample => cmd_counterexample(out),
        Command::Tsirelson => cmd_tsirelson(cfg, out),
        Command::Optimize => cmd_optimize(cfg, out),
    }
}

fn choice(cfg: &RunConfig, default: StrategyChoice) -> StrategyChoice {
    cfg.strategy.clone().unwrap_or(default)
}

/// Builds one strategy; `seed` overrides `--seed` for seeded kinds.
pub fn build_strategy(
    cfg: &RunConfig,
    choice: &StrategyChoice,
    seed: u64,
) -> anyhow::Result<ChshStrategy> {
    let (da, db) = cfg.dims;
    Ok(match choice {
        StrategyChoice::Canonical => canonical_strategy(),
        StrategyChoice::Rotated => rotated_strategy(cfg.theta_a, cfg.theta_b)?,
        StrategyChoice::Noisy => noisy_strategy(seed, cfg.magnitude)?,
        StrategyChoice::Random => random_strategy(da, db, seed)?,
        StrategyChoice::Seesaw => {
            seesaw_optimize(
                &random_strategy(da, db, seed)?,
                cfg.max_iters,
                SEESAW_GAIN_TOL,
            )?
            .final_strategy
        }
        StrategyChoice::Degenerate(kind) => degenerate_strategy(*kind)?,
        StrategyChoice::File(path) => read_strategy(path, cfg.tol)?,
    })
}

fn label(cfg: &RunConfig, choice: &StrategyChoice, seed: u64) -> String {
    let (da, db) = cfg.dims;
    match choice {
        StrategyChoice::Canonical => "canonical".into(),
        StrategyChoice::Rotated => {
            format!("rotated(theta_a={}, theta_b={})", cfg.theta_a, cfg.theta_b)
        }
        StrategyChoice::Noisy => format!("noisy(seed={seed}, magnitude={})", cfg.magnitude),
        StrategyChoice::Random => format!("random(dims={da}x{db}, seed={seed})"),
        StrategyChoice::Seesaw => format!(
            "seesaw(dims={da}x{db}, seed={seed}, max_iters={})",
            cfg.max_iters
        ),
        StrategyChoice::Degenerate(kind) => format!("degenerate:{}", kind.name()),
        StrategyChoice::File(path) => format!("file:{}", path.display()),
    }
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let choice = choice(cfg, StrategyChoice::Canonical);
    let s = build_strategy(cfg, &choice, cfg.seed)?;
    writeln!(out, "strategy: {}", label(cfg, &choice, cfg.seed))?;
    writeln!(out, "dims: {}x{}", s.dim_a(), s.dim_b())?;
    writeln!(out, "bias: {}", format_number(bias(&s)))?;
    match extract(&s) {
        Ok(r) => {
            writeln!(
                out,
                "projection onto Phi+: {}",
                format_number(r.projection_sq_norm)
            )?;
            let report = bound_report(&r);
            write!(out, "{report}")?;
            let pass = report.all_satisfied();
            writeln!(
                out,
                "{}",
                if pass {
                    "all bounds satisfied"
                } else {
                    "bound chain VIOLATED"
                }
            )?;
            Ok(Outcome::from_pass(pass))
        }
        Err(e @ LabError::DegenerateJunk { .. }) => {
            writeln!(out, "epsilon: {}", format_number(epsilon_deficit(&s)))?;
            writeln!(out, "DegenerateJunk: {e}")?;
            Ok(Outcome::Fail)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let choice = choice(cfg, StrategyChoice::Rotated);
    let records = match &choice {
        StrategyChoice::Rotated => run_sweep(&cfg.grid()?.values(), |theta| {
            Ok(rotated_strategy(theta, cfg.theta_b)?)
        })?,
        StrategyChoice::Noisy => {
            run_sweep(&cfg.grid()?.values(), |m| Ok(noisy_strategy(cfg.seed, m)?))?
        }
        StrategyChoice::Random | StrategyChoice::Seesaw => {
            let seeds: Vec<f64> = cfg.seed_list().iter().map(|&s| s as f64).collect();
            run_sweep(&seeds, |s| build_strategy(cfg, &choice, s as u64))?
        }
        other => bail!(
            "strategy {} has no sweep parameter; use rotated, noisy, random or seesaw",
            label(cfg, other, cfg.seed)
        ),
    };
    match &cfg.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_csv(&mut w, &records).with_context(|| format!("writing {}", path.display()))?;
            w.flush()
                .with_context(|| format!("writing {}", path.display()))?;
            let passed = records.iter().filter(|r| r.all_pass).count();
            writeln!(
                out,
                "wrote {} rows to {} ({passed} passing)",
                records.len(),
                path.display()
            )?;
        }
        None => write_csv(out, &records)?,
    }
    Ok(Outcome::from_pass(records.iter().all(|r| r.all_pass)))
}

pub fn cmd_counterexample(out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let r = reproduce_counterexample();
    writeln!(out, "B0 =\n{}", r.b0)?;
    writeln!(out, "B1 =\n{}", r.b1)?;
    writeln!(out, "X'_B = (B0+B1)/|B0+B1| =\n{}", r.x_prime_b)?;
    writeln!(out, "Z'_B = (B0-B1)/|B0-B1| =\n{}", r.z_prime_b)?;
    writeln!(out, "{{X'_B, Z'_B}} =\n{}", r.anticommutator)?;
    writeln!(
        out,
        "||{{X'_B, Z'_B}}|| = {}",
        format_number(r.anticommutator_norm)
    )?;
    writeln!(out, "anticommutation claim refuted: {}", r.claim_refuted)?;
    Ok(Outcome::Pass)
}

pub fn cmd_tsirelson(cfg: &RunConfig, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let choice = choice(cfg, StrategyChoice::Random);
    let seeds = match choice {
        StrategyChoice::Random | StrategyChoice::Seesaw | StrategyChoice::Noisy => cfg.seed_list(),
        _ => vec![cfg.seed],
    };
    let mut worst: f64 = 0.0;
    for seed in seeds {
        let s = build_strategy(cfg, &choice, seed)?;
        let residual = tsirelson_sos_residual(&s)?;
        worst = worst.max(residual);
        writeln!(
            out,
            "{}: bias {} sos_residual {}",
            label(cfg, &choice, seed),
            format_number(bias(&s)),
            format_number(residual)
        )?;
    }
    writeln!(
        out,
        "max sos_residual {} (tol {})",
        format_number(worst),
        format_number(cfg.tol)
    )?;
    Ok(Outcome::from_pass(worst <= cfg.tol))
}

pub fn cmd_optimize(cfg: &RunConfig, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    if cfg.seeds.is_some_and(|n| n > 1) {
        bail!("optimize runs a single seed; use sweep --strategy seesaw for several");
    }
    let choice = match choice(cfg, StrategyChoice::Random) {
        StrategyChoice::Seesaw => StrategyChoice::Random,
        other => other,
    };
    let start = build_strategy(cfg, &choice, cfg.seed)?;
    let trace = seesaw_optimize(&start, cfg.max_iters, SEESAW_GAIN_TOL)?;
    writeln!(out, "start: {}", label(cfg, &choice, cfg.seed))?;
    writeln!(out, "initial bias: {}", format_number(trace.initial_bias))?;
    for (k, b) in trace.iterations.iter().enumerate() {
        writeln!(out, "iteration {}: bias {}", k + 1, format_number(*b))?;
    }
    let final_bias = trace.final_bias();
    writeln!(out, "final bias: {}", format_number(final_bias))?;
    writeln!(
        out,
        "deficit to 2*sqrt(2): {}",
        format_number(TSIRELSON - final_bias)
    )?;
    writeln!(out, "converged: {}", trace.converged)?;
    if let Some(path) = &cfg.out {
        write_strategy(path, &trace.final_strategy)?;
        writeln!(out, "wrote strategy to {}", path.display())?;
    }
    Ok(Outcome::Pass)
}
