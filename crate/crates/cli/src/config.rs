//! Command-line flags, the optional JSON config file, and their merge into a
//! [`RunConfig`].

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use chsh_lab::chsh::OBSERVABLE_TOL;
use chsh_lab::strategies::DegenerateKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

pub const DEFAULT_MAX_ITERS: usize = 50;
pub const DEFAULT_MAGNITUDE: f64 = 0.01;
pub const DEFAULT_DIMS: (usize, usize) = (2, 2);
/// Bias gain below which the see-saw stops.
pub const SEESAW_GAIN_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "chsh-lab",
    version,
    about = "Robust CHSH rigidity: extraction, bound checks and sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Extract the EPR pair from one strategy and check every bound.
    Verify,
    /// Evaluate the bound chain over a parameter grid and write CSV.
    Sweep,
    /// Print the kernel-convention counterexample.
    Counterexample,
    /// Print sum-of-squares residuals for a set of strategies.
    Tsirelson,
    /// Run the see-saw optimizer and print its bias trace.
    Optimize,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// canonical | rotated | noisy | random | seesaw | degenerate:<name> | file:<path>
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta_a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta_b: Option<f64>,
    /// Noise magnitude for `noisy`.
    #[arg(long, global = true)]
    pub magnitude: Option<f64>,
    /// Local dimensions of Alice and Bob.
    #[arg(long, global = true, num_args = 2, value_names = ["DIM_A", "DIM_B"])]
    pub dims: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of consecutive seeds, starting at `--seed`.
    #[arg(long, global = true)]
    pub seeds: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub grid_start: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub grid_end: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub grid_step: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Validation tolerance for observables and sum-of-squares residuals.
    #[arg(long, global = true, env = "CHSH_LAB_TOL")]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    /// JSON file with the same keys as the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub strategy: Option<String>,
    pub theta_a: Option<f64>,
    pub theta_b: Option<f64>,
    pub magnitude: Option<f64>,
    pub dims: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub grid_start: Option<f64>,
    pub grid_end: Option<f64>,
    pub grid_step: Option<f64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyChoice {
    Canonical,
    Rotated,
    Noisy,
    Random,
    Seesaw,
    Degenerate(DegenerateKind),
    File(PathBuf),
}

impl StrategyChoice {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        if let Some(name) = text.strip_prefix("degenerate:") {
            return match DegenerateKind::from_name(name) {
                Some(kind) => Ok(StrategyChoice::Degenerate(kind)),
                None => {
                    let known: Vec<_> = DegenerateKind::ALL.iter().map(|k| k.name()).collect();
                    bail!(
                        "unknown degenerate strategy {name:?} (known: {})",
                        known.join(", ")
                    )
                }
            };
        }
        if let Some(path) = text.strip_prefix("file:") {
            return Ok(StrategyChoice::File(PathBuf::from(path)));
        }
        Ok(match text {
            "canonical" => StrategyChoice::Canonical,
            "rotated" => StrategyChoice::Rotated,
            "noisy" => StrategyChoice::Noisy,
            "random" => StrategyChoice::Random,
            "seesaw" => StrategyChoice::Seesaw,
            other => bail!("unknown strategy {other:?}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, end: f64, step: f64) -> anyhow::Result<Self> {
        if !(start.is_finite() && end.is_finite() && step.is_finite()) {
            bail!("grid bounds must be finite");
        }
        if step <= 0.0 {
            bail!("grid step must be positive, got {step}");
        }
        if end < start {
            bail!("empty grid: end {end} is below start {start}");
        }
        Ok(Self { start, end, step })
    }

    pub fn len(&self) -> usize {
        ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    /// A constructed grid always holds at least its start point.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

/// Every option resolved: flag, then `CHSH_LAB_TOL`, then config file, then default.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub strategy: Option<StrategyChoice>,
    pub theta_a: f64,
    pub theta_b: f64,
    pub magnitude: f64,
    pub dims: (usize, usize),
    pub seed: u64,
    pub seeds: Option<usize>,
    pub grid: Option<(Option<f64>, Option<f64>, Option<f64>)>,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub max_iters: usize,
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> anyhow::Result<Self> {
        let o = cli.options;
        let file = match &o.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let strategy = o
            .strategy
            .or(file.strategy)
            .map(|s| StrategyChoice::parse(&s))
            .transpose()?;
        let dims = match o.dims.or(file.dims) {
            None => DEFAULT_DIMS,
            Some(d) if d.len() == 2 && d[0] >= 1 && d[1] >= 1 => (d[0], d[1]),
            Some(d) => bail!("--dims needs two positive integers, got {d:?}"),
        };
        let magnitude = o.magnitude.or(file.magnitude).unwrap_or(DEFAULT_MAGNITUDE);
        if !(magnitude >= 0.0 && magnitude.is_finite()) {
            bail!("magnitude must be a non-negative number, got {magnitude}");
        }
        let tol = o.tol.or(file.tol).unwrap_or(OBSERVABLE_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            bail!("tolerance must be positive, got {tol}");
        }
        let (start, end, step) = (
            o.grid_start.or(file.grid_start),
            o.grid_end.or(file.grid_end),
            o.grid_step.or(file.grid_step),
        );
        let grid =
            (start.is_some() || end.is_some() || step.is_some()).then_some((start, end, step));
        let seeds = o.seeds.or(file.seeds);
        if seeds == Some(0) {
            bail!("--seeds must be at least 1");
        }
        Ok(Self {
            command: cli.command,
            strategy,
            theta_a: o.theta_a.or(file.theta_a).unwrap_or(0.0),
            theta_b: o.theta_b.or(file.theta_b).unwrap_or(0.0),
            magnitude,
            dims,
            seed: o.seed.or(file.seed).unwrap_or(0),
            seeds,
            grid,
            out: o.out.or(file.out),
            tol,
            max_iters: o.max_iters.or(file.max_iters).unwrap_or(DEFAULT_MAX_ITERS),
        })
    }

    pub fn grid(&self) -> anyhow::Result<Grid> {
        match self.grid {
            Some((Some(start), Some(end), Some(step))) => Grid::new(start, end, step),
            _ => bail!("sweep needs --grid-start, --grid-end and --grid-step"),
        }
    }

    /// `--seed`, `--seed + 1`, … for `--seeds` values (one seed if unset).
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds.unwrap_or(1) as u64)
            .map(|i| self.seed + i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> anyhow::Result<RunConfig> {
        let mut full = vec!["chsh-lab"];
        full.extend_from_slice(args);
        RunConfig::resolve(Cli::try_parse_from(full)?)
    }

    #[test]
    fn grid_length() {
        assert_eq!(Grid::new(0.0, 0.1, 0.01).unwrap().len(), 11);
        assert_eq!(Grid::new(0.0, 0.0, 0.5).unwrap().len(), 1);
        assert_eq!(Grid::new(0.0, 1.0, 0.3).unwrap().values().len(), 4);
        assert!(Grid::new(1.0, 0.0, 0.1).is_err());
        assert!(Grid::new(0.0, 1.0, 0.0).is_err());
        assert!(Grid::new(0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn strategy_names() {
        assert_eq!(
            StrategyChoice::parse("canonical").unwrap(),
            StrategyChoice::Canonical
        );
        assert_eq!(
            StrategyChoice::parse("degenerate:psi-minus").unwrap(),
            StrategyChoice::Degenerate(DegenerateKind::PsiMinus)
        );
        assert_eq!(
            StrategyChoice::parse("file:a/b.json").unwrap(),
            StrategyChoice::File("a/b.json".into())
        );
        assert!(StrategyChoice::parse("degenerate:nope").is_err());
        assert!(StrategyChoice::parse("bogus").is_err());
    }

    #[test]
    fn flags_resolve() {
        let c = parse(&[
            "verify",
            "--strategy",
            "rotated",
            "--theta-a",
            "0.05",
            "--theta-b",
            "-0.03",
        ])
        .unwrap();
        assert_eq!(c.command, Command::Verify);
        assert_eq!(c.strategy, Some(StrategyChoice::Rotated));
        assert_eq!((c.theta_a, c.theta_b), (0.05, -0.03));
        let c = parse(&[
            "optimize", "--dims", "3", "2", "--seed", "7", "--seeds", "3",
        ])
        .unwrap();
        assert_eq!(c.dims, (3, 2));
        assert_eq!(c.seed_list(), vec![7, 8, 9]);
        assert!(parse(&["optimize", "--dims", "0", "2"]).is_err());
        assert!(parse(&["sweep", "--seeds", "0"]).is_err());
    }

    #[test]
    fn config_file_merges_below_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"strategy": "noisy", "magnitude": 0.2, "seed": 4, "grid-step": 0.5, "max-iters": 9}"#)
            .unwrap();
        let p = path.to_str().unwrap();
        let c = parse(&["sweep", "--config", p, "--seed", "5"]).unwrap();
        assert_eq!(c.strategy, Some(StrategyChoice::Noisy));
        assert_eq!((c.magnitude, c.seed, c.max_iters), (0.2, 5, 9));
        assert_eq!(c.grid, Some((None, None, Some(0.5))));
        assert!(c.grid().is_err());
        std::fs::write(&path, r#"{"unknown-key": 1}"#).unwrap();
        assert!(parse(&["sweep", "--config", p]).is_err());
    }
}
