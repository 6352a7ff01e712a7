//! JSON strategy files: `dimA`, `dimB`, `psi`, `A0`, `A1`, `B0`, `B1`, with
//! complex entries as `[re, im]` and matrices row-major.

use std::path::Path;

use anyhow::{bail, Context};
use chsh_lab::chsh::ChshStrategy;
use chsh_lab::linalg::{ComplexMatrix, ComplexVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type Entry = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub psi: Vec<Entry>,
    #[serde(rename = "A0")]
    pub a0: Vec<Vec<Entry>>,
    #[serde(rename = "A1")]
    pub a1: Vec<Vec<Entry>>,
    #[serde(rename = "B0")]
    pub b0: Vec<Vec<Entry>>,
    #[serde(rename = "B1")]
    pub b1: Vec<Vec<Entry>>,
}

fn entry(z: &Complex64) -> Entry {
    [z.re, z.im]
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<Entry>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(entry).collect())
        .collect()
}

fn to_matrix(rows: &[Vec<Entry>], dim: usize, name: &str) -> anyhow::Result<ComplexMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        bail!("{name} must be {dim}x{dim}");
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    ComplexMatrix::new(dim, dim, data).with_context(|| format!("invalid {name}"))
}

impl StrategyFile {
    pub fn from_strategy(s: &ChshStrategy) -> Self {
        Self {
            dim_a: s.dim_a(),
            dim_b: s.dim_b(),
            psi: s.psi().iter().map(entry).collect(),
            a0: matrix_rows(s.a0()),
            a1: matrix_rows(s.a1()),
            b0: matrix_rows(s.b0()),
            b1: matrix_rows(s.b1()),
        }
    }

    /// Validates every observable at `tol` and the state norm.
    pub fn to_strategy(&self, tol: f64) -> anyhow::Result<ChshStrategy> {
        let (da, db) = (self.dim_a, self.dim_b);
        if da == 0 || db == 0 {
            bail!("dimA and dimB must be positive");
        }
        if self.psi.len() != da * db {
            bail!(
                "psi must have dimA*dimB = {} entries, found {}",
                da * db,
                self.psi.len()
            );
        }
        let psi = ComplexVector::new(
            self.psi
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
        .context("invalid psi")?;
        let strategy = ChshStrategy::new(
            psi,
            to_matrix(&self.a0, da, "A0")?,
            to_matrix(&self.a1, da, "A1")?,
            to_matrix(&self.b0, db, "B0")?,
            to_matrix(&self.b1, db, "B1")?,
            tol,
        )?;
        Ok(strategy)
    }
}

pub fn read_strategy(path: &Path, tol: f64) -> anyhow::Result<ChshStrategy> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading strategy {}", path.display()))?;
    let file: StrategyFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing strategy {}", path.display()))?;
    file.to_strategy(tol)
        .with_context(|| format!("invalid strategy in {}", path.display()))
}

pub fn write_strategy(path: &Path, s: &ChshStrategy) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(&StrategyFile::from_strategy(s))?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing strategy {}", path.display()))
}
