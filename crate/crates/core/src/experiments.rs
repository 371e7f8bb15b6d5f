//! Seeded Monte-Carlo simulation of the one-stage and two-stage experiments
//! and empirical-frequency comparison against predicted distributions.
//!
//! Reproducibility contract: the generator is ChaCha12 seeded with the
//! configured 64-bit seed; each categorical draw consumes exactly one u64
//! from the stream, converted to [0, 1) as `(x >> 11) * 2^-53`; inverse-CDF
//! selection uses cumulative sums taken in label order. Two-stage sampling
//! draws the reference outcome first, then the conditional outcome, so one
//! shot consumes two stream values. Tables are therefore bit-identical
//! across runs and platforms for a fixed configuration.

use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repr::{CondMatrix, OutcomeDist, ProbState};

/// Pseudorandom algorithm used for sampling. Only ChaCha12 is implemented;
/// the field exists so configurations name their generator explicitly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    #[default]
    #[serde(rename = "chacha12")]
    ChaCha12,
}

/// Configuration of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub shots: u64,
    pub seed: u64,
    #[serde(default)]
    pub generator: Generator,
}

impl RunConfig {
    pub fn new(shots: u64, seed: u64) -> Self {
        RunConfig {
            shots,
            seed,
            generator: Generator::ChaCha12,
        }
    }
}

/// Outcome counts of a finished run. Labels are part of the contract:
/// single-stage runs label outcomes "0".."J-1", two-stage runs label the
/// joint outcomes "i:j" in row-major (i, j) order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl CountTable {
    /// Observed relative frequency of entry `idx`.
    pub fn frequency(&self, idx: usize) -> f64 {
        self.counts[idx] as f64 / self.total as f64
    }
}

fn u64_to_unit(x: u64) -> f64 {
    // 53 high bits -> [0, 1).
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// First index whose cumulative weight exceeds `u`; the last index is a
/// catch-all against rounding in the final cumulative sum.
fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|c| u < *c).unwrap_or(cdf.len() - 1)
}

/// Samples the direct experiment: draws j ~ q, `shots` times.
pub fn sample_experiment_one(q: &OutcomeDist, cfg: &RunConfig) -> CountTable {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let cdf = cumulative(q.values());
    let mut counts = vec![0u64; q.len()];
    for _ in 0..cfg.shots {
        counts[draw(&cdf, u64_to_unit(rng.next_u64()))] += 1;
    }
    CountTable {
        labels: (0..q.len()).map(|j| j.to_string()).collect(),
        counts,
        total: cfg.shots,
    }
}

/// Samples the two-stage experiment: draws the reference outcome i ~ p and
/// then j from column i of R, `shots` times, counting joint (i, j) pairs.
pub fn sample_experiment_two(p: &ProbState, r: &CondMatrix, cfg: &RunConfig) -> CountTable {
    assert_eq!(
        p.len(),
        r.n(),
        "state length must match the conditional matrix"
    );
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let n = p.len();
    let j = r.j();
    let p_cdf = cumulative(p.values());
    let col_cdfs: Vec<Vec<f64>> = (0..n)
        .map(|i| cumulative(&(0..j).map(|jj| r.entry(jj, i)).collect::<Vec<_>>()))
        .collect();
    let mut counts = vec![0u64; n * j];
    for _ in 0..cfg.shots {
        let i = draw(&p_cdf, u64_to_unit(rng.next_u64()));
        let jj = draw(&col_cdfs[i], u64_to_unit(rng.next_u64()));
        counts[i * j + jj] += 1;
    }
    let labels = (0..n)
        .flat_map(|i| (0..j).map(move |jj| format!("{i}:{jj}")))
        .collect();
    CountTable {
        labels,
        counts,
        total: cfg.shots,
    }
}

/// Collapses a joint "i:j" table onto its second index, producing a table
/// labeled "0".."J-1". Errors when any label is not of the joint form.
pub fn marginal_j(table: &CountTable) -> Result<CountTable> {
    let mut max_j = 0usize;
    let mut parsed = Vec::with_capacity(table.labels.len());
    for label in &table.labels {
        let (_, j_part) = label.split_once(':').ok_or_else(|| {
            Error::ShapeMismatch(format!(
                "label '{label}' is not a joint 'i:j' outcome label"
            ))
        })?;
        let jj: usize = j_part.parse().map_err(|_| {
            Error::ShapeMismatch(format!("label '{label}' has a non-numeric second index"))
        })?;
        max_j = max_j.max(jj);
        parsed.push(jj);
    }
    let mut counts = vec![0u64; max_j + 1];
    for (jj, c) in parsed.into_iter().zip(&table.counts) {
        counts[jj] += c;
    }
    Ok(CountTable {
        labels: (0..=max_j).map(|j| j.to_string()).collect(),
        counts,
        total: table.total,
    })
}

/// Largest gap between observed frequencies and a predicted distribution.
/// The table's labels must be exactly the indices "0".."J-1" of the
/// prediction (in any order).
pub fn empirical_compare(table: &CountTable, predicted: &OutcomeDist) -> Result<f64> {
    if table.labels.len() != predicted.len() {
        return Err(Error::ShapeMismatch(format!(
            "table has {} labels, prediction has {} outcomes",
            table.labels.len(),
            predicted.len()
        )));
    }
    let mut seen = vec![false; predicted.len()];
    let mut worst = 0.0f64;
    for (label, count) in table.labels.iter().zip(&table.counts) {
        let idx: usize = label.parse().map_err(|_| {
            Error::ShapeMismatch(format!("label '{label}' is not an outcome index"))
        })?;
        if idx >= predicted.len() || seen[idx] {
            return Err(Error::ShapeMismatch(format!(
                "label '{label}' does not match the prediction's outcome set"
            )));
        }
        seen[idx] = true;
        let freq = *count as f64 / table.total as f64;
        worst = worst.max((freq - predicted.values()[idx]).abs());
    }
    Ok(worst)
}
