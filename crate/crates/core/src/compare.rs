//! With/without correlation-layer comparison under identical budgets.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::TargetGrid;
use crate::model::{train, TrainConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub seed: u64,
    pub r2_with: Option<f64>,
    pub r2_without: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

fn mean(xs: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = xs.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl ComparisonTable {
    pub fn mean_with(&self) -> Option<f64> {
        mean(self.rows.iter().map(|r| r.r2_with))
    }

    pub fn mean_without(&self) -> Option<f64> {
        mean(self.rows.iter().map(|r| r.r2_without))
    }

    /// Delimited text: `label,seed,r2_with_cc,r2_without_cc` plus a means
    /// block in the header.
    pub fn to_text(&self) -> String {
        let fmt = |x: Option<f64>| x.map_or("degenerate".to_string(), |v| v.to_string());
        let mut s = String::new();
        writeln!(s, "# mean_r2_with_cc: {}", fmt(self.mean_with())).unwrap();
        writeln!(s, "# mean_r2_without_cc: {}", fmt(self.mean_without())).unwrap();
        writeln!(s, "label,seed,r2_with_cc,r2_without_cc").unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{}",
                r.label,
                r.seed,
                fmt(r.r2_with),
                fmt(r.r2_without)
            )
            .unwrap();
        }
        s
    }
}

/// Trains the correlated and uncorrelated variants of `base` on every
/// target for every seed. Both variants share the seed, epochs and sweep.
pub fn compare_correlation(
    base: &TrainConfig,
    targets: &[TargetGrid],
    seeds: &[u64],
) -> Result<ComparisonTable> {
    if targets.is_empty() {
        return Err(Error::Empty("comparison targets"));
    }
    if seeds.is_empty() {
        return Err(Error::Empty("comparison seeds"));
    }
    let mut table = ComparisonTable::default();
    for grid in targets {
        for &seed in seeds {
            let mut r2 = [None, None];
            for (slot, cc) in r2.iter_mut().zip([true, false]) {
                let mut cfg = base.clone();
                cfg.seed = seed;
                cfg.model.use_correlation = cc;
                *slot = train(&cfg, grid)?.final_r2();
            }
            table.rows.push(ComparisonRow {
                label: grid.label.clone(),
                seed,
                r2_with: r2[0],
                r2_without: r2[1],
            });
        }
    }
    Ok(table)
}
