use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::Relation;

use super::rng::Rng;

/// Source distribution of one attribute. Values are drawn from `0..domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnSpec {
    /// `U{0, card-1}`.
    Uniform { card: u64 },
    /// Uniform inside each half of `0..card`; the lower half `0..card/2`
    /// gets probability `0.5 + bias`.
    TwoPiece { card: u64, bias: f64 },
    /// `Bin(n, 0.5)` with probability `skew`, else `U{0, n-1}`.
    BinomialMix { n: u64, skew: f64 },
    /// Value of column `base` plus `U{0, spread-1}`.
    CorrelatedOffset { base: usize, spread: u64 },
    /// The row index. Makes every tuple distinct.
    UniqueKey,
}

impl ColumnSpec {
    pub fn uniform(card: u64) -> Self {
        ColumnSpec::Uniform { card }
    }
}

pub fn validate_specs(specs: &[ColumnSpec]) -> Result<()> {
    if specs.len() < 2 {
        return Err(Error::InvalidSpec(format!(
            "need at least 2 columns, got {}",
            specs.len()
        )));
    }
    for (i, spec) in specs.iter().enumerate() {
        match *spec {
            ColumnSpec::Uniform { card } if card < 1 => {
                return Err(Error::InvalidSpec(format!("column {i}: cardinality 0")))
            }
            ColumnSpec::TwoPiece { card, bias } => {
                if card < 2 {
                    return Err(Error::InvalidSpec(format!(
                        "column {i}: two-piece needs cardinality >= 2"
                    )));
                }
                if !(0.0..=0.5).contains(&bias) {
                    return Err(Error::InvalidSpec(format!("column {i}: bias {bias} outside [0, 0.5]")));
                }
            }
            ColumnSpec::BinomialMix { n, skew } => {
                if n < 1 {
                    return Err(Error::InvalidSpec(format!("column {i}: binomial n = 0")));
                }
                if !(0.0..=1.0).contains(&skew) {
                    return Err(Error::InvalidSpec(format!("column {i}: skew {skew} outside [0, 1]")));
                }
            }
            ColumnSpec::CorrelatedOffset { base, spread } => {
                if base >= i {
                    return Err(Error::SpecOrder { column: i, base });
                }
                if spread < 1 {
                    return Err(Error::InvalidSpec(format!("column {i}: spread 0")));
                }
            }
            ColumnSpec::UniqueKey if i + 1 != specs.len() => {
                return Err(Error::InvalidSpec(format!(
                    "column {i}: the unique key must be the last column"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Number of values each column can take (the source cardinality).
pub fn domain_sizes(specs: &[ColumnSpec], n_rows: usize) -> Result<Vec<u64>> {
    validate_specs(specs)?;
    let mut out: Vec<u64> = Vec::with_capacity(specs.len());
    for spec in specs {
        let d = match *spec {
            ColumnSpec::Uniform { card } | ColumnSpec::TwoPiece { card, .. } => card,
            ColumnSpec::BinomialMix { n, .. } => n + 1,
            ColumnSpec::CorrelatedOffset { base, spread } => out[base] + spread - 1,
            ColumnSpec::UniqueKey => n_rows.max(1) as u64,
        };
        out.push(d);
    }
    Ok(out)
}

/// Probability of each value `0..domain` for the column kinds whose law does
/// not depend on other columns.
pub fn column_pmf(spec: &ColumnSpec) -> Result<Vec<f64>> {
    match *spec {
        ColumnSpec::Uniform { card } => Ok(vec![1.0 / card as f64; card as usize]),
        ColumnSpec::TwoPiece { card, bias } => {
            let half = card / 2;
            let lower = (0.5 + bias) / half as f64;
            let upper = (0.5 - bias) / (card - half) as f64;
            Ok((0..card).map(|v| if v < half { lower } else { upper }).collect())
        }
        ColumnSpec::BinomialMix { n, skew } => {
            let ln2 = std::f64::consts::LN_2;
            let mut ln_choose = 0.0;
            let mut pmf = Vec::with_capacity(n as usize + 1);
            for v in 0..=n {
                if v > 0 {
                    ln_choose += ((n - v + 1) as f64).ln() - (v as f64).ln();
                }
                let binom = (ln_choose - n as f64 * ln2).exp();
                let flat = if v < n { 1.0 / n as f64 } else { 0.0 };
                pmf.push(skew * binom + (1.0 - skew) * flat);
            }
            Ok(pmf)
        }
        ColumnSpec::CorrelatedOffset { .. } | ColumnSpec::UniqueKey => Err(Error::InvalidSpec(
            "no standalone distribution for a dependent column".into(),
        )),
    }
}

/// Samples `n_rows` tuples row by row, columns left to right.
pub fn gen_relation(specs: &[ColumnSpec], n_rows: usize, seed: u64) -> Result<Relation> {
    validate_specs(specs)?;
    let k = specs.len();
    let mut rng = Rng::new(seed);
    let mut values = vec![0u64; n_rows * k];
    for r in 0..n_rows {
        let row = &mut values[r * k..(r + 1) * k];
        for (c, spec) in specs.iter().enumerate() {
            row[c] = match *spec {
                ColumnSpec::Uniform { card } => rng.below(card),
                ColumnSpec::TwoPiece { card, bias } => {
                    let half = card / 2;
                    if rng.chance(0.5 + bias) {
                        rng.below(half)
                    } else {
                        half + rng.below(card - half)
                    }
                }
                ColumnSpec::BinomialMix { n, skew } => {
                    if rng.chance(skew) {
                        rng.binomial_half(n)
                    } else {
                        rng.below(n)
                    }
                }
                ColumnSpec::CorrelatedOffset { base, spread } => row[base] + rng.below(spread),
                ColumnSpec::UniqueKey => r as u64,
            };
        }
    }
    Relation::from_flat(k, values)
}
