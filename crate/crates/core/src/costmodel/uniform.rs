use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::occupancy::{buckets, monobuckets};

/// Inputs of the uniform predictor. All vectors have one entry per
/// dimension, in tree order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionInput {
    pub n_tuples: f64,
    pub cardinalities: Vec<f64>,
    pub selectivities: Vec<f64>,
}

/// Per-depth predictions. `visits` has `k + 1` entries; the last one is the
/// hand-over from depth-`k` lists to tuple IDs. The other vectors have `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPrediction {
    pub visits: Vec<f64>,
    pub mono: Vec<f64>,
    pub avgsize: Vec<f64>,
    pub fanout: Vec<f64>,
    /// Depth-`k+1` term without the last selectivity factor.
    pub terminal_unscaled: f64,
    /// Depths (1-based) where the monolist mass swallowed the whole fan-out
    /// and `avgsize` was clamped to 1.
    pub degenerate_depths: Vec<usize>,
}

impl LevelPrediction {
    pub fn total(&self) -> f64 {
        self.visits.iter().sum()
    }

    pub fn dims(&self) -> usize {
        self.fanout.len()
    }
}

/// Relative slack below which `fanout - monobuckets` counts as zero.
const DEGENERATE_EPS: f64 = 1e-9;

/// Rounds up, ignoring float noise of a few ulps above an integer.
fn ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Expected list length for `avgsize >= 1` tuples, pinned to its exact
/// envelope `[1, avgsize]` against rounding.
fn fan(card: f64, avgsize: f64) -> Result<f64> {
    Ok(buckets(card, avgsize)?.clamp(1.0, avgsize))
}

impl PredictionInput {
    pub fn dims(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.cardinalities.len() != self.selectivities.len() {
            return Err(Error::LengthMismatch(
                self.cardinalities.len(),
                self.selectivities.len(),
            ));
        }
        if self.dims() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 dimensions, got {}",
                self.dims()
            )));
        }
        if !(self.n_tuples >= 1.0) || !self.n_tuples.is_finite() {
            return Err(Error::InvalidInput(format!(
                "tuple count must be at least 1, got {}",
                self.n_tuples
            )));
        }
        if let Some(&c) = self
            .cardinalities
            .iter()
            .find(|&&c| !(c >= 1.0) || !c.is_finite())
        {
            return Err(Error::InvalidCardinality(c));
        }
        if let Some(s) = self.selectivities.iter().find(|&&s| !(0.0..=1.0).contains(&s)) {
            return Err(Error::InvalidInput(format!("selectivity {s} outside [0, 1]")));
        }
        Ok(())
    }
}

/// Predicts visited nodes per depth for uniformly and independently
/// distributed attributes.
pub fn predict_uniform(input: &PredictionInput) -> Result<LevelPrediction> {
    predict_levels(input, true)
}

/// The recurrence with or without the ceilings on `visits` and `mono`.
fn predict_levels(input: &PredictionInput, round: bool) -> Result<LevelPrediction> {
    input.validate()?;
    let ceil = |x: f64| if round { ceil(x) } else { x };
    let k = input.dims();
    let card = &input.cardinalities;
    let sel = &input.selectivities;

    let mut visits = vec![0.0; k + 1];
    let mut mono = vec![0.0; k];
    let mut avgsize = vec![0.0; k];
    let mut fanout = vec![0.0; k];
    let mut degenerate_depths = Vec::new();

    visits[0] = 1.0;
    avgsize[0] = input.n_tuples;
    fanout[0] = fan(card[0], input.n_tuples)?;

    for i in 0..k - 1 {
        let open = visits[i] - mono[i];
        visits[i + 1] = ceil(sel[i] * open * fanout[i]);
        let m = monobuckets(fanout[i], avgsize[i])?;
        mono[i + 1] = ceil(sel[i] * open * m);
        let rest = fanout[i] - m;
        avgsize[i + 1] = if rest <= DEGENERATE_EPS * fanout[i] {
            degenerate_depths.push(i + 2);
            1.0
        } else {
            ((avgsize[i] - m) / rest).max(1.0)
        };
        fanout[i + 1] = fan(card[i + 1], avgsize[i + 1])?;
    }

    let open = visits[k - 1] - mono[k - 1];
    let terminal_unscaled = open * fanout[k - 1];
    visits[k] = ceil(sel[k - 1] * terminal_unscaled);

    Ok(LevelPrediction {
        visits,
        mono,
        avgsize,
        fanout,
        terminal_unscaled,
        degenerate_depths,
    })
}

/// Writes `depth,visits,mono,avgsize,fanout`; the depth-`k+1` row only has
/// visits.
pub fn write_prediction_csv<W: Write>(pred: &LevelPrediction, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["depth", "visits", "mono", "avgsize", "fanout"])?;
    for (d, v) in pred.visits.iter().enumerate() {
        let field = |xs: &[f64]| xs.get(d).map(|x| x.to_string()).unwrap_or_default();
        out.write_record([
            (d + 1).to_string(),
            v.to_string(),
            field(&pred.mono),
            field(&pred.avgsize),
            field(&pred.fanout),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PredictionSummary {
    pub dims: usize,
    pub total: f64,
    pub terminal_unscaled: f64,
    pub degenerate_depths: Vec<usize>,
}

impl From<&LevelPrediction> for PredictionSummary {
    fn from(p: &LevelPrediction) -> Self {
        PredictionSummary {
            dims: p.dims(),
            total: p.total(),
            terminal_unscaled: p.terminal_unscaled,
            degenerate_depths: p.degenerate_depths.clone(),
        }
    }
}
