//! Named experiment families. Row and query counts are reference values
//! times `scale`; `DESK_SCALE` is the default.

use crate::datagen::{ColumnSpec, QueryBatchSpec, Rng, SelRange};
use crate::error::{Error, Result};

use super::config::{ExampleConfig, ExperimentConfig, ModelSpec, NamedModel};

pub const DESK_SCALE: f64 = 0.4;

pub const PRESETS: [&str; 6] = [
    "uniform_accuracy",
    "dimensionality_sweep",
    "correlation",
    "histogram_bias",
    "binomial_skew",
    "cardinality_sweep",
];

pub const SWEEP_DIMS: [usize; 7] = [3, 5, 7, 9, 11, 13, 15];
pub const BIASES: [f64; 4] = [0.0, 0.15, 0.3, 0.45];
pub const SKEWS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const SKEW_BUCKETS: [usize; 4] = [2, 5, 10, 20];

pub fn experiment_presets(scale: f64, seed: u64) -> Vec<ExperimentConfig> {
    PRESETS
        .iter()
        .map(|name| preset(name, scale, seed).expect("preset names are valid"))
        .collect()
}

pub fn preset(name: &str, scale: f64, seed: u64) -> Result<ExperimentConfig> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidSpec(format!("scale {scale} must be positive")));
    }
    let tag = PRESETS
        .iter()
        .position(|p| *p == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))? as u64;
    let mut p = Params {
        scale,
        seed,
        rng: Rng::derive(seed, 1000 + tag),
        tag,
        examples: Vec::new(),
    };
    match name {
        "uniform_accuracy" => p.uniform_accuracy(),
        "dimensionality_sweep" => p.dimensionality_sweep(),
        "correlation" => p.correlation(),
        "histogram_bias" => p.histogram_bias(),
        "binomial_skew" => p.binomial_skew(),
        _ => p.cardinality_sweep(),
    }
    Ok(ExperimentConfig {
        name: name.to_string(),
        scale,
        seed,
        repetitions: 5,
        examples: p.examples,
    })
}

struct Params {
    scale: f64,
    seed: u64,
    tag: u64,
    rng: Rng,
    examples: Vec<ExampleConfig>,
}

impl Params {
    fn rows(&self, reference: f64) -> usize {
        ((reference * self.scale).round() as usize).max(2)
    }

    fn queries(&self) -> usize {
        ((500.0 * self.scale).round() as usize).max(1)
    }

    /// Upper bound for random cardinalities. Below reference scale it is
    /// clipped to 0.4 |R| so that shrunken relations keep deep Elfs.
    fn card_bound(&self, rows: usize) -> u64 {
        if self.scale >= 1.0 {
            65000
        } else {
            ((0.4 * rows as f64) as u64).clamp(11, 65000)
        }
    }

    fn card(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.rng.below(hi - lo + 1)
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        label: String,
        columns: Vec<ColumnSpec>,
        rows: usize,
        sel_range: Vec<SelRange>,
        anchor_first: bool,
        model: ModelSpec,
        alt_models: Vec<NamedModel>,
    ) {
        let i = self.examples.len() as u64;
        let key = (self.tag << 32) | i;
        let n_queries = self.queries();
        self.examples.push(ExampleConfig {
            label,
            columns,
            rows,
            seed: Rng::derive(self.seed, key << 1).next(),
            queries: QueryBatchSpec {
                n_queries,
                sel_range,
                seed: Rng::derive(self.seed, (key << 1) | 1).next(),
                anchor_first,
            },
            model,
            alt_models,
        });
    }

    fn uniform_columns(&mut self, count: usize, rows: usize) -> Vec<ColumnSpec> {
        let hi = self.card_bound(rows);
        let mut cols: Vec<ColumnSpec> = (0..count).map(|_| ColumnSpec::uniform(self.card(10, hi))).collect();
        cols.push(ColumnSpec::UniqueKey);
        cols
    }

    fn uniform_accuracy(&mut self) {
        let rows = self.rows(50000.0);
        for _ in 0..40 {
            let cols = self.uniform_columns(6, rows);
            self.push(
                "k=7".into(),
                cols,
                rows,
                vec![SelRange::new(0.2, 1.0); 7],
                false,
                ModelSpec::default(),
                vec![],
            );
        }
    }

    fn dimensionality_sweep(&mut self) {
        for k in SWEEP_DIMS {
            let rows = self.rows(3600.0 * (0.37 * k as f64).exp());
            for _ in 0..24 {
                let cols = self.uniform_columns(k - 1, rows);
                self.push(
                    format!("k={k}"),
                    cols,
                    rows,
                    vec![SelRange::new(0.2, 0.8); k],
                    false,
                    ModelSpec::default(),
                    vec![],
                );
            }
        }
    }

    fn correlation(&mut self) {
        let rows = self.rows(50000.0);
        for _ in 0..30 {
            let first = self.card(1, 10000);
            let mut cols = vec![
                ColumnSpec::uniform(first),
                ColumnSpec::CorrelatedOffset { base: 0, spread: 22 },
            ];
            cols.extend(self.uniform_columns(4, rows));
            let mut sel = vec![SelRange::new(0.2, 0.8), SelRange::fixed(1.0)];
            sel.extend([SelRange::new(0.2, 1.0); 5]);
            self.push(
                "spread=22".into(),
                cols,
                rows,
                sel,
                false,
                ModelSpec::Uniform {
                    correct_correlation: true,
                },
                vec![NamedModel {
                    name: "uncorrected".into(),
                    model: ModelSpec::default(),
                }],
            );
        }
    }

    fn small_uniform_tail() -> Vec<ColumnSpec> {
        let mut cols = vec![ColumnSpec::uniform(16); 5];
        cols.push(ColumnSpec::UniqueKey);
        cols
    }

    fn histogram_bias(&mut self) {
        let rows = self.rows(100000.0);
        for bias in BIASES {
            for _ in 0..5 {
                let mut cols = vec![ColumnSpec::TwoPiece { card: 100, bias }];
                cols.extend(Self::small_uniform_tail());
                self.push(
                    format!("bias={bias}"),
                    cols,
                    rows,
                    vec![SelRange::new(0.2, 1.0); 7],
                    true,
                    ModelSpec::Histogram {
                        buckets: 2,
                        placebo: false,
                    },
                    vec![NamedModel {
                        name: "uniform".into(),
                        model: ModelSpec::default(),
                    }],
                );
            }
        }
    }

    fn binomial_skew(&mut self) {
        let rows = self.rows(100000.0);
        let mut alts = Vec::new();
        for b in SKEW_BUCKETS {
            for placebo in [false, true] {
                let name = format!("{}_b{b}", if placebo { "placebo" } else { "correct" });
                alts.push(NamedModel {
                    name,
                    model: ModelSpec::Histogram { buckets: b, placebo },
                });
            }
        }
        for skew in SKEWS {
            for _ in 0..10 {
                let mut cols = vec![ColumnSpec::BinomialMix { n: 100, skew }];
                cols.extend(Self::small_uniform_tail());
                self.push(
                    format!("skew={skew}"),
                    cols,
                    rows,
                    vec![SelRange::new(0.2, 1.0); 7],
                    true,
                    ModelSpec::Histogram {
                        buckets: 5,
                        placebo: false,
                    },
                    alts.clone(),
                );
            }
        }
    }

    /// First cardinality swept in half-octave steps, everything else fixed.
    fn cardinality_sweep(&mut self) {
        let rows = self.rows(50000.0);
        let mut last = 0;
        for j in 0..=32 {
            let card = 2f64.powf(j as f64 / 2.0).round() as u64;
            if card == last {
                continue;
            }
            last = card;
            let mut cols = vec![ColumnSpec::uniform(card)];
            cols.extend(vec![ColumnSpec::uniform(10); 5]);
            cols.push(ColumnSpec::UniqueKey);
            let sel = [0.6, 1.0, 0.6, 1.0, 0.6, 1.0, 1.0].map(SelRange::fixed).to_vec();
            self.push(
                format!("card_1={card}"),
                cols,
                rows,
                sel,
                false,
                ModelSpec::default(),
                vec![],
            );
        }
    }
}
