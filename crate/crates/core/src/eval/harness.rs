use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::costmodel::{
    corrected_cardinality, predict_histogram, predict_uniform, HistogramInput, PredictionInput,
};
use crate::datagen::{
    column_pmf, domain_sizes, gen_query_batch, gen_relation, window_selectivities, ColumnSpec, Rng,
};
use crate::elf::{build_linear, search_into, LinearElf, SearchStats};
use crate::error::{Error, Result};
use crate::relation::{RangeQuery, RelationMeta};

use super::config::{ExampleConfig, ModelSpec};

/// One built index with its evaluation batch.
#[derive(Clone, Debug)]
pub struct Example {
    pub index: usize,
    pub config: ExampleConfig,
    pub meta: RelationMeta,
    /// Source cardinalities per column.
    pub domains: Vec<u64>,
    pub elf: LinearElf,
    pub queries: Vec<RangeQuery>,
    /// Fixed evaluation order of `queries`.
    pub order: Vec<usize>,
    pub build_ms: f64,
}

/// Predicted batch totals per depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchPrediction {
    /// `k + 1` entries.
    pub visits: Vec<f64>,
    /// `k` entries.
    pub mono: Vec<f64>,
}

impl BatchPrediction {
    pub fn total(&self) -> f64 {
        self.visits.iter().sum()
    }
}

impl Example {
    pub fn build(index: usize, config: &ExampleConfig) -> Result<Example> {
        let wrap = |e: Error| e.in_example(index);
        config.validate().map_err(wrap)?;
        let start = Instant::now();
        let rel = gen_relation(&config.columns, config.rows, config.seed).map_err(wrap)?;
        let elf = build_linear(&rel).map_err(wrap)?;
        let build_ms = start.elapsed().as_secs_f64() * 1e3;
        let domains = domain_sizes(&config.columns, config.rows).map_err(wrap)?;
        let queries = gen_query_batch(&config.queries, &domains).map_err(wrap)?;
        let mut order: Vec<usize> = (0..queries.len()).collect();
        Rng::derive(config.queries.seed, 0x5eed).shuffle(&mut order);
        Ok(Example {
            index,
            config: config.clone(),
            meta: rel.meta(),
            domains,
            elf,
            queries,
            order,
            build_ms,
        })
    }

    pub fn dims(&self) -> usize {
        self.elf.dims()
    }

    /// Runs the batch once in evaluation order and returns summed stats.
    pub fn count_visits(&self) -> Result<SearchStats> {
        let mut stats = SearchStats::new(self.dims());
        let mut out = Vec::with_capacity(self.meta.rows);
        for &i in &self.order {
            out.clear();
            search_into(&self.elf, &self.queries[i], &mut out, &mut stats)?;
        }
        Ok(stats)
    }

    /// Cardinalities handed to the model, one per column.
    pub fn model_cardinalities(&self, correct_correlation: bool) -> Vec<f64> {
        self.config
            .columns
            .iter()
            .zip(&self.domains)
            .map(|(spec, &dom)| match *spec {
                ColumnSpec::CorrelatedOffset { spread, .. } if correct_correlation => {
                    corrected_cardinality(dom as f64, spread as f64)
                }
                _ => dom as f64,
            })
            .collect()
    }

    /// Sums per-query predictions over the batch.
    pub fn predict(&self, model: &ModelSpec) -> Result<BatchPrediction> {
        let k = self.dims();
        let mut acc = BatchPrediction {
            visits: vec![0.0; k + 1],
            mono: vec![0.0; k],
        };
        let n = self.meta.rows as f64;
        let wrap = |e: Error| e.in_example(self.index);
        match *model {
            ModelSpec::Uniform {
                correct_correlation,
            } => {
                let cards = self.model_cardinalities(correct_correlation);
                for q in &self.queries {
                    let p = predict_uniform(&PredictionInput {
                        n_tuples: n,
                        cardinalities: cards.clone(),
                        selectivities: window_selectivities(q, &self.domains),
                    })
                    .map_err(wrap)?;
                    add(&mut acc, &p.visits, &p.mono);
                }
            }
            ModelSpec::Histogram { buckets, placebo } => {
                let pmf = if placebo {
                    vec![1.0 / self.domains[0] as f64; self.domains[0] as usize]
                } else {
                    column_pmf(&self.config.columns[0]).map_err(wrap)?
                };
                let cards = self.model_cardinalities(false);
                for q in &self.queries {
                    let first = q.windows()[0];
                    if first.lower != 0 {
                        return Err(wrap(Error::InvalidInput(
                            "histogram prediction needs first windows starting at 0".into(),
                        )));
                    }
                    let sel = window_selectivities(q, &self.domains);
                    let p = predict_histogram(&HistogramInput {
                        n_tuples: n,
                        pmf: pmf.clone(),
                        upper: sel[0],
                        cardinalities: cards[1..].to_vec(),
                        selectivities: sel[1..].to_vec(),
                        buckets,
                    })
                    .map_err(wrap)?;
                    add(&mut acc, &p.visits, &p.mono);
                }
            }
        }
        Ok(acc)
    }

    pub fn mean_selectivity(&self, dim: usize) -> f64 {
        let sum: f64 = self
            .queries
            .iter()
            .map(|q| window_selectivities(q, &self.domains)[dim])
            .sum();
        sum / self.queries.len().max(1) as f64
    }
}

fn add(acc: &mut BatchPrediction, visits: &[f64], mono: &[f64]) {
    for (a, v) in acc.visits.iter_mut().zip(visits) {
        *a += v;
    }
    for (a, m) in acc.mono.iter_mut().zip(mono) {
        *a += m;
    }
}

/// Builds every example before anything is timed. Examples are independent,
/// so they are built on all available cores; the result keeps config order.
pub fn run_build_phase(configs: &[ExampleConfig]) -> Result<Vec<Example>> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let per = configs.len().div_ceil(threads).max(1);
    let mut slots: Vec<Option<Result<Example>>> = (0..configs.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        for (t, chunk) in slots.chunks_mut(per).enumerate() {
            s.spawn(move || {
                for (j, slot) in chunk.iter_mut().enumerate() {
                    let i = t * per + j;
                    *slot = Some(Example::build(i, &configs[i]));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every slot is filled")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub example: usize,
    pub label: String,
    pub dims: usize,
    pub rows: usize,
    pub queries: usize,
    /// Model cardinality of the first column.
    pub card_1: f64,
    /// Mean window selectivity on the first column.
    pub mean_sel_1: f64,
    /// Median batch time over repetitions, milliseconds.
    pub t_ms: f64,
    pub v: u64,
    pub v_hat: f64,
    pub actual_depths: Vec<u64>,
    pub predicted_depths: Vec<f64>,
    pub actual_mono: Vec<u64>,
    pub predicted_mono: Vec<f64>,
    /// Totals of the alternative models, by name.
    pub alt: Vec<(String, f64)>,
}

#[derive(Clone, Debug)]
pub struct SearchPhase {
    pub measurements: Vec<Measurement>,
    /// `(repetition, example)` in execution order.
    pub log: Vec<(usize, usize)>,
    /// Batch times per example, one per repetition.
    pub timings: Vec<Vec<f64>>,
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Times every batch `repetitions` times, cycling through all examples in
/// each repetition, and pairs the median time with actual and predicted
/// visit counts.
pub fn run_search_phase(examples: &[Example], repetitions: usize) -> Result<SearchPhase> {
    let repetitions = repetitions.max(1);
    let mut timings = vec![Vec::with_capacity(repetitions); examples.len()];
    let mut stats: Vec<Option<SearchStats>> = vec![None; examples.len()];
    let mut log = Vec::with_capacity(repetitions * examples.len());
    let mut out = Vec::with_capacity(examples.iter().map(|e| e.meta.rows).max().unwrap_or(0));
    for rep in 0..repetitions {
        for (pos, ex) in examples.iter().enumerate() {
            let mut s = SearchStats::new(ex.dims());
            let start = Instant::now();
            for &i in &ex.order {
                out.clear();
                search_into(&ex.elf, &ex.queries[i], &mut out, &mut s)
                    .map_err(|e| e.in_example(ex.index))?;
            }
            let ms = start.elapsed().as_secs_f64() * 1e3;
            timings[pos].push(ms);
            log.push((rep, ex.index));
            let slot = &mut stats[pos];
            match slot {
                Some(prev) if *prev != s => {
                    return Err(Error::InvalidInput(format!(
                        "example {}: visit counts changed between repetitions",
                        ex.index
                    )))
                }
                Some(_) => {}
                None => *slot = Some(s),
            }
        }
    }
    let mut measurements = Vec::with_capacity(examples.len());
    for (pos, ex) in examples.iter().enumerate() {
        let s = stats[pos].take().expect("at least one repetition ran");
        measurements.push(measurement(ex, &s, median(&timings[pos]))?);
    }
    Ok(SearchPhase {
        measurements,
        log,
        timings,
    })
}

/// Visit counts and predictions without timing.
pub fn measure_visits(examples: &[Example]) -> Result<Vec<Measurement>> {
    examples
        .iter()
        .map(|ex| measurement(ex, &ex.count_visits()?, f64::NAN))
        .collect()
}

fn measurement(ex: &Example, s: &SearchStats, t_ms: f64) -> Result<Measurement> {
    let pred = ex.predict(&ex.config.model)?;
    let alt = ex
        .config
        .alt_models
        .iter()
        .map(|m| Ok((m.name.clone(), ex.predict(&m.model)?.total())))
        .collect::<Result<Vec<_>>>()?;
    let card_1 = match ex.config.model {
        ModelSpec::Uniform {
            correct_correlation,
        } => ex.model_cardinalities(correct_correlation)[0],
        ModelSpec::Histogram { .. } => ex.domains[0] as f64,
    };
    Ok(Measurement {
        example: ex.index,
        label: ex.config.label.clone(),
        dims: ex.dims(),
        rows: ex.meta.rows,
        queries: ex.queries.len(),
        card_1,
        mean_sel_1: ex.mean_selectivity(0),
        t_ms,
        v: s.total_visits(),
        v_hat: pred.total(),
        actual_depths: s.visits.clone(),
        predicted_depths: pred.visits,
        actual_mono: s.mono[..ex.dims()].to_vec(),
        predicted_mono: pred.mono,
        alt,
    })
}
