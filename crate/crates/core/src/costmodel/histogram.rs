use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::uniform::{predict_uniform, PredictionInput};

/// Splits `xs` into `b` contiguous chunks whose lengths differ by at most
/// one; the first `len % b` chunks carry the extra element.
pub fn chunks<T>(xs: &[T], b: usize) -> Result<Vec<&[T]>> {
    if b == 0 || b > xs.len() {
        return Err(Error::InvalidBucketCount {
            buckets: b,
            len: xs.len(),
        });
    }
    let base = xs.len() / b;
    let extra = xs.len() % b;
    let mut out = Vec::with_capacity(b);
    let mut start = 0;
    for i in 0..b {
        let len = base + usize::from(i < extra);
        out.push(&xs[start..start + len]);
        start += len;
    }
    Ok(out)
}

/// Inputs of the histogram predictor: the first attribute follows `pmf`
/// over `0..pmf.len()`, the remaining ones are uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramInput {
    pub n_tuples: f64,
    pub pmf: Vec<f64>,
    /// Upper end of the first window as a fraction of the first domain. The
    /// window is assumed to start at 0.
    pub upper: f64,
    /// Cardinalities of dimensions `2..=k`.
    pub cardinalities: Vec<f64>,
    /// Selectivities of dimensions `2..=k`.
    pub selectivities: Vec<f64>,
    pub buckets: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramPrediction {
    pub total: f64,
    /// Summed per-depth visits, `k + 1` entries.
    pub visits: Vec<f64>,
    /// Summed per-depth monolist encounters, `k` entries.
    pub mono: Vec<f64>,
    pub chunks_used: usize,
}

const PMF_TOLERANCE: f64 = 1e-9;

/// Sums uniform predictions over equal-width chunks of the first domain,
/// each weighted by its probability mass and clipped to the query window.
/// Chunks expected to hold less than one tuple contribute nothing.
pub fn predict_histogram(input: &HistogramInput) -> Result<HistogramPrediction> {
    let mass: f64 = input.pmf.iter().sum();
    if (mass - 1.0).abs() > PMF_TOLERANCE || input.pmf.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::PmfNotNormalized(mass));
    }
    if !(input.upper > 0.0 && input.upper <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "normalised upper bound {} outside (0, 1]",
            input.upper
        )));
    }
    let domain = input.pmf.len() as f64;
    let k = input.cardinalities.len() + 1;
    let mut visits = vec![0.0; k + 1];
    let mut mono = vec![0.0; k];
    let mut used = 0;
    let mut seen = 0.0;
    for chunk in chunks(&input.pmf, input.buckets)? {
        let left = seen;
        let right = left + chunk.len() as f64 / domain;
        seen = right;
        if input.upper <= left {
            continue;
        }
        let alpha: f64 = chunk.iter().sum();
        let n = alpha * input.n_tuples;
        if n < 1.0 {
            continue;
        }
        let beta = (input.upper.min(right) - left) / (right - left);
        let mut cardinalities = Vec::with_capacity(k);
        cardinalities.push(chunk.len() as f64);
        cardinalities.extend_from_slice(&input.cardinalities);
        let mut selectivities = Vec::with_capacity(k);
        selectivities.push(beta.clamp(0.0, 1.0));
        selectivities.extend_from_slice(&input.selectivities);
        let p = predict_uniform(&PredictionInput {
            n_tuples: n,
            cardinalities,
            selectivities,
        })?;
        for (acc, v) in visits.iter_mut().zip(&p.visits) {
            *acc += v;
        }
        for (acc, m) in mono.iter_mut().zip(&p.mono) {
            *acc += m;
        }
        used += 1;
    }
    Ok(HistogramPrediction {
        total: visits.iter().sum(),
        visits,
        mono,
        chunks_used: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_sizes() {
        let xs: Vec<u32> = (0..10).collect();
        let lens: Vec<usize> = chunks(&xs, 3).unwrap().iter().map(|c| c.len()).collect();
        assert_eq!(lens, vec![4, 3, 3]);
        assert_eq!(chunks(&xs, 3).unwrap()[1], &[4, 5, 6]);
        assert_eq!(chunks(&xs, 10).unwrap().len(), 10);
        assert!(matches!(
            chunks(&xs, 11),
            Err(Error::InvalidBucketCount { buckets: 11, len: 10 })
        ));
        assert!(chunks(&xs, 0).is_err());
    }

    fn uniform_input(b: usize, upper: f64) -> HistogramInput {
        HistogramInput {
            n_tuples: 5000.0,
            pmf: vec![0.01; 100],
            upper,
            cardinalities: vec![16.0, 16.0],
            selectivities: vec![0.5, 0.5],
            buckets: b,
        }
    }

    #[test]
    fn one_bucket_is_the_uniform_model() {
        let h = predict_histogram(&uniform_input(1, 0.3)).unwrap();
        let u = predict_uniform(&PredictionInput {
            n_tuples: 5000.0,
            cardinalities: vec![100.0, 16.0, 16.0],
            selectivities: vec![0.3, 0.5, 0.5],
        })
        .unwrap();
        assert!((h.total - u.total()).abs() < 1e-9);
        assert_eq!(h.chunks_used, 1);
    }

    #[test]
    fn chunks_right_of_window_are_skipped() {
        let h = predict_histogram(&uniform_input(4, 0.5)).unwrap();
        assert_eq!(h.chunks_used, 2);
    }

    #[test]
    fn unnormalised_pmf_is_rejected() {
        let mut inp = uniform_input(2, 1.0);
        inp.pmf[0] = 0.5;
        assert!(matches!(predict_histogram(&inp), Err(Error::PmfNotNormalized(_))));
    }

    #[test]
    fn empty_chunks_contribute_nothing() {
        let mut inp = uniform_input(2, 1.0);
        inp.pmf = [vec![0.02; 50], vec![0.0; 50]].concat();
        let h = predict_histogram(&inp).unwrap();
        assert_eq!(h.chunks_used, 1);
    }
}
