//! Analytical cost model: expected Elf nodes visited by a range search.

mod histogram;
mod occupancy;
mod uniform;

pub use histogram::{chunks, predict_histogram, HistogramInput, HistogramPrediction};
pub use occupancy::{buckets, monobuckets};
pub use uniform::{
    predict_uniform, write_prediction_csv, LevelPrediction, PredictionInput, PredictionSummary,
};

/// Cardinality to feed the model for an attribute that is another attribute
/// plus a bounded offset: inside one parent list it can take at most
/// `spread` values.
pub fn corrected_cardinality(apparent: f64, spread: f64) -> f64 {
    apparent.min(spread)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correction_caps_at_spread() {
        assert_eq!(corrected_cardinality(4000.0, 22.0), 22.0);
        assert_eq!(corrected_cardinality(5.0, 22.0), 5.0);
    }
}
