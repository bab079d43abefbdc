//! Closed forms for the two occupancy problems behind the cost model.
//!
//! Both are evaluated in log space so that fractional and very large
//! arguments stay finite; the textbook `c^k` forms overflow an `f64` long
//! before the sizes the model is fed.

use crate::error::{Error, Result};

/// Expected number of distinct values among `draws` uniform draws from
/// `card` values: `card * (1 - (1 - 1/card)^draws)`.
pub fn buckets(card: f64, draws: f64) -> Result<f64> {
    if !(card >= 1.0) || !card.is_finite() {
        return Err(Error::InvalidCardinality(card));
    }
    if !(draws >= 0.0) {
        return Err(Error::InvalidArgs {
            urns: card,
            balls: draws,
        });
    }
    if draws == 0.0 {
        return Ok(0.0);
    }
    if card == 1.0 {
        return Ok(1.0);
    }
    let miss = draws * (-1.0 / card).ln_1p();
    Ok(-card * miss.exp_m1())
}

/// Expected number of urns holding exactly one ball when `balls >= urns`
/// balls fill `urns` urns and every urn holds at least one ball. Each urn is
/// seeded with one ball and the `balls - urns` surplus balls land uniformly:
/// `urns * ((urns - 1) / urns)^(balls - urns)`.
pub fn monobuckets(urns: f64, balls: f64) -> Result<f64> {
    if !(urns >= 1.0) || !(balls >= urns) || !balls.is_finite() {
        return Err(Error::InvalidArgs { urns, balls });
    }
    let surplus = balls - urns;
    if urns == 1.0 {
        return Ok(if surplus == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(urns * (surplus * (-1.0 / urns).ln_1p()).exp())
}
