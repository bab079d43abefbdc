//! Pass/fail checks attached to each preset's report.

use std::collections::BTreeMap;

use crate::error::Result;

use super::config::ModelSpec;
use super::harness::{Example, Measurement};
use super::report::Check;
use super::stats::{fit_linear, mape, r_squared};

fn column(ms: &[&Measurement], f: impl Fn(&Measurement) -> f64) -> Vec<f64> {
    ms.iter().map(|m| f(m)).collect()
}

fn by_label(ms: &[Measurement]) -> BTreeMap<&str, Vec<&Measurement>> {
    let mut out: BTreeMap<&str, Vec<&Measurement>> = BTreeMap::new();
    for m in ms {
        out.entry(m.label.as_str()).or_default().push(m);
    }
    out
}

fn alt(m: &Measurement, name: &str) -> f64 {
    m.alt
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| *v)
        .unwrap_or(f64::NAN)
}

/// Mean relative error of a prediction against actual visits.
pub fn relative_error(ms: &[&Measurement], predicted: impl Fn(&Measurement) -> f64) -> f64 {
    let sum: f64 = ms
        .iter()
        .map(|m| (m.v as f64 - predicted(m)).abs() / m.v as f64)
        .sum();
    sum / ms.len() as f64
}

/// Fraction of an octave between the argmax positions of two curves sampled
/// at the same x positions. Ties resolve to the first maximum.
pub fn argmax_octaves(xs: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let arg = |ys: &[f64]| {
        ys.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &y)| if y > best.1 { (i, y) } else { best })
            .0
    };
    (xs[arg(a)].log2() - xs[arg(b)].log2()).abs()
}

/// R² of the best line through `(x, t)`, or NaN when it cannot be fitted.
pub fn r2_against_time(xs: &[f64], t: &[f64]) -> f64 {
    fit_linear(xs, t).map(|f| f.r_squared).unwrap_or(f64::NAN)
}

/// Visits-only checks hold everywhere; time checks are asserted only when
/// `timing` is set.
pub fn preset_checks(
    name: &str,
    examples: &[Example],
    ms: &[Measurement],
    timing: bool,
) -> Result<Vec<Check>> {
    let all: Vec<&Measurement> = ms.iter().collect();
    let v = column(&all, |m| m.v as f64);
    let v_hat = column(&all, |m| m.v_hat);
    let t = column(&all, |m| m.t_ms);
    let mut checks = Vec::new();
    match name {
        "uniform_accuracy" => {
            checks.push(Check::at_least("r2_v_vhat", r_squared(&v, &v_hat)?, 0.95, true));
            checks.push(Check::at_most("mape_v_vhat", mape(&v, &v_hat)?, 0.10, true));
            checks.push(Check::at_least("r2_t_v", r2_against_time(&v, &t), 0.80, timing));
            checks.push(Check::at_least("r2_t_vhat", r2_against_time(&v_hat, &t), 0.75, timing));
        }
        "dimensionality_sweep" => {
            for (label, group) in by_label(ms) {
                let gv = column(&group, |m| m.v as f64);
                let gp = column(&group, |m| m.v_hat);
                checks.push(Check::at_least(&format!("r2_v_vhat[{label}]"), r_squared(&gv, &gp)?, 0.90, true));
                if group[0].dims >= 7 {
                    let gt = column(&group, |m| m.t_ms);
                    let model = r2_against_time(&gp, &gt);
                    let naive = r2_against_time(&column(&group, |m| m.mean_sel_1), &gt)
                        .max(r2_against_time(&column(&group, |m| m.card_1), &gt));
                    checks.push(Check::above(
                        &format!("r2_t_vhat_minus_best_naive[{label}]"),
                        model - naive,
                        0.0,
                        true,
                    ));
                }
            }
        }
        "correlation" => {
            let open3 = |ex: &Example, correct: bool| -> Result<f64> {
                let p = ex.predict(&ModelSpec::Uniform {
                    correct_correlation: correct,
                })?;
                Ok(p.visits[2] - p.mono[2])
            };
            let actual: Vec<f64> = ms
                .iter()
                .map(|m| m.actual_depths[2] as f64 - m.actual_mono[2] as f64)
                .collect();
            let corrected = examples.iter().map(|e| open3(e, true)).collect::<Result<Vec<_>>>()?;
            let apparent = examples.iter().map(|e| open3(e, false)).collect::<Result<Vec<_>>>()?;
            checks.push(Check::at_most("mape_open3_corrected", mape(&actual, &corrected)?, 0.15, true));
            checks.push(Check::at_least("mape_open3_uncorrected", mape(&actual, &apparent)?, 0.50, true));
        }
        "histogram_bias" => {
            let groups = by_label(ms);
            let err = |label: &str, f: &dyn Fn(&Measurement) -> f64| relative_error(&groups[label], f);
            let adj0 = err("bias=0", &|m| m.v_hat);
            let adj45 = err("bias=0.45", &|m| m.v_hat);
            let raw0 = err("bias=0", &|m| alt(m, "uniform"));
            let raw45 = err("bias=0.45", &|m| alt(m, "uniform"));
            checks.push(Check::at_most("adjusted_error_ratio", adj45 / adj0, 2.0, true));
            checks.push(Check::at_least("unadjusted_error_ratio", raw45 / raw0, 3.0, true));
        }
        "binomial_skew" => {
            let groups = by_label(ms);
            let skewed = &groups["skew=1"];
            let wins = skewed
                .iter()
                .filter(|m| {
                    let v = m.v as f64;
                    (v - alt(m, "correct_b5")).abs() < (v - alt(m, "placebo_b5")).abs()
                })
                .count();
            checks.push(Check::above(
                "correct_beats_placebo_share",
                wins as f64 / skewed.len() as f64,
                0.5,
                true,
            ));
        }
        "cardinality_sweep" => {
            let xs = column(&all, |m| m.card_1);
            let k = ms.first().map_or(0, |m| m.dims);
            for d in 2..=k {
                let a = column(&all, |m| m.actual_depths[d] as f64);
                let p = column(&all, |m| m.predicted_depths[d]);
                checks.push(Check::at_most(&format!("argmax_octaves[depth {}]", d + 1), argmax_octaves(&xs, &p, &a), 1.0, true));
            }
        }
        _ => {}
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octave_distance() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(argmax_octaves(&xs, &[0.0, 5.0, 1.0, 0.0], &[0.0, 1.0, 5.0, 0.0]), 1.0);
        assert_eq!(argmax_octaves(&xs, &[9.0, 5.0, 1.0, 0.0], &[0.0, 1.0, 5.0, 9.0]), 3.0);
    }
}
