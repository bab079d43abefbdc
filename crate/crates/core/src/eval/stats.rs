use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line `y = a*x + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub a: f64,
    pub b: f64,
    pub residuals: Vec<f64>,
    pub ss_res: f64,
    pub r_squared: f64,
}

impl RegressionFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.a * x + self.b
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Result<RegressionFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            found: xs.len(),
        });
    }
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let residuals: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - (a * x + b)).collect();
    let ss_res = residuals.iter().map(|r| r * r).sum();
    let fitted: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
    Ok(RegressionFit {
        a,
        b,
        residuals,
        ss_res,
        r_squared: r_squared(ys, &fitted)?,
    })
}

/// `1 - SS_res / SS_tot` of `predicted` as a model of `actual`.
pub fn r_squared(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let m = mean(actual);
    let ss_tot: f64 = actual.iter().map(|a| (a - m).powi(2)).sum();
    let ss_res: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).powi(2)).sum();
    if ss_tot == 0.0 {
        return Ok(if ss_res == 0.0 { 1.0 } else { f64::NEG_INFINITY });
    }
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let mut sum = 0.0;
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        if *a == 0.0 {
            return Err(Error::ZeroActual(i));
        }
        sum += ((a - p) / a).abs();
    }
    Ok(sum / actual.len() as f64)
}

/// Sample standard deviation over mean.
pub fn coefficient_of_variation(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt() / m
}

fn check_lengths(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch(actual.len(), predicted.len()));
    }
    if actual.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: actual.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub r_squared: f64,
    pub mape: f64,
    pub cv: f64,
}

pub fn metrics(actual: &[f64], predicted: &[f64]) -> Result<Metrics> {
    Ok(Metrics {
        r_squared: r_squared(actual, predicted)?,
        mape: mape(actual, predicted)?,
        cv: coefficient_of_variation(actual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 5.0).collect();
        let fit = fit_linear(&xs, &ys).unwrap();
        assert!((fit.a - 2.0).abs() < 1e-12 && (fit.b - 5.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_response() {
        let fit = fit_linear(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(fit.a, 0.0);
        assert_eq!(fit.b, 4.0);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_linear(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::DegenerateDesign)));
        assert!(matches!(fit_linear(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn metric_examples() {
        let m = metrics(&[10.0, 20.0], &[10.0, 20.0]).unwrap();
        assert_eq!((m.r_squared, m.mape), (1.0, 0.0));
        assert!((mape(&[10.0, 20.0], &[11.0, 18.0]).unwrap() - 0.10).abs() < 1e-12);
        assert!(matches!(mape(&[0.0, 1.0], &[1.0, 1.0]), Err(Error::ZeroActual(0))));
        assert!((coefficient_of_variation(&[1.0, 3.0]) - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn fit_minimises_squares(
            pts in prop::collection::vec((0.0f64..1e4, -1e3f64..1e3), 3..40),
            da in -1.0f64..1.0, db in -1.0f64..1.0,
        ) {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            prop_assume!(xs.iter().any(|x| (x - xs[0]).abs() > 1e-3));
            let fit = fit_linear(&xs, &ys).unwrap();
            let ss = |a: f64, b: f64| xs.iter().zip(&ys).map(|(x, y)| (y - a * x - b).powi(2)).sum::<f64>();
            let recomputed = ss(fit.a, fit.b);
            prop_assert!((recomputed - fit.ss_res).abs() <= 1e-9 * recomputed.max(1.0));
            prop_assert!(ss(fit.a + da * 1e-3, fit.b + db) >= fit.ss_res * (1.0 - 1e-9));
            prop_assert!(fit.r_squared <= 1.0 + 1e-12);
        }
    }
}
