use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::harness::Measurement;
use super::stats::{fit_linear, metrics, Metrics, RegressionFit};

/// Outcome of one pass/fail check on an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable condition, e.g. `>= 0.95`.
    pub condition: String,
    pub passed: bool,
    /// Informational checks never fail a run.
    pub asserted: bool,
}

impl Check {
    pub fn at_least(name: &str, value: f64, bound: f64, asserted: bool) -> Self {
        Check {
            name: name.into(),
            value,
            condition: format!(">= {bound}"),
            passed: value >= bound,
            asserted,
        }
    }

    pub fn above(name: &str, value: f64, bound: f64, asserted: bool) -> Self {
        Check {
            name: name.into(),
            value,
            condition: format!("> {bound}"),
            passed: value > bound,
            asserted,
        }
    }

    pub fn at_most(name: &str, value: f64, bound: f64, asserted: bool) -> Self {
        Check {
            name: name.into(),
            value,
            condition: format!("<= {bound}"),
            passed: value <= bound,
            asserted,
        }
    }

    pub fn failed(&self) -> bool {
        self.asserted && !self.passed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineInfo {
    pub os: String,
    pub arch: String,
    pub cpus: usize,
    pub load_1m: Option<f64>,
}

impl MachineInfo {
    pub fn detect() -> Self {
        let load_1m = fs::read_to_string("/proc/loadavg")
            .ok()
            .and_then(|s| s.split_whitespace().next()?.parse().ok());
        MachineInfo {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            cpus: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            load_1m,
        }
    }

    /// Load average below a quarter of the cores, leaving room for the
    /// single timing thread. Unknown load counts as noisy.
    pub fn is_quiet(&self) -> bool {
        self.load_1m
            .is_some_and(|l| l <= (0.25 * self.cpus as f64).max(0.5))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub examples: usize,
    pub visits: Option<Metrics>,
}

/// Machine-specific time-per-visit coefficients from the reference study.
/// Recorded for comparison, never asserted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFit {
    pub a_ms_per_visit: f64,
    pub b_ms: f64,
}

pub const REFERENCE_FIT: ReferenceFit = ReferenceFit {
    a_ms_per_visit: 1.22e-5,
    b_ms: 15.3,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub name: String,
    pub scale: f64,
    pub seed: u64,
    pub repetitions: usize,
    pub examples: usize,
    pub timing_mode: bool,
    pub quiet_machine: bool,
    pub machine: MachineInfo,
    /// `v` against `v_hat` over all examples.
    pub visits: Option<Metrics>,
    pub fit_t_v: Option<RegressionFit>,
    pub fit_t_vhat: Option<RegressionFit>,
    pub groups: Vec<GroupSummary>,
    pub checks: Vec<Check>,
    pub reference_fit: ReferenceFit,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub measurements: Vec<Measurement>,
}

impl EvalReport {
    pub fn new(
        config: &ExperimentConfig,
        measurements: Vec<Measurement>,
        checks: Vec<Check>,
        timing_mode: bool,
        machine: MachineInfo,
    ) -> Self {
        let v: Vec<f64> = measurements.iter().map(|m| m.v as f64).collect();
        let v_hat: Vec<f64> = measurements.iter().map(|m| m.v_hat).collect();
        let t: Vec<f64> = measurements.iter().map(|m| m.t_ms).collect();
        let timed = t.iter().all(|x| x.is_finite());
        let mut groups: BTreeMap<&str, Vec<&Measurement>> = BTreeMap::new();
        for m in &measurements {
            groups.entry(m.label.as_str()).or_default().push(m);
        }
        let groups = groups
            .into_iter()
            .map(|(label, ms)| {
                let v: Vec<f64> = ms.iter().map(|m| m.v as f64).collect();
                let p: Vec<f64> = ms.iter().map(|m| m.v_hat).collect();
                GroupSummary {
                    label: label.to_string(),
                    examples: ms.len(),
                    visits: metrics(&v, &p).ok(),
                }
            })
            .collect();
        EvalReport {
            name: config.name.clone(),
            scale: config.scale,
            seed: config.seed,
            repetitions: config.repetitions,
            examples: measurements.len(),
            timing_mode,
            quiet_machine: machine.is_quiet(),
            machine,
            visits: metrics(&v, &v_hat).ok(),
            fit_t_v: timed.then(|| fit_linear(&v, &t).ok()).flatten(),
            fit_t_vhat: timed.then(|| fit_linear(&v_hat, &t).ok()).flatten(),
            groups,
            checks,
            reference_fit: REFERENCE_FIT,
            config: config.clone(),
            measurements,
        }
    }

    pub fn all_asserted_pass(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }
}

const COLUMNS: [&str; 15] = [
    "example",
    "label",
    "dims",
    "rows",
    "queries",
    "card_1",
    "mean_sel_1",
    "t_ms",
    "v",
    "v_hat",
    "actual_depths",
    "predicted_depths",
    "actual_mono",
    "predicted_mono",
    "alt",
];

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn split<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|x| x.parse().map_err(|_| Error::Format(format!("bad list item {x:?}"))))
        .collect()
}

pub fn write_measurements_csv<W: Write>(ms: &[Measurement], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(COLUMNS)?;
    for m in ms {
        let alt: Vec<String> = m.alt.iter().map(|(n, v)| format!("{n}={v}")).collect();
        out.write_record([
            m.example.to_string(),
            m.label.clone(),
            m.dims.to_string(),
            m.rows.to_string(),
            m.queries.to_string(),
            m.card_1.to_string(),
            m.mean_sel_1.to_string(),
            m.t_ms.to_string(),
            m.v.to_string(),
            m.v_hat.to_string(),
            join(&m.actual_depths),
            join(&m.predicted_depths),
            join(&m.actual_mono),
            join(&m.predicted_mono),
            alt.join(";"),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_measurements_csv<R: Read>(reader: R) -> Result<Vec<Measurement>> {
    let mut rdr = csv::Reader::from_reader(reader);
    if rdr.headers()?.iter().ne(COLUMNS) {
        return Err(Error::Format("unexpected measurement columns".into()));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            f(i).parse().map_err(|_| Error::Format(format!("bad number {:?}", f(i))))
        };
        let int = |i: usize| -> Result<u64> {
            f(i).parse().map_err(|_| Error::Format(format!("bad integer {:?}", f(i))))
        };
        let alt = if f(14).is_empty() {
            Vec::new()
        } else {
            f(14)
                .split(';')
                .map(|kv| {
                    let (k, v) = kv
                        .rsplit_once('=')
                        .ok_or_else(|| Error::Format(format!("bad alt entry {kv:?}")))?;
                    let v = v.parse().map_err(|_| Error::Format(format!("bad alt value {v:?}")))?;
                    Ok((k.to_string(), v))
                })
                .collect::<Result<Vec<_>>>()?
        };
        out.push(Measurement {
            example: int(0)? as usize,
            label: f(1).to_string(),
            dims: int(2)? as usize,
            rows: int(3)? as usize,
            queries: int(4)? as usize,
            card_1: num(5)?,
            mean_sel_1: num(6)?,
            t_ms: num(7)?,
            v: int(8)?,
            v_hat: num(9)?,
            actual_depths: split(f(10))?,
            predicted_depths: split(f(11))?,
            actual_mono: split(f(12))?,
            predicted_mono: split(f(13))?,
            alt,
        });
    }
    Ok(out)
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.json`.
pub fn emit_report(report: &EvalReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", report.name));
    let json_path = dir.join(format!("{}.json", report.name));
    write_measurements_csv(&report.measurements, fs::File::create(&csv_path)?)?;
    fs::write(&json_path, serde_json::to_string_pretty(report)?)?;
    Ok((csv_path, json_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(i: usize) -> Measurement {
        Measurement {
            example: i,
            label: "k=3".into(),
            dims: 3,
            rows: 100,
            queries: 10,
            card_1: 12.0,
            mean_sel_1: 0.5123456789,
            t_ms: 1.0 / 3.0 + i as f64,
            v: 1000 + i as u64,
            v_hat: 998.25 + 2.0 * i as f64,
            actual_depths: vec![10, 200, 300, 490 + i as u64],
            predicted_depths: vec![10.0, 199.5, 301.0, 487.75],
            actual_mono: vec![0, 5, 100],
            predicted_mono: vec![0.0, 4.0, 101.0],
            alt: vec![("uniform".into(), 1234.5), ("placebo_b5".into(), 0.1)],
        }
    }

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            name: "unit".into(),
            scale: 0.4,
            seed: 1,
            repetitions: 5,
            examples: vec![],
        }
    }

    #[test]
    fn csv_round_trip() {
        let ms: Vec<Measurement> = (0..4).map(sample).collect();
        let mut buf = Vec::new();
        write_measurements_csv(&ms, &mut buf).unwrap();
        assert_eq!(read_measurements_csv(&buf[..]).unwrap(), ms);
    }

    #[test]
    fn empty_report() {
        let dir = tempfile::tempdir().unwrap();
        let report = EvalReport::new(&config(), vec![], vec![], false, MachineInfo::detect());
        let (csv_path, json_path) = emit_report(&report, dir.path()).unwrap();
        let text = fs::read_to_string(csv_path).unwrap();
        assert_eq!(text.lines().count(), 1);
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(json_path).unwrap()).unwrap();
        assert_eq!(json["examples"], 0);
        assert_eq!(json["scale"], 0.4);
        assert!(json["visits"].is_null());
    }

    #[test]
    fn one_row_per_example_and_fits() {
        let ms: Vec<Measurement> = (0..6).map(sample).collect();
        let report = EvalReport::new(&config(), ms, vec![], false, MachineInfo::detect());
        let dir = tempfile::tempdir().unwrap();
        let (csv_path, _) = emit_report(&report, dir.path()).unwrap();
        let back = read_measurements_csv(fs::File::open(csv_path).unwrap()).unwrap();
        assert_eq!(back.len(), 6);
        let fit = report.fit_t_v.unwrap();
        assert!((fit.a - 1.0).abs() < 1e-9);
        assert_eq!(report.groups.len(), 1);
    }

    #[test]
    fn informational_checks_never_fail() {
        let soft = Check::at_least("x", 0.1, 0.8, false);
        let hard = Check::at_most("y", 0.5, 0.1, true);
        assert!(!soft.passed && !soft.failed());
        assert!(hard.failed());
    }
}
