//! Wall-clock benchmark of full inspections across concurrency levels.
//!
//! A run set is one untimed warm-up inspection, then `repetitions` serial
//! runs, then `repetitions` parallel runs at each requested concurrency. Every
//! timed run's report must equal the first timed run's report, so the
//! benchmark doubles as a determinism stress test.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::graph::{ElementKind, Graph};
use crate::inspector::{inspect, InspectConfig, StderrProgress};
use crate::report::TypeReport;

pub const DEFAULT_REPETITIONS: usize = 3;
pub const CSV_HEADER: [&str; 5] = ["kind", "mode", "concurrency", "trial", "elapsed_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Serial,
    Parallel,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Serial => "serial",
            Mode::Parallel => "parallel",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "serial" => Ok(Mode::Serial),
            "parallel" => Ok(Mode::Parallel),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// One timed inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub kind: ElementKind,
    pub mode: Mode,
    /// Worker count; 1 for serial runs.
    pub concurrency: usize,
    /// 1-based trial number within its configuration.
    pub trial: usize,
    pub elapsed_ms: u64,
}

/// Mean over the trials of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanRow {
    pub kind: ElementKind,
    pub mode: Mode,
    pub concurrency: usize,
    pub mean_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(
        "report of {mode} run (concurrency {concurrency}, trial {trial}) differs from the baseline"
    )]
    ReportMismatch {
        mode: Mode,
        concurrency: usize,
        trial: usize,
    },
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("concurrency must be at least 1")]
    ZeroConcurrency,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("benchmark CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("benchmark CSV line {line}: {message}")]
    Parse { line: u64, message: String },
}

impl BenchResult {
    /// Per-configuration means, in first-run order.
    pub fn means(&self) -> Vec<MeanRow> {
        let mut out: Vec<(MeanRow, usize)> = Vec::new();
        for row in &self.rows {
            let slot = out.iter_mut().find(|(m, _)| {
                m.kind == row.kind && m.mode == row.mode && m.concurrency == row.concurrency
            });
            match slot {
                Some((m, n)) => {
                    m.mean_ms += row.elapsed_ms as f64;
                    *n += 1;
                }
                None => out.push((
                    MeanRow {
                        kind: row.kind,
                        mode: row.mode,
                        concurrency: row.concurrency,
                        mean_ms: row.elapsed_ms as f64,
                    },
                    1,
                )),
            }
        }
        out.into_iter()
            .map(|(mut m, n)| {
                m.mean_ms /= n as f64;
                m
            })
            .collect()
    }

    pub fn mean(&self, kind: ElementKind, mode: Mode, concurrency: usize) -> Option<f64> {
        self.means()
            .into_iter()
            .find(|m| m.kind == kind && m.mode == mode && m.concurrency == concurrency)
            .map(|m| m.mean_ms)
    }

    /// Header, one row per run, then one `trial=mean` row per configuration.
    pub fn to_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.kind.as_str(),
                r.mode.as_str(),
                &r.concurrency.to_string(),
                &r.trial.to_string(),
                &r.elapsed_ms.to_string(),
            ])?;
        }
        for m in self.means() {
            w.write_record([
                m.kind.as_str(),
                m.mode.as_str(),
                &m.concurrency.to_string(),
                "mean",
                &format!("{:.3}", m.mean_ms),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), BenchError> {
        let file = std::fs::File::create(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.to_csv(file)
    }

    /// Parses CSV written by [`BenchResult::to_csv`], returning the per-run
    /// rows and the mean rows.
    pub fn read_csv<R: Read>(input: R) -> Result<(BenchResult, Vec<MeanRow>), BenchError> {
        let mut reader = csv::Reader::from_reader(input);
        let header = reader.headers()?.clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(BenchError::Parse {
                line: 1,
                message: format!("unexpected header {header:?}"),
            });
        }
        let mut rows = Vec::new();
        let mut means = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let bad = |message: String| BenchError::Parse { line, message };
            let kind: ElementKind = record[0].parse().map_err(bad)?;
            let mode: Mode = record[1].parse().map_err(bad)?;
            let concurrency: usize = record[2]
                .parse()
                .map_err(|e| bad(format!("concurrency: {e}")))?;
            if &record[3] == "mean" {
                let mean_ms = record[4].parse().map_err(|e| bad(format!("mean: {e}")))?;
                means.push(MeanRow {
                    kind,
                    mode,
                    concurrency,
                    mean_ms,
                });
            } else {
                rows.push(BenchRow {
                    kind,
                    mode,
                    concurrency,
                    trial: record[3].parse().map_err(|e| bad(format!("trial: {e}")))?,
                    elapsed_ms: record[4]
                        .parse()
                        .map_err(|e| bad(format!("elapsed_ms: {e}")))?,
                });
            }
        }
        Ok((BenchResult { rows }, means))
    }
}

/// Times full inspections of `kind`: a serial baseline, then parallel runs at
/// each of `concurrencies`, `repetitions` times each.
pub fn run_benchmark(
    graph: &Graph,
    kind: ElementKind,
    concurrencies: &[usize],
    repetitions: usize,
) -> Result<BenchResult, BenchError> {
    run_with(kind, concurrencies, repetitions, |config| {
        inspect(graph, kind, config, &StderrProgress)
    })
}

fn run_with<F>(
    kind: ElementKind,
    concurrencies: &[usize],
    repetitions: usize,
    mut run: F,
) -> Result<BenchResult, BenchError>
where
    F: FnMut(&InspectConfig) -> TypeReport,
{
    if repetitions == 0 {
        return Err(BenchError::NoRepetitions);
    }
    if concurrencies.contains(&0) {
        return Err(BenchError::ZeroConcurrency);
    }

    // untimed warm-up
    run(&InspectConfig::serial());

    let plan = std::iter::once((Mode::Serial, InspectConfig::serial()))
        .chain(
            concurrencies
                .iter()
                .map(|&c| (Mode::Parallel, InspectConfig::parallel(c))),
        )
        .collect::<Vec<_>>();

    let mut baseline: Option<TypeReport> = None;
    let mut rows = Vec::with_capacity(plan.len() * repetitions);
    for (mode, config) in &plan {
        for trial in 1..=repetitions {
            let started = Instant::now();
            let report = run(config);
            let elapsed = started.elapsed();
            let elapsed_ms = (elapsed.as_micros().div_ceil(1000) as u64).max(1);

            match &baseline {
                None => baseline = Some(report),
                Some(expected) if *expected != report => {
                    return Err(BenchError::ReportMismatch {
                        mode: *mode,
                        concurrency: config.workers(),
                        trial,
                    })
                }
                Some(_) => {}
            }
            rows.push(BenchRow {
                kind,
                mode: *mode,
                concurrency: config.workers(),
                trial,
                elapsed_ms,
            });
        }
    }
    Ok(BenchResult { rows })
}
