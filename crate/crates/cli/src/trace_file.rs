//! Line-oriented trace files.
//!
//! A trace starts with `# key: value` header lines followed by one row per
//! iteration with the columns `s best mean worst incumbent lambda`,
//! separated by single spaces. Floats are written in their shortest
//! round-trip form, so a trace read back yields bit-identical values.

use std::fmt::Write as _;
use std::path::Path;

use qap_core::{Algorithm, Assignment, IterationTrace};

pub const COLUMNS: &str = "s best mean worst incumbent lambda";
pub const EXTENSION: &str = "trace";

/// Identity and outcome of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta {
    pub instance: String,
    pub algorithm: Algorithm,
    pub replication: usize,
    pub seed: u64,
    pub n: usize,
    pub best_cost: i64,
    pub best_assignment: Assignment,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub meta: TraceMeta,
    pub trace: Vec<IterationTrace>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TraceError {
    pub line: usize,
    pub message: String,
}

impl RunRecord {
    /// `{instance}__{algorithm}__r{replication:03}.trace`
    pub fn file_name(&self) -> String {
        file_name(
            &self.meta.instance,
            self.meta.algorithm,
            self.meta.replication,
        )
    }

    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        let _ = writeln!(out, "# instance: {}", m.instance);
        let _ = writeln!(out, "# algorithm: {}", m.algorithm);
        let _ = writeln!(out, "# replication: {}", m.replication);
        let _ = writeln!(out, "# seed: {}", m.seed);
        let _ = writeln!(out, "# n: {}", m.n);
        let _ = writeln!(out, "# best_cost: {}", m.best_cost);
        let _ = writeln!(out, "# best_assignment: {}", m.best_assignment);
        let _ = writeln!(out, "# wall_time: {}", m.wall_time);
        let _ = writeln!(out, "# columns: {COLUMNS}");
        for t in &self.trace {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                t.iteration, t.best, t.mean, t.worst, t.incumbent, t.lambda
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut header = Header::default();
        let mut trace = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| TraceError { line, message };
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            if let Some(rest) = raw.strip_prefix('#') {
                let (key, value) = rest
                    .split_once(':')
                    .ok_or_else(|| err(format!("malformed header {raw:?}")))?;
                header.set(key.trim(), value.trim()).map_err(err)?;
                continue;
            }
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(err(format!("expected 6 columns, found {}", fields.len())));
            }
            let int = |i: usize| {
                fields[i]
                    .parse::<i64>()
                    .map_err(|e| err(format!("column {}: {e}", i + 1)))
            };
            let float = |i: usize| {
                fields[i]
                    .parse::<f64>()
                    .map_err(|e| err(format!("column {}: {e}", i + 1)))
            };
            let iteration = fields[0]
                .parse::<usize>()
                .map_err(|e| err(format!("column 1: {e}")))?;
            if iteration != trace.len() + 1 {
                return Err(err(format!(
                    "iteration {iteration} out of sequence, expected {}",
                    trace.len() + 1
                )));
            }
            trace.push(IterationTrace {
                iteration,
                best: int(1)?,
                mean: float(2)?,
                worst: int(3)?,
                incumbent: int(4)?,
                lambda: float(5)?,
            });
        }
        let meta = header.finish().map_err(|message| TraceError {
            line: text.lines().count(),
            message,
        })?;
        if trace.is_empty() {
            return Err(TraceError {
                line: text.lines().count(),
                message: "trace has no iterations".into(),
            });
        }
        Ok(Self { meta, trace })
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        use anyhow::Context;
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("corrupt trace {}", path.display()))
    }
}

pub fn file_name(instance: &str, algorithm: Algorithm, replication: usize) -> String {
    format!("{instance}__{algorithm}__r{replication:03}.{EXTENSION}")
}

#[derive(Default)]
struct Header {
    instance: Option<String>,
    algorithm: Option<Algorithm>,
    replication: Option<usize>,
    seed: Option<u64>,
    n: Option<usize>,
    best_cost: Option<i64>,
    best_assignment: Option<Assignment>,
    wall_time: Option<f64>,
}

impl Header {
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e| format!("header {key}: {e}"))
        }
        match key {
            "instance" => self.instance = Some(value.to_string()),
            "algorithm" => {
                self.algorithm = Some(
                    value
                        .parse()
                        .map_err(|e| format!("header algorithm: {e}"))?,
                )
            }
            "replication" => self.replication = Some(num(key, value)?),
            "seed" => self.seed = Some(num(key, value)?),
            "n" => self.n = Some(num(key, value)?),
            "best_cost" => self.best_cost = Some(num(key, value)?),
            "wall_time" => self.wall_time = Some(num(key, value)?),
            "best_assignment" => {
                let perm = value
                    .split_whitespace()
                    .map(|t| num::<usize>(key, t))
                    .collect::<Result<Vec<_>, _>>()?;
                self.best_assignment = Some(
                    Assignment::new(perm).map_err(|e| format!("header best_assignment: {e}"))?,
                );
            }
            "columns" => {
                if value.split_whitespace().ne(COLUMNS.split_whitespace()) {
                    return Err(format!("unsupported columns {value:?}"));
                }
            }
            _ => return Err(format!("unknown header {key:?}")),
        }
        Ok(())
    }

    fn finish(self) -> Result<TraceMeta, String> {
        fn need<T>(v: Option<T>, key: &str) -> Result<T, String> {
            v.ok_or_else(|| format!("missing header {key:?}"))
        }
        let meta = TraceMeta {
            instance: need(self.instance, "instance")?,
            algorithm: need(self.algorithm, "algorithm")?,
            replication: need(self.replication, "replication")?,
            seed: need(self.seed, "seed")?,
            n: need(self.n, "n")?,
            best_cost: need(self.best_cost, "best_cost")?,
            best_assignment: need(self.best_assignment, "best_assignment")?,
            wall_time: need(self.wall_time, "wall_time")?,
        };
        if meta.best_assignment.len() != meta.n {
            return Err(format!(
                "best_assignment has {} entries, n is {}",
                meta.best_assignment.len(),
                meta.n
            ));
        }
        Ok(meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunRecord {
        RunRecord {
            meta: TraceMeta {
                instance: "tiny".into(),
                algorithm: Algorithm::GaPso,
                replication: 3,
                seed: u64::MAX,
                n: 3,
                best_cost: 40,
                best_assignment: Assignment::new(vec![2, 0, 1]).unwrap(),
                wall_time: 0.1 + 0.2,
            },
            trace: vec![
                IterationTrace {
                    iteration: 1,
                    best: 44,
                    mean: 1.0 / 3.0 + 50.0,
                    worst: 60,
                    incumbent: 44,
                    lambda: 1.234e-7,
                },
                IterationTrace {
                    iteration: 2,
                    best: 40,
                    mean: 47.5,
                    worst: 58,
                    incumbent: 40,
                    lambda: 3e-5,
                },
            ],
        }
    }

    #[test]
    fn round_trips_bit_for_bit() {
        let rec = sample();
        assert_eq!(rec.file_name(), "tiny__ga-pso__r003.trace");
        assert_eq!(RunRecord::parse(&rec.to_text()).unwrap(), rec);
    }

    #[test]
    fn corrupt_rows_are_located() {
        let text = sample().to_text().replace("2 40 47.5", "2 forty 47.5");
        let err = RunRecord::parse(&text).unwrap_err();
        assert_eq!(err.line, 11);
        assert!(err.message.contains("column 2"));
        let missing = sample()
            .to_text()
            .replace("# seed: 18446744073709551615\n", "");
        assert!(RunRecord::parse(&missing)
            .unwrap_err()
            .message
            .contains("seed"));
    }
}
