//! CSV and JSON reports.
//!
//! Files written by [`emit_reports`], with stable column order:
//!
//! * `summary.csv`: `metric,mean,std,best,worst`, one row per metric;
//!   `undefined` where no run produced a value.
//! * `runs.csv`: `run,seed,fitness,error_rate,accuracy,sensitivity,specificity,selected_count,total_features,correct,total,mask`.
//! * `convergence.csv`: `iteration,run_0,...,run_{R-1}`, one row per iteration.
//! * `timings.csv`: `run,seed,wall_time_s`. Kept apart from `runs.csv` so that
//!   file is a pure function of configuration and seed.
//! * `config.json`: the resolved configuration.
//!
//! Floats are written in Rust's shortest round-trip form.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::Variant;
use super::runner::{Experiment, RunRecord};
use super::stats::{Metric, MetricStats, SummaryStats};

const UNDEFINED: &str = "undefined";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |x| x.to_string())
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_summary(stats: &SummaryStats, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["metric", "mean", "std", "best", "worst"])?;
    for (metric, s) in &stats.metrics {
        let cells: [String; 4] = match s {
            Some(s) => [s.mean, s.std, s.best, s.worst].map(|x| x.to_string()),
            None => std::array::from_fn(|_| UNDEFINED.to_string()),
        };
        w.write_record(std::iter::once(metric.name().to_string()).chain(cells))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<SummaryStats> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut metrics = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let metric = Metric::from_name(&rec[0])
            .ok_or_else(|| Error::Config(format!("unknown metric {:?}", &rec[0])))?;
        if &rec[1] == UNDEFINED {
            metrics.push((metric, None));
            continue;
        }
        let num = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {:?} in summary", &rec[i])))
        };
        metrics.push((
            metric,
            Some(MetricStats {
                mean: num(1)?,
                std: num(2)?,
                best: num(3)?,
                worst: num(4)?,
            }),
        ));
    }
    Ok(SummaryStats { metrics })
}

pub fn write_runs(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "run",
        "seed",
        "fitness",
        "error_rate",
        "accuracy",
        "sensitivity",
        "specificity",
        "selected_count",
        "total_features",
        "correct",
        "total",
        "mask",
    ])?;
    for r in records {
        let b = &r.best;
        w.write_record([
            r.run_index.to_string(),
            r.seed.to_string(),
            b.fitness.to_string(),
            b.error_rate.to_string(),
            b.accuracy.to_string(),
            opt(b.sensitivity),
            opt(b.specificity),
            b.selected_count.to_string(),
            b.total_features.to_string(),
            b.correct.to_string(),
            b.total.to_string(),
            b.mask.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn write_convergence(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let header = std::iter::once("iteration".to_string())
        .chain(records.iter().map(|r| format!("run_{}", r.run_index)));
    w.write_record(header)?;
    let iterations = records
        .iter()
        .map(|r| r.convergence.len())
        .max()
        .unwrap_or(0);
    for it in 0..iterations {
        let row = std::iter::once((it + 1).to_string()).chain(records.iter().map(|r| {
            r.convergence
                .get(it)
                .map_or_else(String::new, |f| f.to_string())
        }));
        w.write_record(row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn write_timings(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["run", "seed", "wall_time_s"])?;
    for r in records {
        w.write_record([
            r.run_index.to_string(),
            r.seed.to_string(),
            r.wall_time_secs.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Writes every report for one experiment into `out_dir`, creating it if needed.
pub fn emit_reports(exp: &Experiment, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if exp.records.is_empty() {
        return Err(Error::Config("no runs to report".into()));
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let paths: Vec<PathBuf> = [
        "summary.csv",
        "runs.csv",
        "convergence.csv",
        "timings.csv",
        "config.json",
    ]
    .iter()
    .map(|f| out_dir.join(f))
    .collect();
    write_summary(&exp.stats, &paths[0])?;
    write_runs(&exp.records, &paths[1])?;
    write_convergence(&exp.records, &paths[2])?;
    write_timings(&exp.records, &paths[3])?;
    let json = serde_json::to_string_pretty(&exp.config.to_json()).expect("json value serializes");
    fs::write(&paths[4], json + "\n").map_err(io_err(&paths[4]))?;
    Ok(paths)
}

/// Metrics shown side by side by `compare`. Time is left out so that the
/// table depends only on configuration and seeds.
pub const COMPARE_METRICS: [Metric; 5] = [
    Metric::Accuracy,
    Metric::Sensitivity,
    Metric::Specificity,
    Metric::Fitness,
    Metric::SelectedCount,
];

/// Rows of the comparison table: a header, then one row per metric with a
/// `mean,std` column pair per variant.
pub fn compare_table(results: &[(Variant, SummaryStats)]) -> Vec<Vec<String>> {
    let mut header = vec!["metric".to_string()];
    for (v, _) in results {
        header.push(format!("{v}_mean"));
        header.push(format!("{v}_std"));
    }
    let mut rows = vec![header];
    for m in COMPARE_METRICS {
        let mut row = vec![m.name().to_string()];
        for (_, stats) in results {
            match stats.get(m) {
                Some(s) => {
                    row.push(s.mean.to_string());
                    row.push(s.std.to_string());
                }
                None => {
                    row.push(UNDEFINED.into());
                    row.push(UNDEFINED.into());
                }
            }
        }
        rows.push(row);
    }
    rows
}

pub fn write_compare(results: &[(Variant, SummaryStats)], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    for row in compare_table(results) {
        w.write_record(row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}
