//! Plot-ready exports of experiment tables and sweep grids.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::experiment::ExperimentResult;
use super::sweep::SweepGrid;
use crate::error::{Error, Result};
use crate::model::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

impl std::str::FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            _ => Err(Error::config(format!("unknown format {:?} (expected csv or json)", s))),
        }
    }
}

/// Anything `emit` can export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlotSource {
    Grid(SweepGrid),
    Experiment(Box<ExperimentResult>),
}

pub const GRID_HEADER: [&str; 3] = ["gamma", "gamma_hat", "score"];
pub const TABLE_HEADER: [&str; 6] = ["problem", "gamma_hat", "algorithm", "metric", "statistic", "value"];

/// Writes `gamma, gamma_hat, score` triples, row-major over the grid.
pub fn write_grid_csv<W: Write>(grid: &SweepGrid, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(GRID_HEADER)?;
    for (g, row) in grid.gamma_axis.iter().zip(&grid.scores) {
        for (h, s) in grid.gamma_hat_axis.iter().zip(row) {
            out.write_record([fmt_f64(*g), fmt_f64(*h), fmt_f64(*s)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Axes and scores recovered from grid triples.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTriples {
    pub gamma_axis: Vec<f64>,
    pub gamma_hat_axis: Vec<f64>,
    pub scores: Vec<Vec<f64>>,
}

pub fn read_grid_csv<R: Read>(reader: R) -> Result<GridTriples> {
    let mut input = csv::Reader::from_reader(reader);
    if input.headers()?.iter().collect::<Vec<_>>() != GRID_HEADER {
        return Err(Error::config("grid CSV must have columns gamma, gamma_hat, score"));
    }
    let mut triples = Vec::new();
    for rec in input.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::config(format!("bad number in grid row {:?}", rec)))
        };
        triples.push((parse(0)?, parse(1)?, parse(2)?));
    }
    let mut gamma_axis: Vec<f64> = Vec::new();
    let mut gamma_hat_axis: Vec<f64> = Vec::new();
    for (g, h, _) in &triples {
        if !gamma_axis.contains(g) {
            gamma_axis.push(*g);
        }
        if !gamma_hat_axis.contains(h) {
            gamma_hat_axis.push(*h);
        }
    }
    if triples.len() != gamma_axis.len() * gamma_hat_axis.len() {
        return Err(Error::config("grid CSV is not rectangular"));
    }
    let mut scores = vec![vec![f64::NAN; gamma_hat_axis.len()]; gamma_axis.len()];
    for (k, (g, h, s)) in triples.iter().enumerate() {
        let (i, j) = (k / gamma_hat_axis.len(), k % gamma_hat_axis.len());
        if gamma_axis[i] != *g || gamma_hat_axis[j] != *h {
            return Err(Error::config("grid CSV rows are not in row-major order"));
        }
        scores[i][j] = *s;
    }
    Ok(GridTriples { gamma_axis, gamma_hat_axis, scores })
}

/// One row per (problem, setting, algorithm, metric, statistic).
pub fn write_table_csv<W: Write>(result: &ExperimentResult, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(TABLE_HEADER)?;
    for r in &result.summary {
        let label = r
            .setting
            .map(|s| result.settings[s].gamma_hat.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        for (stat, value) in [("mean", r.mean), ("std", r.std)] {
            out.write_record([
                r.problem.clone(),
                label.clone(),
                r.algorithm.to_string(),
                r.metric.to_string(),
                stat.to_string(),
                fmt_f64(value),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn emit_plot_data<W: Write>(source: &PlotSource, format: EmitFormat, mut writer: W) -> Result<()> {
    match (source, format) {
        (PlotSource::Grid(g), EmitFormat::Csv) => write_grid_csv(g, writer),
        (PlotSource::Experiment(e), EmitFormat::Csv) => write_table_csv(e, writer),
        (source, EmitFormat::Json) => {
            serde_json::to_writer_pretty(&mut writer, source)?;
            writer.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> SweepGrid {
        let axis: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        SweepGrid {
            problem: "t".into(),
            gamma_axis: axis.clone(),
            gamma_hat_axis: axis.clone(),
            party: None,
            c: 2.0,
            population_sizes: vec![3; n],
            scores: axis.iter().map(|g| axis.iter().map(|h| (g * 7.0 + h / 3.0).sin().abs()).collect()).collect(),
        }
    }

    #[test]
    fn ten_by_ten_grid_has_hundred_rows_and_round_trips() {
        let g = grid(10);
        let mut buf = Vec::new();
        write_grid_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 101);
        let back = read_grid_csv(buf.as_slice()).unwrap();
        assert_eq!(back.gamma_axis, g.gamma_axis);
        assert_eq!(back.gamma_hat_axis, g.gamma_hat_axis);
        assert_eq!(back.scores, g.scores);
    }

    #[test]
    fn json_source_round_trips() {
        let source = PlotSource::Grid(grid(3));
        let mut buf = Vec::new();
        emit_plot_data(&source, EmitFormat::Json, &mut buf).unwrap();
        let back: PlotSource = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, source);
    }

    #[test]
    fn rejects_ragged_grid() {
        let text = "gamma,gamma_hat,score\n0.1,0.1,1\n0.1,0.2,1\n0.2,0.1,1\n";
        assert!(read_grid_csv(text.as_bytes()).is_err());
    }
}
