// Copyright (c) 2026 The bbrsim Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

//! Report aggregation: walks an output tree, reads each run's
//! `config.toml` + `summary.csv` pair, and renders per-scenario
//! comparison tables (cases down, algorithms across).
//!
//! Runs that differ only by seed are averaged.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{ExperimentConfig, HarnessError, Scenario};
use crate::cc::CcAlgo;

/// One run's identity and headline metrics.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub scenario: String,
    pub case: u32,
    pub algo: String,
    pub loss: f64,
    pub seed: u64,
    pub jain: f64,
    pub ratio: f64,
    pub util: f64,
    pub mean_owd_ms: f64,
    pub loss_rate: f64,
    /// Per-flow average rates in bits/s, flow order.
    pub flow_rates_bps: Vec<f64>,
}

/// Recursively gathers every run directory under `root`. A run
/// directory is one holding both `config.toml` and `summary.csv`.
pub fn collect(root: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let mut records = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let config_path = dir.join("config.toml");
        let summary_path = dir.join("summary.csv");
        if config_path.is_file() && summary_path.is_file() {
            records.push(read_record(&config_path, &summary_path)?);
            continue;
        }
        let entries = fs::read_dir(&dir)?;
        let mut children: Vec<PathBuf> = entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        children.sort();
        stack.extend(children);
    }
    records.sort_by(|a, b| {
        (&a.scenario, a.case, float_key(a.loss), &a.algo, a.seed).partial_cmp(&(
            &b.scenario,
            b.case,
            float_key(b.loss),
            &b.algo,
            b.seed,
        ))
        .expect("keys are finite")
    });
    Ok(records)
}

fn float_key(x: f64) -> u64 {
    (x * 1e6) as u64
}

fn read_record(config_path: &Path, summary_path: &Path) -> Result<RunRecord, HarnessError> {
    let cfg: ExperimentConfig = toml::from_str(&fs::read_to_string(config_path)?)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", config_path.display())))?;
    let text = fs::read_to_string(summary_path)?;
    let bad = |what: &str| {
        HarnessError::Config(format!("{}: {what}", summary_path.display()))
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.starts_with("scenario,case,algo,flow_id,") => {}
        _ => return Err(bad("missing summary header")),
    }
    let mut flow_rates_bps = Vec::new();
    let mut metrics: Option<(f64, f64, f64, f64, f64)> = None;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 10 {
            return Err(bad("malformed summary row"));
        }
        let field = |i: usize| -> Result<f64, HarnessError> {
            cols[i].parse().map_err(|_| bad("non-numeric field"))
        };
        flow_rates_bps.push(field(4)?);
        if metrics.is_none() {
            metrics = Some((field(5)?, field(6)?, field(7)?, field(8)?, field(9)?));
        }
    }
    let (jain, ratio, util, mean_owd_ms, loss_rate) =
        metrics.ok_or_else(|| bad("no summary rows"))?;
    Ok(RunRecord {
        scenario: cfg.scenario,
        case: cfg.case,
        algo: cfg.algo,
        loss: cfg.loss,
        seed: cfg.seed,
        jain,
        ratio,
        util,
        mean_owd_ms,
        loss_rate,
        flow_rates_bps,
    })
}

/// Seed-averaged metrics for one (scenario, case, loss, algo) cell.
#[derive(Default)]
struct Agg {
    n: u32,
    jain: f64,
    ratio: f64,
    util: f64,
    owd: f64,
    loss_rate: f64,
    rates: Vec<f64>,
}

impl Agg {
    fn add(&mut self, r: &RunRecord) {
        self.n += 1;
        self.jain += r.jain;
        self.ratio += r.ratio;
        self.util += r.util;
        self.owd += r.mean_owd_ms;
        self.loss_rate += r.loss_rate;
        if self.rates.len() < r.flow_rates_bps.len() {
            self.rates.resize(r.flow_rates_bps.len(), 0.0);
        }
        for (acc, x) in self.rates.iter_mut().zip(&r.flow_rates_bps) {
            *acc += x;
        }
    }

    fn mean(&self, sum: f64) -> f64 {
        sum / self.n as f64
    }
}

/// Algorithms in suite order first, anything unknown after, by name.
fn algo_order(names: &mut Vec<String>) {
    let rank = |name: &str| {
        name.parse::<CcAlgo>()
            .ok()
            .and_then(|a| CcAlgo::ALL.iter().position(|&b| b == a))
            .unwrap_or(usize::MAX)
    };
    names.sort_by(|a, b| (rank(a), a.clone()).cmp(&(rank(b), b.clone())));
    names.dedup();
}

fn render_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let line = |cells: &[String]| -> String {
        let mut out = String::new();
        for i in 0..cols {
            let cell = cells.get(i).map(String::as_str).unwrap_or("");
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(&format!("{:<width$}", cell, width = widths[i]));
        }
        out.trim_end().to_string()
    };
    let mut out = line(headers);
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (cols - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

/// Renders the collected records as one comparison table per scenario.
pub fn render(records: &[RunRecord]) -> String {
    let mut out = String::new();
    for scenario in Scenario::ALL {
        let recs: Vec<&RunRecord> = records
            .iter()
            .filter(|r| r.scenario == scenario.as_str())
            .collect();
        if recs.is_empty() {
            continue;
        }
        // (case, loss-key, algo) -> averaged cell.
        let mut cells: BTreeMap<(u32, u64, String), Agg> = BTreeMap::new();
        for r in &recs {
            cells
                .entry((r.case, float_key(r.loss), r.algo.clone()))
                .or_default()
                .add(r);
        }
        let mut algos: Vec<String> = recs.iter().map(|r| r.algo.clone()).collect();
        algo_order(&mut algos);

        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("== {} ==\n", scenario.as_str()));
        let body = match scenario {
            Scenario::Utilization => render_utilization(&cells, &algos),
            Scenario::Responsiveness => render_responsiveness(&cells, &algos),
            Scenario::RttUnfairness => render_fairness(&cells, &algos, true),
            _ => render_fairness(&cells, &algos, false),
        };
        out.push_str(&body);
    }
    out
}

/// Cases down, algorithms across; cells show J and r, with per-flow
/// rates (kbit/s) prefixed for the two-flow RTT experiment.
fn render_fairness(
    cells: &BTreeMap<(u32, u64, String), Agg>,
    algos: &[String],
    with_rates: bool,
) -> String {
    let mut headers = vec!["case".to_string()];
    headers.extend(algos.iter().cloned());
    let cases: Vec<u32> = {
        let mut v: Vec<u32> = cells.keys().map(|k| k.0).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut rows = Vec::new();
    for case in cases {
        let mut row = vec![case.to_string()];
        for algo in algos {
            let cell = cells
                .iter()
                .find(|((c, _, a), _)| *c == case && a == algo)
                .map(|(_, agg)| {
                    let mut s = String::new();
                    if with_rates {
                        let kbps: Vec<String> = agg
                            .rates
                            .iter()
                            .map(|&sum| format!("{:.0}", agg.mean(sum) / 1000.0))
                            .collect();
                        s.push_str(&kbps.join("/"));
                        s.push(' ');
                    }
                    s.push_str(&format!(
                        "J={:.2} r={:.2}",
                        agg.mean(agg.jain),
                        agg.mean(agg.ratio)
                    ));
                    s
                })
                .unwrap_or_default();
            row.push(cell);
        }
        rows.push(row);
    }
    render_table(&headers, &rows)
}

/// (case, algo) down, loss levels across; cells are utilization.
fn render_utilization(cells: &BTreeMap<(u32, u64, String), Agg>, algos: &[String]) -> String {
    let losses: Vec<u64> = {
        let mut v: Vec<u64> = cells.keys().map(|k| k.1).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut headers = vec!["case".to_string(), "algo".to_string()];
    headers.extend(losses.iter().map(|&l| format!("loss {}", l as f64 / 1e6)));
    let cases: Vec<u32> = {
        let mut v: Vec<u32> = cells.keys().map(|k| k.0).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut rows = Vec::new();
    for case in cases {
        for algo in algos {
            let mut row = vec![case.to_string(), algo.clone()];
            let mut any = false;
            for &loss in &losses {
                let cell = cells
                    .get(&(case, loss, algo.clone()))
                    .map(|agg| {
                        any = true;
                        format!("{:.2}", agg.mean(agg.util))
                    })
                    .unwrap_or_default();
                row.push(cell);
            }
            if any {
                rows.push(row);
            }
        }
    }
    render_table(&headers, &rows)
}

/// Algorithms down; loss, delay, and utilization across.
fn render_responsiveness(cells: &BTreeMap<(u32, u64, String), Agg>, algos: &[String]) -> String {
    let headers = vec![
        "algo".to_string(),
        "loss_rate".to_string(),
        "mean_owd_ms".to_string(),
        "util".to_string(),
    ];
    let mut rows = Vec::new();
    for algo in algos {
        let agg: Vec<&Agg> = cells
            .iter()
            .filter(|((_, _, a), _)| a == algo)
            .map(|(_, agg)| agg)
            .collect();
        if let Some(agg) = agg.first() {
            rows.push(vec![
                algo.clone(),
                format!("{:.3}", agg.mean(agg.loss_rate)),
                format!("{:.2}", agg.mean(agg.owd)),
                format!("{:.2}", agg.mean(agg.util)),
            ]);
        }
    }
    render_table(&headers, &rows)
}
