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

//! Experiment harness: case tables, config resolution, run execution
//! with CSV output, and report aggregation.
//!
//! A run directory receives four files: `rates.csv`, `owd.csv`,
//! `summary.csv`, and `config.toml`. The last is the fully resolved
//! configuration, seed included, so any directory can be reproduced
//! byte-for-byte from its own provenance record.

mod config;
mod report;
mod scenario;

pub use config::{CapacityStep, ExperimentConfig, FlowWindow, PartialConfig};
pub use report::{collect, render, RunRecord};
pub use scenario::{
    build_run, default_capacity_schedule, CaseParams, RunRequest, Scenario,
    RESPONSIVENESS_PARAMS, RESPONSIVENESS_PERIOD_S, RESPONSIVENESS_QUEUE_BYTES,
    SIDE_BANDWIDTH_BPS, TABLE_INTER, TABLE_INTRA, TABLE_RTT, UTIL_CASES, UTIL_LOSSES,
};

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::metrics::{self, MetricsError, ScenarioSummary};
use crate::simulation::{self, RunOutcome};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown case {case} for scenario {scenario}")]
    UnknownCase { scenario: &'static str, case: u32 },
    #[error("loss rate {0} outside [0, 1]")]
    LossOutOfRange(f64),
    #[error("duration {0}s is not positive")]
    BadDuration(f64),
    #[error("capacity schedule: {0}")]
    BadCapacitySchedule(String),
    #[error("flow schedule: {0}")]
    BadFlowSchedule(String),
    #[error("{0}")]
    Config(String),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs the config without touching the filesystem.
pub fn run_config(cfg: &ExperimentConfig) -> Result<(RunOutcome, ScenarioSummary), HarnessError> {
    let req = cfg.to_request()?;
    let run = scenario::build_run(&req)?;
    let outcome = simulation::run(&run);
    // Cross-module conservation: the binned delivery trace must account
    // for every byte the receiver counted.
    for (f, bins) in outcome.flows.iter().zip(&outcome.delivered_bins) {
        let binned: u64 = bins.iter().sum();
        assert_eq!(
            binned, f.bytes_received_app,
            "flow {} binned delivery disagrees with the receiver",
            f.flow_id
        );
    }
    let summary = metrics::summarize(&outcome.flows, outcome.capacity_bits)?;
    Ok((outcome, summary))
}

/// Runs the config and writes `rates.csv`, `owd.csv`, `summary.csv`,
/// and the resolved `config.toml` into `dir`.
pub fn execute(cfg: &ExperimentConfig, dir: &Path) -> Result<ScenarioSummary, HarnessError> {
    let (outcome, summary) = run_config(cfg)?;
    fs::create_dir_all(dir)?;
    let mut provenance = cfg.clone();
    provenance.out_dir = Some(dir.display().to_string());
    fs::write(dir.join("config.toml"), provenance.to_toml())?;
    let mut buf = Vec::new();
    metrics::write_rates_csv(&mut buf, &outcome.flows)?;
    fs::write(dir.join("rates.csv"), &buf)?;
    buf.clear();
    metrics::write_owd_csv(&mut buf, &outcome.flows)?;
    fs::write(dir.join("owd.csv"), &buf)?;
    buf.clear();
    metrics::write_summary_csv(&mut buf, &cfg.scenario, cfg.case, &cfg.algo, &summary)?;
    fs::write(dir.join("summary.csv"), &buf)?;
    Ok(summary)
}

/// Canonical run directory below the output root. Utilization runs are
/// split by loss level; responsiveness has a single case and omits it.
pub fn run_dir(cfg: &ExperimentConfig) -> PathBuf {
    let mut dir = PathBuf::from(&cfg.scenario);
    match cfg.scenario.as_str() {
        "responsiveness" => {}
        "utilization" => {
            dir.push(format!("case{}", cfg.case));
            dir.push(format!("loss{}", cfg.loss));
        }
        _ => dir.push(format!("case{}", cfg.case)),
    }
    dir.push(&cfg.algo);
    dir
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short_rtt_config() -> ExperimentConfig {
        PartialConfig {
            scenario: Some("rtt_unfairness".into()),
            algo: Some("reno".into()),
            duration_s: Some(5.0),
            ..PartialConfig::default()
        }
        .resolve()
        .unwrap()
    }

    #[test]
    fn execute_writes_the_four_run_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = short_rtt_config();
        let summary = execute(&cfg, dir.path()).unwrap();
        assert!(summary.util > 0.0);
        for name in ["rates.csv", "owd.csv", "summary.csv", "config.toml"] {
            assert!(dir.path().join(name).is_file(), "{name} missing");
        }
        let text = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert!(text.starts_with("scenario,case,algo,flow_id,"));
        assert_eq!(text.lines().count(), 1 + 2);
        // The provenance record parses back into the same run.
        let back: ExperimentConfig =
            toml::from_str(&fs::read_to_string(dir.path().join("config.toml")).unwrap()).unwrap();
        assert_eq!(back.seed, cfg.seed);
        assert_eq!(back.scenario, cfg.scenario);
    }

    #[test]
    fn reruns_reproduce_summary_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let cfg = short_rtt_config();
        execute(&cfg, a.path()).unwrap();
        execute(&cfg, b.path()).unwrap();
        for name in ["rates.csv", "owd.csv", "summary.csv"] {
            let left = fs::read(a.path().join(name)).unwrap();
            let right = fs::read(b.path().join(name)).unwrap();
            assert_eq!(left, right, "{name} differs between reruns");
        }
    }

    #[test]
    fn run_directories_separate_scenarios_and_loss_levels() {
        let mut cfg = short_rtt_config();
        assert_eq!(run_dir(&cfg), PathBuf::from("rtt_unfairness/case1/reno"));
        cfg.scenario = "utilization".into();
        cfg.case = 7;
        cfg.loss = 0.05;
        assert_eq!(
            run_dir(&cfg),
            PathBuf::from("utilization/case7/loss0.05/reno")
        );
        cfg.scenario = "responsiveness".into();
        assert_eq!(run_dir(&cfg), PathBuf::from("responsiveness/reno"));
    }
}
