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

//! Configuration: a TOML file merged with command-line overrides into
//! one resolved [`ExperimentConfig`].
//!
//! Resolution order is CLI flag, then file value, then scenario
//! default. The resolved config is serialized into every run directory
//! as `config.toml`, which records the seed and the effective capacity
//! schedule alongside the results.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::scenario::{default_capacity_schedule, RunRequest, Scenario};
use super::HarnessError;
use crate::cc::CcAlgo;

/// One bottleneck rate step.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct CapacityStep {
    pub at_s: f64,
    pub bps: u64,
}

/// One flow's active window.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct FlowWindow {
    pub start_s: f64,
    pub stop_s: f64,
}

/// The alterable subset of a run, as read from a config file. Every
/// field is optional; CLI flags override file values.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub scenario: Option<String>,
    pub case: Option<u32>,
    pub algo: Option<String>,
    pub loss: Option<f64>,
    pub seed: Option<u64>,
    pub out_dir: Option<String>,
    pub duration_s: Option<f64>,
    pub queue_limit_bytes: Option<u64>,
    pub rtprop_lambda: Option<f64>,
    pub capacity_schedule: Option<Vec<CapacityStep>>,
    pub flows: Option<Vec<FlowWindow>>,
}

impl PartialConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// Layered merge; `self` wins over `under`.
    pub fn or(self, under: PartialConfig) -> PartialConfig {
        PartialConfig {
            scenario: self.scenario.or(under.scenario),
            case: self.case.or(under.case),
            algo: self.algo.or(under.algo),
            loss: self.loss.or(under.loss),
            seed: self.seed.or(under.seed),
            out_dir: self.out_dir.or(under.out_dir),
            duration_s: self.duration_s.or(under.duration_s),
            queue_limit_bytes: self.queue_limit_bytes.or(under.queue_limit_bytes),
            rtprop_lambda: self.rtprop_lambda.or(under.rtprop_lambda),
            capacity_schedule: self.capacity_schedule.or(under.capacity_schedule),
            flows: self.flows.or(under.flows),
        }
    }

    /// Fills defaults and validates, producing the config a run records.
    pub fn resolve(self) -> Result<ExperimentConfig, HarnessError> {
        let scenario_name = self
            .scenario
            .ok_or_else(|| HarnessError::Config("no scenario given".into()))?;
        let scenario: Scenario = scenario_name.parse().map_err(HarnessError::Config)?;
        let algo_name = self
            .algo
            .ok_or_else(|| HarnessError::Config("no algorithm given".into()))?;
        let algo: CcAlgo = algo_name.parse().map_err(HarnessError::Config)?;
        let case = self.case.unwrap_or(scenario.cases()[0]);
        let duration_s = self.duration_s.unwrap_or_else(|| scenario.default_duration_s());
        let capacity_schedule = self.capacity_schedule.unwrap_or_else(|| {
            default_capacity_schedule(scenario, duration_s)
                .into_iter()
                .map(|(at_s, bps)| CapacityStep { at_s, bps })
                .collect()
        });
        let config = ExperimentConfig {
            scenario: scenario.as_str().to_string(),
            case,
            algo: algo.as_str().to_string(),
            loss: self.loss.unwrap_or(0.0),
            seed: self.seed.unwrap_or(1),
            out_dir: self.out_dir,
            duration_s,
            queue_limit_bytes: self.queue_limit_bytes,
            rtprop_lambda: self.rtprop_lambda,
            capacity_schedule,
            flows: self.flows.unwrap_or_default(),
        };
        // Surface table and schedule errors at resolve time, so a bad
        // config fails before any run starts.
        super::scenario::build_run(&config.to_request()?)?;
        Ok(config)
    }
}

/// A fully resolved run description. Serializing this reproduces the
/// run: it carries the seed, the case, and every override.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub case: u32,
    pub algo: String,
    pub loss: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    pub duration_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queue_limit_bytes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rtprop_lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub capacity_schedule: Vec<CapacityStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flows: Vec<FlowWindow>,
}

impl ExperimentConfig {
    pub fn scenario(&self) -> Result<Scenario, HarnessError> {
        self.scenario.parse().map_err(HarnessError::Config)
    }

    pub fn algo(&self) -> Result<CcAlgo, HarnessError> {
        self.algo.parse().map_err(HarnessError::Config)
    }

    pub fn to_request(&self) -> Result<RunRequest, HarnessError> {
        let mut req = RunRequest::new(self.scenario()?, self.case, self.algo()?);
        req.loss = self.loss;
        req.seed = self.seed;
        req.duration_s = Some(self.duration_s);
        req.queue_limit_bytes = self.queue_limit_bytes;
        req.rtprop_lambda = self.rtprop_lambda;
        if !self.capacity_schedule.is_empty() {
            req.capacity_schedule = Some(
                self.capacity_schedule.iter().map(|s| (s.at_s, s.bps)).collect(),
            );
        }
        if !self.flows.is_empty() {
            req.flow_schedule = Some(self.flows.iter().map(|w| (w.start_s, w.stop_s)).collect());
        }
        Ok(req)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> PartialConfig {
        PartialConfig {
            scenario: Some("rtt_unfairness".into()),
            algo: Some("bbr".into()),
            ..PartialConfig::default()
        }
    }

    #[test]
    fn defaults_fill_in_and_round_trip_through_toml() {
        let cfg = minimal().resolve().unwrap();
        assert_eq!(cfg.case, 1);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.loss, 0.0);
        assert_eq!(cfg.duration_s, 200.0);
        assert!(cfg.capacity_schedule.is_empty());

        let text = cfg.to_toml();
        let back: PartialConfig = toml::from_str(&text).unwrap();
        let cfg2 = back.resolve().unwrap();
        assert_eq!(cfg2.scenario, cfg.scenario);
        assert_eq!(cfg2.case, cfg.case);
        assert_eq!(cfg2.seed, cfg.seed);
    }

    #[test]
    fn cli_layer_wins_over_file_layer() {
        let file = PartialConfig {
            scenario: Some("utilization".into()),
            algo: Some("cubic".into()),
            loss: Some(0.03),
            seed: Some(9),
            ..PartialConfig::default()
        };
        let cli = PartialConfig {
            algo: Some("bbr".into()),
            ..PartialConfig::default()
        };
        let cfg = cli.or(file).resolve().unwrap();
        assert_eq!(cfg.algo, "bbr");
        assert_eq!(cfg.loss, 0.03);
        assert_eq!(cfg.seed, 9);
        // Utilization's first valid case is 2, not 1.
        assert_eq!(cfg.case, 2);
    }

    #[test]
    fn responsiveness_schedule_is_materialized_for_provenance() {
        let cfg = PartialConfig {
            scenario: Some("responsiveness".into()),
            algo: Some("bbr".into()),
            ..PartialConfig::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(cfg.capacity_schedule.len(), 8);
        assert_eq!(cfg.capacity_schedule[0], CapacityStep { at_s: 0.0, bps: 4_000_000 });
        assert!(cfg.to_toml().contains("capacity_schedule"));
    }

    #[test]
    fn bad_values_fail_resolution() {
        let mut cfg = minimal();
        cfg.algo = Some("warp_drive".into());
        assert!(cfg.resolve().is_err());

        let mut cfg = minimal();
        cfg.case = Some(99);
        assert!(cfg.resolve().is_err());

        let mut cfg = minimal();
        cfg.loss = Some(-0.5);
        assert!(cfg.resolve().is_err());

        assert!(PartialConfig::default().resolve().is_err());
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        let err = toml::from_str::<PartialConfig>("scanario = \"intra\"");
        assert!(err.is_err());
    }
}
