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

//! The five experiments, their case tables, and the translation from a
//! resolved request to a [`RunConfig`].
//!
//! Queue limits come from the tables as bandwidth * Qdelay products in
//! bytes. The utilization experiment overrides the bottleneck buffer to
//! 1.5 * BDP, with RTT taken as twice the propagation delay.

use crate::cc::CcAlgo;
use crate::net::{DumbbellSpec, LinkConfig};
use crate::sim::SimTime;
use crate::simulation::{FlowSpec, RunConfig};

use super::HarnessError;

/// Side links are 100 Mbps in every experiment.
pub const SIDE_BANDWIDTH_BPS: u64 = 100_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scenario {
    IntraFairness,
    RttUnfairness,
    Utilization,
    Responsiveness,
    InterProtocol,
}

/// One row of a case table: bottleneck bandwidth, bottleneck one-way
/// propagation delay, and the Qdelay the queue limit derives from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CaseParams {
    pub bandwidth_mbps: u64,
    pub prop_delay_ms: u64,
    pub qdelay_ms: u64,
}

const fn case(bandwidth_mbps: u64, prop_delay_ms: u64, qdelay_ms: u64) -> CaseParams {
    CaseParams {
        bandwidth_mbps,
        prop_delay_ms,
        qdelay_ms,
    }
}

/// Intra-protocol fairness cases; the utilization experiment reuses a
/// subset of these rows.
pub const TABLE_INTRA: [CaseParams; 11] = [
    case(5, 50, 100),
    case(5, 50, 150),
    case(5, 50, 200),
    case(6, 50, 100),
    case(6, 50, 150),
    case(7, 50, 150),
    case(7, 100, 300),
    case(8, 100, 200),
    case(8, 100, 300),
    case(10, 50, 150),
    case(10, 50, 200),
];

/// RTT-unfairness cases. Qdelay is 1.5 * RPT_max, where the long path
/// contributes 2 * (prop + 40 ms) to RPT_max.
pub const TABLE_RTT: [CaseParams; 9] = [
    case(4, 10, 150),
    case(4, 20, 180),
    case(4, 30, 210),
    case(6, 10, 150),
    case(6, 20, 180),
    case(6, 30, 210),
    case(8, 10, 150),
    case(8, 20, 180),
    case(8, 30, 210),
];

/// Inter-protocol fairness cases.
pub const TABLE_INTER: [CaseParams; 9] = [
    case(4, 50, 100),
    case(4, 50, 150),
    case(4, 50, 200),
    case(6, 50, 100),
    case(6, 50, 150),
    case(6, 50, 200),
    case(8, 50, 150),
    case(10, 50, 150),
    case(12, 50, 150),
];

/// Utilization runs on these TABLE_INTRA rows (1-based case ids).
pub const UTIL_CASES: [u32; 5] = [2, 5, 7, 9, 10];

/// Random loss grid for the utilization sweep.
pub const UTIL_LOSSES: [f64; 4] = [0.0, 0.01, 0.03, 0.05];

/// Responsiveness bottleneck: 4 Mbps peak, 50 ms propagation, buffer
/// fixed at 1.5 * 4 Mbps * 100 ms.
pub const RESPONSIVENESS_PARAMS: CaseParams = case(4, 50, 100);
pub const RESPONSIVENESS_QUEUE_BYTES: u64 = 75_000;

/// Segment length of the default responsiveness capacity schedule.
pub const RESPONSIVENESS_PERIOD_S: u64 = 50;

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::IntraFairness,
        Scenario::RttUnfairness,
        Scenario::Utilization,
        Scenario::Responsiveness,
        Scenario::InterProtocol,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::IntraFairness => "intra_fairness",
            Scenario::RttUnfairness => "rtt_unfairness",
            Scenario::Utilization => "utilization",
            Scenario::Responsiveness => "responsiveness",
            Scenario::InterProtocol => "inter_protocol",
        }
    }

    /// Valid case ids. Utilization keeps the 1-based TABLE_INTRA ids of
    /// the rows it reuses; responsiveness has a single configuration.
    pub fn cases(self) -> Vec<u32> {
        match self {
            Scenario::IntraFairness => (1..=TABLE_INTRA.len() as u32).collect(),
            Scenario::RttUnfairness => (1..=TABLE_RTT.len() as u32).collect(),
            Scenario::Utilization => UTIL_CASES.to_vec(),
            Scenario::Responsiveness => vec![1],
            Scenario::InterProtocol => (1..=TABLE_INTER.len() as u32).collect(),
        }
    }

    pub fn flow_count(self) -> usize {
        match self {
            Scenario::IntraFairness | Scenario::Utilization | Scenario::InterProtocol => 4,
            Scenario::RttUnfairness | Scenario::Responsiveness => 2,
        }
    }

    pub fn default_duration_s(self) -> f64 {
        match self {
            Scenario::IntraFairness | Scenario::Responsiveness => 400.0,
            _ => 200.0,
        }
    }

    fn params(self, case: u32) -> CaseParams {
        let i = (case - 1) as usize;
        match self {
            Scenario::IntraFairness | Scenario::Utilization => TABLE_INTRA[i],
            Scenario::RttUnfairness => TABLE_RTT[i],
            Scenario::InterProtocol => TABLE_INTER[i],
            Scenario::Responsiveness => RESPONSIVENESS_PARAMS,
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "intra_fairness" | "intra" => Ok(Scenario::IntraFairness),
            "rtt_unfairness" | "rtt" => Ok(Scenario::RttUnfairness),
            "utilization" | "util" => Ok(Scenario::Utilization),
            "responsiveness" => Ok(Scenario::Responsiveness),
            "inter_protocol" | "inter" => Ok(Scenario::InterProtocol),
            other => Err(format!(
                "unknown scenario {other:?} (expected one of: {})",
                Scenario::ALL.map(|s| s.as_str()).join(", ")
            )),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully resolved request for one run.
#[derive(Clone, Debug)]
pub struct RunRequest {
    pub scenario: Scenario,
    pub case: u32,
    /// Inter-protocol runs give this algorithm to flows 1 and 2 and
    /// Cubic to flows 3 and 4; every other scenario uses it everywhere.
    pub algo: CcAlgo,
    /// Random loss rate on the bottleneck, data packets only.
    pub loss: f64,
    pub seed: u64,
    pub duration_s: Option<f64>,
    pub queue_limit_bytes: Option<u64>,
    /// (at_s, bps) pairs; first entry must sit at 0 and sets the
    /// initial bottleneck rate.
    pub capacity_schedule: Option<Vec<(f64, u64)>>,
    /// (start_s, stop_s) per flow, replacing the scenario default.
    pub flow_schedule: Option<Vec<(f64, f64)>>,
    pub rtprop_lambda: Option<f64>,
}

impl RunRequest {
    pub fn new(scenario: Scenario, case: u32, algo: CcAlgo) -> Self {
        RunRequest {
            scenario,
            case,
            algo,
            loss: 0.0,
            seed: 1,
            duration_s: None,
            queue_limit_bytes: None,
            capacity_schedule: None,
            flow_schedule: None,
            rtprop_lambda: None,
        }
    }
}

/// Queue limit in bytes for a bandwidth * delay product.
const fn bw_delay_bytes(bandwidth_mbps: u64, delay_ms: u64) -> u64 {
    bandwidth_mbps * delay_ms * 125
}

/// The default responsiveness schedule: the peak rate, halved-period
/// alternation down to 1 Mbps and back, clipped to the duration.
pub fn default_capacity_schedule(scenario: Scenario, duration_s: f64) -> Vec<(f64, u64)> {
    if scenario != Scenario::Responsiveness {
        return Vec::new();
    }
    let peak = RESPONSIVENESS_PARAMS.bandwidth_mbps * 1_000_000;
    let mut steps = vec![(0.0, peak)];
    let mut k = 1;
    loop {
        let at = (k * RESPONSIVENESS_PERIOD_S) as f64;
        if at >= duration_s {
            return steps;
        }
        steps.push((at, if k % 2 == 1 { 1_000_000 } else { peak }));
        k += 1;
    }
}

/// Scenario-default (start_s, stop_s) windows.
fn default_flow_schedule(scenario: Scenario, duration_s: f64) -> Vec<(f64, f64)> {
    let d = duration_s;
    match scenario {
        // The paper's staggered joins and leaves.
        Scenario::IntraFairness => vec![
            (0.0, d),
            (40.0, d),
            (80.0, 200.0_f64.min(d)),
            (120.0, 300.0_f64.min(d)),
        ],
        Scenario::RttUnfairness => vec![(0.0, d), (0.0, d)],
        // 100 ms staggers break phase lock between identical flows.
        Scenario::Utilization => vec![(0.0, d), (0.1, d), (0.2, d), (0.3, d)],
        Scenario::Responsiveness => vec![(0.0, d), (0.1, d)],
        Scenario::InterProtocol => vec![(0.0, d), (0.1, d), (0.2, d), (0.3, d)],
    }
}

fn flow_paths(scenario: Scenario) -> Vec<(&'static str, &'static str, Vec<&'static str>)> {
    match scenario {
        Scenario::RttUnfairness => vec![
            ("n0", "n4", vec!["l1", "l2", "l4"]),
            ("n1", "n5", vec!["l3", "l2", "l5"]),
        ],
        s => (0..s.flow_count()).map(|_| ("n2", "n3", vec!["l2"])).collect(),
    }
}

fn flow_algos(scenario: Scenario, algo: CcAlgo) -> Vec<CcAlgo> {
    match scenario {
        Scenario::InterProtocol => vec![algo, algo, CcAlgo::Cubic, CcAlgo::Cubic],
        s => vec![algo; s.flow_count()],
    }
}

/// Translates a request into a [`RunConfig`], applying the case tables
/// and validating every override.
pub fn build_run(req: &RunRequest) -> Result<RunConfig, HarnessError> {
    if !(0.0..=1.0).contains(&req.loss) {
        return Err(HarnessError::LossOutOfRange(req.loss));
    }
    if !req.scenario.cases().contains(&req.case) {
        return Err(HarnessError::UnknownCase {
            scenario: req.scenario.as_str(),
            case: req.case,
        });
    }
    let duration_s = req.duration_s.unwrap_or_else(|| req.scenario.default_duration_s());
    if !(duration_s > 0.0) {
        return Err(HarnessError::BadDuration(duration_s));
    }
    let duration = SimTime::from_secs_f64(duration_s);
    let p = req.scenario.params(req.case);

    let queue_limit_bytes = req.queue_limit_bytes.unwrap_or(match req.scenario {
        // 1.5 * BDP with RTT = 2 * propagation delay.
        Scenario::Utilization => bw_delay_bytes(p.bandwidth_mbps, 3 * p.prop_delay_ms),
        Scenario::Responsiveness => RESPONSIVENESS_QUEUE_BYTES,
        _ => bw_delay_bytes(p.bandwidth_mbps, p.qdelay_ms),
    });
    let mut bottleneck = LinkConfig {
        bandwidth_bps: p.bandwidth_mbps * 1_000_000,
        prop_delay: SimTime::from_millis(p.prop_delay_ms),
        queue_limit_bytes,
        random_loss_rate: req.loss,
    };

    let steps = match &req.capacity_schedule {
        Some(user) => user.clone(),
        None => default_capacity_schedule(req.scenario, duration_s),
    };
    let mut capacity_schedule = Vec::new();
    if !steps.is_empty() {
        if steps[0].0 != 0.0 {
            return Err(HarnessError::BadCapacitySchedule(
                "first entry must be at t = 0".into(),
            ));
        }
        if steps.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(HarnessError::BadCapacitySchedule(
                "times must be strictly increasing".into(),
            ));
        }
        if steps.iter().any(|&(_, bps)| bps == 0) {
            return Err(HarnessError::BadCapacitySchedule("zero rate".into()));
        }
        bottleneck.bandwidth_bps = steps[0].1;
        capacity_schedule = steps[1..]
            .iter()
            .map(|&(at, bps)| (SimTime::from_secs_f64(at), bps))
            .collect();
    }

    let windows = match &req.flow_schedule {
        Some(user) => {
            if user.len() != req.scenario.flow_count() {
                return Err(HarnessError::BadFlowSchedule(format!(
                    "{} windows given, scenario has {} flows",
                    user.len(),
                    req.scenario.flow_count()
                )));
            }
            for &(start, stop) in user {
                if !(0.0 <= start && start < stop && stop <= duration_s) {
                    return Err(HarnessError::BadFlowSchedule(format!(
                        "window {start}s..{stop}s outside 0s..{duration_s}s"
                    )));
                }
            }
            user.clone()
        }
        None => default_flow_schedule(req.scenario, duration_s),
    };
    if let Some(&(start, _)) = windows.iter().find(|&&(start, _)| start >= duration_s) {
        return Err(HarnessError::BadFlowSchedule(format!(
            "a flow starts at {start}s, at or after the {duration_s}s horizon"
        )));
    }

    // Path-specific side delays reproduce the two RTT classes: the
    // short path adds 2 * 10 ms, the long one 2 * 20 ms.
    let (short_ms, long_ms) = (10, 20);
    let side = |prop_ms: u64| LinkConfig {
        bandwidth_bps: SIDE_BANDWIDTH_BPS,
        prop_delay: SimTime::from_millis(prop_ms),
        queue_limit_bytes: bw_delay_bytes(SIDE_BANDWIDTH_BPS / 1_000_000, p.qdelay_ms),
        random_loss_rate: 0.0,
    };
    let dumbbell = DumbbellSpec {
        bottleneck,
        l1: side(short_ms),
        l3: side(long_ms),
        l4: side(short_ms),
        l5: side(long_ms),
    };

    let algos = flow_algos(req.scenario, req.algo);
    let flows = flow_paths(req.scenario)
        .into_iter()
        .zip(algos)
        .zip(&windows)
        .map(|(((src, dst, links), algo), &(start, stop))| FlowSpec {
            algo,
            src,
            dst,
            links,
            start: SimTime::from_secs_f64(start),
            stop: SimTime::from_secs_f64(stop),
        })
        .collect();

    Ok(RunConfig {
        dumbbell,
        flows,
        duration,
        seed: req.seed,
        capacity_schedule,
        rtprop_lambda: req.rtprop_lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn queue_limits_follow_the_tables() {
        let cfg = build_run(&RunRequest::new(Scenario::IntraFairness, 1, CcAlgo::Bbr)).unwrap();
        // 5 Mbps * 100 ms.
        assert_eq!(cfg.dumbbell.bottleneck.queue_limit_bytes, 62_500);
        assert_eq!(cfg.dumbbell.bottleneck.bandwidth_bps, 5_000_000);
        assert_eq!(cfg.dumbbell.bottleneck.prop_delay, SimTime::from_millis(50));

        let cfg = build_run(&RunRequest::new(Scenario::RttUnfairness, 1, CcAlgo::Bbr)).unwrap();
        // 4 Mbps * 150 ms bottleneck; 100 Mbps * 150 ms sides.
        assert_eq!(cfg.dumbbell.bottleneck.queue_limit_bytes, 75_000);
        assert_eq!(cfg.dumbbell.l1.queue_limit_bytes, 1_875_000);
    }

    #[test]
    fn utilization_overrides_buffer_to_bdp_and_a_half() {
        let cfg = build_run(&RunRequest::new(Scenario::Utilization, 2, CcAlgo::Bbr)).unwrap();
        // 1.5 * 5 Mbps * (2 * 50 ms) = 93 750 B, not Table 1's 93.75 kB
        // Qdelay product.
        assert_eq!(cfg.dumbbell.bottleneck.queue_limit_bytes, 93_750);
        assert_eq!(cfg.flows.len(), 4);
        assert_eq!(cfg.duration, SimTime::from_secs(200));
    }

    #[test]
    fn rtt_unfairness_separates_path_delays() {
        let cfg = build_run(&RunRequest::new(Scenario::RttUnfairness, 7, CcAlgo::Bbr)).unwrap();
        assert_eq!(cfg.dumbbell.l1.prop_delay, SimTime::from_millis(10));
        assert_eq!(cfg.dumbbell.l4.prop_delay, SimTime::from_millis(10));
        assert_eq!(cfg.dumbbell.l3.prop_delay, SimTime::from_millis(20));
        assert_eq!(cfg.dumbbell.l5.prop_delay, SimTime::from_millis(20));
        assert_eq!(cfg.flows[0].links, vec!["l1", "l2", "l4"]);
        assert_eq!(cfg.flows[1].links, vec!["l3", "l2", "l5"]);
    }

    #[test]
    fn responsiveness_alternates_capacity_from_the_peak() {
        let steps = default_capacity_schedule(Scenario::Responsiveness, 400.0);
        assert_eq!(steps.len(), 8);
        assert_eq!(steps[0], (0.0, 4_000_000));
        assert_eq!(steps[1], (50.0, 1_000_000));
        assert_eq!(steps[2], (100.0, 4_000_000));
        assert_eq!(steps[7], (350.0, 1_000_000));

        let cfg = build_run(&RunRequest::new(Scenario::Responsiveness, 1, CcAlgo::Bbr)).unwrap();
        assert_eq!(cfg.dumbbell.bottleneck.bandwidth_bps, 4_000_000);
        assert_eq!(cfg.dumbbell.bottleneck.queue_limit_bytes, 75_000);
        assert_eq!(cfg.capacity_schedule.len(), 7);
        assert_eq!(cfg.capacity_schedule[0], (SimTime::from_secs(50), 1_000_000));
    }

    #[test]
    fn intra_flow_windows_match_the_paper_schedule() {
        let cfg = build_run(&RunRequest::new(Scenario::IntraFairness, 1, CcAlgo::Bbr)).unwrap();
        let windows: Vec<(SimTime, SimTime)> =
            cfg.flows.iter().map(|f| (f.start, f.stop)).collect();
        assert_eq!(
            windows,
            vec![
                (SimTime::ZERO, SimTime::from_secs(400)),
                (SimTime::from_secs(40), SimTime::from_secs(400)),
                (SimTime::from_secs(80), SimTime::from_secs(200)),
                (SimTime::from_secs(120), SimTime::from_secs(300)),
            ]
        );
    }

    #[test]
    fn inter_protocol_pits_the_algo_against_cubic() {
        let cfg = build_run(&RunRequest::new(Scenario::InterProtocol, 5, CcAlgo::Bbr2)).unwrap();
        let algos: Vec<CcAlgo> = cfg.flows.iter().map(|f| f.algo).collect();
        assert_eq!(algos, vec![CcAlgo::Bbr2, CcAlgo::Bbr2, CcAlgo::Cubic, CcAlgo::Cubic]);
    }

    #[test]
    fn invalid_requests_are_rejected() {
        let bad_case = RunRequest::new(Scenario::Utilization, 3, CcAlgo::Bbr);
        assert!(matches!(
            build_run(&bad_case),
            Err(HarnessError::UnknownCase { case: 3, .. })
        ));

        let mut bad_loss = RunRequest::new(Scenario::IntraFairness, 1, CcAlgo::Bbr);
        bad_loss.loss = 1.5;
        assert!(matches!(
            build_run(&bad_loss),
            Err(HarnessError::LossOutOfRange(_))
        ));

        let mut bad_sched = RunRequest::new(Scenario::Responsiveness, 1, CcAlgo::Bbr);
        bad_sched.capacity_schedule = Some(vec![(10.0, 1_000_000)]);
        assert!(matches!(
            build_run(&bad_sched),
            Err(HarnessError::BadCapacitySchedule(_))
        ));

        let mut bad_flows = RunRequest::new(Scenario::RttUnfairness, 1, CcAlgo::Bbr);
        bad_flows.flow_schedule = Some(vec![(0.0, 100.0)]);
        assert!(matches!(
            build_run(&bad_flows),
            Err(HarnessError::BadFlowSchedule(_))
        ));

        let mut late_stop = RunRequest::new(Scenario::RttUnfairness, 1, CcAlgo::Bbr);
        late_stop.flow_schedule = Some(vec![(0.0, 100.0), (0.0, 300.0)]);
        assert!(matches!(
            build_run(&late_stop),
            Err(HarnessError::BadFlowSchedule(_))
        ));
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
        assert!("nonsense".parse::<Scenario>().is_err());
    }
}
