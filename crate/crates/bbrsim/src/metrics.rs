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

//! Evaluation figures and CSV emission.
//!
//! Per-flow accumulators feed four scenario-level figures:
//!
//! ```text
//! average rate    x̄_i  = app_bytes_i / active_duration_i
//! fairness        J    = (Σ x̄_i)² / (n · Σ x̄_i²)
//! ratio           r    = max x̄ / min x̄
//! utilization     util = Σ app_bytes_i · 8 / ∫ capacity dt
//! ```
//!
//! Utilization counts application payload against the raw link rate, so
//! a saturated loss-free bottleneck tops out near payload/wire ≈ 0.97,
//! not 1.0. Delay and loss averages are per-flow means, unweighted.
//!
//! All trace CSV output is binned to 100 ms and formatted with fixed
//! precision so identical runs serialize byte-identically.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::sim::SimTime;

/// Width of one trace bin in the rate and delay CSVs.
pub const TRACE_BIN: SimTime = SimTime::from_millis(100);

/// Everything recorded about one flow during a run.
#[derive(Clone, Debug)]
pub struct FlowStats {
    pub flow_id: usize,
    /// Unique stream bytes that reached the receiving application.
    pub bytes_received_app: u64,
    /// Active lifetime bounds; `average_rate` divides by their span.
    pub start: SimTime,
    pub stop: SimTime,
    /// Data packets injected by the sender (retransmissions included).
    pub packets_sent: u64,
    /// Data packets dropped inside the network.
    pub packets_lost: u64,
    /// (arrival time, one-way delay) per delivering data packet.
    pub owd_samples: Vec<(SimTime, SimTime)>,
    /// (send time, controller pacing rate in bytes/s) per send event.
    pub rate_trace: Vec<(SimTime, u64)>,
}

impl FlowStats {
    pub fn new(flow_id: usize, start: SimTime) -> Self {
        FlowStats {
            flow_id,
            bytes_received_app: 0,
            start,
            stop: start,
            packets_sent: 0,
            packets_lost: 0,
            owd_samples: Vec::new(),
            rate_trace: Vec::new(),
        }
    }

    pub fn duration_secs(&self) -> f64 {
        self.stop.saturating_sub(self.start).as_secs_f64()
    }

    /// Average application goodput in bytes per second.
    pub fn average_rate(&self) -> Result<f64, MetricsError> {
        let d = self.duration_secs();
        if d <= 0.0 {
            return Err(MetricsError::ZeroDuration(self.flow_id));
        }
        Ok(self.bytes_received_app as f64 / d)
    }

    /// Mean one-way delay in milliseconds, if any packet arrived.
    pub fn mean_owd_ms(&self) -> Option<f64> {
        if self.owd_samples.is_empty() {
            return None;
        }
        let sum: f64 = self.owd_samples.iter().map(|(_, d)| d.as_millis_f64()).sum();
        Some(sum / self.owd_samples.len() as f64)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("flow {0} has zero active duration")]
    ZeroDuration(usize),
    #[error("fairness is undefined for an empty rate set")]
    NoRates,
    #[error("fairness is undefined when every rate is zero")]
    AllZero,
    #[error("max/min ratio is undefined with a zero minimum rate")]
    ZeroMinimum,
    #[error("no delay samples were recorded")]
    NoDelaySamples,
}

/// Jain's fairness index over per-flow average rates. In (0, 1],
/// exactly 1 iff all rates are equal, lower-bounded by 1/n.
pub fn jain_index(rates: &[f64]) -> Result<f64, MetricsError> {
    if rates.is_empty() {
        return Err(MetricsError::NoRates);
    }
    let sum: f64 = rates.iter().sum();
    let sum_sq: f64 = rates.iter().map(|x| x * x).sum();
    if sum_sq == 0.0 {
        return Err(MetricsError::AllZero);
    }
    Ok(sum * sum / (rates.len() as f64 * sum_sq))
}

/// Ratio of the largest to the smallest average rate; always >= 1.
pub fn max_min_ratio(rates: &[f64]) -> Result<f64, MetricsError> {
    if rates.is_empty() {
        return Err(MetricsError::NoRates);
    }
    let max = rates.iter().cloned().fold(f64::MIN, f64::max);
    let min = rates.iter().cloned().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        return Err(MetricsError::ZeroMinimum);
    }
    Ok(max / min)
}

/// Fraction of the bottleneck's bit capacity carried as app payload.
/// `capacity_bits` is the integral of the link rate over the run, which
/// for a fixed-rate link is `rate_bps * duration_secs`.
pub fn channel_utilization(total_app_bytes: u64, capacity_bits: f64) -> f64 {
    if capacity_bits <= 0.0 {
        return 0.0;
    }
    total_app_bytes as f64 * 8.0 / capacity_bits
}

/// Scenario-level summary over all flows of one run.
#[derive(Clone, Debug)]
pub struct ScenarioSummary {
    /// (flow_id, average rate in bytes/s), in flow order.
    pub avg_rates: Vec<(usize, f64)>,
    pub jain: f64,
    pub ratio: f64,
    pub util: f64,
    pub mean_owd_ms: f64,
    pub loss_rate: f64,
}

/// Reduces per-flow stats to the scenario summary figures.
pub fn summarize(flows: &[FlowStats], capacity_bits: f64) -> Result<ScenarioSummary, MetricsError> {
    let mut avg_rates = Vec::with_capacity(flows.len());
    for f in flows {
        avg_rates.push((f.flow_id, f.average_rate()?));
    }
    let rates: Vec<f64> = avg_rates.iter().map(|&(_, r)| r).collect();
    let jain = jain_index(&rates)?;
    let ratio = max_min_ratio(&rates)?;
    let total_app: u64 = flows.iter().map(|f| f.bytes_received_app).sum();
    let util = channel_utilization(total_app, capacity_bits);

    // Delay averages per flow first, then across flows, so a chatty
    // short-RTT flow cannot dominate the mean.
    let per_flow: Vec<f64> = flows.iter().filter_map(|f| f.mean_owd_ms()).collect();
    if per_flow.is_empty() {
        return Err(MetricsError::NoDelaySamples);
    }
    let mean_owd_ms = per_flow.iter().sum::<f64>() / per_flow.len() as f64;

    let sent: u64 = flows.iter().map(|f| f.packets_sent).sum();
    let lost: u64 = flows.iter().map(|f| f.packets_lost).sum();
    let loss_rate = if sent == 0 { 0.0 } else { lost as f64 / sent as f64 };

    debug_assert!(jain > 0.0 && jain <= 1.0 + 1e-9);
    debug_assert!(ratio >= 1.0);
    Ok(ScenarioSummary {
        avg_rates,
        jain,
        ratio,
        util,
        mean_owd_ms,
        loss_rate,
    })
}

/// Mean of `(time, value)` samples per 100 ms bin, keyed by bin index.
fn binned_means(samples: impl Iterator<Item = (SimTime, f64)>) -> BTreeMap<u64, f64> {
    let mut acc: BTreeMap<u64, (f64, u64)> = BTreeMap::new();
    for (at, value) in samples {
        let bin = at.as_micros() / TRACE_BIN.as_micros();
        let slot = acc.entry(bin).or_insert((0.0, 0));
        slot.0 += value;
        slot.1 += 1;
    }
    acc.into_iter().map(|(bin, (sum, n))| (bin, sum / n as f64)).collect()
}

fn bin_time_label(bin: u64) -> String {
    format!("{:.1}", bin as f64 * TRACE_BIN.as_secs_f64())
}

/// `rates.csv`: controller pacing rate per flow, 100 ms bins, in bits
/// per second. Rows ordered by (time, flow).
pub fn write_rates_csv<W: Write>(out: &mut W, flows: &[FlowStats]) -> io::Result<()> {
    writeln!(out, "time_s,flow_id,rate_bps")?;
    let mut rows: Vec<(u64, usize, f64)> = Vec::new();
    for f in flows {
        let series = binned_means(f.rate_trace.iter().map(|&(at, r)| (at, r as f64 * 8.0)));
        rows.extend(series.into_iter().map(|(bin, bps)| (bin, f.flow_id, bps)));
    }
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for (bin, flow, bps) in rows {
        writeln!(out, "{},{},{:.0}", bin_time_label(bin), flow, bps)?;
    }
    Ok(())
}

/// `owd.csv`: one-way delay per flow, 100 ms bins, in milliseconds.
pub fn write_owd_csv<W: Write>(out: &mut W, flows: &[FlowStats]) -> io::Result<()> {
    writeln!(out, "time_s,flow_id,owd_ms")?;
    let mut rows: Vec<(u64, usize, f64)> = Vec::new();
    for f in flows {
        let series = binned_means(f.owd_samples.iter().map(|&(at, d)| (at, d.as_millis_f64())));
        rows.extend(series.into_iter().map(|(bin, ms)| (bin, f.flow_id, ms)));
    }
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for (bin, flow, ms) in rows {
        writeln!(out, "{},{},{:.3}", bin_time_label(bin), flow, ms)?;
    }
    Ok(())
}

/// `summary.csv`: one row per flow; the scenario-level columns repeat
/// on every row.
pub fn write_summary_csv<W: Write>(
    out: &mut W,
    scenario: &str,
    case: u32,
    algo: &str,
    summary: &ScenarioSummary,
) -> io::Result<()> {
    writeln!(
        out,
        "scenario,case,algo,flow_id,avg_rate_bps,jain,ratio,util,mean_owd_ms,loss_rate"
    )?;
    for &(flow_id, rate) in &summary.avg_rates {
        writeln!(
            out,
            "{},{},{},{},{:.0},{:.4},{:.4},{:.4},{:.3},{:.6}",
            scenario,
            case,
            algo,
            flow_id,
            rate * 8.0,
            summary.jain,
            summary.ratio,
            summary.util,
            summary.mean_owd_ms,
            summary.loss_rate,
        )?;
    }
    Ok(())
}
