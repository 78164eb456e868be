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

//! Congestion controllers.
//!
//! The transport drives a controller through four callbacks (sent,
//! acked, loss, round end) and reads back two outputs: the congestion
//! window in bytes and an optional pacing rate. Controllers that
//! return `None` from [`CongestionController::pacing_rate`] are
//! cwnd-clocked (Reno, Cubic); the BBR family always paces.

mod bbr;
mod bbr2;
mod cubic;
mod filters;
mod reno;

use std::str::FromStr;

pub use bbr::{BbrV1, V1Variant};
pub use bbr2::Bbr2;
pub use cubic::{Cubic, CUBIC_BETA, CUBIC_C};
pub use filters::{FullBandwidthEstimator, MaxBandwidthFilter, MinRttFilter};
pub use reno::Reno;

use crate::sim::SimTime;
use crate::transport::RateSample;

/// Base stream id for controller randomness: flow `i` draws cycle
/// randomization from `CC_STREAM_BASE + 2*i` and interval randomization
/// from `CC_STREAM_BASE + 2*i + 1`.
pub const CC_STREAM_BASE: u64 = 0x2000;

/// Per-ack context accompanying a [`RateSample`].
#[derive(Clone, Copy, Debug)]
pub struct AckContext {
    pub now: SimTime,
    /// Bytes outstanding after this packet was removed.
    pub inflight_bytes: u64,
    /// Wire size of the newly acked packet.
    pub acked_bytes: u32,
    /// Bytes declared lost while processing the ack event this sample
    /// belongs to; nonzero means "loss happened just now".
    pub newly_lost_bytes: u64,
    pub largest_acked: u64,
}

/// Aggregate loss notification, once per ack event that declared loss.
#[derive(Clone, Copy, Debug)]
pub struct LossContext {
    pub now: SimTime,
    pub lost_bytes: u64,
    pub lost_packets: u32,
    pub largest_lost: u64,
    pub largest_acked: u64,
    /// The next packet number the sender will use; marks the end of the
    /// current round trip for once-per-round reactions.
    pub next_pn: u64,
}

/// Counters for the packet-timed round that just ended.
#[derive(Clone, Copy, Debug, Default)]
pub struct RoundSnapshot {
    pub sent_pkts: u64,
    pub lost_pkts: u64,
    pub delivered_pkts: u64,
    pub delivered_bytes: u64,
    pub max_inflight_bytes: u64,
}

impl RoundSnapshot {
    pub fn loss_rate(&self) -> f64 {
        self.lost_pkts as f64 / self.sent_pkts.max(1) as f64
    }
}

/// Snapshot of controller internals for traces and assertions.
#[derive(Clone, Copy, Debug)]
pub struct CcView {
    pub mode: &'static str,
    pub pacing_gain: f64,
    pub bw_bytes_per_sec: u64,
    pub cwnd_bytes: u64,
}

pub trait CongestionController {
    fn name(&self) -> &'static str;

    fn on_packet_sent(&mut self, _now: SimTime, _size_bytes: u32, _inflight_bytes: u64) {}

    fn on_ack(&mut self, sample: &RateSample, ctx: &AckContext);

    fn on_loss(&mut self, _ctx: &LossContext) {}

    fn on_round_end(&mut self, _now: SimTime, _round: &RoundSnapshot) {}

    fn cwnd_bytes(&self) -> u64;

    /// Pacing rate in bytes per second; `None` means cwnd-clocked.
    fn pacing_rate(&self) -> Option<u64>;

    fn view(&self) -> CcView;

    /// For controllers that define pacing as gain * filtered bandwidth:
    /// the (gain, bandwidth) pair, so callers can assert the identity
    /// holds at every send. `None` once estimates exist means the
    /// controller makes no such promise.
    fn pacing_identity(&self) -> Option<(f64, u64)> {
        None
    }
}

/// Construction parameters shared by all controllers.
#[derive(Clone, Copy, Debug)]
pub struct CcParams {
    pub mss: u32,
    pub initial_cwnd: u64,
    pub seed: u64,
    pub flow_index: u64,
    /// RTprop compensation factor for `bbr_hsr`; `None` disables it.
    pub rtprop_lambda: Option<f64>,
}

impl CcParams {
    pub fn new(seed: u64, flow_index: u64) -> Self {
        CcParams {
            mss: crate::transport::MSS,
            initial_cwnd: crate::transport::INITIAL_CWND,
            seed,
            flow_index,
            rtprop_lambda: None,
        }
    }
}

/// The selectable algorithms.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CcAlgo {
    Reno,
    Cubic,
    Bbr,
    BbrPrime,
    BbrPlus,
    BbrHsr,
    Tsunami,
    Bbr2,
}

impl CcAlgo {
    pub const ALL: [CcAlgo; 8] = [
        CcAlgo::Reno,
        CcAlgo::Cubic,
        CcAlgo::Bbr,
        CcAlgo::BbrPrime,
        CcAlgo::BbrPlus,
        CcAlgo::BbrHsr,
        CcAlgo::Tsunami,
        CcAlgo::Bbr2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CcAlgo::Reno => "reno",
            CcAlgo::Cubic => "cubic",
            CcAlgo::Bbr => "bbr",
            CcAlgo::BbrPrime => "bbr_prime",
            CcAlgo::BbrPlus => "bbrplus",
            CcAlgo::BbrHsr => "bbr_hsr",
            CcAlgo::Tsunami => "tsunami",
            CcAlgo::Bbr2 => "bbr2",
        }
    }

    pub fn is_bbr_family(self) -> bool {
        !matches!(self, CcAlgo::Reno | CcAlgo::Cubic)
    }
}

impl FromStr for CcAlgo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reno" => Ok(CcAlgo::Reno),
            "cubic" => Ok(CcAlgo::Cubic),
            "bbr" => Ok(CcAlgo::Bbr),
            "bbr_prime" | "bbrprime" | "bbr'" => Ok(CcAlgo::BbrPrime),
            "bbrplus" | "bbr_plus" => Ok(CcAlgo::BbrPlus),
            "bbr_hsr" | "bbrhsr" | "bbr+" => Ok(CcAlgo::BbrHsr),
            "tsunami" => Ok(CcAlgo::Tsunami),
            "bbr2" | "bbrv2" => Ok(CcAlgo::Bbr2),
            other => Err(format!(
                "unknown algorithm {other:?} (expected one of: {})",
                CcAlgo::ALL.map(|a| a.as_str()).join(", ")
            )),
        }
    }
}

impl std::fmt::Display for CcAlgo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Instantiates a controller.
pub fn build(algo: CcAlgo, p: &CcParams) -> Box<dyn CongestionController> {
    match algo {
        CcAlgo::Reno => Box::new(Reno::new(p)),
        CcAlgo::Cubic => Box::new(Cubic::new(p)),
        CcAlgo::Bbr => Box::new(BbrV1::new(V1Variant::Bbr, p)),
        CcAlgo::BbrPrime => Box::new(BbrV1::new(V1Variant::BbrPrime, p)),
        CcAlgo::BbrPlus => Box::new(BbrV1::new(V1Variant::BbrPlus, p)),
        CcAlgo::BbrHsr => Box::new(BbrV1::new(V1Variant::BbrHsr, p)),
        CcAlgo::Tsunami => Box::new(BbrV1::new(V1Variant::Tsunami, p)),
        CcAlgo::Bbr2 => Box::new(Bbr2::new(p)),
    }
}
