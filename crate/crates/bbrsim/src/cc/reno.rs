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

//! Reno: slow start doubling, AIMD congestion avoidance, multiplicative
//! decrease to half on loss, at most one decrease per round trip.

use crate::cc::{AckContext, CcParams, CcView, CongestionController, LossContext};
use crate::sim::SimTime;
use crate::transport::RateSample;

pub struct Reno {
    mss: u64,
    cwnd: u64,
    ssthresh: u64,
    /// Packet number at which the current recovery round ends; losses
    /// below this already triggered a reduction.
    recovery_end: Option<u64>,
    /// Smoothed RTT, kept only so the trace view can report an
    /// effective rate (cwnd per RTT); never drives the window.
    srtt: Option<SimTime>,
}

impl Reno {
    pub fn new(p: &CcParams) -> Self {
        Reno {
            mss: p.mss as u64,
            cwnd: p.initial_cwnd,
            ssthresh: u64::MAX,
            recovery_end: None,
            srtt: None,
        }
    }

    fn in_recovery(&self, largest_acked: u64) -> bool {
        match self.recovery_end {
            Some(end) => largest_acked < end,
            None => false,
        }
    }
}

impl CongestionController for Reno {
    fn name(&self) -> &'static str {
        "reno"
    }

    fn on_ack(&mut self, sample: &RateSample, ctx: &AckContext) {
        self.srtt = Some(match self.srtt {
            None => sample.rtt,
            Some(s) => SimTime::from_micros((7 * s.as_micros() + sample.rtt.as_micros()) / 8),
        });
        if self.in_recovery(ctx.largest_acked) {
            return;
        }
        let acked = ctx.acked_bytes as u64;
        if self.cwnd < self.ssthresh {
            self.cwnd += acked;
        } else {
            self.cwnd += (self.mss * acked) / self.cwnd.max(1);
        }
    }

    fn on_loss(&mut self, ctx: &LossContext) {
        if self.in_recovery(ctx.largest_acked) {
            return;
        }
        self.ssthresh = (self.cwnd / 2).max(2 * self.mss);
        self.cwnd = self.ssthresh;
        self.recovery_end = Some(ctx.next_pn);
    }

    fn cwnd_bytes(&self) -> u64 {
        self.cwnd
    }

    fn pacing_rate(&self) -> Option<u64> {
        None
    }

    fn view(&self) -> CcView {
        let bw = match self.srtt {
            Some(s) if !s.is_zero() => self.cwnd.saturating_mul(1_000_000) / s.as_micros(),
            _ => 0,
        };
        CcView {
            mode: if self.cwnd < self.ssthresh { "slow_start" } else { "avoidance" },
            pacing_gain: 1.0,
            bw_bytes_per_sec: bw,
            cwnd_bytes: self.cwnd,
        }
    }
}

#[allow(dead_code)]
fn _assert_object_safe(_: &dyn CongestionController) {}
