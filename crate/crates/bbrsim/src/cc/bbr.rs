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

//! The BBR v1 family: one state machine (StartUp, Drain, ProbeBW,
//! ProbeRTT) with five ProbeBW gain-cycling policies.
//!
//! * `bbr`: [1.25, 0.75, 1, ...]; every slot lasts one RTT_min and the
//!   probe-down slot also ends early once inflight <= BDP.
//! * `bbr_prime`: same table, but the probe-down slot ends only when
//!   inflight <= BDP, with no timer exit.
//! * `bbrplus`: gain moves through {1.25, 0.75, 1.0} inside a cycle of
//!   randomized length (2..8 RTT_min), reacting to queue buildup and
//!   loss instead of slot timers.
//! * `bbr_hsr`: [1.5, 0.5] alternating, BBR slot timing; optional
//!   RTprop variance compensation.
//! * `tsunami`: [1.5, 0.75, 1.25 x 6], BBR slot timing.

use std::collections::VecDeque;

use crate::cc::filters::{FullBandwidthEstimator, MaxBandwidthFilter, MinRttFilter};
use crate::cc::{AckContext, CcParams, CcView, CongestionController, RoundSnapshot, CC_STREAM_BASE};
use crate::sim::{RngStream, SimTime};
use crate::transport::RateSample;

pub const STARTUP_PACING_GAIN: f64 = 2.0 / std::f64::consts::LN_2;
pub const DRAIN_PACING_GAIN: f64 = std::f64::consts::LN_2 / 2.0;
pub const CWND_GAIN: f64 = 2.0;
pub const PROBE_RTT_HOLD: SimTime = SimTime::from_millis(200);
pub const PROBE_RTT_CWND_MSS: u64 = 4;

const GAIN_CYCLE_LEN: u64 = 8;
const CYCLE_RAND: u32 = 7;

const TABLE_STD: [f64; 8] = [1.25, 0.75, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
const TABLE_HSR: [f64; 8] = [1.5, 0.5, 1.5, 0.5, 1.5, 0.5, 1.5, 0.5];
const TABLE_TSUNAMI: [f64; 8] = [1.5, 0.75, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25];

/// Samples kept for the RTprop variance term (Eq-style compensation of
/// the min RTT for the `bbr_hsr` variant, off by default).
const RTT_VAR_WINDOW: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum V1Variant {
    Bbr,
    BbrPrime,
    BbrPlus,
    BbrHsr,
    Tsunami,
}

impl V1Variant {
    fn gain_table(self) -> &'static [f64] {
        match self {
            V1Variant::Bbr | V1Variant::BbrPrime | V1Variant::BbrPlus => &TABLE_STD,
            V1Variant::BbrHsr => &TABLE_HSR,
            V1Variant::Tsunami => &TABLE_TSUNAMI,
        }
    }

    fn name(self) -> &'static str {
        match self {
            V1Variant::Bbr => "bbr",
            V1Variant::BbrPrime => "bbr_prime",
            V1Variant::BbrPlus => "bbrplus",
            V1Variant::BbrHsr => "bbr_hsr",
            V1Variant::Tsunami => "tsunami",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum State {
    Startup,
    Drain,
    ProbeBw,
    ProbeRtt,
}

pub struct BbrV1 {
    variant: V1Variant,
    mss: u64,
    initial_cwnd: u64,

    bw: MaxBandwidthFilter,
    min_rtt: MinRttFilter,
    full: FullBandwidthEstimator,

    state: State,
    pacing_gain: f64,
    cycle_idx: usize,
    cycle_stamp: SimTime,
    /// BBRPlus cycle length in RTT_min units, redrawn each cycle.
    cycle_len: u64,
    cycle_rng: RngStream,

    round: u64,
    app_limited_round: bool,

    probe_rtt_done_at: Option<SimTime>,
    probe_rtt_min_seen: Option<SimTime>,

    rtprop_lambda: Option<f64>,
    rtt_window: VecDeque<SimTime>,

    cwnd: u64,
}

impl BbrV1 {
    pub fn new(variant: V1Variant, p: &CcParams) -> Self {
        BbrV1 {
            variant,
            mss: p.mss as u64,
            initial_cwnd: p.initial_cwnd,
            bw: MaxBandwidthFilter::new(),
            min_rtt: MinRttFilter::new(),
            full: FullBandwidthEstimator::new(),
            state: State::Startup,
            pacing_gain: STARTUP_PACING_GAIN,
            cycle_idx: 0,
            cycle_stamp: SimTime::ZERO,
            cycle_len: GAIN_CYCLE_LEN,
            cycle_rng: RngStream::new(p.seed, CC_STREAM_BASE + 2 * p.flow_index),
            round: 0,
            app_limited_round: false,
            probe_rtt_done_at: None,
            probe_rtt_min_seen: None,
            rtprop_lambda: if variant == V1Variant::BbrHsr { p.rtprop_lambda } else { None },
            rtt_window: VecDeque::new(),
            cwnd: p.initial_cwnd,
        }
    }

    /// RTprop used for BDP: the filtered min, plus the variance term
    /// when compensation is enabled.
    fn rtprop(&self) -> SimTime {
        let min = self.min_rtt.get().unwrap_or(SimTime::ZERO);
        match self.rtprop_lambda {
            Some(lambda) if self.rtt_window.len() >= 2 => {
                let micros: Vec<f64> =
                    self.rtt_window.iter().map(|r| r.as_micros() as f64).collect();
                min + compensation_term(&micros, lambda)
            }
            _ => min,
        }
    }

    fn bdp(&self) -> u64 {
        let rtprop = self.rtprop();
        (self.bw.get() as u128 * rtprop.as_micros() as u128 / 1_000_000) as u64
    }

    fn enter_drain(&mut self) {
        self.state = State::Drain;
        self.pacing_gain = DRAIN_PACING_GAIN;
    }

    fn enter_probe_bw(&mut self, now: SimTime) {
        self.state = State::ProbeBw;
        self.cycle_stamp = now;
        if self.variant == V1Variant::BbrPlus {
            self.cycle_len = GAIN_CYCLE_LEN - self.cycle_rng.next_mod(CYCLE_RAND) as u64;
            self.pacing_gain = 1.25;
            return;
        }
        // Start anywhere but a probe-down slot, so simultaneous flows
        // do not phase-lock.
        let table = self.variant.gain_table();
        let candidates: Vec<usize> =
            (0..table.len()).filter(|&i| table[i] >= 1.0).collect();
        self.cycle_idx = candidates[self.cycle_rng.next_mod(candidates.len() as u32) as usize];
        self.pacing_gain = table[self.cycle_idx];
    }

    fn enter_probe_rtt(&mut self) {
        self.state = State::ProbeRtt;
        self.pacing_gain = 1.0;
        self.probe_rtt_done_at = None;
        self.probe_rtt_min_seen = None;
    }

    fn probe_rtt_tick(&mut self, now: SimTime, inflight: u64) {
        if self.probe_rtt_done_at.is_none() && inflight <= PROBE_RTT_CWND_MSS * self.mss {
            self.probe_rtt_done_at = Some(now + PROBE_RTT_HOLD);
        }
        if let Some(done) = self.probe_rtt_done_at {
            if now >= done {
                self.min_rtt.refresh(now, self.probe_rtt_min_seen);
                if self.full.reached() {
                    self.enter_probe_bw(now);
                } else {
                    self.state = State::Startup;
                    self.pacing_gain = STARTUP_PACING_GAIN;
                }
            }
        }
    }

    fn advance_cycle(&mut self, now: SimTime, inflight: u64, has_loss: bool) {
        let Some(rtt) = self.min_rtt.get() else { return };
        if self.variant == V1Variant::BbrPlus {
            self.advance_cycle_bbrplus(now, rtt, inflight, has_loss);
            return;
        }
        let table = self.variant.gain_table();
        let elapsed = now.saturating_sub(self.cycle_stamp);
        let gain = table[self.cycle_idx];
        let advance = if gain < 1.0 {
            match self.variant {
                // Probe-down holds until the queue is actually drained.
                V1Variant::BbrPrime => inflight <= self.bdp(),
                _ => elapsed >= rtt || inflight <= self.bdp(),
            }
        } else {
            elapsed >= rtt
        };
        if advance {
            self.cycle_idx = (self.cycle_idx + 1) % table.len();
            self.cycle_stamp = now;
            self.pacing_gain = table[self.cycle_idx];
        }
    }

    /// The BBRPlus gain update, kept in pseudocode order: cycle restart
    /// first, then the drain-complete lift to 1.0, then the two
    /// sequential overload checks.
    fn advance_cycle_bbrplus(&mut self, now: SimTime, rtt: SimTime, inflight: u64, has_loss: bool) {
        let elapsed = now.saturating_sub(self.cycle_stamp);
        if elapsed.as_micros() > self.cycle_len.saturating_mul(rtt.as_micros()) {
            self.cycle_stamp = now;
            self.cycle_len = GAIN_CYCLE_LEN - self.cycle_rng.next_mod(CYCLE_RAND) as u64;
            self.pacing_gain = 1.25;
            return;
        }
        if self.pacing_gain == 1.0 {
            return;
        }
        let bdp = self.bdp();
        if self.pacing_gain < 1.0 && inflight <= bdp {
            self.pacing_gain = 1.0;
        }
        if elapsed > rtt && (inflight as f64 > 1.25 * bdp as f64 || has_loss) {
            self.pacing_gain = 0.75;
        }
    }

    fn update_cwnd(&mut self) {
        let bdp = self.bdp();
        let target = (CWND_GAIN * bdp as f64) as u64;
        self.cwnd = match self.state {
            State::Startup => target.max(self.initial_cwnd),
            State::Drain | State::ProbeBw => target.max(PROBE_RTT_CWND_MSS * self.mss),
            State::ProbeRtt => PROBE_RTT_CWND_MSS * self.mss,
        };
    }
}

impl CongestionController for BbrV1 {
    fn name(&self) -> &'static str {
        self.variant.name()
    }

    fn on_ack(&mut self, sample: &RateSample, ctx: &AckContext) {
        if sample.bw_bytes_per_sec > 0 {
            self.bw
                .update(self.round, sample.bw_bytes_per_sec, sample.is_app_limited);
        }
        if !sample.rtt.is_zero() {
            self.min_rtt.update(sample.rtt, ctx.now);
            if self.rtprop_lambda.is_some() {
                if self.rtt_window.len() == RTT_VAR_WINDOW {
                    self.rtt_window.pop_front();
                }
                self.rtt_window.push_back(sample.rtt);
            }
            if self.state == State::ProbeRtt {
                self.probe_rtt_min_seen = Some(match self.probe_rtt_min_seen {
                    Some(m) => m.min(sample.rtt),
                    None => sample.rtt,
                });
            }
        }
        if sample.is_app_limited {
            self.app_limited_round = true;
        }

        match self.state {
            State::Startup => {}
            State::Drain => {
                if ctx.inflight_bytes <= self.bdp() {
                    self.enter_probe_bw(ctx.now);
                }
            }
            State::ProbeBw => {
                self.advance_cycle(ctx.now, ctx.inflight_bytes, ctx.newly_lost_bytes > 0);
            }
            State::ProbeRtt => {
                self.probe_rtt_tick(ctx.now, ctx.inflight_bytes);
            }
        }

        if self.state != State::ProbeRtt && self.min_rtt.is_expired(ctx.now) {
            self.enter_probe_rtt();
            self.probe_rtt_tick(ctx.now, ctx.inflight_bytes);
        }

        self.update_cwnd();
    }

    fn on_round_end(&mut self, _now: SimTime, _round: &RoundSnapshot) {
        self.round += 1;
        if self.state == State::Startup {
            self.full.on_round(self.bw.get(), self.app_limited_round);
            if self.full.reached() {
                self.enter_drain();
            }
        }
        self.app_limited_round = false;
    }

    fn cwnd_bytes(&self) -> u64 {
        self.cwnd
    }

    fn pacing_rate(&self) -> Option<u64> {
        let bw = self.bw.get();
        if bw == 0 {
            // No estimate yet: let the initial window go out unpaced.
            return Some(self.initial_cwnd * 1000);
        }
        Some((self.pacing_gain * bw as f64) as u64)
    }

    fn view(&self) -> CcView {
        CcView {
            mode: match self.state {
                State::Startup => "startup",
                State::Drain => "drain",
                State::ProbeBw => "probe_bw",
                State::ProbeRtt => "probe_rtt",
            },
            pacing_gain: self.pacing_gain,
            bw_bytes_per_sec: self.bw.get(),
            cwnd_bytes: self.cwnd,
        }
    }

    fn pacing_identity(&self) -> Option<(f64, u64)> {
        let bw = self.bw.get();
        if bw == 0 {
            None
        } else {
            Some((self.pacing_gain, bw))
        }
    }
}

/// lambda * population stddev of the sample window, as a time delta.
fn compensation_term(micros: &[f64], lambda: f64) -> SimTime {
    let n = micros.len() as f64;
    let mean = micros.iter().sum::<f64>() / n;
    let var = micros.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    SimTime::from_micros((lambda * var.sqrt()).round() as u64)
}
