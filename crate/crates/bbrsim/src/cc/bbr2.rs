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

//! BBR v2: loss-bounded probing. StartUp can exit on a lossy round,
//! ProbeBW runs the down -> cruise -> refill -> up phase cycle, and the
//! inflight_lo / inflight_hi / bw_lo bounds turn observed loss into
//! window and rate constraints instead of ignoring it.

use crate::cc::bbr::{DRAIN_PACING_GAIN, PROBE_RTT_HOLD, STARTUP_PACING_GAIN};
use crate::cc::filters::{FullBandwidthEstimator, MaxBandwidthFilter, MinRttFilter};
use crate::cc::{AckContext, CcParams, CcView, CongestionController, RoundSnapshot, CC_STREAM_BASE};
use crate::sim::{RngStream, SimTime};
use crate::transport::RateSample;

pub const LOSS_THRESHOLD: f64 = 0.02;
pub const K_BETA: f64 = 0.3;
pub const K_HEADROOM: f64 = 0.15;
/// StartUp loss exit needs more than this many losses in one round.
pub const STARTUP_LOSS_PKTS: u64 = 8;

const MIN_CWND_MSS: u64 = 4;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum State {
    Startup,
    Drain,
    Down,
    Cruise,
    Refill,
    Up,
    ProbeRtt,
}

pub struct Bbr2 {
    mss: u64,
    initial_cwnd: u64,

    bw: MaxBandwidthFilter,
    min_rtt: MinRttFilter,
    full: FullBandwidthEstimator,

    state: State,
    pacing_gain: f64,

    inflight_lo: Option<u64>,
    inflight_hi: Option<u64>,
    /// Rate-domain twin of inflight_lo: the windowed-max bandwidth cannot
    /// fall while the flow holds queue share, so loss has to cut the
    /// effective rate here.
    bw_lo: Option<u64>,
    /// End stamp of the previous round, giving each round a duration so
    /// the round's delivery rate can floor a bw_lo cut.
    last_round_end: SimTime,

    cruise_deadline: SimTime,
    interval_rng: RngStream,

    probe_up_acked: u64,
    probe_up_bytes: u64,
    probe_up_rounds: u32,

    round: u64,
    app_limited_round: bool,

    probe_rtt_cwnd: u64,
    probe_rtt_done_at: Option<SimTime>,
    probe_rtt_min_seen: Option<SimTime>,

    cwnd: u64,
}

impl Bbr2 {
    pub fn new(p: &CcParams) -> Self {
        Bbr2 {
            mss: p.mss as u64,
            initial_cwnd: p.initial_cwnd,
            bw: MaxBandwidthFilter::new(),
            min_rtt: MinRttFilter::new(),
            full: FullBandwidthEstimator::new(),
            state: State::Startup,
            pacing_gain: STARTUP_PACING_GAIN,
            inflight_lo: None,
            inflight_hi: None,
            bw_lo: None,
            last_round_end: SimTime::ZERO,
            cruise_deadline: SimTime::MAX,
            interval_rng: RngStream::new(p.seed, CC_STREAM_BASE + 2 * p.flow_index + 1),
            probe_up_acked: 0,
            probe_up_bytes: 0,
            probe_up_rounds: 0,
            round: 0,
            app_limited_round: false,
            probe_rtt_cwnd: 0,
            probe_rtt_done_at: None,
            probe_rtt_min_seen: None,
            cwnd: p.initial_cwnd,
        }
    }

    /// Estimated bandwidth with the loss bound applied. Bounds only the
    /// pacing rate: the window domain has its own loss bounds in
    /// inflight_lo and inflight_hi.
    fn eff_bw(&self) -> u64 {
        match self.bw_lo {
            Some(lo) => self.bw.get().min(lo),
            None => self.bw.get(),
        }
    }

    fn bdp(&self) -> u64 {
        let rtt = self.min_rtt.get().unwrap_or(SimTime::ZERO);
        (self.bw.get() as u128 * rtt.as_micros() as u128 / 1_000_000) as u64
    }

    fn min_cwnd(&self) -> u64 {
        MIN_CWND_MSS * self.mss
    }

    fn enter_drain(&mut self) {
        self.state = State::Drain;
        self.pacing_gain = DRAIN_PACING_GAIN;
    }

    fn enter_down(&mut self) {
        self.state = State::Down;
        self.pacing_gain = 0.75;
    }

    fn enter_cruise(&mut self, now: SimTime) {
        self.state = State::Cruise;
        self.pacing_gain = 1.0;
        self.cruise_deadline = now + SimTime::from_secs_f64(self.interval_rng.range_f64(2.0, 3.0));
    }

    fn enter_refill(&mut self) {
        self.state = State::Refill;
        self.pacing_gain = 1.0;
        // Stale conservative bounds would defeat the coming probe.
        self.inflight_lo = None;
        self.bw_lo = None;
    }

    fn enter_up(&mut self) {
        self.state = State::Up;
        self.pacing_gain = 1.25;
        self.probe_up_rounds = 0;
        self.probe_up_acked = 0;
        self.update_cwnd();
        // Seeds the slope at growth 1 (probe_up_bytes = cwnd), so hi
        // rises by about 1 MSS in the first round, then 2, 4, 8...
        self.raise_hi_slope();
    }

    fn enter_probe_rtt(&mut self) {
        self.probe_rtt_cwnd = (self.cwnd / 2).max(2 * self.mss);
        self.state = State::ProbeRtt;
        self.pacing_gain = 1.0;
        self.probe_rtt_done_at = None;
        self.probe_rtt_min_seen = None;
    }

    fn probe_rtt_tick(&mut self, now: SimTime, inflight: u64) {
        if self.probe_rtt_done_at.is_none() && inflight <= self.probe_rtt_cwnd {
            self.probe_rtt_done_at = Some(now + PROBE_RTT_HOLD);
        }
        if let Some(done) = self.probe_rtt_done_at {
            if now >= done {
                self.min_rtt.refresh(now, self.probe_rtt_min_seen);
                if self.full.reached() {
                    self.enter_cruise(now);
                } else {
                    self.state = State::Startup;
                    self.pacing_gain = STARTUP_PACING_GAIN;
                }
            }
        }
    }

    /// Algorithm-2 ack step: each probe_up_bytes of acked data buys one
    /// MSS of inflight_hi, carrying the remainder forward.
    fn probe_hi_on_ack(&mut self, acked_bytes: u64) {
        let Some(hi) = self.inflight_hi else { return };
        self.probe_up_acked += acked_bytes;
        if self.probe_up_acked >= self.probe_up_bytes && self.probe_up_bytes > 0 {
            let delta = self.probe_up_acked / self.probe_up_bytes;
            self.probe_up_acked -= delta * self.probe_up_bytes;
            self.inflight_hi = Some(hi + delta * self.mss);
        }
    }

    /// Algorithm-2 round step: halve probe_up_bytes each round so the
    /// per-round hi growth doubles, saturating the shift at 30.
    fn raise_hi_slope(&mut self) {
        let growth = 1u64 << self.probe_up_rounds;
        self.probe_up_rounds = (self.probe_up_rounds + 1).min(30);
        self.probe_up_bytes = (self.cwnd / growth).max(self.mss);
    }

    /// Loss rate above threshold in the ended round: clamp hi to what
    /// the round actually had in flight.
    fn inflight_too_high(&mut self, round: &RoundSnapshot) -> bool {
        if round.sent_pkts == 0 || round.loss_rate() <= LOSS_THRESHOLD {
            return false;
        }
        let observed = round.max_inflight_bytes.max(self.min_cwnd());
        self.inflight_hi = Some(match self.inflight_hi {
            Some(hi) => hi.min(observed),
            None => observed,
        });
        true
    }

    /// Eq (8) in both domains on a lossy round: the windowed bound cut by
    /// kBeta, floored at what the round actually delivered.
    fn update_lower_bounds(&mut self, round: &RoundSnapshot, round_rate: u64) {
        if round.lost_pkts == 0 {
            return;
        }
        self.inflight_lo = Some(match self.inflight_lo {
            None => self.cwnd,
            Some(lo) => round.delivered_bytes.max((lo as f64 * (1.0 - K_BETA)) as u64),
        });
        self.bw_lo = Some(match self.bw_lo {
            None => self.bw.get(),
            Some(lo) => round_rate.max((lo as f64 * (1.0 - K_BETA)) as u64),
        });
    }

    fn update_cwnd(&mut self) {
        let two_bdp = (2 * self.bdp()).max(self.min_cwnd());
        let lo = self.inflight_lo.unwrap_or(u64::MAX);
        let hi = self.inflight_hi.unwrap_or(u64::MAX);
        self.cwnd = match self.state {
            State::Startup => two_bdp.max(self.initial_cwnd),
            State::Drain | State::Down => two_bdp.min(lo).min(hi).max(self.min_cwnd()),
            State::Cruise => match self.inflight_hi {
                Some(hi) => lo.min((hi as f64 * (1.0 - K_HEADROOM)) as u64),
                None => two_bdp.min(lo),
            },
            State::Refill | State::Up => self.inflight_hi.unwrap_or(two_bdp),
            State::ProbeRtt => self.probe_rtt_cwnd,
        };
    }
}

impl CongestionController for Bbr2 {
    fn name(&self) -> &'static str {
        "bbr2"
    }

    fn on_ack(&mut self, sample: &RateSample, ctx: &AckContext) {
        if sample.bw_bytes_per_sec > 0 {
            self.bw
                .update(self.round, sample.bw_bytes_per_sec, sample.is_app_limited);
        }
        if !sample.rtt.is_zero() {
            self.min_rtt.update(sample.rtt, ctx.now);
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
                    self.enter_down();
                }
            }
            State::Down => {
                if ctx.inflight_bytes <= self.bdp() {
                    self.enter_cruise(ctx.now);
                }
            }
            State::Cruise => {
                if ctx.now >= self.cruise_deadline {
                    self.enter_refill();
                }
            }
            State::Refill => {}
            State::Up => {
                self.probe_hi_on_ack(ctx.acked_bytes as u64);
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

    fn on_round_end(&mut self, now: SimTime, round: &RoundSnapshot) {
        self.round += 1;
        let dur = now.saturating_sub(self.last_round_end);
        let round_rate = if dur.is_zero() {
            0
        } else {
            (round.delivered_bytes as u128 * 1_000_000 / dur.as_micros() as u128) as u64
        };
        match self.state {
            State::Startup => {
                self.full.on_round(self.bw.get(), self.app_limited_round);
                let lossy = round.lost_pkts > STARTUP_LOSS_PKTS
                    && round.loss_rate() > LOSS_THRESHOLD;
                if lossy {
                    self.inflight_hi = Some(self.bdp().max(self.min_cwnd()));
                    self.enter_drain();
                } else if self.full.reached() {
                    self.enter_drain();
                }
            }
            State::Down => {
                self.update_lower_bounds(round, round_rate);
                if self.inflight_too_high(round) {
                    self.enter_cruise(now);
                }
            }
            State::Cruise => {
                self.update_lower_bounds(round, round_rate);
                self.inflight_too_high(round);
            }
            State::Refill => {
                self.update_lower_bounds(round, round_rate);
                self.enter_up();
            }
            State::Up => {
                self.update_lower_bounds(round, round_rate);
                let too_high = self.inflight_too_high(round);
                let probe_filled = round.lost_pkts > 0
                    && round.max_inflight_bytes as f64 >= 1.25 * self.bdp() as f64;
                if too_high || probe_filled {
                    self.enter_down();
                } else {
                    self.raise_hi_slope();
                }
            }
            State::Drain | State::ProbeRtt => {}
        }
        self.app_limited_round = false;
        self.last_round_end = now;
        self.update_cwnd();
    }

    fn cwnd_bytes(&self) -> u64 {
        self.cwnd
    }

    fn pacing_rate(&self) -> Option<u64> {
        let bw = self.eff_bw();
        if bw == 0 {
            return Some(self.initial_cwnd * 1000);
        }
        Some((self.pacing_gain * bw as f64) as u64)
    }

    fn view(&self) -> CcView {
        CcView {
            mode: match self.state {
                State::Startup => "startup",
                State::Drain => "drain",
                State::Down => "probe_bw_down",
                State::Cruise => "probe_bw_cruise",
                State::Refill => "probe_bw_refill",
                State::Up => "probe_bw_up",
                State::ProbeRtt => "probe_rtt",
            },
            pacing_gain: self.pacing_gain,
            bw_bytes_per_sec: self.eff_bw(),
            cwnd_bytes: self.cwnd,
        }
    }

    fn pacing_identity(&self) -> Option<(f64, u64)> {
        let bw = self.eff_bw();
        if bw == 0 {
            None
        } else {
            Some((self.pacing_gain, bw))
        }
    }
}
