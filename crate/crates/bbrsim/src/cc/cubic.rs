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

//! Cubic: window growth follows W(t) = C(t - K)^3 + w_max between
//! congestion events, floored by a Reno-friendly estimate. No hystart,
//! no fast convergence.

use crate::cc::{AckContext, CcParams, CcView, CongestionController, LossContext};
use crate::sim::SimTime;
use crate::transport::RateSample;

pub const CUBIC_C: f64 = 0.4;
pub const CUBIC_BETA: f64 = 0.7;

/// W(t) in MSS units: C(t - K)^3 + w_max, with t and K in seconds.
pub(crate) fn cubic_window(w_max_mss: f64, t_secs: f64, k_secs: f64) -> f64 {
    CUBIC_C * (t_secs - k_secs).powi(3) + w_max_mss
}

/// Time to regain w_max after a beta reduction, in seconds.
pub(crate) fn cubic_k(w_max_mss: f64) -> f64 {
    (w_max_mss * (1.0 - CUBIC_BETA) / CUBIC_C).cbrt()
}

/// Reno-friendly window estimate in MSS units.
pub(crate) fn friendly_window(w_max_mss: f64, t_secs: f64, rtt_secs: f64) -> f64 {
    let slope = 3.0 * (1.0 - CUBIC_BETA) / (1.0 + CUBIC_BETA);
    w_max_mss * CUBIC_BETA + slope * (t_secs / rtt_secs.max(1e-6))
}

pub struct Cubic {
    mss: u64,
    cwnd: u64,
    ssthresh: u64,
    w_max_mss: f64,
    k_secs: f64,
    /// Established at the first ack after a reduction, reset on loss.
    epoch_start: Option<SimTime>,
    recovery_end: Option<u64>,
    srtt: Option<SimTime>,
}

impl Cubic {
    pub fn new(p: &CcParams) -> Self {
        Cubic {
            mss: p.mss as u64,
            cwnd: p.initial_cwnd,
            ssthresh: u64::MAX,
            w_max_mss: 0.0,
            k_secs: 0.0,
            epoch_start: None,
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

    fn note_rtt(&mut self, rtt: SimTime) {
        if rtt.is_zero() {
            return;
        }
        self.srtt = Some(match self.srtt {
            None => rtt,
            Some(s) => SimTime::from_micros(
                (s.as_micros() as f64 * 0.875 + rtt.as_micros() as f64 * 0.125) as u64,
            ),
        });
    }
}

impl CongestionController for Cubic {
    fn name(&self) -> &'static str {
        "cubic"
    }

    fn on_ack(&mut self, sample: &RateSample, ctx: &AckContext) {
        self.note_rtt(sample.rtt);
        if self.in_recovery(ctx.largest_acked) {
            return;
        }
        let acked = ctx.acked_bytes as u64;
        if self.cwnd < self.ssthresh {
            self.cwnd += acked;
            return;
        }
        let epoch = *self.epoch_start.get_or_insert(ctx.now);
        let t_secs = (ctx.now.saturating_sub(epoch)).as_secs_f64();
        let rtt_secs = self.srtt.map_or(0.1, |s| s.as_secs_f64());
        // The cubic target looks one RTT ahead, so growth does not
        // stall on the plateau around t = K.
        let target_mss = cubic_window(self.w_max_mss, t_secs + rtt_secs, self.k_secs)
            .max(friendly_window(self.w_max_mss, t_secs, rtt_secs));
        let target = (target_mss * self.mss as f64) as u64;
        if target > self.cwnd {
            let grow = ((target - self.cwnd) * acked / self.cwnd.max(1)).min(acked);
            self.cwnd += grow;
        }
    }

    fn on_loss(&mut self, ctx: &LossContext) {
        if self.in_recovery(ctx.largest_acked) {
            return;
        }
        self.w_max_mss = self.cwnd as f64 / self.mss as f64;
        self.k_secs = cubic_k(self.w_max_mss);
        self.cwnd = ((self.cwnd as f64 * CUBIC_BETA) as u64).max(2 * self.mss);
        self.ssthresh = self.cwnd;
        self.epoch_start = None;
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
            Some(s) if !s.is_zero() => {
                (self.cwnd as u128 * 1_000_000 / s.as_micros() as u128) as u64
            }
            _ => 0,
        };
        CcView {
            mode: if self.cwnd < self.ssthresh { "slow_start" } else { "cubic" },
            pacing_gain: 1.0,
            bw_bytes_per_sec: bw,
            cwnd_bytes: self.cwnd,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::MSS;

    fn params() -> CcParams {
        CcParams::new(1, 0)
    }

    fn sample(rtt_ms: u64) -> RateSample {
        RateSample {
            delivered_bytes: 1440,
            interval: SimTime::from_millis(1),
            bw_bytes_per_sec: 1_440_000,
            rtt: SimTime::from_millis(rtt_ms),
            is_app_limited: false,
            is_round_end: false,
            bytes_lost_in_round: 0,
        }
    }

    fn ack_ctx(now: SimTime, acked: u32, largest: u64) -> AckContext {
        AckContext {
            now,
            inflight_bytes: 0,
            acked_bytes: acked,
            newly_lost_bytes: 0,
            largest_acked: largest,
        }
    }

    #[test]
    fn k_for_w_max_100_mss() {
        // K = cuberoot(100 * 0.3 / 0.4) = cuberoot(75) ~= 4.217 s.
        let k = cubic_k(100.0);
        assert!((k - 4.2171633).abs() < 1e-6, "K = {k}");
    }

    #[test]
    fn window_at_epoch_start_is_beta_w_max() {
        // W(0) = w_max - C*K^3 = beta * w_max.
        let w0 = cubic_window(100.0, 0.0, cubic_k(100.0));
        assert!((w0 - 70.0).abs() < 1e-9, "W(0) = {w0}");
    }

    #[test]
    fn window_at_k_is_w_max() {
        let k = cubic_k(100.0);
        let w = cubic_window(100.0, k, k);
        assert!((w - 100.0).abs() < 1e-9);
    }

    #[test]
    fn window_is_continuous_around_k() {
        let k = cubic_k(40.0);
        let eps = 1e-6;
        let lo = cubic_window(40.0, k - eps, k);
        let hi = cubic_window(40.0, k + eps, k);
        assert!((hi - lo).abs() < 1e-3);
    }

    #[test]
    fn reduction_is_exactly_beta() {
        let mut cc = Cubic::new(&params());
        cc.cwnd = 100 * MSS as u64;
        cc.ssthresh = cc.cwnd;
        cc.on_loss(&LossContext {
            now: SimTime::from_secs(10),
            lost_bytes: 1440,
            lost_packets: 1,
            largest_lost: 50,
            largest_acked: 60,
            next_pn: 120,
        });
        assert_eq!(cc.cwnd_bytes(), (100.0 * CUBIC_BETA) as u64 * MSS as u64);
        assert!((cc.w_max_mss - 100.0).abs() < 1e-9);
        assert!((cc.k_secs - 4.2171633).abs() < 1e-6);
    }

    #[test]
    fn growth_regains_w_max_near_k() {
        let mut cc = Cubic::new(&params());
        cc.cwnd = 100 * MSS as u64;
        cc.ssthresh = cc.cwnd;
        cc.srtt = Some(SimTime::from_millis(100));
        let t0 = SimTime::from_secs(10);
        cc.on_loss(&LossContext {
            now: t0,
            lost_bytes: 1440,
            lost_packets: 1,
            largest_lost: 50,
            largest_acked: 60,
            next_pn: 120,
        });
        // First ack after recovery pins the epoch; ack a full window
        // worth of packets every 100 ms until K has elapsed.
        let mut now = t0 + SimTime::from_millis(100);
        let mut pn = 120;
        while now < t0 + SimTime::from_micros(4_400_000) {
            let acks = cc.cwnd_bytes() / MSS as u64;
            for _ in 0..acks {
                cc.on_ack(&sample(100), &ack_ctx(now, MSS, pn));
                pn += 1;
            }
            now += SimTime::from_millis(100);
        }
        let w_mss = cc.cwnd_bytes() as f64 / MSS as f64;
        assert!((w_mss - 100.0).abs() < 5.0, "w = {w_mss} MSS");
    }

    #[test]
    fn per_ack_growth_never_exceeds_acked_bytes() {
        let mut cc = Cubic::new(&params());
        cc.cwnd = 10 * MSS as u64;
        cc.ssthresh = cc.cwnd;
        cc.w_max_mss = 200.0;
        cc.k_secs = cubic_k(200.0);
        // Deep below the cubic target the increment still caps at the
        // acked bytes (slow-start-like max slope).
        let before = cc.cwnd_bytes();
        cc.on_ack(&sample(100), &ack_ctx(SimTime::from_secs(30), MSS, 5));
        assert!(cc.cwnd_bytes() - before <= MSS as u64);
    }

    #[test]
    fn friendly_floor_tracks_reno_slope() {
        // At t = 0 the friendly estimate equals beta * w_max and grows
        // 3(1-b)/(1+b) MSS per RTT, about 0.529 MSS per RTT.
        let w0 = friendly_window(100.0, 0.0, 0.1);
        assert!((w0 - 70.0).abs() < 1e-9);
        let w1 = friendly_window(100.0, 0.1, 0.1);
        assert!((w1 - w0 - 3.0 * 0.3 / 1.7).abs() < 1e-9);
    }

    #[test]
    fn cubic_is_cwnd_clocked() {
        let cc = Cubic::new(&params());
        assert!(cc.pacing_rate().is_none());
        assert!(cc.pacing_identity().is_none());
    }
}
