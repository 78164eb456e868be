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

//! Estimation filters shared by the BBR family: the windowed max
//! bandwidth filter, the min RTT filter with 10 s expiry, and the
//! full-bandwidth plateau detector used to leave StartUp.

use std::collections::VecDeque;

use crate::sim::SimTime;

/// Bandwidth samples older than this many packet-timed rounds fall out
/// of the max filter.
pub const BW_WINDOW_ROUNDS: u64 = 10;

/// An un-refreshed min RTT older than this triggers ProbeRTT.
pub const MIN_RTT_EXPIRY: SimTime = SimTime::from_secs(10);

/// StartUp ends after this many rounds without 1.25x bandwidth growth.
pub const FULL_BW_ROUNDS: u8 = 3;

/// Windowed running max over (round, bandwidth) samples. The deque is
/// monotone decreasing in bandwidth, so the front is always the max of
/// the samples still inside the window.
#[derive(Clone, Debug, Default)]
pub struct MaxBandwidthFilter {
    entries: VecDeque<(u64, u64)>,
}

impl MaxBandwidthFilter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds one delivery-rate sample. App-limited samples only count
    /// when they exceed the current max (they understate capacity, so a
    /// higher reading is still genuine).
    pub fn update(&mut self, round: u64, bw_bytes_per_sec: u64, is_app_limited: bool) {
        if is_app_limited && bw_bytes_per_sec <= self.get() {
            return;
        }
        while self
            .entries
            .front()
            .is_some_and(|&(r, _)| r + BW_WINDOW_ROUNDS <= round)
        {
            self.entries.pop_front();
        }
        while self
            .entries
            .back()
            .is_some_and(|&(_, bw)| bw <= bw_bytes_per_sec)
        {
            self.entries.pop_back();
        }
        self.entries.push_back((round, bw_bytes_per_sec));
    }

    /// Current windowed max, 0 before any sample.
    pub fn get(&self) -> u64 {
        self.entries.front().map_or(0, |&(_, bw)| bw)
    }
}

/// Min RTT with a 10 s freshness stamp. A sample that ties the minimum
/// counts as seeing it again and restamps: the expiry asks whether the
/// floor is still reachable, not whether a new record was set. A flow
/// whose queue drains to empty keeps its stamp alive and skips ProbeRTT;
/// one holding a standing queue stops tying the floor and expires.
#[derive(Clone, Copy, Debug, Default)]
pub struct MinRttFilter {
    rtt_min: Option<SimTime>,
    stamped_at: SimTime,
}

impl MinRttFilter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, rtt_sample: SimTime, now: SimTime) {
        if rtt_sample.is_zero() {
            return;
        }
        match self.rtt_min {
            Some(min) if rtt_sample > min => {}
            _ => {
                self.rtt_min = Some(rtt_sample);
                self.stamped_at = now;
            }
        }
    }

    pub fn get(&self) -> Option<SimTime> {
        self.rtt_min
    }

    pub fn is_expired(&self, now: SimTime) -> bool {
        self.rtt_min.is_some() && now.saturating_sub(self.stamped_at) > MIN_RTT_EXPIRY
    }

    /// ProbeRTT exit: adopt the minimum observed while the queue was
    /// held drained (when one exists) and restamp.
    pub fn refresh(&mut self, now: SimTime, observed: Option<SimTime>) {
        if let Some(obs) = observed {
            self.rtt_min = Some(obs);
        }
        self.stamped_at = now;
    }
}

/// Detects the StartUp bandwidth plateau: growth below 1.25x for three
/// consecutive non-app-limited rounds means the pipe is full.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullBandwidthEstimator {
    full_bw: u64,
    count: u8,
    reached: bool,
}

impl FullBandwidthEstimator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn on_round(&mut self, bw_bytes_per_sec: u64, round_app_limited: bool) {
        if self.reached || round_app_limited {
            return;
        }
        if bw_bytes_per_sec as u128 * 4 >= self.full_bw as u128 * 5 {
            self.full_bw = bw_bytes_per_sec;
            self.count = 0;
        } else {
            self.count += 1;
            if self.count >= FULL_BW_ROUNDS {
                self.reached = true;
            }
        }
    }

    pub fn reached(&self) -> bool {
        self.reached
    }

    pub fn full_bw(&self) -> u64 {
        self.full_bw
    }
}
