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

use crate::sim::{transfer_time, SimTime};

/// Departure-time pacer: `departure = max(now, last_departure + size/rate)`.
///
/// After idle the first packet leaves immediately and the clamp to
/// `now` caps any catch-up burst at two back-to-back packets.
#[derive(Debug, Default)]
pub struct Pacer {
    last_departure: Option<SimTime>,
}

impl Pacer {
    pub fn new() -> Self {
        Pacer::default()
    }

    /// Earliest permitted departure for a packet of `size_bytes` at the
    /// current `rate` in bytes per second.
    pub fn next_departure(&self, now: SimTime, size_bytes: u32, rate: u64) -> SimTime {
        match self.last_departure {
            None => now,
            Some(last) => now.max(last + transfer_time(size_bytes as u64, rate)),
        }
    }

    /// Commits a departure returned by [`Pacer::next_departure`].
    pub fn commit(&mut self, departure: SimTime) {
        debug_assert!(self.last_departure.map_or(true, |t| departure >= t));
        self.last_departure = Some(departure);
    }
}
