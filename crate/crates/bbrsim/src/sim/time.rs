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

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

/// Virtual time in whole microseconds since simulation start.
///
/// The same type carries both instants and durations; arithmetic panics
/// on overflow and underflow instead of wrapping, so a negative interval
/// is always a caught bug rather than a silent huge value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    /// Largest representable instant, used as an "unset deadline" marker.
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_micros(us: u64) -> Self {
        SimTime(us)
    }

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms * 1_000)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimTime(s * 1_000_000)
    }

    /// Converts seconds to microseconds, rounding to nearest.
    pub fn from_secs_f64(s: f64) -> Self {
        assert!(s >= 0.0 && s.is_finite(), "invalid time {s}");
        SimTime((s * 1e6).round() as u64)
    }

    pub const fn as_micros(self) -> u64 {
        self.0
    }

    pub fn as_millis_f64(self) -> f64 {
        self.0 as f64 / 1e3
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }

    /// Scales a duration by an f64 factor, rounding to nearest microsecond.
    pub fn mul_f64(self, k: f64) -> SimTime {
        assert!(k >= 0.0 && k.is_finite(), "invalid scale {k}");
        SimTime((self.0 as f64 * k).round() as u64)
    }

    pub fn min(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.min(rhs.0))
    }

    pub fn max(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.max(rhs.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.checked_add(rhs.0).expect("SimTime overflow"))
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        *self = *self + rhs;
    }
}

impl Sub for SimTime {
    type Output = SimTime;

    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.checked_sub(rhs.0).expect("SimTime underflow"))
    }
}

impl fmt::Debug for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}us", self.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}s", self.as_secs_f64())
    }
}

/// Time to move `bytes` at `bytes_per_sec`, rounded up to the next
/// whole microsecond so a transfer never finishes early.
pub fn transfer_time(bytes: u64, bytes_per_sec: u64) -> SimTime {
    assert!(bytes_per_sec > 0, "zero rate");
    let us = (bytes as u128 * 1_000_000).div_ceil(bytes_per_sec as u128);
    SimTime(u64::try_from(us).expect("transfer time overflow"))
}

/// Serialization delay for `bytes` on a link of `bits_per_sec`.
pub fn transfer_time_bits(bytes: u64, bits_per_sec: u64) -> SimTime {
    assert!(bits_per_sec > 0, "zero rate");
    let us = (bytes as u128 * 8 * 1_000_000).div_ceil(bits_per_sec as u128);
    SimTime(u64::try_from(us).expect("transfer time overflow"))
}
