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

//! Seeded random streams.
//!
//! Each stochastic consumer (a lossy link, a controller's cycle
//! randomization, ...) owns an independent [`RngStream`] derived from
//! the run seed and a stable stream id. The generator is xorshift64*
//! with a splitmix64 seeding step; both are fixed by the constants in
//! this file and use only integer arithmetic, so a given
//! `(seed, stream_id)` pair yields the same sequence on every platform.

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SPLITMIX_MUL1: u64 = 0xBF58_476D_1CE4_E5B9;
const SPLITMIX_MUL2: u64 = 0x94D0_49BB_1331_11EB;
const XORSHIFT_MUL: u64 = 0x2545_F491_4F6C_DD1D;
/// Replacement state for the single seed that maps to zero; xorshift64*
/// is stuck at zero forever.
const ZERO_STATE_ESCAPE: u64 = 0x9E6C_63D0_876A_3F6B;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(SPLITMIX_GAMMA);
    x = (x ^ (x >> 30)).wrapping_mul(SPLITMIX_MUL1);
    x = (x ^ (x >> 27)).wrapping_mul(SPLITMIX_MUL2);
    x ^ (x >> 31)
}

/// One independent random stream.
#[derive(Clone, Debug)]
pub struct RngStream {
    state: u64,
}

impl RngStream {
    /// Derives the stream for `stream_id` under the run-level `seed`.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let state = splitmix64(seed ^ splitmix64(stream_id));
        RngStream {
            state: if state == 0 { ZERO_STATE_ESCAPE } else { state },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(XORSHIFT_MUL)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `rand() % n` style draw, for algorithms specified in exactly
    /// those terms. The modulo bias at n << 2^64 is negligible.
    pub fn next_mod(&mut self, n: u32) -> u32 {
        assert!(n > 0, "empty range");
        (self.next_u64() % n as u64) as u32
    }

    /// Uniform in `[lo, hi)`.
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        assert!(lo < hi, "empty range");
        lo + self.next_f64() * (hi - lo)
    }

    /// Bernoulli draw with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
