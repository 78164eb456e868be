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

//! Per-packet delivery rate sampling.
//!
//! Every sent packet snapshots the sender's delivery totals; when it is
//! acked the deltas against those snapshots yield one bandwidth sample:
//!
//! ```text
//! delta_t   = now - record.last_ack_time_snapshot
//! delta_del = total_byte_acked - record.total_byte_acked_snapshot
//! bw        = delta_del / delta_t
//! ```
//!
//! Rounds are packet-timed: a round ends when a packet sent after the
//! previous round's delivery marker is acked.

use crate::sim::SimTime;

/// Sender-side state for one transmitted packet.
#[derive(Clone, Debug)]
pub struct SentPacketRecord {
    pub number: u64,
    pub size_bytes: u32,
    pub sent_time: SimTime,
    /// `total_byte_acked` at send time.
    pub total_byte_acked_snapshot: u64,
    /// `last_acked_packet_ack_time` at send time.
    pub last_ack_time_snapshot: SimTime,
    pub is_app_limited: bool,
    /// STREAM range carried, for retransmission on loss.
    pub stream: (u64, u32),
}

/// One delivery rate sample, produced per newly acked packet.
#[derive(Clone, Copy, Debug)]
pub struct RateSample {
    pub delivered_bytes: u64,
    pub interval: SimTime,
    pub bw_bytes_per_sec: u64,
    pub rtt: SimTime,
    pub is_app_limited: bool,
    pub is_round_end: bool,
    pub bytes_lost_in_round: u64,
}

/// Delivery totals plus round tracking.
#[derive(Debug)]
pub struct DeliverySampler {
    total_byte_acked: u64,
    last_acked_packet_ack_time: SimTime,
    first_send_seen: bool,
    round_count: u64,
    next_round_delivered: u64,
}

impl DeliverySampler {
    pub fn new() -> Self {
        DeliverySampler {
            total_byte_acked: 0,
            last_acked_packet_ack_time: SimTime::ZERO,
            first_send_seen: false,
            round_count: 0,
            next_round_delivered: 0,
        }
    }

    pub fn total_byte_acked(&self) -> u64 {
        self.total_byte_acked
    }

    pub fn round_count(&self) -> u64 {
        self.round_count
    }

    /// Snapshots current totals into a record for a departing packet.
    ///
    /// Before any ack arrives, the ack-time baseline is the first
    /// departure instant: a flow starting late in the run must not see
    /// its first sample diluted by the idle time before it existed.
    pub fn on_sent(
        &mut self,
        now: SimTime,
        number: u64,
        size_bytes: u32,
        is_app_limited: bool,
        stream: (u64, u32),
    ) -> SentPacketRecord {
        if !self.first_send_seen {
            self.first_send_seen = true;
            self.last_acked_packet_ack_time = now;
        }
        SentPacketRecord {
            number,
            size_bytes,
            sent_time: now,
            total_byte_acked_snapshot: self.total_byte_acked,
            last_ack_time_snapshot: self.last_acked_packet_ack_time,
            is_app_limited,
            stream,
        }
    }

    /// Folds an acked record into the totals and emits its sample.
    /// `bytes_lost_in_round` is left at zero for the caller to fill.
    pub fn on_acked(&mut self, rec: &SentPacketRecord, now: SimTime) -> RateSample {
        // The round advances when this packet was sent at or after the
        // previous round's end marker.
        let is_round_end = rec.total_byte_acked_snapshot >= self.next_round_delivered;
        self.total_byte_acked += rec.size_bytes as u64;
        self.last_acked_packet_ack_time = now;
        if is_round_end {
            self.round_count += 1;
            self.next_round_delivered = self.total_byte_acked;
        }
        let interval = now.saturating_sub(rec.last_ack_time_snapshot);
        let delivered = self.total_byte_acked - rec.total_byte_acked_snapshot;
        let bw = if interval.is_zero() {
            0
        } else {
            u64::try_from(delivered as u128 * 1_000_000 / interval.as_micros() as u128)
                .expect("bandwidth sample overflow")
        };
        RateSample {
            delivered_bytes: delivered,
            interval,
            bw_bytes_per_sec: bw,
            rtt: now - rec.sent_time,
            is_app_limited: rec.is_app_limited,
            is_round_end,
            bytes_lost_in_round: 0,
        }
    }
}

impl Default for DeliverySampler {
    fn default() -> Self {
        Self::new()
    }
}
