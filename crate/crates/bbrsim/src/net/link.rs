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

use std::collections::VecDeque;

use crate::sim::{transfer_time_bits, RngStream, SimTime};
use crate::transport::Packet;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct LinkId(pub usize);

/// One direction of a link. Links are full duplex: each owns two
/// channels with independent queues and transmitters.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ChannelId(pub usize);

#[derive(Clone, Copy, Debug)]
pub struct LinkConfig {
    pub bandwidth_bps: u64,
    pub prop_delay: SimTime,
    pub queue_limit_bytes: u64,
    /// i.i.d. per-packet drop probability at ingress, before queueing.
    /// Applies to data packets only; ACKs are exempt.
    pub random_loss_rate: f64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ChannelStats {
    pub offered_pkts: u64,
    pub offered_bytes: u64,
    pub tail_dropped_pkts: u64,
    pub tail_dropped_bytes: u64,
    pub random_dropped_pkts: u64,
    pub tx_completed_pkts: u64,
    pub tx_completed_bytes: u64,
    pub arrived_pkts: u64,
    pub max_backlog_bytes: u64,
}

/// Outcome of offering a packet to a channel.
#[derive(Debug)]
pub enum Admit {
    /// The transmitter was idle; serialization finishes at `completes_at`.
    Transmit { completes_at: SimTime },
    Queued,
    /// Rejected packets come back to the caller for flow accounting.
    DroppedTail(Packet),
    DroppedRandom(Packet),
}

/// A directed droptail channel: a byte-counted FIFO feeding a single
/// transmitter, plus fixed propagation delay.
///
/// The packet being serialized is held outside the queue and does not
/// count against `queue_limit_bytes`.
pub struct Channel {
    pub link: LinkId,
    pub from: NodeId,
    pub to: NodeId,
    bandwidth_bps: u64,
    pub prop_delay: SimTime,
    queue_limit_bytes: u64,
    loss_rate: f64,
    loss_rng: RngStream,
    queue: VecDeque<Packet>,
    backlog_bytes: u64,
    transmitting: Option<Packet>,
    pub stats: ChannelStats,
}

impl Channel {
    pub fn new(
        link: LinkId,
        from: NodeId,
        to: NodeId,
        cfg: &LinkConfig,
        loss_rng: RngStream,
    ) -> Self {
        assert!(cfg.bandwidth_bps > 0, "zero-bandwidth link");
        assert!(
            (0.0..=1.0).contains(&cfg.random_loss_rate),
            "loss rate out of range"
        );
        Channel {
            link,
            from,
            to,
            bandwidth_bps: cfg.bandwidth_bps,
            prop_delay: cfg.prop_delay,
            queue_limit_bytes: cfg.queue_limit_bytes,
            loss_rate: cfg.random_loss_rate,
            loss_rng,
            queue: VecDeque::new(),
            backlog_bytes: 0,
            transmitting: None,
            stats: ChannelStats::default(),
        }
    }

    pub fn bandwidth_bps(&self) -> u64 {
        self.bandwidth_bps
    }

    /// Applies a new rate to every serialization that starts after this
    /// call. A packet already on the wire completes at the old rate
    /// because its completion was fixed when it started.
    pub fn set_bandwidth(&mut self, bps: u64) {
        assert!(bps > 0, "zero-bandwidth link");
        self.bandwidth_bps = bps;
    }

    pub fn backlog_bytes(&self) -> u64 {
        self.backlog_bytes
    }

    pub fn queued_pkts(&self) -> usize {
        self.queue.len()
    }

    pub fn is_transmitting(&self) -> bool {
        self.transmitting.is_some()
    }

    /// Offers a packet at `now`. Random loss is evaluated first, then
    /// the packet either starts serializing (idle transmitter), joins
    /// the queue (room left), or is tail-dropped.
    pub fn offer(&mut self, now: SimTime, pkt: Packet) -> Admit {
        self.stats.offered_pkts += 1;
        self.stats.offered_bytes += pkt.size_bytes as u64;
        if pkt.is_data() && self.loss_rate > 0.0 && self.loss_rng.chance(self.loss_rate) {
            self.stats.random_dropped_pkts += 1;
            return Admit::DroppedRandom(pkt);
        }
        if self.transmitting.is_none() {
            debug_assert!(self.queue.is_empty());
            let completes_at = now + transfer_time_bits(pkt.size_bytes as u64, self.bandwidth_bps);
            self.transmitting = Some(pkt);
            Admit::Transmit { completes_at }
        } else if self.backlog_bytes + pkt.size_bytes as u64 <= self.queue_limit_bytes {
            self.backlog_bytes += pkt.size_bytes as u64;
            self.stats.max_backlog_bytes = self.stats.max_backlog_bytes.max(self.backlog_bytes);
            self.queue.push_back(pkt);
            Admit::Queued
        } else {
            self.stats.tail_dropped_pkts += 1;
            self.stats.tail_dropped_bytes += pkt.size_bytes as u64;
            Admit::DroppedTail(pkt)
        }
    }

    /// Completes the in-flight serialization. Returns the packet, now
    /// ready to propagate for `prop_delay`, and the completion time of
    /// the next serialization if the queue was non-empty.
    pub fn tx_complete(&mut self, now: SimTime) -> (Packet, Option<SimTime>) {
        let done = self
            .transmitting
            .take()
            .expect("tx_complete on idle channel");
        self.stats.tx_completed_pkts += 1;
        self.stats.tx_completed_bytes += done.size_bytes as u64;
        let next = self.queue.pop_front().map(|pkt| {
            self.backlog_bytes -= pkt.size_bytes as u64;
            let completes_at = now + transfer_time_bits(pkt.size_bytes as u64, self.bandwidth_bps);
            self.transmitting = Some(pkt);
            completes_at
        });
        (done, next)
    }

    /// Records that a serialized packet finished propagating.
    pub fn note_arrival(&mut self) {
        self.stats.arrived_pkts += 1;
    }

    /// Every offered packet must be accounted for: dropped, delivered,
    /// still queued, serializing, or still propagating.
    pub fn check_conservation(&self) -> Result<(), String> {
        let s = &self.stats;
        let held = self.queue.len() as u64 + self.transmitting.is_some() as u64;
        let accounted =
            s.random_dropped_pkts + s.tail_dropped_pkts + s.tx_completed_pkts + held;
        if s.offered_pkts != accounted {
            return Err(format!(
                "channel {:?}->{:?}: offered {} != accounted {}",
                self.from, self.to, s.offered_pkts, accounted
            ));
        }
        if s.arrived_pkts > s.tx_completed_pkts {
            return Err(format!(
                "channel {:?}->{:?}: {} arrivals exceed {} completions",
                self.from, self.to, s.arrived_pkts, s.tx_completed_pkts
            ));
        }
        Ok(())
    }
}
