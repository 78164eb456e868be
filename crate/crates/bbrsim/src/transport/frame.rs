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

use crate::sim::SimTime;

/// Index of a flow within one simulation run.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FlowId(pub usize);

/// The three frame types the transport exchanges. Payload bytes are
/// synthetic: a STREAM frame carries only its (offset, length) range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frame {
    Stream {
        offset: u64,
        length: u32,
    },
    /// Tells the receiver it will never again need to report packets
    /// below `least_unacked`, letting it prune its ack-range state.
    StopWaiting {
        least_unacked: u64,
    },
    Ack {
        largest_acked: u64,
        ack_delay: SimTime,
        /// Acknowledged packet-number ranges, inclusive on both ends,
        /// descending and disjoint.
        ranges: Vec<(u64, u64)>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PacketKind {
    Data,
    Ack,
}

/// One simulated packet. `size_bytes` is the full wire size including
/// the header; it is what queues, serialization, and delivery-rate
/// samples count.
#[derive(Clone, Debug)]
pub struct Packet {
    pub flow: FlowId,
    pub number: u64,
    pub kind: PacketKind,
    pub size_bytes: u32,
    pub sent_time: SimTime,
    pub frames: Vec<Frame>,
    /// Index into the flow's path of the channel currently carrying
    /// the packet; maintained by the simulation during forwarding.
    pub hop: u8,
}

impl Packet {
    pub fn is_data(&self) -> bool {
        self.kind == PacketKind::Data
    }

    pub fn stream_frame(&self) -> Option<(u64, u32)> {
        self.frames.iter().find_map(|f| match f {
            Frame::Stream { offset, length } => Some((*offset, *length)),
            _ => None,
        })
    }

    pub fn ack_frame(&self) -> Option<(u64, SimTime, &[(u64, u64)])> {
        self.frames.iter().find_map(|f| match f {
            Frame::Ack {
                largest_acked,
                ack_delay,
                ranges,
            } => Some((*largest_acked, *ack_delay, ranges.as_slice())),
            _ => None,
        })
    }

    pub fn stop_waiting(&self) -> Option<u64> {
        self.frames.iter().find_map(|f| match f {
            Frame::StopWaiting { least_unacked } => Some(*least_unacked),
            _ => None,
        })
    }
}
