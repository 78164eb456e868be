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

//! Simplified QUIC-like transport: STREAM / STOP_WAITING / ACK frames,
//! monotonically increasing packet numbers (no number is ever reused,
//! retransmissions get fresh ones), per-packet delivery rate sampling,
//! threshold-based loss detection, and paced sending.

mod endpoint;
mod frame;
mod pacer;
mod rate;

pub use endpoint::{
    AckOutcome, PtoDirective, Receiver, ReceiverConfig, Receipt, SendVerdict, Sender, SenderConfig,
};
pub use frame::{FlowId, Frame, Packet, PacketKind};
pub use pacer::Pacer;
pub use rate::{DeliverySampler, RateSample, SentPacketRecord};

/// Default maximum stream payload per packet, in bytes.
pub const MSS: u32 = 1400;
/// Fixed header overhead on every data packet.
pub const HEADER_BYTES: u32 = 40;
/// Wire size of a full-MSS data packet.
pub const DATA_PACKET_BYTES: u32 = MSS + HEADER_BYTES;
/// Wire size of a pure ACK packet.
pub const ACK_PACKET_BYTES: u32 = 40;
/// Initial congestion window: ten segments.
pub const INITIAL_CWND: u64 = 10 * MSS as u64;
