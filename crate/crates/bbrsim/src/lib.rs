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

//! Packet-level discrete event network simulator with a pluggable
//! congestion control suite and an experiment harness.
//!
//! The crate is organized bottom-up:
//!
//! * [`sim`]: virtual clock, event queue, and seeded random streams.
//! * [`net`]: droptail links, random loss, and the dumbbell topology.
//! * [`transport`]: a simplified QUIC-like flow with delivery rate
//!   sampling, loss detection, and pacing.
//! * [`cc`]: congestion controllers (Reno, Cubic, the BBR family, BBRv2).
//! * [`simulation`]: wires topology, flows, and controllers into a run.
//! * [`metrics`]: fairness / utilization / delay figures and CSV output.
//! * [`harness`]: experiment scenarios, config files, and the CLI.
//!
//! Every run is deterministic: the same config and seed produce
//! byte-identical CSV output on every execution.

pub mod cc;
pub mod harness;
pub mod metrics;
pub mod net;
pub mod sim;
pub mod simulation;
pub mod transport;
