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

//! Network model: droptail channels with serialization and propagation
//! delay, optional random ingress loss, and the dumbbell topology.

mod link;
mod topology;

pub use link::{Admit, Channel, ChannelId, ChannelStats, LinkConfig, LinkId, NodeId};
pub use topology::{
    build_dumbbell, DumbbellSpec, Link, Topology, TopologyError, LINK_LOSS_STREAM_BASE,
};
