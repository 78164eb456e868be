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

//! The dumbbell topology every experiment runs on:
//!
//! ```text
//! n0 --l1--+           +--l4-- n4
//!          n2 ==l2== n3
//! n1 --l3--+           +--l5-- n5
//! ```
//!
//! l2 is the bottleneck. Flows declare their path as a list of link
//! names; ACKs traverse the same links in reverse.

use thiserror::Error;

use super::link::{Channel, ChannelId, LinkConfig, LinkId, NodeId};
use crate::sim::RngStream;

/// Base stream id for per-channel loss draws: channel `k` uses
/// `LINK_LOSS_STREAM_BASE + k` under the run seed.
pub const LINK_LOSS_STREAM_BASE: u64 = 0x1000;

pub struct Link {
    pub name: &'static str,
    pub a: NodeId,
    pub b: NodeId,
    /// Channel carrying a -> b traffic.
    pub ab: ChannelId,
    /// Channel carrying b -> a traffic.
    pub ba: ChannelId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("unknown link {0:?}")]
    UnknownLink(String),
    #[error("link {link:?} does not touch node {node:?}")]
    NotAdjacent { link: String, node: String },
    #[error("path ends at {actual:?}, expected {expected:?}")]
    PathEndsElsewhere { expected: String, actual: String },
}

pub struct Topology {
    node_names: Vec<&'static str>,
    pub links: Vec<Link>,
    pub channels: Vec<Channel>,
}

/// Link parameters for [`build_dumbbell`]; `bottleneck` is l2.
#[derive(Clone, Copy, Debug)]
pub struct DumbbellSpec {
    pub bottleneck: LinkConfig,
    pub l1: LinkConfig,
    pub l3: LinkConfig,
    pub l4: LinkConfig,
    pub l5: LinkConfig,
}

/// Builds the six-node dumbbell. Each channel gets its own loss stream
/// derived from `seed` so loss draws are independent per direction and
/// unaffected by traffic on other channels.
pub fn build_dumbbell(spec: &DumbbellSpec, seed: u64) -> Topology {
    let node_names = vec!["n0", "n1", "n2", "n3", "n4", "n5"];
    // (name, a, b, config); l2 sits in the middle.
    let defs: [(&'static str, usize, usize, LinkConfig); 5] = [
        ("l1", 0, 2, spec.l1),
        ("l3", 1, 2, spec.l3),
        ("l2", 2, 3, spec.bottleneck),
        ("l4", 3, 4, spec.l4),
        ("l5", 3, 5, spec.l5),
    ];
    let mut links = Vec::new();
    let mut channels = Vec::new();
    for (i, (name, a, b, cfg)) in defs.into_iter().enumerate() {
        let (a, b) = (NodeId(a), NodeId(b));
        let ab = ChannelId(channels.len());
        channels.push(Channel::new(
            LinkId(i),
            a,
            b,
            &cfg,
            RngStream::new(seed, LINK_LOSS_STREAM_BASE + ab.0 as u64),
        ));
        let ba = ChannelId(channels.len());
        channels.push(Channel::new(
            LinkId(i),
            b,
            a,
            &cfg,
            RngStream::new(seed, LINK_LOSS_STREAM_BASE + ba.0 as u64),
        ));
        links.push(Link { name, a, b, ab, ba });
    }
    Topology {
        node_names,
        links,
        channels,
    }
}

impl Topology {
    pub fn node(&self, name: &str) -> Result<NodeId, TopologyError> {
        self.node_names
            .iter()
            .position(|n| *n == name)
            .map(NodeId)
            .ok_or_else(|| TopologyError::UnknownNode(name.to_string()))
    }

    pub fn node_name(&self, id: NodeId) -> &'static str {
        self.node_names[id.0]
    }

    pub fn link(&self, name: &str) -> Result<&Link, TopologyError> {
        self.links
            .iter()
            .find(|l| l.name == name)
            .ok_or_else(|| TopologyError::UnknownLink(name.to_string()))
    }

    pub fn channel(&self, id: ChannelId) -> &Channel {
        &self.channels[id.0]
    }

    pub fn channel_mut(&mut self, id: ChannelId) -> &mut Channel {
        &mut self.channels[id.0]
    }

    /// The opposite direction of a channel, on the same link.
    pub fn partner(&self, id: ChannelId) -> ChannelId {
        let link = &self.links[self.channels[id.0].link.0];
        if link.ab == id {
            link.ba
        } else {
            link.ab
        }
    }

    /// Resolves `link_names` into directed channels walking from `src`,
    /// verifying adjacency at every hop and arrival at `dst`.
    pub fn resolve_path(
        &self,
        src: &str,
        dst: &str,
        link_names: &[&str],
    ) -> Result<Vec<ChannelId>, TopologyError> {
        let mut at = self.node(src)?;
        let goal = self.node(dst)?;
        let mut path = Vec::with_capacity(link_names.len());
        for name in link_names {
            let link = self.link(name)?;
            if link.a == at {
                path.push(link.ab);
                at = link.b;
            } else if link.b == at {
                path.push(link.ba);
                at = link.a;
            } else {
                return Err(TopologyError::NotAdjacent {
                    link: name.to_string(),
                    node: self.node_name(at).to_string(),
                });
            }
        }
        if at != goal {
            return Err(TopologyError::PathEndsElsewhere {
                expected: dst.to_string(),
                actual: self.node_name(at).to_string(),
            });
        }
        Ok(path)
    }

    /// The reverse path: partner channels in reverse order.
    pub fn reverse_of(&self, path: &[ChannelId]) -> Vec<ChannelId> {
        path.iter().rev().map(|&c| self.partner(c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SimTime;

    fn spec() -> DumbbellSpec {
        let side = LinkConfig {
            bandwidth_bps: 100_000_000,
            prop_delay: SimTime::from_millis(10),
            queue_limit_bytes: 1_875_000,
            random_loss_rate: 0.0,
        };
        DumbbellSpec {
            bottleneck: LinkConfig {
                bandwidth_bps: 4_000_000,
                prop_delay: SimTime::from_millis(10),
                queue_limit_bytes: 75_000,
                random_loss_rate: 0.0,
            },
            l1: side,
            l3: side,
            l4: side,
            l5: side,
        }
    }

    #[test]
    fn dumbbell_wiring_matches_the_diagram() {
        let topo = build_dumbbell(&spec(), 1);
        assert_eq!(topo.links.len(), 5);
        assert_eq!(topo.channels.len(), 10);
        let l2 = topo.link("l2").unwrap();
        assert_eq!(topo.node_name(l2.a), "n2");
        assert_eq!(topo.node_name(l2.b), "n3");
    }

    #[test]
    fn long_path_resolves_with_correct_directions() {
        let topo = build_dumbbell(&spec(), 1);
        let path = topo.resolve_path("n0", "n4", &["l1", "l2", "l4"]).unwrap();
        assert_eq!(path.len(), 3);
        assert_eq!(topo.node_name(topo.channel(path[0]).from), "n0");
        assert_eq!(topo.node_name(topo.channel(path[0]).to), "n2");
        assert_eq!(topo.node_name(topo.channel(path[2]).to), "n4");
        let rev = topo.reverse_of(&path);
        assert_eq!(topo.node_name(topo.channel(rev[0]).from), "n4");
        assert_eq!(topo.node_name(topo.channel(rev[2]).to), "n0");
    }

    #[test]
    fn single_link_path_for_bottleneck_only_flows() {
        let topo = build_dumbbell(&spec(), 1);
        let path = topo.resolve_path("n2", "n3", &["l2"]).unwrap();
        assert_eq!(path.len(), 1);
    }

    #[test]
    fn bad_paths_are_rejected() {
        let topo = build_dumbbell(&spec(), 1);
        assert_eq!(
            topo.resolve_path("n0", "n4", &["l9"]),
            Err(TopologyError::UnknownLink("l9".into()))
        );
        assert!(matches!(
            topo.resolve_path("n0", "n4", &["l1", "l5"]),
            Err(TopologyError::NotAdjacent { .. })
        ));
        assert!(matches!(
            topo.resolve_path("n0", "n4", &["l1", "l2"]),
            Err(TopologyError::PathEndsElsewhere { .. })
        ));
    }

    #[test]
    fn channel_loss_streams_are_distinct() {
        let mut topo = build_dumbbell(
            &DumbbellSpec {
                bottleneck: LinkConfig {
                    random_loss_rate: 0.5,
                    ..spec().bottleneck
                },
                ..spec()
            },
            7,
        );
        // Two directions of l2 draw from different streams: their first
        // 32 outcomes must not be identical.
        use crate::transport::{FlowId, Packet, PacketKind};
        let mk = || Packet {
            flow: FlowId(0),
            number: 0,
            kind: PacketKind::Data,
            size_bytes: 1440,
            sent_time: SimTime::ZERO,
            frames: Vec::new(),
            hop: 0,
        };
        let (ab, ba) = {
            let l2 = topo.link("l2").unwrap();
            (l2.ab, l2.ba)
        };
        let mut outcomes = (Vec::new(), Vec::new());
        for _ in 0..32 {
            outcomes.0.push(matches!(
                topo.channel_mut(ab).offer(SimTime::ZERO, mk()),
                super::super::link::Admit::DroppedRandom(_)
            ));
            outcomes.1.push(matches!(
                topo.channel_mut(ba).offer(SimTime::ZERO, mk()),
                super::super::link::Admit::DroppedRandom(_)
            ));
        }
        assert_ne!(outcomes.0, outcomes.1);
    }
}
