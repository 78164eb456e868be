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

//! Simulation core: microsecond virtual clock, deterministic event
//! queue, and seeded random streams.

mod event;
mod rng;
mod time;

pub use event::{Engine, EventId, ScheduleError};
pub use rng::RngStream;
pub use time::{transfer_time, transfer_time_bits, SimTime};
