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

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::time::SimTime;

/// Handle for a scheduled event, usable to cancel it before it fires.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct EventId(u64);

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    /// Scheduling into the past is a contract violation, never clamped.
    #[error("cannot schedule at {at:?}, clock is already at {now:?}")]
    InPast { at: SimTime, now: SimTime },
}

struct Slot<E> {
    at: SimTime,
    id: u64,
    ev: E,
}

// BinaryHeap is a max-heap; invert so the earliest (at, id) pops first.
// The id tiebreak makes same-time delivery follow insertion order.
impl<E> Ord for Slot<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.at, other.id).cmp(&(self.at, self.id))
    }
}

impl<E> PartialOrd for Slot<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> PartialEq for Slot<E> {
    fn eq(&self, other: &Self) -> bool {
        self.at == other.at && self.id == other.id
    }
}

impl<E> Eq for Slot<E> {}

/// Deterministic discrete event engine.
///
/// The clock only advances inside [`Engine::run_until`]; every callback
/// observes the frozen firing instant via [`Engine::now`]. Cancellation
/// is lazy: cancelled slots stay in the heap and are skipped on pop.
pub struct Engine<E> {
    now: SimTime,
    next_id: u64,
    heap: BinaryHeap<Slot<E>>,
    live: HashSet<u64>,
    running: bool,
}

impl<E> Engine<E> {
    pub fn new() -> Self {
        Engine {
            now: SimTime::ZERO,
            next_id: 0,
            heap: BinaryHeap::new(),
            live: HashSet::new(),
            running: false,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Number of scheduled, not-yet-fired, not-cancelled events.
    pub fn pending(&self) -> usize {
        self.live.len()
    }

    pub fn schedule(&mut self, at: SimTime, ev: E) -> Result<EventId, ScheduleError> {
        if at < self.now {
            return Err(ScheduleError::InPast { at, now: self.now });
        }
        let id = self.next_id;
        self.next_id += 1;
        self.heap.push(Slot { at, id, ev });
        self.live.insert(id);
        Ok(EventId(id))
    }

    pub fn schedule_after(&mut self, delay: SimTime, ev: E) -> EventId {
        self.schedule(self.now + delay, ev)
            .expect("now + delay is never in the past")
    }

    /// Returns true iff the event was still pending. Cancelling an
    /// already-fired or already-cancelled event returns false.
    pub fn cancel(&mut self, id: EventId) -> bool {
        self.live.remove(&id.0)
    }

    /// Runs every event with firing time `<= t_end` in (time, insertion)
    /// order, then advances the clock to `t_end` and returns it.
    ///
    /// `dispatch` may schedule and cancel freely; an event scheduled at
    /// the frozen current instant fires later in the same call. Nested
    /// `run_until` is a bug and panics.
    pub fn run_until<W>(
        &mut self,
        t_end: SimTime,
        world: &mut W,
        mut dispatch: impl FnMut(&mut W, &mut Engine<E>, E),
    ) -> SimTime {
        assert!(t_end >= self.now, "run_until would move the clock backward");
        assert!(!self.running, "run_until is not reentrant");
        self.running = true;
        while let Some(slot) = self.heap.peek() {
            if slot.at > t_end {
                break;
            }
            let slot = self.heap.pop().expect("peeked");
            if !self.live.remove(&slot.id) {
                continue; // cancelled
            }
            debug_assert!(slot.at >= self.now);
            self.now = slot.at;
            dispatch(world, self, slot.ev);
        }
        self.now = t_end;
        self.running = false;
        t_end
    }
}

impl<E> Default for Engine<E> {
    fn default() -> Self {
        Self::new()
    }
}
