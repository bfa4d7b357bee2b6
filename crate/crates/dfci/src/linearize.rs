//! Exhaustive enumeration of linearizations (linear extensions) of an
//! expanded chart. This is the oracle side of conformance checking and is
//! only meant for small charts; [`MAX_ORACLE_EVENTS`] bounds the expanded
//! event count and `cap` bounds the number of sequences produced.

use crate::graph::{
    expand, EventGraph, EventKind, ExpandedGraph, FragmentExpansion, ModelError, MAX_ORACLE_EVENTS,
};

/// One step of a linearization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinStep {
    pub msg_id: String,
    pub kind: EventKind,
    pub from: String,
    pub to: String,
}

/// All total orders extending the expanded partial order.
///
/// Fails with [`ModelError::CapExceeded`] as soon as more than `cap`
/// sequences exist, and with [`ModelError::TooManyEvents`] when the
/// expansion itself is too large to enumerate.
pub fn linearizations(
    graph: &EventGraph,
    expansion: &FragmentExpansion,
    cap: usize,
) -> Result<Vec<Vec<LinStep>>, ModelError> {
    let expanded = expand(graph, expansion)?;
    let mut out = Vec::new();
    for_each_linearization(&expanded, cap, |seq| {
        out.push(
            seq.iter()
                .map(|&i| {
                    let occ = &graph.occurrences()[expanded.events[i].occurrence];
                    LinStep {
                        msg_id: occ.msg_id.clone(),
                        kind: expanded.events[i].kind,
                        from: occ.from.clone(),
                        to: occ.to.clone(),
                    }
                })
                .collect(),
        );
    })?;
    Ok(out)
}

/// Visit every linearization of `expanded` as a slice of event indices.
/// Returns the number of sequences visited.
pub(crate) fn for_each_linearization(
    expanded: &ExpandedGraph,
    cap: usize,
    mut visit: impl FnMut(&[usize]),
) -> Result<usize, ModelError> {
    let n = expanded.events.len();
    if n > MAX_ORACLE_EVENTS {
        return Err(ModelError::TooManyEvents {
            count: n,
            limit: MAX_ORACLE_EVENTS,
        });
    }
    let mut walk = Walk {
        expanded,
        lanes: expanded.lanes.values().collect(),
        next: vec![0usize; expanded.lanes.len()],
        consumed: vec![false; n],
        seq: Vec::with_capacity(n),
        count: 0,
        cap,
    };
    walk.rec(&mut visit)?;
    Ok(walk.count)
}

struct Walk<'a> {
    expanded: &'a ExpandedGraph,
    lanes: Vec<&'a Vec<usize>>,
    next: Vec<usize>,
    consumed: Vec<bool>,
    seq: Vec<usize>,
    count: usize,
    cap: usize,
}

impl Walk<'_> {
    fn rec(&mut self, visit: &mut impl FnMut(&[usize])) -> Result<(), ModelError> {
        if self.seq.len() == self.expanded.events.len() {
            if self.count == self.cap {
                return Err(ModelError::CapExceeded { cap: self.cap });
            }
            self.count += 1;
            visit(&self.seq);
            return Ok(());
        }
        for lane_idx in 0..self.lanes.len() {
            let lane = self.lanes[lane_idx];
            if self.next[lane_idx] >= lane.len() {
                continue;
            }
            let ev = lane[self.next[lane_idx]];
            if let Some(send) = self.expanded.send_of[ev] {
                if !self.consumed[send] {
                    continue;
                }
            }
            self.next[lane_idx] += 1;
            self.consumed[ev] = true;
            self.seq.push(ev);
            self.rec(visit)?;
            self.seq.pop();
            self.consumed[ev] = false;
            self.next[lane_idx] -= 1;
        }
        Ok(())
    }
}
