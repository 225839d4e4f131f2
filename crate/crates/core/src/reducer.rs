//! Greedy relocation of points of interest.
//!
//! Each round proposes, for every POI that has not moved yet, the most
//! straightness-central node among its consistent perimeter members, and
//! re-tracks the configuration with that single swap. The swap with the
//! lowest total is committed if it is strictly below the best total seen so
//! far; otherwise the search stops. A POI moves at most once, so the number
//! of rounds is bounded by the number of POIs and the total never grows.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{extract_central, straightness};
use crate::error::{Error, Result};
use crate::inconsistency::{Direction, InconsistencyReport, TrackOptions, Tracker};
use crate::ingest::{Poi, PoiSet};
use crate::network::{Network, NodeId};

#[derive(Clone, Debug, Default)]
pub struct ReduceOptions {
    pub track: TrackOptions,
    /// POIs (by current node) that must stay where they are.
    pub pinned: BTreeSet<NodeId>,
    /// Abort with [`Error::Timeout`] once exceeded.
    pub time_budget: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    /// Position of the POI in the input set.
    pub poi: usize,
    pub label: String,
    pub old: NodeId,
    pub new: NodeId,
    pub total_after: usize,
}

/// One POI's proposal within a round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateEval {
    pub poi: usize,
    /// `None` when the POI has no consistent perimeter members.
    pub candidate: Option<NodeId>,
    /// Total after the swap; `None` if the candidate was not evaluated
    /// (it is the POI itself or another POI's node).
    pub total: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Round {
    pub candidates: Vec<CandidateEval>,
    /// Position of the POI moved in this round.
    pub committed: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelocationPlan {
    pub direction: Direction,
    pub moves: Vec<Move>,
    pub totals_before: usize,
    pub totals_after: usize,
    pub per_poi_before: Vec<usize>,
    pub per_poi_after: Vec<usize>,
    pub initial_pois: PoiSet,
    pub final_pois: PoiSet,
    pub rounds: Vec<Round>,
}

impl RelocationPlan {
    /// POIs whose own count went up although the total did not.
    pub fn per_poi_increases(&self) -> Vec<(usize, usize, usize)> {
        self.per_poi_before
            .iter()
            .zip(&self.per_poi_after)
            .enumerate()
            .filter(|(_, (b, a))| a > b)
            .map(|(k, (&b, &a))| (k, b, a))
            .collect()
    }
}

pub fn reduce(net: &Network, pois: &PoiSet, direction: Direction) -> Result<RelocationPlan> {
    reduce_with_options(net, pois, direction, &ReduceOptions::default())
}

pub fn reduce_with_options(
    net: &Network,
    pois: &PoiSet,
    direction: Direction,
    options: &ReduceOptions,
) -> Result<RelocationPlan> {
    let started = Instant::now();
    let check_budget = || match options.time_budget {
        Some(budget) if started.elapsed() > budget => Err(Error::Timeout(budget)),
        _ => Ok(()),
    };
    let mut tracker = Tracker::new(net, direction, options.track);
    let baseline = tracker.track(pois)?;
    let mut report = baseline.clone();
    let mut current = pois.clone();
    let mut best_total = baseline.total;
    let mut moved: Vec<bool> = pois.iter().map(|p| options.pinned.contains(&p.node)).collect();
    let mut central_cache: HashMap<Vec<NodeId>, NodeId> = HashMap::new();
    let mut moves = Vec::new();
    let mut rounds = Vec::new();

    while moved.iter().any(|m| !m) {
        let mut candidates = Vec::new();
        for k in (0..current.len()).filter(|&k| !moved[k]) {
            let members = &report.consistent_per_poi[k];
            let candidate = if members.is_empty() {
                None
            } else if let Some(&c) = central_cache.get(members) {
                Some(c)
            } else {
                check_budget()?;
                let c = extract_central(&straightness(net, members, direction)?);
                central_cache.insert(members.clone(), c);
                Some(c)
            };
            candidates.push(CandidateEval {
                poi: k,
                candidate,
                total: None,
            });
        }

        // a candidate equal to any current POI node cannot improve anything
        let trials: Vec<(usize, PoiSet)> = candidates
            .iter()
            .enumerate()
            .filter_map(|(i, ev)| {
                let c = ev.candidate?;
                current.position(c).is_none().then(|| {
                    let config = current.with_relocated(ev.poi, c).expect("distinct by construction");
                    (i, config)
                })
            })
            .collect();
        let new_nodes: Vec<NodeId> = trials.iter().filter_map(|(i, _)| candidates[*i].candidate).collect();
        check_budget()?;
        tracker.prepare(&new_nodes)?;
        let totals: Vec<usize> = trials.par_iter().map(|(_, cfg)| tracker.total_prepared(cfg)).collect();
        check_budget()?;

        let mut chosen: Option<usize> = None;
        for ((i, _), &total) in trials.iter().zip(&totals) {
            candidates[*i].total = Some(total);
            if total < best_total {
                best_total = total;
                chosen = Some(*i);
            }
        }
        let Some(i) = chosen else {
            rounds.push(Round {
                candidates,
                committed: None,
            });
            break;
        };
        let ev = &candidates[i];
        let (k, new) = (ev.poi, ev.candidate.expect("evaluated"));
        let old = current.get(k).expect("poi").node;
        current = current.with_relocated(k, new)?;
        report = tracker.track_prepared(&current);
        debug_assert_eq!(report.total, best_total);
        moved[k] = true;
        moves.push(Move {
            poi: k,
            label: current.get(k).expect("poi").label.clone(),
            old,
            new,
            total_after: report.total,
        });
        rounds.push(Round {
            candidates,
            committed: Some(k),
        });
    }

    Ok(RelocationPlan {
        direction,
        moves,
        totals_before: baseline.total,
        totals_after: report.total,
        per_poi_before: baseline.counts(),
        per_poi_after: report.counts(),
        initial_pois: pois.clone(),
        final_pois: current,
        rounds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddPoi {
    pub node: NodeId,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relocate {
    pub from: NodeId,
    pub to: NodeId,
}

/// A hypothetical change to the POI set, applied as add, then remove, then
/// move.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoiEdit {
    #[serde(default)]
    pub add: Option<AddPoi>,
    #[serde(default)]
    pub remove: Option<NodeId>,
    #[serde(default, rename = "move")]
    pub relocate: Option<Relocate>,
}

impl PoiEdit {
    pub fn add(node: NodeId) -> Self {
        PoiEdit {
            add: Some(AddPoi { node, label: None }),
            ..Default::default()
        }
    }

    pub fn remove(node: NodeId) -> Self {
        PoiEdit {
            remove: Some(node),
            ..Default::default()
        }
    }

    pub fn relocate(from: NodeId, to: NodeId) -> Self {
        PoiEdit {
            relocate: Some(Relocate { from, to }),
            ..Default::default()
        }
    }

    pub fn apply(&self, net: &Network, pois: &PoiSet) -> Result<PoiSet> {
        let mut set = pois.clone();
        if let Some(add) = &self.add {
            if !net.contains(add.node) {
                return Err(Error::UnknownNode(add.node));
            }
            let label = add.label.clone().unwrap_or_else(|| format!("new_{}", add.node));
            set = set.with_added(Poi::new(add.node, label))?;
        }
        if let Some(node) = self.remove {
            set = set.without(node)?;
        }
        if let Some(Relocate { from, to }) = self.relocate {
            if !net.contains(to) {
                return Err(Error::UnknownNode(to));
            }
            let k = set.position(from).ok_or(Error::PoiNotFound(from))?;
            set = set.with_relocated(k, to)?;
        }
        Ok(set)
    }
}

/// Tracks the edited configuration; `pois` itself is left untouched.
pub fn what_if(net: &Network, pois: &PoiSet, edit: &PoiEdit, direction: Direction) -> Result<InconsistencyReport> {
    what_if_with_options(net, pois, edit, direction, TrackOptions::default())
}

pub fn what_if_with_options(
    net: &Network,
    pois: &PoiSet,
    edit: &PoiEdit,
    direction: Direction,
    options: TrackOptions,
) -> Result<InconsistencyReport> {
    let edited = edit.apply(net, pois)?;
    crate::inconsistency::track_with_options(net, &edited, direction, options)
}
