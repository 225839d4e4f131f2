//! Two planning fixtures: a POI whose perimeter is far too large, and two
//! POIs sitting next to each other.
//!
//! Both are seeded synthetic cities. The numbers quoted in the docs below
//! are pinned by the unit tests.

use std::collections::BTreeSet;

use crate::centrality::{extract_central, straightness};
use crate::error::Result;
use crate::inconsistency::{track, Direction, InconsistencyReport};
use crate::ingest::{Poi, PoiSet};
use crate::network::{Network, NodeId};
use crate::partition::perimeter_partition;
use crate::reducer::{reduce_with_options, ReduceOptions, RelocationPlan};
use crate::synth::{cell, random_city, CityParams};

fn city(size: usize, seed: u64) -> Network {
    random_city(&CityParams {
        one_way_fraction: 0.3,
        drop_fraction: 0.05,
        ..CityParams::new(size, size, seed)
    })
}

fn labelled(prefix: &str, nodes: &[NodeId]) -> PoiSet {
    let pois = nodes
        .iter()
        .enumerate()
        .map(|(i, &n)| Poi::new(n, format!("{prefix}{:02}", i + 1)))
        .collect();
    PoiSet::new(pois).expect("fixture")
}

/// Four hospitals crowd the south-west of a 22x22 city; the fifth serves
/// everything else. Inward direction.
///
/// Baseline total is 39. Adding a hospital at the least straightness-central
/// node of the big perimeter gives 41. Letting the reducer move only the new
/// hospital brings the total to 34.
#[derive(Clone, Debug)]
pub struct CaseStudyOne {
    pub network: Network,
    pub pois: PoiSet,
    /// Position of the POI with the oversized perimeter.
    pub oversized: usize,
    pub direction: Direction,
}

pub fn case_study_one() -> CaseStudyOne {
    let n = 22;
    let nodes = [cell(n, 3, 3), cell(n, 3, 9), cell(n, 9, 3), cell(n, 8, 8), cell(n, 16, 16)];
    CaseStudyOne {
        network: city(n, 0),
        pois: labelled("hospital", &nodes),
        oversized: 4,
        direction: Direction::Inward,
    }
}

impl CaseStudyOne {
    pub const NEW_LABEL: &'static str = "hospital_new";

    pub fn baseline(&self) -> (Network, PoiSet) {
        (self.network.clone(), self.pois.clone())
    }

    pub fn track_baseline(&self) -> Result<InconsistencyReport> {
        track(&self.network, &self.pois, self.direction)
    }

    pub fn oversized_perimeter(&self) -> Result<Vec<NodeId>> {
        Ok(perimeter_partition(&self.network, &self.pois)?
            .members(self.oversized)
            .to_vec())
    }

    /// Least central node of the oversized perimeter (smallest id on ties),
    /// the spot an unaided eye-based choice lands on.
    pub fn manual_site(&self) -> Result<NodeId> {
        let members = self.oversized_perimeter()?;
        let field = straightness(&self.network, &members, self.direction)?;
        let host = self.pois.get(self.oversized).expect("index").node;
        let (site, _) = field
            .iter()
            .filter(|&(v, _)| v != host)
            .fold(None, |best: Option<(NodeId, f64)>, (v, s)| match best {
                Some((_, b)) if b <= s => best,
                _ => Some((v, s)),
            })
            .expect("perimeter has more than the POI");
        Ok(site)
    }

    /// Baseline plus a new hospital at `site`.
    pub fn with_new_at(&self, site: NodeId) -> Result<PoiSet> {
        self.pois.with_added(Poi::new(site, Self::NEW_LABEL))
    }

    pub fn manual_pois(&self) -> Result<PoiSet> {
        self.with_new_at(self.manual_site()?)
    }

    /// Reduce starting from the manual placement, keeping every original
    /// hospital where it is.
    pub fn suggest(&self) -> Result<RelocationPlan> {
        let pinned: BTreeSet<NodeId> = self.pois.nodes().into_iter().collect();
        let options = ReduceOptions {
            pinned,
            ..Default::default()
        };
        reduce_with_options(&self.network, &self.manual_pois()?, self.direction, &options)
    }
}

/// Four schools near the corners of a 20x20 city and two adjacent ones in
/// the middle. Absolute direction.
///
/// Baseline total is 13. Replacing the pair by one school at the straightness
/// argmax of their joint perimeter gives 6; a reduce pass on that single
/// school (others pinned) gives 4.
#[derive(Clone, Debug)]
pub struct CaseStudyTwo {
    pub network: Network,
    pub pois: PoiSet,
    /// Positions of the adjacent pair; the second is the one removed.
    pub pair: (usize, usize),
    pub direction: Direction,
}

pub fn case_study_two() -> CaseStudyTwo {
    let n = 20;
    let nodes = [
        cell(n, 4, 4),
        cell(n, 4, 15),
        cell(n, 15, 4),
        cell(n, 15, 15),
        cell(n, 10, 9),
        cell(n, 10, 10),
    ];
    CaseStudyTwo {
        network: city(n, 8),
        pois: labelled("school", &nodes),
        pair: (4, 5),
        direction: Direction::Absolute,
    }
}

impl CaseStudyTwo {
    pub fn baseline(&self) -> (Network, PoiSet) {
        (self.network.clone(), self.pois.clone())
    }

    pub fn track_baseline(&self) -> Result<InconsistencyReport> {
        track(&self.network, &self.pois, self.direction)
    }

    /// Union of the pair's perimeters, sorted.
    pub fn joint_perimeter(&self) -> Result<Vec<NodeId>> {
        let part = perimeter_partition(&self.network, &self.pois)?;
        let mut joint: Vec<NodeId> = part
            .members(self.pair.0)
            .iter()
            .chain(part.members(self.pair.1))
            .copied()
            .collect();
        joint.sort_unstable();
        Ok(joint)
    }

    pub fn merge_site(&self) -> Result<NodeId> {
        let joint = self.joint_perimeter()?;
        Ok(extract_central(&straightness(&self.network, &joint, self.direction)?))
    }

    /// Second school removed, first moved to the merge site.
    pub fn merged_pois(&self) -> Result<PoiSet> {
        let site = self.merge_site()?;
        let second = self.pois.get(self.pair.1).expect("index").node;
        let kept = self.pois.get(self.pair.0).expect("index").node;
        let merged = self.pois.without(second)?;
        if site == kept {
            return Ok(merged);
        }
        let k = merged.position(kept).expect("kept school");
        merged.with_relocated(k, site)
    }

    /// Reduce on the merged set, moving only the merged school.
    pub fn suggest(&self) -> Result<RelocationPlan> {
        let merged = self.merged_pois()?;
        let kept = self.pois.get(self.pair.0).expect("index").label.clone();
        let pinned = merged.iter().filter(|p| p.label != kept).map(|p| p.node).collect();
        let options = ReduceOptions {
            pinned,
            ..Default::default()
        };
        reduce_with_options(&self.network, &merged, self.direction, &options)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_one_manual_placement_backfires() {
        let cs = case_study_one();
        let base = cs.track_baseline().unwrap();
        let perimeter = cs.oversized_perimeter().unwrap();
        let sizes: Vec<usize> = (0..cs.pois.len())
            .map(|k| perimeter_partition(&cs.network, &cs.pois).unwrap().members(k).len())
            .collect();
        assert_eq!(sizes.iter().max(), Some(&perimeter.len()));
        let manual = track(&cs.network, &cs.manual_pois().unwrap(), cs.direction).unwrap();
        let plan = cs.suggest().unwrap();
        assert_eq!((base.total, manual.total, plan.totals_after), (39, 41, 34));
        assert_eq!(plan.moves.len(), 1);
        assert_eq!(plan.moves[0].label, CaseStudyOne::NEW_LABEL);
        let after = track(&cs.network, &plan.final_pois, cs.direction).unwrap();
        assert_eq!(after.total, plan.totals_after);
    }

    #[test]
    fn case_one_suggestion_is_argmax_of_consistent_set() {
        let cs = case_study_one();
        let manual = cs.manual_pois().unwrap();
        let report = track(&cs.network, &manual, cs.direction).unwrap();
        let k = manual.position_of_label(CaseStudyOne::NEW_LABEL).unwrap();
        let field = straightness(&cs.network, &report.consistent_per_poi[k], cs.direction).unwrap();
        let plan = cs.suggest().unwrap();
        assert_eq!(plan.moves[0].new, extract_central(&field));
    }

    #[test]
    fn case_two_merge_lowers_total() {
        let cs = case_study_two();
        let base = cs.track_baseline().unwrap();
        let merged = track(&cs.network, &cs.merged_pois().unwrap(), cs.direction).unwrap();
        let plan = cs.suggest().unwrap();
        assert_eq!((base.total, merged.total, plan.totals_after), (13, 6, 4));
        assert_eq!(merged.pois.len(), cs.pois.len() - 1);
    }

    #[test]
    fn pair_is_adjacent() {
        let cs = case_study_two();
        let a = cs.pois.get(cs.pair.0).unwrap().node;
        let b = cs.pois.get(cs.pair.1).unwrap().node;
        assert!(cs.network.edge_weight(a, b).is_some() || cs.network.edge_weight(b, a).is_some());
    }
}
