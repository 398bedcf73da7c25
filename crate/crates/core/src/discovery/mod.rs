//! Feedback loop discovery.
//!
//! Small graphs are enumerated exhaustively ([`enumerate_loops`]). When the
//! circuit count passes a cap, [`discover`] falls back to the strongest-path
//! search ([`strongest_path_pass`]) run on the link scores of individual steps.

mod circuits;
pub mod scc;
mod strongest;
mod weighted;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

pub use circuits::enumerate_loops;
pub use strongest::{strongest_path_pass, PassStats};
pub use weighted::{GraphError, OutboundOrder, WeightedDigraph, WeightedEdge, WeightedNode};

use crate::scoring::{composite_scores, CompositeMode, LinkScoreSeries};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CycleError {
    #[error("empty cycle")]
    Empty,
    #[error("cycle visits {0} more than once")]
    RepeatedNode(String),
}

/// Rotates `cycle` so it starts at its lexicographically smallest name.
pub fn canonical_form<S: AsRef<str>>(cycle: &[S]) -> Result<Vec<String>, CycleError> {
    if cycle.is_empty() {
        return Err(CycleError::Empty);
    }
    let mut sorted: Vec<&str> = cycle.iter().map(AsRef::as_ref).collect();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(CycleError::RepeatedNode(w[0].into()));
    }
    let start = (0..cycle.len())
        .min_by(|&a, &b| cycle[a].as_ref().cmp(cycle[b].as_ref()))
        .unwrap_or(0);
    Ok(cycle[start..]
        .iter()
        .chain(&cycle[..start])
        .map(|s| String::from(s.as_ref()))
        .collect())
}

/// When a loop was first found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FoundAt {
    /// By exhaustive enumeration of a static graph.
    Static,
    /// By the strongest-path pass on the link scores of step `k`.
    Step(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopRecord {
    /// Canonical rotation.
    pub cycle: Vec<String>,
    /// Signed product of the edge weights the loop was found with.
    pub discovery_score: f64,
    pub found_at: FoundAt,
}

impl LoopRecord {
    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Consecutive edges of the loop, closing edge last.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        let n = self.cycle.len();
        (0..n).map(move |i| (self.cycle[i].as_str(), self.cycle[(i + 1) % n].as_str()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exhaustive,
    StrongestPath,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Exhaustive => "exhaustive",
            Provenance::StrongestPath => "strongest-path",
        }
    }
}

/// Loops keyed by canonical cycle, in insertion order.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopCatalog {
    pub provenance: Provenance,
    /// Set when an exhaustive enumeration stopped at its cap.
    pub overflow: bool,
    records: Vec<LoopRecord>,
    index: BTreeMap<Vec<String>, usize>,
}

impl LoopCatalog {
    pub fn new(provenance: Provenance) -> Self {
        LoopCatalog {
            provenance,
            overflow: false,
            records: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    /// Adds the loop unless its canonical cycle is already present. Returns
    /// whether it was added.
    pub fn insert<S: AsRef<str>>(
        &mut self,
        cycle: &[S],
        discovery_score: f64,
        found_at: FoundAt,
    ) -> Result<bool, CycleError> {
        let cycle = canonical_form(cycle)?;
        if self.index.contains_key(&cycle) {
            return Ok(false);
        }
        self.index.insert(cycle.clone(), self.records.len());
        self.records.push(LoopRecord {
            cycle,
            discovery_score,
            found_at,
        });
        Ok(true)
    }

    pub fn records(&self) -> &[LoopRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get<S: AsRef<str>>(&self, cycle: &[S]) -> Option<&LoopRecord> {
        let key = canonical_form(cycle).ok()?;
        self.index.get(&key).map(|&i| &self.records[i])
    }

    pub fn contains<S: AsRef<str>>(&self, cycle: &[S]) -> bool {
        self.get(cycle).is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    /// Exhaustive when the loop count stays within the cap, per-step
    /// strongest-path search otherwise.
    #[default]
    Auto,
    Exhaustive,
    StrongestPath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscoverConfig {
    pub cap: usize,
    pub stride: usize,
    pub method: Method,
    pub order: OutboundOrder,
}

impl Default for DiscoverConfig {
    fn default() -> Self {
        DiscoverConfig {
            cap: 1000,
            stride: 1,
            method: Method::Auto,
            order: OutboundOrder::ByMagnitude,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Discovery {
    pub catalog: LoopCatalog,
    /// Whether exhaustive enumeration was attempted and hit the cap.
    pub cap_exceeded: bool,
    /// Number of per-step passes run (0 for exhaustive).
    pub passes: usize,
    pub stats: PassStats,
}

/// Steps searched by the per-step passes: `1, 1 + stride, ...` up to `n`.
pub fn pass_steps(n: usize, stride: usize) -> impl Iterator<Item = usize> {
    (1..=n).step_by(stride.max(1))
}

/// Finds the loops of a scored run.
///
/// The exhaustive attempt runs on the max-mode composite graph (edges that
/// were ever active). On overflow, or when forced, strongest-path passes run
/// on each searched step's own link scores, feeding one shared registry.
pub fn discover(series: &LinkScoreSeries, cfg: &DiscoverConfig) -> Discovery {
    let mut cap_exceeded = false;
    if cfg.method != Method::StrongestPath {
        let composite = composite_scores(series, CompositeMode::Max);
        let g = WeightedDigraph::from_digraph(&series.graph, &composite.weights).expect("link scores are finite");
        let catalog = enumerate_loops(&g, cfg.cap);
        if !catalog.overflow || cfg.method == Method::Exhaustive {
            return Discovery {
                cap_exceeded: catalog.overflow,
                catalog,
                passes: 0,
                stats: PassStats::default(),
            };
        }
        cap_exceeded = true;
    }

    let mut registry = LoopCatalog::new(Provenance::StrongestPath);
    let mut stats = PassStats::default();
    let mut passes = 0;
    let mut g = WeightedDigraph::from_digraph(&series.graph, &series.at(0))
        .expect("link scores are finite")
        .with_order(cfg.order);
    for k in pass_steps(series.steps(), cfg.stride) {
        g.set_weights(&series.at(k)).expect("link scores are finite");
        strongest_path_pass(&g, &mut registry, FoundAt::Step(k), &mut stats);
        passes += 1;
    }
    Discovery {
        catalog: registry,
        cap_exceeded,
        passes,
        stats,
    }
}
