//! Tower interference graph and channel reassignment with a minimum channel
//! separation between overlapping transmitters.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::geo::haversine_distance;
use crate::propagation::BandPlan;
use crate::regulatory::{
    fcc_grade_b_radius, protection_radius, RegulatoryError, RegulatoryParams, Transmitter,
};

/// Largest instance the exhaustive solver accepts.
pub const BRUTE_FORCE_MAX_NODES: usize = 12;

#[derive(Debug, Error)]
pub enum ReassignError {
    #[error("duplicate tower id '{0}'")]
    DuplicateId(String),
    #[error("edge ({0}, {1}) refers to a missing node or is a self-loop")]
    BadEdge(usize, usize),
    #[error("no channel in the band satisfies separation {min_separation} for tower '{node}'")]
    BandExhausted { node: String, min_separation: u8 },
    #[error("instance has {0} nodes; exhaustive search is limited to {BRUTE_FORCE_MAX_NODES}")]
    TooLarge(usize),
    #[error("tower '{0}' has no channel assigned")]
    Unassigned(String),
    #[error("node order must be a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("minimum separation must be at least 1")]
    BadSeparation,
    #[error("unknown coverage basis '{0}' (expected protection or fcc)")]
    UnknownBasis(String),
    #[error(transparent)]
    Regulatory(#[from] RegulatoryError),
}

/// Which radius defines a tower's coverage disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverageBasis {
    Protection,
    #[default]
    Fcc,
}

impl CoverageBasis {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoverageBasis::Protection => "protection",
            CoverageBasis::Fcc => "fcc",
        }
    }
}

impl fmt::Display for CoverageBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoverageBasis {
    type Err = ReassignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "protection" => Ok(CoverageBasis::Protection),
            "fcc" => Ok(CoverageBasis::Fcc),
            _ => Err(ReassignError::UnknownBasis(s.to_string())),
        }
    }
}

pub fn coverage_radius(
    tx: &Transmitter,
    p: &RegulatoryParams,
    basis: CoverageBasis,
) -> Result<f64, ReassignError> {
    let r = match basis {
        CoverageBasis::Protection => protection_radius(tx, p)?,
        CoverageBasis::Fcc => fcc_grade_b_radius(tx, p)?,
    };
    Ok(r.km)
}

/// Simple undirected graph over tower ids.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceGraph {
    ids: Vec<String>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl InterferenceGraph {
    /// Builds a graph from node ids and index pairs. Duplicate edges are
    /// merged; each edge is stored as `(lo, hi)`.
    pub fn new(
        ids: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ReassignError> {
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(ReassignError::DuplicateId(id.clone()));
            }
        }
        let n = ids.len();
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(ReassignError::BadEdge(a, b));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &set {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            ids,
            adj,
            edges: set.into_iter().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    /// Same nodes, one edge fewer.
    pub fn without_edge(&self, edge: (usize, usize)) -> Self {
        let e = (edge.0.min(edge.1), edge.0.max(edge.1));
        Self::new(
            self.ids.clone(),
            self.edges.iter().copied().filter(|&x| x != e),
        )
        .expect("subgraph of a valid graph")
    }

    /// Descending degree, ties broken by id.
    pub fn degree_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.degree(b)
                .cmp(&self.degree(a))
                .then_with(|| self.ids[a].cmp(&self.ids[b]))
        });
        order
    }
}

/// Connects every pair of towers whose coverage disks overlap
/// (centre distance strictly below the sum of radii).
pub fn build_interference_graph(
    towers: &[Transmitter],
    p: &RegulatoryParams,
    basis: CoverageBasis,
) -> Result<InterferenceGraph, ReassignError> {
    let radii: Vec<f64> = towers
        .par_iter()
        .map(|t| coverage_radius(t, p, basis))
        .collect::<Result<_, _>>()?;
    let edges: Vec<(usize, usize)> = (0..towers.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let radii = &radii;
            ((i + 1)..towers.len()).filter_map(move |j| {
                let d = haversine_distance(towers[i].location, towers[j].location);
                (d < radii[i] + radii[j]).then_some((i, j))
            })
        })
        .collect();
    InterferenceGraph::new(towers.iter().map(|t| t.id.clone()).collect(), edges)
}

/// A channel per graph node.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelAssignment {
    ids: Vec<String>,
    channels: Vec<u8>,
    violations: Vec<(usize, usize)>,
}

impl ChannelAssignment {
    /// Wraps `channels` (aligned with the graph's nodes) and records its
    /// violations.
    pub fn new(
        g: &InterferenceGraph,
        channels: Vec<u8>,
        min_separation: u8,
    ) -> Result<Self, ReassignError> {
        let as_opt: Vec<Option<u8>> = channels.iter().copied().map(Some).collect();
        let violations = validate_assignment(g, &as_opt, min_separation)?;
        Ok(Self {
            ids: g.ids.clone(),
            channels,
            violations,
        })
    }

    pub fn channels(&self) -> &[u8] {
        &self.channels
    }

    pub fn channel_of(&self, id: &str) -> Option<u8> {
        self.ids
            .iter()
            .position(|x| x == id)
            .map(|i| self.channels[i])
    }

    pub fn as_map(&self) -> BTreeMap<&str, u8> {
        self.ids
            .iter()
            .map(String::as_str)
            .zip(self.channels.iter().copied())
            .collect()
    }

    pub fn distinct_channels_used(&self) -> usize {
        distinct(&self.channels)
    }

    pub fn violations(&self) -> &[(usize, usize)] {
        &self.violations
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn distinct(channels: &[u8]) -> usize {
    channels.iter().collect::<BTreeSet<_>>().len()
}

/// Edges whose endpoint channels are closer than `min_separation`.
pub fn validate_assignment(
    g: &InterferenceGraph,
    channels: &[Option<u8>],
    min_separation: u8,
) -> Result<Vec<(usize, usize)>, ReassignError> {
    if let Some(i) = (0..g.len()).find(|&i| channels.get(i).copied().flatten().is_none()) {
        return Err(ReassignError::Unassigned(g.ids[i].clone()));
    }
    Ok(g.edges
        .iter()
        .copied()
        .filter(|&(a, b)| {
            let (ca, cb) = (channels[a].unwrap_or(0), channels[b].unwrap_or(0));
            ca.abs_diff(cb) < min_separation
        })
        .collect())
}

/// First-fit channel assignment over an explicit node order.
pub fn greedy_reassign_with_order(
    g: &InterferenceGraph,
    band: &BandPlan,
    min_separation: u8,
    order: &[usize],
) -> Result<ChannelAssignment, ReassignError> {
    if min_separation == 0 {
        return Err(ReassignError::BadSeparation);
    }
    let mut check = order.to_vec();
    check.sort_unstable();
    if check != (0..g.len()).collect::<Vec<_>>() {
        return Err(ReassignError::BadOrder(g.len()));
    }
    let mut assigned: Vec<Option<u8>> = vec![None; g.len()];
    for &v in order {
        let pick = band.channels().find(|&c| {
            g.neighbors(v)
                .iter()
                .filter_map(|&u| assigned[u])
                .all(|cu| cu.abs_diff(c) >= min_separation)
        });
        match pick {
            Some(c) => assigned[v] = Some(c),
            None => {
                return Err(ReassignError::BandExhausted {
                    node: g.ids[v].clone(),
                    min_separation,
                })
            }
        }
    }
    let channels = assigned.into_iter().map(|c| c.unwrap_or(0)).collect();
    ChannelAssignment::new(g, channels, min_separation)
}

/// First-fit assignment visiting towers by descending interference degree.
pub fn greedy_reassign(
    g: &InterferenceGraph,
    band: &BandPlan,
    min_separation: u8,
) -> Result<ChannelAssignment, ReassignError> {
    greedy_reassign_with_order(g, band, min_separation, &g.degree_order())
}

/// Assignment using the fewest distinct channels, by exhaustive search.
///
/// Channel sets are tried by increasing size and then lexicographically;
/// within a set the lexicographically smallest assignment wins, so the result
/// is deterministic.
pub fn optimal_reassign_bruteforce(
    g: &InterferenceGraph,
    band: &BandPlan,
    min_separation: u8,
) -> Result<ChannelAssignment, ReassignError> {
    if min_separation == 0 {
        return Err(ReassignError::BadSeparation);
    }
    let n = g.len();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(ReassignError::TooLarge(n));
    }
    if n == 0 {
        return ChannelAssignment::new(g, Vec::new(), min_separation);
    }
    let all: Vec<u8> = band.channels().collect();
    for k in 1..=all.len().min(n) {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let palette: Vec<u8> = subset.iter().map(|&i| all[i]).collect();
            let mut colors = vec![0u8; n];
            if search(g, &palette, min_separation, 0, &mut colors) {
                return ChannelAssignment::new(g, colors, min_separation);
            }
            if !next_combination(&mut subset, all.len()) {
                break;
            }
        }
    }
    let node = g.ids.first().cloned().unwrap_or_default();
    Err(ReassignError::BandExhausted {
        node,
        min_separation,
    })
}

fn search(g: &InterferenceGraph, palette: &[u8], sep: u8, v: usize, colors: &mut [u8]) -> bool {
    if v == g.len() {
        return true;
    }
    for &c in palette {
        let ok = g
            .neighbors(v)
            .iter()
            .filter(|&&u| u < v)
            .all(|&u| colors[u].abs_diff(c) >= sep);
        if ok {
            colors[v] = c;
            if search(g, palette, sep, v + 1, colors) {
                return true;
            }
        }
    }
    false
}

/// Advances `idx` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
        return false;
    };
    idx[i] += 1;
    for j in (i + 1)..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// Outcome of reassigning a tower set.
#[derive(Debug, Clone)]
pub struct Reassignment {
    pub graph: InterferenceGraph,
    pub original: Vec<u8>,
    pub assignment: ChannelAssignment,
    /// The existing plan was already valid and used no more channels than
    /// the greedy plan, so it was kept.
    pub kept_original: bool,
}

/// Greedy reassignment that never replaces a valid existing plan with one
/// using more distinct channels.
pub fn reassign_towers(
    towers: &[Transmitter],
    p: &RegulatoryParams,
    basis: CoverageBasis,
    min_separation: u8,
) -> Result<Reassignment, ReassignError> {
    let graph = build_interference_graph(towers, p, basis)?;
    let original: Vec<u8> = towers.iter().map(|t| t.channel).collect();
    let status_quo = ChannelAssignment::new(&graph, original.clone(), min_separation)?;
    let greedy = greedy_reassign(&graph, &BandPlan::UHF_IV, min_separation);
    let (assignment, kept_original) = match greedy {
        Ok(a) if !status_quo.is_valid() => (a, false),
        Ok(a) if a.distinct_channels_used() < status_quo.distinct_channels_used() => (a, false),
        Ok(_) => (status_quo, true),
        Err(_) if status_quo.is_valid() => (status_quo, true),
        Err(e) => return Err(e),
    };
    Ok(Reassignment {
        graph,
        original,
        assignment,
        kept_original,
    })
}
