//! Spreading activation over the semantic network.
//!
//! Activation starts at a set of seed nodes and flows along weighted edges
//! in synchronous steps. Seeds are persistent: the seed strength is re-added
//! on every step, so seeded nodes stay driven while activity decays with
//! graph distance. Per node the update is
//!
//! ```text
//! a0(n)   = clamp01(seed(n))
//! a_t1(n) = clamp01(seed(n) + damping * sum over edges m->n of w(m, n) * a_t(m))
//! ```
//!
//! and a run performs `steps` updates after initialization. All node
//! activities stay inside `[0, 1]` by construction.
//!
//! The propagation itself only touches nodes reachable from the seeds, but
//! accumulates inflow in ascending node order so results are bit-identical
//! to a dense evaluation and independent of how the frontier grew.

use thiserror::Error;

use crate::lexnet::{NodeId, SemanticNetwork};

pub const DEFAULT_STEPS: u32 = 10;
pub const DEFAULT_DAMPING: f64 = 0.8;

#[derive(Debug, Error)]
pub enum ActivationError {
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("seed strength {strength} for node {node} is negative")]
    NegativeStrength { node: usize, strength: f64 },
    #[error("seed strength for node {0} is not finite")]
    NonFiniteStrength(usize),
    /// Every provided strength was zero; activation needs at least one
    /// positive seed to do anything.
    #[error("seed set has no positive strength")]
    EmptySeedSet,
    #[error("activation requires at least one step")]
    ZeroSteps,
    #[error("damping must lie strictly between 0 and 1, got {0}")]
    DampingOutOfRange(f64),
}

/// Validated activation parameters: `steps >= 1`, `damping` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationParams {
    steps: u32,
    damping: f64,
}

impl ActivationParams {
    pub fn new(steps: u32, damping: f64) -> Result<Self, ActivationError> {
        if steps == 0 {
            return Err(ActivationError::ZeroSteps);
        }
        if !damping.is_finite() || damping <= 0.0 || damping >= 1.0 {
            return Err(ActivationError::DampingOutOfRange(damping));
        }
        Ok(Self { steps, damping })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }
}

impl Default for ActivationParams {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            damping: DEFAULT_DAMPING,
        }
    }
}

/// A validated seed assignment for one specific network: strengths are
/// finite and non-negative, duplicates have been summed, zero entries
/// dropped, and at least one strength is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSet {
    // Sorted by node index; strengths all positive.
    entries: Vec<(usize, f64)>,
    // Node count of the network the seeds were validated against, so a
    // mismatched network is caught instead of silently misreading ids.
    node_count: usize,
}

impl SeedSet {
    /// Builds a seed set from words, resolving each against `network`.
    pub fn from_words<'a, I>(network: &SemanticNetwork, seeds: I) -> Result<Self, ActivationError>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let resolved = seeds
            .into_iter()
            .map(|(word, strength)| {
                network
                    .lookup(word)
                    .map(|node| (node, strength))
                    .ok_or_else(|| ActivationError::UnknownWord(word.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_nodes(network, resolved)
    }

    /// Builds a seed set from node ids. Strengths for a repeated node
    /// accumulate additively.
    pub fn from_nodes<I>(network: &SemanticNetwork, seeds: I) -> Result<Self, ActivationError>
    where
        I: IntoIterator<Item = (NodeId, f64)>,
    {
        let mut by_node: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for (node, strength) in seeds {
            let node = node.index();
            assert!(
                node < network.node_count(),
                "seed node {node} outside network with {} nodes",
                network.node_count()
            );
            if !strength.is_finite() {
                return Err(ActivationError::NonFiniteStrength(node));
            }
            if strength < 0.0 {
                return Err(ActivationError::NegativeStrength { node, strength });
            }
            *by_node.entry(node).or_insert(0.0) += strength;
        }
        let entries: Vec<(usize, f64)> = by_node
            .into_iter()
            .filter(|&(_, strength)| strength > 0.0)
            .collect();
        if entries.is_empty() {
            return Err(ActivationError::EmptySeedSet);
        }
        Ok(Self {
            entries,
            node_count: network.node_count(),
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.entries
            .iter()
            .map(|&(node, strength)| (NodeId::from_index(node), strength))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Node activities after an activation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationPattern {
    activity: Vec<f64>,
    steps_run: u32,
}

impl ActivationPattern {
    /// Activity of one node, in `[0, 1]`.
    pub fn activity(&self, node: NodeId) -> f64 {
        self.activity[node.index()]
    }

    /// Dense activity vector indexed by node id.
    pub fn values(&self) -> &[f64] {
        &self.activity
    }

    pub fn steps_run(&self) -> u32 {
        self.steps_run
    }
}

/// Runs spreading activation and returns the final pattern.
///
/// Panics if `seeds` was built against a network with a different node
/// count; seed sets are not transferable between networks.
pub fn activate(
    network: &SemanticNetwork,
    seeds: &SeedSet,
    params: &ActivationParams,
) -> ActivationPattern {
    assert_eq!(
        seeds.node_count,
        network.node_count(),
        "seed set was built for a different network"
    );
    let node_count = network.node_count();
    let damping = params.damping();

    let mut seed_strength = vec![0.0f64; node_count];
    let seed_nodes: Vec<usize> = seeds.entries.iter().map(|&(node, _)| node).collect();
    let mut activity = vec![0.0f64; node_count];
    for &(node, strength) in &seeds.entries {
        seed_strength[node] = strength;
        activity[node] = strength.clamp(0.0, 1.0);
    }

    // `active` lists the nodes with possibly nonzero activity, ascending.
    // Scattering from them in that order makes each node's inflow a sum in
    // ascending source order, the same order a dense sweep would use, so
    // the sparse traversal changes nothing about the floating-point result.
    let mut active: Vec<usize> = seed_nodes.clone();
    let mut inflow = vec![0.0f64; node_count];
    let mut touched: Vec<usize> = Vec::new();
    let mut is_touched = vec![false; node_count];

    for _ in 0..params.steps() {
        for &source in &active {
            let from = activity[source];
            if from == 0.0 {
                continue;
            }
            for &(target, weight) in network.out_edges_raw(source) {
                if !is_touched[target] {
                    is_touched[target] = true;
                    touched.push(target);
                }
                inflow[target] += weight * from;
            }
        }

        touched.sort_unstable();
        let next = merge_sorted(&seed_nodes, &touched);

        for &node in &active {
            activity[node] = 0.0;
        }
        for &node in &next {
            activity[node] = (seed_strength[node] + damping * inflow[node]).clamp(0.0, 1.0);
        }
        for &node in &touched {
            inflow[node] = 0.0;
            is_touched[node] = false;
        }
        touched.clear();
        active = next;
    }

    ActivationPattern {
        activity,
        steps_run: params.steps(),
    }
}

/// Merges two ascending index lists into one ascending, duplicate-free list.
fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Relatedness of `target` to `source`: the activity of `target` after
/// activating the network with the single seed `{source: 1.0}`.
///
/// The source word must be in the network; a target outside the network has
/// similarity 0. Because seeding is persistent, `similarity(net, w, w, p)`
/// is 1 for every in-network `w`.
pub fn similarity(
    network: &SemanticNetwork,
    source: &str,
    target: &str,
    params: &ActivationParams,
) -> Result<f64, ActivationError> {
    let source_node = network
        .lookup(source)
        .ok_or_else(|| ActivationError::UnknownWord(source.to_string()))?;
    let Some(target_node) = network.lookup(target) else {
        return Ok(0.0);
    };
    let seeds = SeedSet::from_nodes(network, [(source_node, 1.0)])?;
    let pattern = activate(network, &seeds, params);
    Ok(pattern.activity(target_node))
}
