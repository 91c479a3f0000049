//! Deterministic negotiation simulator.
//!
//! Replays the hop-by-hop chronology of a distributed admission
//! negotiation: a node receives the request (stage a), self-assesses and
//! cancels if incapable (b), queries every neighbor that still has a path
//! to the listener (c), collects their suitability values (d), and
//! forwards to the best candidate (e). Hops repeat until the listener is
//! reached, a hop cancels, or the hop limit trips.
//!
//! Everything is synchronous and seeded: node RNG streams derive from the
//! master seed and the node id, neighbors are visited in sorted order,
//! and a trace is bit-reproducible under a fixed seed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::criteria::{self, ProximitySample};
use crate::engine::{self, SuitabilityBreakdown};
use crate::error::{Error, Result};
use crate::request::AdmissionRequest;
use crate::resources::{NodeState, ResourceRegistry};

/// Hops after which a negotiation is abandoned as looping.
pub const DEFAULT_HOP_LIMIT: usize = 64;

/// Link conditions attached to one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeParams {
    pub hops: u32,
    /// Round-trip time, seconds.
    pub rtt: f64,
    /// Loss fraction in [0, 1].
    pub loss: f64,
    /// Packet delay variation, seconds.
    pub pdv: f64,
}

fn default_hops() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeSpec {
    a: String,
    b: String,
    #[serde(default = "default_hops")]
    hops: u32,
    #[serde(default)]
    rtt_ms: f64,
    #[serde(default)]
    loss: f64,
    #[serde(default)]
    pdv_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TopologyDoc {
    nodes: Vec<NodeState>,
    edges: Vec<EdgeSpec>,
}

/// Nodes plus symmetric edges carrying per-link proximity parameters.
#[derive(Debug, Clone, Default)]
pub struct Topology {
    nodes: BTreeMap<String, NodeState>,
    adjacency: BTreeMap<String, BTreeMap<String, EdgeParams>>,
}

impl Topology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: NodeState) {
        self.adjacency.entry(node.node_id.clone()).or_default();
        self.nodes.insert(node.node_id.clone(), node);
    }

    /// Adds a symmetric edge between two existing nodes.
    pub fn add_edge(&mut self, a: &str, b: &str, params: EdgeParams) -> Result<()> {
        if a == b {
            return Err(Error::SelfLoopEdge(a.to_string()));
        }
        for id in [a, b] {
            if !self.nodes.contains_key(id) {
                return Err(Error::UnknownNode(id.to_string()));
            }
        }
        if self.adjacency[a].contains_key(b) {
            return Err(Error::DuplicateEdge {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        self.adjacency.get_mut(a).unwrap().insert(b.to_string(), params);
        self.adjacency.get_mut(b).unwrap().insert(a.to_string(), params);
        Ok(())
    }

    pub fn node(&self, id: &str) -> Result<&NodeState> {
        self.nodes
            .get(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    /// Neighbors of a node, in sorted id order.
    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = &str> {
        self.adjacency
            .get(id)
            .into_iter()
            .flat_map(|edges| edges.keys().map(String::as_str))
    }

    /// Whether `to` can be reached from `from` without entering any node
    /// in `excluded`.
    pub fn reachable(&self, from: &str, to: &str, excluded: &BTreeSet<String>) -> bool {
        if excluded.contains(from) {
            return false;
        }
        let mut seen = BTreeSet::from([from.to_string()]);
        let mut queue = VecDeque::from([from.to_string()]);
        while let Some(node) = queue.pop_front() {
            if node == to {
                return true;
            }
            for next in self.neighbors(&node) {
                if !excluded.contains(next) && seen.insert(next.to_string()) {
                    queue.push_back(next.to_string());
                }
            }
        }
        false
    }

    /// Proximity of a node toward a listener, aggregated over the
    /// hop-count-shortest path: hop counts, RTTs, and PDVs add up, losses
    /// compound. Ties between equal-length paths break deterministically
    /// on node ids. An unreachable listener reads as worst-case
    /// connectivity.
    pub fn path_proximity(&self, from: &str, listener: &str) -> ProximitySample {
        if from == listener {
            return ProximitySample::perfect(listener);
        }
        let mut dist: BTreeMap<&str, u64> = BTreeMap::new();
        let mut pred: BTreeMap<&str, &str> = BTreeMap::new();
        dist.insert(from, 0);
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(u64, &str)>> =
            std::collections::BinaryHeap::new();
        heap.push(std::cmp::Reverse((0, from)));
        while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
            if d > dist.get(u).copied().unwrap_or(u64::MAX) {
                continue;
            }
            if let Some(edges) = self.adjacency.get(u) {
                for (v, edge) in edges {
                    let next = d + u64::from(edge.hops);
                    let known = dist.get(v.as_str()).copied().unwrap_or(u64::MAX);
                    let better = next < known
                        || (next == known && pred.get(v.as_str()).is_some_and(|p| u < *p));
                    if better {
                        dist.insert(v, next);
                        pred.insert(v, u);
                        heap.push(std::cmp::Reverse((next, v)));
                    }
                }
            }
        }

        if !dist.contains_key(listener) {
            let maxima = self
                .nodes
                .get(from)
                .map(|node| node.config.proximity_maxima)
                .unwrap_or_default();
            return ProximitySample {
                hops: maxima.hop_max as u32,
                rtt: maxima.rtt_max,
                loss: 1.0,
                pdv: maxima.pdv_max,
                toward: listener.to_string(),
            };
        }

        let mut hops = 0u32;
        let mut rtt = 0.0;
        let mut delivery = 1.0;
        let mut pdv = 0.0;
        let mut node = listener;
        while node != from {
            let previous = pred[node];
            let edge = &self.adjacency[previous][node];
            hops += edge.hops;
            rtt += edge.rtt;
            delivery *= 1.0 - edge.loss;
            pdv += edge.pdv;
            node = previous;
        }
        ProximitySample {
            hops,
            rtt,
            loss: 1.0 - delivery,
            pdv,
            toward: listener.to_string(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TopologyDoc = serde_json::from_str(text)?;
        let mut topology = Self::new();
        for node in doc.nodes {
            node.validate()?;
            topology.add_node(node);
        }
        for edge in doc.edges {
            topology.add_edge(
                &edge.a,
                &edge.b,
                EdgeParams {
                    hops: edge.hops,
                    rtt: edge.rtt_ms * 1e-3,
                    loss: edge.loss,
                    pdv: edge.pdv_ms * 1e-3,
                },
            )?;
        }
        Ok(topology)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Applies one engine config to every node, for experiment overrides.
    pub fn override_configs(&mut self, config: crate::config::EngineConfig) {
        for node in self.nodes.values_mut() {
            node.config = config;
        }
    }
}

/// A candidate next hop and its collected suitability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub node: String,
    pub suitability: f64,
}

/// One event in the negotiation chronology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage")]
pub enum TraceEvent {
    #[serde(rename = "a")]
    Received { node: String, request_id: String },
    #[serde(rename = "b")]
    SelfAssessed { node: String, suitability: f64 },
    #[serde(rename = "c")]
    Queried { node: String, neighbors: Vec<String> },
    #[serde(rename = "d")]
    Collected {
        node: String,
        from: String,
        suitability: f64,
    },
    #[serde(rename = "e")]
    Forwarded {
        node: String,
        ranking: Vec<Candidate>,
        next: String,
    },
    #[serde(rename = "cancel")]
    Canceled { node: String, reason: String },
}

/// Breakdown recorded at one hop's self-assessment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopBreakdown {
    pub node: String,
    pub breakdown: SuitabilityBreakdown,
}

/// The full negotiation outcome: ordered events, the path walked, and the
/// per-hop breakdowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegotiationTrace {
    pub events: Vec<TraceEvent>,
    pub final_path: Vec<String>,
    pub delivered: bool,
    pub breakdowns: Vec<HopBreakdown>,
}

impl NegotiationTrace {
    /// One JSON event per line, closed by a result line.
    pub fn to_ndjson(&self) -> Result<String> {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event)?);
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&serde_json::json!({
            "stage": "result",
            "path": self.final_path,
            "delivered": self.delivered,
        }))?);
        out.push('\n');
        Ok(out)
    }
}

/// Outcome of a single hop.
#[derive(Debug, Clone)]
pub struct HopOutcome {
    /// The chosen next hop, or `None` when this hop canceled.
    pub next: Option<String>,
    pub events: Vec<TraceEvent>,
    pub breakdown: SuitabilityBreakdown,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &byte in bytes {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Stable per-node stream seed: independent streams per node, all derived
/// from the master seed.
fn node_stream_seed(master_seed: u64, node_id: &str) -> u64 {
    splitmix64(master_seed ^ fnv1a64(node_id.as_bytes()))
}

/// Seeded, single-threaded negotiation runner over a topology.
pub struct Simulator<'t> {
    topology: &'t Topology,
    registry: ResourceRegistry,
    hop_limit: usize,
    rngs: BTreeMap<String, ChaCha12Rng>,
}

impl<'t> Simulator<'t> {
    pub fn new(topology: &'t Topology, master_seed: u64) -> Self {
        let rngs = topology
            .nodes
            .keys()
            .map(|id| {
                (
                    id.clone(),
                    ChaCha12Rng::seed_from_u64(node_stream_seed(master_seed, id)),
                )
            })
            .collect();
        Self {
            topology,
            registry: ResourceRegistry::with_builtins(),
            hop_limit: DEFAULT_HOP_LIMIT,
            rngs,
        }
    }

    pub fn with_hop_limit(mut self, hop_limit: usize) -> Self {
        self.hop_limit = hop_limit;
        self
    }

    /// Replaces the registry, for topologies using custom resource kinds.
    pub fn with_registry(mut self, registry: ResourceRegistry) -> Self {
        self.registry = registry;
        self
    }

    fn self_assess(
        &mut self,
        node_id: &str,
        request: &AdmissionRequest,
    ) -> Result<SuitabilityBreakdown> {
        let node = self.topology.node(node_id)?;
        let proximity = self.topology.path_proximity(node_id, &request.listener);
        let rng = self
            .rngs
            .get_mut(node_id)
            .expect("one rng per topology node");
        let salt = criteria::draw_salt(rng);
        engine::assess(request, node, &self.registry, &proximity, salt)
    }

    /// Runs one hop of the chronology from `current`: self-assessment,
    /// neighbor queries, and candidate ranking. `visited` nodes are
    /// excluded from candidacy.
    pub fn step_hop(
        &mut self,
        current: &str,
        request: &AdmissionRequest,
        visited: &BTreeSet<String>,
    ) -> Result<HopOutcome> {
        let mut events = vec![TraceEvent::Received {
            node: current.to_string(),
            request_id: request.request_id.clone(),
        }];

        let breakdown = self.self_assess(current, request)?;
        events.push(TraceEvent::SelfAssessed {
            node: current.to_string(),
            suitability: breakdown.suitability,
        });
        if breakdown.suitability == 0.0 {
            events.push(TraceEvent::Canceled {
                node: current.to_string(),
                reason: "self-assessment is zero".to_string(),
            });
            return Ok(HopOutcome {
                next: None,
                events,
                breakdown,
            });
        }

        let candidates: Vec<String> = self
            .topology
            .neighbors(current)
            .filter(|neighbor| !visited.contains(*neighbor))
            .filter(|neighbor| {
                *neighbor == request.listener
                    || self.topology.reachable(neighbor, &request.listener, visited)
            })
            .map(str::to_string)
            .collect();
        events.push(TraceEvent::Queried {
            node: current.to_string(),
            neighbors: candidates.clone(),
        });
        if candidates.is_empty() {
            events.push(TraceEvent::Canceled {
                node: current.to_string(),
                reason: "route exhausted: no unvisited neighbor reaches the listener".to_string(),
            });
            return Ok(HopOutcome {
                next: None,
                events,
                breakdown,
            });
        }

        let mut ranking = Vec::with_capacity(candidates.len());
        for candidate in &candidates {
            let response = self.self_assess(candidate, request)?;
            events.push(TraceEvent::Collected {
                node: current.to_string(),
                from: candidate.clone(),
                suitability: response.suitability,
            });
            ranking.push(Candidate {
                node: candidate.clone(),
                suitability: response.suitability,
            });
        }
        ranking.sort_by(|a, b| {
            b.suitability
                .partial_cmp(&a.suitability)
                .expect("suitability values are never NaN")
                .then_with(|| a.node.cmp(&b.node))
        });

        let best = ranking[0].clone();
        if best.suitability == 0.0 {
            events.push(TraceEvent::Canceled {
                node: current.to_string(),
                reason: "no capable candidate".to_string(),
            });
            return Ok(HopOutcome {
                next: None,
                events,
                breakdown,
            });
        }
        events.push(TraceEvent::Forwarded {
            node: current.to_string(),
            ranking,
            next: best.node.clone(),
        });
        Ok(HopOutcome {
            next: Some(best.node),
            events,
            breakdown,
        })
    }

    /// Runs the negotiation from the request's talker toward its
    /// listener. A cancel ends the trace normally; only a tripped hop
    /// limit is an error.
    pub fn run(&mut self, request: &AdmissionRequest) -> Result<NegotiationTrace> {
        self.topology.node(&request.talker)?;
        self.topology.node(&request.listener)?;

        let mut visited = BTreeSet::from([request.talker.clone()]);
        let mut path = vec![request.talker.clone()];
        let mut events = Vec::new();
        let mut breakdowns = Vec::new();
        let mut current = request.talker.clone();
        let mut delivered = false;

        loop {
            if current == request.listener {
                delivered = true;
                break;
            }
            if path.len() > self.hop_limit {
                return Err(Error::HopLimitExceeded(self.hop_limit));
            }
            let outcome = self.step_hop(&current, request, &visited)?;
            events.extend(outcome.events);
            breakdowns.push(HopBreakdown {
                node: current.clone(),
                breakdown: outcome.breakdown,
            });
            match outcome.next {
                None => break,
                Some(next) => {
                    visited.insert(next.clone());
                    path.push(next.clone());
                    current = next;
                }
            }
        }

        Ok(NegotiationTrace {
            events,
            final_path: path,
            delivered,
            breakdowns,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::request::Requirement;
    use crate::resources::{NetworkInterface, CPU_CORES};

    fn capable_node(id: &str) -> NodeState {
        NodeState::new(id)
            .with_total(CPU_CORES, 8.0)
            .with_interface(NetworkInterface::new("eth0", 1e9))
    }

    fn quiet_edge() -> EdgeParams {
        EdgeParams {
            hops: 1,
            rtt: 0.01,
            loss: 0.0,
            pdv: 0.001,
        }
    }

    fn request(talker: &str, listener: &str) -> AdmissionRequest {
        AdmissionRequest::new(
            vec![Requirement::new(CPU_CORES, 2.0)],
            5,
            talker,
            listener,
            "req-1",
        )
    }

    fn chain_topology() -> Topology {
        let mut topology = Topology::new();
        for id in ["T", "a", "b", "L"] {
            topology.add_node(capable_node(id));
        }
        topology.add_edge("T", "a", quiet_edge()).unwrap();
        topology.add_edge("a", "b", quiet_edge()).unwrap();
        topology.add_edge("b", "L", quiet_edge()).unwrap();
        topology
    }

    /// Six nodes: T feeds m, which fans out to n1/n2/n3, all reaching L.
    /// n2 is left idle while n1 and n3 are heavily used, so n2 grades
    /// strictly highest.
    fn fan_topology() -> Topology {
        let mut topology = Topology::new();
        topology.add_node(capable_node("T"));
        topology.add_node(capable_node("m"));
        topology.add_node(capable_node("n1").with_in_use(CPU_CORES, 5.0));
        topology.add_node(capable_node("n2"));
        topology.add_node(capable_node("n3").with_in_use(CPU_CORES, 5.0));
        topology.add_node(capable_node("L"));
        topology.add_edge("T", "m", quiet_edge()).unwrap();
        for n in ["n1", "n2", "n3"] {
            topology.add_edge("m", n, quiet_edge()).unwrap();
            topology.add_edge(n, "L", quiet_edge()).unwrap();
        }
        topology
    }

    #[test]
    fn chain_walks_straight_to_the_listener() {
        let topology = chain_topology();
        let mut sim = Simulator::new(&topology, 7);
        let trace = sim.run(&request("T", "L")).unwrap();
        assert!(trace.delivered);
        assert_eq!(trace.final_path, ["T", "a", "b", "L"]);
    }

    #[test]
    fn best_candidate_wins_the_fanout() {
        let topology = fan_topology();
        let mut sim = Simulator::new(&topology, 7);
        let visited = BTreeSet::from(["T".to_string(), "m".to_string()]);
        let outcome = sim.step_hop("m", &request("T", "L"), &visited).unwrap();
        assert_eq!(outcome.next.as_deref(), Some("n2"));
    }

    #[test]
    fn incapable_current_node_cancels_at_stage_b() {
        let mut topology = chain_topology();
        topology.add_node(NodeState::new("drained").with_total(CPU_CORES, 1.0));
        topology.add_edge("drained", "L", quiet_edge()).unwrap();
        let mut sim = Simulator::new(&topology, 7);
        let trace = sim.run(&request("drained", "L")).unwrap();
        assert!(!trace.delivered);
        assert_eq!(trace.final_path, ["drained"]);
        assert!(matches!(
            trace.events.last(),
            Some(TraceEvent::Canceled { .. })
        ));
    }

    #[test]
    fn incapable_candidates_cancel_with_no_forward() {
        // The only route runs through a node with nothing left to give.
        let mut topology = Topology::new();
        topology.add_node(capable_node("T"));
        topology.add_node(capable_node("x").with_in_use(CPU_CORES, 8.0));
        topology.add_node(capable_node("L"));
        topology.add_edge("T", "x", quiet_edge()).unwrap();
        topology.add_edge("x", "L", quiet_edge()).unwrap();
        let mut sim = Simulator::new(&topology, 7);
        let trace = sim.run(&request("T", "L")).unwrap();
        assert!(!trace.delivered);
        assert_eq!(trace.final_path, ["T"]);
        let canceled = trace.events.iter().any(|event| {
            matches!(event, TraceEvent::Canceled { reason, .. } if reason.contains("no capable candidate"))
        });
        assert!(canceled, "events: {:#?}", trace.events);
    }

    #[test]
    fn route_exhaustion_cancels() {
        let mut topology = Topology::new();
        topology.add_node(capable_node("T"));
        topology.add_node(capable_node("island"));
        topology.add_node(capable_node("L"));
        topology.add_edge("T", "island", quiet_edge()).unwrap();
        let mut sim = Simulator::new(&topology, 7);
        let trace = sim.run(&request("T", "L")).unwrap();
        assert!(!trace.delivered);
        let canceled = trace.events.iter().any(|event| {
            matches!(event, TraceEvent::Canceled { reason, .. } if reason.contains("route exhausted"))
        });
        assert!(canceled, "events: {:#?}", trace.events);
    }

    #[test]
    fn visited_nodes_never_reappear_on_the_path() {
        // A cycle T - x - y - T plus y - L; the walk must not loop.
        let mut topology = Topology::new();
        for id in ["T", "x", "y", "L"] {
            topology.add_node(capable_node(id));
        }
        topology.add_edge("T", "x", quiet_edge()).unwrap();
        topology.add_edge("x", "y", quiet_edge()).unwrap();
        topology.add_edge("y", "T", quiet_edge()).unwrap();
        topology.add_edge("y", "L", quiet_edge()).unwrap();
        let mut sim = Simulator::new(&topology, 7);
        let trace = sim.run(&request("T", "L")).unwrap();
        assert!(trace.delivered);
        let mut seen = BTreeSet::new();
        for node in &trace.final_path {
            assert!(seen.insert(node.clone()), "revisited {node}");
        }
    }

    #[test]
    fn traces_are_bit_reproducible_under_a_seed() {
        let topology = fan_topology();
        let run = |seed| {
            Simulator::new(&topology, seed)
                .run(&request("T", "L"))
                .unwrap()
                .to_ndjson()
                .unwrap()
        };
        assert_eq!(run(42), run(42));
    }

    #[test]
    fn stages_appear_in_order_within_each_hop() {
        let topology = fan_topology();
        let mut sim = Simulator::new(&topology, 7);
        let trace = sim.run(&request("T", "L")).unwrap();
        assert!(trace.delivered);

        let mut order = Vec::new();
        for event in &trace.events {
            let tag = match event {
                TraceEvent::Received { .. } => 'a',
                TraceEvent::SelfAssessed { .. } => 'b',
                TraceEvent::Queried { .. } => 'c',
                TraceEvent::Collected { .. } => 'd',
                TraceEvent::Forwarded { .. } => 'e',
                TraceEvent::Canceled { .. } => '!',
            };
            order.push(tag);
        }
        let flat: String = order.iter().collect();
        for hop in flat.split('e').filter(|hop| !hop.is_empty()) {
            assert!(hop.starts_with("abc"), "hop fragment {hop:?} of {flat:?}");
        }
    }

    #[test]
    fn forwarded_hops_carry_positive_suitability() {
        let topology = fan_topology();
        let mut sim = Simulator::new(&topology, 21);
        let trace = sim.run(&request("T", "L")).unwrap();
        for breakdown in &trace.breakdowns {
            assert!(breakdown.breakdown.suitability > 0.0);
        }
        for event in &trace.events {
            if let TraceEvent::Forwarded { ranking, next, .. } = event {
                let best = ranking
                    .iter()
                    .max_by(|a, b| a.suitability.partial_cmp(&b.suitability).unwrap())
                    .unwrap();
                assert_eq!(best.suitability, ranking[0].suitability);
                assert_eq!(*next, ranking[0].node);
                assert!(ranking[0].suitability > 0.0);
            }
        }
    }

    #[test]
    fn topology_json_round_trip_and_validation() {
        let text = r#"{
            "nodes": [
                {"node_id": "T", "totals": {"cpu.cores": 8}},
                {"node_id": "L", "totals": {"cpu.cores": 8}}
            ],
            "edges": [
                {"a": "T", "b": "L", "hops": 2, "rtt_ms": 10, "loss": 0.01, "pdv_ms": 1}
            ]
        }"#;
        let topology = Topology::from_json(text).unwrap();
        let sample = topology.path_proximity("T", "L");
        assert_eq!(sample.hops, 2);
        assert!((sample.rtt - 0.01).abs() < 1e-12);
        assert!((sample.loss - 0.01).abs() < 1e-12);

        let unknown = r#"{"nodes": [{"node_id": "T"}], "edges": [{"a": "T", "b": "Z"}]}"#;
        assert!(matches!(
            Topology::from_json(unknown),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn proximity_aggregates_the_shortest_path() {
        let mut topology = Topology::new();
        for id in ["A", "B", "C"] {
            topology.add_node(capable_node(id));
        }
        topology
            .add_edge(
                "A",
                "B",
                EdgeParams {
                    hops: 1,
                    rtt: 0.010,
                    loss: 0.1,
                    pdv: 0.001,
                },
            )
            .unwrap();
        topology
            .add_edge(
                "B",
                "C",
                EdgeParams {
                    hops: 2,
                    rtt: 0.020,
                    loss: 0.1,
                    pdv: 0.002,
                },
            )
            .unwrap();
        let sample = topology.path_proximity("A", "C");
        assert_eq!(sample.hops, 3);
        assert!((sample.rtt - 0.030).abs() < 1e-12);
        assert!((sample.loss - 0.19).abs() < 1e-12);
        assert!((sample.pdv - 0.003).abs() < 1e-12);
    }

    #[test]
    fn unreachable_listener_reads_as_worst_case() {
        let mut topology = Topology::new();
        topology.add_node(capable_node("A"));
        topology.add_node(capable_node("Z"));
        let sample = topology.path_proximity("A", "Z");
        assert_eq!(sample.loss, 1.0);
        let grade = criteria::assess_proximity(&sample, &crate::config::EngineConfig::default());
        assert_eq!(grade, 0.0);
    }
}
