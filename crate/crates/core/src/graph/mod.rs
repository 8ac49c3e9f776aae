//! In-memory property graph.
//!
//! Nodes and edges live in id-addressed slot vectors; ids are allocated
//! monotonically and never reused, so a removed slot stays empty. Every node
//! keeps outgoing and incoming edge lists in insertion order, which is also
//! ascending edge-id order. Equality indexes are declared per
//! `(label, property)` and maintained on every mutation.

mod hash;
mod snapshot;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::{Props, Value};

pub use hash::structural_hash;
pub use snapshot::{load, persist, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub labels: BTreeSet<String>,
    pub props: Props,
}

impl Node {
    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains(label)
    }

    pub fn prop(&self, key: &str) -> Option<&Value> {
        self.props.get(key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub dst: NodeId,
    #[serde(rename = "type")]
    pub rel_type: String,
    pub props: Props,
}

impl Edge {
    /// The endpoint opposite `node`; for a self-loop that is `node` itself.
    pub fn other(&self, node: NodeId) -> NodeId {
        if self.src == node {
            self.dst
        } else {
            self.src
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("a node needs at least one label")]
    EmptyLabelSet,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
}

/// Hashable form of an indexable value. Integral floats collapse onto the
/// integer key so index hits agree with [`Value::equals`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum IndexKey {
    Bool(bool),
    Int(i64),
    Float(u64),
    Text(String),
    List(Vec<String>),
}

impl IndexKey {
    fn from_value(v: &Value) -> Option<IndexKey> {
        Some(match v {
            Value::Null => return None,
            Value::Boolean(b) => IndexKey::Bool(*b),
            Value::Integer(i) => IndexKey::Int(*i),
            Value::Float(f) => {
                if f.is_nan() {
                    return None;
                }
                if f.fract() == 0.0 && *f >= -9.223_372_036_854_776e18 && *f < 9.223_372_036_854_776e18 {
                    IndexKey::Int(*f as i64)
                } else {
                    IndexKey::Float(f.to_bits())
                }
            }
            Value::Text(s) => IndexKey::Text(s.clone()),
            Value::TextList(l) => IndexKey::List(l.clone()),
        })
    }
}

type PropertyIndex = HashMap<IndexKey, BTreeSet<NodeId>>;

#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: Vec<Option<Node>>,
    edges: Vec<Option<Edge>>,
    outgoing: Vec<Vec<EdgeId>>,
    incoming: Vec<Vec<EdgeId>>,
    by_label: HashMap<String, BTreeSet<NodeId>>,
    indexes: BTreeMap<(String, String), PropertyIndex>,
    node_count: usize,
    edge_count: usize,
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0 as usize).and_then(Option::as_ref)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.0 as usize).and_then(Option::as_ref)
    }

    /// Live nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().flatten()
    }

    /// Live edges in ascending id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().flatten()
    }

    /// Nodes carrying `label`, ascending id.
    pub fn nodes_with_label<'a>(&'a self, label: &str) -> impl Iterator<Item = NodeId> + 'a {
        self.by_label.get(label).into_iter().flatten().copied()
    }

    pub fn create_node<L, S>(&mut self, labels: L, props: Props) -> Result<NodeId, GraphError>
    where
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(GraphError::EmptyLabelSet);
        }
        let id = NodeId(self.nodes.len() as u64);
        for label in &labels {
            self.by_label.entry(label.clone()).or_default().insert(id);
        }
        let node = Node { id, labels, props };
        self.index_insert(&node);
        self.nodes.push(Some(node));
        self.outgoing.push(Vec::new());
        self.incoming.push(Vec::new());
        self.node_count += 1;
        Ok(id)
    }

    pub fn create_edge(
        &mut self,
        src: NodeId,
        rel_type: impl Into<String>,
        dst: NodeId,
        props: Props,
    ) -> Result<EdgeId, GraphError> {
        for n in [src, dst] {
            if self.node(n).is_none() {
                return Err(GraphError::UnknownNode(n));
            }
        }
        let id = EdgeId(self.edges.len() as u64);
        self.edges.push(Some(Edge {
            id,
            src,
            dst,
            rel_type: rel_type.into(),
            props,
        }));
        self.outgoing[src.0 as usize].push(id);
        self.incoming[dst.0 as usize].push(id);
        self.edge_count += 1;
        Ok(id)
    }

    /// Sets (or with `Value::Null`, keeps as Null) one property, keeping
    /// indexes in sync.
    pub fn set_property(&mut self, id: NodeId, key: impl Into<String>, value: Value) -> Result<(), GraphError> {
        let mut node = self.take_node_for_update(id)?;
        node.props.insert(key.into(), value);
        self.put_node_after_update(node);
        Ok(())
    }

    /// Replaces the whole property map of a node.
    pub fn replace_properties(&mut self, id: NodeId, props: Props) -> Result<(), GraphError> {
        let mut node = self.take_node_for_update(id)?;
        node.props = props;
        self.put_node_after_update(node);
        Ok(())
    }

    pub fn set_edge_properties(&mut self, id: EdgeId, props: Props) -> Result<(), GraphError> {
        let edge = self
            .edges
            .get_mut(id.0 as usize)
            .and_then(Option::as_mut)
            .ok_or(GraphError::UnknownEdge(id))?;
        edge.props = props;
        Ok(())
    }

    fn take_node_for_update(&mut self, id: NodeId) -> Result<Node, GraphError> {
        let node = self
            .nodes
            .get_mut(id.0 as usize)
            .and_then(Option::take)
            .ok_or(GraphError::UnknownNode(id))?;
        self.index_remove(&node);
        Ok(node)
    }

    fn put_node_after_update(&mut self, node: Node) {
        self.index_insert(&node);
        let slot = node.id.0 as usize;
        self.nodes[slot] = Some(node);
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<Edge, GraphError> {
        let edge = self
            .edges
            .get_mut(id.0 as usize)
            .and_then(Option::take)
            .ok_or(GraphError::UnknownEdge(id))?;
        self.outgoing[edge.src.0 as usize].retain(|e| *e != id);
        self.incoming[edge.dst.0 as usize].retain(|e| *e != id);
        self.edge_count -= 1;
        Ok(edge)
    }

    /// Removes a node together with every edge touching it.
    pub fn remove_node(&mut self, id: NodeId) -> Result<Node, GraphError> {
        if self.node(id).is_none() {
            return Err(GraphError::UnknownNode(id));
        }
        let mut touching: Vec<EdgeId> = self.outgoing[id.0 as usize].clone();
        touching.extend(self.incoming[id.0 as usize].iter().copied());
        touching.sort_unstable();
        touching.dedup();
        for e in touching {
            self.remove_edge(e)?;
        }
        let node = self.nodes[id.0 as usize].take().expect("checked above");
        self.index_remove(&node);
        for label in &node.labels {
            if let Some(set) = self.by_label.get_mut(label) {
                set.remove(&id);
            }
        }
        self.node_count -= 1;
        Ok(node)
    }

    /// Declares an equality index on `(label, prop)` and backfills it.
    pub fn declare_index(&mut self, label: &str, prop: &str) {
        let key = (label.to_string(), prop.to_string());
        if self.indexes.contains_key(&key) {
            return;
        }
        let mut index = PropertyIndex::new();
        for id in self.nodes_with_label(label) {
            let node = self.node(id).expect("label index is live");
            if let Some(k) = node.props.get(prop).and_then(IndexKey::from_value) {
                index.entry(k).or_default().insert(id);
            }
        }
        self.indexes.insert(key, index);
    }

    pub fn has_index(&self, label: &str, prop: &str) -> bool {
        self.indexes.contains_key(&(label.to_string(), prop.to_string()))
    }

    pub fn declared_indexes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.indexes.keys().map(|(l, p)| (l.as_str(), p.as_str()))
    }

    fn index_insert(&mut self, node: &Node) {
        for ((label, prop), index) in self.indexes.iter_mut() {
            if !node.labels.contains(label) {
                continue;
            }
            if let Some(k) = node.props.get(prop).and_then(IndexKey::from_value) {
                index.entry(k).or_default().insert(node.id);
            }
        }
    }

    fn index_remove(&mut self, node: &Node) {
        for ((label, prop), index) in self.indexes.iter_mut() {
            if !node.labels.contains(label) {
                continue;
            }
            if let Some(k) = node.props.get(prop).and_then(IndexKey::from_value) {
                if let Some(set) = index.get_mut(&k) {
                    set.remove(&node.id);
                    if set.is_empty() {
                        index.remove(&k);
                    }
                }
            }
        }
    }

    /// Nodes with `label` whose `prop` equals `value`. Uses a declared index
    /// when one exists, otherwise scans the label. Null never matches.
    pub fn find_nodes(&self, label: &str, prop: &str, value: &Value) -> BTreeSet<NodeId> {
        if let Some(index) = self.indexes.get(&(label.to_string(), prop.to_string())) {
            return IndexKey::from_value(value)
                .and_then(|k| index.get(&k))
                .cloned()
                .unwrap_or_default();
        }
        self.scan_nodes(label, prop, value)
    }

    /// Full label scan, bypassing indexes.
    pub fn scan_nodes(&self, label: &str, prop: &str, value: &Value) -> BTreeSet<NodeId> {
        self.nodes_with_label(label)
            .filter(|id| {
                self.node(*id)
                    .and_then(|n| n.props.get(prop))
                    .and_then(|v| v.equals(value))
                    .unwrap_or(false)
            })
            .collect()
    }

    /// Adjacent edges of `node` in the given direction, optionally filtered by
    /// relationship type. `Both` lists outgoing then incoming edges and
    /// reports a self-loop once.
    pub fn neighbors(
        &self,
        node: NodeId,
        direction: Direction,
        rel_filter: Option<&[&str]>,
    ) -> Result<Vec<&Edge>, GraphError> {
        if self.node(node).is_none() {
            return Err(GraphError::UnknownNode(node));
        }
        let keep = |e: &&Edge| rel_filter.is_none_or(|types| types.contains(&e.rel_type.as_str()));
        let out = || self.outgoing[node.0 as usize].iter().filter_map(|e| self.edge(*e));
        let inc = || self.incoming[node.0 as usize].iter().filter_map(|e| self.edge(*e));
        Ok(match direction {
            Direction::Out => out().filter(keep).collect(),
            Direction::In => inc().filter(keep).collect(),
            Direction::Both => out().chain(inc().filter(|e| e.src != e.dst)).filter(keep).collect(),
        })
    }

    /// Outgoing edge ids in insertion order.
    pub fn outgoing_ids(&self, node: NodeId) -> &[EdgeId] {
        self.outgoing.get(node.0 as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Incoming edge ids in insertion order.
    pub fn incoming_ids(&self, node: NodeId) -> &[EdgeId] {
        self.incoming.get(node.0 as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Node counts per label and edge counts per relationship type.
    pub fn stats(&self) -> GraphStats {
        let mut labels = BTreeMap::new();
        for n in self.nodes() {
            for l in &n.labels {
                *labels.entry(l.clone()).or_insert(0) += 1;
            }
        }
        let mut rel_types = BTreeMap::new();
        for e in self.edges() {
            *rel_types.entry(e.rel_type.clone()).or_insert(0) += 1;
        }
        GraphStats {
            nodes: self.node_count,
            edges: self.edge_count,
            labels,
            rel_types,
        }
    }

    // Used by the snapshot loader to restore exact ids.
    fn next_ids(&self) -> (u64, u64) {
        (self.nodes.len() as u64, self.edges.len() as u64)
    }

    fn restore(
        next_node: u64,
        next_edge: u64,
        nodes: Vec<Node>,
        edges: Vec<Edge>,
        indexes: Vec<(String, String)>,
    ) -> Result<Self, GraphError> {
        let mut g = PropertyGraph {
            nodes: vec![None; next_node as usize],
            edges: vec![None; next_edge as usize],
            outgoing: vec![Vec::new(); next_node as usize],
            incoming: vec![Vec::new(); next_node as usize],
            ..Default::default()
        };
        for node in nodes {
            let slot = node.id.0 as usize;
            if slot >= g.nodes.len() || g.nodes[slot].is_some() || node.labels.is_empty() {
                return Err(GraphError::UnknownNode(node.id));
            }
            for label in &node.labels {
                g.by_label.entry(label.clone()).or_default().insert(node.id);
            }
            g.nodes[slot] = Some(node);
            g.node_count += 1;
        }
        for edge in edges {
            let slot = edge.id.0 as usize;
            if slot >= g.edges.len() || g.edges[slot].is_some() {
                return Err(GraphError::UnknownEdge(edge.id));
            }
            for n in [edge.src, edge.dst] {
                if g.node(n).is_none() {
                    return Err(GraphError::UnknownNode(n));
                }
            }
            g.outgoing[edge.src.0 as usize].push(edge.id);
            g.incoming[edge.dst.0 as usize].push(edge.id);
            g.edges[slot] = Some(edge);
            g.edge_count += 1;
        }
        // edges were restored in ascending id order, so adjacency order matches
        for (label, prop) in indexes {
            g.declare_index(&label, &prop);
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub labels: BTreeMap<String, usize>,
    pub rel_types: BTreeMap<String, usize>,
}
