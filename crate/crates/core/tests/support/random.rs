//! Seeded generators for small graphs and well-scoped queries.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stockgraph::cypher::ast::{
    Clause, CmpOp, Expr, MatchClause, NodePattern, Pattern, ProjectionItem, Query, RelDirection, RelPattern,
    ReturnClause, SortKey, SortOrder, WithClause,
};
use stockgraph::graph::{NodeId, PropertyGraph};
use stockgraph::value::{Props, Value};

pub const LABELS: [&str; 3] = ["A", "B", "C"];
pub const REL_TYPES: [&str; 3] = ["R", "S", "T"];
const NODE_KEYS: [&str; 4] = ["k", "s", "f", "b"];
const EDGE_KEYS: [&str; 1] = ["w"];

fn text_value(rng: &mut ChaCha8Rng) -> Value {
    Value::Text(["x", "y", "z"].choose(rng).unwrap().to_string())
}

fn float_value(rng: &mut ChaCha8Rng) -> Value {
    Value::Float(*[0.5, 1.5, 2.5].choose(rng).unwrap())
}

/// A graph with at most `max_nodes` nodes and `2 * max_nodes` edges.
pub fn graph(seed: u64, max_nodes: usize) -> PropertyGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = PropertyGraph::new();
    if rng.random_bool(0.5) {
        g.declare_index("A", "k");
    }
    let n = rng.random_range(max_nodes.min(2)..=max_nodes);
    let mut ids = Vec::new();
    for _ in 0..n {
        let mut labels = vec![*LABELS.choose(&mut rng).unwrap()];
        if rng.random_bool(0.2) {
            labels.push(LABELS.choose(&mut rng).unwrap());
        }
        let mut props = Props::new();
        if rng.random_bool(0.7) {
            props.insert("k".into(), Value::Integer(rng.random_range(0..4)));
        }
        if rng.random_bool(0.6) {
            props.insert("s".into(), text_value(&mut rng));
        }
        if rng.random_bool(0.4) {
            props.insert("f".into(), float_value(&mut rng));
        }
        if rng.random_bool(0.3) {
            props.insert("b".into(), Value::Boolean(rng.random_bool(0.5)));
        }
        ids.push(g.create_node(labels, props).unwrap());
    }
    if ids.is_empty() {
        return g;
    }
    let m = rng.random_range(0..=2 * n);
    for _ in 0..m {
        let a = *ids.choose(&mut rng).unwrap();
        let b = *ids.choose(&mut rng).unwrap();
        let mut props = Props::new();
        if rng.random_bool(0.5) {
            props.insert("w".into(), Value::Integer(rng.random_range(0..3)));
        }
        g.create_edge(a, *REL_TYPES.choose(&mut rng).unwrap(), b, props)
            .unwrap();
    }
    g
}

pub fn node_ids(g: &PropertyGraph) -> Vec<NodeId> {
    g.nodes().map(|n| n.id).collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Node,
    Rel,
    Value,
}

/// Random query generator. Every query it produces binds and round-trips
/// through the renderer.
pub struct QueryGen {
    rng: ChaCha8Rng,
    scope: Vec<(String, Kind)>,
    next: usize,
}

impl QueryGen {
    pub fn new(seed: u64) -> Self {
        QueryGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            scope: Vec::new(),
            next: 0,
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn vars(&self, kind: Kind) -> Vec<String> {
        self.scope
            .iter()
            .filter(|(_, k)| *k == kind)
            .map(|(v, _)| v.clone())
            .collect()
    }

    fn bind(&mut self, v: &str, kind: Kind) {
        if !self.scope.iter().any(|(s, _)| s == v) {
            self.scope.push((v.to_string(), kind));
        }
    }

    fn literal(&mut self) -> Value {
        match self.rng.random_range(0..10) {
            0..=3 => Value::Integer(self.rng.random_range(-1..4)),
            4..=6 => text_value(&mut self.rng),
            7 => float_value(&mut self.rng),
            8 => Value::Boolean(self.rng.random_bool(0.5)),
            _ => Value::Null,
        }
    }

    fn key_literal(&mut self, key: &str) -> Value {
        match key {
            "k" | "w" => Value::Integer(self.rng.random_range(0..4)),
            "s" => text_value(&mut self.rng),
            "f" => float_value(&mut self.rng),
            _ => Value::Boolean(self.rng.random_bool(0.5)),
        }
    }

    fn node_pattern(&mut self, clause_nodes: &mut Vec<String>) -> NodePattern {
        let existing = self.vars(Kind::Node);
        let var = if !existing.is_empty() && self.rng.random_bool(0.3) {
            Some(existing.choose(&mut self.rng).unwrap().clone())
        } else if self.rng.random_bool(0.8) {
            Some(self.fresh("n"))
        } else {
            None
        };
        let mut labels = Vec::new();
        if self.rng.random_bool(0.3) {
            labels.push(LABELS.choose(&mut self.rng).unwrap().to_string());
        }
        let mut props = Vec::new();
        if self.rng.random_bool(0.15) {
            let key = *["k", "s"].choose(&mut self.rng).unwrap();
            props.push((key.to_string(), self.key_literal(key)));
        }
        if let Some(v) = &var {
            clause_nodes.push(v.clone());
        }
        NodePattern { var, labels, props }
    }

    fn rel_pattern(&mut self, clause_rels: &mut Vec<String>) -> RelPattern {
        let reusable: Vec<String> = self
            .vars(Kind::Rel)
            .into_iter()
            .filter(|v| !clause_rels.contains(v))
            .collect();
        let var = if !reusable.is_empty() && self.rng.random_bool(0.1) {
            Some(reusable.choose(&mut self.rng).unwrap().clone())
        } else if self.rng.random_bool(0.4) {
            Some(self.fresh("r"))
        } else {
            None
        };
        if let Some(v) = &var {
            clause_rels.push(v.clone());
        }
        let mut types = Vec::new();
        for t in REL_TYPES {
            if self.rng.random_bool(0.2) {
                types.push(t.to_string());
            }
        }
        let direction = *[
            RelDirection::LeftToRight,
            RelDirection::RightToLeft,
            RelDirection::Undirected,
        ]
        .choose(&mut self.rng)
        .unwrap();
        RelPattern { var, types, direction }
    }

    fn match_clause(&mut self, optional: bool) -> MatchClause {
        let n_patterns = if self.rng.random_bool(0.7) { 1 } else { 2 };
        let mut budget = 3usize;
        let mut patterns = Vec::new();
        let mut nodes = Vec::new();
        let mut rels = Vec::new();
        for _ in 0..n_patterns {
            let start = self.node_pattern(&mut nodes);
            let hops_n = self.rng.random_range(0..=budget.min(2));
            budget -= hops_n;
            let mut hops = Vec::new();
            for _ in 0..hops_n {
                let r = self.rel_pattern(&mut rels);
                let n = self.node_pattern(&mut nodes);
                hops.push((r, n));
            }
            patterns.push(Pattern { start, hops });
        }
        for v in nodes {
            self.bind(&v, Kind::Node);
        }
        for v in rels {
            self.bind(&v, Kind::Rel);
        }
        let predicate = self.rng.random_bool(0.35).then(|| self.expr(2));
        MatchClause {
            optional,
            patterns,
            predicate,
        }
    }

    fn comparison(&mut self) -> Expr {
        let nodes = self.vars(Kind::Node);
        let rels = self.vars(Kind::Rel);
        let values = self.vars(Kind::Value);
        let choice = self.rng.random_range(0..10);
        let op = *[CmpOp::Eq, CmpOp::Neq, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge]
            .choose(&mut self.rng)
            .unwrap();
        if choice == 0 && nodes.len() >= 2 {
            let a = nodes.choose(&mut self.rng).unwrap().clone();
            let b = nodes.choose(&mut self.rng).unwrap().clone();
            let op = if self.rng.random_bool(0.5) {
                CmpOp::Eq
            } else {
                CmpOp::Neq
            };
            return Expr::cmp(op, Expr::Variable(a), Expr::Variable(b));
        }
        if choice == 1 && !values.is_empty() {
            let v = values.choose(&mut self.rng).unwrap().clone();
            let lit = self.literal();
            return Expr::cmp(op, Expr::Variable(v), Expr::Literal(lit));
        }
        let (var, key) = if !rels.is_empty() && self.rng.random_bool(0.2) {
            (rels.choose(&mut self.rng).unwrap().clone(), EDGE_KEYS[0])
        } else if let Some(n) = nodes.choose(&mut self.rng) {
            (n.clone(), *NODE_KEYS.choose(&mut self.rng).unwrap())
        } else {
            return Expr::cmp(op, Expr::Literal(self.literal()), Expr::Literal(self.literal()));
        };
        let lhs = Expr::prop(&var, key);
        if choice <= 3 {
            let n = self.rng.random_range(0..=3);
            let items = (0..n)
                .map(|_| {
                    let v = if self.rng.random_bool(0.8) {
                        self.key_literal(key)
                    } else {
                        self.literal()
                    };
                    Expr::Literal(v)
                })
                .collect();
            return Expr::In(Box::new(lhs), Box::new(Expr::List(items)));
        }
        let rhs = if self.rng.random_bool(0.85) {
            self.key_literal(key)
        } else {
            self.literal()
        };
        Expr::cmp(op, lhs, Expr::Literal(rhs))
    }

    fn expr(&mut self, depth: u32) -> Expr {
        if depth == 0 || self.rng.random_bool(0.4) {
            return self.comparison();
        }
        match self.rng.random_range(0..3) {
            0 => {
                let a = self.expr(depth - 1);
                let b = self.expr(depth - 1);
                let wrap_b = matches!(b, Expr::Or(..));
                Expr::or(a, if wrap_b { paren(b) } else { b })
            }
            1 => {
                let a = self.expr(depth - 1);
                let b = self.expr(depth - 1);
                let a = if matches!(a, Expr::Or(..)) { paren(a) } else { a };
                let b = if matches!(b, Expr::Or(..) | Expr::And(..)) {
                    paren(b)
                } else {
                    b
                };
                Expr::and(a, b)
            }
            _ => {
                let a = self.expr(depth - 1);
                let a = if matches!(a, Expr::Or(..) | Expr::And(..)) {
                    paren(a)
                } else {
                    a
                };
                Expr::Not(Box::new(a))
            }
        }
    }

    fn projection(&mut self, alias_prefix: &str, max: usize) -> Vec<ProjectionItem> {
        let mut items = Vec::new();
        let mut names = Vec::new();
        let candidates: Vec<(String, Kind)> = self.scope.clone();
        let n = self.rng.random_range(1..=max);
        for _ in 0..n {
            let (v, kind) = candidates.choose(&mut self.rng).unwrap().clone();
            let item = if kind != Kind::Value && self.rng.random_bool(0.5) {
                let key = if kind == Kind::Rel {
                    "w"
                } else {
                    *NODE_KEYS.choose(&mut self.rng).unwrap()
                };
                ProjectionItem {
                    expr: Expr::prop(&v, key),
                    alias: Some(self.fresh(alias_prefix)),
                }
            } else if self.rng.random_bool(0.2) {
                ProjectionItem {
                    expr: Expr::Variable(v),
                    alias: Some(self.fresh(alias_prefix)),
                }
            } else {
                ProjectionItem {
                    expr: Expr::Variable(v),
                    alias: None,
                }
            };
            let name = item.name();
            if !names.contains(&name) {
                names.push(name);
                items.push(item);
            }
        }
        items
    }

    /// Kind a projected item carries into the next scope.
    fn kind_of(&self, item: &ProjectionItem) -> Kind {
        match &item.expr {
            Expr::Variable(v) => self
                .scope
                .iter()
                .find(|(s, _)| s == v)
                .map(|(_, k)| *k)
                .unwrap_or(Kind::Value),
            _ => Kind::Value,
        }
    }

    pub fn query(&mut self) -> Query {
        self.scope.clear();
        let mut clauses = Vec::new();
        let n_match = self.rng.random_range(1..=2);
        for i in 0..n_match {
            let optional = i > 0 && self.rng.random_bool(0.4);
            clauses.push(Clause::Match(self.match_clause(optional)));
            if self.scope.is_empty() {
                continue;
            }
            if i + 1 < n_match && self.rng.random_bool(0.3) {
                let items = self.projection("w", 3);
                let scope: Vec<(String, Kind)> = items.iter().map(|it| (it.name(), self.kind_of(it))).collect();
                self.scope = scope;
                let predicate = self.rng.random_bool(0.4).then(|| self.expr(1));
                clauses.push(Clause::With(WithClause { items, predicate }));
            }
        }
        if self.scope.is_empty() {
            let v = self.fresh("n");
            clauses.push(Clause::Match(MatchClause {
                optional: false,
                patterns: vec![Pattern {
                    start: NodePattern {
                        var: Some(v.clone()),
                        ..Default::default()
                    },
                    hops: vec![],
                }],
                predicate: None,
            }));
            self.bind(&v, Kind::Node);
        }
        let items = self.projection("c", 3);
        let columns: Vec<String> = items.iter().map(|i| i.name()).collect();
        clauses.push(Clause::Return(ReturnClause { items }));
        if self.rng.random_bool(0.5) {
            let mut keys = Vec::new();
            for _ in 0..self.rng.random_range(1..=2) {
                let expr = if self.rng.random_bool(0.6) {
                    Expr::Variable(columns.choose(&mut self.rng).unwrap().clone())
                } else {
                    let nodes = self.vars(Kind::Node);
                    match nodes.choose(&mut self.rng) {
                        Some(n) => Expr::prop(n, NODE_KEYS.choose(&mut self.rng).unwrap()),
                        None => Expr::Variable(columns[0].clone()),
                    }
                };
                let order = if self.rng.random_bool(0.5) {
                    SortOrder::Asc
                } else {
                    SortOrder::Desc
                };
                keys.push(SortKey { expr, order });
            }
            clauses.push(Clause::OrderBy(keys));
        }
        Query { clauses }
    }
}

fn paren(e: Expr) -> Expr {
    Expr::Paren(Box::new(e))
}
