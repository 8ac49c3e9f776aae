//! Exhaustive reference executor.
//!
//! Every hop is tried against every edge of the graph in both orientations
//! and every pattern without hops against every node; assignments are then
//! filtered by labels, types, properties, variable consistency and edge
//! uniqueness. Expression evaluation and sorting are written out here
//! independently of the engine.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use stockgraph::cypher::ast::{
    Clause, CmpOp, Expr, MatchClause, NodePattern, Pattern, ProjectionItem, Query, RelDirection, RelPattern, SortOrder,
};
use stockgraph::exec::{Cell, ResultTable};
use stockgraph::graph::{EdgeId, NodeId, PropertyGraph};
use stockgraph::value::Value;

pub const MAX_NODES: usize = 12;
pub const MAX_EDGES: usize = 24;

#[derive(Debug)]
pub struct GuardExceeded;

#[derive(Debug, Clone, PartialEq)]
enum V {
    Node(NodeId),
    Edge(EdgeId),
    Val(Value),
    List(Vec<V>),
}

const NULL: V = V::Val(Value::Null);

type Row = BTreeMap<String, V>;

fn is_null(v: &V) -> bool {
    matches!(v, V::Val(Value::Null))
}

fn num(v: &Value) -> Option<f64> {
    match v {
        Value::Integer(i) => Some(*i as f64),
        Value::Float(f) => Some(*f),
        _ => None,
    }
}

fn list_items(v: &V) -> Option<Vec<V>> {
    match v {
        V::List(items) => Some(items.clone()),
        V::Val(Value::TextList(items)) => Some(items.iter().map(|s| V::Val(Value::Text(s.clone()))).collect()),
        _ => None,
    }
}

fn eq(a: &V, b: &V) -> Option<bool> {
    if is_null(a) || is_null(b) {
        return None;
    }
    if let (Some(xs), Some(ys)) = (list_items(a), list_items(b)) {
        if xs.len() != ys.len() {
            return Some(false);
        }
        let mut unknown = false;
        for (x, y) in xs.iter().zip(&ys) {
            match eq(x, y) {
                Some(false) => return Some(false),
                None => unknown = true,
                Some(true) => {}
            }
        }
        return if unknown { None } else { Some(true) };
    }
    Some(match (a, b) {
        (V::Node(x), V::Node(y)) => x == y,
        (V::Edge(x), V::Edge(y)) => x == y,
        (V::Val(x), V::Val(y)) => match (num(x), num(y)) {
            (Some(p), Some(q)) => p == q,
            _ => match (x, y) {
                (Value::Text(p), Value::Text(q)) => p == q,
                (Value::Boolean(p), Value::Boolean(q)) => p == q,
                _ => false,
            },
        },
        _ => false,
    })
}

fn order(a: &V, b: &V) -> Option<Ordering> {
    let (V::Val(x), V::Val(y)) = (a, b) else { return None };
    match (num(x), num(y)) {
        (Some(p), Some(q)) => p.partial_cmp(&q),
        _ => match (x, y) {
            (Value::Text(p), Value::Text(q)) => Some(p.cmp(q)),
            (Value::Boolean(p), Value::Boolean(q)) => Some(p.cmp(q)),
            _ => None,
        },
    }
}

fn truth(v: &V) -> Option<bool> {
    match v {
        V::Val(Value::Boolean(b)) => Some(*b),
        _ => None,
    }
}

fn tv(t: Option<bool>) -> V {
    t.map_or(NULL, |b| V::Val(Value::Boolean(b)))
}

struct Ctx<'g> {
    g: &'g PropertyGraph,
}

impl Ctx<'_> {
    fn eval(&self, row: &Row, e: &Expr) -> V {
        match e {
            Expr::Variable(v) => row.get(v).cloned().unwrap_or(NULL),
            Expr::Property(v, k) => {
                let props = match row.get(v) {
                    Some(V::Node(id)) => self.g.node(*id).map(|n| &n.props),
                    Some(V::Edge(id)) => self.g.edge(*id).map(|e| &e.props),
                    _ => None,
                };
                props.and_then(|p| p.get(k)).cloned().map_or(NULL, V::Val)
            }
            Expr::Literal(v) => V::Val(v.clone()),
            Expr::List(items) => V::List(items.iter().map(|i| self.eval(row, i)).collect()),
            Expr::Paren(inner) => self.eval(row, inner),
            Expr::Cmp(op, a, b) => {
                let (a, b) = (self.eval(row, a), self.eval(row, b));
                tv(match op {
                    CmpOp::Eq => eq(&a, &b),
                    CmpOp::Neq => eq(&a, &b).map(|t| !t),
                    _ => order(&a, &b).map(|o| match op {
                        CmpOp::Lt => o.is_lt(),
                        CmpOp::Le => o.is_le(),
                        CmpOp::Gt => o.is_gt(),
                        _ => o.is_ge(),
                    }),
                })
            }
            Expr::In(x, list) => {
                let x = self.eval(row, x);
                let Some(items) = list_items(&self.eval(row, list)) else {
                    return NULL;
                };
                if is_null(&x) {
                    return NULL;
                }
                let results: Vec<Option<bool>> = items.iter().map(|i| eq(&x, i)).collect();
                tv(if results.contains(&Some(true)) {
                    Some(true)
                } else if results.contains(&None) {
                    None
                } else {
                    Some(false)
                })
            }
            Expr::And(a, b) => {
                let (a, b) = (truth(&self.eval(row, a)), truth(&self.eval(row, b)));
                tv(if a == Some(false) || b == Some(false) {
                    Some(false)
                } else if a == Some(true) && b == Some(true) {
                    Some(true)
                } else {
                    None
                })
            }
            Expr::Or(a, b) => {
                let (a, b) = (truth(&self.eval(row, a)), truth(&self.eval(row, b)));
                tv(if a == Some(true) || b == Some(true) {
                    Some(true)
                } else if a == Some(false) && b == Some(false) {
                    Some(false)
                } else {
                    None
                })
            }
            Expr::Not(inner) => tv(truth(&self.eval(row, inner)).map(|t| !t)),
        }
    }

    fn node_ok(&self, p: &NodePattern, id: NodeId) -> bool {
        let n = self.g.node(id).unwrap();
        p.labels.iter().all(|l| n.labels.contains(l))
            && p.props.iter().all(|(k, v)| {
                n.props
                    .get(k)
                    .is_some_and(|x| eq(&V::Val(x.clone()), &V::Val(v.clone())) == Some(true))
            })
    }

    fn bind(&self, row: &mut Row, var: &Option<String>, v: V) -> bool {
        let Some(name) = var else { return true };
        match row.get(name) {
            Some(existing) => *existing == v,
            None => {
                row.insert(name.clone(), v);
                true
            }
        }
    }

    /// All (edge, from, to) steps a hop may take, in both orientations.
    fn steps(&self, r: &RelPattern) -> Vec<(EdgeId, NodeId, NodeId)> {
        let mut out = Vec::new();
        for e in self.g.edges() {
            if !r.types.is_empty() && !r.types.contains(&e.rel_type) {
                continue;
            }
            match r.direction {
                RelDirection::LeftToRight => out.push((e.id, e.src, e.dst)),
                RelDirection::RightToLeft => out.push((e.id, e.dst, e.src)),
                RelDirection::Undirected => {
                    out.push((e.id, e.src, e.dst));
                    if e.src != e.dst {
                        out.push((e.id, e.dst, e.src));
                    }
                }
            }
        }
        out
    }

    /// Every path assignment for one pattern: node ids per position and edge
    /// ids per hop.
    fn paths(&self, p: &Pattern) -> Vec<(Vec<NodeId>, Vec<EdgeId>)> {
        let mut acc: Vec<(Vec<NodeId>, Vec<EdgeId>)> = if p.hops.is_empty() {
            self.g.nodes().map(|n| (vec![n.id], vec![])).collect()
        } else {
            vec![(vec![], vec![])]
        };
        for (r, _) in &p.hops {
            let steps = self.steps(r);
            let mut next = Vec::new();
            for (nodes, edges) in &acc {
                for (e, from, to) in &steps {
                    if nodes.last().is_some_and(|last| last != from) {
                        continue;
                    }
                    let mut ns = nodes.clone();
                    if ns.is_empty() {
                        ns.push(*from);
                    }
                    ns.push(*to);
                    let mut es = edges.clone();
                    es.push(*e);
                    next.push((ns, es));
                }
            }
            acc = next;
        }
        acc
    }

    fn match_clause(&self, m: &MatchClause, seeds: Vec<Row>) -> Vec<Row> {
        let per_pattern: Vec<Vec<(Vec<NodeId>, Vec<EdgeId>)>> = m.patterns.iter().map(|p| self.paths(p)).collect();
        let mut out = Vec::new();
        for seed in seeds {
            let mut found = Vec::new();
            let mut choice = vec![0usize; per_pattern.len()];
            if per_pattern.iter().all(|c| !c.is_empty()) {
                loop {
                    if let Some(row) = self.assemble(m, &per_pattern, &choice, &seed) {
                        found.push(row);
                    }
                    let mut i = 0;
                    while i < choice.len() {
                        choice[i] += 1;
                        if choice[i] < per_pattern[i].len() {
                            break;
                        }
                        choice[i] = 0;
                        i += 1;
                    }
                    if i == choice.len() {
                        break;
                    }
                }
            }
            if let Some(pred) = &m.predicate {
                found.retain(|r| truth(&self.eval(r, pred)) == Some(true));
            }
            if found.is_empty() && m.optional {
                let mut row = seed.clone();
                for p in &m.patterns {
                    for v in p
                        .nodes()
                        .filter_map(|n| n.var.clone())
                        .chain(p.rels().filter_map(|r| r.var.clone()))
                    {
                        row.entry(v).or_insert(NULL);
                    }
                }
                out.push(row);
            } else {
                out.extend(found);
            }
        }
        out
    }

    fn assemble(
        &self,
        m: &MatchClause,
        per_pattern: &[Vec<(Vec<NodeId>, Vec<EdgeId>)>],
        choice: &[usize],
        seed: &Row,
    ) -> Option<Row> {
        let mut row = seed.clone();
        let mut used = Vec::new();
        for (pi, p) in m.patterns.iter().enumerate() {
            let (nodes, edges) = &per_pattern[pi][choice[pi]];
            for (np, id) in p.nodes().zip(nodes) {
                if !self.node_ok(np, *id) || !self.bind(&mut row, &np.var, V::Node(*id)) {
                    return None;
                }
            }
            for ((rp, _), e) in p.hops.iter().zip(edges) {
                if used.contains(e) || !self.bind(&mut row, &rp.var, V::Edge(*e)) {
                    return None;
                }
                used.push(*e);
            }
        }
        Some(row)
    }

    fn project(&self, row: &Row, items: &[ProjectionItem]) -> Row {
        items.iter().map(|i| (i.name(), self.eval(row, &i.expr))).collect()
    }

    fn to_cell(&self, v: &V) -> Cell {
        match v {
            V::Node(id) => Cell::Node(self.g.node(*id).unwrap().clone()),
            V::Edge(id) => Cell::Edge(self.g.edge(*id).unwrap().clone()),
            V::Val(x) => Cell::Value(x.clone()),
            V::List(items) => Cell::List(items.iter().map(|i| self.to_cell(i)).collect()),
        }
    }
}

fn rank(v: &V) -> u8 {
    match v {
        V::Val(Value::Boolean(_)) => 0,
        V::Val(Value::Integer(_) | Value::Float(_)) => 1,
        V::Val(Value::Text(_)) => 2,
        V::Val(Value::TextList(_)) | V::List(_) => 3,
        V::Node(_) => 4,
        V::Edge(_) => 5,
        V::Val(Value::Null) => 6,
    }
}

fn sort_order(a: &V, b: &V) -> Ordering {
    rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
        (V::Node(x), V::Node(y)) => x.cmp(y),
        (V::Edge(x), V::Edge(y)) => x.cmp(y),
        _ => match (list_items(a), list_items(b)) {
            (Some(xs), Some(ys)) => xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| sort_order(x, y))
                .find(|o| o.is_ne())
                .unwrap_or(xs.len().cmp(&ys.len())),
            _ => order(a, b).unwrap_or(Ordering::Equal),
        },
    })
}

/// Result of the reference executor: the table plus, for ordered queries,
/// each row's sort key rendered as text.
pub struct OracleResult {
    pub table: ResultTable,
    pub sort_keys: Option<Vec<Vec<String>>>,
}

pub fn brute_force_execute(g: &PropertyGraph, q: &Query) -> Result<OracleResult, GuardExceeded> {
    if g.node_count() > MAX_NODES || g.edge_count() > MAX_EDGES {
        return Err(GuardExceeded);
    }
    let ctx = Ctx { g };
    let mut rows: Vec<Row> = vec![Row::new()];
    let mut columns = Vec::new();
    let mut out: Vec<(Row, Vec<V>)> = Vec::new();
    let mut sort_keys = None;
    for clause in &q.clauses {
        match clause {
            Clause::Match(m) => rows = ctx.match_clause(m, rows),
            Clause::With(w) => {
                rows = rows
                    .iter()
                    .map(|r| ctx.project(r, &w.items))
                    .filter(|r| {
                        w.predicate
                            .as_ref()
                            .is_none_or(|p| truth(&ctx.eval(r, p)) == Some(true))
                    })
                    .collect();
            }
            Clause::Return(r) => {
                columns = r.items.iter().map(ProjectionItem::name).collect::<Vec<_>>();
                out = rows
                    .iter()
                    .map(|row| (row.clone(), r.items.iter().map(|i| ctx.eval(row, &i.expr)).collect()))
                    .collect();
            }
            Clause::OrderBy(keys) => {
                let mut keyed: Vec<(Vec<V>, Vec<V>)> = out
                    .drain(..)
                    .map(|(mut env, cells)| {
                        for (c, v) in columns.iter().zip(&cells) {
                            env.insert(c.clone(), v.clone());
                        }
                        (keys.iter().map(|k| ctx.eval(&env, &k.expr)).collect(), cells)
                    })
                    .collect();
                keyed.sort_by(|(a, _), (b, _)| {
                    keys.iter()
                        .enumerate()
                        .map(|(i, k)| {
                            let o = sort_order(&a[i], &b[i]);
                            if k.order == SortOrder::Desc {
                                o.reverse()
                            } else {
                                o
                            }
                        })
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                });
                sort_keys = Some(
                    keyed
                        .iter()
                        .map(|(k, _)| k.iter().map(|v| ctx.to_cell(v).display()).collect())
                        .collect(),
                );
                out = keyed.into_iter().map(|(_, c)| (Row::new(), c)).collect();
            }
        }
    }
    Ok(OracleResult {
        table: ResultTable {
            columns,
            rows: out
                .iter()
                .map(|(_, cells)| cells.iter().map(|c| ctx.to_cell(c)).collect())
                .collect(),
            type_mismatches: 0,
        },
        sort_keys,
    })
}

/// Rows rendered to text and sorted, for multiset comparison.
pub fn row_multiset(t: &ResultTable) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::display).collect()).collect();
    rows.sort();
    rows
}

/// True when no two adjacent sort keys are equal, so the order is fully
/// determined by the keys.
pub fn keys_total(keys: &[Vec<String>]) -> bool {
    keys.windows(2).all(|w| w[0] != w[1])
}

/// Runs one random (graph, query) pair through both executors. `Ok(false)`
/// means the graph was too large for the reference and nothing was compared.
pub fn check_seed(seed: u64) -> Result<bool, String> {
    let g = super::random::graph(seed, MAX_NODES);
    if g.edge_count() > MAX_EDGES {
        return Ok(false);
    }
    let q = super::random::QueryGen::new(seed ^ 0x9e37_79b9).query();
    let text = stockgraph::cypher::render(&q);
    stockgraph::cypher::bind(&q).map_err(|e| format!("seed {seed}: generated query does not bind: {e:?}\n{text}"))?;
    let fast = stockgraph::exec::execute(&g, &q);
    let slow = brute_force_execute(&g, &q).map_err(|_| format!("seed {seed}: guard exceeded"))?;
    if fast.columns != slow.table.columns {
        return Err(format!(
            "seed {seed}: columns differ {:?} vs {:?}\n{text}",
            fast.columns, slow.table.columns
        ));
    }
    if row_multiset(&fast) != row_multiset(&slow.table) {
        return Err(format!(
            "seed {seed}: rows differ ({} vs {})\n{text}",
            fast.len(),
            slow.table.len()
        ));
    }
    if let Some(keys) = &slow.sort_keys {
        if keys_total(keys) {
            let fast_rows: Vec<Vec<String>> = fast
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::display).collect())
                .collect();
            let slow_rows: Vec<Vec<String>> = slow
                .table
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::display).collect())
                .collect();
            if fast_rows != slow_rows {
                return Err(format!("seed {seed}: order differs under a total ORDER BY\n{text}"));
            }
        }
    }
    Ok(true)
}
