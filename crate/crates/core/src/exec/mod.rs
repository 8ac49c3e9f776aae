//! Query execution.
//!
//! Evaluation is a fixed left-to-right plan. A pattern starts from its first
//! node: a bound variable, an index hit when the node carries a label and an
//! indexed property, a label scan, or all nodes, always in ascending node-id
//! order. Each hop then walks the current node's adjacency lists in edge
//! insertion order (outgoing before incoming for undirected hops). Input rows
//! are processed in order, so without `ORDER BY` the output order is fully
//! determined by the graph snapshot.
//!
//! Within one `MATCH` clause an edge binds at most once per row.

mod eval;
mod table;

use crate::cypher::ast::{
    Clause, MatchClause, NodePattern, Pattern, ProjectionItem, Query, RelDirection, RelPattern, SortOrder,
};
use crate::graph::{EdgeId, NodeId, PropertyGraph};
use crate::value::Value;

pub use eval::{datum_cmp, datum_eq, eval_expr, sort_cmp, Binding, Datum, Evaluator, Incomparable};
pub(crate) use table::render_aligned;
pub use table::{Cell, ResultTable};

/// Runs a bound query against the graph.
pub fn execute(graph: &PropertyGraph, query: &Query) -> ResultTable {
    let mut ev = Evaluator::new(graph);
    let mut rows: Vec<Binding> = vec![Binding::new()];
    let mut columns: Vec<String> = Vec::new();
    let mut projected: Vec<(Binding, Vec<Datum>)> = Vec::new();

    for clause in &query.clauses {
        match clause {
            Clause::Match(m) => rows = match_clause(&mut ev, m, rows),
            Clause::With(w) => {
                let mut next = Vec::with_capacity(rows.len());
                for row in &rows {
                    let new_row = project_binding(&mut ev, row, &w.items);
                    let keep = match &w.predicate {
                        Some(p) => ev.truth(&new_row, p) == Some(true),
                        None => true,
                    };
                    if keep {
                        next.push(new_row);
                    }
                }
                rows = next;
            }
            Clause::Return(r) => {
                columns = r.items.iter().map(ProjectionItem::name).collect();
                projected = rows
                    .iter()
                    .map(|row| {
                        let cells = r.items.iter().map(|i| ev.eval(row, &i.expr)).collect();
                        (row.clone(), cells)
                    })
                    .collect();
            }
            Clause::OrderBy(keys) => {
                let mut keyed: Vec<(Vec<Datum>, Vec<Datum>)> = projected
                    .drain(..)
                    .map(|(mut env, cells)| {
                        for (name, cell) in columns.iter().zip(&cells) {
                            env.insert(name.clone(), cell.clone());
                        }
                        let k = keys.iter().map(|k| ev.eval(&env, &k.expr)).collect();
                        (k, cells)
                    })
                    .collect();
                keyed.sort_by(|(a, _), (b, _)| {
                    for (i, key) in keys.iter().enumerate() {
                        let o = sort_cmp(&a[i], &b[i]);
                        let o = match key.order {
                            SortOrder::Asc => o,
                            SortOrder::Desc => o.reverse(),
                        };
                        if o.is_ne() {
                            return o;
                        }
                    }
                    std::cmp::Ordering::Equal
                });
                projected = keyed.into_iter().map(|(_, cells)| (Binding::new(), cells)).collect();
            }
        }
    }

    let rows = projected
        .into_iter()
        .map(|(_, cells)| cells.iter().map(|d| Cell::from_datum(graph, d)).collect())
        .collect();
    ResultTable {
        columns,
        rows,
        type_mismatches: ev.type_mismatches,
    }
}

fn project_binding(ev: &mut Evaluator<'_>, row: &Binding, items: &[ProjectionItem]) -> Binding {
    items.iter().map(|i| (i.name(), ev.eval(row, &i.expr))).collect()
}

/// Extends each seed binding with every match of one pattern.
pub fn match_pattern(graph: &PropertyGraph, pattern: &Pattern, seeds: Vec<Binding>, optional: bool) -> Vec<Binding> {
    let clause = MatchClause {
        optional,
        patterns: vec![pattern.clone()],
        predicate: None,
    };
    match_clause(&mut Evaluator::new(graph), &clause, seeds)
}

fn match_clause(ev: &mut Evaluator<'_>, clause: &MatchClause, seeds: Vec<Binding>) -> Vec<Binding> {
    let mut out = Vec::new();
    for seed in seeds {
        let mut found = Vec::new();
        let mut m = Matcher {
            graph: ev.graph,
            patterns: &clause.patterns,
            used: Vec::new(),
            out: &mut found,
        };
        m.pattern(0, seed.clone());
        if let Some(pred) = &clause.predicate {
            found.retain(|row| ev.truth(row, pred) == Some(true));
        }
        if found.is_empty() && clause.optional {
            let mut row = seed;
            for p in &clause.patterns {
                let vars = p
                    .nodes()
                    .filter_map(|n| n.var.as_ref())
                    .chain(p.rels().filter_map(|r| r.var.as_ref()));
                for v in vars {
                    row.entry(v.clone()).or_insert(Datum::NULL);
                }
            }
            out.push(row);
        } else {
            out.extend(found);
        }
    }
    out
}

struct Matcher<'a, 'g> {
    graph: &'g PropertyGraph,
    patterns: &'a [Pattern],
    used: Vec<EdgeId>,
    out: &'a mut Vec<Binding>,
}

impl Matcher<'_, '_> {
    fn pattern(&mut self, pi: usize, binding: Binding) {
        let Some(p) = self.patterns.get(pi) else {
            self.out.push(binding);
            return;
        };
        for start in self.start_candidates(&p.start, &binding) {
            if let Some(b) = self.bind_node(&p.start, start, &binding) {
                self.hop(pi, 0, start, b);
            }
        }
    }

    fn hop(&mut self, pi: usize, hi: usize, cur: NodeId, binding: Binding) {
        let p = &self.patterns[pi];
        let Some((rel, next)) = p.hops.get(hi) else {
            self.pattern(pi + 1, binding);
            return;
        };
        let out_ids = self.graph.outgoing_ids(cur);
        let in_ids = self.graph.incoming_ids(cur);
        let mut steps: Vec<(EdgeId, NodeId)> = Vec::new();
        if rel.direction != RelDirection::RightToLeft {
            steps.extend(
                out_ids
                    .iter()
                    .filter_map(|e| self.graph.edge(*e))
                    .map(|e| (e.id, e.dst)),
            );
        }
        if rel.direction != RelDirection::LeftToRight {
            steps.extend(
                in_ids
                    .iter()
                    .filter_map(|e| self.graph.edge(*e))
                    .filter(|e| rel.direction == RelDirection::RightToLeft || e.src != e.dst)
                    .map(|e| (e.id, e.src)),
            );
        }
        for (eid, target) in steps {
            if self.used.contains(&eid) || !self.rel_ok(rel, eid, &binding) {
                continue;
            }
            let Some(mut b) = self.bind_node(next, target, &binding) else {
                continue;
            };
            if let Some(v) = &rel.var {
                b.insert(v.clone(), Datum::Edge(eid));
            }
            self.used.push(eid);
            self.hop(pi, hi + 1, target, b);
            self.used.pop();
        }
    }

    fn rel_ok(&self, rel: &RelPattern, eid: EdgeId, binding: &Binding) -> bool {
        let edge = self.graph.edge(eid).expect("adjacency is consistent");
        if !rel.types.is_empty() && !rel.types.contains(&edge.rel_type) {
            return false;
        }
        match rel.var.as_ref().and_then(|v| binding.get(v)) {
            None => true,
            Some(Datum::Edge(bound)) => *bound == eid,
            Some(_) => false,
        }
    }

    fn start_candidates(&self, np: &NodePattern, binding: &Binding) -> Vec<NodeId> {
        if let Some(bound) = np.var.as_ref().and_then(|v| binding.get(v)) {
            return match bound {
                Datum::Node(id) => vec![*id],
                _ => Vec::new(),
            };
        }
        for label in &np.labels {
            for (key, value) in &np.props {
                if self.graph.has_index(label, key) {
                    return self.graph.find_nodes(label, key, value).into_iter().collect();
                }
            }
        }
        match np.labels.first() {
            Some(label) => self.graph.nodes_with_label(label).collect(),
            None => self.graph.nodes().map(|n| n.id).collect(),
        }
    }

    fn bind_node(&self, np: &NodePattern, id: NodeId, binding: &Binding) -> Option<Binding> {
        let node = self.graph.node(id)?;
        if !np.labels.iter().all(|l| node.has_label(l)) {
            return None;
        }
        for (key, value) in &np.props {
            let actual = node.props.get(key).unwrap_or(&Value::Null);
            if actual.equals(value) != Some(true) {
                return None;
            }
        }
        match np.var.as_ref() {
            None => Some(binding.clone()),
            Some(v) => match binding.get(v) {
                Some(Datum::Node(bound)) if *bound == id => Some(binding.clone()),
                Some(_) => None,
                None => {
                    let mut b = binding.clone();
                    b.insert(v.clone(), Datum::Node(id));
                    Some(b)
                }
            },
        }
    }
}
