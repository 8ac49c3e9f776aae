//! Expression evaluation with three-valued logic.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::cypher::ast::{CmpOp, Expr};
use crate::graph::{EdgeId, NodeId, PropertyGraph};
use crate::value::Value;

/// What a variable or expression evaluates to during execution.
#[derive(Debug, Clone, PartialEq)]
pub enum Datum {
    Value(Value),
    List(Vec<Datum>),
    Node(NodeId),
    Edge(EdgeId),
}

impl Datum {
    pub const NULL: Datum = Datum::Value(Value::Null);

    pub fn is_null(&self) -> bool {
        matches!(self, Datum::Value(Value::Null))
    }
}

impl From<Value> for Datum {
    fn from(v: Value) -> Self {
        Datum::Value(v)
    }
}

/// One row of variable bindings.
pub type Binding = BTreeMap<String, Datum>;

/// Evaluation context: the graph plus a counter of type mismatches that were
/// folded into Null.
pub struct Evaluator<'g> {
    pub graph: &'g PropertyGraph,
    pub type_mismatches: usize,
}

impl<'g> Evaluator<'g> {
    pub fn new(graph: &'g PropertyGraph) -> Self {
        Evaluator {
            graph,
            type_mismatches: 0,
        }
    }

    pub fn eval(&mut self, binding: &Binding, expr: &Expr) -> Datum {
        match expr {
            Expr::Variable(v) => binding.get(v).cloned().unwrap_or(Datum::NULL),
            Expr::Property(v, key) => match binding.get(v) {
                Some(Datum::Node(id)) => self
                    .graph
                    .node(*id)
                    .and_then(|n| n.props.get(key))
                    .cloned()
                    .map(Datum::Value)
                    .unwrap_or(Datum::NULL),
                Some(Datum::Edge(id)) => self
                    .graph
                    .edge(*id)
                    .and_then(|e| e.props.get(key))
                    .cloned()
                    .map(Datum::Value)
                    .unwrap_or(Datum::NULL),
                Some(Datum::Value(Value::Null)) | None => Datum::NULL,
                Some(_) => self.mismatch(),
            },
            Expr::Literal(v) => Datum::Value(v.clone()),
            Expr::List(items) => Datum::List(items.iter().map(|e| self.eval(binding, e)).collect()),
            Expr::Paren(inner) => self.eval(binding, inner),
            Expr::Cmp(op, a, b) => {
                let a = self.eval(binding, a);
                let b = self.eval(binding, b);
                let truth = match op {
                    CmpOp::Eq => datum_eq(&a, &b),
                    CmpOp::Neq => datum_eq(&a, &b).map(|t| !t),
                    _ => match datum_cmp(&a, &b) {
                        Ok(Some(ord)) => Some(match op {
                            CmpOp::Lt => ord == Ordering::Less,
                            CmpOp::Le => ord != Ordering::Greater,
                            CmpOp::Gt => ord == Ordering::Greater,
                            CmpOp::Ge => ord != Ordering::Less,
                            CmpOp::Eq | CmpOp::Neq => unreachable!(),
                        }),
                        Ok(None) => None,
                        Err(Incomparable) => {
                            self.type_mismatches += 1;
                            None
                        }
                    },
                };
                tri(truth)
            }
            Expr::In(lhs, rhs) => {
                let x = self.eval(binding, lhs);
                let list = self.eval(binding, rhs);
                let items: Vec<Datum> = match list {
                    Datum::List(items) => items,
                    Datum::Value(Value::TextList(items)) => {
                        items.into_iter().map(|s| Datum::Value(Value::Text(s))).collect()
                    }
                    Datum::Value(Value::Null) => return Datum::NULL,
                    _ => return self.mismatch(),
                };
                if x.is_null() {
                    return Datum::NULL;
                }
                let mut saw_null = false;
                for item in &items {
                    match datum_eq(&x, item) {
                        Some(true) => return tri(Some(true)),
                        Some(false) => {}
                        None => saw_null = true,
                    }
                }
                tri(if saw_null { None } else { Some(false) })
            }
            Expr::And(a, b) => {
                let a = self.truth(binding, a);
                let b = self.truth(binding, b);
                tri(match (a, b) {
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                })
            }
            Expr::Or(a, b) => {
                let a = self.truth(binding, a);
                let b = self.truth(binding, b);
                tri(match (a, b) {
                    (Some(true), _) | (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                })
            }
            Expr::Not(inner) => tri(self.truth(binding, inner).map(|t| !t)),
        }
    }

    /// Kleene truth value of an expression; non-boolean results count as a
    /// type mismatch and read as unknown.
    pub fn truth(&mut self, binding: &Binding, expr: &Expr) -> Option<bool> {
        match self.eval(binding, expr) {
            Datum::Value(Value::Boolean(b)) => Some(b),
            Datum::Value(Value::Null) => None,
            _ => {
                self.type_mismatches += 1;
                None
            }
        }
    }

    fn mismatch(&mut self) -> Datum {
        self.type_mismatches += 1;
        Datum::NULL
    }
}

/// Evaluates `expr` against a single binding.
pub fn eval_expr(graph: &PropertyGraph, binding: &Binding, expr: &Expr) -> Datum {
    Evaluator::new(graph).eval(binding, expr)
}

fn tri(t: Option<bool>) -> Datum {
    match t {
        Some(b) => Datum::Value(Value::Boolean(b)),
        None => Datum::NULL,
    }
}

fn as_list(d: &Datum) -> Option<Vec<Datum>> {
    match d {
        Datum::List(items) => Some(items.clone()),
        Datum::Value(Value::TextList(items)) => {
            Some(items.iter().map(|s| Datum::Value(Value::Text(s.clone()))).collect())
        }
        _ => None,
    }
}

/// `=` semantics: `None` when Null decides the outcome.
pub fn datum_eq(a: &Datum, b: &Datum) -> Option<bool> {
    if a.is_null() || b.is_null() {
        return None;
    }
    match (a, b) {
        (Datum::Node(x), Datum::Node(y)) => Some(x == y),
        (Datum::Edge(x), Datum::Edge(y)) => Some(x == y),
        (Datum::Value(x), Datum::Value(y)) if !matches!((x, y), (Value::TextList(_), Value::TextList(_))) => {
            x.equals(y)
        }
        _ => match (as_list(a), as_list(b)) {
            (Some(xs), Some(ys)) => {
                if xs.len() != ys.len() {
                    return Some(false);
                }
                let mut unknown = false;
                for (x, y) in xs.iter().zip(&ys) {
                    match datum_eq(x, y) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            _ => Some(false),
        },
    }
}

/// Operands of kinds that cannot be ordered against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incomparable;

/// Ordering comparison. `Ok(None)` for Null (or NaN) operands.
pub fn datum_cmp(a: &Datum, b: &Datum) -> Result<Option<Ordering>, Incomparable> {
    if a.is_null() || b.is_null() {
        return Ok(None);
    }
    match (a, b) {
        (Datum::Value(x), Datum::Value(y)) => {
            if x.as_f64().is_some() && y.as_f64().is_some() {
                return Ok(x.compare(y));
            }
            x.compare(y).map(Some).ok_or(Incomparable)
        }
        _ => Err(Incomparable),
    }
}

fn type_rank(d: &Datum) -> u8 {
    match d {
        Datum::Value(Value::Boolean(_)) => 0,
        Datum::Value(Value::Integer(_) | Value::Float(_)) => 1,
        Datum::Value(Value::Text(_)) => 2,
        Datum::Value(Value::TextList(_)) | Datum::List(_) => 3,
        Datum::Node(_) => 4,
        Datum::Edge(_) => 5,
        Datum::Value(Value::Null) => 6,
    }
}

/// Total order used by `ORDER BY` in ascending direction: Booleans, then
/// numbers, then text, then lists, nodes, edges, and Null last. NaN sorts
/// after every other number.
pub fn sort_cmp(a: &Datum, b: &Datum) -> Ordering {
    let (ra, rb) = (type_rank(a), type_rank(b));
    if ra != rb {
        return ra.cmp(&rb);
    }
    match (a, b) {
        (Datum::Value(x), Datum::Value(y)) => match (x, y) {
            (Value::Boolean(p), Value::Boolean(q)) => p.cmp(q),
            (Value::Text(p), Value::Text(q)) => p.cmp(q),
            (Value::Null, Value::Null) => Ordering::Equal,
            _ if ra == 1 => x.compare(y).unwrap_or_else(|| {
                let xn = x.as_f64().is_some_and(f64::is_nan);
                let yn = y.as_f64().is_some_and(f64::is_nan);
                xn.cmp(&yn)
            }),
            _ => list_cmp(&as_list(a).unwrap_or_default(), &as_list(b).unwrap_or_default()),
        },
        (Datum::Node(x), Datum::Node(y)) => x.cmp(y),
        (Datum::Edge(x), Datum::Edge(y)) => x.cmp(y),
        _ => list_cmp(&as_list(a).unwrap_or_default(), &as_list(b).unwrap_or_default()),
    }
}

fn list_cmp(xs: &[Datum], ys: &[Datum]) -> Ordering {
    for (x, y) in xs.iter().zip(ys) {
        match sort_cmp(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    xs.len().cmp(&ys.len())
}
