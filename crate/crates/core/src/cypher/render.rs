//! Canonical single-line rendering: uppercase keywords, single spaces,
//! explicit sort directions.

use super::ast::*;
use crate::value::Value;

pub fn render(query: &Query) -> String {
    let mut parts = Vec::new();
    for clause in &query.clauses {
        parts.push(match clause {
            Clause::Match(m) => {
                let mut s = String::new();
                if m.optional {
                    s.push_str("OPTIONAL ");
                }
                s.push_str("MATCH ");
                let pats: Vec<_> = m.patterns.iter().map(render_pattern).collect();
                s.push_str(&pats.join(", "));
                if let Some(p) = &m.predicate {
                    s.push_str(" WHERE ");
                    s.push_str(&render_expr(p));
                }
                s
            }
            Clause::With(w) => {
                let mut s = format!("WITH {}", render_items(&w.items));
                if let Some(p) = &w.predicate {
                    s.push_str(" WHERE ");
                    s.push_str(&render_expr(p));
                }
                s
            }
            Clause::Return(r) => format!("RETURN {}", render_items(&r.items)),
            Clause::OrderBy(keys) => {
                let keys: Vec<_> = keys
                    .iter()
                    .map(|k| {
                        let dir = match k.order {
                            SortOrder::Asc => "ASC",
                            SortOrder::Desc => "DESC",
                        };
                        format!("{} {dir}", render_expr(&k.expr))
                    })
                    .collect();
                format!("ORDER BY {}", keys.join(", "))
            }
        });
    }
    parts.join(" ")
}

fn render_items(items: &[ProjectionItem]) -> String {
    items
        .iter()
        .map(|i| match &i.alias {
            Some(a) => format!("{} AS {a}", render_expr(&i.expr)),
            None => render_expr(&i.expr),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn render_pattern(p: &Pattern) -> String {
    let mut s = render_node(&p.start);
    for (rel, node) in &p.hops {
        let mut inner = String::new();
        if let Some(v) = &rel.var {
            inner.push_str(v);
        }
        if !rel.types.is_empty() {
            inner.push(':');
            inner.push_str(&rel.types.join("|"));
        }
        let body = if inner.is_empty() {
            "--".to_string()
        } else {
            format!("-[{inner}]-")
        };
        match rel.direction {
            RelDirection::LeftToRight => s.push_str(&format!("{body}>")),
            RelDirection::RightToLeft => s.push_str(&format!("<{body}")),
            RelDirection::Undirected => s.push_str(&body),
        }
        s.push_str(&render_node(node));
    }
    s
}

fn render_node(n: &NodePattern) -> String {
    let mut s = String::from("(");
    if let Some(v) = &n.var {
        s.push_str(v);
    }
    for l in &n.labels {
        s.push(':');
        s.push_str(l);
    }
    if !n.props.is_empty() {
        if n.var.is_some() || !n.labels.is_empty() {
            s.push(' ');
        }
        let pairs: Vec<_> = n
            .props
            .iter()
            .map(|(k, v)| format!("{k}: {}", render_literal(v)))
            .collect();
        s.push('{');
        s.push_str(&pairs.join(", "));
        s.push('}');
    }
    s.push(')');
    s
}

pub fn render_literal(v: &Value) -> String {
    match v {
        Value::Null => "NULL".into(),
        Value::Boolean(true) => "TRUE".into(),
        Value::Boolean(false) => "FALSE".into(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => format!("{f:?}"),
        Value::Text(s) => quote(s),
        Value::TextList(items) => {
            let inner: Vec<_> = items.iter().map(|s| quote(s)).collect();
            format!("[{}]", inner.join(", "))
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

// precedence levels: 0 = OR, 1 = AND, 2 = NOT, 3 = comparison, 4 = atom
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Or(..) => 0,
        Expr::And(..) => 1,
        Expr::Not(_) => 2,
        Expr::Cmp(..) | Expr::In(..) => 3,
        _ => 4,
    }
}

fn at_least(e: &Expr, min: u8) -> String {
    if level(e) >= min {
        render_expr(e)
    } else {
        format!("({})", render_expr(e))
    }
}

pub fn render_expr(e: &Expr) -> String {
    match e {
        Expr::Variable(v) => v.clone(),
        Expr::Property(v, k) => format!("{v}.{k}"),
        Expr::Literal(v) => render_literal(v),
        Expr::List(items) => {
            let inner: Vec<_> = items.iter().map(render_expr).collect();
            format!("[{}]", inner.join(", "))
        }
        Expr::Cmp(op, a, b) => format!("{} {} {}", at_least(a, 4), op.symbol(), at_least(b, 4)),
        Expr::In(a, b) => format!("{} IN {}", at_least(a, 4), at_least(b, 4)),
        Expr::And(a, b) => format!("{} AND {}", at_least(a, 1), at_least(b, 2)),
        Expr::Or(a, b) => format!("{} OR {}", at_least(a, 0), at_least(b, 1)),
        Expr::Not(inner) => format!("NOT {}", at_least(inner, 2)),
        Expr::Paren(inner) => format!("({})", render_expr(inner)),
    }
}
