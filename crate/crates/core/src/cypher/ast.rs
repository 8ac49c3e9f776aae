use crate::value::Value;

/// A parsed query: `(MATCH | WITH)* RETURN [ORDER BY]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clause {
    Match(MatchClause),
    With(WithClause),
    Return(ReturnClause),
    OrderBy(Vec<SortKey>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub optional: bool,
    pub patterns: Vec<Pattern>,
    pub predicate: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WithClause {
    pub items: Vec<ProjectionItem>,
    pub predicate: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnClause {
    pub items: Vec<ProjectionItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortKey {
    pub expr: Expr,
    pub order: SortOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortOrder {
    Asc,
    Desc,
}

/// A path pattern: a start node followed by `(relationship, node)` hops.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub start: NodePattern,
    pub hops: Vec<(RelPattern, NodePattern)>,
}

impl Pattern {
    pub fn nodes(&self) -> impl Iterator<Item = &NodePattern> {
        std::iter::once(&self.start).chain(self.hops.iter().map(|(_, n)| n))
    }

    pub fn rels(&self) -> impl Iterator<Item = &RelPattern> {
        self.hops.iter().map(|(r, _)| r)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodePattern {
    pub var: Option<String>,
    pub labels: Vec<String>,
    pub props: Vec<(String, Value)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub var: Option<String>,
    pub types: Vec<String>,
    pub direction: RelDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelDirection {
    LeftToRight,
    RightToLeft,
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionItem {
    pub expr: Expr,
    pub alias: Option<String>,
}

impl ProjectionItem {
    /// Output column / variable name: the alias, or the bare variable, or
    /// the canonical text of the expression.
    pub fn name(&self) -> String {
        match (&self.alias, &self.expr) {
            (Some(a), _) => a.clone(),
            (None, Expr::Variable(v)) => v.clone(),
            (None, e) => super::render::render_expr(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Expressions. Binding strength, loosest first: `OR`, `AND`, `NOT`,
/// comparison / `IN`, atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Variable(String),
    Property(String, String),
    Literal(Value),
    List(Vec<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    In(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Paren(Box<Expr>),
}

impl Expr {
    pub fn prop(var: &str, key: &str) -> Expr {
        Expr::Property(var.to_string(), key.to_string())
    }

    pub fn lit(v: impl Into<Value>) -> Expr {
        Expr::Literal(v.into())
    }

    pub fn cmp(op: CmpOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Cmp(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: Expr, rhs: Expr) -> Expr {
        Expr::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Or(Box::new(lhs), Box::new(rhs))
    }

    /// Variables referenced anywhere in the expression.
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Variable(v) | Expr::Property(v, _) => out.push(v.clone()),
            Expr::Literal(_) => {}
            Expr::List(items) => items.iter().for_each(|e| e.variables(out)),
            Expr::Cmp(_, a, b) | Expr::In(a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.variables(out);
                b.variables(out);
            }
            Expr::Not(e) | Expr::Paren(e) => e.variables(out),
        }
    }

    /// Property keys referenced anywhere in the expression.
    pub fn property_keys(&self, out: &mut Vec<String>) {
        match self {
            Expr::Property(_, k) => out.push(k.clone()),
            Expr::Variable(_) | Expr::Literal(_) => {}
            Expr::List(items) => items.iter().for_each(|e| e.property_keys(out)),
            Expr::Cmp(_, a, b) | Expr::In(a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.property_keys(out);
                b.property_keys(out);
            }
            Expr::Not(e) | Expr::Paren(e) => e.property_keys(out),
        }
    }
}
