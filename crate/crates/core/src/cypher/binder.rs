//! Variable scoping.
//!
//! `MATCH` adds its pattern variables to the scope; `WITH` replaces the
//! scope with its projected names; `ORDER BY` sees the scope that fed
//! `RETURN` plus the returned column names.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Node,
    Rel,
    Value,
}

/// A scoping violation, with the index of the clause it was found in.
#[derive(Debug, Clone, PartialEq)]
pub struct BindFault {
    pub variable: String,
    pub clause: usize,
    pub message: String,
}

type Scope = BTreeMap<String, VarKind>;

pub fn bind(query: &Query) -> Result<(), BindFault> {
    let mut scope = Scope::new();
    let mut returned: Option<Scope> = None;
    for (ci, clause) in query.clauses.iter().enumerate() {
        let fault = |variable: &str, message: &str| BindFault {
            variable: variable.to_string(),
            clause: ci,
            message: message.to_string(),
        };
        match clause {
            Clause::Match(m) => {
                let mut clause_rels = BTreeSet::new();
                for p in &m.patterns {
                    for n in p.nodes() {
                        if let Some(v) = &n.var {
                            match scope.get(v) {
                                None => {
                                    scope.insert(v.clone(), VarKind::Node);
                                }
                                Some(VarKind::Node) => {}
                                Some(_) => return Err(fault(v, "variable is not a node")),
                            }
                        }
                    }
                    for r in p.rels() {
                        if let Some(v) = &r.var {
                            if !clause_rels.insert(v.clone()) {
                                return Err(fault(v, "relationship variable repeated in one MATCH"));
                            }
                            match scope.get(v) {
                                None => {
                                    scope.insert(v.clone(), VarKind::Rel);
                                }
                                Some(VarKind::Rel) => {}
                                Some(_) => return Err(fault(v, "variable is not a relationship")),
                            }
                        }
                    }
                }
                if let Some(pred) = &m.predicate {
                    check_expr(pred, &scope).map_err(|v| fault(&v, "unbound variable"))?;
                }
            }
            Clause::With(w) => {
                let next = project(&w.items, &scope, true).map_err(|(v, msg)| fault(&v, msg))?;
                scope = next;
                if let Some(pred) = &w.predicate {
                    check_expr(pred, &scope).map_err(|v| fault(&v, "unbound variable"))?;
                }
            }
            Clause::Return(r) => {
                let cols = project(&r.items, &scope, false).map_err(|(v, msg)| fault(&v, msg))?;
                returned = Some(cols);
            }
            Clause::OrderBy(keys) => {
                let mut visible = scope.clone();
                if let Some(cols) = &returned {
                    visible.extend(cols.iter().map(|(k, v)| (k.clone(), *v)));
                }
                for k in keys {
                    check_expr(&k.expr, &visible).map_err(|v| fault(&v, "unbound variable"))?;
                }
            }
        }
    }
    Ok(())
}

fn project(items: &[ProjectionItem], scope: &Scope, require_alias: bool) -> Result<Scope, (String, &'static str)> {
    let mut out = Scope::new();
    for item in items {
        check_expr(&item.expr, scope).map_err(|v| (v, "unbound variable"))?;
        if require_alias && item.alias.is_none() && !matches!(item.expr, Expr::Variable(_)) {
            return Err((item.name(), "expression in WITH needs an alias"));
        }
        let name = item.name();
        let kind = match &item.expr {
            Expr::Variable(v) => scope[v],
            _ => VarKind::Value,
        };
        if out.insert(name.clone(), kind).is_some() {
            return Err((name, "duplicate projection name"));
        }
    }
    Ok(out)
}

fn check_expr(expr: &Expr, scope: &Scope) -> Result<(), String> {
    let mut vars = Vec::new();
    expr.variables(&mut vars);
    match vars.into_iter().find(|v| !scope.contains_key(v)) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}
