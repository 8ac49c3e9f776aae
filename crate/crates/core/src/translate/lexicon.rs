use std::collections::BTreeMap;

use crate::graph::{NodeId, PropertyGraph};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntityKind {
    Company,
    Sector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompanyInfo {
    pub code: String,
    pub name: String,
    pub abbrv: String,
}

/// A lexicon term found in a question. `candidates` lists every entity the
/// term names; more than one means the term is ambiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub kind: EntityKind,
    pub candidates: Vec<NodeId>,
}

/// Entity names drawn from the graph: company codes and names and sector
/// names. Matching is ASCII case-insensitive and exact.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    // lowercase term -> entities, longest terms tried first
    terms: BTreeMap<String, Vec<(EntityKind, NodeId)>>,
    by_length: Vec<String>,
    companies: BTreeMap<NodeId, CompanyInfo>,
    codes: BTreeMap<String, NodeId>,
    sectors: BTreeMap<NodeId, String>,
}

fn text<'a>(graph: &'a PropertyGraph, id: NodeId, key: &str) -> Option<&'a str> {
    graph
        .node(id)?
        .prop(key)
        .and_then(Value::as_text)
        .filter(|s| !s.trim().is_empty())
}

impl Lexicon {
    pub fn from_graph(graph: &PropertyGraph) -> Self {
        let mut lex = Lexicon::default();
        for id in graph.nodes_with_label("Company") {
            let Some(code) = text(graph, id, "stock_code") else {
                continue;
            };
            for key in ["stock_code", "stock_nm", "stock_abbrv", "stock_nm_eng"] {
                if let Some(t) = text(graph, id, key) {
                    lex.add(t, EntityKind::Company, id);
                }
            }
            lex.codes.insert(code.to_string(), id);
            lex.companies.insert(
                id,
                CompanyInfo {
                    code: code.to_string(),
                    name: text(graph, id, "stock_nm").unwrap_or(code).to_string(),
                    abbrv: text(graph, id, "stock_abbrv").unwrap_or(code).to_string(),
                },
            );
        }
        for id in graph.nodes_with_label("Sector") {
            if let Some(name) = text(graph, id, "stock_sector_nm") {
                lex.add(name, EntityKind::Sector, id);
                lex.sectors.insert(id, name.to_string());
            }
        }
        lex.by_length = lex.terms.keys().cloned().collect();
        lex.by_length
            .sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        lex
    }

    fn add(&mut self, term: &str, kind: EntityKind, id: NodeId) {
        let entry = self.terms.entry(term.trim().to_ascii_lowercase()).or_default();
        if !entry.contains(&(kind, id)) {
            entry.push((kind, id));
        }
    }

    pub fn company(&self, id: NodeId) -> Option<&CompanyInfo> {
        self.companies.get(&id)
    }

    pub fn company_by_code(&self, code: &str) -> Option<NodeId> {
        self.codes.get(code).copied()
    }

    pub fn sector_name(&self, id: NodeId) -> Option<&str> {
        self.sectors.get(&id).map(String::as_str)
    }

    /// Entities of `kind` whose name or code equals `term`.
    pub fn lookup(&self, term: &str, kind: EntityKind) -> Vec<NodeId> {
        self.terms
            .get(&term.trim().to_ascii_lowercase())
            .into_iter()
            .flatten()
            .filter(|(k, _)| *k == kind)
            .map(|(_, id)| *id)
            .collect()
    }

    /// Scans left to right, taking the longest term at each word boundary.
    /// Byte ranges listed in `masked` are skipped.
    pub fn scan(&self, question: &str, masked: &[(usize, usize)]) -> Vec<Mention> {
        let lower = question.to_ascii_lowercase();
        let bytes = lower.as_bytes();
        let boundary = |i: usize| {
            i == 0 || i >= bytes.len() || !(bytes[i - 1].is_ascii_alphanumeric() && bytes[i].is_ascii_alphanumeric())
        };
        let is_word = |b: u8| b.is_ascii_alphanumeric();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            if masked.iter().any(|(s, e)| (*s..*e).contains(&i))
                || (i > 0 && is_word(bytes[i - 1]) && is_word(bytes[i]))
                || !lower.is_char_boundary(i)
            {
                i += 1;
                continue;
            }
            let hit = self.by_length.iter().find(|t| {
                let end = i + t.len();
                lower[i..].starts_with(t.as_str()) && boundary(end) && !masked.iter().any(|(s, e)| i < *e && *s < end)
            });
            match hit {
                Some(term) => {
                    let end = i + term.len();
                    let entries = &self.terms[term];
                    // a term naming both a company and a sector counts as a company
                    let kind = entries.iter().map(|(k, _)| *k).min().expect("non-empty");
                    out.push(Mention {
                        start: i,
                        end,
                        surface: question[i..end].to_string(),
                        kind,
                        candidates: entries.iter().filter(|(k, _)| *k == kind).map(|(_, id)| *id).collect(),
                    });
                    i = end;
                }
                None => i += 1,
            }
        }
        out
    }
}
