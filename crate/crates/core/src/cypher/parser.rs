//! Recursive-descent parser over the token stream.

use super::ast::*;
use super::lexer::{tokenize, Spanned, Token};
use super::{CypherError, ParseError, Position};
use crate::value::Value;

/// Parses without running the binder.
pub fn parse_unbound(text: &str) -> Result<Query, CypherError> {
    Ok(parse_with_tokens(text)?.0)
}

/// Parses and also returns the token stream plus the token index at which
/// each clause starts, for locating binder errors.
pub(crate) fn parse_with_tokens(text: &str) -> Result<(Query, Vec<Spanned>, Vec<usize>), CypherError> {
    let tokens = tokenize(text)?;
    let end = end_position(text);
    let mut p = Parser {
        tokens,
        idx: 0,
        end,
        clause_starts: Vec::new(),
    };
    let q = p.query()?;
    Ok((q, p.tokens, p.clause_starts))
}

fn end_position(text: &str) -> Position {
    let mut line = 1;
    let mut column = 1;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    Position {
        offset: text.len(),
        line,
        column,
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    idx: usize,
    end: Position,
    clause_starts: Vec<usize>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx).map(|s| &s.token)
    }

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.tokens.get(self.idx + k).map(|s| &s.token)
    }

    fn pos(&self) -> Position {
        self.tokens.get(self.idx).map(|s| s.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.idx).map(|s| s.token.clone());
        self.idx += 1;
        t
    }

    fn at(&self, t: &Token) -> bool {
        self.peek() == Some(t)
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.at(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self
                .peek()
                .map(|t| t.to_string())
                .unwrap_or_else(|| "end of input".into()),
        }
    }

    fn expect(&mut self, t: Token) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error(&[&t.to_string()]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Token::Ident(name)) => {
                let name = name.clone();
                self.idx += 1;
                Ok(name)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn query(&mut self) -> PResult<Query> {
        let mut clauses = Vec::new();
        let mut seen_return = false;
        loop {
            let clause_pos = self.pos();
            self.clause_starts.push(self.idx);
            match self.peek() {
                None => {
                    self.clause_starts.pop();
                    break;
                }
                Some(Token::Match) | Some(Token::Optional) if !seen_return => {
                    clauses.push(Clause::Match(self.match_clause()?))
                }
                Some(Token::With) if !seen_return => {
                    self.bump();
                    let items = self.items()?;
                    let predicate = self.where_opt()?;
                    clauses.push(Clause::With(WithClause { items, predicate }));
                }
                Some(Token::Return) if !seen_return => {
                    self.bump();
                    let items = self.items()?;
                    clauses.push(Clause::Return(ReturnClause { items }));
                    seen_return = true;
                }
                Some(Token::Order) if seen_return => {
                    self.bump();
                    self.expect(Token::By)?;
                    let mut keys = vec![self.sort_key()?];
                    while self.eat(&Token::Comma) {
                        keys.push(self.sort_key()?);
                    }
                    clauses.push(Clause::OrderBy(keys));
                    if self.peek().is_some() {
                        return Err(self.error(&["end of input"]));
                    }
                }
                _ => {
                    let expected: &[&str] = if seen_return {
                        &["ORDER BY", "end of input"]
                    } else {
                        &["MATCH", "OPTIONAL MATCH", "WITH", "RETURN"]
                    };
                    let mut err = self.error(expected);
                    err.pos = clause_pos;
                    return Err(err);
                }
            }
        }
        if !seen_return {
            return Err(self.error(&["RETURN"]));
        }
        Ok(Query { clauses })
    }

    fn match_clause(&mut self) -> PResult<MatchClause> {
        let optional = self.eat(&Token::Optional);
        self.expect(Token::Match)?;
        let mut patterns = vec![self.pattern()?];
        while self.eat(&Token::Comma) {
            patterns.push(self.pattern()?);
        }
        let predicate = self.where_opt()?;
        Ok(MatchClause {
            optional,
            patterns,
            predicate,
        })
    }

    fn where_opt(&mut self) -> PResult<Option<Expr>> {
        if self.eat(&Token::Where) {
            Ok(Some(self.expr()?))
        } else {
            Ok(None)
        }
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let start = self.node_pattern()?;
        let mut hops = Vec::new();
        while matches!(self.peek(), Some(Token::Minus) | Some(Token::Lt)) {
            let rel = self.rel_pattern()?;
            let node = self.node_pattern()?;
            hops.push((rel, node));
        }
        Ok(Pattern { start, hops })
    }

    fn node_pattern(&mut self) -> PResult<NodePattern> {
        self.expect(Token::LParen)?;
        let mut node = NodePattern::default();
        if let Some(Token::Ident(_)) = self.peek() {
            node.var = Some(self.ident()?);
        }
        while self.eat(&Token::Colon) {
            node.labels.push(self.ident()?);
        }
        if self.at(&Token::LBrace) {
            node.props = self.prop_map()?;
        }
        if !self.eat(&Token::RParen) {
            return Err(self.error(&[":", "{", ")"]));
        }
        Ok(node)
    }

    fn prop_map(&mut self) -> PResult<Vec<(String, Value)>> {
        self.expect(Token::LBrace)?;
        let mut out = Vec::new();
        if self.eat(&Token::RBrace) {
            return Ok(out);
        }
        loop {
            let key = self.ident()?;
            self.expect(Token::Colon)?;
            let v = self.literal()?;
            out.push((key, v));
            if self.eat(&Token::Comma) {
                continue;
            }
            if self.eat(&Token::RBrace) {
                return Ok(out);
            }
            return Err(self.error(&[",", "}"]));
        }
    }

    fn literal(&mut self) -> PResult<Value> {
        let v = match self.peek() {
            Some(Token::Str(s)) => Value::Text(s.clone()),
            Some(Token::Int(i)) => Value::Integer(*i),
            Some(Token::Float(f)) => Value::Float(*f),
            Some(Token::True) => Value::Boolean(true),
            Some(Token::False) => Value::Boolean(false),
            Some(Token::Null) => Value::Null,
            Some(Token::Minus) => {
                let v = match self.peek_at(1) {
                    Some(Token::Int(i)) => Value::Integer(-*i),
                    Some(Token::Float(f)) => Value::Float(-*f),
                    _ => return Err(self.error(&["literal"])),
                };
                self.idx += 2;
                return Ok(v);
            }
            _ => return Err(self.error(&["literal"])),
        };
        self.idx += 1;
        Ok(v)
    }

    fn rel_pattern(&mut self) -> PResult<RelPattern> {
        let left = self.eat(&Token::Lt);
        self.expect(Token::Minus)?;
        let mut rel = RelPattern {
            var: None,
            types: Vec::new(),
            direction: RelDirection::Undirected,
        };
        if self.eat(&Token::LBracket) {
            if let Some(Token::Ident(_)) = self.peek() {
                rel.var = Some(self.ident()?);
            }
            if self.eat(&Token::Colon) {
                rel.types.push(self.ident()?);
                while self.eat(&Token::Pipe) {
                    self.eat(&Token::Colon);
                    rel.types.push(self.ident()?);
                }
            }
            if !self.eat(&Token::RBracket) {
                return Err(self.error(&[":", "|", "]"]));
            }
        }
        self.expect(Token::Minus)?;
        let right = self.eat(&Token::Gt);
        rel.direction = match (left, right) {
            (false, true) => RelDirection::LeftToRight,
            (true, false) => RelDirection::RightToLeft,
            (false, false) => RelDirection::Undirected,
            (true, true) => {
                let mut err = self.error(&["single arrow head"]);
                err.found = "`<-...->`".into();
                return Err(err);
            }
        };
        Ok(rel)
    }

    fn items(&mut self) -> PResult<Vec<ProjectionItem>> {
        let mut items = vec![self.item()?];
        while self.eat(&Token::Comma) {
            items.push(self.item()?);
        }
        Ok(items)
    }

    fn item(&mut self) -> PResult<ProjectionItem> {
        let expr = self.expr()?;
        let alias = if self.eat(&Token::As) {
            Some(self.ident()?)
        } else {
            None
        };
        Ok(ProjectionItem { expr, alias })
    }

    fn sort_key(&mut self) -> PResult<SortKey> {
        let expr = self.expr()?;
        let order = if self.eat(&Token::Desc) {
            SortOrder::Desc
        } else {
            self.eat(&Token::Asc);
            SortOrder::Asc
        };
        Ok(SortKey { expr, order })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat(&Token::Or) {
            let rhs = self.and_expr()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.eat(&Token::And) {
            let rhs = self.not_expr()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat(&Token::Not) {
            Ok(Expr::Not(Box::new(self.not_expr()?)))
        } else {
            self.cmp_expr()
        }
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.atom()?;
        let op = match self.peek() {
            Some(Token::Eq) => CmpOp::Eq,
            Some(Token::Neq) => CmpOp::Neq,
            Some(Token::Lt) => CmpOp::Lt,
            Some(Token::Le) => CmpOp::Le,
            Some(Token::Gt) => CmpOp::Gt,
            Some(Token::Ge) => CmpOp::Ge,
            Some(Token::In) => {
                self.bump();
                let rhs = self.atom()?;
                return Ok(Expr::In(Box::new(lhs), Box::new(rhs)));
            }
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.atom()?;
        Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(Token::LParen) => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Expr::Paren(Box::new(inner)))
            }
            Some(Token::LBracket) => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat(&Token::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if self.eat(&Token::Comma) {
                            continue;
                        }
                        if self.eat(&Token::RBracket) {
                            break;
                        }
                        return Err(self.error(&[",", "]"]));
                    }
                }
                Ok(Expr::List(items))
            }
            Some(Token::Ident(_)) => {
                let var = self.ident()?;
                if self.eat(&Token::Dot) {
                    let key = self.ident()?;
                    Ok(Expr::Property(var, key))
                } else {
                    Ok(Expr::Variable(var))
                }
            }
            Some(
                Token::Str(_)
                | Token::Int(_)
                | Token::Float(_)
                | Token::True
                | Token::False
                | Token::Null
                | Token::Minus,
            ) => Ok(Expr::Literal(self.literal()?)),
            _ => Err(self.error(&["expression"])),
        }
    }
}
