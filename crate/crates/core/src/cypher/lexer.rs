use std::fmt;

use super::{LexError, Position};

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    // keywords
    Match,
    Optional,
    Where,
    With,
    Return,
    Order,
    By,
    Asc,
    Desc,
    As,
    And,
    Or,
    Not,
    In,
    True,
    False,
    Null,
    // atoms
    Ident(String),
    Str(String),
    Int(i64),
    Float(f64),
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    Pipe,
    Minus,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Neq,
}

impl Token {
    fn keyword(word: &str) -> Option<Token> {
        Some(match word.to_ascii_uppercase().as_str() {
            "MATCH" => Token::Match,
            "OPTIONAL" => Token::Optional,
            "WHERE" => Token::Where,
            "WITH" => Token::With,
            "RETURN" => Token::Return,
            "ORDER" => Token::Order,
            "BY" => Token::By,
            "ASC" | "ASCENDING" => Token::Asc,
            "DESC" | "DESCENDING" => Token::Desc,
            "AS" => Token::As,
            "AND" => Token::And,
            "OR" => Token::Or,
            "NOT" => Token::Not,
            "IN" => Token::In,
            "TRUE" => Token::True,
            "FALSE" => Token::False,
            "NULL" => Token::Null,
            _ => return None,
        })
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Token::Match => "MATCH",
            Token::Optional => "OPTIONAL",
            Token::Where => "WHERE",
            Token::With => "WITH",
            Token::Return => "RETURN",
            Token::Order => "ORDER",
            Token::By => "BY",
            Token::Asc => "ASC",
            Token::Desc => "DESC",
            Token::As => "AS",
            Token::And => "AND",
            Token::Or => "OR",
            Token::Not => "NOT",
            Token::In => "IN",
            Token::True => "TRUE",
            Token::False => "FALSE",
            Token::Null => "NULL",
            Token::Ident(name) => return write!(f, "identifier `{name}`"),
            Token::Str(s) => return write!(f, "string {s:?}"),
            Token::Int(i) => return write!(f, "integer {i}"),
            Token::Float(x) => return write!(f, "float {x:?}"),
            Token::LParen => "(",
            Token::RParen => ")",
            Token::LBracket => "[",
            Token::RBracket => "]",
            Token::LBrace => "{",
            Token::RBrace => "}",
            Token::Colon => ":",
            Token::Comma => ",",
            Token::Dot => ".",
            Token::Pipe => "|",
            Token::Minus => "-",
            Token::Lt => "<",
            Token::Gt => ">",
            Token::Le => "<=",
            Token::Ge => ">=",
            Token::Eq => "=",
            Token::Neq => "<>",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub token: Token,
    pub pos: Position,
}

struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.offset..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position {
            offset: self.offset,
            line: self.line,
            column: self.column,
        }
    }

    fn snippet(&self, from: usize) -> String {
        self.src[from..].chars().take(16).collect()
    }
}

/// Splits query text into tokens. Keywords are case-insensitive; identifiers
/// keep their case. Whitespace and `//` line comments separate tokens.
pub fn tokenize(text: &str) -> Result<Vec<Spanned>, LexError> {
    let mut cur = Cursor {
        src: text,
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let pos = cur.pos();
        let token = if c.is_ascii_alphabetic() || c == '_' {
            let start = cur.offset;
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let word = &text[start..cur.offset];
            Token::keyword(word).unwrap_or_else(|| Token::Ident(word.to_string()))
        } else if c == '`' {
            cur.bump();
            let start = cur.offset;
            loop {
                match cur.bump() {
                    Some('`') => break,
                    Some(_) => {}
                    None => {
                        return Err(LexError {
                            pos,
                            snippet: cur.snippet(pos.offset),
                            message: "unterminated quoted identifier".into(),
                        })
                    }
                }
            }
            Token::Ident(text[start..cur.offset - 1].to_string())
        } else if c.is_ascii_digit() {
            lex_number(&mut cur, pos)?
        } else if c == '"' {
            lex_string(&mut cur, pos)?
        } else {
            cur.bump();
            match c {
                '(' => Token::LParen,
                ')' => Token::RParen,
                '[' => Token::LBracket,
                ']' => Token::RBracket,
                '{' => Token::LBrace,
                '}' => Token::RBrace,
                ':' => Token::Colon,
                ',' => Token::Comma,
                '.' => Token::Dot,
                '|' => Token::Pipe,
                '-' => Token::Minus,
                '=' => Token::Eq,
                '>' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        Token::Ge
                    } else {
                        Token::Gt
                    }
                }
                '<' => match cur.peek() {
                    Some('=') => {
                        cur.bump();
                        Token::Le
                    }
                    Some('>') => {
                        cur.bump();
                        Token::Neq
                    }
                    _ => Token::Lt,
                },
                _ => {
                    return Err(LexError {
                        pos,
                        snippet: cur.snippet(pos.offset),
                        message: format!("illegal character {c:?}"),
                    })
                }
            }
        };
        out.push(Spanned { token, pos });
    }
    Ok(out)
}

fn lex_number(cur: &mut Cursor<'_>, pos: Position) -> Result<Token, LexError> {
    let start = cur.offset;
    let digits = |cur: &mut Cursor<'_>| {
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    };
    digits(cur);
    let mut is_float = false;
    if cur.peek() == Some('.') && cur.peek2().is_some_and(|c| c.is_ascii_digit()) {
        is_float = true;
        cur.bump();
        digits(cur);
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let save = (cur.offset, cur.line, cur.column);
        cur.bump();
        if matches!(cur.peek(), Some('+' | '-')) {
            cur.bump();
        }
        if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            digits(cur);
        } else {
            (cur.offset, cur.line, cur.column) = save;
        }
    }
    if cur.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
        return Err(LexError {
            pos,
            snippet: cur.snippet(start),
            message: "malformed number".into(),
        });
    }
    let text = &cur.src[start..cur.offset];
    if is_float {
        text.parse().map(Token::Float).map_err(|_| LexError {
            pos,
            snippet: text.to_string(),
            message: "malformed float".into(),
        })
    } else {
        text.parse().map(Token::Int).map_err(|_| LexError {
            pos,
            snippet: text.to_string(),
            message: "integer out of range".into(),
        })
    }
}

fn lex_string(cur: &mut Cursor<'_>, pos: Position) -> Result<Token, LexError> {
    cur.bump();
    let mut s = String::new();
    loop {
        match cur.bump() {
            Some('"') => return Ok(Token::Str(s)),
            Some('\\') => match cur.bump() {
                Some('"') => s.push('"'),
                Some('\\') => s.push('\\'),
                Some('n') => s.push('\n'),
                Some('t') => s.push('\t'),
                Some('r') => s.push('\r'),
                other => {
                    return Err(LexError {
                        pos,
                        snippet: cur.snippet(pos.offset),
                        message: format!("bad escape {other:?}"),
                    })
                }
            },
            Some(c) => s.push(c),
            None => {
                return Err(LexError {
                    pos,
                    snippet: cur.snippet(pos.offset),
                    message: "unterminated string".into(),
                })
            }
        }
    }
}
