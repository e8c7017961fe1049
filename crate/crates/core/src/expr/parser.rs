//! Lexer and recursive-descent parser.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? number)?
//! atom  := number | 'x' digits | func '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x1^2` is `-(x1^2)`. The Unicode
//! minus sign `−` is accepted wherever `-` is.

use super::{Ast, BinOp, Func, ParseError};

/// Bound on the syntax-tree height: nesting of parentheses, calls, unary
/// minus and operator chains all count.
pub const MAX_DEPTH: usize = 512;

/// Bound on the height of the parsed tree. Printing adds at most two levels
/// of syntactic nesting per node, so every accepted tree re-parses.
pub const MAX_HEIGHT: usize = MAX_DEPTH / 2;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, ch)) = it.peek() {
        if ch.is_whitespace() {
            it.next();
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            it.next();
            out.push((pos, t));
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let mut end = pos;
            let bytes = src.as_bytes();
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = &src[pos..end];
            let value: f64 = text.parse().map_err(|_| ParseError::new(pos, "number", format!("'{text}'")))?;
            if !value.is_finite() {
                return Err(ParseError::new(pos, "finite number", format!("'{text}'")));
            }
            while it.peek().is_some_and(|&(p, _)| p < end) {
                it.next();
            }
            out.push((pos, Tok::Num(value)));
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut ident = String::new();
            while let Some(&(_, c)) = it.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Ident(ident)));
            continue;
        }
        return Err(ParseError::new(pos, "token", format!("'{ch}'")));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::new(self.offset(), expected, self.peek().describe())
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::new(self.offset(), "shallower nesting", format!("depth {}", self.depth)));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        let mut chain = 0;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => {
                    self.depth -= chain;
                    return Ok(lhs);
                }
            };
            self.bump();
            self.enter()?;
            chain += 1;
            let rhs = self.term()?;
            lhs = Ast::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        let mut chain = 0;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => {
                    self.depth -= chain;
                    return Ok(lhs);
                }
            };
            self.bump();
            self.enter()?;
            chain += 1;
            let rhs = self.unary()?;
            lhs = Ast::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Ast::Pow(Box::new(base), if negative { -v } else { v }))
            }
            _ => Err(self.error("number literal exponent")),
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Ast::Num(v))
            }
            Tok::LParen => {
                self.bump();
                self.enter()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.depth -= 1;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(k) = variable_index(&name) {
                    self.bump();
                    return match k {
                        Some(k) => Ok(Ast::Var(k)),
                        None => Err(ParseError::new(at, "variable index >= 1", format!("identifier '{name}'"))),
                    };
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(self.error("number, variable, function or '('"));
                };
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                self.enter()?;
                let mut args = vec![self.expr()?];
                if func.arity() == 2 {
                    self.expect(Tok::Comma, "','")?;
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen, "')'")?;
                self.depth -= 1;
                Ok(Ast::Call(func, args))
            }
            _ => Err(self.error("number, variable, function or '('")),
        }
    }
}

/// `Some(Some(k))` for `x<k>` with `k ≥ 1`, `Some(None)` for `x0` or an
/// out-of-range index, `None` when the identifier is not a variable.
fn variable_index(name: &str) -> Option<Option<usize>> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(digits.parse::<usize>().ok().filter(|k| (1..=1 << 20).contains(k)))
}

pub(super) fn parse_ast(src: &str) -> Result<Ast, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    let h = height(&ast);
    if h > MAX_HEIGHT {
        return Err(ParseError::new(0, "shallower expression tree", format!("height {h}")));
    }
    Ok(ast)
}

fn height(ast: &Ast) -> usize {
    1 + match ast {
        Ast::Num(_) | Ast::Var(_) => 0,
        Ast::Neg(a) | Ast::Pow(a, _) => height(a),
        Ast::Binary(_, a, b) => height(a).max(height(b)),
        Ast::Call(_, args) => args.iter().map(height).max().unwrap_or(0),
    }
}
