//! Field-spec strings such as `hsiang(d=2)`, `arg(lawson(p=1,q=2))` or
//! `expr: x3 - atan2(x2,x1)`, and the catalog of named constructions.
//!
//! ```text
//! spec  := 'expr' ('(' 'dim' '=' int ')')? ':' <expression>
//!        | name ('(' (arg (',' arg)*)? ')')?
//! arg   := (key '=')? value
//! value := number | complex | '[' value,* ']' | '"' spec '"' | spec
//! ```
//!
//! Names and keys are case-insensitive. A nested `expr:` must be quoted,
//! since it extends to the end of its string.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{self, ExprError};
use crate::fields::{self, FieldError, Phi, ScalarField, WeightSpec};
use crate::holo::{self, HoloField};
use crate::jordan::{self, JordanError};
use crate::verify::Target;

/// Bound on spec nesting.
pub const MAX_NESTING: usize = 64;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("at offset {offset}: expected {expected}, found {found}")]
    Syntax { offset: usize, expected: String, found: String },
    #[error("at offset {offset}: unknown field '{name}'")]
    UnknownName { offset: usize, name: String },
    #[error("at offset {offset}: {name} takes no argument '{key}'")]
    UnknownArg { offset: usize, name: String, key: String },
    #[error("at offset {offset}: {name} needs argument '{key}'")]
    MissingArg { offset: usize, name: String, key: String },
    #[error("at offset {offset}: {name}.{key}: {msg}")]
    BadArg { offset: usize, name: String, key: String, msg: String },
    #[error("at offset {offset}: {name} needs {expected}, got {got}")]
    Kind { offset: usize, name: String, expected: &'static str, got: &'static str },
    #[error("at offset {offset}: {source}")]
    Expr { offset: usize, source: ExprError },
    #[error("at offset {offset}: {source}")]
    Field { offset: usize, source: FieldError },
    #[error("at offset {offset}: {source}")]
    Jordan { offset: usize, source: JordanError },
}

impl SpecError {
    /// Byte offset into the spec string.
    pub fn offset(&self) -> usize {
        match self {
            SpecError::Syntax { offset, .. }
            | SpecError::UnknownName { offset, .. }
            | SpecError::UnknownArg { offset, .. }
            | SpecError::MissingArg { offset, .. }
            | SpecError::BadArg { offset, .. }
            | SpecError::Kind { offset, .. }
            | SpecError::Expr { offset, .. }
            | SpecError::Field { offset, .. }
            | SpecError::Jordan { offset, .. } => *offset,
        }
    }
}

/// Parsed spec before resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecNode {
    Call { offset: usize, name: String, args: Vec<Arg> },
    Expr { offset: usize, dim: Option<usize>, src: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub offset: usize,
    pub key: Option<String>,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Complex(Complex64),
    List(Vec<Value>),
    Spec(SpecNode),
}

impl SpecNode {
    pub fn offset(&self) -> usize {
        match self {
            SpecNode::Call { offset, .. } | SpecNode::Expr { offset, .. } => *offset,
        }
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:?}").trim_end_matches(".0").to_string()
}

impl fmt::Display for SpecNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecNode::Expr { dim: Some(n), src, .. } => write!(f, "expr(dim={n}): {src}"),
            SpecNode::Expr { dim: None, src, .. } => write!(f, "expr: {src}"),
            SpecNode::Call { name, args, .. } => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        if let Some(k) = &a.key {
                            write!(f, "{k}=")?;
                        }
                        write!(f, "{}", a.value)?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(v) => write!(f, "{}", fmt_num(*v)),
            Value::Complex(c) => {
                let im = if c.im < 0.0 { "-" } else { "+" };
                write!(f, "{}{im}{}i", fmt_num(c.re), fmt_num(c.im.abs()))
            }
            Value::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Value::Spec(s @ SpecNode::Expr { .. }) => write!(f, "\"{s}\""),
            Value::Spec(s) => write!(f, "{s}"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek().filter(|c| c.is_whitespace()) {
            self.pos += c.len_utf8();
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".into(),
        }
    }

    fn error(&self, expected: &str) -> SpecError {
        SpecError::Syntax { offset: self.pos, expected: expected.into(), found: self.found() }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SpecError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("'{c}'")))
        }
    }

    fn ident(&mut self) -> Result<(usize, String), SpecError> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return Err(self.error("name"));
        }
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-' || *c == '_') {
            self.pos += c.len_utf8();
        }
        Ok((start, self.src[start..self.pos].to_ascii_lowercase()))
    }

    fn enter(&mut self) -> Result<(), SpecError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error("shallower nesting"));
        }
        Ok(())
    }

    /// A spec occupying the rest of the input (top level or inside quotes).
    fn top(&mut self) -> Result<SpecNode, SpecError> {
        let node = self.spec(true)?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.error("end of input"));
        }
        Ok(node)
    }

    fn spec(&mut self, allow_expr: bool) -> Result<SpecNode, SpecError> {
        let (offset, name) = self.ident()?;
        if name == "expr" {
            self.skip_ws();
            if matches!(self.peek(), Some(':') | Some('(')) {
                if !allow_expr {
                    return Err(SpecError::Syntax {
                        offset,
                        expected: "quoted \"expr: ...\" inside arguments".into(),
                        found: "bare expr".into(),
                    });
                }
                return self.expr_spec(offset);
            }
        }
        let mut args = Vec::new();
        if self.eat('(') {
            self.enter()?;
            if !self.eat(')') {
                loop {
                    args.push(self.arg()?);
                    if self.eat(')') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            self.depth -= 1;
        }
        Ok(SpecNode::Call { offset, name, args })
    }

    fn expr_spec(&mut self, offset: usize) -> Result<SpecNode, SpecError> {
        let mut dim = None;
        if self.eat('(') {
            let (koff, key) = self.ident()?;
            if key != "dim" {
                return Err(SpecError::UnknownArg { offset: koff, name: "expr".into(), key });
            }
            self.expect('=')?;
            self.skip_ws();
            let at = self.pos;
            let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
            self.pos += digits.len();
            let n = digits.parse::<usize>().map_err(|_| SpecError::Syntax {
                offset: at,
                expected: "dimension".into(),
                found: self.found(),
            })?;
            dim = Some(n);
            self.expect(')')?;
        }
        self.expect(':')?;
        let src = self.rest().trim().to_string();
        self.pos = self.src.len();
        Ok(SpecNode::Expr { offset, dim, src })
    }

    fn arg(&mut self) -> Result<Arg, SpecError> {
        self.skip_ws();
        let offset = self.pos;
        // `key=` lookahead
        let save = self.pos;
        if let Ok((_, key)) = self.ident() {
            if self.eat('=') {
                let value = self.value()?;
                return Ok(Arg { offset, key: Some(key), value });
            }
        }
        self.pos = save;
        Ok(Arg { offset, key: None, value: self.value()? })
    }

    fn value(&mut self) -> Result<Value, SpecError> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                self.enter()?;
                let mut items = Vec::new();
                if !self.eat(']') {
                    loop {
                        items.push(self.value()?);
                        if self.eat(']') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                self.depth -= 1;
                Ok(Value::List(items))
            }
            Some('"') => {
                let open = self.pos;
                self.pos += 1;
                let Some(len) = self.rest().find('"') else {
                    return Err(SpecError::Syntax { offset: open, expected: "closing '\"'".into(), found: "end of input".into() });
                };
                let start = self.pos;
                let inner = &self.src[start..start + len];
                self.enter()?;
                let mut sub = Parser { src: inner, pos: 0, depth: self.depth };
                let node = sub.top().map_err(|e| shift(e, start))?;
                self.depth -= 1;
                self.pos = start + len + 1;
                Ok(Value::Spec(shift_node(node, start)))
            }
            Some(c) if c.is_ascii_digit() || matches!(c, '.' | '+' | '-' | '−') => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let save = self.pos;
                let (_, name) = self.ident()?;
                if name == "i" {
                    return Ok(Value::Complex(Complex64::new(0.0, 1.0)));
                }
                self.pos = save;
                self.enter()?;
                let node = self.spec(false)?;
                self.depth -= 1;
                Ok(Value::Spec(node))
            }
            _ => Err(self.error("value")),
        }
    }

    fn number(&mut self) -> Result<Value, SpecError> {
        let start = self.pos;
        let mut text = String::new();
        while let Some(c) = self.peek() {
            let c2 = if c == '−' { '-' } else { c };
            if c2.is_ascii_digit() || matches!(c2, '.' | '+' | '-' | 'e' | 'E' | 'i') {
                text.push(c2);
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        parse_number(&text).map_err(|_| SpecError::Syntax {
            offset: start,
            expected: "real or complex number".into(),
            found: format!("'{text}'"),
        })
    }
}

fn shift(e: SpecError, by: usize) -> SpecError {
    match e {
        SpecError::Syntax { offset, expected, found } => SpecError::Syntax { offset: offset + by, expected, found },
        SpecError::UnknownArg { offset, name, key } => SpecError::UnknownArg { offset: offset + by, name, key },
        other => other,
    }
}

fn shift_node(node: SpecNode, by: usize) -> SpecNode {
    match node {
        SpecNode::Expr { offset, dim, src } => SpecNode::Expr { offset: offset + by, dim, src },
        SpecNode::Call { offset, name, args } => SpecNode::Call {
            offset: offset + by,
            name,
            args: args
                .into_iter()
                .map(|a| Arg { offset: a.offset + by, key: a.key, value: shift_value(a.value, by) })
                .collect(),
        },
    }
}

fn shift_value(v: Value, by: usize) -> Value {
    match v {
        Value::Spec(s) => Value::Spec(shift_node(s, by)),
        Value::List(items) => Value::List(items.into_iter().map(|v| shift_value(v, by)).collect()),
        other => other,
    }
}

fn parse_real(s: &str) -> Result<f64, ()> {
    let v = match s {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => {
            if s.contains(['i', 'I']) || s.starts_with("+-") || s.starts_with("-+") {
                return Err(());
            }
            s.parse::<f64>().map_err(|_| ())?
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(())
    }
}

/// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
fn parse_number(text: &str) -> Result<Value, ()> {
    let Some(body) = text.strip_suffix('i') else {
        if text.is_empty() || text == "+" || text == "-" {
            return Err(());
        }
        return parse_real(text).map(Value::Real);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => {
            let re = &body[..k];
            if re.is_empty() || re == "+" || re == "-" {
                return Err(());
            }
            (parse_real(re)?, parse_real(&body[k..])?)
        }
        None => (0.0, parse_real(body)?),
    };
    Ok(Value::Complex(Complex64::new(re, im)))
}

/// Parses without resolving.
pub fn parse_spec(src: &str) -> Result<SpecNode, SpecError> {
    Parser { src, pos: 0, depth: 0 }.top()
}

/// Parses and resolves to a field.
pub fn resolve(src: &str) -> Result<Target, SpecError> {
    resolve_node(&parse_spec(src)?)
}

struct Args<'a> {
    name: &'a str,
    offset: usize,
    args: &'a [Arg],
    used: Vec<bool>,
}

impl<'a> Args<'a> {
    fn new(name: &'a str, offset: usize, args: &'a [Arg]) -> Self {
        Self { name, offset, args, used: vec![false; args.len()] }
    }

    /// Keyed lookup, falling back to the `pos`-th positional argument.
    fn get(&mut self, key: &str, pos: usize) -> Option<(&'a Value, usize)> {
        let keyed = self.args.iter().position(|a| a.key.as_deref() == Some(key));
        let idx = keyed.or_else(|| {
            self.args.iter().enumerate().filter(|(_, a)| a.key.is_none()).nth(pos).map(|(i, _)| i)
        })?;
        self.used[idx] = true;
        Some((&self.args[idx].value, self.args[idx].offset))
    }

    fn bad(&self, key: &str, offset: usize, msg: impl Into<String>) -> SpecError {
        SpecError::BadArg { offset, name: self.name.into(), key: key.into(), msg: msg.into() }
    }

    fn missing(&self, key: &str) -> SpecError {
        SpecError::MissingArg { offset: self.offset, name: self.name.into(), key: key.into() }
    }

    fn real(&mut self, key: &str, pos: usize, default: Option<f64>) -> Result<f64, SpecError> {
        match self.get(key, pos) {
            Some((Value::Real(v), _)) => Ok(*v),
            Some((Value::Complex(c), _)) if c.im == 0.0 => Ok(c.re),
            Some((_, off)) => Err(self.bad(key, off, "expected a real number")),
            None => default.ok_or_else(|| self.missing(key)),
        }
    }

    fn complex(&mut self, key: &str, pos: usize, default: Option<Complex64>) -> Result<Complex64, SpecError> {
        match self.get(key, pos) {
            Some((v, off)) => as_complex(v).ok_or_else(|| self.bad(key, off, "expected a number")),
            None => default.ok_or_else(|| self.missing(key)),
        }
    }

    fn int(&mut self, key: &str, pos: usize, default: Option<i64>) -> Result<i64, SpecError> {
        let Some((v, off)) = self.get(key, pos) else {
            return default.ok_or_else(|| self.missing(key));
        };
        let v = as_real(v).ok_or_else(|| self.bad(key, off, "expected an integer"))?;
        if v.fract() != 0.0 || v.abs() > 1e9 {
            return Err(self.bad(key, off, format!("expected an integer, got {v}")));
        }
        Ok(v as i64)
    }

    fn count(&mut self, key: &str, pos: usize, default: Option<usize>) -> Result<usize, SpecError> {
        let off = self.get(key, pos).map_or(self.offset, |(_, o)| o);
        let v = self.int(key, pos, default.map(|d| d as i64))?;
        usize::try_from(v).map_err(|_| self.bad(key, off, "expected a non-negative integer"))
    }

    fn list(&mut self, key: &str, pos: usize, default: Option<Vec<Value>>) -> Result<Vec<Value>, SpecError> {
        match self.get(key, pos) {
            Some((Value::List(items), _)) => Ok(items.clone()),
            Some((v @ (Value::Real(_) | Value::Complex(_)), _)) => Ok(vec![v.clone()]),
            Some((_, off)) => Err(self.bad(key, off, "expected a list")),
            None => default.ok_or_else(|| self.missing(key)),
        }
    }

    fn reals(&mut self, key: &str, pos: usize, default: Option<Vec<f64>>) -> Result<Vec<f64>, SpecError> {
        let off = self.get(key, pos).map_or(self.offset, |(_, o)| o);
        let items = self.list(key, pos, default.map(|d| d.into_iter().map(Value::Real).collect()))?;
        items.iter().map(|v| as_real(v).ok_or_else(|| self.bad(key, off, "expected real numbers"))).collect()
    }

    fn complexes(&mut self, key: &str, pos: usize, default: Option<Vec<Complex64>>) -> Result<Vec<Complex64>, SpecError> {
        let off = self.get(key, pos).map_or(self.offset, |(_, o)| o);
        let items = self.list(key, pos, default.map(|d| d.into_iter().map(Value::Complex).collect()))?;
        items.iter().map(|v| as_complex(v).ok_or_else(|| self.bad(key, off, "expected numbers"))).collect()
    }

    fn spec(&mut self, key: &str, pos: usize) -> Result<(Target, usize), SpecError> {
        match self.get(key, pos) {
            Some((Value::Spec(node), off)) => Ok((resolve_node(node)?, off)),
            Some((_, off)) => Err(self.bad(key, off, "expected a field spec")),
            None => Err(self.missing(key)),
        }
    }

    fn scalar(&mut self, key: &str, pos: usize) -> Result<ScalarField, SpecError> {
        let (t, off) = self.spec(key, pos)?;
        t.scalar().ok_or(SpecError::Kind { offset: off, name: self.name.into(), expected: "a scalar field", got: t.kind() })
    }

    fn holo(&mut self, key: &str, pos: usize) -> Result<HoloField, SpecError> {
        match self.spec(key, pos)? {
            (Target::Holo(h), _) => Ok(h),
            (t, off) => Err(SpecError::Kind { offset: off, name: self.name.into(), expected: "a holomorphic field", got: t.kind() }),
        }
    }

    fn ident(&mut self, key: &str, pos: usize, default: &str) -> Result<String, SpecError> {
        match self.get(key, pos) {
            Some((Value::Spec(SpecNode::Call { name, args, .. }), _)) if args.is_empty() => Ok(name.clone()),
            Some((_, off)) => Err(self.bad(key, off, "expected a name")),
            None => Ok(default.into()),
        }
    }

    fn finish(self) -> Result<(), SpecError> {
        match self.used.iter().position(|u| !u) {
            None => Ok(()),
            Some(i) => Err(SpecError::UnknownArg {
                offset: self.args[i].offset,
                name: self.name.into(),
                key: self.args[i].key.clone().unwrap_or_else(|| format!("#{}", i + 1)),
            }),
        }
    }
}

fn as_real(v: &Value) -> Option<f64> {
    match v {
        Value::Real(x) => Some(*x),
        Value::Complex(c) if c.im == 0.0 => Some(c.re),
        _ => None,
    }
}

fn as_complex(v: &Value) -> Option<Complex64> {
    match v {
        Value::Real(x) => Some(Complex64::new(*x, 0.0)),
        Value::Complex(c) => Some(*c),
        _ => None,
    }
}

fn resolve_node(node: &SpecNode) -> Result<Target, SpecError> {
    let (offset, name, args) = match node {
        SpecNode::Expr { offset, dim, src } => {
            let f = expr::parse_field(src, *dim).map_err(|source| SpecError::Expr { offset: *offset, source })?;
            return Ok(Target::Scalar(f));
        }
        SpecNode::Call { offset, name, args } => (*offset, name.as_str(), args.as_slice()),
    };
    let fe = |source: FieldError| SpecError::Field { offset, source };
    let je = |source: JordanError| SpecError::Jordan { offset, source };
    let mut a = Args::new(name, offset, args);
    let target = match name {
        "helicoid" => Target::Scalar(fields::helicoid()),
        "polar-angle" => {
            let n = a.count("n", 0, Some(2))?;
            let i = a.count("i", 1, Some(1))?;
            let j = a.count("j", 2, Some(2))?;
            let (c0, c1) = (a.real("a", 3, Some(0.0))?, a.real("b", 4, Some(1.0))?);
            if i == 0 || j == 0 {
                return Err(a.bad("i", offset, "indices start at 1"));
            }
            Target::Scalar(fields::polar_angle(n, i - 1, j - 1, c0, c1).map_err(fe)?)
        }
        "affine" => {
            let c0 = a.real("a", 0, Some(0.0))?;
            let b = a.reals("b", 1, Some(vec![1.0]))?;
            Target::Scalar(fields::affine(b.len(), c0, b).map_err(fe)?)
        }
        "atan-sum" => Target::Scalar(fields::atan_sum(&a.reals("p", 0, Some(vec![1.0, 2.0]))?).map_err(fe)?),
        "graph-lift" => Target::Scalar(fields::graph_lift_tan(&a.scalar("f", 0)?)),
        "compose" => {
            let phi = a.ident("phi", 0, "sin")?;
            let phi = Phi::parse(&phi).map_err(fe)?;
            Target::Scalar(fields::compose_scalar(phi, &a.scalar("u", 1)?))
        }
        "multiply" => {
            let v = a.scalar("v", 0)?;
            Target::Scalar(fields::multiply(&v, &a.scalar("u", 1)?).map_err(fe)?)
        }
        "twin-arctan" => {
            let (t, off) = a.spec("h", 0)?;
            let (u, v) = t.pair().ok_or(SpecError::Kind {
                offset: off,
                name: name.into(),
                expected: "a field pair or holomorphic field",
                got: t.kind(),
            })?;
            Target::Scalar(fields::twin_arctan(&u, &v).map_err(fe)?)
        }
        "superpose" => {
            let c0 = a.real("a", 0, Some(1.0))?;
            let f = a.scalar("f", 1)?;
            let c1 = a.real("b", 2, Some(1.0))?;
            let g = a.scalar("g", 3)?;
            Target::Scalar(fields::superpose(c0, &f, c1, &g))
        }
        "permute" => {
            let f = a.scalar("f", 0)?;
            let perm = a.reals("perm", 1, None)?;
            let perm: Option<Vec<usize>> =
                perm.iter().map(|&p| (p.fract() == 0.0 && p >= 1.0).then(|| p as usize - 1)).collect();
            let perm = perm.ok_or_else(|| a.bad("perm", offset, "expected indices starting at 1"))?;
            Target::Scalar(fields::permute(&f, perm).map_err(fe)?)
        }
        "pair" | "twins" => {
            let (t, off) = a.spec("u", 0)?;
            match (&t, a.get("v", 1).is_some()) {
                (Target::Holo(_) | Target::Pair(..), false) => {
                    Target::Pair(t.pair().expect("pair view").0, t.pair().expect("pair view").1)
                }
                (Target::Scalar(u), true) => Target::Pair(u.clone(), a.scalar("v", 1)?),
                _ => {
                    return Err(SpecError::Kind {
                        offset: off,
                        name: name.into(),
                        expected: "a holomorphic field or two scalar fields",
                        got: t.kind(),
                    })
                }
            }
        }
        "re" => Target::Scalar(holo::re_field(&a.holo("h", 0)?)),
        "im" => Target::Scalar(holo::im_field(&a.holo("h", 0)?)),
        "arg" => Target::Scalar(holo::arg_field(&a.holo("h", 0)?)),
        "arg-graph" => {
            let h = a.holo("h", 0)?;
            let t = fields::affine(1, 0.0, vec![1.0]).map_err(fe)?;
            let f = fields::superpose(-1.0, &holo::arg_field(&h), 1.0, &t);
            Target::Scalar(f.renamed(format!("arg-graph({})", h.name())))
        }
        "clifford-re" => Target::Scalar(holo::re_field(&holo::holo_clifford(a.count("m", 0, Some(2))?).map_err(fe)?)),
        "cylinder" => {
            let n = a.count("n", 0, Some(3))?;
            let src = if n >= 2 { "x1^2 + x2^2" } else { "" };
            let f = expr::parse_field(src, Some(n)).map_err(|source| SpecError::Expr { offset, source })?;
            Target::Scalar(f.renamed(format!("cylinder(n={n})")))
        }
        "clifford" => Target::Holo(holo::holo_clifford(a.count("m", 0, Some(2))?).map_err(fe)?),
        "lawson" => {
            let p = a.count("p", 0, Some(1))?;
            let q = a.count("q", 1, Some(2))?;
            let (p, q) = (u32::try_from(p).unwrap_or(u32::MAX), u32::try_from(q).unwrap_or(u32::MAX));
            Target::Holo(holo::holo_lawson(p, q).map_err(fe)?)
        }
        "monomial" => {
            let ks = a.reals("k", 0, None)?;
            let ks: Option<Vec<i32>> =
                ks.iter().map(|&k| (k.fract() == 0.0 && k.abs() <= 1e6).then_some(k as i32)).collect();
            let ks = ks.ok_or_else(|| a.bad("k", offset, "expected integer exponents"))?;
            Target::Holo(holo::holo_monomial(&ks).map_err(fe)?)
        }
        "det" => Target::Holo(holo::holo_det(a.count("k", 0, Some(2))?).map_err(fe)?),
        "exp" => Target::Holo(holo::holo_exp(a.real("p", 0, Some(1.0))?)),
        "binomial" => {
            let c0 = a.complex("a", 0, Some(Complex64::new(1.0, 0.0)))?;
            let c1 = a.complex("b", 1, Some(Complex64::new(0.0, 0.0)))?;
            let p = a.real("p", 2, Some(2.0))?;
            Target::Holo(holo::holo_binomial(c0, c1, p).map_err(fe)?)
        }
        "linear" => {
            let c = a.complexes("a", 0, Some(vec![Complex64::new(1.0, 0.0)]))?;
            let b = a.complex("b", 1, Some(Complex64::new(0.0, 0.0)))?;
            Target::Holo(holo::holo_linear(c, b).map_err(fe)?)
        }
        "power" => {
            let h = a.holo("h", 0)?;
            let c = a.complex("c", 1, Some(Complex64::new(1.0, 0.0)))?;
            let r = a.real("r", 2, Some(2.0))?;
            Target::Holo(holo::holo_power(&h, c, r))
        }
        "product" | "quotient" => {
            let h = a.holo("h", 0)?;
            let g = a.holo("g", 1)?;
            Target::Holo(if name == "product" { holo::holo_product(&h, &g) } else { holo::holo_quotient(&h, &g) })
        }
        "hsiang" => Target::Scalar(jordan::hsiang_field(a.count("d", 0, Some(1))?).map_err(je)?),
        "hsiang-raw" => Target::Scalar(jordan::hsiang_raw_field(a.count("d", 0, Some(1))?).map_err(je)?),
        "hsiang-holo" => Target::Holo(jordan::hsiang_holo(a.count("d", 0, Some(1))?).map_err(je)?),
        "f0-twins" => {
            let (u, v) = jordan::f0_complexified_twins();
            Target::Pair(u, v)
        }
        _ => return Err(SpecError::UnknownName { offset, name: name.into() }),
    };
    a.finish()?;
    Ok(target)
}

/// One listed construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub spec: &'static str,
    pub description: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { spec: "helicoid", description: "x3 - atan2(x2, x1), the helicoid as a perfectly harmonic level set" },
    CatalogEntry { spec: "polar-angle(n=2,i=1,j=2,a=0,b=1)", description: "a + b*atan2(x_j, x_i), perfectly harmonic" },
    CatalogEntry { spec: "affine(a=0,b=[1,2,3])", description: "a + b.x, hyperplanes" },
    CatalogEntry { spec: "atan-sum(p=[1,2])", description: "sum of p_k*atan2(y_k, x_k), perfectly harmonic" },
    CatalogEntry { spec: "graph-lift(affine(b=[1,1]))", description: "f(x) - atan2(t, s), zero set is t = s*tan f(x)" },
    CatalogEntry { spec: "superpose(a=1,f=helicoid,b=-1,g=polar-angle)", description: "a*f(x) + b*g(y) on disjoint variables" },
    CatalogEntry { spec: "compose(phi=sin,u=hsiang(d=1))", description: "phi(u), same zero set, chain law for the 1-Laplacian" },
    CatalogEntry { spec: "multiply(v=\"expr(dim=9): 2 + x1^2\",u=hsiang(d=1))", description: "u*v, minimal zero set of u kept" },
    CatalogEntry { spec: "twin-arctan(hsiang-holo(d=0))", description: "atan2(v, u) of an orthogonal twin-harmonic pair" },
    CatalogEntry { spec: "clifford(m=2)", description: "z1^2 + ... + z_m^2, Clifford cone, mu = 8" },
    CatalogEntry { spec: "clifford-re(m=2)", description: "Re of the Clifford quadric, a minimal cone" },
    CatalogEntry { spec: "lawson(p=2,q=3)", description: "z1^p z2^q, Lawson cones" },
    CatalogEntry { spec: "monomial(k=[1,-2,3])", description: "z1^k1 ... z_m^k_m" },
    CatalogEntry { spec: "det(k=3)", description: "determinant of a k x k complex matrix, Jacobi formula" },
    CatalogEntry { spec: "exp(p=1)", description: "e^(p z) on C" },
    CatalogEntry { spec: "binomial(a=1,b=0.5i,p=2)", description: "(a z + b)^p on C" },
    CatalogEntry { spec: "linear(a=[1,2i],b=0)", description: "a.z + b" },
    CatalogEntry { spec: "power(h=clifford(m=2),c=1,r=3)", description: "c*h^r, closed under the class" },
    CatalogEntry { spec: "product(h=clifford(m=2),g=det(k=2))", description: "h(z)*g(w) on disjoint variables" },
    CatalogEntry { spec: "quotient(h=lawson(p=1,q=2),g=exp(p=1))", description: "h(z)/g(w) on disjoint variables" },
    CatalogEntry { spec: "re(det(k=2))", description: "Re h, one half of a twin-harmonic pair" },
    CatalogEntry { spec: "im(det(k=2))", description: "Im h, one half of a twin-harmonic pair" },
    CatalogEntry { spec: "arg(lawson(p=1,q=2))", description: "arg h, perfectly harmonic" },
    CatalogEntry { spec: "arg-graph(lawson(p=1,q=2))", description: "t - arg h(z), a minimal graph" },
    CatalogEntry { spec: "twins(det(k=2))", description: "(Re h, Im h) as an orthogonal twin-harmonic pair" },
    CatalogEntry { spec: "hsiang(d=0)", description: "Hsiang eigencubic, b-orthonormal chart, lambda = -1/2" },
    CatalogEntry { spec: "hsiang(d=1)", description: "Hsiang eigencubic, b-orthonormal chart, lambda = -1/2" },
    CatalogEntry { spec: "hsiang(d=2)", description: "Hsiang eigencubic, b-orthonormal chart, lambda = -1/2" },
    CatalogEntry { spec: "hsiang(d=4)", description: "Hsiang eigencubic, b-orthonormal chart, lambda = -1/2" },
    CatalogEntry { spec: "hsiang-raw(d=1)", description: "Hsiang cubic in matrix coordinates, lambda = -4" },
    CatalogEntry { spec: "hsiang-holo(d=0)", description: "complexified Hsiang cubic, mu = |z|^2/2" },
    CatalogEntry { spec: "f0-twins", description: "explicit twin pair in R^6, both with lambda = -2" },
    CatalogEntry { spec: "cylinder(n=3)", description: "x1^2 + x2^2, level 1 is a non-minimal cylinder" },
    CatalogEntry { spec: "expr: x3 - atan2(x2,x1)", description: "user expression in x1, x2, ..." },
];

fn weight_label(t: &Target) -> String {
    match t {
        Target::Holo(_) => "holomorphic".into(),
        Target::Pair(u, _) => format!("pair, {}", u.weight().map_or("none".into(), |w| w.to_string())),
        Target::Scalar(f) => f.weight().map_or("none".into(), |w: WeightSpec| w.to_string()),
    }
}

/// Text listing: spec, real dimension, default weight, description.
pub fn catalog_listing() -> String {
    let mut out = String::new();
    for e in CATALOG {
        let t = resolve(e.spec).expect("catalog specs resolve");
        out.push_str(&format!("{}  N={}  weight={}  {}\n", e.spec, t.dim(), weight_label(&t), e.description));
    }
    out
}
