//! A small expression language for user-supplied coefficient functions and
//! chart guards.
//!
//! ```text
//! guard   := expr ('<' | '<=' | '>' | '>=') expr
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Names are chart coordinates, declared parameters and `pi`. Functions:
//! `sin cos tan cot sqrt exp log pow`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::jets::{Coords, Jet2, JetError, DIM};
use crate::scalar::Scalar;

pub const FUNCTIONS: [&str; 8] = ["sin", "cos", "tan", "cot", "sqrt", "exp", "log", "pow"];

/// Parse or resolution failure; `offset` is a byte offset into the source,
/// `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ExprError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ExprError {
    fn at(src: &str, offset: usize, message: impl Into<String>) -> Self {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Self { offset, line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Cmp(Comparison),
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Op(c) => write!(f, "`{c}`"),
            Tok::Cmp(c) => write!(f, "`{c}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
        })
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    i = k;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ExprError::at(src, start, format!("malformed number `{text}`")))?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '<' | '>' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                if eq {
                    i += 1;
                }
                Tok::Cmp(match (c, eq) {
                    ('<', false) => Comparison::Lt,
                    ('<', true) => Comparison::Le,
                    ('>', false) => Comparison::Gt,
                    _ => Comparison::Ge,
                })
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or(c);
                return Err(ExprError::at(src, start, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Ast {
    Num(f64),
    Name(String, usize),
    Neg(Box<Ast>),
    Bin(char, Box<Ast>, Box<Ast>),
    Call(String, usize, Vec<Ast>),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ExprError {
        ExprError::at(self.src, self.offset(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            lhs = Ast::Bin(c, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            lhs = Ast::Bin(c, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            return Ok(Ast::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Ast::Num(v))
            }
            Tok::Ident(name) => {
                let (_, at) = self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Ast::Name(name, at));
                }
                self.bump();
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`,` or `)`"));
                }
                self.bump();
                Ok(Ast::Call(name, at, args))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("a number, name or `(`")),
        }
    }
}

/// Names an expression may refer to.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    coordinates: Vec<String>,
    params: BTreeMap<String, f64>,
}

impl Scope {
    pub fn new(coordinates: &[String; DIM], params: &BTreeMap<String, f64>) -> Self {
        Self { coordinates: coordinates.to_vec(), params: params.clone() }
    }

    fn describe(&self) -> String {
        let mut names: Vec<&str> = self.coordinates.iter().map(String::as_str).collect();
        names.extend(self.params.keys().map(String::as_str));
        names.push("pi");
        names.join(", ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Cot,
    Sqrt,
    Exp,
    Log,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Coord(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

fn resolve(src: &str, ast: Ast, scope: &Scope) -> Result<Node, ExprError> {
    let r = |a: Ast| resolve(src, a, scope).map(Box::new);
    Ok(match ast {
        Ast::Num(v) => Node::Const(v),
        Ast::Name(n, at) => {
            if let Some(i) = scope.coordinates.iter().position(|c| *c == n) {
                Node::Coord(i)
            } else if let Some(v) = scope.params.get(&n) {
                Node::Const(*v)
            } else if n == "pi" {
                Node::Const(std::f64::consts::PI)
            } else if FUNCTIONS.contains(&n.as_str()) {
                return Err(ExprError::at(src, at, format!("function `{n}` needs an argument list")));
            } else {
                return Err(ExprError::at(src, at, format!("unknown identifier `{n}` (known: {})", scope.describe())));
            }
        }
        Ast::Neg(a) => Node::Neg(r(*a)?),
        Ast::Bin(op, a, b) => {
            let (a, b) = (r(*a)?, r(*b)?);
            match op {
                '+' => Node::Add(a, b),
                '-' => Node::Sub(a, b),
                '*' => Node::Mul(a, b),
                '/' => Node::Div(a, b),
                _ => Node::Pow(a, b),
            }
        }
        Ast::Call(name, at, args) => {
            let f = match name.as_str() {
                "sin" => Func::Sin,
                "cos" => Func::Cos,
                "tan" => Func::Tan,
                "cot" => Func::Cot,
                "sqrt" => Func::Sqrt,
                "exp" => Func::Exp,
                "log" => Func::Log,
                "pow" => Func::Pow,
                _ => {
                    return Err(ExprError::at(
                        src,
                        at,
                        format!("unknown function `{name}` (known: {})", FUNCTIONS.join(", ")),
                    ))
                }
            };
            let arity = if f == Func::Pow { 2 } else { 1 };
            if args.len() != arity {
                return Err(ExprError::at(src, at, format!("`{name}` takes {arity} argument(s), got {}", args.len())));
            }
            Node::Call(f, args.into_iter().map(|a| resolve(src, a, scope)).collect::<Result<_, _>>()?)
        }
    })
}

fn constant(n: &Node) -> Option<f64> {
    match n {
        Node::Const(v) => Some(*v),
        _ => None,
    }
}

fn has_coord(n: &Node) -> bool {
    match n {
        Node::Const(_) => false,
        Node::Coord(_) => true,
        Node::Neg(a) => has_coord(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            has_coord(a) || has_coord(b)
        }
        Node::Call(_, args) => args.iter().any(has_coord),
    }
}

/// Collapses coordinate-free subtrees so constant exponents stay on the
/// `powi`/`powf` path. Subtrees that fail to evaluate are left alone and
/// report their domain error at evaluation time.
fn fold(n: Node) -> Node {
    let f = |a: Box<Node>| Box::new(fold(*a));
    let n = match n {
        Node::Neg(a) => Node::Neg(f(a)),
        Node::Add(a, b) => Node::Add(f(a), f(b)),
        Node::Sub(a, b) => Node::Sub(f(a), f(b)),
        Node::Mul(a, b) => Node::Mul(f(a), f(b)),
        Node::Div(a, b) => Node::Div(f(a), f(b)),
        Node::Pow(a, b) => Node::Pow(f(a), f(b)),
        Node::Call(func, args) => Node::Call(func, args.into_iter().map(fold).collect()),
        other => other,
    };
    if !has_coord(&n) {
        if let Ok(v) = eval::<f64>(&n, &[Jet2::zero(); DIM]) {
            if v.value().is_finite() {
                return Node::Const(v.value());
            }
        }
    }
    n
}

fn pow<T: Scalar>(base: Jet2<T>, exponent: &Node, coords: &Coords<T>) -> Result<Jet2<T>, JetError> {
    if let Some(e) = constant(exponent) {
        if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
            return base.powi(e as i32);
        }
        return base.powf(T::lit(e));
    }
    Ok((base.ln()? * eval(exponent, coords)?).exp())
}

fn eval<T: Scalar>(n: &Node, c: &Coords<T>) -> Result<Jet2<T>, JetError> {
    Ok(match n {
        Node::Const(v) => Jet2::constant(T::lit(*v)),
        Node::Coord(i) => c[*i],
        Node::Neg(a) => -eval(a, c)?,
        Node::Add(a, b) => eval(a, c)? + eval(b, c)?,
        Node::Sub(a, b) => eval(a, c)? - eval(b, c)?,
        Node::Mul(a, b) => eval(a, c)? * eval(b, c)?,
        Node::Div(a, b) => eval(a, c)?.checked_div(&eval(b, c)?)?,
        Node::Pow(a, b) => pow(eval(a, c)?, b, c)?,
        Node::Call(f, args) => {
            let x = eval(&args[0], c)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan()?,
                Func::Cot => x.cot()?,
                Func::Sqrt => x.sqrt()?,
                Func::Exp => x.exp(),
                Func::Log => x.ln()?,
                Func::Pow => pow(x, &args[1], c)?,
            }
        }
    })
}

/// A parsed, name-resolved real expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(src: &str, scope: &Scope) -> Result<Self, ExprError> {
        let mut p = Parser { src, toks: tokenize(src)?, pos: 0 };
        let ast = p.expr()?;
        if *p.peek() != Tok::End {
            return Err(p.unexpected("an operator or end of input"));
        }
        Ok(Self { source: src.to_string(), root: fold(resolve(src, ast, scope)?) })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Value with exact first and second partials.
    pub fn eval<T: Scalar>(&self, coords: &Coords<T>) -> Result<Jet2<T>, JetError> {
        eval(&self.root, coords)?.finite_or("expression")
    }

    pub fn eval_value<T: Scalar>(&self, coords: &[T; DIM]) -> Result<T, JetError> {
        Ok(self.eval(&coords.map(Jet2::constant))?.value())
    }
}

/// `lhs ⋈ rhs`; a point satisfies the guard only if both sides evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardExpr {
    source: String,
    lhs: Expr,
    op: Comparison,
    rhs: Expr,
}

impl GuardExpr {
    pub fn parse(src: &str, scope: &Scope) -> Result<Self, ExprError> {
        let mut p = Parser { src, toks: tokenize(src)?, pos: 0 };
        let lhs = p.expr()?;
        let op = match *p.peek() {
            Tok::Cmp(op) => op,
            Tok::End => {
                return Err(ExprError::at(
                    src,
                    src.len(),
                    "guard is not boolean-valued: expected a comparison (<, <=, >, >=)",
                ))
            }
            _ => return Err(p.unexpected("a comparison")),
        };
        p.bump();
        let rhs = p.expr()?;
        if *p.peek() != Tok::End {
            return Err(p.unexpected("end of input"));
        }
        let wrap = |root| Expr { source: src.to_string(), root };
        Ok(Self {
            source: src.to_string(),
            lhs: wrap(fold(resolve(src, lhs, scope)?)),
            op,
            rhs: wrap(fold(resolve(src, rhs, scope)?)),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn holds<T: Scalar>(&self, coords: &[T; DIM]) -> bool {
        let (Ok(a), Ok(b)) = (self.lhs.eval_value(coords), self.rhs.eval_value(coords)) else {
            return false;
        };
        match self.op {
            Comparison::Lt => a < b,
            Comparison::Le => a <= b,
            Comparison::Gt => a > b,
            Comparison::Ge => a >= b,
        }
    }
}
