//! Expressions of one variable, parsed once and evaluated as Taylor jets.
//!
//! Grammar (conventional precedence, `^` binds tightest and is
//! right-associative, no implicit multiplication):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | name | name '(' expr ')' | '(' expr ')'
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::jet::Jet3;

/// Built-in one-argument functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sech,
    Sqrt,
    Asin,
    Atan,
    Exp,
    Log,
}

impl Func {
    pub const ALL: [Func; 12] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sech,
        Func::Sqrt,
        Func::Asin,
        Func::Atan,
        Func::Exp,
        Func::Log,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sech => "sech",
            Func::Sqrt => "sqrt",
            Func::Asin => "asin",
            Func::Atan => "atan",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: Jet3) -> Result<Jet3, EvalError> {
        let domain = |ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(EvalError::Domain { func: self.name(), arg: x.d0 })
            }
        };
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Sech => x.sech(),
            Func::Exp => x.exp(),
            Func::Atan => x.atan(),
            Func::Sqrt => {
                domain(x.d0 >= 0.0)?;
                if x.d0 == 0.0 {
                    // sqrt of an identically zero subexpression is fine, otherwise the
                    // derivative is singular.
                    domain(x.is_constant())?;
                    Jet3::constant(0.0)
                } else {
                    x.sqrt()
                }
            }
            Func::Log => {
                domain(x.d0 > 0.0)?;
                x.ln()
            }
            Func::Asin => {
                domain(x.d0.abs() <= 1.0)?;
                if x.d0.abs() == 1.0 {
                    domain(x.is_constant())?;
                    Jet3::constant(x.d0.asin())
                } else {
                    x.asin()
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Number(f64),
    Variable,
    /// Index into the expression's parameter table.
    Parameter(usize),
    Pi,
    E,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// AST node with the byte span it was parsed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub span: Range<usize>,
}

impl Node {
    fn new(kind: NodeKind, span: Range<usize>) -> Self {
        Self { kind, span }
    }

    /// Structural equality ignoring spans.
    pub fn same_shape(&self, other: &Node) -> bool {
        use NodeKind::*;
        match (&self.kind, &other.kind) {
            (Number(a), Number(b)) => a.to_bits() == b.to_bits(),
            (Variable, Variable) | (Pi, Pi) | (E, E) => true,
            (Parameter(a), Parameter(b)) => a == b,
            (Neg(a), Neg(b)) => a.same_shape(b),
            (Binary(o1, a1, b1), Binary(o2, a2, b2)) => o1 == o2 && a1.same_shape(a2) && b1.same_shape(b2),
            (Call(f1, a1), Call(f2, a2)) => f1 == f2 && a1.same_shape(a2),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptySource,
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
    InvalidNumber(String),
    UnknownIdentifier(String),
    Arity { func: String, expected: usize, found: usize },
    ReservedName(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::EmptySource => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "unexpected `{found}`, expected {expected}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => write!(f, "unexpected end of input, expected {expected}"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number literal `{s}`"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::Arity { func, expected, found } => {
                write!(f, "`{func}` takes {expected} argument(s), got {found}")
            }
            ParseErrorKind::ReservedName(s) => write!(f, "`{s}` is reserved and cannot name a parameter"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{func} is undefined at {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("parameter `{0}` has no value")]
    UnboundParameter(String),
    #[error("non-finite result at t = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => x.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Op(c) => c.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Range<usize>)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError { kind: ParseErrorKind::InvalidNumber(text.to_string()), offset: start })?;
                out.push((Tok::Num(value), start..i));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start..i));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                out.push((Tok::Op(c as char), start..i));
            }
            b'(' => {
                i += 1;
                out.push((Tok::LParen, start..i));
            }
            b')' => {
                i += 1;
                out.push((Tok::RParen, start..i));
            }
            b',' => {
                i += 1;
                out.push((Tok::Comma, start..i));
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(ch), offset: start });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Range<usize>)>,
    pos: usize,
    end: usize,
    variable: &'a str,
    params: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<(Tok, Range<usize>)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err_here(&self, expected: &'static str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((t, s)) => {
                ParseError { kind: ParseErrorKind::UnexpectedToken { found: t.describe(), expected }, offset: s.start }
            }
            None => ParseError { kind: ParseErrorKind::UnexpectedEnd { expected }, offset: self.end },
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.start..rhs.span.end;
            lhs = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.start..rhs.span.end;
            lhs = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                let (_, s) = self.bump().unwrap();
                let inner = self.unary()?;
                let span = s.start..inner.span.end;
                Ok(Node::new(NodeKind::Neg(Box::new(inner)), span))
            }
            Some(Tok::Op('+')) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let exp = self.unary()?;
            let span = base.span.start..exp.span.end;
            return Ok(Node::new(NodeKind::Binary(BinOp::Pow, Box::new(base), Box::new(exp)), span));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let Some((tok, span)) = self.toks.get(self.pos).cloned() else {
            return Err(self.err_here("an operand"));
        };
        match tok {
            Tok::Num(x) => {
                self.pos += 1;
                Ok(Node::new(NodeKind::Number(x), span))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, close)) => Ok(Node { span: span.start..close.end, ..inner }),
                    _ => {
                        self.pos -= 1;
                        Err(self.err_here("`)`"))
                    }
                }
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(func) = Func::from_name(&name) {
                    return self.call(func, span);
                }
                let kind = if name == self.variable {
                    NodeKind::Variable
                } else if let Some(i) = self.params.iter().position(|p| *p == name) {
                    NodeKind::Parameter(i)
                } else if name == "pi" {
                    NodeKind::Pi
                } else if name == "e" {
                    NodeKind::E
                } else {
                    return Err(ParseError { kind: ParseErrorKind::UnknownIdentifier(name), offset: span.start });
                };
                Ok(Node::new(kind, span))
            }
            _ => Err(self.err_here("an operand")),
        }
    }

    fn call(&mut self, func: Func, name_span: Range<usize>) -> Result<Node, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
            }
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::Arity { func: func.name().into(), expected: 1, found: 0 },
                    offset: name_span.start,
                })
            }
        }
        if let Some(Tok::RParen) = self.peek() {
            return Err(ParseError {
                kind: ParseErrorKind::Arity { func: func.name().into(), expected: 1, found: 0 },
                offset: name_span.start,
            });
        }
        let arg = self.expr()?;
        let mut extra = 0;
        while let Some(Tok::Comma) = self.peek() {
            self.bump();
            self.expr()?;
            extra += 1;
        }
        if extra > 0 {
            return Err(ParseError {
                kind: ParseErrorKind::Arity { func: func.name().into(), expected: 1, found: 1 + extra },
                offset: name_span.start,
            });
        }
        match self.bump() {
            Some((Tok::RParen, close)) => {
                Ok(Node::new(NodeKind::Call(func, Box::new(arg)), name_span.start..close.end))
            }
            _ => {
                self.pos -= 1;
                Err(self.err_here("`)`"))
            }
        }
    }
}

/// A parsed expression in one variable plus named parameters.
///
/// Immutable after parsing; evaluation takes `&self` and is reentrant.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    source: String,
    variable: String,
    param_names: Vec<String>,
    /// Default values declared at parse time (`None` = must be bound at evaluation).
    param_defaults: Vec<Option<f64>>,
}

pub const DEFAULT_VARIABLE: &str = "t";

fn is_reserved(name: &str) -> bool {
    Func::from_name(name).is_some() || name == "pi" || name == "e"
}

impl Expression {
    /// Parse `source` in the variable `t` with parameters declared by `parameters`
    /// (their values become defaults for evaluation).
    pub fn parse(source: &str, parameters: &BTreeMap<String, f64>) -> Result<Self, ParseError> {
        let decl: Vec<(String, Option<f64>)> = parameters.iter().map(|(k, v)| (k.clone(), Some(*v))).collect();
        Self::parse_with(source, DEFAULT_VARIABLE, &decl)
    }

    /// Parse with an explicit variable name and parameter declarations.
    pub fn parse_with(source: &str, variable: &str, parameters: &[(String, Option<f64>)]) -> Result<Self, ParseError> {
        if source.trim().is_empty() {
            return Err(ParseError { kind: ParseErrorKind::EmptySource, offset: 0 });
        }
        for name in std::iter::once(variable).chain(parameters.iter().map(|(n, _)| n.as_str())) {
            if is_reserved(name) {
                return Err(ParseError { kind: ParseErrorKind::ReservedName(name.to_string()), offset: 0 });
            }
        }
        let param_names: Vec<String> = parameters.iter().map(|(n, _)| n.clone()).collect();
        let toks = lex(source)?;
        let mut p = Parser { toks, pos: 0, end: source.len(), variable, params: &param_names };
        let root = p.expr()?;
        if p.pos < p.toks.len() {
            return Err(p.err_here("an operator or end of input"));
        }
        Ok(Self {
            root,
            source: source.to_string(),
            variable: variable.to_string(),
            param_defaults: parameters.iter().map(|(_, v)| *v).collect(),
            param_names,
        })
    }

    /// Convenience: parse an expression of `t` without parameters.
    pub fn of_t(source: &str) -> Result<Self, ParseError> {
        Self::parse(source, &BTreeMap::new())
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.param_names
    }

    /// Parameters actually referenced in the tree.
    pub fn free_parameters(&self) -> Vec<&str> {
        fn walk(n: &Node, used: &mut Vec<usize>) {
            match &n.kind {
                NodeKind::Parameter(i) if !used.contains(i) => used.push(*i),
                NodeKind::Neg(a) | NodeKind::Call(_, a) => walk(a, used),
                NodeKind::Binary(_, a, b) => {
                    walk(a, used);
                    walk(b, used);
                }
                _ => {}
            }
        }
        let mut used = Vec::new();
        walk(&self.root, &mut used);
        used.sort_unstable();
        used.into_iter().map(|i| self.param_names[i].as_str()).collect()
    }

    /// Whether the variable occurs in the tree.
    pub fn uses_variable(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match &n.kind {
                NodeKind::Variable => true,
                NodeKind::Neg(a) | NodeKind::Call(_, a) => walk(a),
                NodeKind::Binary(_, a, b) => walk(a) || walk(b),
                _ => false,
            }
        }
        walk(&self.root)
    }

    fn resolve(&self, bindings: &BTreeMap<String, f64>) -> Result<Vec<f64>, EvalError> {
        self.param_names
            .iter()
            .zip(&self.param_defaults)
            .map(|(name, default)| {
                bindings.get(name).copied().or(*default).ok_or_else(|| EvalError::UnboundParameter(name.clone()))
            })
            .collect()
    }

    /// Value and first three derivatives at `t`. `bindings` override parse-time defaults.
    pub fn eval_jet(&self, t: f64, bindings: &BTreeMap<String, f64>) -> Result<Jet3, EvalError> {
        let values = self.resolve(bindings)?;
        self.eval_resolved(t, &values)
    }

    /// Evaluation with parameter values already resolved in declaration order.
    pub fn eval_resolved(&self, t: f64, values: &[f64]) -> Result<Jet3, EvalError> {
        let j = eval_node(&self.root, t, values)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(EvalError::NonFinite(t))
        }
    }

    pub fn eval(&self, t: f64, bindings: &BTreeMap<String, f64>) -> Result<f64, EvalError> {
        self.eval_jet(t, bindings).map(|j| j.d0)
    }

    /// Resolve bindings once for repeated evaluation.
    pub fn bind(&self, bindings: &BTreeMap<String, f64>) -> Result<Vec<f64>, EvalError> {
        self.resolve(bindings)
    }
}

fn eval_node(n: &Node, t: f64, params: &[f64]) -> Result<Jet3, EvalError> {
    Ok(match &n.kind {
        NodeKind::Number(x) => Jet3::constant(*x),
        NodeKind::Variable => Jet3::variable(t),
        NodeKind::Parameter(i) => Jet3::constant(params[*i]),
        NodeKind::Pi => Jet3::constant(std::f64::consts::PI),
        NodeKind::E => Jet3::constant(std::f64::consts::E),
        NodeKind::Neg(a) => -eval_node(a, t, params)?,
        NodeKind::Call(f, a) => f.apply(eval_node(a, t, params)?)?,
        NodeKind::Binary(op, a, b) => {
            let x = eval_node(a, t, params)?;
            let y = eval_node(b, t, params)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.d0 == 0.0 {
                        return Err(EvalError::Domain { func: "division", arg: 0.0 });
                    }
                    x / y
                }
                BinOp::Pow => power(x, y)?,
            }
        }
    })
}

const MAX_INTEGER_EXPONENT: f64 = 1024.0;

fn power(base: Jet3, exponent: Jet3) -> Result<Jet3, EvalError> {
    if exponent.is_constant() && exponent.d0.fract() == 0.0 && exponent.d0.abs() <= MAX_INTEGER_EXPONENT {
        let n = exponent.d0 as i32;
        if n < 0 && base.d0 == 0.0 {
            return Err(EvalError::Domain { func: "pow", arg: 0.0 });
        }
        return Ok(base.powi(n));
    }
    if base.d0 <= 0.0 {
        return Err(EvalError::Domain { func: "pow", arg: base.d0 });
    }
    Ok((exponent * base.ln()).exp())
}

fn write_number(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // Debug keeps a decimal point or exponent and round-trips exactly.
    write!(f, "{x:?}")
}

struct Printer<'a> {
    node: &'a Node,
    expr: &'a Expression,
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |node| Printer { node, expr: self.expr };
        match &self.node.kind {
            NodeKind::Number(x) => write_number(f, *x),
            NodeKind::Variable => f.write_str(&self.expr.variable),
            NodeKind::Parameter(i) => f.write_str(&self.expr.param_names[*i]),
            NodeKind::Pi => f.write_str("pi"),
            NodeKind::E => f.write_str("e"),
            NodeKind::Neg(a) => write!(f, "(-{})", sub(a)),
            NodeKind::Call(func, a) => write!(f, "{}({})", func.name(), sub(a)),
            NodeKind::Binary(op, a, b) => write!(f, "({} {} {})", sub(a), op.symbol(), sub(b)),
        }
    }
}

/// Fully parenthesized rendering; parsing it back yields the same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer { node: &self.root, expr: self }.fmt(f)
    }
}
