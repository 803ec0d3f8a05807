//! The `.msc` document language.
//!
//! ```text
//! chart extended n=2 N=1
//! let f = p1_1 * d(q) ^ d(x2)
//! let X = 1/2 * (@p1_1 ^ @x2 - @p1_2 ^ @x1)
//! gammaE 1 2 = x1*q
//! gammaTM 1 1 2 = x2
//! ```
//!
//! Expressions are checked for grading while they are parsed; every
//! definition is evaluated on the declared chart.

use std::collections::BTreeMap;
use std::fmt;

use msc_core::calculus::exterior_derivative;
use msc_core::connections::ConnectionData;
use msc_core::multiphase::{omega, sigma, theta};
use msc_core::{Chart, ChartKind, Form, Multivector, Rational, Scalar};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("line {line}, column {column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, columns {start}-{end}: grading error: {message}")]
    Grading { line: usize, start: usize, end: usize, message: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Theta,
    Omega,
    Sigma,
}

impl Builtin {
    fn name(self) -> &'static str {
        match self {
            Builtin::Theta => "theta",
            Builtin::Omega => "omega",
            Builtin::Sigma => "sigma",
        }
    }

    fn parse(name: &str) -> Option<Builtin> {
        [Builtin::Theta, Builtin::Omega, Builtin::Sigma].into_iter().find(|b| b.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Number(Rational),
    Coordinate(String),
    Vector(String),
    Builtin(Builtin),
    Ref(String),
    Differential(Box<Expr>),
    Neg(Box<Expr>),
    Power(Box<Expr>, u32),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Wedge(Box<Expr>, Box<Expr>),
}

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 4;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => SUM,
            Expr::Mul(..) | Expr::Wedge(..) => PRODUCT,
            Expr::Neg(_) => UNARY,
            _ => ATOM,
        }
    }

    fn render_at(&self, min: u8, out: &mut String) {
        let paren = self.precedence() < min;
        if paren {
            out.push('(');
        }
        match self {
            Expr::Number(r) => out.push_str(&r.to_string()),
            Expr::Coordinate(name) | Expr::Ref(name) => out.push_str(name),
            Expr::Vector(name) => {
                out.push('@');
                out.push_str(name);
            }
            Expr::Builtin(b) => out.push_str(b.name()),
            Expr::Differential(e) => {
                out.push_str("d(");
                e.render_at(SUM, out);
                out.push(')');
            }
            Expr::Neg(e) => {
                out.push('-');
                e.render_at(UNARY, out);
            }
            Expr::Power(e, k) => {
                e.render_at(ATOM, out);
                out.push_str(&format!("**{k}"));
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Wedge(a, b) => {
                let (op, level) = match self {
                    Expr::Add(..) => (" + ", SUM),
                    Expr::Sub(..) => (" - ", SUM),
                    Expr::Mul(..) => (" * ", PRODUCT),
                    _ => (" ^ ", PRODUCT),
                };
                a.render_at(level, out);
                out.push_str(op);
                b.render_at(level + 1, out);
            }
        }
        if paren {
            out.push(')');
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.render_at(SUM, &mut out);
        f.write_str(&out)
    }
}

/// An evaluated expression; degree-0 objects are always `Scalar`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(Scalar),
    Form(Form),
    Multivector(Multivector),
}

impl Value {
    fn from_form(f: Form) -> Value {
        match f.degree() {
            0 => Value::Scalar(f.as_scalar().unwrap_or_else(|| Scalar::zero(f.chart()))),
            _ => Value::Form(f),
        }
    }

    fn from_multivector(x: Multivector) -> Value {
        match x.degree() {
            0 => Value::Scalar(x.as_scalar().unwrap_or_else(|| Scalar::zero(x.chart()))),
            _ => Value::Multivector(x),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "function",
            Value::Form(_) => "form",
            Value::Multivector(_) => "multivector",
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Value::Scalar(_) => 0,
            Value::Form(f) => f.degree(),
            Value::Multivector(x) => x.degree(),
        }
    }

    /// The value as a form; functions become 0-forms.
    pub fn as_form(&self) -> Option<Form> {
        match self {
            Value::Scalar(s) => Some(Form::scalar(s.clone())),
            Value::Form(f) => Some(f.clone()),
            Value::Multivector(_) => None,
        }
    }

    /// The value as a multivector; functions become 0-multivectors.
    pub fn as_multivector(&self) -> Option<Multivector> {
        match self {
            Value::Scalar(s) => Some(Multivector::scalar(s.clone())),
            Value::Multivector(x) => Some(x.clone()),
            Value::Form(_) => None,
        }
    }

    fn scale(&self, s: &Scalar) -> Value {
        match self {
            Value::Scalar(t) => Value::Scalar(s * t),
            Value::Form(f) => Value::from_form(f.scale(s)),
            Value::Multivector(x) => Value::from_multivector(x.scale(s)),
        }
    }

    fn neg(&self) -> Value {
        match self {
            Value::Scalar(s) => Value::Scalar(-s),
            Value::Form(f) => Value::Form(-f),
            Value::Multivector(x) => Value::Multivector(-x),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(s) => write!(f, "{s}"),
            Value::Form(x) => write!(f, "{x}"),
            Value::Multivector(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Let { name: String, expr: Expr },
    /// `Gamma^i_mu`, 1-based indices.
    GammaE { i: usize, mu: usize, expr: Expr },
    /// `Gamma^kappa_{mu lambda}`, 1-based indices; also sets the symmetric entry.
    GammaTm { kappa: usize, mu: usize, lambda: usize, expr: Expr },
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Let { name, expr } => write!(f, "let {name} = {expr}"),
            Statement::GammaE { i, mu, expr } => write!(f, "gammaE {i} {mu} = {expr}"),
            Statement::GammaTm { kappa, mu, lambda, expr } => write!(f, "gammaTM {kappa} {mu} {lambda} = {expr}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Document {
    chart: Chart,
    statements: Vec<Statement>,
    values: BTreeMap<String, Value>,
    gamma_e: BTreeMap<(usize, usize), Scalar>,
    gamma_tm: BTreeMap<(usize, usize, usize), Scalar>,
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.statements == other.statements
    }
}

impl Eq for Document {}

pub fn chart_kind_name(kind: ChartKind) -> &'static str {
    match kind {
        ChartKind::Extended => "extended",
        ChartKind::Ordinary => "ordinary",
        ChartKind::Base => "base",
        ChartKind::Vertical => "VE",
        ChartKind::VerticalDual => "VstarE",
        ChartKind::Tangent => "piTM",
        ChartKind::Cotangent => "piTstarM",
        ChartKind::Volume => "piVolM",
        ChartKind::LinearJet => "JvecE",
        ChartKind::Jet => "JE",
    }
}

const KINDS: [ChartKind; 10] = [
    ChartKind::Extended,
    ChartKind::Ordinary,
    ChartKind::Base,
    ChartKind::Vertical,
    ChartKind::VerticalDual,
    ChartKind::Tangent,
    ChartKind::Cotangent,
    ChartKind::Volume,
    ChartKind::LinearJet,
    ChartKind::Jet,
];

impl Document {
    /// Empty document on a chart.
    pub fn new(chart: Chart) -> Document {
        Document {
            chart,
            statements: Vec::new(),
            values: BTreeMap::new(),
            gamma_e: BTreeMap::new(),
            gamma_tm: BTreeMap::new(),
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    /// Definitions in document order.
    pub fn definitions(&self) -> Vec<(&str, &Value)> {
        self.statements
            .iter()
            .filter_map(|s| match s {
                Statement::Let { name, .. } => Some((name.as_str(), &self.values[name])),
                _ => None,
            })
            .collect()
    }

    pub fn has_connection(&self) -> bool {
        !self.gamma_e.is_empty() || !self.gamma_tm.is_empty()
    }

    /// The connection given by the `gammaE` and `gammaTM` statements; missing entries are zero.
    pub fn connection(&self) -> msc_core::Result<ConnectionData> {
        let base = Chart::base(self.chart.n(), self.chart.fields())?;
        let (n, fields) = (base.n(), base.fields());
        let entry = |s: Option<&Scalar>| s.map(|s| s.transfer(base)).unwrap_or_else(|| Ok(Scalar::zero(base)));
        let gamma_e = (0..fields)
            .map(|i| (0..n).map(|mu| entry(self.gamma_e.get(&(i, mu)))).collect())
            .collect::<msc_core::Result<_>>()?;
        let gamma_tm = (0..n)
            .map(|k| {
                (0..n)
                    .map(|mu| (0..n).map(|l| entry(self.gamma_tm.get(&(k, mu, l)))).collect())
                    .collect()
            })
            .collect::<msc_core::Result<_>>()?;
        ConnectionData::new(base, gamma_e, gamma_tm)
    }

    pub fn render(&self) -> String {
        let mut out = format!("chart {} n={} N={}\n", chart_kind_name(self.chart.kind()), self.chart.n(), self.chart.fields());
        for s in &self.statements {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    /// Parse a single expression against this document's chart and definitions.
    pub fn eval_expr(&self, source: &str) -> Result<(Expr, Value), DslError> {
        let mut p = LineParser::new(source, 1, self);
        let (expr, value, _) = p.expr()?;
        p.skip_space();
        if !p.at_end() {
            return Err(p.syntax("unexpected trailing input"));
        }
        Ok((expr, value))
    }
}

pub fn parse(source: &str) -> Result<Document, DslError> {
    let mut doc: Option<Document> = None;
    for (k, raw) in source.lines().enumerate() {
        let line_no = k + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let Some(d) = doc.as_mut() else {
            doc = Some(Document::new(parse_chart_line(line, line_no)?));
            continue;
        };
        let (statement, value) = {
            let mut p = LineParser::new(line, line_no, d);
            p.statement()?
        };
        d.apply(statement, value, line_no)?;
    }
    doc.ok_or(DslError::Syntax { line: 1, column: 1, message: "missing chart declaration".into() })
}

fn parse_chart_line(line: &str, line_no: usize) -> Result<Chart, DslError> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let column = |w: usize| line.find(words[w]).map(|c| c + 1).unwrap_or(1);
    let syntax = |col: usize, message: String| DslError::Syntax { line: line_no, column: col, message };
    if words.first() != Some(&"chart") {
        return Err(syntax(1, "the document must start with `chart <kind> n=<int> N=<int>`".into()));
    }
    if words.len() != 4 {
        return Err(syntax(1, "expected `chart <kind> n=<int> N=<int>`".into()));
    }
    let kind = KINDS
        .into_iter()
        .find(|k| chart_kind_name(*k) == words[1])
        .ok_or_else(|| syntax(column(1), format!("unknown chart kind `{}`", words[1])))?;
    let number = |w: usize, key: &str| {
        words[w]
            .strip_prefix(key)
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| syntax(column(w), format!("expected `{key}<int>`")))
    };
    let (n, fields) = (number(2, "n=")?, number(3, "N=")?);
    Chart::new(kind, n, fields).map_err(|e| DslError::Semantic { line: line_no, message: e.to_string() })
}

impl Document {
    fn apply(&mut self, statement: Statement, value: Value, line: usize) -> Result<(), DslError> {
        let semantic = |message: String| DslError::Semantic { line, message };
        let (n, fields) = (self.chart.n(), self.chart.fields());
        match &statement {
            Statement::Let { name, .. } => {
                if self.values.contains_key(name) {
                    return Err(semantic(format!("`{name}` is already defined")));
                }
                self.values.insert(name.clone(), value.clone());
            }
            Statement::GammaE { i, mu, .. } => {
                if !(1..=fields).contains(i) || !(1..=n).contains(mu) {
                    return Err(semantic(format!("gammaE index out of range: {i} {mu}")));
                }
                let s = scalar_of(&value, line)?;
                if self.gamma_e.insert((i - 1, mu - 1), s).is_some() {
                    return Err(semantic(format!("gammaE {i} {mu} given twice")));
                }
            }
            Statement::GammaTm { kappa, mu, lambda, .. } => {
                if ![kappa, mu, lambda].iter().all(|v| (1..=n).contains(*v)) {
                    return Err(semantic(format!("gammaTM index out of range: {kappa} {mu} {lambda}")));
                }
                let s = scalar_of(&value, line)?;
                let (k, m, l) = (kappa - 1, mu - 1, lambda - 1);
                if self.gamma_tm.contains_key(&(k, m, l)) {
                    return Err(semantic(format!("gammaTM {kappa} {mu} {lambda} given twice")));
                }
                self.gamma_tm.insert((k, m, l), s.clone());
                self.gamma_tm.insert((k, l, m), s);
            }
        }
        self.statements.push(statement);
        Ok(())
    }

}

fn scalar_of(value: &Value, line: usize) -> Result<Scalar, DslError> {
    match value {
        Value::Scalar(s) => Ok(s.clone()),
        v => Err(DslError::Semantic { line, message: format!("connection entries must be functions, got a {}", v.kind()) }),
    }
}

struct LineParser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    doc: &'a Document,
}

type Parsed = (Expr, Value, (usize, usize));

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> LineParser<'a> {
    fn new(src: &'a str, line: usize, doc: &'a Document) -> LineParser<'a> {
        LineParser { src, pos: 0, line, doc }
    }

    fn chart(&self) -> Chart {
        self.doc.chart
    }

    fn syntax(&self, message: impl Into<String>) -> DslError {
        DslError::Syntax { line: self.line, column: self.pos + 1, message: message.into() }
    }

    fn grading(&self, span: (usize, usize), message: impl Into<String>) -> DslError {
        DslError::Grading { line: self.line, start: span.0 + 1, end: span.1, message: message.into() }
    }

    fn semantic(&self, message: impl Into<String>) -> DslError {
        DslError::Semantic { line: self.line, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_space(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_space();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), DslError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{token}`")))
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        self.skip_space();
        let start = self.pos;
        match self.peek() {
            Some(c) if is_ident_start(c) => {}
            _ => return Err(self.syntax("expected a name")),
        }
        while matches!(self.peek(), Some(c) if is_ident(c)) {
            self.pos += 1;
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn integer(&mut self) -> Result<usize, DslError> {
        self.skip_space();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| {
            self.pos = start;
            self.syntax("expected an integer")
        })
    }

    fn statement(&mut self) -> Result<(Statement, Value), DslError> {
        let start = self.pos;
        let keyword = self.ident()?;
        let statement = match keyword.as_str() {
            "let" => {
                let name_start = self.pos;
                let name = self.ident()?;
                if is_reserved(&name) || self.chart().lookup(&name).is_ok() {
                    self.pos = name_start;
                    self.skip_space();
                    return Err(self.syntax(format!("`{name}` is reserved")));
                }
                self.expect("=")?;
                let (expr, value, _) = self.expr()?;
                (Statement::Let { name, expr }, value)
            }
            "gammaE" => {
                let (i, mu) = (self.integer()?, self.integer()?);
                self.expect("=")?;
                let (expr, value, _) = self.expr()?;
                (Statement::GammaE { i, mu, expr }, value)
            }
            "gammaTM" => {
                let (kappa, mu, lambda) = (self.integer()?, self.integer()?, self.integer()?);
                self.expect("=")?;
                let (expr, value, _) = self.expr()?;
                (Statement::GammaTm { kappa, mu, lambda, expr }, value)
            }
            _ => {
                self.pos = start;
                self.skip_space();
                return Err(self.syntax(format!("unknown statement `{keyword}`")));
            }
        };
        self.skip_space();
        if !self.at_end() {
            return Err(self.syntax("unexpected trailing input"));
        }
        Ok(statement)
    }

    fn expr(&mut self) -> Result<Parsed, DslError> {
        let (mut expr, mut value, mut span) = self.product()?;
        loop {
            let minus = if self.eat("+") {
                false
            } else if self.eat("-") {
                true
            } else {
                return Ok((expr, value, span));
            };
            let (rhs, rv, rspan) = self.product()?;
            span = (span.0, rspan.1);
            value = self.add(&value, &rv, minus, span)?;
            expr = if minus { Expr::Sub(Box::new(expr), Box::new(rhs)) } else { Expr::Add(Box::new(expr), Box::new(rhs)) };
        }
    }

    fn add(&self, a: &Value, b: &Value, minus: bool, span: (usize, usize)) -> Result<Value, DslError> {
        let b = if minus { b.neg() } else { b.clone() };
        match (a, &b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
            (Value::Form(x), Value::Form(y)) if x.degree() == y.degree() => Ok(Value::from_form(x + y)),
            (Value::Multivector(x), Value::Multivector(y)) if x.degree() == y.degree() => Ok(Value::from_multivector(x + y)),
            _ => Err(self.grading(
                span,
                format!("cannot add a {} of degree {} and a {} of degree {}", a.kind(), a.degree(), b.kind(), b.degree()),
            )),
        }
    }

    fn product(&mut self) -> Result<Parsed, DslError> {
        let (mut expr, mut value, mut span) = self.unary()?;
        loop {
            let wedge = if self.eat("**") {
                return Err(self.syntax("`**` needs an integer exponent after an atom"));
            } else if self.eat("*") {
                false
            } else if self.eat("^") {
                true
            } else {
                return Ok((expr, value, span));
            };
            let (rhs, rv, rspan) = self.unary()?;
            span = (span.0, rspan.1);
            value = self.multiply(&value, &rv, wedge, span)?;
            expr = if wedge { Expr::Wedge(Box::new(expr), Box::new(rhs)) } else { Expr::Mul(Box::new(expr), Box::new(rhs)) };
        }
    }

    fn multiply(&self, a: &Value, b: &Value, wedge: bool, span: (usize, usize)) -> Result<Value, DslError> {
        match (a, b) {
            (Value::Scalar(s), v) | (v, Value::Scalar(s)) => Ok(v.scale(s)),
            (Value::Form(x), Value::Form(y)) if wedge => Ok(Value::from_form(x.wedge(y))),
            (Value::Multivector(x), Value::Multivector(y)) if wedge => Ok(Value::from_multivector(x.wedge(y))),
            _ if !wedge => Err(self.grading(span, "`*` needs a function factor; use `^` for the wedge product")),
            _ => Err(self.grading(span, "wedge of a form with a multivector")),
        }
    }

    fn unary(&mut self) -> Result<Parsed, DslError> {
        self.skip_space();
        let start = self.pos;
        if self.eat("-") {
            let (e, v, span) = self.unary()?;
            return Ok((Expr::Neg(Box::new(e)), v.neg(), (start, span.1)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Parsed, DslError> {
        let (expr, value, span) = self.atom()?;
        if !self.src[self.pos..].starts_with("**") {
            return Ok((expr, value, span));
        }
        self.pos += 2;
        let k = self.integer()?;
        let span = (span.0, self.pos);
        let Value::Scalar(s) = &value else {
            return Err(self.grading(span, format!("power of a {}", value.kind())));
        };
        let k = u32::try_from(k).map_err(|_| self.syntax("exponent too large"))?;
        Ok((Expr::Power(Box::new(expr), k), Value::Scalar(s.pow(k)), span))
    }

    fn number(&mut self) -> Result<Rational, DslError> {
        let num = self.integer()?;
        if self.src[self.pos..].starts_with('/') && self.src[self.pos + 1..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
            let den = self.integer()?;
            if den == 0 {
                return Err(self.syntax("division by zero"));
            }
            return Ok(Rational::new(num.into(), den.into()));
        }
        Ok(Rational::from_integer(num.into()))
    }

    fn coordinate(&mut self) -> Result<(String, usize), DslError> {
        self.skip_space();
        let start = self.pos;
        let name = self.ident()?;
        match self.chart().lookup(&name) {
            Ok(idx) => Ok((name, idx)),
            Err(_) => {
                self.pos = start;
                Err(self.syntax(format!("`{name}` is not a coordinate of {}", self.chart())))
            }
        }
    }

    fn atom(&mut self) -> Result<Parsed, DslError> {
        self.skip_space();
        let start = self.pos;
        let chart = self.chart();
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let (e, v, _) = self.expr()?;
                self.expect(")")?;
                Ok((e, v, (start, self.pos)))
            }
            Some('@') => {
                self.pos += 1;
                let (name, idx) = self.coordinate()?;
                Ok((Expr::Vector(name), Value::Multivector(Multivector::coordinate(chart, idx)), (start, self.pos)))
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.number()?;
                Ok((Expr::Number(r.clone()), Value::Scalar(Scalar::constant(chart, r)), (start, self.pos)))
            }
            Some(c) if is_ident_start(c) => {
                let name = self.ident()?;
                if name == "d" && self.src[self.pos..].starts_with('(') {
                    self.pos += 1;
                    let (e, v, inner) = self.expr()?;
                    self.expect(")")?;
                    let span = (start, self.pos);
                    let form = v.as_form().ok_or_else(|| self.grading(inner, "exterior derivative of a multivector"))?;
                    return Ok((Expr::Differential(Box::new(e)), Value::from_form(exterior_derivative(&form)), span));
                }
                let span = (start, self.pos);
                if let Ok(idx) = chart.lookup(&name) {
                    return Ok((Expr::Coordinate(name), Value::Scalar(Scalar::coordinate(chart, idx)), span));
                }
                if let Some(b) = Builtin::parse(&name) {
                    let value = match b {
                        Builtin::Theta => theta(chart).map(Value::from_form),
                        Builtin::Omega => omega(chart).map(Value::from_form),
                        Builtin::Sigma => sigma(chart).map(Value::from_multivector),
                    }
                    .map_err(|e| self.semantic(format!("`{name}`: {e}")))?;
                    return Ok((Expr::Builtin(b), value, span));
                }
                match self.doc.values.get(&name) {
                    Some(v) => Ok((Expr::Ref(name), v.clone(), span)),
                    None => {
                        self.pos = start;
                        Err(self.syntax(format!("unknown name `{name}`")))
                    }
                }
            }
            Some(c) => Err(self.syntax(format!("unexpected character `{c}`"))),
        }
    }
}

fn is_reserved(name: &str) -> bool {
    matches!(name, "let" | "d" | "chart" | "gammaE" | "gammaTM") || Builtin::parse(name).is_some()
}
