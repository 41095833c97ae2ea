//! User-defined means as expressions in `x` and `y`.
//!
//! Grammar, loosest to tightest: `+ -`, then `* /`, then unary minus, then
//! `^`. Binary operators of equal precedence associate to the left, `^`
//! included, so `2^3^2` is `(2^3)^2` and `-x^2` is `-(x^2)`. Calls:
//! `exp`, `log`, `sqrt` take one argument, `pow`, `min`, `max` take two.

use std::fmt;

use bisym_core::{Interval, Provenance, TwoPlaceFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
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

    /// Left binding power in the Pratt loop; the right operand is parsed at
    /// one more, which makes every operator left-associative.
    fn binding_power(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 3,
            BinOp::Pow => 7,
        }
    }
}

const PREFIX_MINUS_BP: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Pow,
    Min,
    Max,
}

impl Func {
    const ALL: [Func; 6] = [Func::Exp, Func::Log, Func::Sqrt, Func::Pow, Func::Min, Func::Max];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Pow => "pow",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Exp | Func::Log | Func::Sqrt => 1,
            Func::Pow | Func::Min | Func::Max => 2,
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, String> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Neg(e) => -e.eval(x, y)?,
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(x, y)?, r.eval(x, y)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(format!("division by zero in {self}")),
                    BinOp::Div => a / b,
                    BinOp::Pow => power(a, b)?,
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(x, y)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Log if a <= 0.0 => return Err(format!("log of non-positive {a}")),
                    Func::Log => a.ln(),
                    Func::Sqrt if a < 0.0 => return Err(format!("sqrt of negative {a}")),
                    Func::Sqrt => a.sqrt(),
                    Func::Pow => power(a, args[1].eval(x, y)?)?,
                    Func::Min => a.min(args[1].eval(x, y)?),
                    Func::Max => a.max(args[1].eval(x, y)?),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{self} is not finite at x={x}, y={y}"))
        }
    }

    /// Tightness used for printing: operands looser than their context get
    /// parentheses.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.binding_power(),
            Expr::Neg(_) => PREFIX_MINUS_BP,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => u8::MAX,
        }
    }
}

fn power(a: f64, b: f64) -> Result<f64, String> {
    if a == 0.0 && b < 0.0 {
        return Err(format!("0 raised to negative power {b}"));
    }
    let v = a.powf(b);
    if v.is_nan() {
        return Err(format!("{a}^{b} is undefined"));
    }
    Ok(v)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool| {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, e.precedence() < PREFIX_MINUS_BP)
            }
            Expr::Bin(op, l, r) => {
                let bp = op.binding_power();
                wrap(f, l, l.precedence() < bp)?;
                if *op == BinOp::Pow {
                    f.write_str("^")?;
                } else {
                    write!(f, " {} ", op.symbol())?;
                }
                wrap(f, r, r.precedence() <= bp)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Op(c) => write!(f, "`{c}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(src: &str, offset: usize, message: String, expected: &[&str]) -> ParseError {
    let (line, column) = position(src, offset);
    ParseError { line, column, message, expected: expected.iter().map(|s| s.to_string()).collect() }
}

const OPERAND: &[&str] = &["number", "x", "y", "function call", "`(`", "`-`"];
const OPERATOR: &[&str] = &["`+`", "`-`", "`*`", "`/`", "`^`"];

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                _ if c.is_ascii_whitespace() => i += 1,
                '0'..='9' | '.' => i = lx.number(i)?,
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let end = src[i..]
                        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                        .map_or(src.len(), |n| i + n);
                    lx.toks.push((Tok::Ident(src[i..end].to_string()), i));
                    i = end;
                }
                '+' | '-' | '*' | '/' | '^' => {
                    lx.toks.push((Tok::Op(c), i));
                    i += 1;
                }
                '(' | ')' | ',' => {
                    let t = match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Comma,
                    };
                    lx.toks.push((t, i));
                    i += 1;
                }
                _ => {
                    let ch = src[i..].chars().next().expect("inside the source");
                    let mut expected = OPERAND.to_vec();
                    expected.extend_from_slice(OPERATOR);
                    return Err(error_at(src, i, format!("unexpected character `{ch}`"), &expected));
                }
            }
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }

    fn number(&mut self, start: usize) -> Result<usize, ParseError> {
        let bytes = self.src.as_bytes();
        let digits = |mut i: usize| {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        let mut i = digits(start);
        if i < bytes.len() && bytes[i] == b'.' {
            i = digits(i + 1);
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            let end = digits(j);
            if end > j {
                i = end;
            }
        }
        let text = &self.src[start..i];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.toks.push((Tok::Num(v), start));
                Ok(i)
            }
            _ => Err(error_at(self.src, start, format!("malformed number `{text}`"), &["number"])),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, at: &(Tok, usize), message: String, expected: &[&str]) -> Result<T, ParseError> {
        Err(error_at(self.src, at.1, message, expected))
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.operand()?;
        loop {
            let op = match self.peek().0 {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                Tok::Op('^') => BinOp::Pow,
                _ => return Ok(lhs),
            };
            let bp = op.binding_power();
            if bp < min_bp {
                return Ok(lhs);
            }
            self.next();
            let rhs = self.expr(bp + 1)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn operand(&mut self) -> Result<Expr, ParseError> {
        let tok = self.next();
        match tok.0 {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Op('-') => Ok(Expr::Neg(Box::new(self.expr(PREFIX_MINUS_BP)?))),
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect_close(&["`)`", "operator"])?;
                Ok(e)
            }
            Tok::Ident(ref name) => {
                if self.peek().0 == Tok::LParen {
                    let Some(func) = Func::lookup(name) else {
                        let names: Vec<&str> = Func::ALL.iter().map(|f| f.name()).collect();
                        return self.fail(&tok, format!("unknown function `{name}`"), &names);
                    };
                    self.call(func, &tok)
                } else {
                    match name.as_str() {
                        "x" => Ok(Expr::Var(Var::X)),
                        "y" => Ok(Expr::Var(Var::Y)),
                        _ if Func::lookup(name).is_some() => {
                            self.fail(&tok, format!("function `{name}` needs arguments"), &["`(`"])
                        }
                        _ => self.fail(&tok, format!("unknown identifier `{name}`: only x and y are variables"), &["x", "y"]),
                    }
                }
            }
            _ => self.fail(&tok, format!("unexpected {}", tok.0), OPERAND),
        }
    }

    fn call(&mut self, func: Func, name_tok: &(Tok, usize)) -> Result<Expr, ParseError> {
        self.next();
        let mut args = Vec::new();
        if self.peek().0 != Tok::RParen {
            loop {
                args.push(self.expr(0)?);
                if self.peek().0 == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect_close(&["`)`", "`,`", "operator"])?;
        if args.len() != func.arity() {
            return self.fail(
                name_tok,
                format!("{} takes {} argument(s), got {}", func.name(), func.arity(), args.len()),
                &[],
            );
        }
        Ok(Expr::Call(func, args))
    }

    fn expect_close(&mut self, expected: &[&str]) -> Result<(), ParseError> {
        let tok = self.next();
        if tok.0 == Tok::RParen {
            Ok(())
        } else {
            self.fail(&tok, format!("unexpected {}", tok.0), expected)
        }
    }
}

/// A parsed mean expression together with its source.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanExpr {
    pub source: String,
    pub ast: Expr,
}

pub fn parse_mean_expr(source: &str) -> Result<MeanExpr, ParseError> {
    let toks = Lexer::run(source)?;
    let mut p = Parser { src: source, toks, pos: 0 };
    let ast = p.expr(0)?;
    let tok = p.next();
    if tok.0 != Tok::End {
        let mut expected = OPERATOR.to_vec();
        expected.push("end of input");
        return p.fail(&tok, format!("unexpected {}", tok.0), &expected);
    }
    Ok(MeanExpr { source: source.to_string(), ast })
}

impl MeanExpr {
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, String> {
        self.ast.eval(x, y)
    }

    pub fn into_function(self, domain: Interval) -> TwoPlaceFunction {
        let label = format!("expr:{}", self.source);
        let ast = self.ast;
        TwoPlaceFunction::fallible(domain, label, Provenance::Expression, move |x, y| ast.eval(x, y))
    }
}
