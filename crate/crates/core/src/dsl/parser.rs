//! Tokenizer and precedence-climbing parser.

use std::fmt;

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
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

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    /// `abs_smooth(u)` or `abs_smooth(u, δ)`: `sqrt(u² + δ²) - δ`
    AbsSmooth,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::AbsSmooth => "abs_smooth",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs_smooth" => Func::AbsSmooth,
            _ => return None,
        })
    }

    fn arity(self) -> (usize, usize) {
        match self {
            Func::AbsSmooth => (1, 2),
            _ => (1, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(f64),
    /// The gradient magnitude `t`.
    T,
    /// Coordinate `x_{k+1}` (zero-based index).
    X(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    /// `name(x)`, bound to a coefficient field at evaluation time.
    Coef(String),
}

/// AST node. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn num(v: f64) -> Self {
        Expr::new(ExprKind::Num(v))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Bin(op, Box::new(l), Box::new(r)))
    }

    /// Visits every node, parents first.
    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Neg(e) => e.walk(f),
            ExprKind::Bin(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            ExprKind::Call(_, args) => args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }

    /// Names of all coefficient references.
    pub fn coefficient_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::Coef(name) = &e.kind {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        });
        out
    }

    /// Largest coordinate index used, plus one.
    pub fn max_coordinate(&self) -> usize {
        let mut m = 0;
        self.walk(&mut |e| {
            if let ExprKind::X(k) = e.kind {
                m = m.max(k + 1);
            }
        });
        m
    }
}

/// Fully parenthesized form that reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(v) => write!(f, "{v:?}"),
            ExprKind::T => f.write_str("t"),
            ExprKind::X(k) => write!(f, "x{}", k + 1),
            ExprKind::Neg(e) => write!(f, "(-{e})"),
            ExprKind::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            ExprKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            ExprKind::Coef(name) => write!(f, "{name}(x)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    Arity,
}

/// Parse diagnostic with byte offset and the set of tokens that would have fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// 1-based line and column of a byte offset.
pub(crate) fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    (line, col)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(BinOp),
    LParen,
    RParen,
    Comma,
    End,
}

struct Token {
    tok: Tok,
    span: Span,
}

const OPERAND: &[&str] = &["number", "identifier", "'('", "'-'"];

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, kind: ParseErrorKind, offset: usize, message: String, expected: Vec<&'static str>) -> ParseError {
        let (line, col) = line_col(self.text, offset);
        ParseError {
            kind,
            offset,
            line,
            col,
            message,
            expected,
        }
    }

    fn tokenize(text: &'a str) -> Result<Self, ParseError> {
        let mut p = Parser {
            text,
            tokens: Vec::new(),
            pos: 0,
        };
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            let tok = match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'+' => Tok::Op(BinOp::Add),
                b'-' => Tok::Op(BinOp::Sub),
                b'*' => Tok::Op(BinOp::Mul),
                b'/' => Tok::Op(BinOp::Div),
                b'^' => Tok::Op(BinOp::Pow),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
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
                    let s = &text[start..i];
                    let v: f64 = s.parse().map_err(|_| {
                        p.error(ParseErrorKind::Syntax, start, format!("malformed number `{s}`"), vec!["number"])
                    })?;
                    p.tokens.push(Token {
                        tok: Tok::Num(v),
                        span: Span { start, end: i },
                    });
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    p.tokens.push(Token {
                        tok: Tok::Ident(text[start..i].to_string()),
                        span: Span { start, end: i },
                    });
                    continue;
                }
                _ => {
                    let ch = text[start..].chars().next().unwrap_or('?');
                    return Err(p.error(ParseErrorKind::Syntax, start, format!("unexpected character `{ch}`"), OPERAND.to_vec()));
                }
            };
            i += 1;
            p.tokens.push(Token {
                tok,
                span: Span { start, end: i },
            });
        }
        p.tokens.push(Token {
            tok: Tok::End,
            span: Span {
                start: text.len(),
                end: text.len(),
            },
        });
        Ok(p)
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(op) => format!("`{}`", op.symbol()),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        let t = self.peek();
        self.error(
            ParseErrorKind::Syntax,
            t.span.start,
            format!("unexpected {}", Self::describe(&t.tok)),
            expected,
        )
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op(op) if op.precedence() >= min_prec => op,
                _ => return Ok(lhs),
            };
            self.next();
            let next_min = if op == BinOp::Pow { op.precedence() } else { op.precedence() + 1 };
            let rhs = self.binary(next_min)?;
            let span = Span {
                start: lhs.span.start,
                end: rhs.span.end,
            };
            lhs = Expr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    /// Unary minus binds tighter than `*` but looser than `^`.
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Op(BinOp::Sub) {
            let start = self.next().span.start;
            let inner = self.binary(BinOp::Pow.precedence())?;
            let span = Span {
                start,
                end: inner.span.end,
            };
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Token { tok, span } = {
            let t = self.peek();
            Token {
                tok: t.tok.clone(),
                span: t.span,
            }
        };
        match tok {
            Tok::Num(v) => {
                self.next();
                Ok(Expr {
                    kind: ExprKind::Num(v),
                    span,
                })
            }
            Tok::LParen => {
                self.next();
                let mut e = self.binary(1)?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.unexpected(vec!["')'", "operator"]));
                }
                let end = self.next().span.end;
                e.span = Span { start: span.start, end };
                Ok(e)
            }
            Tok::Ident(name) => {
                self.next();
                if self.peek().tok == Tok::LParen {
                    return self.call(name, span);
                }
                if name == "t" {
                    return Ok(Expr {
                        kind: ExprKind::T,
                        span,
                    });
                }
                if let Some(k) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    if k >= 1 && !name[1..].starts_with('0') {
                        return Ok(Expr {
                            kind: ExprKind::X(k - 1),
                            span,
                        });
                    }
                }
                let hint = if Func::lookup(&name).is_some() {
                    format!("function `{name}` must be called with arguments")
                } else {
                    format!("unknown identifier `{name}` (variables are t, x1, x2, ...; coefficients are written `{name}(x)`)")
                };
                Err(self.error(ParseErrorKind::UnknownIdentifier, span.start, hint, vec![]))
            }
            _ => Err(self.unexpected(OPERAND.to_vec())),
        }
    }

    fn call(&mut self, name: String, name_span: Span) -> Result<Expr, ParseError> {
        self.next(); // '('
        let func = Func::lookup(&name);
        if func.is_none() {
            if name == "t" || name.starts_with('x') && name[1..].chars().all(|c| c.is_ascii_digit()) {
                return Err(self.error(
                    ParseErrorKind::UnknownIdentifier,
                    name_span.start,
                    format!("`{name}` is a variable and cannot be called"),
                    vec![],
                ));
            }
            // coefficient reference: exactly `name(x)`
            let ok = matches!(&self.peek().tok, Tok::Ident(s) if s == "x");
            if !ok {
                return Err(self.error(
                    ParseErrorKind::Syntax,
                    self.peek().span.start,
                    format!("coefficient `{name}` must be referenced as `{name}(x)`"),
                    vec!["x"],
                ));
            }
            self.next();
            if self.peek().tok != Tok::RParen {
                return Err(self.unexpected(vec!["')'"]));
            }
            let end = self.next().span.end;
            return Ok(Expr {
                kind: ExprKind::Coef(name),
                span: Span {
                    start: name_span.start,
                    end,
                },
            });
        }
        let func = func.expect("checked above");
        let mut args = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                args.push(self.binary(1)?);
                match self.peek().tok {
                    Tok::Comma => {
                        self.next();
                    }
                    Tok::RParen => break,
                    _ => return Err(self.unexpected(vec!["','", "')'", "operator"])),
                }
            }
        }
        let end = self.next().span.end;
        let (lo, hi) = func.arity();
        if args.len() < lo || args.len() > hi {
            let want = if lo == hi { format!("{lo}") } else { format!("{lo} or {hi}") };
            return Err(self.error(
                ParseErrorKind::Arity,
                name_span.start,
                format!("`{}` takes {want} argument(s), got {}", func.name(), args.len()),
                vec![],
            ));
        }
        Ok(Expr {
            kind: ExprKind::Call(func, args),
            span: Span {
                start: name_span.start,
                end,
            },
        })
    }
}

/// Parses an integrand expression in `t` and `x1..xn`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::tokenize(text)?;
    if p.peek().tok == Tok::End {
        return Err(p.error(ParseErrorKind::Syntax, 0, "empty expression".into(), OPERAND.to_vec()));
    }
    let e = p.binary(1)?;
    if p.peek().tok != Tok::End {
        return Err(p.unexpected(vec!["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_t_squared() {
        let e = parse("t^2 / 2").unwrap();
        let want = Expr::bin(
            BinOp::Div,
            Expr::bin(BinOp::Pow, Expr::new(ExprKind::T), Expr::num(2.0)),
            Expr::num(2.0),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn power_is_right_associative_and_binds_over_negation() {
        assert_eq!(parse("2^3^2").unwrap().to_string(), "(2.0 ^ (3.0 ^ 2.0))");
        assert_eq!(parse("-t^2").unwrap().to_string(), "(-(t ^ 2.0))");
        assert_eq!(parse("-2*t").unwrap().to_string(), "((-2.0) * t)");
        assert_eq!(parse("1-2-3").unwrap().to_string(), "((1.0 - 2.0) - 3.0)");
    }

    #[test]
    fn coefficient_reference() {
        let e = parse("exp(a(x) * t^2) - 1").unwrap();
        assert_eq!(e.coefficient_names(), vec!["a".to_string()]);
    }

    #[test]
    fn dangling_operator_reports_offset() {
        let err = parse("t +").unwrap_err();
        assert_eq!(err.offset, 3);
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert!(err.expected.contains(&"number"));
        assert_eq!(err.to_string().split(':').take(2).collect::<Vec<_>>(), vec!["1", "4"]);
    }

    #[test]
    fn unknown_identifier_and_arity() {
        assert_eq!(parse("t + y").unwrap_err().kind, ParseErrorKind::UnknownIdentifier);
        assert_eq!(parse("exp(t, 2)").unwrap_err().kind, ParseErrorKind::Arity);
        assert_eq!(parse("abs_smooth(t, 1e-3)").unwrap().to_string(), "abs_smooth(t, 0.001)");
        assert!(parse("").is_err());
        assert!(parse("(t").is_err());
        assert!(parse("a(t)").is_err());
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::num(1.5e-3));
        assert_eq!(parse("x12").unwrap(), Expr::new(ExprKind::X(11)));
    }
}
