//! Tokenizer and recursive-descent parser.

use super::{Constant, Expr, ExprError, Func};

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
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(x) => format!("number {x}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn syntax(position: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax { position, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
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
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
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
                let lit = &text[start..i];
                let x: f64 = lit.parse().map_err(|_| syntax(start, format!("malformed number `{lit}`")))?;
                out.push((Tok::Num(x), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    var: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ExprError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.unary()?;
        let r = fold_constant(&exponent).ok_or_else(|| syntax(at, "exponent must be a constant expression"))?;
        Ok(Expr::Pow(Box::new(base), r))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(x) => Ok(Expr::Num(x)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Call(f, Box::new(arg)))
                } else if name == self.var {
                    Ok(Expr::Var)
                } else if name == "pi" {
                    Ok(Expr::Const(Constant::Pi))
                } else if name == "e" {
                    Ok(Expr::Const(Constant::E))
                } else {
                    Err(ExprError::UnknownIdentifier { name, position: at })
                }
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            t => Err(syntax(at, format!("unexpected {}", describe(&t)))),
        }
    }
}

fn fold_constant(e: &Expr) -> Option<f64> {
    let v = match e {
        Expr::Num(x) => *x,
        Expr::Const(c) => c.value(),
        Expr::Var => return None,
        Expr::Neg(a) => -fold_constant(a)?,
        Expr::Add(a, b) => fold_constant(a)? + fold_constant(b)?,
        Expr::Sub(a, b) => fold_constant(a)? - fold_constant(b)?,
        Expr::Mul(a, b) => fold_constant(a)? * fold_constant(b)?,
        Expr::Div(a, b) => fold_constant(a)? / fold_constant(b)?,
        Expr::Pow(a, r) => fold_constant(a)?.powf(*r),
        Expr::Call(..) => return None,
    };
    v.is_finite().then_some(v)
}

pub(super) fn parse(text: &str, var: &str) -> Result<Expr, ExprError> {
    if text.trim().is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, var };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}
