//! A small expression language for one-variable coefficient functions.
//!
//! Expressions are parsed once into an [`Expression`] and then evaluated
//! either as plain floats or as [`Jet3`] values carrying derivatives up to
//! order three.
//!
//! ```
//! use geoweb::expr::Expression;
//! let e = Expression::parse("u^2 + 3*u", "u").unwrap();
//! let j = e.eval_jet3(2.0).unwrap();
//! assert_eq!((j.value, j.d1, j.d2, j.d3), (10.0, 7.0, 2.0, 0.0));
//! ```

mod jet;
mod parse;

pub use jet::Jet3;

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at offset {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("domain error in `{subexpression}`: {message}")]
    Domain { subexpression: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

/// Abstract syntax tree. Exponents are folded to constants at parse time.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(Constant),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

/// A parsed expression bound to the name of its single variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Expr,
    var: String,
}

impl Expression {
    /// Parses `text` with `var` as the only admissible free identifier.
    pub fn parse(text: &str, var: &str) -> Result<Self, ExprError> {
        let root = parse::parse(text, var)?;
        Ok(Self { root, var: var.to_string() })
    }

    pub fn from_ast(root: Expr, var: &str) -> Self {
        Self { root, var: var.to_string() }
    }

    pub fn ast(&self) -> &Expr {
        &self.root
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// Fully parenthesised text that parses back to the same tree.
    pub fn unparse(&self) -> String {
        let mut s = String::new();
        write_expr(&mut s, &self.root, &self.var);
        s
    }

    pub fn eval(&self, x: f64) -> Result<f64, ExprError> {
        eval_value(&self.root, x, &self.var)
    }

    pub fn eval_jet3(&self, x: f64) -> Result<Jet3, ExprError> {
        eval_jet(&self.root, Jet3::variable(x), &self.var)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.unparse())
    }
}

fn write_num(out: &mut String, x: f64) {
    if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
        out.push_str(&format!("(-{:?})", -x));
    } else {
        out.push_str(&format!("{x:?}"));
    }
}

fn write_expr(out: &mut String, e: &Expr, var: &str) {
    let bin = |out: &mut String, a: &Expr, op: &str, b: &Expr| {
        out.push('(');
        write_expr(out, a, var);
        out.push_str(op);
        write_expr(out, b, var);
        out.push(')');
    };
    match e {
        Expr::Num(x) => write_num(out, *x),
        Expr::Const(Constant::Pi) => out.push_str("pi"),
        Expr::Const(Constant::E) => out.push('e'),
        Expr::Var => out.push_str(var),
        Expr::Neg(a) => {
            out.push_str("(-");
            write_expr(out, a, var);
            out.push(')');
        }
        Expr::Add(a, b) => bin(out, a, " + ", b),
        Expr::Sub(a, b) => bin(out, a, " - ", b),
        Expr::Mul(a, b) => bin(out, a, " * ", b),
        Expr::Div(a, b) => bin(out, a, " / ", b),
        Expr::Pow(a, r) => {
            out.push('(');
            write_expr(out, a, var);
            out.push('^');
            write_num(out, *r);
            out.push(')');
        }
        Expr::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, a, var);
            out.push(')');
        }
    }
}

fn domain(e: &Expr, var: &str, message: &str) -> ExprError {
    let mut s = String::new();
    write_expr(&mut s, e, var);
    ExprError::Domain { subexpression: s, message: message.to_string() }
}

fn as_integer(r: f64) -> Option<i32> {
    if r.fract() == 0.0 && r.abs() <= i32::MAX as f64 {
        Some(r as i32)
    } else {
        None
    }
}

fn eval_value(e: &Expr, x: f64, var: &str) -> Result<f64, ExprError> {
    let v = match e {
        Expr::Num(c) => *c,
        Expr::Const(c) => c.value(),
        Expr::Var => x,
        Expr::Neg(a) => -eval_value(a, x, var)?,
        Expr::Add(a, b) => eval_value(a, x, var)? + eval_value(b, x, var)?,
        Expr::Sub(a, b) => eval_value(a, x, var)? - eval_value(b, x, var)?,
        Expr::Mul(a, b) => eval_value(a, x, var)? * eval_value(b, x, var)?,
        Expr::Div(a, b) => {
            let d = eval_value(b, x, var)?;
            if d == 0.0 {
                return Err(domain(e, var, "division by zero"));
            }
            eval_value(a, x, var)? / d
        }
        Expr::Pow(a, r) => {
            let base = eval_value(a, x, var)?;
            match as_integer(*r) {
                Some(n) if n < 0 && base == 0.0 => {
                    return Err(domain(e, var, "negative power of zero"));
                }
                Some(n) => base.powi(n),
                None if base <= 0.0 => {
                    return Err(domain(e, var, "non-integer power of a non-positive base"));
                }
                None => base.powf(*r),
            }
        }
        Expr::Call(f, a) => {
            let t = eval_value(a, x, var)?;
            match f {
                Func::Sin => t.sin(),
                Func::Cos => t.cos(),
                Func::Tan => {
                    if t.cos() == 0.0 {
                        return Err(domain(e, var, "tan at a pole"));
                    }
                    t.tan()
                }
                Func::Sinh => t.sinh(),
                Func::Cosh => t.cosh(),
                Func::Tanh => t.tanh(),
                Func::Exp => t.exp(),
                Func::Log => {
                    if t <= 0.0 {
                        return Err(domain(e, var, "log of a non-positive number"));
                    }
                    t.ln()
                }
                Func::Sqrt => {
                    if t < 0.0 {
                        return Err(domain(e, var, "sqrt of a negative number"));
                    }
                    t.sqrt()
                }
                Func::Abs => t.abs(),
            }
        }
    };
    if !v.is_finite() {
        return Err(domain(e, var, "non-finite value"));
    }
    Ok(v)
}

fn eval_jet(e: &Expr, x: Jet3, var: &str) -> Result<Jet3, ExprError> {
    let v = match e {
        Expr::Num(c) => Jet3::constant(*c),
        Expr::Const(c) => Jet3::constant(c.value()),
        Expr::Var => x,
        Expr::Neg(a) => -eval_jet(a, x, var)?,
        Expr::Add(a, b) => eval_jet(a, x, var)? + eval_jet(b, x, var)?,
        Expr::Sub(a, b) => eval_jet(a, x, var)? - eval_jet(b, x, var)?,
        Expr::Mul(a, b) => eval_jet(a, x, var)? * eval_jet(b, x, var)?,
        Expr::Div(a, b) => {
            let d = eval_jet(b, x, var)?;
            if d.value == 0.0 {
                return Err(domain(e, var, "division by zero"));
            }
            eval_jet(a, x, var)? / d
        }
        Expr::Pow(a, r) => {
            let base = eval_jet(a, x, var)?;
            match as_integer(*r) {
                Some(n) if n < 0 && base.value == 0.0 => {
                    return Err(domain(e, var, "negative power of zero"));
                }
                Some(n) => base.powi(n),
                None if base.value <= 0.0 => {
                    return Err(domain(e, var, "non-integer power of a non-positive base"));
                }
                None => base.powf(*r),
            }
        }
        Expr::Call(f, a) => {
            let t = eval_jet(a, x, var)?;
            match f {
                Func::Sin => t.sin(),
                Func::Cos => t.cos(),
                Func::Tan => {
                    if t.value.cos() == 0.0 {
                        return Err(domain(e, var, "tan at a pole"));
                    }
                    t.tan()
                }
                Func::Sinh => t.sinh(),
                Func::Cosh => t.cosh(),
                Func::Tanh => t.tanh(),
                Func::Exp => t.exp(),
                Func::Log => {
                    if t.value <= 0.0 {
                        return Err(domain(e, var, "log of a non-positive number"));
                    }
                    t.ln()
                }
                Func::Sqrt => {
                    if t.value < 0.0 {
                        return Err(domain(e, var, "sqrt of a negative number"));
                    }
                    if t.value == 0.0 {
                        if !t.is_constant() {
                            return Err(domain(e, var, "sqrt is not differentiable at 0"));
                        }
                        Jet3::constant(0.0)
                    } else {
                        t.sqrt()
                    }
                }
                Func::Abs => {
                    if t.value == 0.0 && !t.is_constant() {
                        return Err(domain(e, var, "abs is not differentiable at 0"));
                    }
                    t.abs()
                }
            }
        }
    };
    if !v.is_finite() {
        return Err(domain(e, var, "non-finite value"));
    }
    Ok(v)
}
