use std::fmt;

use super::FieldError;

/// Free variables a field expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    Lambda,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Lambda => "lambda",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "lambda" => Some(Var::Lambda),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree for one component of a planar vector field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldExpr {
    Num(f64),
    Var(Var),
    Neg(Box<FieldExpr>),
    Binary(BinOp, Box<FieldExpr>, Box<FieldExpr>),
    /// Exponents are literal nonnegative integers.
    Pow(Box<FieldExpr>, u32),
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Env {
    pub x: f64,
    pub y: f64,
    pub lambda: Option<f64>,
}

impl FieldExpr {
    pub fn num(v: f64) -> Self {
        FieldExpr::Num(v)
    }

    pub fn var(v: Var) -> Self {
        FieldExpr::Var(v)
    }

    pub fn binary(op: BinOp, lhs: FieldExpr, rhs: FieldExpr) -> Self {
        FieldExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn add(lhs: FieldExpr, rhs: FieldExpr) -> Self {
        Self::binary(BinOp::Add, lhs, rhs)
    }

    pub fn sub(lhs: FieldExpr, rhs: FieldExpr) -> Self {
        Self::binary(BinOp::Sub, lhs, rhs)
    }

    pub fn mul(lhs: FieldExpr, rhs: FieldExpr) -> Self {
        Self::binary(BinOp::Mul, lhs, rhs)
    }

    pub fn div(lhs: FieldExpr, rhs: FieldExpr) -> Self {
        Self::binary(BinOp::Div, lhs, rhs)
    }

    pub fn neg(e: FieldExpr) -> Self {
        FieldExpr::Neg(Box::new(e))
    }

    pub fn pow(base: FieldExpr, exp: u32) -> Self {
        FieldExpr::Pow(Box::new(base), exp)
    }

    pub fn eval(&self, env: &Env) -> Result<f64, FieldError> {
        Ok(match self {
            FieldExpr::Num(v) => *v,
            FieldExpr::Var(Var::X) => env.x,
            FieldExpr::Var(Var::Y) => env.y,
            FieldExpr::Var(Var::Lambda) => env.lambda.ok_or(FieldError::MissingParameter)?,
            FieldExpr::Neg(e) => -e.eval(env)?,
            FieldExpr::Binary(op, a, b) => {
                let a = a.eval(env)?;
                let b = b.eval(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(FieldError::Evaluation {
                                x: env.x,
                                y: env.y,
                                reason: "division by zero".into(),
                            });
                        }
                        a / b
                    }
                }
            }
            FieldExpr::Pow(base, n) => pow_u32(base.eval(env)?, *n),
        })
    }

    pub fn mentions(&self, var: Var) -> bool {
        match self {
            FieldExpr::Num(_) => false,
            FieldExpr::Var(v) => *v == var,
            FieldExpr::Neg(e) | FieldExpr::Pow(e, _) => e.mentions(var),
            FieldExpr::Binary(_, a, b) => a.mentions(var) || b.mentions(var),
        }
    }

    /// Replaces every occurrence of `var` by the literal `value`.
    pub fn substitute(&self, var: Var, value: f64) -> FieldExpr {
        match self {
            FieldExpr::Var(v) if *v == var => FieldExpr::Num(value),
            FieldExpr::Num(_) | FieldExpr::Var(_) => self.clone(),
            FieldExpr::Neg(e) => FieldExpr::neg(e.substitute(var, value)),
            FieldExpr::Pow(e, n) => FieldExpr::pow(e.substitute(var, value), *n),
            FieldExpr::Binary(op, a, b) => {
                FieldExpr::binary(*op, a.substitute(var, value), b.substitute(var, value))
            }
        }
    }

    /// Symbolic partial derivative. Only constants are folded; equality
    /// with a hand-derived form is a question of evaluation, not structure.
    pub fn differentiate(&self, var: Var) -> FieldExpr {
        match self {
            FieldExpr::Num(_) => FieldExpr::Num(0.0),
            FieldExpr::Var(v) => FieldExpr::Num(if *v == var { 1.0 } else { 0.0 }),
            FieldExpr::Neg(e) => fold_neg(e.differentiate(var)),
            FieldExpr::Binary(op, a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                match op {
                    BinOp::Add => fold_add(da, db),
                    BinOp::Sub => fold_sub(da, db),
                    BinOp::Mul => fold_add(
                        fold_mul(da, (**b).clone()),
                        fold_mul((**a).clone(), db),
                    ),
                    BinOp::Div => fold_div(
                        fold_sub(fold_mul(da, (**b).clone()), fold_mul((**a).clone(), db)),
                        fold_pow((**b).clone(), 2),
                    ),
                }
            }
            FieldExpr::Pow(base, n) => match *n {
                0 => FieldExpr::Num(0.0),
                n => fold_mul(
                    fold_mul(FieldExpr::Num(n as f64), fold_pow((**base).clone(), n - 1)),
                    base.differentiate(var),
                ),
            },
        }
    }
}

fn pow_u32(base: f64, n: u32) -> f64 {
    match i32::try_from(n) {
        Ok(n) => base.powi(n),
        Err(_) => base.powf(n as f64),
    }
}

fn as_num(e: &FieldExpr) -> Option<f64> {
    match e {
        FieldExpr::Num(v) => Some(*v),
        _ => None,
    }
}

fn fold_neg(e: FieldExpr) -> FieldExpr {
    match as_num(&e) {
        Some(v) => FieldExpr::Num(-v),
        None => FieldExpr::neg(e),
    }
}

fn fold_add(a: FieldExpr, b: FieldExpr) -> FieldExpr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => FieldExpr::Num(x + y),
        (Some(z), _) if z == 0.0 => b,
        (_, Some(z)) if z == 0.0 => a,
        _ => FieldExpr::add(a, b),
    }
}

fn fold_sub(a: FieldExpr, b: FieldExpr) -> FieldExpr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => FieldExpr::Num(x - y),
        (Some(z), _) if z == 0.0 => fold_neg(b),
        (_, Some(z)) if z == 0.0 => a,
        _ => FieldExpr::sub(a, b),
    }
}

fn fold_mul(a: FieldExpr, b: FieldExpr) -> FieldExpr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => FieldExpr::Num(x * y),
        (Some(z), _) | (_, Some(z)) if z == 0.0 => FieldExpr::Num(0.0),
        (Some(o), _) if o == 1.0 => b,
        (_, Some(o)) if o == 1.0 => a,
        _ => FieldExpr::mul(a, b),
    }
}

fn fold_div(a: FieldExpr, b: FieldExpr) -> FieldExpr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) if y != 0.0 => FieldExpr::Num(x / y),
        (Some(z), _) if z == 0.0 => FieldExpr::Num(0.0),
        _ => FieldExpr::div(a, b),
    }
}

fn fold_pow(base: FieldExpr, n: u32) -> FieldExpr {
    match (as_num(&base), n) {
        (_, 0) => FieldExpr::Num(1.0),
        (_, 1) => base,
        (Some(v), n) => FieldExpr::Num(pow_u32(v, n)),
        _ => FieldExpr::pow(base, n),
    }
}

/// Prints a fully parenthesized form that the parser reads back to an
/// expression with identical values.
impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldExpr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{})", -v)
            }
            FieldExpr::Num(v) => write!(f, "{v}"),
            FieldExpr::Var(v) => f.write_str(v.name()),
            FieldExpr::Neg(e) => write!(f, "(-{e})"),
            FieldExpr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            FieldExpr::Pow(b, n) => write!(f, "({b}^{n})"),
        }
    }
}
