//! Planar vector fields given as a pair of scalar expressions.

mod expr;
mod parser;

pub use expr::{BinOp, Env, FieldExpr, Var};
pub use parser::parse_field;

use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("syntax error at byte {position}: expected {expected}, found '{found}'")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("unknown variable '{name}' at byte {position} (allowed: x, y, lambda)")]
    UnknownVariable { name: String, position: usize },
    #[error("field depends on lambda but no value was supplied")]
    MissingParameter,
    #[error("evaluation failed at ({x}, {y}): {reason}")]
    Evaluation { x: f64, y: f64, reason: String },
    #[error("unknown catalogue field '{0}'")]
    UnknownCatalogueName(String),
}

/// The flow generator `(P, Q)`; a family when either component mentions `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldSpec {
    pub p: FieldExpr,
    pub q: FieldExpr,
    pub name: Option<String>,
}

impl VectorFieldSpec {
    pub fn new(p: FieldExpr, q: FieldExpr) -> Self {
        VectorFieldSpec { p, q, name: None }
    }

    pub fn parse(p: &str, q: &str) -> Result<Self, FieldError> {
        Ok(VectorFieldSpec::new(parse_field(p)?, parse_field(q)?))
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn is_family(&self) -> bool {
        self.p.mentions(Var::Lambda) || self.q.mentions(Var::Lambda)
    }

    /// Evaluates `(P, Q)` at `pt`. `lambda` is ignored by non-family fields.
    pub fn eval(&self, pt: Point, lambda: Option<f64>) -> Result<Point, FieldError> {
        if self.is_family() && lambda.is_none() {
            return Err(FieldError::MissingParameter);
        }
        let env = Env { x: pt.x, y: pt.y, lambda };
        Ok(Point::new(self.p.eval(&env)?, self.q.eval(&env)?))
    }

    /// Component-wise negation: the generator of the reverse flow.
    pub fn reverse(&self) -> Self {
        VectorFieldSpec {
            p: FieldExpr::neg(self.p.clone()),
            q: FieldExpr::neg(self.q.clone()),
            name: self.name.as_ref().map(|n| format!("reverse({n})")),
        }
    }

    /// Binds the parameter (when the spec is a family) and precomputes the
    /// symbolic Jacobian.
    pub fn bind(&self, lambda: Option<f64>) -> Result<Field, FieldError> {
        let spec = match (self.is_family(), lambda) {
            (true, None) => return Err(FieldError::MissingParameter),
            (true, Some(l)) => VectorFieldSpec {
                p: self.p.substitute(Var::Lambda, l),
                q: self.q.substitute(Var::Lambda, l),
                name: self.name.clone(),
            },
            (false, _) => self.clone(),
        };
        Ok(Field::from_spec(spec, if self.is_family() { lambda } else { None }))
    }
}

/// A concrete (parameter-free) field with its Jacobian, ready for numerics.
#[derive(Debug, Clone)]
pub struct Field {
    spec: VectorFieldSpec,
    lambda: Option<f64>,
    dp: [FieldExpr; 2],
    dq: [FieldExpr; 2],
}

impl Field {
    fn from_spec(spec: VectorFieldSpec, lambda: Option<f64>) -> Self {
        let dp = [spec.p.differentiate(Var::X), spec.p.differentiate(Var::Y)];
        let dq = [spec.q.differentiate(Var::X), spec.q.differentiate(Var::Y)];
        Field { spec, lambda, dp, dq }
    }

    pub fn spec(&self) -> &VectorFieldSpec {
        &self.spec
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn name(&self) -> &str {
        self.spec.name.as_deref().unwrap_or("custom")
    }

    fn env(pt: Point) -> Env {
        Env { x: pt.x, y: pt.y, lambda: None }
    }

    pub fn eval(&self, pt: Point) -> Result<Point, FieldError> {
        let env = Self::env(pt);
        Ok(Point::new(self.spec.p.eval(&env)?, self.spec.q.eval(&env)?))
    }

    /// Like [`Field::eval`] but maps evaluation failures to NaN so numerical
    /// loops can treat them as non-transversal / rejected steps.
    pub fn value(&self, pt: Point) -> Point {
        self.eval(pt).unwrap_or(Point::new(f64::NAN, f64::NAN))
    }

    /// `[[∂P/∂x, ∂P/∂y], [∂Q/∂x, ∂Q/∂y]]`, NaN where evaluation fails.
    pub fn jacobian(&self, pt: Point) -> [[f64; 2]; 2] {
        let env = Self::env(pt);
        let ev = |e: &FieldExpr| e.eval(&env).unwrap_or(f64::NAN);
        [
            [ev(&self.dp[0]), ev(&self.dp[1])],
            [ev(&self.dq[0]), ev(&self.dq[1])],
        ]
    }

    pub fn reversed(&self) -> Field {
        Field::from_spec(self.spec.reverse(), self.lambda)
    }
}

/// Named fields used throughout the tests and configs: `(name, P, Q)`.
pub const CATALOGUE: &[(&str, &str, &str)] = &[
    ("node", "-x", "-y"),
    ("source", "x", "y"),
    ("saddle", "x", "-y"),
    ("zpow2", "x^2 - y^2", "2*x*y"),
    ("zbarpow2", "x^2 - y^2", "-2*x*y"),
    ("doublewell", "x - x^3", "-y"),
    ("hopf", "x - y - x*(x^2 + y^2)", "x + y - y*(x^2 + y^2)"),
    ("saddle_family", "x + 0.3*lambda*y^2", "-y"),
];

pub fn catalogue(name: &str) -> Result<VectorFieldSpec, FieldError> {
    let &(n, p, q) = CATALOGUE
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| FieldError::UnknownCatalogueName(name.to_string()))?;
    Ok(VectorFieldSpec::parse(p, q)?.named(n))
}

pub fn is_catalogue_name(name: &str) -> bool {
    CATALOGUE.iter().any(|(n, _, _)| *n == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> FieldExpr {
        FieldExpr::var(Var::X)
    }
    fn y() -> FieldExpr {
        FieldExpr::var(Var::Y)
    }
    fn n(v: f64) -> FieldExpr {
        FieldExpr::num(v)
    }
    fn sq(e: FieldExpr) -> FieldExpr {
        FieldExpr::pow(e, 2)
    }

    #[test]
    fn catalogue_matches_hand_built_trees() {
        let r2 = || FieldExpr::add(sq(x()), sq(y()));
        let hand: Vec<(&str, FieldExpr, FieldExpr)> = vec![
            ("node", FieldExpr::neg(x()), FieldExpr::neg(y())),
            ("source", x(), y()),
            ("saddle", x(), FieldExpr::neg(y())),
            (
                "zpow2",
                FieldExpr::sub(sq(x()), sq(y())),
                FieldExpr::mul(FieldExpr::mul(n(2.0), x()), y()),
            ),
            (
                "zbarpow2",
                FieldExpr::sub(sq(x()), sq(y())),
                FieldExpr::mul(FieldExpr::mul(FieldExpr::neg(n(2.0)), x()), y()),
            ),
            ("doublewell", FieldExpr::sub(x(), FieldExpr::pow(x(), 3)), FieldExpr::neg(y())),
            (
                "hopf",
                FieldExpr::sub(FieldExpr::sub(x(), y()), FieldExpr::mul(x(), r2())),
                FieldExpr::sub(FieldExpr::add(x(), y()), FieldExpr::mul(y(), r2())),
            ),
            (
                "saddle_family",
                FieldExpr::add(
                    x(),
                    FieldExpr::mul(FieldExpr::mul(n(0.3), FieldExpr::var(Var::Lambda)), sq(y())),
                ),
                FieldExpr::neg(y()),
            ),
        ];
        assert_eq!(hand.len(), CATALOGUE.len());
        for (name, p, q) in hand {
            let spec = catalogue(name).unwrap();
            assert_eq!(spec.p, p, "{name} P");
            assert_eq!(spec.q, q, "{name} Q");
            assert_eq!(spec.name.as_deref(), Some(name));
        }
    }

    #[test]
    fn eval_examples() {
        let zpow2 = catalogue("zpow2").unwrap();
        assert_eq!(zpow2.eval(Point::new(1.0, 0.0), None).unwrap(), Point::new(1.0, 0.0));
        let dw = catalogue("doublewell").unwrap();
        assert_eq!(dw.eval(Point::new(1.0, 0.0), None).unwrap(), Point::new(0.0, 0.0));
        let fam = catalogue("saddle_family").unwrap();
        let v = fam.eval(Point::new(0.0, 1.0), Some(1.0)).unwrap();
        assert!((v.x - 0.3).abs() < 1e-15 && v.y == -1.0);
    }

    #[test]
    fn family_needs_lambda() {
        let fam = catalogue("saddle_family").unwrap();
        assert!(fam.is_family());
        assert_eq!(fam.eval(Point::new(0.0, 1.0), None), Err(FieldError::MissingParameter));
        assert!(matches!(fam.bind(None), Err(FieldError::MissingParameter)));
        let bound = fam.bind(Some(1.0)).unwrap();
        assert!((bound.eval(Point::new(0.0, 1.0)).unwrap().x - 0.3).abs() < 1e-15);
    }

    #[test]
    fn unknown_catalogue_name() {
        assert!(matches!(catalogue("vortex"), Err(FieldError::UnknownCatalogueName(_))));
    }

    #[test]
    fn reverse_of_node_is_source() {
        let node = catalogue("node").unwrap().reverse();
        let source = catalogue("source").unwrap();
        for &(px, py) in &[(0.5, -0.25), (1.0, 2.0), (-3.0, 0.1)] {
            let pt = Point::new(px, py);
            assert_eq!(node.eval(pt, None).unwrap(), source.eval(pt, None).unwrap());
        }
    }

    #[test]
    fn reverse_is_an_involution() {
        for (name, _, _) in CATALOGUE {
            let s = catalogue(name).unwrap();
            let rr = s.reverse().reverse();
            for &(px, py) in &[(0.5, -0.25), (1.0, 2.0), (-1.5, 0.7)] {
                let pt = Point::new(px, py);
                assert_eq!(rr.eval(pt, Some(0.5)).unwrap(), s.eval(pt, Some(0.5)).unwrap());
            }
        }
    }

    #[test]
    fn jacobian_of_hopf_at_origin() {
        let f = catalogue("hopf").unwrap().bind(None).unwrap();
        assert_eq!(f.jacobian(Point::new(0.0, 0.0)), [[1.0, -1.0], [1.0, 1.0]]);
    }
}
