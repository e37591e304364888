use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{diff, parse, Alphabet, Expr, Func, Node, ParseError, Var};

/// Numeric meaning of an opaque function: a body in the formal argument
/// [`Var::Arg`] together with its derivatives.
#[derive(Clone, Debug)]
pub struct FunctionBinding {
    body: Expr,
    derivatives: Arc<Vec<Expr>>,
}

const PRECOMPUTED_ORDERS: u32 = 4;

impl FunctionBinding {
    pub fn new(body: Expr) -> FunctionBinding {
        let mut derivatives = vec![body.clone()];
        for k in 0..PRECOMPUTED_ORDERS as usize {
            let next = diff(&derivatives[k], Var::Arg);
            derivatives.push(next);
        }
        FunctionBinding { body, derivatives: Arc::new(derivatives) }
    }

    /// Parse a body written in terms of the formal argument `arg`, e.g. `u^3`.
    pub fn parse(text: &str, arg: &str, params: &[String]) -> Result<FunctionBinding, ParseError> {
        let alphabet = Alphabet::for_binding(arg).params(params);
        Ok(FunctionBinding::new(parse(text, &alphabet)?))
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    /// Body differentiated `order` times.
    pub fn derivative(&self, order: u32) -> Expr {
        match self.derivatives.get(order as usize) {
            Some(e) => e.clone(),
            None => {
                let mut e = self.derivatives.last().unwrap().clone();
                for _ in self.derivatives.len() as u32 - 1..order {
                    e = diff(&e, Var::Arg);
                }
                e
            }
        }
    }
}

/// A full numeric assignment for evaluation.
#[derive(Clone, Debug, Default)]
pub struct SamplePoint {
    pub t: f64,
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub qddot: Vec<f64>,
    pub params: BTreeMap<String, f64>,
    pub functions: BTreeMap<String, FunctionBinding>,
    pub arg: Option<f64>,
}

impl SamplePoint {
    pub fn new(dim: usize) -> SamplePoint {
        SamplePoint {
            t: 0.0,
            q: vec![0.0; dim],
            qdot: vec![0.0; dim],
            qddot: vec![0.0; dim],
            ..SamplePoint::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn with_param(mut self, name: &str, value: f64) -> SamplePoint {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_function(mut self, name: &str, binding: FunctionBinding) -> SamplePoint {
        self.functions.insert(name.to_string(), binding);
        self
    }

    pub fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::Time => Some(self.t),
            Var::Coord(i) => self.q.get(i).copied(),
            Var::Vel(i) => self.qdot.get(i).copied(),
            Var::Acc(i) => self.qddot.get(i).copied(),
            Var::Arg => self.arg,
        }
    }

    /// Named coordinates in a fixed order, for reports.
    pub fn named_values(&self, alphabet: &Alphabet) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        out.insert("t".to_string(), self.t);
        for i in 0..self.dim() {
            out.insert(alphabet.var_name(Var::Coord(i)), self.q[i]);
            out.insert(alphabet.var_name(Var::Vel(i)), self.qdot[i]);
            out.insert(alphabet.var_name(Var::Acc(i)), self.qddot[i]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain violation in `{subtree}`: {reason}")]
    Domain { subtree: String, reason: &'static str },
    #[error("no value bound for `{0}`")]
    Unbound(String),
}

fn domain(e: &Expr, reason: &'static str) -> EvalError {
    EvalError::Domain { subtree: e.to_string(), reason }
}

/// IEEE double evaluation of `e` at `p`.
pub fn eval(e: &Expr, p: &SamplePoint) -> Result<f64, EvalError> {
    ev(e, p, p.arg)
}

fn ev(e: &Expr, p: &SamplePoint, arg: Option<f64>) -> Result<f64, EvalError> {
    let v = match e.node() {
        Node::Const(c) => *c,
        Node::Var(Var::Arg) => arg.ok_or_else(|| EvalError::Unbound(e.to_string()))?,
        Node::Var(v) => p.get(*v).ok_or_else(|| EvalError::Unbound(e.to_string()))?,
        Node::Param(name) => *p.params.get(&**name).ok_or_else(|| EvalError::Unbound(name.to_string()))?,
        Node::Opaque { name, order, arg: inner } => {
            let binding = p.functions.get(&**name).ok_or_else(|| EvalError::Unbound(format!("{name}(·)")))?;
            let x = ev(inner, p, arg)?;
            ev(&binding.derivative(*order), p, Some(x))?
        }
        Node::Sum(terms) => {
            let mut acc = 0.0;
            for t in terms {
                acc += ev(t, p, arg)?;
            }
            acc
        }
        Node::Product(factors) => {
            let mut acc = 1.0;
            for f in factors {
                acc *= ev(f, p, arg)?;
            }
            acc
        }
        Node::Quotient(a, b) => {
            let den = ev(b, p, arg)?;
            if den == 0.0 {
                return Err(domain(e, "division by zero"));
            }
            ev(a, p, arg)? / den
        }
        Node::Power(base, exponent) => {
            let b = ev(base, p, arg)?;
            let x = ev(exponent, p, arg)?;
            if b == 0.0 && x < 0.0 {
                return Err(domain(e, "division by zero"));
            }
            if b < 0.0 && x.fract() != 0.0 {
                return Err(domain(e, "fractional power of a negative number"));
            }
            match x {
                2.0 => b * b,
                _ if x.fract() == 0.0 && x.abs() < 64.0 => b.powi(x as i32),
                _ => b.powf(x),
            }
        }
        Node::Call(func, a) => {
            let x = ev(a, p, arg)?;
            match func {
                Func::Sqrt if x < 0.0 => return Err(domain(e, "square root of a negative number")),
                Func::Sqrt => x.sqrt(),
                Func::Log if x <= 0.0 => return Err(domain(e, "logarithm of a non-positive number")),
                Func::Log => x.ln(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(e, "non-finite value"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinetic_energy() {
        let e = Expr::qdot(0).powi(2) / 2.0;
        let mut p = SamplePoint::new(1);
        p.qdot[0] = 2.0;
        assert_eq!(eval(&e, &p).unwrap(), 2.0);
    }

    #[test]
    fn kepler_potential_at_unit_radius() {
        let a = Alphabet::new(3).param("mu");
        let e = parse("mu/sqrt(q1^2+q2^2+q3^2)", &a).unwrap();
        let mut p = SamplePoint::new(3).with_param("mu", 1.0);
        p.q = vec![1.0, 0.0, 0.0];
        assert_eq!(eval(&e, &p).unwrap(), 1.0);
    }

    #[test]
    fn inverse_cube_at_origin_is_domain_violation() {
        let a = Alphabet::with_coords(&["x"]);
        let p = SamplePoint::new(1);
        for text in ["1/x^3", "x^(-3)"] {
            let e = parse(text, &a).unwrap();
            assert!(matches!(eval(&e, &p), Err(EvalError::Domain { .. })), "{text}");
        }
        let e = parse("sqrt(x - 1)", &a).unwrap();
        assert!(matches!(eval(&e, &p), Err(EvalError::Domain { .. })));
    }

    #[test]
    fn opaque_functions_need_bindings() {
        let a = Alphabet::with_coords(&["x"]).function("G");
        let e = parse("G''(x)", &a).unwrap();
        let mut p = SamplePoint::new(1);
        p.q[0] = 2.0;
        assert!(matches!(eval(&e, &p), Err(EvalError::Unbound(_))));
        let p = p.with_function("G", FunctionBinding::parse("u^3", "u", &[]).unwrap());
        assert_eq!(eval(&e, &p).unwrap(), 12.0);
        assert_eq!(eval(&parse("G'''''(x)", &a).unwrap(), &p).unwrap(), 0.0);
    }
}
