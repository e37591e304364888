use std::collections::HashMap;

use super::{call, power, product, quotient, sum, Expr, FunctionBinding, Node, Var};

/// Simultaneous substitution of variables, parameters and opaque functions.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    vars: HashMap<Var, Expr>,
    params: HashMap<String, Expr>,
    functions: HashMap<String, FunctionBinding>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn var(mut self, v: Var, e: Expr) -> Substitution {
        self.vars.insert(v, e);
        self
    }

    pub fn param(mut self, name: &str, e: Expr) -> Substitution {
        self.params.insert(name.to_string(), e);
        self
    }

    /// Replace `name^(k)(a)` by the `k`-th derivative of `binding` at `a`.
    pub fn function(mut self, name: &str, binding: FunctionBinding) -> Substitution {
        self.functions.insert(name.to_string(), binding);
        self
    }

    /// Replace every acceleration `q̈_i` by `values[i]`.
    pub fn accelerations(mut self, values: &[Expr]) -> Substitution {
        for (i, e) in values.iter().enumerate() {
            self.vars.insert(Var::Acc(i), e.clone());
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.params.is_empty() && self.functions.is_empty()
    }
}

/// Apply `s` to `e`. Replacements are not themselves rewritten, so the
/// substitution is simultaneous and capture-free.
pub fn substitute(e: &Expr, s: &Substitution) -> Expr {
    if s.is_empty() {
        return e.clone();
    }
    let mut memo = HashMap::new();
    go(e, s, &mut memo)
}

fn go(e: &Expr, s: &Substitution, memo: &mut HashMap<Expr, Expr>) -> Expr {
    if let Some(done) = memo.get(e) {
        return done.clone();
    }
    let out = match e.node() {
        Node::Const(_) => e.clone(),
        Node::Var(v) => s.vars.get(v).cloned().unwrap_or_else(|| e.clone()),
        Node::Param(p) => s.params.get(&**p).cloned().unwrap_or_else(|| e.clone()),
        Node::Opaque { name, order, arg } => {
            let a = go(arg, s, memo);
            match s.functions.get(&**name) {
                Some(binding) => {
                    let body = binding.derivative(*order);
                    substitute(&body, &Substitution::new().var(Var::Arg, a))
                }
                None => Expr::opaque(name, *order, a),
            }
        }
        Node::Sum(xs) => sum(xs.iter().map(|x| go(x, s, memo)).collect::<Vec<_>>()),
        Node::Product(xs) => product(xs.iter().map(|x| go(x, s, memo)).collect::<Vec<_>>()),
        Node::Power(a, b) => power(go(a, s, memo), go(b, s, memo)),
        Node::Quotient(a, b) => quotient(go(a, s, memo), go(b, s, memo)),
        Node::Call(f, a) => call(*f, go(a, s, memo)),
    };
    memo.insert(e.clone(), out.clone());
    out
}
