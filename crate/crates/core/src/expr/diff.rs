use thiserror::Error;

use super::{power, product, quotient, sum, Expr, Func, Node, Var};

/// Exact partial derivative of `e` with respect to `v`.
///
/// Opaque functions differentiate by bumping their derivative order and
/// applying the chain rule, so the result is always another [`Expr`].
pub fn diff(e: &Expr, v: Var) -> Expr {
    match e.node() {
        Node::Const(_) | Node::Param(_) => Expr::zero(),
        Node::Var(w) => {
            if *w == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Opaque { name, order, arg } => {
            let da = diff(arg, v);
            if da.is_zero() {
                return Expr::zero();
            }
            product([Expr::opaque(name, order + 1, arg.clone()), da])
        }
        Node::Sum(terms) => sum(terms.iter().map(|t| diff(t, v))),
        Node::Product(factors) => {
            let mut terms = Vec::with_capacity(factors.len());
            for (i, f) in factors.iter().enumerate() {
                let df = diff(f, v);
                if df.is_zero() {
                    continue;
                }
                let mut parts: Vec<Expr> = Vec::with_capacity(factors.len());
                parts.extend(factors.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()));
                parts.push(df);
                terms.push(product(parts));
            }
            sum(terms)
        }
        Node::Quotient(a, b) => {
            let da = diff(a, v);
            let db = diff(b, v);
            if db.is_zero() {
                return quotient(da, b.clone());
            }
            // (a/b)' = a'/b - a b'/b^2
            sum([
                quotient(da, b.clone()),
                product([Expr::constant(-1.0), quotient(product([a.clone(), db]), b.powi(2))]),
            ])
        }
        Node::Power(base, exponent) => {
            let db = diff(base, v);
            let dx = diff(exponent, v);
            if dx.is_zero() {
                if db.is_zero() {
                    return Expr::zero();
                }
                let reduced = power(base.clone(), sum([exponent.clone(), Expr::constant(-1.0)]));
                return product([exponent.clone(), reduced, db]);
            }
            // b^x (x' ln b + x b'/b)
            sum([
                product([e.clone(), dx, base.ln()]),
                product([exponent.clone(), power(base.clone(), sum([exponent.clone(), Expr::constant(-1.0)])), db]),
            ])
        }
        Node::Call(func, a) => {
            let da = diff(a, v);
            if da.is_zero() {
                return Expr::zero();
            }
            let outer = match func {
                Func::Sqrt => quotient(Expr::constant(0.5), e.clone()),
                Func::Sin => a.cos(),
                Func::Cos => product([Expr::constant(-1.0), a.sin()]),
                Func::Exp => e.clone(),
                Func::Log => quotient(Expr::one(), a.clone()),
            };
            product([outer, da])
        }
    }
}

/// How accelerations are treated by [`total_dt`].
#[derive(Clone, Copy, Debug)]
pub enum DtMode<'a> {
    /// Accelerations stay as free symbols (the strong reading).
    Generic,
    /// Accelerations are replaced by the normal form (the on-flow reading).
    OnFlow(&'a [Expr]),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TotalDerivativeError {
    #[error("normal form has {got} components, system dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expression already contains accelerations; third derivatives are not represented")]
    ContainsAcceleration,
}

/// Total time derivative `∂_t e + ∂_q e · q̇ + ∂_q̇ e · q̈` in a system of
/// dimension `dim`, with `q̈` kept symbolic or replaced by the normal form.
pub fn total_dt(e: &Expr, dim: usize, mode: DtMode<'_>) -> Result<Expr, TotalDerivativeError> {
    if let DtMode::OnFlow(lambda) = mode {
        if lambda.len() != dim {
            return Err(TotalDerivativeError::DimensionMismatch { expected: dim, got: lambda.len() });
        }
    }
    if e.has_acceleration() {
        return Err(TotalDerivativeError::ContainsAcceleration);
    }
    let mut terms = vec![diff(e, Var::Time)];
    for i in 0..dim {
        terms.push(product([diff(e, Var::Coord(i)), Expr::qdot(i)]));
        let accel = match mode {
            DtMode::Generic => Expr::qddot(i),
            DtMode::OnFlow(lambda) => lambda[i].clone(),
        };
        terms.push(product([diff(e, Var::Vel(i)), accel]));
    }
    Ok(sum(terms))
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Alphabet};
    use super::*;

    #[test]
    fn power_rule() {
        let a = Alphabet::new(1);
        let e = parse("qdot1^2/2", &a).unwrap();
        assert_eq!(diff(&e, Var::Vel(0)), Expr::qdot(0));
    }

    #[test]
    fn chain_rule_on_opaque() {
        let a = Alphabet::with_coords(&["x", "y"]).function("G");
        let e = parse("G(x)*y", &a).unwrap();
        let d = diff(&e, Var::Coord(0));
        assert_eq!(d, Expr::opaque("G", 1, Expr::q(0)) * Expr::q(1));
        assert_eq!(d.print(&a), "y*G'(x)");
    }

    #[test]
    fn total_derivative_of_coordinate() {
        let d = total_dt(&Expr::q(0), 1, DtMode::Generic).unwrap();
        assert_eq!(d, Expr::qdot(0));
    }

    #[test]
    fn free_particle_velocity_is_conserved_on_flow() {
        let lambda = [Expr::zero()];
        let d = total_dt(&Expr::qdot(0), 1, DtMode::OnFlow(&lambda)).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn on_flow_length_checked() {
        let lambda = [Expr::zero()];
        assert!(matches!(
            total_dt(&Expr::q(0), 2, DtMode::OnFlow(&lambda)),
            Err(TotalDerivativeError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(total_dt(&Expr::qddot(0), 1, DtMode::Generic).is_err());
    }
}
