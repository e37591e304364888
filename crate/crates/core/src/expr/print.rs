use super::alphabet::{var_name, Alphabet};
use super::{scale, split_coefficient, Expr, Node};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const POWER: u8 = 3;
const ATOM: u8 = 4;

pub(crate) fn to_string(e: &Expr, alphabet: Option<&Alphabet>) -> String {
    let mut out = String::new();
    write(e, alphabet, &mut out);
    out
}

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) if *c < 0.0 => PRODUCT,
        Node::Const(_) | Node::Var(_) | Node::Param(_) | Node::Opaque { .. } | Node::Call(..) => ATOM,
        Node::Sum(_) => SUM,
        Node::Product(_) | Node::Quotient(..) => PRODUCT,
        Node::Power(..) => POWER,
    }
}

fn write_wrapped(e: &Expr, alphabet: Option<&Alphabet>, min: u8, out: &mut String) {
    if precedence(e) < min {
        out.push('(');
        write(e, alphabet, out);
        out.push(')');
    } else {
        write(e, alphabet, out);
    }
}

fn number(c: f64) -> String {
    format!("{c}")
}

fn is_negative_term(e: &Expr) -> bool {
    let (c, _) = split_coefficient(e);
    c < 0.0
}

fn write(e: &Expr, alphabet: Option<&Alphabet>, out: &mut String) {
    match e.node() {
        Node::Const(c) => out.push_str(&number(*c)),
        Node::Var(v) => out.push_str(&var_name(alphabet, *v)),
        Node::Param(p) => out.push_str(p),
        Node::Opaque { name, order, arg } => {
            out.push_str(name);
            for _ in 0..*order {
                out.push('\'');
            }
            out.push('(');
            write(arg, alphabet, out);
            out.push(')');
        }
        Node::Call(f, arg) => {
            out.push_str(f.name());
            out.push('(');
            write(arg, alphabet, out);
            out.push(')');
        }
        Node::Sum(terms) => {
            // positive terms first; the sum constructor restores its own order on parse
            let (pos, negs): (Vec<&Expr>, Vec<&Expr>) = terms.iter().partition(|t| !is_negative_term(t));
            for (k, term) in pos.into_iter().chain(negs).enumerate() {
                if k > 0 && is_negative_term(term) {
                    out.push_str(" - ");
                    let (c, rest) = split_coefficient(term);
                    write_wrapped(&scale(-c, rest), alphabet, PRODUCT, out);
                } else {
                    if k > 0 {
                        out.push_str(" + ");
                    }
                    write_wrapped(term, alphabet, PRODUCT, out);
                }
            }
        }
        Node::Product(factors) => {
            // c*(n/d) reads as c*n/d and parses back to the same tree
            if let [c, q] = &factors[..] {
                if let (Some(c), Node::Quotient(num, den)) = (c.as_const(), q.node()) {
                    if num.is_one() {
                        out.push_str(&number(c));
                    } else {
                        write(&scale(c, num.clone()), alphabet, out);
                    }
                    out.push('/');
                    write_wrapped(den, alphabet, POWER, out);
                    return;
                }
            }
            let mut rest = &factors[..];
            if let Some(c) = factors[0].as_const() {
                if c == -1.0 {
                    out.push('-');
                } else {
                    out.push_str(&number(c));
                    out.push('*');
                }
                rest = &factors[1..];
            }
            for (k, f) in rest.iter().enumerate() {
                if k > 0 {
                    out.push('*');
                }
                // quotients inside products are parenthesized so they re-parse as factors
                let min = if matches!(f.node(), Node::Quotient(..)) { POWER } else { PRODUCT + 1 };
                write_wrapped(f, alphabet, min, out);
            }
        }
        Node::Quotient(num, den) => {
            write_wrapped(num, alphabet, PRODUCT, out);
            out.push('/');
            write_wrapped(den, alphabet, POWER, out);
        }
        Node::Power(base, exponent) => {
            write_wrapped(base, alphabet, ATOM, out);
            out.push('^');
            let atomic = match exponent.node() {
                Node::Const(c) => *c >= 0.0,
                Node::Var(_) | Node::Param(_) => true,
                _ => false,
            };
            if atomic {
                write(exponent, alphabet, out);
            } else {
                out.push('(');
                write(exponent, alphabet, out);
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn prints_readably() {
        let a = Alphabet::with_coords(&["x", "y"]).function("G");
        let e = Expr::qdot(0) * Expr::qdot(1) - Expr::opaque("G", 0, Expr::q(0)) * Expr::q(1);
        assert_eq!(e.print(&a), "xdot*ydot - y*G(x)");
        let k = Expr::qdot(0).powi(2) / 2.0 - Expr::q(0).powi(-3);
        assert_eq!(k.print(&a), "0.5*xdot^2 - x^(-3)");
    }
}
