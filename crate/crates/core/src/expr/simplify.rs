use std::collections::HashMap;

use super::{call, power, product, quotient, split_power, sum, Expr, Node};

const PASSES: usize = 3;

/// Bounded rewrite pass for readability: rebuilds the tree through the smart
/// constructors, merges quotients inside products into one quotient, and
/// cancels identical factors between numerator and denominator.
pub fn simplify(e: &Expr) -> Expr {
    let mut cur = e.clone();
    for _ in 0..PASSES {
        let mut memo = HashMap::new();
        let next = pass(&cur, &mut memo);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn pass(e: &Expr, memo: &mut HashMap<Expr, Expr>) -> Expr {
    if let Some(done) = memo.get(e) {
        return done.clone();
    }
    let out = match e.node() {
        Node::Const(_) | Node::Var(_) | Node::Param(_) => e.clone(),
        Node::Opaque { name, order, arg } => Expr::opaque(name, *order, pass(arg, memo)),
        Node::Sum(xs) => sum(xs.iter().map(|x| pass(x, memo)).collect::<Vec<_>>()),
        Node::Product(xs) => {
            let factors: Vec<Expr> = xs.iter().map(|x| pass(x, memo)).collect();
            combine(factors, Vec::new())
        }
        Node::Quotient(a, b) => combine(vec![pass(a, memo)], vec![pass(b, memo)]),
        Node::Power(a, b) => power(pass(a, memo), pass(b, memo)),
        Node::Call(f, a) => call(*f, pass(a, memo)),
    };
    memo.insert(e.clone(), out.clone());
    out
}

/// Collect numerator and denominator factors as `(base, exponent)` pairs,
/// unpacking nested products and quotients, and cancel what matches.
fn combine(num: Vec<Expr>, den: Vec<Expr>) -> Expr {
    let mut coef = 1.0;
    let mut top: Vec<(Expr, Expr)> = Vec::new();
    let mut bottom: Vec<(Expr, Expr)> = Vec::new();
    let mut stack: Vec<(Expr, bool)> = num.into_iter().map(|e| (e, true)).chain(den.into_iter().map(|e| (e, false))).collect();
    while let Some((f, upper)) = stack.pop() {
        match f.node() {
            Node::Const(c) => {
                if upper {
                    coef *= c
                } else {
                    coef /= c
                }
            }
            Node::Product(xs) => stack.extend(xs.iter().map(|x| (x.clone(), upper))),
            Node::Quotient(a, b) => {
                stack.push((a.clone(), upper));
                stack.push((b.clone(), !upper));
            }
            _ => {
                let pair = split_power(&f);
                if upper {
                    top.push(pair)
                } else {
                    bottom.push(pair)
                }
            }
        }
    }
    if coef == 0.0 {
        return Expr::zero();
    }
    // cancel bottom factors against top factors with the same base
    let mut kept_bottom = Vec::new();
    'outer: for (base, x) in bottom {
        for slot in top.iter_mut() {
            if slot.0 == base {
                match (slot.1.as_const(), x.as_const()) {
                    (Some(a), Some(b)) => {
                        slot.1 = Expr::constant(a - b);
                        continue 'outer;
                    }
                    _ if slot.1 == x => {
                        slot.1 = Expr::zero();
                        continue 'outer;
                    }
                    _ => {}
                }
            }
        }
        kept_bottom.push((base, x));
    }
    let mut upper = vec![Expr::constant(coef)];
    let mut lower = Vec::new();
    for (b, x) in top {
        match x.as_const() {
            Some(v) if v < 0.0 => lower.push(power(b, Expr::constant(-v))),
            _ => upper.push(power(b, x)),
        }
    }
    lower.extend(kept_bottom.into_iter().map(|(b, x)| power(b, x)));
    quotient(product(upper), product(lower))
}
