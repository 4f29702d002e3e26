use super::{BinaryOp, Expr, UnaryOp};

pub(super) fn derivative(e: &Expr, j: usize) -> Expr {
    match e {
        Expr::Const(_) => zero(),
        Expr::Var(k) => Expr::Const(if *k == j { 1.0 } else { 0.0 }),
        Expr::Unary(op, u) => {
            let du = derivative(u, j);
            if is_zero(&du) {
                return zero();
            }
            let u = (**u).clone();
            match op {
                UnaryOp::Neg => neg(du),
                UnaryOp::Sin => mul(unary(UnaryOp::Cos, u), du),
                UnaryOp::Cos => neg(mul(unary(UnaryOp::Sin, u), du)),
                UnaryOp::Exp => mul(unary(UnaryOp::Exp, u), du),
                UnaryOp::Abs => mul(unary(UnaryOp::Sign, u), du),
                // Piecewise constant; zero away from the jump.
                UnaryOp::Sign => zero(),
            }
        }
        Expr::Binary(op, u, v) => {
            let (du, dv) = (derivative(u, j), derivative(v, j));
            let (u, v) = ((**u).clone(), (**v).clone());
            match op {
                BinaryOp::Add => add(du, dv),
                BinaryOp::Sub => sub(du, dv),
                BinaryOp::Mul => add(mul(du, v.clone()), mul(u, dv)),
                BinaryOp::Div => {
                    let num = sub(mul(du, v.clone()), mul(u, dv));
                    div(num, pow(v, 2))
                }
                BinaryOp::Min => add(mul(step(sub(v.clone(), u.clone())), du), mul(step(sub(u, v)), dv)),
                BinaryOp::Max => add(mul(step(sub(u.clone(), v.clone())), du), mul(step(sub(v, u)), dv)),
            }
        }
        Expr::Pow(u, k) => {
            if *k == 0 {
                return zero();
            }
            let du = derivative(u, j);
            mul(mul(Expr::Const(*k as f64), pow((**u).clone(), k - 1)), du)
        }
    }
}

fn zero() -> Expr {
    Expr::Const(0.0)
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 1.0)
}

fn folded(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Const(v))
}

/// 1 for `w > 0`, 1/2 at `w = 0`, 0 for `w < 0`.
fn step(w: Expr) -> Expr {
    mul(Expr::Const(0.5), add(Expr::Const(1.0), unary(UnaryOp::Sign, w)))
}

fn unary(op: UnaryOp, a: Expr) -> Expr {
    Expr::Unary(op, Box::new(a))
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Unary(UnaryOp::Neg, inner) => *inner,
        a => unary(UnaryOp::Neg, a),
    }
}

fn negated(e: &Expr) -> Option<&Expr> {
    match e {
        Expr::Unary(UnaryOp::Neg, inner) => Some(inner),
        _ => None,
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if let Some(nb) = negated(&b) {
        return sub(a, nb.clone());
    }
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        if let Some(c) = folded(x + y) {
            return c;
        }
    }
    Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b))
}

fn sub(a: Expr, b: Expr) -> Expr {
    if let Some(nb) = negated(&b) {
        return add(a, nb.clone());
    }
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return neg(b);
    }
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        if let Some(c) = folded(x - y) {
            return c;
        }
    }
    Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b))
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return zero();
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    if matches!(a, Expr::Const(c) if c == -1.0) {
        return neg(b);
    }
    if matches!(b, Expr::Const(c) if c == -1.0) {
        return neg(a);
    }
    if let Some(na) = negated(&a) {
        return neg(mul(na.clone(), b));
    }
    if let Some(nb) = negated(&b) {
        return neg(mul(a, nb.clone()));
    }
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        if let Some(c) = folded(x * y) {
            return c;
        }
    }
    // c1 * (c2 * u) -> (c1 c2) * u
    if let (Expr::Const(x), Expr::Binary(BinaryOp::Mul, l, r)) = (&a, &b) {
        if let Expr::Const(y) = **l {
            if let Some(c) = folded(x * y) {
                return mul(c, (**r).clone());
            }
        }
    }
    Expr::Binary(BinaryOp::Mul, Box::new(a), Box::new(b))
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return zero();
    }
    if is_one(&b) {
        return a;
    }
    if let Some(na) = negated(&a) {
        return neg(div(na.clone(), b));
    }
    Expr::Binary(BinaryOp::Div, Box::new(a), Box::new(b))
}

fn pow(a: Expr, k: u32) -> Expr {
    match k {
        0 => Expr::Const(1.0),
        1 => a,
        k => Expr::Pow(Box::new(a), k),
    }
}
