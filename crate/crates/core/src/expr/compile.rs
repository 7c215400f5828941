//! Slot-indexed evaluator for hot loops such as ODE right-hand sides.

use super::eval::{apply_func, apply_pow};
use super::{eval, Binding, Expr, ExprError, Func};

#[derive(Debug, Clone)]
enum Node {
    Const(f64),
    Slot(usize),
    Add(Vec<Node>),
    Mul(Vec<Node>),
    Pow(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Div(Box<Node>, Box<Node>),
    Apply(Func, Box<Node>),
}

/// An expression with parameters folded in and the remaining names mapped to
/// positions of an argument slice.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    root: Node,
    source: Expr,
    vars: Vec<String>,
    params: Binding,
}

impl CompiledExpr {
    /// Compile `e` so that [`CompiledExpr::eval`] takes the values of `vars`
    /// in order. Names not in `vars` are taken from `params`; anything else
    /// is unbound.
    pub fn new(e: &Expr, vars: &[&str], params: &Binding) -> Result<Self, ExprError> {
        let root = lower(e, vars, params)?;
        Ok(CompiledExpr {
            root,
            source: e.clone(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            params: params.clone(),
        })
    }

    pub fn source(&self) -> &Expr {
        &self.source
    }

    /// Evaluate at `args` (same order as `vars` at construction). On failure
    /// the slow evaluator is rerun to produce a diagnostic naming the
    /// offending subtree.
    pub fn eval(&self, args: &[f64]) -> Result<f64, ExprError> {
        match run(&self.root, args) {
            Some(v) => Ok(v),
            None => {
                let mut b = self.params.clone();
                for (name, v) in self.vars.iter().zip(args) {
                    b.insert(name.clone(), *v);
                }
                match eval(&self.source, &b) {
                    Err(e) => Err(e),
                    Ok(_) => Err(ExprError::Domain {
                        subtree: self.source.to_string(),
                        reason: "evaluation failed".into(),
                    }),
                }
            }
        }
    }
}

fn lower(e: &Expr, vars: &[&str], params: &Binding) -> Result<Node, ExprError> {
    let name = |n: &str| -> Result<Node, ExprError> {
        if let Some(i) = vars.iter().position(|v| *v == n) {
            return Ok(Node::Slot(i));
        }
        params
            .get(n)
            .map(|v| Node::Const(*v))
            .ok_or_else(|| ExprError::Unbound(n.to_string()))
    };
    let all = |xs: &[Expr]| -> Result<Vec<Node>, ExprError> {
        xs.iter().map(|x| lower(x, vars, params)).collect()
    };
    let boxed =
        |x: &Expr| -> Result<Box<Node>, ExprError> { Ok(Box::new(lower(x, vars, params)?)) };
    Ok(match e {
        Expr::Const(n) => Node::Const(n.to_f64()),
        Expr::Sym(s) => name(s.name())?,
        Expr::Param(p) => name(p)?,
        Expr::Add(xs) => Node::Add(all(xs)?),
        Expr::Mul(xs) => Node::Mul(all(xs)?),
        Expr::Pow(a, b) => Node::Pow(boxed(a)?, boxed(b)?),
        Expr::Neg(a) => Node::Neg(boxed(a)?),
        Expr::Div(a, b) => Node::Div(boxed(a)?, boxed(b)?),
        Expr::Apply(f, a) => Node::Apply(*f, boxed(a)?),
    })
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn run(n: &Node, args: &[f64]) -> Option<f64> {
    match n {
        Node::Const(v) => finite(*v),
        Node::Slot(i) => finite(args[*i]),
        Node::Add(xs) => {
            let mut acc = 0.0;
            for x in xs {
                acc += run(x, args)?;
            }
            finite(acc)
        }
        Node::Mul(xs) => {
            let mut acc = 1.0;
            for x in xs {
                acc *= run(x, args)?;
            }
            finite(acc)
        }
        Node::Pow(a, b) => apply_pow(run(a, args)?, run(b, args)?).ok(),
        Node::Neg(a) => Some(-run(a, args)?),
        Node::Div(a, b) => {
            let num = run(a, args)?;
            let den = run(b, args)?;
            if den == 0.0 {
                return None;
            }
            finite(num / den)
        }
        Node::Apply(f, a) => apply_func(*f, run(a, args)?).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn agrees_with_tree_evaluation() {
        let e = parse("-x + eps*x^3*cos(t) - F0/xdot").unwrap();
        let params: Binding = [("eps".to_string(), 0.1), ("F0".to_string(), 2.0)].into();
        let c = CompiledExpr::new(&e, &["x", "xdot", "t"], &params).unwrap();
        let mut b = params.clone();
        b.insert("x".into(), 0.7);
        b.insert("xdot".into(), -1.3);
        b.insert("t".into(), 2.5);
        assert_eq!(c.eval(&[0.7, -1.3, 2.5]).unwrap(), eval(&e, &b).unwrap());
    }

    #[test]
    fn unbound_at_compile_time() {
        let e = parse("x + k").unwrap();
        assert_eq!(
            CompiledExpr::new(&e, &["x"], &Binding::new()).unwrap_err(),
            ExprError::Unbound("k".into())
        );
    }

    #[test]
    fn failures_carry_the_subtree() {
        let e = parse("1 + ln(x)").unwrap();
        let c = CompiledExpr::new(&e, &["x"], &Binding::new()).unwrap();
        assert!(
            matches!(c.eval(&[-1.0]), Err(ExprError::Domain { subtree, .. }) if subtree == "ln(x)")
        );
    }
}
