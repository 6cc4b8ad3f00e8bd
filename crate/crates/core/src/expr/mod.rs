//! Closed-form scalar expressions over chart coordinates.
//!
//! The grammar is deliberately tiny: real constants, coordinate symbols,
//! `+ - * /`, integer powers `^`, and `sqrt`. Every coefficient function the
//! engine needs is a polynomial or a sqrt of one, so nothing more is
//! provided. Expressions are immutable after construction and evaluation is
//! pure, so sharing them across threads is safe by construction.
//!
//! Evaluation comes in two flavours: plain [`Expr::eval`] and dual-number
//! [`Expr::eval_dual`] / [`Expr::eval_grad`], which propagate exact first
//! derivatives through the AST (see [`Dual`]).

mod dual;
mod parse;

pub use dual::Dual;
pub use parse::ParseError;

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// AST node. Binary nodes hold shared subtrees so clones are cheap.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Coordinate index into the enclosing chart.
    Coord(usize),
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    /// Integer power; exponent may be negative.
    Pow(Arc<Expr>, i32),
    Sqrt(Arc<Expr>),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn coord(i: usize) -> Expr {
        Expr::Coord(i)
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Arc::new(self))
    }

    pub fn powi(self, n: i32) -> Expr {
        Expr::Pow(Arc::new(self), n)
    }

    /// Structural zero test (used to keep built ASTs small, not to simplify).
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// Parse `text` against the coordinate names of a chart.
    pub fn parse(text: &str, coords: &[&str]) -> Result<Expr> {
        parse::parse(text, coords).map_err(|e| Error::Parse {
            offset: e.offset,
            message: e.message,
        })
    }

    /// Evaluate at a point. Division by zero and sqrt of a non-positive
    /// argument are domain errors naming the offending sub-expression.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Coord(i) => *p.get(*i).ok_or_else(|| Error::Domain {
                context: self.to_string(),
                message: format!("point has dimension {}, coordinate {} requested", p.len(), i),
            })?,
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Expr::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Expr::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Expr::Div(a, b) => {
                let d = b.eval(p)?;
                if d == 0.0 {
                    return Err(Error::Domain {
                        context: b.to_string(),
                        message: "division by zero".into(),
                    });
                }
                a.eval(p)? / d
            }
            Expr::Pow(a, n) => {
                let base = a.eval(p)?;
                if base == 0.0 && *n < 0 {
                    return Err(Error::Domain {
                        context: a.to_string(),
                        message: "zero raised to a negative power".into(),
                    });
                }
                base.powi(*n)
            }
            Expr::Sqrt(a) => {
                let v = a.eval(p)?;
                if v <= 0.0 {
                    return Err(Error::Domain {
                        context: a.to_string(),
                        message: format!("sqrt of non-positive value {v}"),
                    });
                }
                v.sqrt()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain {
                context: self.to_string(),
                message: format!("non-finite value {v}"),
            })
        }
    }

    /// Dual-number evaluation seeded with one tangent direction: returns the
    /// primal value together with the directional derivative along `dir`.
    pub fn eval_dual(&self, p: &[f64], dir: &[f64]) -> Result<Dual> {
        self.eval_seeded(p, &|i| vec![dir[i]])
    }

    /// Dual-number evaluation seeded with the identity: the partials of the
    /// result form the full gradient at `p`.
    pub fn eval_grad(&self, p: &[f64]) -> Result<Dual> {
        let n = p.len();
        self.eval_seeded(p, &|i| {
            let mut s = vec![0.0; n];
            s[i] = 1.0;
            s
        })
    }

    fn eval_seeded(&self, p: &[f64], seed: &dyn Fn(usize) -> Vec<f64>) -> Result<Dual> {
        let v = match self {
            Expr::Const(c) => Dual::constant(*c, seed(0).len()),
            Expr::Coord(i) => {
                let x = *p.get(*i).ok_or_else(|| Error::Domain {
                    context: self.to_string(),
                    message: format!("point has dimension {}, coordinate {} requested", p.len(), i),
                })?;
                Dual::new(x, seed(*i))
            }
            Expr::Neg(a) => -a.eval_seeded(p, seed)?,
            Expr::Add(a, b) => a.eval_seeded(p, seed)? + b.eval_seeded(p, seed)?,
            Expr::Sub(a, b) => a.eval_seeded(p, seed)? - b.eval_seeded(p, seed)?,
            Expr::Mul(a, b) => a.eval_seeded(p, seed)? * b.eval_seeded(p, seed)?,
            Expr::Div(a, b) => {
                let d = b.eval_seeded(p, seed)?;
                if d.value == 0.0 {
                    return Err(Error::Domain {
                        context: b.to_string(),
                        message: "division by zero".into(),
                    });
                }
                a.eval_seeded(p, seed)? / d
            }
            Expr::Pow(a, n) => {
                let base = a.eval_seeded(p, seed)?;
                if base.value == 0.0 && *n < 0 {
                    return Err(Error::Domain {
                        context: a.to_string(),
                        message: "zero raised to a negative power".into(),
                    });
                }
                base.powi(*n)
            }
            Expr::Sqrt(a) => {
                let v = a.eval_seeded(p, seed)?;
                if v.value <= 0.0 {
                    return Err(Error::Domain {
                        context: a.to_string(),
                        message: format!("sqrt of non-positive value {}", v.value),
                    });
                }
                v.sqrt()
            }
        };
        if v.value.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain {
                context: self.to_string(),
                message: format!("non-finite value {}", v.value),
            })
        }
    }

    /// Replace each coordinate symbol `i` by `subs[i]`. This is how ambient
    /// coefficient functions are pulled back along a parametrization: the
    /// result is an expression over the substituting chart.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Coord(i) => subs[*i].clone(),
            Expr::Neg(a) => Expr::Neg(Arc::new(a.substitute(subs))),
            Expr::Add(a, b) => Expr::Add(Arc::new(a.substitute(subs)), Arc::new(b.substitute(subs))),
            Expr::Sub(a, b) => Expr::Sub(Arc::new(a.substitute(subs)), Arc::new(b.substitute(subs))),
            Expr::Mul(a, b) => Expr::Mul(Arc::new(a.substitute(subs)), Arc::new(b.substitute(subs))),
            Expr::Div(a, b) => Expr::Div(Arc::new(a.substitute(subs)), Arc::new(b.substitute(subs))),
            Expr::Pow(a, n) => Expr::Pow(Arc::new(a.substitute(subs)), *n),
            Expr::Sqrt(a) => Expr::Sqrt(Arc::new(a.substitute(subs))),
        }
    }

    /// Render with the given coordinate names (the `Display` impl uses
    /// generic `x{i}` names).
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write(&mut s, names, 0).expect("string write");
        s
    }

    // Precedence levels: 0 add/sub, 1 mul/div, 2 unary neg, 3 pow/atom.
    fn write(&self, out: &mut String, names: &[String], parent: u8) -> fmt::Result {
        use fmt::Write;
        let prec = match self {
            Expr::Add(..) | Expr::Sub(..) => 0,
            Expr::Mul(..) | Expr::Div(..) => 1,
            // negative constants print with a leading minus, so they bind
            // like a unary negation for parenthesization
            Expr::Neg(..) => 2,
            Expr::Const(c) if *c < 0.0 => 2,
            _ => 3,
        };
        let need_paren = prec < parent;
        if need_paren {
            out.push('(');
        }
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    // render as a negation so the parser round-trips
                    write!(out, "-{}", fmt_f64(-c))?;
                } else {
                    write!(out, "{}", fmt_f64(*c))?;
                }
            }
            Expr::Coord(i) => {
                if let Some(n) = names.get(*i) {
                    out.push_str(n);
                } else {
                    write!(out, "x{i}")?;
                }
            }
            Expr::Neg(a) => {
                out.push('-');
                a.write(out, names, 3)?;
            }
            Expr::Add(a, b) => {
                a.write(out, names, 0)?;
                out.push_str(" + ");
                b.write(out, names, 1)?;
            }
            Expr::Sub(a, b) => {
                a.write(out, names, 0)?;
                out.push_str(" - ");
                b.write(out, names, 1)?;
            }
            Expr::Mul(a, b) => {
                a.write(out, names, 1)?;
                out.push('*');
                b.write(out, names, 2)?;
            }
            Expr::Div(a, b) => {
                a.write(out, names, 1)?;
                out.push('/');
                b.write(out, names, 3)?;
            }
            Expr::Pow(a, n) => {
                a.write(out, names, 4)?;
                if *n < 0 {
                    write!(out, "^({n})")?;
                } else {
                    write!(out, "^{n}")?;
                }
            }
            Expr::Sqrt(a) => {
                out.push_str("sqrt(");
                a.write(out, names, 0)?;
                out.push(')');
            }
        }
        if need_paren {
            out.push(')');
        }
        Ok(())
    }
}

/// Minimal float formatting that the parser reads back exactly.
fn fmt_f64(v: f64) -> String {
    let mut s = format!("{v}");
    if s == "-0" {
        s = "0".into();
    }
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, &[], 0)?;
        f.write_str(&s)
    }
}

// Operator overloads build ASTs with trivial structural pruning of exact
// zero/one constants. No algebraic rewriting happens here.

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        Expr::Add(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return -rhs;
        }
        Expr::Sub(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if matches!(self, Expr::Const(c) if c == 1.0) {
            return rhs;
        }
        if matches!(rhs, Expr::Const(c) if c == 1.0) {
            return self;
        }
        Expr::Mul(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        if self.is_zero() {
            return self;
        }
        match self {
            Expr::Neg(inner) => inner.as_ref().clone(),
            other => Expr::Neg(Arc::new(other)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords() -> Vec<&'static str> {
        vec!["x0", "x1", "x2", "x3"]
    }

    #[test]
    fn parses_sqrt_of_sum_of_squares() {
        let e = Expr::parse("sqrt(x2^2 + x3^2)", &coords()).unwrap();
        match &e {
            Expr::Sqrt(inner) => match inner.as_ref() {
                Expr::Add(a, b) => {
                    assert_eq!(**a, Expr::Pow(Arc::new(Expr::Coord(2)), 2));
                    assert_eq!(**b, Expr::Pow(Arc::new(Expr::Coord(3)), 2));
                }
                other => panic!("expected add under sqrt, got {other:?}"),
            },
            other => panic!("expected sqrt, got {other:?}"),
        }
        assert!((e.eval(&[0.0, 0.0, 1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((e.eval(&[0.0, 0.0, 3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn parses_zero_constant() {
        let e = Expr::parse("0", &coords()).unwrap();
        assert_eq!(e, Expr::Const(0.0));
        assert_eq!(e.eval(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 0.0);
    }

    #[test]
    fn polynomial_identity_evaluates_to_zero() {
        // x1*(x1+1) - x1^2 - x1 == 0, checked against direct evaluation
        let e = Expr::parse("x1*(x1+1) - x1^2 - x1", &coords()).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0;
            let direct = x * (x + 1.0) - x * x - x;
            let via_ast = e.eval(&[0.0, x, 0.0, 0.0]).unwrap();
            assert!((via_ast - direct).abs() < 1e-12);
            assert!(via_ast.abs() < 1e-12);
        }
    }

    #[test]
    fn dual_partial_of_product_rule() {
        // d(x1*x2)/dx1 at (2,3) = 3
        let e = Expr::parse("x1*x2", &coords()).unwrap();
        let d = e.eval_grad(&[0.0, 2.0, 3.0, 0.0]).unwrap();
        assert!((d.value - 6.0).abs() < 1e-15);
        assert!((d.partials[1] - 3.0).abs() < 1e-15);
        assert!((d.partials[2] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dual_partial_of_radius_at_unit_point() {
        // d sqrt(x2^2+x3^2)/dx2 at (1,0) = 1, cross-checked with central FD
        let e = Expr::parse("sqrt(x2^2 + x3^2)", &coords()).unwrap();
        let p = [0.0, 0.0, 1.0, 0.0];
        let d = e.eval_grad(&p).unwrap();
        assert!((d.partials[2] - 1.0).abs() < 1e-12);
        let h = 1e-6;
        let fd = (e.eval(&[0.0, 0.0, 1.0 + h, 0.0]).unwrap()
            - e.eval(&[0.0, 0.0, 1.0 - h, 0.0]).unwrap())
            / (2.0 * h);
        assert!((d.partials[2] - fd).abs() < 1e-9);
    }

    #[test]
    fn dual_of_constant_is_flat() {
        let e = Expr::parse("3.5", &coords()).unwrap();
        let d = e.eval_grad(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(d.value, 3.5);
        assert!(d.partials.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = Expr::parse("1/(x1 - 1)", &coords()).unwrap();
        let err = e.eval(&[0.0, 1.0, 0.0, 0.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("division by zero"), "{msg}");

        let e = Expr::parse("sqrt(x1)", &coords()).unwrap();
        assert!(e.eval(&[0.0, -2.0, 0.0, 0.0]).is_err());
        assert!(e.eval(&[0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn unknown_coordinate_is_rejected() {
        let err = Expr::parse("x9 + 1", &coords()).unwrap_err();
        assert!(err.to_string().contains("x9"));
    }

    #[test]
    fn substitution_composes() {
        // f(x2,x3) = sqrt(x2^2+x3^2) with x2 -> u^2, x3 -> 0 gives u^2
        let f = Expr::parse("sqrt(x2^2 + x3^2)", &coords()).unwrap();
        let subs = vec![
            Expr::zero(),
            Expr::zero(),
            Expr::coord(0).powi(2),
            Expr::zero(),
        ];
        let g = f.substitute(&subs);
        let v = g.eval(&[1.5]).unwrap();
        assert!((v - 2.25).abs() < 1e-15);
    }

    #[test]
    fn pretty_print_parse_is_a_fixed_point() {
        let names = coords();
        for src in [
            "sqrt(x2^2 + x3^2)",
            "-x1*(x1+1) - x1^2/(2 - x2) - x1",
            "x0^-2 + (x1 - x2)^3*sqrt(2)",
            "1/(4*(x2^2+x3^2))",
            "((x0))",
            "2.5e-3*x1 - 0.5",
        ] {
            let once = Expr::parse(src, &names).unwrap().to_string();
            let twice = Expr::parse(&once, &names).unwrap().to_string();
            assert_eq!(once, twice, "not a fixed point for {src}");
        }
    }
}
