//! Univariate functions of the metric parameter with Taylor-mode derivatives.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::jet::{factorial, Jet};

/// A user-supplied univariate function that can produce Taylor jets.
pub trait JetFunction: Send + Sync + fmt::Debug {
    /// Taylor coefficients of order `0..=order` at `t`.
    fn jet(&self, t: f64, order: usize) -> Jet;
    fn label(&self) -> String;
}

/// Expression tree over the single variable `t`.
#[derive(Clone, Debug)]
pub enum Expr {
    Const(f64),
    Var,
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, f64),
    Exp(Arc<Expr>),
    Log(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    /// An opaque jet function applied to an inner expression.
    Apply(Arc<dyn JetFunction>, Arc<Expr>),
    /// `n`-th derivative of an expression.
    Deriv(Arc<Expr>, usize),
}

impl Expr {
    fn jet(&self, t: f64, order: usize) -> Jet {
        match self {
            Expr::Const(c) => Jet::constant(*c, order),
            Expr::Var => Jet::variable(t, order),
            Expr::Add(a, b) => &a.jet(t, order) + &b.jet(t, order),
            Expr::Sub(a, b) => &a.jet(t, order) - &b.jet(t, order),
            Expr::Mul(a, b) => &a.jet(t, order) * &b.jet(t, order),
            Expr::Div(a, b) => a.jet(t, order).div(&b.jet(t, order)),
            Expr::Neg(a) => -&a.jet(t, order),
            Expr::Pow(a, p) => a.jet(t, order).powf(*p),
            Expr::Exp(a) => a.jet(t, order).exp(),
            Expr::Log(a) => a.jet(t, order).ln(),
            Expr::Sin(a) => a.jet(t, order).sin_cos().0,
            Expr::Cos(a) => a.jet(t, order).sin_cos().1,
            Expr::Apply(f, inner) => {
                if let Expr::Var = **inner {
                    return f.jet(t, order);
                }
                let ij = inner.jet(t, order);
                let outer = f.jet(ij.value(), order);
                Jet::compose(&outer.0, &ij)
            }
            Expr::Deriv(a, n) => {
                let j = a.jet(t, order + n);
                Jet((0..=order)
                    .map(|k| j.0[k + n] * factorial(k + n) / factorial(k))
                    .collect())
            }
        }
    }

    fn substitute(&self, inner: &Arc<Expr>) -> Arc<Expr> {
        use Expr::*;
        let s = |e: &Arc<Expr>| e.substitute(inner);
        Arc::new(match self {
            Const(c) => Const(*c),
            Var => return inner.clone(),
            Add(a, b) => Add(s(a), s(b)),
            Sub(a, b) => Sub(s(a), s(b)),
            Mul(a, b) => Mul(s(a), s(b)),
            Div(a, b) => Div(s(a), s(b)),
            Neg(a) => Neg(s(a)),
            Pow(a, p) => Pow(s(a), *p),
            Exp(a) => Exp(s(a)),
            Log(a) => Log(s(a)),
            Sin(a) => Sin(s(a)),
            Cos(a) => Cos(s(a)),
            Apply(f, a) => Apply(f.clone(), s(a)),
            Deriv(..) => {
                let me = Arc::new(self.clone());
                return Arc::new(Apply(Arc::new(ExprFunction(me)), inner.clone()));
            }
        })
    }

    /// Value at a complex argument, on the principal branch of `ln` and powers.
    /// Opaque functions and derivatives have no complex extension here.
    fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        Some(match self {
            Expr::Const(c) => Complex64::new(*c, 0.0),
            Expr::Var => z,
            Expr::Add(a, b) => a.eval_complex(z)? + b.eval_complex(z)?,
            Expr::Sub(a, b) => a.eval_complex(z)? - b.eval_complex(z)?,
            Expr::Mul(a, b) => a.eval_complex(z)? * b.eval_complex(z)?,
            Expr::Div(a, b) => a.eval_complex(z)? / b.eval_complex(z)?,
            Expr::Neg(a) => -a.eval_complex(z)?,
            Expr::Pow(a, p) if p.fract() == 0.0 && p.abs() < 64.0 => a.eval_complex(z)?.powi(*p as i32),
            Expr::Pow(a, p) => a.eval_complex(z)?.powf(*p),
            Expr::Exp(a) => a.eval_complex(z)?.exp(),
            Expr::Log(a) => a.eval_complex(z)?.ln(),
            Expr::Sin(a) => a.eval_complex(z)?.sin(),
            Expr::Cos(a) => a.eval_complex(z)?.cos(),
            Expr::Apply(..) | Expr::Deriv(..) => return None,
        })
    }

    fn polynomial(&self) -> Option<Vec<f64>> {
        use Expr::*;
        Some(match self {
            Const(c) => vec![*c],
            Var => vec![0.0, 1.0],
            Add(a, b) => poly_add(&a.polynomial()?, &b.polynomial()?, 1.0),
            Sub(a, b) => poly_add(&a.polynomial()?, &b.polynomial()?, -1.0),
            Mul(a, b) => poly_mul(&a.polynomial()?, &b.polynomial()?),
            Neg(a) => a.polynomial()?.iter().map(|c| -c).collect(),
            Div(a, b) => {
                let d = b.polynomial()?;
                if d.iter().skip(1).any(|c| *c != 0.0) || d[0] == 0.0 {
                    return None;
                }
                a.polynomial()?.iter().map(|c| c / d[0]).collect()
            }
            Pow(a, p) if p.fract() == 0.0 && *p >= 0.0 && *p <= 64.0 => {
                let base = a.polynomial()?;
                (0..*p as usize).fold(vec![1.0], |acc, _| poly_mul(&acc, &base))
            }
            Deriv(a, n) => {
                let mut c = a.polynomial()?;
                for _ in 0..*n {
                    c = c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect();
                    if c.is_empty() {
                        c.push(0.0);
                    }
                }
                c
            }
            _ => return None,
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        use Expr::*;
        let paren = |f: &mut fmt::Formatter<'_>, p: u8, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
            if prec > p {
                write!(f, "(")?;
                body(f)?;
                write!(f, ")")
            } else {
                body(f)
            }
        };
        match self {
            Const(c) => {
                if *c < 0.0 && prec > 0 {
                    write!(f, "({c})")
                } else {
                    write!(f, "{c}")
                }
            }
            Var => write!(f, "t"),
            Add(a, b) => paren(f, 1, &|f| {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)
            }),
            Sub(a, b) => paren(f, 1, &|f| {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)
            }),
            Mul(a, b) => paren(f, 2, &|f| {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)
            }),
            Div(a, b) => paren(f, 2, &|f| {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)
            }),
            Neg(a) => paren(f, 2, &|f| {
                write!(f, "-")?;
                a.fmt_prec(f, 3)
            }),
            Pow(a, p) => paren(f, 3, &|f| {
                a.fmt_prec(f, 4)?;
                if *p < 0.0 {
                    write!(f, "^({p})")
                } else {
                    write!(f, "^{p}")
                }
            }),
            Exp(a) => write!(f, "exp({})", Wrap(a)),
            Log(a) => write!(f, "log({})", Wrap(a)),
            Sin(a) => write!(f, "sin({})", Wrap(a)),
            Cos(a) => write!(f, "cos({})", Wrap(a)),
            Apply(g, a) => match **a {
                Var => write!(f, "{}", g.label()),
                _ => write!(f, "{}({})", g.label(), Wrap(a)),
            },
            Deriv(a, n) => write!(f, "D^{n}[{}]", Wrap(a)),
        }
    }
}

struct Wrap<'a>(&'a Expr);

impl fmt::Display for Wrap<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_prec(f, 0)
    }
}

#[derive(Debug)]
struct ExprFunction(Arc<Expr>);

impl JetFunction for ExprFunction {
    fn jet(&self, t: f64, order: usize) -> Jet {
        self.0.jet(t, order)
    }
    fn label(&self) -> String {
        format!("({})", Wrap(&self.0))
    }
}

fn poly_add(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(0.0) + s * b.get(k).copied().unwrap_or(0.0))
        .collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

/// A smooth univariate function `phi(t)`, cheap to clone.
#[derive(Clone, Debug)]
pub struct ScalarFunction(Arc<Expr>);

impl ScalarFunction {
    pub fn from_expr(e: Expr) -> Self {
        ScalarFunction(Arc::new(e))
    }

    pub fn from_jet_function(f: Arc<dyn JetFunction>) -> Self {
        Self::from_expr(Expr::Apply(f, Arc::new(Expr::Var)))
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(Expr::Const(c))
    }

    pub fn identity() -> Self {
        Self::from_expr(Expr::Var)
    }

    /// `t^p`.
    pub fn power(p: f64) -> Self {
        Self::identity().powf(p)
    }

    /// `exp(a t)`.
    pub fn exp_linear(a: f64) -> Self {
        Self::identity().scale(a).exp()
    }

    pub fn log() -> Self {
        Self::identity().ln()
    }

    pub fn sqrt() -> Self {
        Self::power(0.5)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            (Some(a), _) if a == 0.0 => o.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Self::from_expr(Expr::Add(self.0.clone(), o.0.clone())),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a - b),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Self::from_expr(Expr::Sub(self.0.clone(), o.0.clone())),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(a), _) if a == 0.0 => Self::constant(0.0),
            (_, Some(b)) if b == 0.0 => Self::constant(0.0),
            (Some(a), _) if a == 1.0 => o.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Self::from_expr(Expr::Mul(self.0.clone(), o.0.clone())),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a / b),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Self::from_expr(Expr::Div(self.0.clone(), o.0.clone())),
        }
    }

    pub fn neg(&self) -> Self {
        match self.as_const() {
            Some(a) => Self::constant(-a),
            None => Self::from_expr(Expr::Neg(self.0.clone())),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.mul(&Self::constant(s))
    }

    pub fn powf(&self, p: f64) -> Self {
        match self.as_const() {
            Some(a) => Self::constant(a.powf(p)),
            None if p == 1.0 => self.clone(),
            None if p == 0.0 => Self::constant(1.0),
            None => Self::from_expr(Expr::Pow(self.0.clone(), p)),
        }
    }

    pub fn exp(&self) -> Self {
        match self.as_const() {
            Some(a) => Self::constant(a.exp()),
            None => Self::from_expr(Expr::Exp(self.0.clone())),
        }
    }

    pub fn ln(&self) -> Self {
        Self::from_expr(Expr::Log(self.0.clone()))
    }

    pub fn sin(&self) -> Self {
        Self::from_expr(Expr::Sin(self.0.clone()))
    }

    pub fn cos(&self) -> Self {
        Self::from_expr(Expr::Cos(self.0.clone()))
    }

    /// `self(inner(t))`.
    pub fn compose(&self, inner: &Self) -> Self {
        ScalarFunction(self.0.substitute(&inner.0))
    }

    /// `n`-th derivative; `derivative(m).derivative(n) == derivative(m + n)`.
    pub fn derivative(&self, n: usize) -> Self {
        if n == 0 {
            return self.clone();
        }
        match &*self.0 {
            Expr::Deriv(a, m) => Self::from_expr(Expr::Deriv(a.clone(), m + n)),
            Expr::Const(_) => Self::constant(0.0),
            _ => Self::from_expr(Expr::Deriv(self.0.clone(), n)),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.jet(t, 0).value()
    }

    /// Value at a complex argument, if the expression is built from whitelist functions only.
    pub fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        self.0.eval_complex(z)
    }

    /// Taylor jet of the given order at `t`.
    pub fn jet(&self, t: f64, order: usize) -> Jet {
        self.0.jet(t, order)
    }

    /// Coefficients of `phi` if it is a polynomial in `t`, lowest degree first.
    pub fn as_polynomial(&self) -> Option<Vec<f64>> {
        let mut c = self.0.polynomial()?;
        while c.len() > 1 && *c.last().unwrap() == 0.0 {
            c.pop();
        }
        Some(c)
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_prec(f, 0)
    }
}
