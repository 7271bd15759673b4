//! Exact symbolic expression kernel.
//!
//! Expressions are immutable trees over phase-space coordinates (`x`, `y`,
//! `px`, `py`), declared parameters, arbitrary-precision rationals, and the
//! unary functions sin/cos. Square and cube roots are represented as powers
//! with rational exponent (`sqrt(u)` is `u^(1/2)`); the printer restores the
//! `sqrt`/`cbrt` spelling.

mod diff;
mod eval;
mod identity;
mod normal;
mod parse;
mod poly;
mod sample;

pub use diff::differentiate;
pub use eval::{evaluate, EvalError, FloatProgram, Valuation, Value};
pub use identity::{equal_identically, Certificate, IdentityOptions, IdentityVerdict, Witness};
pub use normal::{normalize, NormalForm};
pub(crate) use normal::exact_rat_pow as normal_exact_rat_pow;
pub use parse::{parse, parse_rational, parse_with_symbols, ParseError};
pub use poly::{as_polynomial, PolyError};
pub use sample::{collect_func_args, Domain, Exclusion, SampleError, SampleStrategy, Sampler};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// Arbitrary-precision rational scalar.
pub type Rat = BigRational;

/// Build a rational from an integer numerator and denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Build a rational from an integer.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Unary function heads that stay opaque under normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

/// Immutable symbolic expression tree.
///
/// Rational constants are kept in lowest terms with positive denominator
/// (guaranteed by `BigRational`). Sums and products are n-ary; powers carry a
/// rational exponent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    Num(Rat),
    Sym(String),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, Rat),
    Apply(Func, Box<Expr>),
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(rint(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Num(rat(num, den))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.to_string())
    }

    pub fn zero() -> Expr {
        Expr::Num(Rat::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rat::one())
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn prod(factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::Prod(factors),
        }
    }

    pub fn pow(base: Expr, exp: Rat) -> Expr {
        if exp.is_one() {
            base
        } else if exp.is_zero() {
            Expr::one()
        } else {
            Expr::Pow(Box::new(base), exp)
        }
    }

    pub fn powi(base: Expr, exp: i64) -> Expr {
        Expr::pow(base, rint(exp))
    }

    pub fn sqrt(e: Expr) -> Expr {
        Expr::pow(e, rat(1, 2))
    }

    pub fn cbrt(e: Expr) -> Expr {
        Expr::pow(e, rat(1, 3))
    }

    pub fn sin(e: Expr) -> Expr {
        Expr::Apply(Func::Sin, Box::new(e))
    }

    pub fn cos(e: Expr) -> Expr {
        Expr::Apply(Func::Cos, Box::new(e))
    }

    pub fn neg(self) -> Expr {
        Expr::Prod(vec![Expr::num(-1), self])
    }

    pub fn recip(self) -> Expr {
        Expr::pow(self, rint(-1))
    }

    pub fn is_zero_num(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_zero())
    }

    /// All symbol names appearing in the tree.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Sum(es) | Expr::Prod(es) => {
                for e in es {
                    e.collect_symbols(out);
                }
            }
            Expr::Pow(b, _) => b.collect_symbols(out),
            Expr::Apply(_, a) => a.collect_symbols(out),
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(s) => s == name,
            Expr::Sum(es) | Expr::Prod(es) => es.iter().any(|e| e.contains_symbol(name)),
            Expr::Pow(b, _) => b.contains_symbol(name),
            Expr::Apply(_, a) => a.contains_symbol(name),
        }
    }

    /// Replace symbols by expressions (simultaneous substitution).
    pub fn substitute(&self, map: &std::collections::BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expr::Sum(es) => Expr::Sum(es.iter().map(|e| e.substitute(map)).collect()),
            Expr::Prod(es) => Expr::Prod(es.iter().map(|e| e.substitute(map)).collect()),
            Expr::Pow(b, e) => Expr::Pow(Box::new(b.substitute(map)), e.clone()),
            Expr::Apply(f, a) => Expr::Apply(*f, Box::new(a.substitute(map))),
        }
    }

    /// True when the tree lies in the rational fragment: integer exponents
    /// only and no function applications. Zero normal form of such a tree is
    /// an unconditional identity (away from poles), which is what the
    /// "symbolic" certificate claims.
    pub fn is_rational_fragment(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Sym(_) => true,
            Expr::Sum(es) | Expr::Prod(es) => es.iter().all(|e| e.is_rational_fragment()),
            Expr::Pow(b, e) => e.is_integer() && b.is_rational_fragment(),
            Expr::Apply(_, _) => false,
        }
    }

    /// Node count, used by tests and sampling heuristics.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Sym(_) => 1,
            Expr::Sum(es) | Expr::Prod(es) => 1 + es.iter().map(Expr::size).sum::<usize>(),
            Expr::Pow(b, _) => 1 + b.size(),
            Expr::Apply(_, a) => 1 + a.size(),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        let mut terms = match self {
            Expr::Sum(ts) => ts,
            other => vec![other],
        };
        match rhs {
            Expr::Sum(ts) => terms.extend(ts),
            other => terms.push(other),
        }
        Expr::Sum(terms)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + rhs.neg()
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        let mut factors = match self {
            Expr::Prod(fs) => fs,
            other => vec![other],
        };
        match rhs {
            Expr::Prod(fs) => factors.extend(fs),
            other => factors.push(other),
        }
        Expr::Prod(factors)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        self * rhs.recip()
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Print a power factor with positive exponent, restoring sqrt/cbrt spelling.
fn fmt_pow_pos(base: &Expr, exp: &Rat) -> String {
    debug_assert!(exp.is_positive());
    let b = fmt_atom(base);
    if exp.is_integer() {
        if exp.is_one() {
            return b;
        }
        return format!("{}^{}", b, exp.numer());
    }
    let den = exp.denom();
    let num = exp.numer();
    if *den == BigInt::from(2) {
        let inner = format!("sqrt({})", fmt_expr(base));
        if num.is_one() {
            inner
        } else {
            format!("{}^{}", inner, num)
        }
    } else if *den == BigInt::from(3) {
        let inner = format!("cbrt({})", fmt_expr(base));
        if num.is_one() {
            inner
        } else {
            format!("{}^{}", inner, num)
        }
    } else {
        format!("{}^({}/{})", b, num, den)
    }
}

/// Parenthesize anything that is not atomic in factor position.
fn fmt_atom(e: &Expr) -> String {
    match e {
        Expr::Sym(s) => s.clone(),
        Expr::Num(r) if r.is_integer() && !r.is_negative() => fmt_rat(r),
        Expr::Apply(f, a) => format!("{}({})", f.name(), fmt_expr(a)),
        _ => format!("({})", fmt_expr(e)),
    }
}

fn fmt_factor(e: &Expr) -> String {
    match e {
        Expr::Pow(b, exp) if exp.is_positive() => fmt_pow_pos(b, exp),
        Expr::Pow(b, exp) => {
            // Standalone negative exponent inside a product is handled by the
            // product printer; reaching here means a bare reciprocal.
            let pos = -exp.clone();
            format!("1/{}", fmt_pow_pos(b, &pos))
        }
        _ => fmt_atom(e),
    }
}

fn fmt_prod(factors: &[Expr]) -> String {
    let mut coeff = Rat::one();
    let mut num_parts: Vec<String> = Vec::new();
    let mut den_parts: Vec<String> = Vec::new();
    for f in factors {
        match f {
            Expr::Num(r) => coeff *= r.clone(),
            Expr::Pow(b, exp) if exp.is_negative() => {
                let pos = -exp.clone();
                den_parts.push(fmt_pow_pos(b, &pos));
            }
            other => num_parts.push(fmt_factor(other)),
        }
    }
    let mut head = String::new();
    let num_den = coeff.denom().clone();
    let num_num = coeff.numer().clone();
    if num_num == BigInt::from(-1) && (!num_parts.is_empty() || !den_parts.is_empty()) {
        head.push('-');
    } else if !num_num.is_one() || num_parts.is_empty() {
        head.push_str(&num_num.to_string());
    }
    if !head.is_empty() && head != "-" && !num_parts.is_empty() {
        head.push('*');
    }
    let mut s = format!("{}{}", head, num_parts.join("*"));
    if !num_den.is_one() {
        den_parts.insert(0, num_den.to_string());
    }
    if !den_parts.is_empty() {
        if den_parts.len() == 1 && !den_parts[0].contains('*') {
            s.push_str(&format!("/{}", den_parts[0]));
        } else {
            s.push_str(&format!("/({})", den_parts.join("*")));
        }
    }
    s
}

fn fmt_expr(e: &Expr) -> String {
    match e {
        Expr::Num(r) => fmt_rat(r),
        Expr::Sym(s) => s.clone(),
        Expr::Apply(f, a) => format!("{}({})", f.name(), fmt_expr(a)),
        Expr::Pow(_, _) => fmt_factor(e),
        Expr::Prod(fs) => fmt_prod(fs),
        Expr::Sum(ts) => {
            let mut s = String::new();
            for (i, t) in ts.iter().enumerate() {
                let piece = fmt_expr(t);
                if i == 0 {
                    s.push_str(&piece);
                } else if let Some(stripped) = piece.strip_prefix('-') {
                    s.push_str(" - ");
                    s.push_str(stripped);
                } else {
                    s.push_str(" + ");
                    s.push_str(&piece);
                }
            }
            if ts.is_empty() {
                s.push('0');
            }
            s
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_expr(self))
    }
}
