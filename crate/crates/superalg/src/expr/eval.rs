//! Exact and floating evaluation.
//!
//! Evaluation is exact whenever every binding is rational and no irrational
//! function or non-perfect root is hit; it degrades to `f64` otherwise. A
//! valuation may additionally bind function atoms (`sin`/`cos` of a specific
//! argument) to exact rationals; this backs the circle-consistent sampling
//! used for trigonometric-in-momenta systems.

use super::normal::normalize;
use super::{Expr, Func, Rat};
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("even root of a negative value")]
    EvenRootOfNegative,
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("non-finite floating value")]
    NonFinite,
}

/// Exact-or-floating scalar result.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rat),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(f) => *f,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Float(f) => *f == 0.0,
        }
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }
}

/// Bindings for symbols, plus optional exact values for function atoms keyed
/// by their canonical expression.
#[derive(Debug, Clone, Default)]
pub struct Valuation {
    pub symbols: BTreeMap<String, Value>,
    pub atoms: BTreeMap<Expr, Rat>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: &str, v: Rat) -> &mut Self {
        self.symbols.insert(name.to_string(), Value::Exact(v));
        self
    }

    pub fn bind_float(&mut self, name: &str, v: f64) -> &mut Self {
        self.symbols.insert(name.to_string(), Value::Float(v));
        self
    }

    pub fn bind_atom(&mut self, func: Func, arg: &Expr, v: Rat) -> &mut Self {
        self.atoms.insert(atom_key(func, arg), v);
        self
    }

    pub fn all_exact(&self) -> bool {
        self.symbols
            .values()
            .all(|v| matches!(v, Value::Exact(_)))
    }
}

/// Canonical lookup key for a bound function atom.
pub fn atom_key(func: Func, arg: &Expr) -> Expr {
    Expr::Apply(func, Box::new(normalize(arg)))
}

/// Real power with signed odd roots: `x^(p/q)` for reduced `p/q`.
pub fn real_pow(x: f64, p: i64, q: u64) -> f64 {
    if q == 1 {
        return x.powi(p as i32);
    }
    if x < 0.0 {
        if q % 2 == 0 {
            return f64::NAN;
        }
        let mag = (-x).powf(p as f64 / q as f64);
        return if p % 2 == 0 { mag } else { -mag };
    }
    x.powf(p as f64 / q as f64)
}

fn exact_int_pow(base: &Rat, n: i32) -> Result<Rat, EvalError> {
    if base.is_zero() && n < 0 {
        return Err(EvalError::DivisionByZero);
    }
    Ok(base.pow(n))
}

fn exact_root(base: &Rat, exp: &Rat) -> Option<Rat> {
    // Delegates to the same logic used by normalization.
    super::normal_exact_rat_pow(base, exp)
}

pub fn evaluate(e: &Expr, v: &Valuation) -> Result<Value, EvalError> {
    let out = eval_inner(e, v)?;
    if let Value::Float(f) = out {
        if !f.is_finite() {
            return Err(EvalError::NonFinite);
        }
    }
    Ok(out)
}

fn eval_inner(e: &Expr, v: &Valuation) -> Result<Value, EvalError> {
    match e {
        Expr::Num(r) => Ok(Value::Exact(r.clone())),
        Expr::Sym(s) => v
            .symbols
            .get(s)
            .cloned()
            .ok_or_else(|| EvalError::UnboundSymbol(s.clone())),
        Expr::Sum(ts) => {
            let mut exact = Rat::zero();
            let mut float = 0.0f64;
            let mut is_float = false;
            for t in ts {
                match eval_inner(t, v)? {
                    Value::Exact(r) => {
                        if is_float {
                            float += r.to_f64().unwrap_or(f64::NAN);
                        } else {
                            exact += r;
                        }
                    }
                    Value::Float(f) => {
                        if !is_float {
                            is_float = true;
                            float = exact.to_f64().unwrap_or(f64::NAN);
                        }
                        float += f;
                    }
                }
            }
            Ok(if is_float {
                Value::Float(float)
            } else {
                Value::Exact(exact)
            })
        }
        Expr::Prod(fs) => {
            let mut exact = Rat::from_integer(1.into());
            let mut float = 1.0f64;
            let mut is_float = false;
            for f in fs {
                match eval_inner(f, v)? {
                    Value::Exact(r) => {
                        if is_float {
                            float *= r.to_f64().unwrap_or(f64::NAN);
                        } else {
                            exact *= r;
                        }
                    }
                    Value::Float(x) => {
                        if !is_float {
                            is_float = true;
                            float = exact.to_f64().unwrap_or(f64::NAN);
                        }
                        float *= x;
                    }
                }
            }
            Ok(if is_float {
                Value::Float(float)
            } else {
                Value::Exact(exact)
            })
        }
        Expr::Pow(b, exp) => {
            let base = eval_inner(b, v)?;
            match base {
                Value::Exact(r) => {
                    if exp.is_integer() {
                        match exp.numer().to_i32() {
                            Some(n) => Ok(Value::Exact(exact_int_pow(&r, n)?)),
                            None => Err(EvalError::NonFinite),
                        }
                    } else {
                        if r.is_zero() {
                            return if exp.is_positive() {
                                Ok(Value::Exact(Rat::zero()))
                            } else {
                                Err(EvalError::DivisionByZero)
                            };
                        }
                        if r.is_negative() && exp.denom().to_u64().map_or(true, |q| q % 2 == 0) {
                            return Err(EvalError::EvenRootOfNegative);
                        }
                        if let Some(exact) = exact_root(&r, exp) {
                            return Ok(Value::Exact(exact));
                        }
                        let p = exp.numer().to_i64().ok_or(EvalError::NonFinite)?;
                        let q = exp.denom().to_u64().ok_or(EvalError::NonFinite)?;
                        Ok(Value::Float(real_pow(
                            r.to_f64().unwrap_or(f64::NAN),
                            p,
                            q,
                        )))
                    }
                }
                Value::Float(f) => {
                    if f == 0.0 && exp.is_negative() {
                        return Err(EvalError::DivisionByZero);
                    }
                    if f < 0.0 && !exp.is_integer() {
                        if exp.denom().to_u64().map_or(true, |q| q % 2 == 0) {
                            return Err(EvalError::EvenRootOfNegative);
                        }
                    }
                    let p = exp.numer().to_i64().ok_or(EvalError::NonFinite)?;
                    let q = exp.denom().to_u64().ok_or(EvalError::NonFinite)?;
                    Ok(Value::Float(real_pow(f, p, q)))
                }
            }
        }
        Expr::Apply(func, arg) => {
            if !v.atoms.is_empty() {
                let key = atom_key(*func, arg);
                if let Some(val) = v.atoms.get(&key) {
                    return Ok(Value::Exact(val.clone()));
                }
            }
            let a = eval_inner(arg, v)?;
            if let Value::Exact(r) = &a {
                if r.is_zero() {
                    return Ok(Value::Exact(match func {
                        Func::Sin => Rat::zero(),
                        Func::Cos => Rat::from_integer(1.into()),
                    }));
                }
            }
            let x = a.to_f64();
            Ok(Value::Float(match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }))
        }
    }
}

// ---------------------------------------------------------------------------
// Compiled f64 programs for the numeric hot paths
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum Instr {
    Const(f64),
    Load(usize),
    Add(usize),
    Mul(usize),
    PowRat { p: i64, q: u64 },
    Sin,
    Cos,
}

/// An expression compiled to a postfix program over a fixed symbol layout.
/// Used by the integrator and the contour tracer, where tree-walking with
/// rational constants would dominate the runtime.
#[derive(Debug, Clone)]
pub struct FloatProgram {
    instrs: Vec<Instr>,
}

impl FloatProgram {
    /// Compile against a symbol -> slot mapping. Unbound symbols are an
    /// error at compile time.
    pub fn compile(e: &Expr, slots: &BTreeMap<String, usize>) -> Result<Self, EvalError> {
        let mut instrs = Vec::new();
        compile_into(e, slots, &mut instrs)?;
        Ok(FloatProgram { instrs })
    }

    pub fn eval(&self, slots: &[f64], stack: &mut Vec<f64>) -> f64 {
        stack.clear();
        for ins in &self.instrs {
            match ins {
                Instr::Const(c) => stack.push(*c),
                Instr::Load(i) => stack.push(slots[*i]),
                Instr::Add(n) => {
                    let mut acc = 0.0;
                    for _ in 0..*n {
                        acc += stack.pop().unwrap();
                    }
                    stack.push(acc);
                }
                Instr::Mul(n) => {
                    let mut acc = 1.0;
                    for _ in 0..*n {
                        acc *= stack.pop().unwrap();
                    }
                    stack.push(acc);
                }
                Instr::PowRat { p, q } => {
                    let x = stack.pop().unwrap();
                    stack.push(real_pow(x, *p, *q));
                }
                Instr::Sin => {
                    let x = stack.pop().unwrap();
                    stack.push(x.sin());
                }
                Instr::Cos => {
                    let x = stack.pop().unwrap();
                    stack.push(x.cos());
                }
            }
        }
        stack.pop().unwrap_or(f64::NAN)
    }
}

fn compile_into(
    e: &Expr,
    slots: &BTreeMap<String, usize>,
    out: &mut Vec<Instr>,
) -> Result<(), EvalError> {
    match e {
        Expr::Num(r) => out.push(Instr::Const(r.to_f64().unwrap_or(f64::NAN))),
        Expr::Sym(s) => {
            let slot = slots
                .get(s)
                .ok_or_else(|| EvalError::UnboundSymbol(s.clone()))?;
            out.push(Instr::Load(*slot));
        }
        Expr::Sum(ts) => {
            for t in ts {
                compile_into(t, slots, out)?;
            }
            out.push(Instr::Add(ts.len()));
        }
        Expr::Prod(fs) => {
            for f in fs {
                compile_into(f, slots, out)?;
            }
            out.push(Instr::Mul(fs.len()));
        }
        Expr::Pow(b, exp) => {
            compile_into(b, slots, out)?;
            let p = exp.numer().to_i64().ok_or(EvalError::NonFinite)?;
            let q = exp.denom().to_u64().ok_or(EvalError::NonFinite)?;
            out.push(Instr::PowRat { p, q });
        }
        Expr::Apply(f, a) => {
            compile_into(a, slots, out)?;
            out.push(match f {
                Func::Sin => Instr::Sin,
                Func::Cos => Instr::Cos,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{parse, rat, rint};
    use super::*;

    fn val(pairs: &[(&str, Rat)]) -> Valuation {
        let mut v = Valuation::new();
        for (k, r) in pairs {
            v.bind(k, r.clone());
        }
        v
    }

    #[test]
    fn exact_polynomial_evaluation() {
        let e = parse("x^2*y + 1/2", &[]).unwrap();
        let v = val(&[("x", rint(3)), ("y", rat(1, 3))]);
        assert_eq!(evaluate(&e, &v).unwrap(), Value::Exact(rat(7, 2)));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let e = parse("x/x", &[]).unwrap();
        let v = val(&[("x", rint(0))]);
        assert_eq!(evaluate(&e, &v), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn even_root_of_negative_is_an_error() {
        let e = parse("sqrt(x)", &[]).unwrap();
        let v = val(&[("x", rint(-4))]);
        assert_eq!(evaluate(&e, &v), Err(EvalError::EvenRootOfNegative));
    }

    #[test]
    fn unbound_symbol_is_an_error() {
        let e = parse("x + y", &[]).unwrap();
        let v = val(&[("x", rint(1))]);
        assert!(matches!(
            evaluate(&e, &v),
            Err(EvalError::UnboundSymbol(s)) if s == "y"
        ));
    }

    #[test]
    fn perfect_roots_stay_exact() {
        let e = parse("sqrt(x^2+y^2)", &[]).unwrap();
        let v = val(&[("x", rint(3)), ("y", rint(4))]);
        assert_eq!(evaluate(&e, &v).unwrap(), Value::Exact(rint(5)));
        let e = parse("cbrt(x)", &[]).unwrap();
        let v = val(&[("x", rint(-27))]);
        assert_eq!(evaluate(&e, &v).unwrap(), Value::Exact(rint(-3)));
    }

    #[test]
    fn irrational_falls_to_float() {
        let e = parse("sqrt(2)*sqrt(2)", &[]).unwrap();
        // The tree evaluates via floats; normalization is what restores
        // exactness for such products.
        let got = evaluate(&e, &Valuation::new()).unwrap().to_f64();
        assert!((got - 2.0).abs() < 1e-12);
    }

    #[test]
    fn atom_bindings_short_circuit_trig() {
        let e = parse("sin(x)^2 + cos(x)^2", &[]).unwrap();
        let mut v = Valuation::new();
        v.bind("x", rint(7));
        v.bind_atom(Func::Sin, &Expr::sym("x"), rat(3, 5));
        v.bind_atom(Func::Cos, &Expr::sym("x"), rat(4, 5));
        assert_eq!(evaluate(&e, &v).unwrap(), Value::Exact(rint(1)));
    }

    #[test]
    fn compiled_program_matches_tree_eval() {
        let e = parse("px^2/2 + sin(x)*cos(y*py^2) - 3/4*x^(1/3)", &[]).unwrap();
        let mut slots = BTreeMap::new();
        for (i, s) in ["x", "y", "px", "py"].iter().enumerate() {
            slots.insert(s.to_string(), i);
        }
        let prog = FloatProgram::compile(&e, &slots).unwrap();
        let vals = [1.7, -0.3, 0.9, 1.1];
        let mut stack = Vec::new();
        let got = prog.eval(&vals, &mut stack);
        let mut v = Valuation::new();
        v.bind_float("x", vals[0]);
        v.bind_float("y", vals[1]);
        v.bind_float("px", vals[2]);
        v.bind_float("py", vals[3]);
        let want = evaluate(&e, &v).unwrap().to_f64();
        assert!((got - want).abs() < 1e-12);
    }
}
