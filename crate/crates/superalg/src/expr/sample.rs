//! Seeded rational point sampling with domain exclusions.
//!
//! Points are rationals with numerator and denominator bounded by 50,
//! rejection-sampled away from the declared exclusions. Per-system strategies
//! keep evaluation exact where the expressions involve roots: cube-valued `x`
//! for cube-root systems, Pythagorean `(x, y)` pairs where `sqrt(x^2+y^2)`
//! appears, and rational circle points for bound sin/cos atoms.

use super::{evaluate, rat, Expr, Func, Rat, Valuation};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SampleError {
    #[error("domain too restrictive: sampling failed after {0} rejections")]
    TooRestrictive(u32),
}

/// A point-set restriction attached to a system.
#[derive(Debug, Clone, PartialEq)]
pub enum Exclusion {
    NonZero(Expr),
    Positive(Expr),
}

impl Exclusion {
    pub fn describe(&self) -> String {
        match self {
            Exclusion::NonZero(e) => format!("{} != 0", e),
            Exclusion::Positive(e) => format!("{} > 0", e),
        }
    }
}

/// Coordinate sampling strategy; chosen per catalog system so that identity
/// tests evaluate exactly wherever the algebra allows it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleStrategy {
    #[default]
    Generic,
    /// `x = t^3` with `t > 0`: fractional powers of `x` evaluate exactly.
    CubeX,
    /// `(x, y)` from scaled Pythagorean pairs: `sqrt(x^2+y^2)` is rational.
    PythagoreanXY,
    /// Each distinct sin/cos argument receives a rational circle point, bound
    /// as an exact atom value. Sound for expressions whose only dependence on
    /// the argument's variables is through those atoms.
    CircleAtoms,
}

#[derive(Debug, Clone, Default)]
pub struct Domain {
    pub exclusions: Vec<Exclusion>,
    pub strategy: SampleStrategy,
}

impl Domain {
    pub fn unrestricted() -> Domain {
        Domain::default()
    }

    pub fn with_exclusions(exclusions: Vec<Exclusion>) -> Domain {
        Domain {
            exclusions,
            strategy: SampleStrategy::Generic,
        }
    }

    /// True when the valuation respects every exclusion (evaluation failures
    /// count as violations).
    pub fn allows(&self, v: &Valuation) -> bool {
        self.exclusions.iter().all(|ex| match ex {
            Exclusion::NonZero(g) => match evaluate(g, v) {
                Ok(val) => !val.is_zero(),
                Err(_) => false,
            },
            Exclusion::Positive(g) => match evaluate(g, v) {
                Ok(super::Value::Exact(r)) => r.is_positive(),
                Ok(super::Value::Float(f)) => f > 0.0,
                Err(_) => false,
            },
        })
    }
}

/// Collect the distinct canonical arguments of sin/cos applications.
pub fn collect_func_args(e: &Expr, out: &mut BTreeSet<Expr>) {
    match e {
        Expr::Num(_) | Expr::Sym(_) => {}
        Expr::Sum(es) | Expr::Prod(es) => {
            for t in es {
                collect_func_args(t, out);
            }
        }
        Expr::Pow(b, _) => collect_func_args(b, out),
        Expr::Apply(_, a) => {
            out.insert(super::normalize(a));
            collect_func_args(a, out);
        }
    }
}

/// Seeded sampler over a domain.
pub struct Sampler<'a> {
    pub domain: &'a Domain,
    pub rng: ChaCha8Rng,
    /// Use the full +/-50 rational box (identity testing); otherwise a small
    /// box that keeps high powers cheap during exact fits.
    pub wide: bool,
}

impl<'a> Sampler<'a> {
    pub fn new(domain: &'a Domain, rng: ChaCha8Rng) -> Self {
        Sampler {
            domain,
            rng,
            wide: true,
        }
    }

    fn draw_rat(&mut self) -> Rat {
        let (nb, db) = if self.wide { (50, 50) } else { (6, 4) };
        let num = self.rng.gen_range(-nb..=nb);
        let den = self.rng.gen_range(1..=db);
        rat(num, den)
    }


    /// Draw a valuation for the given symbols (and circle values for the
    /// given canonical function arguments when the strategy asks for them).
    /// Retries around exclusions; errors once the rejection budget is spent.
    pub fn sample(
        &mut self,
        symbols: &BTreeSet<String>,
        atom_args: &BTreeSet<Expr>,
    ) -> Result<Valuation, SampleError> {
        const BUDGET: u32 = 4000;
        for _ in 0..BUDGET {
            let mut v = Valuation::new();
            match self.domain.strategy {
                SampleStrategy::Generic | SampleStrategy::CircleAtoms => {
                    for s in symbols {
                        let r = self.draw_rat();
                        v.bind(s, r);
                    }
                }
                SampleStrategy::CubeX => {
                    for s in symbols {
                        if s == "x" {
                            let tn: i64 = self.rng.gen_range(1..=4);
                            let td: i64 = self.rng.gen_range(1..=2);
                            let t = rat(tn, td);
                            v.bind(s, t.clone() * t.clone() * t);
                        } else {
                            let r = self.draw_rat();
                            v.bind(s, r);
                        }
                    }
                }
                SampleStrategy::PythagoreanXY => {
                    let m: i64 = self.rng.gen_range(2..=5);
                    let n: i64 = self.rng.gen_range(1..m);
                    let scale = {
                        let num = self.rng.gen_range(1..=5);
                        let den = self.rng.gen_range(1..=5);
                        rat(num, den)
                    };
                    let mut legs = [rat(m * m - n * n, 1), rat(2 * m * n, 1)];
                    if self.rng.gen_bool(0.5) {
                        legs.swap(0, 1);
                    }
                    let sx = if self.rng.gen_bool(0.5) { 1 } else { -1 };
                    let sy = if self.rng.gen_bool(0.5) { 1 } else { -1 };
                    for s in symbols {
                        match s.as_str() {
                            "x" => {
                                v.bind(s, legs[0].clone() * scale.clone() * rat(sx, 1));
                            }
                            "y" => {
                                v.bind(s, legs[1].clone() * scale.clone() * rat(sy, 1));
                            }
                            _ => {
                                let r = self.draw_rat();
                                v.bind(s, r);
                            }
                        }
                    }
                }
            }
            if self.domain.strategy == SampleStrategy::CircleAtoms {
                for arg in atom_args {
                    let a: i64 = self.rng.gen_range(1..=9);
                    let b: i64 = self.rng.gen_range(1..=9);
                    let h = rat(a * a + b * b, 1);
                    let sin_v = rat(2 * a * b, 1) / h.clone();
                    let cos_v = rat(a * a - b * b, 1) / h;
                    let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
                    v.atoms
                        .insert(Expr::Apply(Func::Sin, Box::new(arg.clone())), sin_v * rat(sign, 1));
                    v.atoms
                        .insert(Expr::Apply(Func::Cos, Box::new(arg.clone())), cos_v);
                }
            }
            if self.domain.allows(&v) {
                return Ok(v);
            }
        }
        Err(SampleError::TooRestrictive(4000))
    }

    /// Sample, additionally requiring `guard` to evaluate successfully to a
    /// nonzero value (used e.g. to keep `A != 0` during ratio detection).
    pub fn sample_where_nonzero(
        &mut self,
        symbols: &BTreeSet<String>,
        atom_args: &BTreeSet<Expr>,
        guard: &Expr,
    ) -> Result<(Valuation, super::Value), SampleError> {
        for _ in 0..200 {
            let v = self.sample(symbols, atom_args)?;
            if let Ok(val) = evaluate(guard, &v) {
                let nonzero = match &val {
                    super::Value::Exact(r) => !r.is_zero(),
                    super::Value::Float(f) => f.abs() > 1e-9,
                };
                if nonzero {
                    return Ok((v, val));
                }
            }
        }
        Err(SampleError::TooRestrictive(200))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn exclusions_reject_zero() {
        let domain = Domain::with_exclusions(vec![Exclusion::NonZero(Expr::sym("x"))]);
        let mut s = Sampler::new(&domain, ChaCha8Rng::seed_from_u64(1));
        let syms: BTreeSet<String> = ["x".to_string()].into_iter().collect();
        for _ in 0..50 {
            let v = s.sample(&syms, &BTreeSet::new()).unwrap();
            assert!(!v.symbols["x"].is_zero());
        }
    }

    #[test]
    fn pythagorean_points_make_radius_rational() {
        let domain = Domain {
            exclusions: vec![],
            strategy: SampleStrategy::PythagoreanXY,
        };
        let mut s = Sampler::new(&domain, ChaCha8Rng::seed_from_u64(2));
        let syms: BTreeSet<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let r = parse("sqrt(x^2+y^2)", &[]).unwrap();
        for _ in 0..30 {
            let v = s.sample(&syms, &BTreeSet::new()).unwrap();
            match evaluate(&r, &v).unwrap() {
                super::super::Value::Exact(_) => {}
                other => panic!("expected exact radius, got {other:?}"),
            }
        }
    }

    #[test]
    fn cube_x_keeps_cbrt_exact() {
        let domain = Domain {
            exclusions: vec![Exclusion::Positive(Expr::sym("x"))],
            strategy: SampleStrategy::CubeX,
        };
        let mut s = Sampler::new(&domain, ChaCha8Rng::seed_from_u64(3));
        let syms: BTreeSet<String> = ["x".to_string()].into_iter().collect();
        let e = parse("cbrt(x)", &[]).unwrap();
        for _ in 0..30 {
            let v = s.sample(&syms, &BTreeSet::new()).unwrap();
            assert!(matches!(
                evaluate(&e, &v).unwrap(),
                super::super::Value::Exact(_)
            ));
        }
    }

    #[test]
    fn circle_atoms_satisfy_pythagoras() {
        let domain = Domain {
            exclusions: vec![],
            strategy: SampleStrategy::CircleAtoms,
        };
        let mut s = Sampler::new(&domain, ChaCha8Rng::seed_from_u64(4));
        let syms: BTreeSet<String> = ["x".to_string()].into_iter().collect();
        let args: BTreeSet<Expr> = [Expr::sym("x")].into_iter().collect();
        let e = parse("sin(x)^2 + cos(x)^2 - 1", &[]).unwrap();
        for _ in 0..30 {
            let v = s.sample(&syms, &args).unwrap();
            assert!(evaluate(&e, &v).unwrap().is_zero());
        }
    }
}
