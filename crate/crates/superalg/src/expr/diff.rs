//! Exact partial differentiation with chain rule through powers and trig.

use super::{Expr, Func, Rat};
use num_traits::One;

/// Exact partial derivative of `e` with respect to the symbol `var`.
pub fn differentiate(e: &Expr, var: &str) -> Expr {
    match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Sym(s) => {
            if s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| differentiate(t, var)).collect()),
        Expr::Prod(fs) => {
            // Product rule over the n-ary product.
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                if !f.contains_symbol(var) {
                    continue;
                }
                let mut factors = Vec::with_capacity(fs.len());
                for (j, g) in fs.iter().enumerate() {
                    if i == j {
                        factors.push(differentiate(g, var));
                    } else {
                        factors.push(g.clone());
                    }
                }
                terms.push(Expr::prod(factors));
            }
            Expr::sum(terms)
        }
        Expr::Pow(b, exp) => {
            if !b.contains_symbol(var) {
                return Expr::zero();
            }
            // d/dv b^r = r * b^(r-1) * b'
            let r_minus_one = exp.clone() - Rat::one();
            Expr::prod(vec![
                Expr::Num(exp.clone()),
                Expr::pow((**b).clone(), r_minus_one),
                differentiate(b, var),
            ])
        }
        Expr::Apply(f, a) => {
            if !a.contains_symbol(var) {
                return Expr::zero();
            }
            let inner = differentiate(a, var);
            let outer = match f {
                Func::Sin => Expr::cos((**a).clone()),
                Func::Cos => Expr::sin((**a).clone()).neg(),
            };
            Expr::prod(vec![outer, inner])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{evaluate, normalize, parse, rat, rint, Valuation};
    use super::*;

    #[test]
    fn power_rule() {
        let e = parse("x^2*y", &[]).unwrap();
        let d = normalize(&differentiate(&e, "x"));
        let want = normalize(&parse("2*x*y", &[]).unwrap());
        assert_eq!(d, want);
    }

    #[test]
    fn chain_rule_through_cos() {
        let e = parse("cos(y*py^2)", &[]).unwrap();
        let d = normalize(&differentiate(&e, "py"));
        let want = normalize(&parse("-2*y*py*sin(y*py^2)", &[]).unwrap());
        assert_eq!(d, want);
    }

    #[test]
    fn inverse_sqrt_derivative() {
        // d/dx alpha/sqrt(x^2+y^2) = -alpha*x*(x^2+y^2)^(-3/2)
        let e = parse("alpha/sqrt(x^2+y^2)", &["alpha"]).unwrap();
        let d = normalize(&differentiate(&e, "x"));
        let want = normalize(
            &parse("-alpha*x*(x^2+y^2)^(-3/2)", &["alpha"]).unwrap(),
        );
        assert_eq!(d, want);
    }

    /// Centered finite differences as an independent oracle. Exercised more
    /// broadly over the catalog in the dynamics tests.
    #[test]
    fn finite_difference_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let exprs = [
            "alpha/sqrt(x^2+y^2)",
            "x^2*y - px*py^3",
            "cbrt(x)^4*px + y/x^2",
            "sin(x)*px^2*cos(y*py^2)^3",
        ];
        for s in exprs {
            let e = parse(s, &["alpha"]).unwrap();
            for var in ["x", "y", "px", "py"] {
                let d = differentiate(&e, var);
                for _ in 0..10 {
                    let mut v = Valuation::new();
                    for name in ["x", "y", "px", "py"] {
                        // Keep x positive and away from 0 for the root terms.
                        let num: i64 = if name == "x" {
                            rng.gen_range(4..=40)
                        } else {
                            let n = rng.gen_range(-20..=20);
                            if n == 0 {
                                3
                            } else {
                                n
                            }
                        };
                        let den: i64 = rng.gen_range(2..=9);
                        v.bind(name, rat(num, den));
                    }
                    v.bind("alpha", rint(1));
                    let h = 1e-6;
                    let base = v.symbols[var].to_f64();
                    let mut vp = v.clone();
                    vp.bind_float(var, base + h);
                    let mut vm = v.clone();
                    vm.bind_float(var, base - h);
                    let fd = (evaluate(&e, &vp).unwrap().to_f64()
                        - evaluate(&e, &vm).unwrap().to_f64())
                        / (2.0 * h);
                    let sym = evaluate(&d, &v).unwrap().to_f64();
                    let scale = 1.0 + sym.abs().max(fd.abs());
                    assert!(
                        (sym - fd).abs() / scale < 1e-6,
                        "d/d{var} {s}: symbolic {sym} vs fd {fd}"
                    );
                }
            }
        }
    }
}
