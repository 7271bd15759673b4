//! Extraction of polynomial structure over a chosen variable set.

use super::normal::Base;
use super::{Expr, NormalForm};
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PolyError {
    #[error("not a polynomial in `{var}`: {reason}")]
    NotPolynomial { var: String, reason: String },
}

/// Write `e` as a polynomial in `vars` with coefficient expressions free of
/// `vars`. Keys are exponent tuples in the order of `vars`.
pub fn as_polynomial(
    e: &Expr,
    vars: &[&str],
) -> Result<std::collections::BTreeMap<Vec<u32>, Expr>, PolyError> {
    let nf = NormalForm::of(e);
    let mut grouped: std::collections::BTreeMap<Vec<u32>, Vec<Expr>> =
        std::collections::BTreeMap::new();
    for (factors, coeff) in nf.terms() {
        let mut exps = vec![0u32; vars.len()];
        let mut rest = Vec::new();
        if !coeff.is_one() {
            rest.push(Expr::Num(coeff.clone()));
        }
        for (base, exp) in factors {
            match base {
                Base::Sym(s) => {
                    if let Some(i) = vars.iter().position(|v| v == s) {
                        if !exp.is_integer() || exp.is_negative() {
                            return Err(PolyError::NotPolynomial {
                                var: s.clone(),
                                reason: format!("appears with exponent {exp}"),
                            });
                        }
                        exps[i] = exp.to_u32().ok_or_else(|| PolyError::NotPolynomial {
                            var: s.clone(),
                            reason: "exponent too large".into(),
                        })?;
                    } else {
                        rest.push(Expr::pow(Expr::Sym(s.clone()), exp.clone()));
                    }
                }
                Base::Atom(a) => {
                    if let Some(v) = vars.iter().find(|v| a.contains_symbol(v)) {
                        return Err(PolyError::NotPolynomial {
                            var: v.to_string(),
                            reason: format!("appears inside the opaque factor {a}"),
                        });
                    }
                    rest.push(Expr::pow(a.clone(), exp.clone()));
                }
            }
        }
        grouped.entry(exps).or_default().push(Expr::prod(rest));
    }
    let mut out = std::collections::BTreeMap::new();
    for (exps, terms) in grouped {
        let coeff = super::normalize(&Expr::sum(terms));
        if !coeff.is_zero_num() {
            out.insert(exps, coeff);
        }
    }
    Ok(out)
}
