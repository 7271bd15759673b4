//! Canonical Poisson bracket on the 4D phase space `(x, y, px, py)`.

use crate::expr::{
    differentiate, equal_identically, normalize, Domain, Expr, IdentityOptions, IdentityVerdict,
    SampleError,
};

const PAIRS: [(&str, &str); 2] = [("x", "px"), ("y", "py")];

/// `{f, g}` as an unnormalized derivative combination. Useful when the
/// caller wants to run identity testing on the raw tree (the certificate
/// then reflects the nature of the inputs rather than of the collected
/// result).
pub fn bracket_raw(f: &Expr, g: &Expr) -> Expr {
    let mut terms = Vec::with_capacity(4);
    for (q, p) in PAIRS {
        terms.push(Expr::prod(vec![differentiate(f, q), differentiate(g, p)]));
        terms.push(Expr::prod(vec![differentiate(f, p), differentiate(g, q)]).neg());
    }
    Expr::sum(terms)
}

/// Canonical Poisson bracket, returned in normal form so that zero is
/// structurally detectable for polynomial inputs.
pub fn poisson_bracket(f: &Expr, g: &Expr) -> Expr {
    normalize(&bracket_raw(f, g))
}

/// Check `{f, H} == 0` over the system domain.
pub fn is_integral(
    f: &Expr,
    hamiltonian: &Expr,
    domain: &Domain,
    opts: &IdentityOptions,
) -> Result<IdentityVerdict, SampleError> {
    let raw = bracket_raw(f, hamiltonian);
    equal_identically(&raw, &Expr::zero(), domain, opts)
}
