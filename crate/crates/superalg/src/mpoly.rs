//! Exact multivariate polynomials over the rationals.
//!
//! Supports the elimination pipeline: Sylvester resultants with polynomial
//! entries (fraction-free Bareiss determinants), primitive-PRS gcd,
//! squarefree parts, and exact polynomial square roots. Degrees here are
//! small (desk-scale curves), so the representation is a plain sparse
//! exponent map with `BigRational` coefficients.

use crate::expr::{Expr, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u16>, Rat>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> MPoly {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> MPoly {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> MPoly {
        MPoly::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> MPoly {
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(e, Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn insert_term(&mut self, exps: Vec<u16>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c.clone();
        }
        out
    }

    pub fn pow(&self, n: u32) -> MPoly {
        let mut acc = MPoly::one(self.nvars);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn mul_var_pow(&self, v: usize, k: u16) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[v] += k;
            out.terms.insert(e2, c.clone());
        }
        out
    }

    pub fn deg_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn derivative(&self, v: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            let k = e2[v];
            e2[v] -= 1;
            out.insert_term(e2, c.clone() * Rat::from_integer(BigInt::from(k)));
        }
        out
    }

    /// Coefficients as polynomials in the remaining variables, indexed by the
    /// exponent of `v`.
    pub fn coeffs_in(&self, v: usize) -> Vec<MPoly> {
        let d = self.deg_in(v) as usize;
        let mut out = vec![MPoly::zero(self.nvars); d + 1];
        for (e, c) in &self.terms {
            let k = e[v] as usize;
            let mut e2 = e.clone();
            e2[v] = 0;
            out[k].insert_term(e2, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(nvars: usize, v: usize, coeffs: &[MPoly]) -> MPoly {
        let mut out = MPoly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            out = out.add(&c.mul_var_pow(v, k as u16));
        }
        out
    }

    pub fn lead_coeff_in(&self, v: usize) -> MPoly {
        let d = self.deg_in(v);
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == d {
                let mut e2 = e.clone();
                e2[v] = 0;
                out.insert_term(e2, c.clone());
            }
        }
        out
    }

    /// Leading (exponent, coeff) under graded lexicographic order.
    fn lead_term_grlex(&self) -> Option<(&Vec<u16>, &Rat)> {
        self.terms.iter().max_by(|(ea, _), (eb, _)| {
            let da: u32 = ea.iter().map(|&x| x as u32).sum();
            let db: u32 = eb.iter().map(|&x| x as u32).sum();
            da.cmp(&db).then_with(|| ea.cmp(eb))
        })
    }

    /// Positive rational content (gcd of |coefficients|).
    pub fn content_rat(&self) -> Rat {
        let mut acc: Option<Rat> = None;
        for c in self.terms.values() {
            let a = c.abs();
            acc = Some(match acc {
                None => a,
                Some(g) => Rat::new(g.numer().gcd(a.numer()), g.denom().lcm(a.denom())),
            });
        }
        acc.unwrap_or_else(Rat::one)
    }

    /// Divide by rational content and normalize the grlex-leading coefficient
    /// to be positive.
    pub fn primitive_rat(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content_rat();
        if let Some((_, lead)) = self.lead_term_grlex() {
            if lead.is_negative() {
                c = -c;
            }
        }
        self.scale(&c.recip())
    }

    pub fn eval_f64(&self, vals: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= vals[i].powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute exact rational values for a subset of variables.
    pub fn eval_partial(&self, bindings: &[(usize, Rat)]) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut e2 = e.clone();
            for (v, val) in bindings {
                let k = e2[*v];
                if k > 0 {
                    coeff *= val.pow(k as i32);
                    e2[*v] = 0;
                }
            }
            out.insert_term(e2, coeff);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Exact division, pseudo-remainder, gcd
// ---------------------------------------------------------------------------

/// Exact division `p / d`; `None` when not an exact multiple.
pub fn div_exact(p: &MPoly, d: &MPoly) -> Option<MPoly> {
    assert!(!d.is_zero(), "division by the zero polynomial");
    let mut rem = p.clone();
    let mut quo = MPoly::zero(p.nvars);
    let (d_exp, d_coeff) = {
        let (e, c) = d.lead_term_grlex()?;
        (e.clone(), c.clone())
    };
    let mut steps = 0usize;
    while !rem.is_zero() {
        steps += 1;
        if steps > 500_000 {
            return None;
        }
        let (r_exp, r_coeff) = {
            let (e, c) = rem.lead_term_grlex()?;
            (e.clone(), c.clone())
        };
        let mut q_exp = vec![0u16; p.nvars];
        for i in 0..p.nvars {
            if r_exp[i] < d_exp[i] {
                return None;
            }
            q_exp[i] = r_exp[i] - d_exp[i];
        }
        let q_coeff = r_coeff / d_coeff.clone();
        let mut mono = MPoly::zero(p.nvars);
        mono.terms.insert(q_exp, q_coeff);
        rem = rem.sub(&mono.mul(d));
        quo = quo.add(&mono);
    }
    Some(quo)
}

/// Pseudo-remainder of `a` by `b` in variable `v`:
/// `lc(b)^(da-db+1) * a = q*b + r` with `deg_v r < deg_v b`.
pub fn pseudo_rem(a: &MPoly, b: &MPoly, v: usize) -> MPoly {
    let db = b.deg_in(v);
    let lc_b = b.lead_coeff_in(v);
    let mut r = a.clone();
    let mut reps = (a.deg_in(v) as i32) - (db as i32) + 1;
    while !r.is_zero() && r.deg_in(v) >= db {
        let dr = r.deg_in(v);
        let lc_r = r.lead_coeff_in(v);
        r = r.mul(&lc_b).sub(&lc_r.mul_var_pow(v, dr - db).mul(b));
        reps -= 1;
    }
    if reps > 0 {
        r = r.mul(&lc_b.pow(reps as u32));
    }
    r
}

/// GCD by subresultant pseudo-remainder sequences, recursing over variables.
/// Normalized to primitive form with positive leading coefficient.
pub fn gcd(p: &MPoly, q: &MPoly) -> MPoly {
    if p.is_zero() {
        return q.primitive_rat();
    }
    if q.is_zero() {
        return p.primitive_rat();
    }
    let v = (0..p.nvars).find(|&i| p.deg_in(i) > 0 || q.deg_in(i) > 0);
    let Some(v) = v else {
        return MPoly::one(p.nvars);
    };
    if p.deg_in(v) == 0 || q.deg_in(v) == 0 {
        // One side is free of the chosen variable: the gcd divides the
        // content of the other side with respect to it.
        let (free, other) = if p.deg_in(v) == 0 { (p, q) } else { (q, p) };
        return gcd(free, &content_in(other, v));
    }
    let cont_p = content_in(p, v);
    let cont_q = content_in(q, v);
    let cont_gcd = gcd(&cont_p, &cont_q);
    let mut a = div_exact(p, &cont_p).expect("content divides").primitive_rat();
    let mut b = div_exact(q, &cont_q).expect("content divides").primitive_rat();
    if a.deg_in(v) < b.deg_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    // Subresultant sequence: divide each pseudo-remainder by the known
    // factor g*h^delta instead of recomputing contents at every step.
    let mut g = MPoly::one(p.nvars);
    let mut h = MPoly::one(p.nvars);
    loop {
        if b.is_zero() {
            let prim = primitive_in(&a, v);
            return cont_gcd.mul(&prim).primitive_rat();
        }
        if b.deg_in(v) == 0 {
            return cont_gcd.primitive_rat();
        }
        let delta = (a.deg_in(v) - b.deg_in(v)) as u32;
        let r = pseudo_rem(&a, &b, v);
        let divisor = g.mul(&h.pow(delta));
        a = b;
        b = if r.is_zero() {
            r
        } else {
            div_exact(&r, &divisor).expect("subresultant division is exact")
        };
        g = a.lead_coeff_in(v);
        h = if delta == 0 {
            h
        } else if delta == 1 {
            g.clone()
        } else {
            // h = g^delta / h^(delta-1)
            div_exact(&g.pow(delta), &h.pow(delta - 1))
                .expect("subresultant h update is exact")
        };
    }
}

/// Content of `p` with respect to variable `v`: gcd of its `v`-coefficients.
fn content_in(p: &MPoly, v: usize) -> MPoly {
    let coeffs = p.coeffs_in(v);
    let mut acc = MPoly::zero(p.nvars);
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        acc = if acc.is_zero() { c } else { gcd(&acc, &c) };
        if acc.is_constant() && !acc.is_zero() {
            return MPoly::one(p.nvars);
        }
    }
    if acc.is_zero() {
        MPoly::one(p.nvars)
    } else {
        acc
    }
}

fn primitive_in(p: &MPoly, v: usize) -> MPoly {
    let c = content_in(p, v);
    div_exact(p, &c).expect("content divides").primitive_rat()
}

/// Squarefree part: `p / gcd(p, dp/dx, dp/dy, ...)`, primitive-normalized.
/// Perfect powers of two (the common resultant case) are peeled by exact
/// square roots first, which is far cheaper than the gcd route.
pub fn squarefree_part(p: &MPoly) -> MPoly {
    if p.is_zero() {
        return p.clone();
    }
    let mut base = p.primitive_rat();
    while let Some(root) = poly_sqrt(&base) {
        if root.is_constant() {
            break;
        }
        base = root.primitive_rat();
    }
    let mut g = base.clone();
    for v in 0..base.nvars {
        if base.deg_in(v) > 0 {
            g = gcd(&g, &base.derivative(v));
        }
    }
    if g.is_constant() {
        return base;
    }
    div_exact(&base, &g)
        .expect("squarefree gcd divides")
        .primitive_rat()
}

/// Strip per-variable monomial content `x_i^k` (returns the stripped
/// polynomial and the removed exponents).
pub fn strip_monomial_content(p: &MPoly) -> (MPoly, Vec<u16>) {
    if p.is_zero() {
        return (p.clone(), vec![0; p.nvars]);
    }
    let mut mins = vec![u16::MAX; p.nvars];
    for e in p.terms.keys() {
        for i in 0..p.nvars {
            mins[i] = mins[i].min(e[i]);
        }
    }
    let mut out = MPoly::zero(p.nvars);
    for (e, c) in &p.terms {
        let e2: Vec<u16> = e.iter().zip(&mins).map(|(a, b)| a - b).collect();
        out.terms.insert(e2, c.clone());
    }
    (out, mins)
}

/// Exact polynomial square root under graded-lex recursion, if one exists.
pub fn poly_sqrt(p: &MPoly) -> Option<MPoly> {
    if p.is_zero() {
        return Some(p.clone());
    }
    let (lead_exp, lead_coeff) = {
        let (e, c) = p.lead_term_grlex()?;
        (e.clone(), c.clone())
    };
    if lead_exp.iter().any(|&k| k % 2 == 1) || lead_coeff.is_negative() {
        return None;
    }
    let half: Vec<u16> = lead_exp.iter().map(|&k| k / 2).collect();
    let c_root = sqrt_rat(&lead_coeff)?;
    let mut root = MPoly::zero(p.nvars);
    root.terms.insert(half.clone(), c_root.clone());
    let two_lead = {
        let mut m = MPoly::zero(p.nvars);
        m.terms
            .insert(half, c_root * Rat::from_integer(BigInt::from(2)));
        m
    };
    let mut rem = p.sub(&root.mul(&root));
    let mut steps = 0usize;
    while !rem.is_zero() {
        steps += 1;
        if steps > 50_000 {
            return None;
        }
        let (r_exp, r_coeff) = {
            let (e, c) = rem.lead_term_grlex()?;
            (e.clone(), c.clone())
        };
        let (t_exp, t_coeff) = {
            let (le, lc) = two_lead.terms.iter().next().unwrap();
            let mut q = vec![0u16; p.nvars];
            for i in 0..p.nvars {
                if r_exp[i] < le[i] {
                    return None;
                }
                q[i] = r_exp[i] - le[i];
            }
            (q, r_coeff / lc.clone())
        };
        let mut t = MPoly::zero(p.nvars);
        t.terms.insert(t_exp, t_coeff);
        // rem -= t*(2*root + t)
        let update = t.mul(&root.scale(&Rat::from_integer(2.into())).add(&t));
        rem = rem.sub(&update);
        root = root.add(&t);
    }
    Some(root)
}

fn sqrt_rat(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let root = |v: &BigInt| -> Option<BigInt> {
        let s = v.sqrt();
        if &s * &s == *v {
            Some(s)
        } else {
            None
        }
    };
    Some(Rat::new(root(r.numer())?, root(r.denom())?))
}

// ---------------------------------------------------------------------------
// Resultants
// ---------------------------------------------------------------------------

/// Determinant by fraction-free Bareiss elimination over polynomial entries.
pub fn det_bareiss(mut m: Vec<Vec<MPoly>>) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one(0);
    }
    let nvars = m[0][0].nvars;
    if n == 1 {
        return m[0][0].clone();
    }
    let mut sign = 1i32;
    let mut prev = MPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return MPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = div_exact(&num, &prev).expect("Bareiss division is exact");
            }
            m[i][k] = MPoly::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        det.neg()
    } else {
        det
    }
}

/// Sylvester resultant of `f` and `g` with respect to variable `v`.
pub fn resultant(f: &MPoly, g: &MPoly, v: usize) -> MPoly {
    let m = f.deg_in(v) as usize;
    let n = g.deg_in(v) as usize;
    if m == 0 {
        return f.pow(n as u32);
    }
    if n == 0 {
        return g.pow(m as u32);
    }
    let fc = f.coeffs_in(v);
    let gc = g.coeffs_in(v);
    let size = m + n;
    let zero = MPoly::zero(f.nvars);
    let mut mat = vec![vec![zero; size]; size];
    for row in 0..n {
        for (k, c) in fc.iter().enumerate() {
            mat[row][row + (m - k)] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in gc.iter().enumerate() {
            mat[n + row][row + (n - k)] = c.clone();
        }
    }
    det_bareiss(mat)
}

// ---------------------------------------------------------------------------
// Expr conversion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ConvertError {
    #[error("expression is not polynomial over the elimination variables: {0}")]
    NotPolynomial(String),
}

/// Convert a normalized expression to a polynomial over `vars`, clearing
/// negative powers by a monomial multiple (returned as exponents per var).
/// An optional radical variable maps powers of `sqrt(radicand)` onto that
/// variable, e.g. `u = sqrt(x^2 + y^2)`.
pub fn expr_to_mpoly(
    e: &Expr,
    vars: &[&str],
    radical: Option<(usize, &Expr)>,
) -> Result<(MPoly, Vec<u16>), ConvertError> {
    use crate::expr::NormalForm;
    let nf = NormalForm::of(e);
    let nvars = vars.len();
    let mut terms: Vec<(Vec<i32>, Rat)> = Vec::new();
    for te in nf.term_exprs() {
        if te.is_zero_num() {
            continue;
        }
        let (exps, coeff) = laurent_term(&te, vars, radical)?;
        terms.push((exps, coeff));
    }
    let mut mins = vec![0i32; nvars];
    for (e, _) in &terms {
        for i in 0..nvars {
            mins[i] = mins[i].min(e[i]);
        }
    }
    let shift: Vec<u16> = mins.iter().map(|&m| (-m) as u16).collect();
    let mut p = MPoly::zero(nvars);
    for (e, c) in terms {
        let exps: Vec<u16> = e.iter().zip(&mins).map(|(x, m)| (x - m) as u16).collect();
        p.insert_term(exps, c);
    }
    Ok((p, shift))
}

fn laurent_term(
    term: &Expr,
    vars: &[&str],
    radical: Option<(usize, &Expr)>,
) -> Result<(Vec<i32>, Rat), ConvertError> {
    let factors: Vec<&Expr> = match term {
        Expr::Prod(fs) => fs.iter().collect(),
        other => vec![other],
    };
    let mut exps = vec![0i32; vars.len()];
    let mut coeff = Rat::one();
    for f in factors {
        let (base, exp): (&Expr, Rat) = match f {
            Expr::Pow(b, e) => (&**b, e.clone()),
            other => (other, Rat::one()),
        };
        match base {
            Expr::Num(c) => {
                if !exp.is_integer() {
                    return Err(ConvertError::NotPolynomial(format!(
                        "irrational constant power {f}"
                    )));
                }
                let k = exp
                    .numer()
                    .to_i32()
                    .ok_or_else(|| ConvertError::NotPolynomial("exponent overflow".into()))?;
                coeff *= c.pow(k);
            }
            Expr::Sym(s) => {
                let i = vars.iter().position(|v| v == s).ok_or_else(|| {
                    ConvertError::NotPolynomial(format!("unexpected symbol {s}"))
                })?;
                if !exp.is_integer() {
                    return Err(ConvertError::NotPolynomial(format!(
                        "fractional power of {s}"
                    )));
                }
                exps[i] += exp
                    .numer()
                    .to_i32()
                    .ok_or_else(|| ConvertError::NotPolynomial("exponent overflow".into()))?;
            }
            other => {
                if let Some((ui, radicand)) = radical {
                    if crate::expr::normalize(other) == *radicand {
                        let doubled = exp.clone() * Rat::from_integer(2.into());
                        if doubled.is_integer() {
                            exps[ui] += doubled.numer().to_i32().ok_or_else(|| {
                                ConvertError::NotPolynomial("exponent overflow".into())
                            })?;
                            continue;
                        }
                    }
                }
                return Err(ConvertError::NotPolynomial(format!(
                    "opaque factor {other}"
                )));
            }
        }
    }
    Ok((exps, coeff))
}

/// Render a polynomial back to an expression; the optional radical variable
/// is substituted by `sqrt(radicand)`.
pub fn mpoly_to_expr(p: &MPoly, vars: &[&str], radical: Option<(usize, &Expr)>) -> Expr {
    let mut terms = Vec::new();
    for (e, c) in &p.terms {
        let mut parts = vec![Expr::Num(c.clone())];
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            match radical {
                Some((ui, radicand)) if ui == i => {
                    let half = Rat::new(BigInt::from(k), BigInt::from(2));
                    parts.push(Expr::pow(radicand.clone(), half));
                }
                _ => parts.push(Expr::powi(Expr::sym(vars[i]), k as i64)),
            }
        }
        terms.push(Expr::prod(parts));
    }
    crate::expr::normalize(&Expr::sum(terms))
}
