//! Normalization to a canonical expanded form.
//!
//! The normal form is a sum of generalized monomials: a rational coefficient
//! times a sorted product of `base^exponent` factors with rational exponents.
//! Bases are plain symbols or opaque atoms (function applications, and sums
//! raised to negative or fractional powers). Within the rational fragment the
//! form is a canonical expanded polynomial / rational function; function
//! nodes stay opaque, so e.g. `sin(x)^2 + cos(x)^2` is left alone.
//!
//! Sums carrying powers of the same sum-atom are brought onto the lowest
//! exponent of each fractional class (a common-denominator pass), which makes
//! cancellations like `(x^2+y^2)*u^-3 - u^-1` with `u = sqrt(x^2+y^2)` exact.

use super::{Expr, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Base {
    Sym(String),
    /// Canonicalized opaque subexpression: `Apply`, a sum kept under a
    /// negative/fractional power, a non-perfect-power rational, or a power
    /// that must not merge exponents (e.g. `(x^2)^(1/2)`).
    Atom(Expr),
}

pub(crate) type Factors = Vec<(Base, Rat)>;
type TermMap = BTreeMap<Factors, Rat>;

/// Canonical form of an expression as a collected sum of generalized
/// monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    terms: TermMap,
}

/// Normalize an expression to its canonical expanded `Expr` form.
pub fn normalize(e: &Expr) -> Expr {
    NormalForm::of(e).to_expr()
}

impl NormalForm {
    pub fn of(e: &Expr) -> NormalForm {
        NormalForm {
            terms: finish(build(e)),
        }
    }

    pub fn zero() -> NormalForm {
        NormalForm {
            terms: TermMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of collected terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the form is a single numeric term (or zero).
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (f, c) = self.terms.iter().next().unwrap();
            if f.is_empty() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<(&Factors, &Rat)> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: Rat = a.0.iter().map(|(_, e)| e.clone()).sum();
            let db: Rat = b.0.iter().map(|(_, e)| e.clone()).sum();
            db.cmp(&da).then_with(|| a.0.cmp(b.0))
        });
        Expr::sum(terms.into_iter().map(|(f, c)| term_expr(f, c)).collect())
    }

    /// One `Expr` per collected monomial, in the order used by `to_expr`.
    pub fn term_exprs(&self) -> Vec<Expr> {
        match self.to_expr() {
            Expr::Sum(ts) => ts,
            other => vec![other],
        }
    }

    pub(crate) fn terms(&self) -> impl Iterator<Item = (&Factors, &Rat)> {
        self.terms.iter()
    }
}

fn term_expr(factors: &Factors, coeff: &Rat) -> Expr {
    let mut parts = Vec::new();
    if !coeff.is_one() || factors.is_empty() {
        parts.push(Expr::Num(coeff.clone()));
    }
    for (b, e) in factors {
        let base = match b {
            Base::Sym(s) => Expr::Sym(s.clone()),
            Base::Atom(a) => a.clone(),
        };
        parts.push(Expr::pow(base, e.clone()));
    }
    Expr::prod(parts)
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

fn build(e: &Expr) -> TermMap {
    match e {
        Expr::Num(c) => nf_num(c.clone()),
        Expr::Sym(s) => single(vec![(Base::Sym(s.clone()), Rat::one())], Rat::one()),
        Expr::Sum(es) => {
            let mut acc = TermMap::new();
            for t in es {
                raw_add(&mut acc, build(t));
            }
            acc
        }
        Expr::Prod(es) => {
            let mut acc = nf_num(Rat::one());
            for f in es {
                acc = raw_mul(&acc, &build(f));
            }
            acc
        }
        Expr::Pow(b, exp) => raw_pow(&finish(build(b)), exp),
        Expr::Apply(f, a) => {
            let arg = NormalForm::of(a).to_expr();
            single(
                vec![(Base::Atom(Expr::Apply(*f, Box::new(arg))), Rat::one())],
                Rat::one(),
            )
        }
    }
}

fn nf_num(c: Rat) -> TermMap {
    let mut m = TermMap::new();
    if !c.is_zero() {
        m.insert(Vec::new(), c);
    }
    m
}

fn single(mut factors: Factors, coeff: Rat) -> TermMap {
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    let mut m = TermMap::new();
    if !coeff.is_zero() {
        m.insert(factors, coeff);
    }
    m
}

fn raw_add(acc: &mut TermMap, other: TermMap) {
    for (f, c) in other {
        insert_term(acc, f, c);
    }
}

fn insert_term(map: &mut TermMap, factors: Factors, coeff: Rat) {
    if coeff.is_zero() {
        return;
    }
    let entry = map.entry(factors).or_insert_with(Rat::zero);
    *entry += coeff;
    if entry.is_zero() {
        // Re-borrow to remove: find the zero entries lazily below.
    }
    map.retain(|_, c| !c.is_zero());
}

fn merge_factors(a: &Factors, b: &Factors) -> Factors {
    let mut out: Factors = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1.clone() + b[j].1.clone();
                if !e.is_zero() {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn raw_mul(a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = TermMap::new();
    for (fa, ca) in a {
        for (fb, cb) in b {
            insert_term(&mut out, merge_factors(fa, fb), ca.clone() * cb.clone());
        }
    }
    out
}

/// Exponent combination rule for `(b^inner)^outer -> b^(inner*outer)` under
/// real semantics (odd-denominator roots are real signed roots). Combining is
/// unsound exactly when the inner power hides the base's sign and the outer
/// root is even, e.g. `(x^2)^(1/2) != x`.
fn pow_merge(inner: &Rat, outer: &Rat) -> Option<Rat> {
    let m_odd = inner.numer().is_odd();
    let q1_even = inner.denom().is_even();
    let q2_odd = outer.denom().is_odd();
    if m_odd || q1_even || q2_odd {
        Some(inner.clone() * outer.clone())
    } else {
        None
    }
}

/// Exact rational power `c^(p/q)` if it exists (sign-aware for odd `q`).
pub(crate) fn exact_rat_pow(c: &Rat, exp: &Rat) -> Option<Rat> {
    if c.is_zero() {
        return if exp.is_positive() {
            Some(Rat::zero())
        } else {
            None
        };
    }
    let p = exp.numer();
    let q = exp.denom().to_u32()?;
    let root = |v: &BigInt| -> Option<BigInt> {
        if q == 1 {
            return Some(v.clone());
        }
        if v.is_negative() {
            if q % 2 == 0 {
                return None;
            }
            let r = (-v).nth_root(q);
            if r.pow(q) == -v {
                return Some(-r);
            }
            return None;
        }
        let r = v.nth_root(q);
        if r.pow(q) == *v {
            Some(r)
        } else {
            None
        }
    };
    let rn = root(c.numer())?;
    let rd = root(c.denom())?;
    let base = Rat::new(rn, rd);
    let p_i32 = p.to_i32()?;
    if p_i32 < 0 && base.is_zero() {
        return None;
    }
    Some(base.pow(p_i32))
}

/// Power of a finished normal form by a rational exponent.
fn raw_pow(nf: &TermMap, exp: &Rat) -> TermMap {
    if exp.is_zero() {
        return nf_num(Rat::one());
    }
    if nf.is_empty() {
        // 0^e: zero for positive e; otherwise undefined everywhere, kept as
        // an opaque atom so evaluation reports the error.
        if exp.is_positive() {
            return TermMap::new();
        }
        return single(
            vec![(Base::Atom(Expr::Num(Rat::zero())), exp.clone())],
            Rat::one(),
        );
    }
    if nf.len() == 1 {
        let (factors, coeff) = nf.iter().next().unwrap();
        return pow_single_term(factors, coeff, exp);
    }
    // Multi-term base.
    if exp.is_integer() && exp.is_positive() {
        return expand_int_pow(nf, exp.numer());
    }
    // Negative or fractional power of a sum: extract positive content (and,
    // for integer exponents, a common symbol monomial), atomize the rest.
    pow_sum_atom(nf, exp)
}

fn expand_int_pow(nf: &TermMap, n: &BigInt) -> TermMap {
    let mut n = n.to_u64().expect("power exponent too large to expand");
    let mut base = nf.clone();
    let mut acc = nf_num(Rat::one());
    while n > 0 {
        if n & 1 == 1 {
            acc = raw_mul(&acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = raw_mul(&base, &base);
        }
    }
    acc
}

fn pow_single_term(factors: &Factors, coeff: &Rat, exp: &Rat) -> TermMap {
    if exp.is_integer() || exp.denom().is_odd() {
        // Safe to distribute over every factor (integer powers always; odd
        // roots are real and multiplicative over signs).
        let mut out_factors: Factors = Vec::new();
        let mut out_coeff = Rat::one();
        apply_num_power(&mut out_coeff, &mut out_factors, coeff, exp);
        for (b, e) in factors {
            match b {
                Base::Sym(_) => push_factor(&mut out_factors, b.clone(), e.clone() * exp.clone()),
                Base::Atom(a) => match pow_merge(e, exp) {
                    Some(c) => push_atom_power(&mut out_coeff, &mut out_factors, a, &c),
                    None => {
                        let wrapped = Expr::pow(a.clone(), e.clone());
                        push_factor(&mut out_factors, Base::Atom(wrapped), exp.clone());
                    }
                },
            }
        }
        return single(out_factors, out_coeff);
    }
    // Even-denominator root of a single term: combine per-factor only where
    // sound, otherwise wrap the offending factor.
    let mut out_factors: Factors = Vec::new();
    let mut out_coeff = Rat::one();
    if coeff.is_negative() {
        // Sign cannot come out of an even root; wrap the whole term.
        let whole = term_expr(factors, coeff);
        return single(vec![(Base::Atom(whole), exp.clone())], Rat::one());
    }
    apply_num_power(&mut out_coeff, &mut out_factors, coeff, exp);
    for (b, e) in factors {
        let merged = pow_merge(e, exp);
        match (b, merged) {
            (Base::Sym(_), Some(c)) => push_factor(&mut out_factors, b.clone(), c),
            (Base::Atom(a), Some(c)) => push_atom_power(&mut out_coeff, &mut out_factors, a, &c),
            (_, None) => {
                let base_expr = match b {
                    Base::Sym(s) => Expr::Sym(s.clone()),
                    Base::Atom(a) => a.clone(),
                };
                let wrapped = Expr::pow(base_expr, e.clone());
                push_factor(&mut out_factors, Base::Atom(wrapped), exp.clone());
            }
        }
    }
    single(out_factors, out_coeff)
}

fn push_factor(factors: &mut Factors, base: Base, exp: Rat) {
    if exp.is_zero() {
        return;
    }
    factors.push((base, exp));
}

/// Attach `c^exp` to the term, exactly when possible.
fn apply_num_power(coeff: &mut Rat, factors: &mut Factors, c: &Rat, exp: &Rat) {
    if c.is_one() {
        return;
    }
    if let Some(v) = exact_rat_pow(c, exp) {
        *coeff *= v;
        return;
    }
    // Fold the integer part; keep a fractional residue atom with reduced
    // positive base.
    let floor = exp.floor();
    let frac = exp.clone() - floor.clone();
    if !floor.is_zero() {
        if let Some(ip) = floor.numer().to_i32() {
            *coeff *= c.pow(ip);
        } else {
            push_factor(factors, Base::Atom(Expr::Num(c.clone())), floor.clone());
        }
    }
    if frac.is_zero() {
        return;
    }
    let mut base = c.clone();
    if base.is_negative() && frac.denom().is_odd() {
        if frac.numer().is_odd() {
            *coeff = -coeff.clone();
        }
        base = -base;
    }
    if let Some(v) = exact_rat_pow(&base, &frac) {
        *coeff *= v;
        return;
    }
    push_factor(factors, Base::Atom(Expr::Num(base)), frac);
}

/// Attach `atom^exp` with normalized exponent handling for numeric atoms.
fn push_atom_power(coeff: &mut Rat, factors: &mut Factors, atom: &Expr, exp: &Rat) {
    if exp.is_zero() {
        return;
    }
    if let Expr::Num(c) = atom {
        apply_num_power(coeff, factors, c, exp);
        return;
    }
    push_factor(factors, Base::Atom(atom.clone()), exp.clone());
}

fn pow_sum_atom(nf: &TermMap, exp: &Rat) -> TermMap {
    // Extract positive rational content.
    let mut content: Option<Rat> = None;
    for c in nf.values() {
        let a = c.abs();
        content = Some(match content {
            None => a,
            Some(g) => Rat::new(
                g.numer().gcd(a.numer()),
                g.denom().lcm(a.denom()),
            ),
        });
    }
    let mut content = content.unwrap_or_else(Rat::one);
    // Common symbol monomial, only sound to extract for integer exponents.
    let mut common: Factors = Vec::new();
    if exp.is_integer() {
        let mut iter = nf.keys();
        let first = iter.next().unwrap().clone();
        common = first
            .into_iter()
            .filter(|(b, _)| matches!(b, Base::Sym(_)))
            .collect();
        for f in nf.keys() {
            common = common_part(&common, f);
            if common.is_empty() {
                break;
            }
        }
    }
    // Sign normalization for odd-denominator exponents: make the first
    // (lowest-key) coefficient positive.
    let first_coeff = nf.values().next().unwrap();
    let mut sign = Rat::one();
    if first_coeff.is_negative() && exp.denom().is_odd() {
        sign = -Rat::one();
    }
    if sign.is_negative() {
        content = -content;
    }
    let mut reduced = TermMap::new();
    for (f, c) in nf {
        let stripped = remove_part(f, &common);
        reduced.insert(stripped, c.clone() / content.clone());
    }
    let base_expr = NormalForm { terms: reduced }.to_expr();
    let mut out_factors: Factors = Vec::new();
    let mut out_coeff = Rat::one();
    apply_num_power(&mut out_coeff, &mut out_factors, &content, exp);
    for (b, e) in &common {
        push_factor(&mut out_factors, b.clone(), e.clone() * exp.clone());
    }
    push_factor(&mut out_factors, Base::Atom(base_expr), exp.clone());
    if sign.is_negative() && exp.numer().is_odd() {
        out_coeff = -out_coeff;
    }
    single(out_factors, out_coeff)
}

/// Factor-wise min of symbol exponents shared by `common` and `f` (exponent
/// signs must agree so the extraction stays sound for negative powers).
fn common_part(common: &Factors, f: &Factors) -> Factors {
    let mut out = Vec::new();
    for (b, e) in common {
        if let Some((_, e2)) = f.iter().find(|(b2, _)| b2 == b) {
            if e.is_positive() == e2.is_positive() {
                let m = if e.abs() <= e2.abs() { e } else { e2 };
                out.push((b.clone(), m.clone()));
            }
        }
    }
    out
}

fn remove_part(f: &Factors, part: &Factors) -> Factors {
    let mut out = Vec::new();
    for (b, e) in f {
        match part.iter().find(|(b2, _)| b2 == b) {
            Some((_, ep)) => {
                let rest = e.clone() - ep.clone();
                if !rest.is_zero() {
                    out.push((b.clone(), rest));
                }
            }
            None => out.push((b.clone(), e.clone())),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Fixpoint: resolve expandable atoms and align fractional classes
// ---------------------------------------------------------------------------

fn is_expandable_atom(a: &Expr) -> bool {
    matches!(a, Expr::Sum(_))
}

fn finish(mut map: TermMap) -> TermMap {
    for _round in 0..200 {
        let mut changed = resolve_pass(&mut map);
        changed |= align_pass(&mut map);
        if !changed {
            return map;
        }
    }
    debug_assert!(false, "normalization fixpoint did not converge");
    map
}

/// Expand sum-atoms whose exponent has an integer part >= 1, fold numeric
/// atoms, and re-expand any atom raised to an integer power.
fn resolve_pass(map: &mut TermMap) -> bool {
    let mut changed = false;
    loop {
        let mut work: Option<(Factors, Rat)> = None;
        'scan: for (f, c) in map.iter() {
            for (b, e) in f {
                if let Base::Atom(a) = b {
                    let integer_part = e.floor();
                    let needs_expand = is_expandable_atom(a)
                        && integer_part >= Rat::one();
                    let needs_fold = matches!(a, Expr::Num(_))
                        || (e.is_integer() && !matches!(a, Expr::Apply(_, _)) && !matches!(a, Expr::Num(_)) && !is_expandable_atom(a));
                    if needs_expand || needs_fold {
                        work = Some((f.clone(), c.clone()));
                        break 'scan;
                    }
                }
            }
        }
        let Some((f, c)) = work else { break };
        map.remove(&f);
        changed = true;
        // Rebuild the term with the first offending factor resolved.
        let mut rest: Factors = Vec::new();
        let mut pending: Option<(Expr, Rat)> = None;
        for (b, e) in &f {
            if pending.is_none() {
                if let Base::Atom(a) = b {
                    let integer_part = e.floor();
                    if is_expandable_atom(a) && integer_part >= Rat::one() {
                        pending = Some((a.clone(), e.clone()));
                        continue;
                    }
                    if matches!(a, Expr::Num(_)) {
                        pending = Some((a.clone(), e.clone()));
                        continue;
                    }
                    if e.is_integer() && !matches!(a, Expr::Apply(_, _)) && !is_expandable_atom(a) {
                        pending = Some((a.clone(), e.clone()));
                        continue;
                    }
                }
            }
            rest.push((b.clone(), e.clone()));
        }
        let (atom, e) = pending.expect("offending factor vanished");
        let replacement: TermMap = match &atom {
            Expr::Num(v) => {
                let mut coeff = Rat::one();
                let mut fs: Factors = Vec::new();
                apply_num_power(&mut coeff, &mut fs, v, &e);
                single(fs, coeff)
            }
            Expr::Sum(_) => {
                let integer_part = e.floor();
                let frac = e.clone() - integer_part.clone();
                let sum_nf = finish(build(&atom));
                let mut rep = expand_int_pow(&sum_nf, integer_part.numer());
                if !frac.is_zero() {
                    rep = raw_mul(
                        &rep,
                        &single(vec![(Base::Atom(atom.clone()), frac)], Rat::one()),
                    );
                }
                rep
            }
            other => {
                // Opaque power atom raised to an integer exponent: exponents
                // now combine soundly.
                finish(build(&Expr::pow(other.clone(), e.clone())))
            }
        };
        let rest_map = single(rest, c);
        let product = raw_mul(&rest_map, &replacement);
        raw_add(map, product);
    }
    changed
}

/// Bring all terms sharing a sum-atom and a fractional exponent class onto
/// that class's minimal exponent (common denominator), so cancellations
/// across the class become visible.
fn align_pass(map: &mut TermMap) -> bool {
    // Gather (atom, class) -> min exponent, and whether multiple exponents
    // occur in the class.
    let mut classes: BTreeMap<(Expr, Rat), (Rat, bool)> = BTreeMap::new();
    for f in map.keys() {
        for (b, e) in f {
            if let Base::Atom(a) = b {
                if is_expandable_atom(a) {
                    let frac = e.clone() - e.floor();
                    let key = (a.clone(), frac);
                    match classes.get_mut(&key) {
                        None => {
                            classes.insert(key, (e.clone(), false));
                        }
                        Some((m, multi)) => {
                            if *e != *m {
                                *multi = true;
                            }
                            if e < m {
                                *m = e.clone();
                            }
                        }
                    }
                }
            }
        }
        // Terms *without* the atom belong to class 0 with exponent 0; account
        // for them against any existing integer class of that atom.
    }
    // Integer classes also cover atom-free terms (exponent 0); detect that.
    let atoms_with_int_class: Vec<Expr> = classes
        .keys()
        .filter(|(_, frac)| frac.is_zero())
        .map(|(a, _)| a.clone())
        .collect();
    for a in &atoms_with_int_class {
        let key = (a.clone(), Rat::zero());
        let min_is_negative = classes.get(&key).map(|(m, _)| m.is_negative()).unwrap_or(false);
        if !min_is_negative {
            continue;
        }
        let any_term_without = map.keys().any(|f| {
            !f.iter()
                .any(|(b, _)| matches!(b, Base::Atom(x) if x == a))
        });
        if any_term_without {
            if let Some((_, multi)) = classes.get_mut(&key) {
                *multi = true;
            }
        }
    }
    // Apply one misaligned class at a time.
    let target = classes
        .into_iter()
        .find(|(_, (_, multi))| *multi);
    let Some(((atom, frac), (min_exp, _))) = target else {
        return false;
    };
    let sum_nf = finish(build(&atom));
    let old = std::mem::take(map);
    for (f, c) in old {
        let current = f
            .iter()
            .find_map(|(b, e)| match b {
                Base::Atom(a) if *a == atom => Some(e.clone()),
                _ => None,
            })
            .unwrap_or_else(Rat::zero);
        let current_frac = current.clone() - current.floor();
        if current_frac != frac && !(current.is_zero() && frac.is_zero()) {
            insert_term(map, f, c);
            continue;
        }
        if current == min_exp {
            insert_term(map, f, c);
            continue;
        }
        let diff = current.clone() - min_exp.clone();
        debug_assert!(diff.is_integer() && diff.is_positive());
        // term = rest * atom^current = rest * atom^diff (expanded) * atom^min
        let mut rest: Factors = f
            .iter()
            .filter(|(b, _)| !matches!(b, Base::Atom(a) if *a == atom))
            .cloned()
            .collect();
        if !min_exp.is_zero() {
            push_factor(&mut rest, Base::Atom(atom.clone()), min_exp.clone());
            rest.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let expanded = expand_int_pow(&sum_nf, diff.numer());
        let product = raw_mul(&single(rest, c), &expanded);
        raw_add(map, product);
    }
    true
}
