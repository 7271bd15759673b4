//! Derivation of the polynomial algebra of integrals.
//!
//! Pipeline: `B = {L, A}`, detect the constant `k^2` with `{L, B} = -k^2 A`,
//! fit the bivariate structure polynomial `G(H, L)` with `B^2 + k^2 A^2 = G`,
//! certify the closure `{A, B} = -1/2 dG/dL`, and classify the algebra by the
//! total degree of `{A, B}` in `(H, L)`.
//!
//! All fitting is exact: coefficients are solved by rational Gaussian
//! elimination on evaluations at seeded points (per parameter binding) and
//! parameter dependence is reconstructed by an exact monomial fit across
//! bindings. A floating least-squares fallback (with rationalization and
//! mandatory exact re-verification) exists for user systems whose sampling
//! cannot be made exact.

use crate::catalog::{Expected, SystemDef};
use crate::expr::{
    collect_func_args, equal_identically, evaluate, normalize, Certificate, Domain, Expr,
    IdentityOptions, IdentityVerdict, Rat, Sampler, Value,
};
use crate::poisson::{bracket_raw, poisson_bracket};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("A is identically zero; two functionally independent integrals are required")]
    DegenerateIntegral,
    #[error("`{which}` is not an integral of motion: {witness}")]
    NotIntegral { which: String, witness: String },
    #[error("{{L,B}} is not a parameter-scalar multiple of A: {0}")]
    NotProportional(String),
    #[error("structure-polynomial fit failed: {0}")]
    FitFailed(String),
    #[error("closure bracket disagrees with -1/2 dG/dL: {0}")]
    ClosureViolation(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Sample(#[from] crate::expr::SampleError),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<AlgebraError>,
    },
}

trait AtStage<T> {
    fn at_stage(self, stage: &'static str) -> Result<T, AlgebraError>;
}

impl<T> AtStage<T> for Result<T, AlgebraError> {
    fn at_stage(self, stage: &'static str) -> Result<T, AlgebraError> {
        self.map_err(|e| AlgebraError::Stage {
            stage,
            source: Box::new(e),
        })
    }
}

#[derive(Debug, Clone)]
pub struct AlgebraOptions {
    pub seed: u64,
    pub trials: u32,
    pub degree_bound: u32,
    pub retry_bound: u32,
    pub tolerance: f64,
}

impl Default for AlgebraOptions {
    fn default() -> Self {
        AlgebraOptions {
            seed: 42,
            trials: 128,
            degree_bound: 8,
            retry_bound: 12,
            tolerance: 1e-10,
        }
    }
}

impl AlgebraOptions {
    pub fn with_seed(seed: u64) -> Self {
        AlgebraOptions {
            seed,
            ..Default::default()
        }
    }

    fn identity(&self, tag: &str) -> IdentityOptions {
        IdentityOptions {
            trials: self.trials,
            seed: subseed(self.seed, tag),
            tolerance: self.tolerance,
        }
    }
}

/// Deterministic sub-seed per pipeline stage.
pub fn subseed(base: u64, tag: &str) -> u64 {
    let mut h = base ^ 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

// ---------------------------------------------------------------------------
// Bivariate polynomials in abstract (H, L)
// ---------------------------------------------------------------------------

/// Polynomial in the abstract integrals `H`, `L` with parameter-expression
/// coefficients. Keys are `(i, j)` for `H^i L^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivarPoly {
    pub coeffs: BTreeMap<(u32, u32), Expr>,
}

impl BivarPoly {
    pub fn zero() -> BivarPoly {
        BivarPoly::default()
    }

    pub fn constant(c: Expr) -> BivarPoly {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero_num() {
            coeffs.insert((0, 0), c);
        }
        BivarPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.coeffs.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// d/dL.
    pub fn partial_l(&self) -> BivarPoly {
        let mut out = BTreeMap::new();
        for ((i, j), c) in &self.coeffs {
            if *j == 0 {
                continue;
            }
            let scaled = normalize(&(Expr::num(*j as i64) * c.clone()));
            if !scaled.is_zero_num() {
                out.insert((*i, j - 1), scaled);
            }
        }
        BivarPoly { coeffs: out }
    }

    pub fn scale(&self, r: &Rat) -> BivarPoly {
        if r.is_zero() {
            return BivarPoly::zero();
        }
        let mut out = BTreeMap::new();
        for (k, c) in &self.coeffs {
            out.insert(*k, normalize(&(Expr::Num(r.clone()) * c.clone())));
        }
        BivarPoly { coeffs: out }
    }

    /// Substitute phase-space expressions for `H` and `L`.
    pub fn substitute(&self, h: &Expr, l: &Expr) -> Expr {
        let mut terms = Vec::new();
        for ((i, j), c) in &self.coeffs {
            terms.push(Expr::prod(vec![
                c.clone(),
                Expr::powi(h.clone(), *i as i64),
                Expr::powi(l.clone(), *j as i64),
            ]));
        }
        Expr::sum(terms)
    }

    /// Render as an expression in abstract symbols `H`, `L`.
    pub fn to_expr(&self) -> Expr {
        self.substitute(&Expr::sym("H"), &Expr::sym("L"))
    }

    pub fn json_items(&self) -> Vec<serde_json::Value> {
        self.coeffs
            .iter()
            .map(|((i, j), c)| serde_json::json!({"i": i, "j": j, "coeff": c.to_string()}))
            .collect()
    }
}

/// Algebra type by total degree of `{A, B}` in `(H, L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeLabel {
    Linear,
    Quadratic,
    Cubic,
    DegreeN(u32),
}

impl std::fmt::Display for DegreeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DegreeLabel::Linear => write!(f, "linear"),
            DegreeLabel::Quadratic => write!(f, "quadratic"),
            DegreeLabel::Cubic => write!(f, "cubic"),
            DegreeLabel::DegreeN(n) => write!(f, "degree-{n}"),
        }
    }
}

/// Label from the total degree of the closure bracket: 0 or 1 is linear,
/// 2 quadratic, 3 cubic, anything higher degree-n.
pub fn classify(bracket_ab: &BivarPoly) -> DegreeLabel {
    match bracket_ab.total_degree() {
        0 | 1 => DegreeLabel::Linear,
        2 => DegreeLabel::Quadratic,
        3 => DegreeLabel::Cubic,
        n => DegreeLabel::DegreeN(n),
    }
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AlgebraReport {
    pub system: String,
    pub k2: Expr,
    pub b: Expr,
    pub g: BivarPoly,
    pub bracket_ab: BivarPoly,
    pub degree_label: DegreeLabel,
    pub certificates: Vec<(String, Certificate)>,
}

impl AlgebraReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "system": self.system,
            "k2": self.k2.to_string(),
            "B": self.b.to_string(),
            "G": self.g.json_items(),
            "bracketAB": self.bracket_ab.json_items(),
            "degree_label": self.degree_label.to_string(),
            "certificates": self.certificates.iter().map(|(rel, cert)| {
                serde_json::json!({"relation": rel, "certificate": cert.to_string()})
            }).collect::<Vec<_>>(),
        })
    }

    /// Differences against expected regression data; empty when matching.
    pub fn diff_expected(&self, expected: &Expected) -> Vec<String> {
        let mut diffs = Vec::new();
        if normalize(&self.k2) != normalize(&expected.k2) {
            diffs.push(format!(
                "k2: derived {} vs expected {}",
                self.k2, expected.k2
            ));
        }
        if let Some(want_b) = &expected.b {
            if normalize(&self.b) != normalize(want_b) {
                diffs.push(format!("B: derived {} vs expected {}", self.b, want_b));
            }
        }
        diff_bivar("G", &self.g.coeffs, &expected.g, &mut diffs);
        diff_bivar(
            "bracketAB",
            &self.bracket_ab.coeffs,
            &expected.bracket_ab,
            &mut diffs,
        );
        if self.degree_label.to_string() != expected.degree_label {
            diffs.push(format!(
                "degree_label: derived {} vs expected {}",
                self.degree_label, expected.degree_label
            ));
        }
        diffs
    }
}

fn diff_bivar(
    name: &str,
    got: &BTreeMap<(u32, u32), Expr>,
    want: &BTreeMap<(u32, u32), Expr>,
    diffs: &mut Vec<String>,
) {
    let keys: BTreeSet<(u32, u32)> = got.keys().chain(want.keys()).cloned().collect();
    for k in keys {
        let g = got.get(&k).cloned().unwrap_or_else(Expr::zero);
        let w = want.get(&k).cloned().unwrap_or_else(Expr::zero);
        if normalize(&g) != normalize(&w) {
            diffs.push(format!(
                "{name}[H^{} L^{}]: derived {} vs expected {}",
                k.0,
                k.1,
                normalize(&g),
                normalize(&w)
            ));
        }
    }
}

// ---------------------------------------------------------------------------
// Parameter bindings and exact linear algebra
// ---------------------------------------------------------------------------

/// Seeded distinct parameter bindings around the defaults (multiplicative
/// rational perturbations, keeping sign and scale).
fn gen_bindings(
    params: &[(String, Rat)],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<BTreeMap<String, Rat>> {
    let defaults: BTreeMap<String, Rat> = params.iter().cloned().collect();
    let mut out = vec![defaults];
    if params.is_empty() {
        return out;
    }
    let mut guard = 0;
    while out.len() < count && guard < 10_000 {
        guard += 1;
        let mut b = BTreeMap::new();
        for (name, def) in params {
            let num: i64 = rng.gen_range(1..=9);
            let den: i64 = rng.gen_range(1..=9);
            b.insert(name.clone(), def.clone() * crate::expr::rat(num, den));
        }
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

/// Exponent vectors of all parameter monomials with total degree <= `deg`.
fn param_monomials(nparams: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out: BTreeSet<Vec<u32>> = BTreeSet::new();
    out.insert(vec![0u32; nparams]);
    for _ in 0..deg {
        let snapshot: Vec<Vec<u32>> = out.iter().cloned().collect();
        for e in snapshot {
            for i in 0..nparams {
                let mut e2 = e.clone();
                e2[i] += 1;
                out.insert(e2);
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, PartialEq)]
enum SolveOutcome {
    Unique(Vec<Rat>),
    RankDeficient,
    Inconsistent,
}

/// Exact Gauss-Jordan elimination on an overdetermined system.
fn solve_exact(rows: &[Vec<Rat>], rhs: &[Rat]) -> SolveOutcome {
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    let mut a: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pivot = a[row][col].clone();
        for j in col..=n {
            let v = a[row][j].clone() / pivot.clone();
            a[row][j] = v;
        }
        for r in 0..m {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=n {
                    let v = a[r][j].clone() - f.clone() * a[row][j].clone();
                    a[r][j] = v;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == m {
            break;
        }
    }
    for r in row..m {
        if a[r][..n].iter().all(|v| v.is_zero()) && !a[r][n].is_zero() {
            return SolveOutcome::Inconsistent;
        }
    }
    if pivots.len() < n {
        return SolveOutcome::RankDeficient;
    }
    let mut x = vec![Rat::zero(); n];
    for (r, c) in pivots {
        x[c] = a[r][n].clone();
    }
    SolveOutcome::Unique(x)
}

/// Continued-fraction rationalization with bounded denominator.
fn rationalize(x: f64, max_den: u64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = v.floor();
        if a > i64::MAX as f64 {
            return None;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 as u128 > max_den as u128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac.abs() < 1e-13 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let mut r = Rat::new(BigInt::from(p1), BigInt::from(q1));
    if negative {
        r = -r;
    }
    let back = r.to_f64()?;
    if (back - x).abs() <= 1e-9 * (1.0 + x.abs()) {
        Some(r)
    } else {
        None
    }
}

/// Dense f64 least squares via normal equations (fallback fitting path).
fn solve_f64_ls(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    if m < n {
        return None;
    }
    let mut ata = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for row in rows {
                s += row[i] * row[j];
            }
            ata[i][j] = s;
        }
        let mut s = 0.0;
        for (row, b) in rows.iter().zip(rhs) {
            s += row[i] * b;
        }
        ata[i][n] = s;
    }
    for col in 0..n {
        let p = (col..n).max_by(|&a, &b| {
            ata[a][col]
                .abs()
                .partial_cmp(&ata[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if ata[p][col].abs() < 1e-12 {
            return None;
        }
        ata.swap(col, p);
        let piv = ata[col][col];
        for j in col..=n {
            ata[col][j] /= piv;
        }
        for r in 0..n {
            if r != col && ata[r][col] != 0.0 {
                let f = ata[r][col];
                for j in col..=n {
                    ata[r][j] -= f * ata[col][j];
                }
            }
        }
    }
    Some((0..n).map(|i| ata[i][n]).collect())
}

fn power_table(base: &Rat, max: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(Rat::one());
    for _ in 0..max {
        out.push(out.last().unwrap().clone() * base.clone());
    }
    out
}

const MODP: u64 = 2_305_843_009_213_693_951; // 2^61 - 1, prime

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODP as u128) as u64
}

fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    acc
}

fn rat_modp(r: &Rat) -> Option<u64> {
    let p = BigInt::from(MODP);
    let num = ((r.numer() % &p) + &p) % &p;
    let den = ((r.denom() % &p) + &p) % &p;
    let num = num.to_u64()?;
    let den = den.to_u64()?;
    if den == 0 {
        return None;
    }
    Some(mulmod(num, powmod(den, MODP - 2)))
}

/// Solve the system over the prime field to read off the solution support.
/// Sharp (no conditioning issues); `None` on rank deficiency, mod-p
/// inconsistency, or denominator collisions, letting the caller fall back.
fn solve_modp(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<usize>> {
    let m = rows.len();
    let n = rows[0].len();
    let mut a: Vec<Vec<u64>> = Vec::with_capacity(m);
    for (r, b) in rows.iter().zip(rhs) {
        let mut row: Vec<u64> = Vec::with_capacity(n + 1);
        for v in r {
            row.push(rat_modp(v)?);
        }
        row.push(rat_modp(b)?);
        a.push(row);
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, p);
        let inv = powmod(a[row][col], MODP - 2);
        for j in col..=n {
            a[row][j] = mulmod(a[row][j], inv);
        }
        for r in 0..m {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for j in col..=n {
                    let sub = mulmod(f, a[row][j]);
                    a[r][j] = (a[r][j] + MODP - sub) % MODP;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == m {
            break;
        }
    }
    for r in row..m {
        if a[r][..n].iter().all(|v| *v == 0) && a[r][n] != 0 {
            return None;
        }
    }
    if pivots.len() < n {
        return None;
    }
    let mut support = Vec::new();
    for (r, c) in pivots {
        if a[r][n] != 0 {
            support.push(c);
        }
    }
    support.sort_unstable();
    if support.is_empty() {
        None
    } else {
        Some(support)
    }
}

/// True when the column-scaled floating least-squares residual is far from
/// zero, i.e. the exact system is inconsistent beyond doubt.
fn ls_residual_is_large(rows: &[Vec<Rat>], rhs: &[Rat]) -> bool {
    let n = rows[0].len();
    let frows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    let mut col_max = vec![0.0f64; n];
    for r in &frows {
        for (j, v) in r.iter().enumerate() {
            col_max[j] = col_max[j].max(v.abs());
        }
    }
    let scaled: Vec<Vec<f64>> = frows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&col_max)
                .map(|(v, s)| if *s > 0.0 { v / s } else { 0.0 })
                .collect()
        })
        .collect();
    let frhs: Vec<f64> = rhs.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
    let Some(sol) = solve_f64_ls(&scaled, &frhs) else {
        return false;
    };
    let rhs_scale = frhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for (r, b) in scaled.iter().zip(&frhs) {
        let pred: f64 = r.iter().zip(&sol).map(|(a, x)| a * x).sum();
        worst = worst.max((pred - b).abs());
    }
    worst > 1e-4 * rhs_scale
}

/// Candidate support column indices from a column-scaled floating least
/// squares; only used to seed the exact restricted solve.
fn detect_support_f64(rows: &[Vec<Rat>], rhs: &[Rat]) -> Vec<usize> {
    let n = rows[0].len();
    let frows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    let mut col_max = vec![0.0f64; n];
    for r in &frows {
        for (j, v) in r.iter().enumerate() {
            col_max[j] = col_max[j].max(v.abs());
        }
    }
    let scaled: Vec<Vec<f64>> = frows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&col_max)
                .map(|(v, s)| if *s > 0.0 { v / s } else { 0.0 })
                .collect()
        })
        .collect();
    let frhs: Vec<f64> = rhs.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
    let Some(sol) = solve_f64_ls(&scaled, &frhs) else {
        return (0..n).collect();
    };
    let maxc = sol.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let out: Vec<usize> = (0..n)
        .filter(|&j| sol[j].abs() > 1e-7 * (1.0 + maxc))
        .collect();
    if out.is_empty() {
        (0..n).collect()
    } else {
        out
    }
}

fn monomial_value(exps: &[u32], params: &[(String, Rat)], binding: &BTreeMap<String, Rat>) -> Rat {
    let mut v = Rat::one();
    for (e, (name, _)) in exps.iter().zip(params) {
        if *e > 0 {
            v *= binding[name].pow(*e as i32);
        }
    }
    v
}

fn monomial_sum(monomials: &[Vec<u32>], params: &[(String, Rat)], coeffs: &[Rat]) -> Expr {
    let mut terms = Vec::new();
    for (e, c) in monomials.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let mut parts = vec![Expr::Num(c.clone())];
        for (k, (name, _)) in e.iter().zip(params) {
            if *k > 0 {
                parts.push(Expr::powi(Expr::sym(name), *k as i64));
            }
        }
        terms.push(Expr::prod(parts));
    }
    normalize(&Expr::sum(terms))
}

// ---------------------------------------------------------------------------
// k^2 detection
// ---------------------------------------------------------------------------

pub struct K2Detection {
    pub k2: Expr,
    pub b: Expr,
    pub certificate: Certificate,
}

/// Detect the constant of `{L, B} = -k^2 A`.
///
/// `B = {L,A}` and `C2 = {L,B}` are computed symbolically; the ratio
/// `r = -C2/A` is measured at seeded valid points with `A != 0` (checking
/// constancy across points), per parameter binding, and reconstructed as a
/// parameter monomial sum of degree <= 2. The result is re-certified.
pub fn detect_k2(
    l: &Expr,
    a: &Expr,
    domain: &Domain,
    params: &[(String, Rat)],
    opts: &AlgebraOptions,
) -> Result<K2Detection, AlgebraError> {
    if crate::expr::NormalForm::of(a).is_zero() {
        return Err(AlgebraError::DegenerateIntegral);
    }
    let b = poisson_bracket(l, a);
    let c2_raw = bracket_raw(l, &b);
    if let IdentityVerdict::Holds(cert) =
        equal_identically(&c2_raw, &Expr::zero(), domain, &opts.identity("k2-zero"))?
    {
        return Ok(K2Detection {
            k2: Expr::zero(),
            b,
            certificate: cert,
        });
    }

    let c2 = normalize(&c2_raw);
    let monomials = param_monomials(params.len(), 2);
    let n_bind = if params.is_empty() {
        1
    } else {
        monomials.len() + 2
    };
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(opts.seed, "k2-bindings"));
    let bindings = gen_bindings(params, n_bind, &mut rng);

    let phase_syms: BTreeSet<String> = ["x", "y", "px", "py"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut atom_args = BTreeSet::new();
    collect_func_args(&c2, &mut atom_args);
    collect_func_args(a, &mut atom_args);

    let mut ratios: Vec<Rat> = Vec::new();
    for (bi, binding) in bindings.iter().enumerate() {
        let seed = subseed(opts.seed, &format!("k2-ratio-{bi}"));
        let mut sampler = Sampler::new(domain, ChaCha8Rng::seed_from_u64(seed));
        let mut n_points = 0;
        let mut exact_ratio: Option<Rat> = None;
        let mut float_ratios: Vec<f64> = Vec::new();
        let mut tries = 0;
        while n_points < 8 && tries < 400 {
            tries += 1;
            let Ok(mut v) = sampler.sample(&phase_syms, &atom_args) else {
                break;
            };
            for (k, val) in binding {
                v.bind(k, val.clone());
            }
            let (Ok(av), Ok(cv)) = (evaluate(a, &v), evaluate(&c2, &v)) else {
                continue;
            };
            let a_ok = match &av {
                Value::Exact(r) => !r.is_zero(),
                Value::Float(f) => f.abs() > 1e-6,
            };
            if !a_ok {
                continue;
            }
            match (&cv, &av) {
                (Value::Exact(c), Value::Exact(aa)) => {
                    let r = -(c.clone() / aa.clone());
                    match &exact_ratio {
                        None => exact_ratio = Some(r),
                        Some(prev) if *prev == r => {}
                        Some(prev) => {
                            return Err(AlgebraError::NotProportional(format!(
                                "ratio varies across points: {prev} vs {r}"
                            )));
                        }
                    }
                }
                _ => float_ratios.push(-(cv.to_f64() / av.to_f64())),
            }
            n_points += 1;
        }
        let r_j = if let Some(r) = exact_ratio {
            r
        } else if !float_ratios.is_empty() {
            let mid = {
                let mut s = float_ratios.clone();
                s.sort_by(|a, b| a.partial_cmp(b).unwrap());
                s[s.len() / 2]
            };
            for f in &float_ratios {
                if (f - mid).abs() > 1e-8 * (1.0 + mid.abs()) {
                    return Err(AlgebraError::NotProportional(format!(
                        "floating ratio spread too wide: {f} vs {mid}"
                    )));
                }
            }
            rationalize(mid, 1_000_000).ok_or_else(|| {
                AlgebraError::NotProportional(format!("ratio {mid} is not a small rational"))
            })?
        } else {
            return Err(AlgebraError::NotProportional(
                "no valid sample points with A != 0".into(),
            ));
        };
        ratios.push(r_j);
    }

    let rows: Vec<Vec<Rat>> = bindings
        .iter()
        .map(|b| {
            monomials
                .iter()
                .map(|e| monomial_value(e, params, b))
                .collect()
        })
        .collect();
    let coeffs = match solve_exact(&rows, &ratios) {
        SolveOutcome::Unique(c) => c,
        SolveOutcome::RankDeficient => {
            return Err(AlgebraError::NotProportional(
                "parameter ansatz underdetermined".into(),
            ))
        }
        SolveOutcome::Inconsistent => {
            return Err(AlgebraError::NotProportional(
                "ratio is not polynomial of degree <= 2 in the parameters".into(),
            ))
        }
    };
    let k2 = monomial_sum(&monomials, params, &coeffs);

    let lhs = c2_raw + k2.clone() * a.clone();
    match equal_identically(&lhs, &Expr::zero(), domain, &opts.identity("k2-verify"))? {
        IdentityVerdict::Holds(cert) => Ok(K2Detection {
            k2,
            b,
            certificate: cert,
        }),
        IdentityVerdict::Fails(w) => Err(AlgebraError::NotProportional(w.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Structure polynomial fit
// ---------------------------------------------------------------------------

enum BindingFit {
    Coeffs(BTreeMap<(u32, u32), Rat>),
    Inconsistent,
}

/// Fit `G(H, L)` with `B^2 + k^2 A^2 = G(H, L)` by exact linear algebra on
/// seeded evaluations, then reconstruct each coefficient as a parameter
/// polynomial (degree <= 4) across bindings.
#[allow(clippy::too_many_arguments)]
pub fn fit_structure_g(
    a: &Expr,
    b: &Expr,
    k2: &Expr,
    h: &Expr,
    l: &Expr,
    degree_bound: u32,
    domain: &Domain,
    params: &[(String, Rat)],
    opts: &AlgebraOptions,
) -> Result<(BivarPoly, Certificate), AlgebraError> {
    let target = Expr::powi(b.clone(), 2) + k2.clone() * Expr::powi(a.clone(), 2);
    // Escalating ansatz: a low-degree ansatz is tried first and is escalated
    // whenever the evaluation system turns out inconsistent. A solution found
    // at a lower bound is the unique solution at the full bound (padded with
    // zeros), so the result is unchanged.
    let ladder: Vec<u32> = [4, degree_bound]
        .into_iter()
        .filter(|d| *d <= degree_bound)
        .collect();
    let full: Vec<Vec<(u32, u32)>> = ladder
        .iter()
        .map(|bound| {
            (0..=*bound)
                .flat_map(|i| (0..=(bound - i)).map(move |j| (i, j)))
                .collect()
        })
        .collect();

    let monomials = param_monomials(params.len(), 4);
    let n_bind = if params.is_empty() {
        1
    } else {
        monomials.len() + 3
    };
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(opts.seed, "g-bindings"));
    let bindings = gen_bindings(params, n_bind, &mut rng);

    let mut atom_args = BTreeSet::new();
    for e in [&target, h, l] {
        collect_func_args(e, &mut atom_args);
    }

    // Solve the first binding over the full ansatz, then keep only the
    // active coefficients; a later binding that turns out inconsistent on
    // the restricted set falls back to the full ansatz and enlarges it.
    let mut actives: Option<Vec<(u32, u32)>> = None;
    let mut per_binding: Vec<BTreeMap<(u32, u32), Rat>> = Vec::new();
    for (bi, binding) in bindings.iter().enumerate() {
        let mut attempt_active = actives.clone();
        let mut rung = 0usize;
        loop {
            let unknowns: &[(u32, u32)] = attempt_active.as_deref().unwrap_or(&full[rung]);
            let fit =
                fit_one_binding(&target, h, l, unknowns, domain, binding, &atom_args, opts, bi)?;
            match fit {
                BindingFit::Coeffs(c) => {
                    if attempt_active.is_none() {
                        let mut support: Vec<(u32, u32)> = c.keys().cloned().collect();
                        if let Some(prev) = &actives {
                            support.extend(prev.iter().cloned());
                        }
                        support.sort();
                        support.dedup();
                        actives = Some(support);
                    }
                    per_binding.push(c);
                    break;
                }
                BindingFit::Inconsistent if attempt_active.is_some() => {
                    attempt_active = None;
                }
                BindingFit::Inconsistent if rung + 1 < full.len() => {
                    rung += 1;
                }
                BindingFit::Inconsistent => {
                    return Err(AlgebraError::FitFailed(format!(
                        "no polynomial of degree <= {degree_bound} matches B^2 + k^2 A^2"
                    )));
                }
            }
        }
    }

    let support: BTreeSet<(u32, u32)> = per_binding
        .iter()
        .flat_map(|c| c.keys().cloned())
        .collect();
    let rows: Vec<Vec<Rat>> = bindings
        .iter()
        .map(|b| {
            monomials
                .iter()
                .map(|e| monomial_value(e, params, b))
                .collect()
        })
        .collect();
    let mut coeffs = BTreeMap::new();
    for key in support {
        let values: Vec<Rat> = per_binding
            .iter()
            .map(|c| c.get(&key).cloned().unwrap_or_else(Rat::zero))
            .collect();
        let sol = match solve_exact(&rows, &values) {
            SolveOutcome::Unique(c) => c,
            SolveOutcome::RankDeficient => {
                return Err(AlgebraError::FitFailed(
                    "parameter reconstruction underdetermined".into(),
                ))
            }
            SolveOutcome::Inconsistent => {
                return Err(AlgebraError::FitFailed(format!(
                    "coefficient of H^{} L^{} is not polynomial of degree <= 4 in the parameters",
                    key.0, key.1
                )))
            }
        };
        let e = monomial_sum(&monomials, params, &sol);
        if !e.is_zero_num() {
            coeffs.insert(key, e);
        }
    }
    let g = BivarPoly { coeffs };

    let g_phase = g.substitute(h, l);
    match equal_identically(&target, &g_phase, domain, &opts.identity("g-verify"))? {
        IdentityVerdict::Holds(cert) => Ok((g, cert)),
        IdentityVerdict::Fails(w) => Err(AlgebraError::FitFailed(format!(
            "fitted G fails verification: {w}"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn fit_one_binding(
    target: &Expr,
    h: &Expr,
    l: &Expr,
    unknowns: &[(u32, u32)],
    domain: &Domain,
    binding: &BTreeMap<String, Rat>,
    atom_args: &BTreeSet<Expr>,
    opts: &AlgebraOptions,
    binding_index: usize,
) -> Result<BindingFit, AlgebraError> {
    let phase_syms: BTreeSet<String> = ["x", "y", "px", "py"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let seed = subseed(opts.seed, &format!("g-fit-{binding_index}"));
    let mut sampler = Sampler::new(domain, ChaCha8Rng::seed_from_u64(seed));
    sampler.wide = false;

    let max_deg = unknowns.iter().map(|(i, j)| i.max(j)).max().copied().unwrap_or(0) as usize;
    let mut rows_exact: Vec<Vec<Rat>> = Vec::new();
    let mut rhs_exact: Vec<Rat> = Vec::new();
    let mut rows_f64: Vec<Vec<f64>> = Vec::new();
    let mut rhs_f64: Vec<f64> = Vec::new();
    let mut all_exact = true;

    let want = unknowns.len() * 3 / 2 + 8;
    let mut tries = 0;
    while rows_exact.len().max(rows_f64.len()) < want && tries < want * 30 {
        tries += 1;
        let Ok(mut v) = sampler.sample(&phase_syms, atom_args) else {
            break;
        };
        for (k, val) in binding {
            v.bind(k, val.clone());
        }
        let (Ok(hv), Ok(lv), Ok(tv)) = (evaluate(h, &v), evaluate(l, &v), evaluate(target, &v))
        else {
            continue;
        };
        match (&hv, &lv, &tv) {
            (Value::Exact(hr), Value::Exact(lr), Value::Exact(tr)) if all_exact => {
                let hp = power_table(hr, max_deg);
                let lp = power_table(lr, max_deg);
                let row: Vec<Rat> = unknowns
                    .iter()
                    .map(|(i, j)| hp[*i as usize].clone() * lp[*j as usize].clone())
                    .collect();
                rows_exact.push(row);
                rhs_exact.push(tr.clone());
            }
            _ => {
                if all_exact && !rows_exact.is_empty() {
                    for (r, rb) in rows_exact.drain(..).zip(rhs_exact.drain(..)) {
                        rows_f64
                            .push(r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect());
                        rhs_f64.push(rb.to_f64().unwrap_or(f64::NAN));
                    }
                }
                all_exact = false;
                let (hf, lf, tf) = (hv.to_f64(), lv.to_f64(), tv.to_f64());
                let row: Vec<f64> = unknowns
                    .iter()
                    .map(|(i, j)| hf.powi(*i as i32) * lf.powi(*j as i32))
                    .collect();
                rows_f64.push(row);
                rhs_f64.push(tf);
            }
        }
    }

    if all_exact {
        if rows_exact.len() < unknowns.len() {
            return Err(AlgebraError::FitFailed(
                "not enough valid sample points".into(),
            ));
        }
        // On large ansatzes, detect the candidate support with a cheap
        // column-scaled floating solve, then solve exactly on that support
        // against every collected row. Falls back to the full exact solve.
        // A clearly nonzero floating residual short-circuits to the
        // inconsistent verdict (safe: it only drives ansatz escalation, and
        // the escalated fit is verified exactly afterwards).
        if unknowns.len() > 24 {
            if ls_residual_is_large(&rows_exact, &rhs_exact) {
                return Ok(BindingFit::Inconsistent);
            }
            let support_idx = solve_modp(&rows_exact, &rhs_exact)
                .unwrap_or_else(|| detect_support_f64(&rows_exact, &rhs_exact));
            if support_idx.len() < unknowns.len() {
                let rows_r: Vec<Vec<Rat>> = rows_exact
                    .iter()
                    .map(|r| support_idx.iter().map(|&i| r[i].clone()).collect())
                    .collect();
                if let SolveOutcome::Unique(sol) = solve_exact(&rows_r, &rhs_exact) {
                    return Ok(BindingFit::Coeffs(
                        support_idx
                            .iter()
                            .map(|&i| unknowns[i])
                            .zip(sol)
                            .filter(|(_, c)| !c.is_zero())
                            .collect(),
                    ));
                }
            }
        }
        match solve_exact(&rows_exact, &rhs_exact) {
            SolveOutcome::Unique(sol) => Ok(BindingFit::Coeffs(
                unknowns
                    .iter()
                    .cloned()
                    .zip(sol)
                    .filter(|(_, c)| !c.is_zero())
                    .collect(),
            )),
            SolveOutcome::Inconsistent => Ok(BindingFit::Inconsistent),
            SolveOutcome::RankDeficient => Err(AlgebraError::FitFailed(
                "evaluation matrix is rank-deficient".into(),
            )),
        }
    } else {
        // Floating fallback: least squares, snap to rationals; a bad snap is
        // caught by the exact re-verification in the caller.
        let sol = solve_f64_ls(&rows_f64, &rhs_f64)
            .ok_or_else(|| AlgebraError::FitFailed("singular least-squares system".into()))?;
        let maxc = sol.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut out = BTreeMap::new();
        for (k, c) in unknowns.iter().zip(&sol) {
            if c.abs() <= 1e-6 * (1.0 + maxc) {
                continue;
            }
            let r = rationalize(*c, 10_000).ok_or_else(|| {
                AlgebraError::FitFailed(format!("coefficient {c} does not rationalize"))
            })?;
            out.insert(*k, r);
        }
        Ok(BindingFit::Coeffs(out))
    }
}

// ---------------------------------------------------------------------------
// Closure check and the full pipeline
// ---------------------------------------------------------------------------

/// Certify `{A, B} = -1/2 dG/dL` and return the closure polynomial.
pub fn check_closure(
    a: &Expr,
    b: &Expr,
    g: &BivarPoly,
    h: &Expr,
    l: &Expr,
    domain: &Domain,
    opts: &AlgebraOptions,
) -> Result<(BivarPoly, Certificate), AlgebraError> {
    let closure = g.partial_l().scale(&crate::expr::rat(-1, 2));
    let ab_raw = bracket_raw(a, b);
    let rhs = closure.substitute(h, l);
    match equal_identically(&ab_raw, &rhs, domain, &opts.identity("closure"))? {
        IdentityVerdict::Holds(cert) => Ok((closure, cert)),
        IdentityVerdict::Fails(w) => Err(AlgebraError::ClosureViolation(w.to_string())),
    }
}

/// Run the full pipeline on a system definition:
/// integrality preconditions, `detect_k2`, `fit_structure_g`, `check_closure`
/// (retrying the fit once at the larger degree bound), and classification.
pub fn analyze_system(
    sys: &SystemDef,
    opts: &AlgebraOptions,
) -> Result<AlgebraReport, AlgebraError> {
    let mut certificates = Vec::new();

    for (which, f, tag) in [("L", &sys.l, "int-l"), ("A", &sys.a, "int-a")] {
        let verdict = equal_identically(
            &bracket_raw(f, &sys.h),
            &Expr::zero(),
            &sys.domain,
            &opts.identity(tag),
        )
        .map_err(AlgebraError::from)
        .at_stage("precondition")?;
        match verdict {
            IdentityVerdict::Holds(cert) => {
                certificates.push((format!("{{{which},H}} = 0"), cert));
            }
            IdentityVerdict::Fails(w) => {
                return Err(AlgebraError::NotIntegral {
                    which: which.to_string(),
                    witness: w.to_string(),
                })
                .at_stage("precondition");
            }
        }
    }

    let det = detect_k2(&sys.l, &sys.a, &sys.domain, &sys.params, opts).at_stage("detect-k2")?;
    certificates.push(("{L,B} + k^2 A = 0".to_string(), det.certificate.clone()));
    let k2 = det.k2;
    let b = det.b;

    let (g, bracket_ab) = if k2.is_zero_num() {
        // k = 0: the structure relation collapses to B^2 = G with B a
        // parameter-only constant, stored as a degree-0 polynomial; the
        // closure bracket is then checked directly against zero.
        let b_syms = b.free_symbols();
        if ["x", "y", "px", "py"].iter().any(|s| b_syms.contains(*s)) {
            return Err(AlgebraError::Unsupported(
                "k^2 = 0 with a non-constant bracket B".into(),
            ))
            .at_stage("fit-structure");
        }
        let g = BivarPoly::constant(normalize(&Expr::powi(b.clone(), 2)));
        let target = Expr::powi(b.clone(), 2) + k2.clone() * Expr::powi(sys.a.clone(), 2);
        let verdict = equal_identically(
            &target,
            &g.substitute(&sys.h, &sys.l),
            &sys.domain,
            &opts.identity("g-verify"),
        )
        .map_err(AlgebraError::from)
        .at_stage("fit-structure")?;
        match verdict {
            IdentityVerdict::Holds(cert) => {
                certificates.push(("B^2 + k^2 A^2 - G(H,L) = 0".to_string(), cert));
            }
            IdentityVerdict::Fails(w) => {
                return Err(AlgebraError::FitFailed(w.to_string())).at_stage("fit-structure");
            }
        }
        let ab_raw = bracket_raw(&sys.a, &b);
        let verdict = equal_identically(
            &ab_raw,
            &Expr::zero(),
            &sys.domain,
            &opts.identity("closure"),
        )
        .map_err(AlgebraError::from)
        .at_stage("check-closure")?;
        match verdict {
            IdentityVerdict::Holds(cert) => {
                certificates.push(("{A,B} + 1/2 dG/dL = 0".to_string(), cert));
            }
            IdentityVerdict::Fails(w) => {
                return Err(AlgebraError::ClosureViolation(w.to_string()))
                    .at_stage("check-closure");
            }
        }
        (g, BivarPoly::zero())
    } else {
        let mut fitted = fit_structure_g(
            &sys.a,
            &b,
            &k2,
            &sys.h,
            &sys.l,
            opts.degree_bound,
            &sys.domain,
            &sys.params,
            opts,
        );
        if matches!(fitted, Err(AlgebraError::FitFailed(_))) && opts.retry_bound > opts.degree_bound
        {
            fitted = fit_structure_g(
                &sys.a,
                &b,
                &k2,
                &sys.h,
                &sys.l,
                opts.retry_bound,
                &sys.domain,
                &sys.params,
                opts,
            );
        }
        let (g, cert_g) = fitted.at_stage("fit-structure")?;
        certificates.push(("B^2 + k^2 A^2 - G(H,L) = 0".to_string(), cert_g));
        let (closure, cert_c) = check_closure(
            &sys.a, &b, &g, &sys.h, &sys.l, &sys.domain, opts,
        )
        .at_stage("check-closure")?;
        certificates.push(("{A,B} + 1/2 dG/dL = 0".to_string(), cert_c));
        (g, closure)
    };

    let degree_label = classify(&bracket_ab);
    Ok(AlgebraReport {
        system: sys.name.clone(),
        k2,
        b,
        g,
        bracket_ab,
        degree_label,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::instantiate;
    use crate::expr::parse;
    use std::collections::BTreeMap;

    fn sys(name: &str) -> crate::catalog::SystemDef {
        instantiate(name, &BTreeMap::new()).unwrap()
    }

    fn fast_opts() -> AlgebraOptions {
        AlgebraOptions {
            trials: 32,
            ..Default::default()
        }
    }

    #[test]
    fn k2_detection_oscillator() {
        let s = sys("harmonic-isotropic");
        let det = detect_k2(&s.l, &s.a, &s.domain, &s.params, &fast_opts()).unwrap();
        assert_eq!(det.k2, Expr::num(4));
        assert_eq!(det.certificate, Certificate::Symbolic);
    }

    #[test]
    fn k2_detection_parameter_dependent() {
        let s = sys("smorodinsky-winternitz");
        let det = detect_k2(&s.l, &s.a, &s.domain, &s.params, &fast_opts()).unwrap();
        let want = normalize(&parse("32*b", &["b"]).unwrap());
        assert_eq!(normalize(&det.k2), want);
    }

    #[test]
    fn k2_zero_for_constant_bracket() {
        let s = sys("post-winternitz");
        let det = detect_k2(&s.l, &s.a, &s.domain, &s.params, &fast_opts()).unwrap();
        assert!(det.k2.is_zero_num());
        assert_eq!(normalize(&det.b), Expr::num(108));
    }

    #[test]
    fn degenerate_a_is_rejected() {
        let s = sys("harmonic-isotropic");
        let err = detect_k2(&s.l, &Expr::zero(), &s.domain, &s.params, &fast_opts());
        assert!(matches!(err, Err(AlgebraError::DegenerateIntegral)));
    }

    #[test]
    fn oscillator_full_report() {
        let s = sys("harmonic-isotropic");
        let report = analyze_system(&s, &fast_opts()).unwrap();
        assert!(report.diff_expected(s.expected.as_ref().unwrap()).is_empty());
        assert_eq!(report.degree_label, DegreeLabel::Linear);
        // Polynomial system: every certificate is symbolic.
        for (rel, cert) in &report.certificates {
            assert_eq!(cert, &Certificate::Symbolic, "{rel} not symbolic");
        }
    }

    #[test]
    fn kepler_full_report_is_sampled() {
        let s = sys("kepler");
        let report = analyze_system(&s, &fast_opts()).unwrap();
        assert!(report.diff_expected(s.expected.as_ref().unwrap()).is_empty());
        assert_eq!(report.degree_label, DegreeLabel::Quadratic);
        for (rel, cert) in &report.certificates {
            assert!(
                matches!(cert, Certificate::Sampled { .. }),
                "{rel} unexpectedly symbolic"
            );
        }
    }

    #[test]
    fn classify_examples() {
        let linear = BivarPoly {
            coeffs: [((0, 1), Expr::num(4))].into_iter().collect(),
        };
        assert_eq!(classify(&linear), DegreeLabel::Linear);
        let quadratic = BivarPoly {
            coeffs: [((1, 1), Expr::num(-2))].into_iter().collect(),
        };
        assert_eq!(classify(&quadratic), DegreeLabel::Quadratic);
        let deg9 = BivarPoly {
            coeffs: [((6, 3), Expr::num(-2))].into_iter().collect(),
        };
        assert_eq!(classify(&deg9), DegreeLabel::DegreeN(9));
        assert_eq!(classify(&BivarPoly::zero()), DegreeLabel::Linear);
    }

    #[test]
    fn classify_invariant_under_rescaling_a() {
        let mut s = sys("fokas-lagerstrom");
        let before = analyze_system(&s, &fast_opts()).unwrap();
        s.a = normalize(&(Expr::ratio(3, 2) * s.a.clone()));
        let after = analyze_system(&s, &fast_opts()).unwrap();
        assert_eq!(before.degree_label, after.degree_label);
        assert_eq!(normalize(&before.k2), normalize(&after.k2));
    }

    #[test]
    fn refit_with_different_seed_is_identical() {
        let s = sys("holt");
        let r1 = analyze_system(&s, &AlgebraOptions::with_seed(42)).unwrap();
        let r2 = analyze_system(&s, &AlgebraOptions::with_seed(2024)).unwrap();
        assert_eq!(r1.g, r2.g);
        assert_eq!(r1.bracket_ab, r2.bracket_ab);
        assert_eq!(normalize(&r1.k2), normalize(&r2.k2));
    }

    #[test]
    fn rationalize_round_trips() {
        assert_eq!(rationalize(0.5, 1000), Some(crate::expr::rat(1, 2)));
        assert_eq!(rationalize(-2.0, 1000), Some(crate::expr::rat(-2, 1)));
        assert_eq!(
            rationalize(1.0 / 3.0, 1000),
            Some(crate::expr::rat(1, 3))
        );
    }

    #[test]
    fn solve_exact_detects_inconsistency() {
        let rows = vec![
            vec![crate::expr::rint(1), crate::expr::rint(0)],
            vec![crate::expr::rint(0), crate::expr::rint(1)],
            vec![crate::expr::rint(1), crate::expr::rint(1)],
        ];
        let rhs = vec![
            crate::expr::rint(1),
            crate::expr::rint(2),
            crate::expr::rint(5),
        ];
        assert_eq!(solve_exact(&rows, &rhs), SolveOutcome::Inconsistent);
    }
}
