//! Randomized identity testing with certificates.
//!
//! A difference whose normal form vanishes and which lives in the rational
//! fragment (integer exponents, no function nodes) is certified `symbolic`:
//! the cancellation used only ring operations, so it holds unconditionally.
//! Everything else is certified by seeded sampling at exact rational points;
//! fractional-power and trigonometric cancellations are domain- or
//! branch-conditional, so they deliberately never earn the symbolic label.

use super::sample::{collect_func_args, Domain, SampleError, Sampler};
use super::{evaluate, Expr, NormalForm, Rat, Value};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// How an identity was verified.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum Certificate {
    #[serde(rename = "symbolic")]
    Symbolic,
    #[serde(rename = "sampled")]
    Sampled { trials: u32 },
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Certificate::Symbolic => write!(f, "symbolic"),
            Certificate::Sampled { trials } => write!(f, "sampled({trials})"),
        }
    }
}

/// A concrete point at which a claimed identity fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub bindings: BTreeMap<String, Rat>,
    pub atom_values: BTreeMap<String, Rat>,
    pub difference: String,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let binds: Vec<String> = self
            .bindings
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        write!(f, "at {} difference {}", binds.join(", "), self.difference)?;
        if !self.atom_values.is_empty() {
            let atoms: Vec<String> = self
                .atom_values
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            write!(f, " (atoms {})", atoms.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IdentityVerdict {
    Holds(Certificate),
    Fails(Box<Witness>),
}

impl IdentityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, IdentityVerdict::Holds(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            IdentityVerdict::Holds(c) => Some(c),
            IdentityVerdict::Fails(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IdentityOptions {
    pub trials: u32,
    pub seed: u64,
    /// Relative tolerance on the floating path.
    pub tolerance: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions {
            trials: 128,
            seed: 42,
            tolerance: 1e-10,
        }
    }
}

/// Probabilistic identity test `e1 == e2` over the given domain.
pub fn equal_identically(
    e1: &Expr,
    e2: &Expr,
    domain: &Domain,
    opts: &IdentityOptions,
) -> Result<IdentityVerdict, SampleError> {
    assert!(opts.trials >= 1, "identity testing needs at least one trial");
    let diff = e1.clone() - e2.clone();
    let nf = NormalForm::of(&diff);
    if nf.is_zero() && diff.is_rational_fragment() {
        return Ok(IdentityVerdict::Holds(Certificate::Symbolic));
    }

    let symbols: BTreeSet<String> = diff.free_symbols();
    let mut atom_args = BTreeSet::new();
    collect_func_args(&diff, &mut atom_args);

    let mut sampler = Sampler::new(domain, ChaCha8Rng::seed_from_u64(opts.seed));
    for _ in 0..opts.trials {
        // Draw until both the difference and the scale reference evaluate.
        let mut drawn = None;
        for _ in 0..64 {
            let v = sampler.sample(&symbols, &atom_args)?;
            let d = evaluate(&diff, &v);
            let s = evaluate(e1, &v);
            if let (Ok(d), Ok(s)) = (d, s) {
                drawn = Some((v, d, s));
                break;
            }
        }
        let Some((v, d, scale_ref)) = drawn else {
            return Err(SampleError::TooRestrictive(64));
        };
        let ok = match &d {
            Value::Exact(r) => r.is_zero(),
            Value::Float(f) => f.abs() < opts.tolerance * (1.0 + scale_ref.to_f64().abs()),
        };
        if !ok {
            let bindings = v
                .symbols
                .iter()
                .filter_map(|(k, val)| val.as_exact().map(|r| (k.clone(), r.clone())))
                .collect();
            let atom_values = v
                .atoms
                .iter()
                .map(|(k, val)| (k.to_string(), val.clone()))
                .collect();
            let difference = match &d {
                Value::Exact(r) => r.to_string(),
                Value::Float(f) => format!("{f:e}"),
            };
            return Ok(IdentityVerdict::Fails(Box::new(Witness {
                bindings,
                atom_values,
                difference,
            })));
        }
    }
    Ok(IdentityVerdict::Holds(Certificate::Sampled {
        trials: opts.trials,
    }))
}
