//! Built-in superintegrable systems and user-supplied system documents.
//!
//! Each built-in carries its Hamiltonian `H`, second integral `L`, third
//! integral `A`, parameter defaults, domain exclusions, and the expected
//! algebra `(k^2, G, {A,B})` used for regression. Parameters stay symbolic
//! unless explicitly bound at instantiation.

use crate::expr::{
    equal_identically, parse, parse_rational, rat, Domain, Exclusion, Expr, IdentityOptions,
    IdentityVerdict, ParseError, Rat, SampleError, SampleStrategy,
};
use crate::poisson::{bracket_raw, poisson_bracket};
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("`{which}` is not an integral of motion: {witness}")]
    NotAnIntegral { which: String, witness: String },
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Expected algebra data for regression against the derived results.
#[derive(Debug, Clone)]
pub struct Expected {
    pub k2: Expr,
    /// Constant bracket `B = {L, A}` where the paper reports one (k = 0).
    pub b: Option<Expr>,
    pub g: BTreeMap<(u32, u32), Expr>,
    pub bracket_ab: BTreeMap<(u32, u32), Expr>,
    pub degree_label: String,
}

/// A named Hamiltonian system, fully materialized.
#[derive(Debug, Clone)]
pub struct SystemDef {
    pub name: String,
    /// Algebra type as tabulated in the source classification.
    pub table_label: Option<String>,
    pub h: Expr,
    pub l: Expr,
    pub a: Expr,
    pub aux: Vec<(String, Expr)>,
    /// Remaining symbolic parameters with their default rational values.
    pub params: Vec<(String, Rat)>,
    pub domain: Domain,
    /// Kinetic(p) + potential(q) split exists, enabling leapfrog.
    pub separable: bool,
    /// Singularity guards for integration: abort when |expr| < threshold.
    pub guards: Vec<(Expr, f64)>,
    pub expected: Option<Expected>,
}

impl SystemDef {
    pub fn param_names(&self) -> Vec<&str> {
        self.params.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn default_binding(&self) -> BTreeMap<String, Rat> {
        self.params.iter().cloned().collect()
    }
}

struct BuiltinDef {
    name: &'static str,
    table_label: &'static str,
    params: &'static [(&'static str, (i64, i64))],
    aux: &'static [(&'static str, &'static str)],
    h: &'static str,
    l: &'static str,
    /// Either a literal expression or the marker `{aux1,aux2}` meaning the
    /// Poisson bracket of the two named expressions.
    a: &'static str,
    domain: &'static [&'static str],
    strategy: SampleStrategy,
    separable: bool,
    guards: &'static [(&'static str, f64)],
    expected_k2: &'static str,
    expected_b: Option<&'static str>,
    expected_g: &'static [(u32, u32, &'static str)],
    expected_ab: &'static [(u32, u32, &'static str)],
    expected_label: &'static str,
}

const BUILTINS: &[BuiltinDef] = &[
    BuiltinDef {
        name: "harmonic-isotropic",
        table_label: "Linear",
        params: &[("m", (1, 1)), ("omega", (1, 1))],
        aux: &[],
        h: "(px^2+py^2)/(2*m) + m*omega^2*(x^2+y^2)/2",
        l: "x*py - y*px",
        a: "px*py + m^2*omega^2*x*y",
        domain: &[],
        strategy: SampleStrategy::Generic,
        separable: true,
        guards: &[],
        expected_k2: "4",
        expected_b: None,
        expected_g: &[(2, 0, "4*m^2"), (0, 2, "-4*omega^2*m^2")],
        expected_ab: &[(0, 1, "4*omega^2*m^2")],
        expected_label: "linear",
    },
    BuiltinDef {
        name: "kepler",
        table_label: "Quadratic",
        params: &[("alpha", (1, 1))],
        aux: &[],
        h: "(px^2+py^2)/2 - alpha/sqrt(x^2+y^2)",
        l: "x*py - y*px",
        a: "-(x*py - y*px)*px - alpha*y/sqrt(x^2+y^2)",
        domain: &["x^2+y^2 != 0"],
        strategy: SampleStrategy::PythagoreanXY,
        separable: true,
        guards: &[("x^2+y^2", 1e-12)],
        expected_k2: "1",
        expected_b: None,
        expected_g: &[(0, 0, "alpha^2"), (1, 2, "2")],
        expected_ab: &[(1, 1, "-2")],
        expected_label: "quadratic",
    },
    BuiltinDef {
        name: "fokas-lagerstrom",
        table_label: "Cubic",
        params: &[],
        aux: &[],
        h: "(px^2+py^2)/2 + x^2/2 + y^2/18",
        l: "px^2 + x^2",
        a: "(x*py - y*px)*py^2 + y^3*px/27 - x*y^2*py/3",
        domain: &[],
        strategy: SampleStrategy::Generic,
        separable: true,
        guards: &[],
        expected_k2: "4",
        expected_b: None,
        expected_g: &[(0, 4, "-4"), (3, 1, "32"), (2, 2, "-48"), (1, 3, "24")],
        expected_ab: &[(0, 3, "8"), (3, 0, "-16"), (2, 1, "48"), (1, 2, "-36")],
        expected_label: "cubic",
    },
    BuiltinDef {
        name: "holt",
        table_label: "Quadratic",
        params: &[("delta", (1, 1))],
        aux: &[],
        h: "(px^2+py^2)/2 + x^2 + 4*y^2 + delta/x^2",
        l: "py^2 + 8*y^2",
        a: "px^2*py + 8*x*y*px - 2*x^2*py + 2*delta*py/x^2",
        domain: &["x != 0"],
        strategy: SampleStrategy::Generic,
        separable: true,
        guards: &[("x", 1e-6)],
        expected_k2: "32",
        expected_b: None,
        expected_g: &[
            (2, 1, "128"),
            (1, 2, "-128"),
            (0, 3, "32"),
            (0, 1, "-512*delta"),
        ],
        expected_ab: &[
            (2, 0, "-64"),
            (1, 1, "128"),
            (0, 2, "-48"),
            (0, 0, "256*delta"),
        ],
        expected_label: "quadratic",
    },
    BuiltinDef {
        name: "smorodinsky-winternitz",
        table_label: "Cubic",
        params: &[("b", (1, 1)), ("c", (1, 1))],
        aux: &[
            ("T", "py^2 + 2*b*y^2"),
            ("C", "x^2*py^2 + y^2*px^2 - 2*x*y*px*py + 2*c*y^2/x^2"),
        ],
        h: "(px^2+py^2)/2 + b*(x^2+y^2) + c/x^2",
        l: "T",
        a: "{T,C}",
        domain: &["x != 0"],
        strategy: SampleStrategy::Generic,
        separable: true,
        guards: &[("x", 1e-6)],
        expected_k2: "32*b",
        expected_b: None,
        expected_g: &[
            (2, 2, "256"),
            (1, 3, "-256"),
            (0, 4, "64"),
            (0, 2, "-1024*b*c"),
        ],
        expected_ab: &[
            (2, 1, "-256"),
            (1, 2, "384"),
            (0, 3, "-128"),
            (0, 1, "1024*b*c"),
        ],
        expected_label: "cubic",
    },
    BuiltinDef {
        // Coupling constant normalized to 1, matching the constant bracket
        // B = 108 reported for this system.
        name: "post-winternitz",
        table_label: "Linear",
        params: &[],
        aux: &[],
        h: "(px^2+py^2)/2 + y/x^(2/3)",
        l: "3*px^2*py + 2*py^3 + 9*x^(1/3)*px + 6*y*py/x^(2/3)",
        a: "px^4 + 4*y*px^2/x^(2/3) - 12*x^(1/3)*px*py - 2*(9*x^2 - 2*y^2)/x^(4/3)",
        domain: &["x > 0"],
        strategy: SampleStrategy::CubeX,
        separable: true,
        guards: &[("x", 1e-6)],
        expected_k2: "0",
        expected_b: Some("108"),
        expected_g: &[(0, 0, "11664")],
        expected_ab: &[],
        expected_label: "linear",
    },
    BuiltinDef {
        name: "trig-momentum",
        table_label: "Quadratic",
        params: &[],
        aux: &[],
        h: "cos(y*py^2)",
        l: "px",
        a: "sin(x)*px^2*cos(y*py^2)^3",
        domain: &[],
        strategy: SampleStrategy::CircleAtoms,
        separable: false,
        guards: &[],
        expected_k2: "1",
        expected_b: None,
        expected_g: &[(6, 4, "1")],
        expected_ab: &[(6, 3, "-2")],
        expected_label: "degree-9",
    },
    BuiltinDef {
        // A is the deformed off-diagonal Fradkin component. The diagonal
        // difference pix^2 + omega^2 x^2 - piy^2 - omega^2 y^2 generates the
        // same algebra with B, G, {A,B} scaled by 2, 4, 4; only the
        // off-diagonal choice reduces to the harmonic-isotropic report at
        // lambda = 0.
        name: "curved-oscillator",
        table_label: "Quadratic",
        params: &[("omega", (1, 1)), ("lambda", (1, 10))],
        aux: &[
            ("pix", "px*(1 + lambda*x^2) + lambda*x*y*py"),
            ("piy", "py*(1 + lambda*y^2) + lambda*x*y*px"),
        ],
        h: "(pix^2 + piy^2 + lambda*(x*py - y*px)^2)/2 + omega^2*(x^2+y^2)/2",
        l: "x*py - y*px",
        a: "pix*piy + omega^2*x*y",
        domain: &[],
        strategy: SampleStrategy::Generic,
        separable: false,
        guards: &[],
        expected_k2: "4",
        expected_b: None,
        expected_g: &[
            (0, 4, "lambda^2"),
            (1, 2, "-4*lambda"),
            (0, 2, "-4*omega^2"),
            (2, 0, "4"),
        ],
        expected_ab: &[
            (0, 3, "-2*lambda^2"),
            (1, 1, "4*lambda"),
            (0, 1, "4*omega^2"),
        ],
        expected_label: "cubic",
    },
];

/// Names of the built-in systems, in table order.
pub fn builtin_systems() -> Vec<&'static str> {
    BUILTINS.iter().map(|b| b.name).collect()
}

/// (name, tabulated algebra type) pairs, in table order.
pub fn builtin_table() -> Vec<(&'static str, &'static str)> {
    BUILTINS.iter().map(|b| (b.name, b.table_label)).collect()
}

/// Materialize a built-in system. Explicit parameter bindings are substituted
/// numerically (into the expressions and the expected data alike) and removed
/// from the symbolic parameter list; unbound parameters stay symbolic with
/// their defaults available for numeric work.
pub fn instantiate(
    name: &str,
    bindings: &BTreeMap<String, Rat>,
) -> Result<SystemDef, CatalogError> {
    let def = BUILTINS
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| CatalogError::UnknownSystem(name.to_string()))?;
    for k in bindings.keys() {
        if !def.params.iter().any(|(p, _)| p == k) {
            return Err(CatalogError::UnknownParameter(k.clone()));
        }
    }
    let param_names: Vec<&str> = def.params.iter().map(|(n, _)| *n).collect();
    let mut aux_syms: Vec<&str> = param_names.clone();
    let mut aux_exprs: Vec<(String, Expr)> = Vec::new();
    for (aname, atext) in def.aux {
        let e = parse(atext, &aux_syms)?;
        let e = substitute_aux(&e, &aux_exprs);
        aux_exprs.push((aname.to_string(), e));
        aux_syms.push(aname);
    }
    let parse_main = |text: &str| -> Result<Expr, CatalogError> {
        let e = parse(text, &aux_syms)?;
        Ok(substitute_aux(&e, &aux_exprs))
    };
    let h = parse_main(def.h)?;
    let l = parse_main(def.l)?;
    let a = if let Some(inner) = def.a.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        let (f, g) = inner
            .split_once(',')
            .ok_or_else(|| CatalogError::Schema("bad bracket marker".into()))?;
        poisson_bracket(&parse_main(f.trim())?, &parse_main(g.trim())?)
    } else {
        parse_main(def.a)?
    };

    let subst: BTreeMap<String, Expr> = bindings
        .iter()
        .map(|(k, v)| (k.clone(), Expr::Num(v.clone())))
        .collect();
    let apply = |e: &Expr| -> Expr {
        if subst.is_empty() {
            e.clone()
        } else {
            crate::expr::normalize(&e.substitute(&subst))
        }
    };

    let parse_param_expr = |text: &str| -> Result<Expr, CatalogError> {
        let e = parse(text, &param_names)?;
        Ok(apply(&e))
    };
    let mut g_map = BTreeMap::new();
    for (i, j, coeff) in def.expected_g {
        let e = parse_param_expr(coeff)?;
        if !e.is_zero_num() {
            g_map.insert((*i, *j), e);
        }
    }
    let mut ab_map = BTreeMap::new();
    for (i, j, coeff) in def.expected_ab {
        let e = parse_param_expr(coeff)?;
        if !e.is_zero_num() {
            ab_map.insert((*i, *j), e);
        }
    }
    let expected = Some(Expected {
        k2: parse_param_expr(def.expected_k2)?,
        b: match def.expected_b {
            Some(s) => Some(parse_param_expr(s)?),
            None => None,
        },
        g: g_map,
        bracket_ab: ab_map,
        degree_label: def.expected_label.to_string(),
    });

    let mut exclusions = Vec::new();
    for d in def.domain {
        exclusions.push(parse_exclusion(d, &param_names)?);
    }
    let mut guards = Vec::new();
    for (g, tol) in def.guards {
        guards.push((parse(g, &param_names)?, *tol));
    }

    let params: Vec<(String, Rat)> = def
        .params
        .iter()
        .filter(|(n, _)| !bindings.contains_key(*n))
        .map(|(n, (num, den))| (n.to_string(), rat(*num, *den)))
        .collect();

    Ok(SystemDef {
        name: def.name.to_string(),
        table_label: Some(def.table_label.to_string()),
        h: apply(&h),
        l: apply(&l),
        a: apply(&a),
        aux: aux_exprs.into_iter().map(|(n, e)| (n, apply(&e))).collect(),
        params,
        domain: Domain {
            exclusions,
            strategy: def.strategy,
        },
        separable: def.separable,
        guards,
        expected,
    })
}

fn substitute_aux(e: &Expr, aux: &[(String, Expr)]) -> Expr {
    if aux.is_empty() {
        return e.clone();
    }
    let map: BTreeMap<String, Expr> = aux.iter().cloned().collect();
    e.substitute(&map)
}

fn parse_exclusion(text: &str, params: &[&str]) -> Result<Exclusion, CatalogError> {
    if let Some((lhs, rhs)) = text.split_once("!=") {
        if rhs.trim() != "0" {
            return Err(CatalogError::Schema(format!(
                "exclusion must compare against 0: {text}"
            )));
        }
        return Ok(Exclusion::NonZero(parse(lhs.trim(), params)?));
    }
    if let Some((lhs, rhs)) = text.split_once('>') {
        if rhs.trim() != "0" {
            return Err(CatalogError::Schema(format!(
                "exclusion must compare against 0: {text}"
            )));
        }
        return Ok(Exclusion::Positive(parse(lhs.trim(), params)?));
    }
    Err(CatalogError::Schema(format!(
        "unsupported domain predicate: {text}"
    )))
}

// ---------------------------------------------------------------------------
// JSON system documents
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct SystemDoc {
    name: String,
    #[serde(default)]
    parameters: Vec<ParamDoc>,
    hamiltonian: String,
    #[serde(rename = "L")]
    l: String,
    #[serde(rename = "A")]
    a: String,
    #[serde(default)]
    aux: BTreeMap<String, String>,
    #[serde(default)]
    domain: Vec<String>,
    #[serde(default)]
    expected: Option<ExpectedDoc>,
}

#[derive(Debug, Deserialize)]
struct ParamDoc {
    name: String,
    default: serde_json::Value,
}

#[derive(Debug, Deserialize)]
struct ExpectedDoc {
    k2: String,
    #[serde(default)]
    b: Option<String>,
    #[serde(rename = "G", default)]
    g: Vec<(u32, u32, String)>,
    #[serde(rename = "bracketAB", default)]
    bracket_ab: Vec<(u32, u32, String)>,
    degree_label: String,
}

fn value_to_rat(v: &serde_json::Value) -> Option<Rat> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(Rat::from_integer(i.into()))
            } else {
                parse_rational(&n.to_string())
            }
        }
        _ => None,
    }
}

/// Parse and validate a system document: expressions must parse against the
/// declared parameters, and `L`, `A` must Poisson-commute with `H` (the
/// rejection carries a witness point).
pub fn load_system(document: &str, opts: &IdentityOptions) -> Result<SystemDef, CatalogError> {
    let doc: SystemDoc =
        serde_json::from_str(document).map_err(|e| CatalogError::Schema(e.to_string()))?;
    let mut params = Vec::new();
    for p in &doc.parameters {
        let d = value_to_rat(&p.default)
            .ok_or_else(|| CatalogError::Schema(format!("bad default for `{}`", p.name)))?;
        params.push((p.name.clone(), d));
    }
    let param_names: Vec<&str> = params.iter().map(|(n, _)| n.as_str()).collect();
    let mut aux_syms = param_names.clone();
    let mut aux_exprs: Vec<(String, Expr)> = Vec::new();
    for (aname, atext) in &doc.aux {
        let e = parse(atext, &aux_syms)?;
        let e = substitute_aux(&e, &aux_exprs);
        aux_exprs.push((aname.clone(), e));
        aux_syms.push(aname);
    }
    let parse_main = |text: &str| -> Result<Expr, CatalogError> {
        let e = parse(text, &aux_syms)?;
        Ok(substitute_aux(&e, &aux_exprs))
    };
    let h = parse_main(&doc.hamiltonian)?;
    let l = parse_main(&doc.l)?;
    let a = parse_main(&doc.a)?;
    let mut exclusions = Vec::new();
    for d in &doc.domain {
        exclusions.push(parse_exclusion(d, &param_names)?);
    }
    let domain = Domain {
        exclusions,
        strategy: SampleStrategy::Generic,
    };
    for (which, f) in [("L", &l), ("A", &a)] {
        match equal_identically(&bracket_raw(f, &h), &Expr::zero(), &domain, opts)? {
            IdentityVerdict::Holds(_) => {}
            IdentityVerdict::Fails(w) => {
                return Err(CatalogError::NotAnIntegral {
                    which: which.to_string(),
                    witness: w.to_string(),
                });
            }
        }
    }
    let expected = match &doc.expected {
        None => None,
        Some(exp) => {
            let parse_param =
                |s: &str| -> Result<Expr, CatalogError> { Ok(parse(s, &param_names)?) };
            let mut g = BTreeMap::new();
            for (i, j, c) in &exp.g {
                g.insert((*i, *j), parse_param(c)?);
            }
            let mut ab = BTreeMap::new();
            for (i, j, c) in &exp.bracket_ab {
                ab.insert((*i, *j), parse_param(c)?);
            }
            Some(Expected {
                k2: parse_param(&exp.k2)?,
                b: exp.b.as_deref().map(parse_param).transpose()?,
                g,
                bracket_ab: ab,
                degree_label: exp.degree_label.clone(),
            })
        }
    };
    let separable = is_separable(&h);
    Ok(SystemDef {
        name: doc.name,
        table_label: None,
        h,
        l,
        a,
        aux: aux_exprs,
        params,
        domain,
        separable,
        guards: Vec::new(),
        expected,
    })
}

/// True when no collected monomial of `h` mixes coordinate and momentum
/// symbols, i.e. `H = K(p) + V(q)`.
pub fn is_separable(h: &Expr) -> bool {
    let nf = crate::expr::NormalForm::of(h);
    nf.term_exprs().iter().all(|t| {
        let syms = t.free_symbols();
        let has_q = syms.contains("x") || syms.contains("y");
        let has_p = syms.contains("px") || syms.contains("py");
        !(has_q && has_p)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::normalize;

    fn none() -> BTreeMap<String, Rat> {
        BTreeMap::new()
    }

    #[test]
    fn table_has_eight_systems_in_order() {
        let names = builtin_systems();
        assert_eq!(
            names,
            vec![
                "harmonic-isotropic",
                "kepler",
                "fokas-lagerstrom",
                "holt",
                "smorodinsky-winternitz",
                "post-winternitz",
                "trig-momentum",
                "curved-oscillator",
            ]
        );
        for n in names {
            instantiate(n, &none()).unwrap();
        }
    }

    #[test]
    fn kepler_with_alpha_bound() {
        let mut b = BTreeMap::new();
        b.insert("alpha".to_string(), rat(1, 1));
        let sys = instantiate("kepler", &b).unwrap();
        let want = parse("(px^2+py^2)/2 - 1/sqrt(x^2+y^2)", &[]).unwrap();
        assert_eq!(normalize(&sys.h), normalize(&want));
        assert!(sys.params.is_empty());
    }

    #[test]
    fn holt_l_matches_reported_form() {
        let mut b = BTreeMap::new();
        b.insert("delta".to_string(), rat(1, 1));
        let sys = instantiate("holt", &b).unwrap();
        assert_eq!(
            normalize(&sys.l),
            normalize(&parse("py^2 + 8*y^2", &[]).unwrap())
        );
    }

    #[test]
    fn smorodinsky_winternitz_a_is_bracket_of_t_and_c() {
        let sys = instantiate("smorodinsky-winternitz", &none()).unwrap();
        // Five-term expanded form of {T, C}.
        let want = parse(
            "8*b*x^2*y*py - 8*b*x*y^2*px - 4*y*px^2*py + 4*x*px*py^2 - 8*c*y*py/x^2",
            &["b", "c"],
        )
        .unwrap();
        assert_eq!(normalize(&sys.a), normalize(&want));
    }

    #[test]
    fn all_builtin_integrals_commute_with_h() {
        let opts = IdentityOptions {
            trials: 24,
            seed: 7,
            ..Default::default()
        };
        for name in builtin_systems() {
            let sys = instantiate(name, &none()).unwrap();
            for (which, f) in [("L", &sys.l), ("A", &sys.a)] {
                let v = crate::poisson::is_integral(f, &sys.h, &sys.domain, &opts).unwrap();
                assert!(v.holds(), "{name}: {which} is not an integral");
            }
        }
    }

    #[test]
    fn load_system_round_trips_builtin() {
        let doc = r#"{
            "name": "harmonic",
            "parameters": [{"name": "m", "default": 1}, {"name": "omega", "default": "1"}],
            "hamiltonian": "(px^2+py^2)/(2*m) + m*omega^2*(x^2+y^2)/2",
            "L": "x*py - y*px",
            "A": "px*py + m^2*omega^2*x*y",
            "domain": []
        }"#;
        let sys = load_system(doc, &IdentityOptions::default()).unwrap();
        let builtin = instantiate("harmonic-isotropic", &none()).unwrap();
        assert_eq!(normalize(&sys.h), normalize(&builtin.h));
        assert_eq!(normalize(&sys.a), normalize(&builtin.a));
        assert!(sys.separable);
    }

    #[test]
    fn load_system_rejects_non_integral_with_witness() {
        let doc = r#"{
            "name": "broken",
            "hamiltonian": "(px^2+py^2)/2 + (x^2+y^2)/2",
            "L": "x*py - y*px",
            "A": "x"
        }"#;
        match load_system(doc, &IdentityOptions::default()) {
            Err(CatalogError::NotAnIntegral { which, witness }) => {
                assert_eq!(which, "A");
                assert!(witness.contains("difference"));
            }
            other => panic!("expected not-an-integral, got {other:?}"),
        }
    }

    #[test]
    fn load_system_rejects_undeclared_parameter() {
        let doc = r#"{
            "name": "broken",
            "hamiltonian": "(px^2+py^2)/2 + beta*x",
            "L": "px",
            "A": "py"
        }"#;
        assert!(matches!(
            load_system(doc, &IdentityOptions::default()),
            Err(CatalogError::Parse(_))
        ));
    }

    #[test]
    fn unknown_name_and_parameter_errors() {
        assert!(matches!(
            instantiate("nope", &none()),
            Err(CatalogError::UnknownSystem(_))
        ));
        let mut b = BTreeMap::new();
        b.insert("zeta".to_string(), rat(1, 1));
        assert!(matches!(
            instantiate("kepler", &b),
            Err(CatalogError::UnknownParameter(_))
        ));
    }
}
