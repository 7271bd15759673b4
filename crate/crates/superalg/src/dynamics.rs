//! Numerical integration of Hamilton's equations.
//!
//! Used to cross-validate the algebraic results: conserved-quantity drift
//! along orbits and residuals of the implicit trajectory equations. The
//! right-hand sides are derived symbolically and compiled to f64 programs;
//! integration is fixed-step RK4, with leapfrog available for separable
//! Hamiltonians.

use crate::catalog::SystemDef;
use crate::expr::{
    differentiate, evaluate, normalize, EvalError, Expr, FloatProgram, Rat, Valuation, Value,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("leapfrog requires a separable Hamiltonian (kinetic(p) + potential(q))")]
    NotSeparable,
    #[error("singularity guard tripped at t = {t:.6} (last valid state kept)")]
    Singularity { t: f64 },
    #[error("integration produced non-finite values at t = {t:.6}")]
    NonFinite { t: f64 },
    #[error("invalid step: dt must be positive and t_end >= dt")]
    BadStep,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Assignment of the four phase-space coordinates plus parameter bindings.
#[derive(Debug, Clone)]
pub struct PhasePoint {
    pub x: Value,
    pub y: Value,
    pub px: Value,
    pub py: Value,
    pub params: BTreeMap<String, Value>,
}

impl PhasePoint {
    pub fn from_rationals(x: Rat, y: Rat, px: Rat, py: Rat) -> PhasePoint {
        PhasePoint {
            x: Value::Exact(x),
            y: Value::Exact(y),
            px: Value::Exact(px),
            py: Value::Exact(py),
            params: BTreeMap::new(),
        }
    }

    pub fn from_floats(x: f64, y: f64, px: f64, py: f64) -> PhasePoint {
        PhasePoint {
            x: Value::Float(x),
            y: Value::Float(y),
            px: Value::Float(px),
            py: Value::Float(py),
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, name: &str, v: Rat) -> PhasePoint {
        self.params.insert(name.to_string(), Value::Exact(v));
        self
    }

    pub fn to_valuation(&self) -> Valuation {
        let mut v = Valuation::new();
        v.symbols.insert("x".into(), self.x.clone());
        v.symbols.insert("y".into(), self.y.clone());
        v.symbols.insert("px".into(), self.px.clone());
        v.symbols.insert("py".into(), self.py.clone());
        for (k, val) in &self.params {
            v.symbols.insert(k.clone(), val.clone());
        }
        v
    }

    pub fn coords_f64(&self) -> [f64; 4] {
        [
            self.x.to_f64(),
            self.y.to_f64(),
            self.px.to_f64(),
            self.py.to_f64(),
        ]
    }
}

/// Hamilton's equations for `H`: `(dx/dt, dy/dt, dpx/dt, dpy/dt) =
/// (dH/dpx, dH/dpy, -dH/dx, -dH/dy)`, each in normal form.
pub fn hamilton_rhs(h: &Expr) -> [Expr; 4] {
    [
        normalize(&differentiate(h, "px")),
        normalize(&differentiate(h, "py")),
        normalize(&differentiate(h, "x").neg()),
        normalize(&differentiate(h, "y").neg()),
    ]
}

/// Evaluate the system's three integrals at a point (exact when the point
/// and parameters are rational and the expressions allow it).
pub fn constants_of(sys: &SystemDef, p: &PhasePoint) -> Result<[Value; 3], EvalError> {
    let mut v = p.to_valuation();
    for (name, default) in &sys.params {
        v.symbols
            .entry(name.clone())
            .or_insert_with(|| Value::Exact(default.clone()));
    }
    Ok([
        evaluate(&sys.h, &v)?,
        evaluate(&sys.l, &v)?,
        evaluate(&sys.a, &v)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Leapfrog,
}

/// Time-ordered orbit samples with conserved-quantity drift.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Decimated to at most 10^4 stored samples.
    pub samples: Vec<(f64, [f64; 4])>,
    pub integrals_at_start: [f64; 3],
    /// Max |value(t) - value(0)| for H, L, A over every computed step.
    pub drift: [f64; 3],
}

struct CompiledSystem {
    rhs: [FloatProgram; 4],
    integrals: [FloatProgram; 3],
    guards: Vec<(FloatProgram, f64)>,
}

fn compile_system(
    sys: &SystemDef,
    params: &BTreeMap<String, Rat>,
) -> Result<CompiledSystem, EvalError> {
    let subst: BTreeMap<String, Expr> = params
        .iter()
        .map(|(k, v)| (k.clone(), Expr::Num(v.clone())))
        .collect();
    let slots: BTreeMap<String, usize> = [("x", 0), ("y", 1), ("px", 2), ("py", 3)]
        .into_iter()
        .map(|(k, i)| (k.to_string(), i))
        .collect();
    let bind = |e: &Expr| -> Result<FloatProgram, EvalError> {
        FloatProgram::compile(&normalize(&e.substitute(&subst)), &slots)
    };
    let h = sys.h.substitute(&subst);
    let [dx, dy, dpx, dpy] = hamilton_rhs(&h);
    let rhs = [
        FloatProgram::compile(&dx, &slots)?,
        FloatProgram::compile(&dy, &slots)?,
        FloatProgram::compile(&dpx, &slots)?,
        FloatProgram::compile(&dpy, &slots)?,
    ];
    let integrals = [bind(&sys.h)?, bind(&sys.l)?, bind(&sys.a)?];
    let mut guards = Vec::new();
    for (g, tol) in &sys.guards {
        guards.push((bind(g)?, *tol));
    }
    Ok(CompiledSystem {
        rhs,
        integrals,
        guards,
    })
}

/// Fixed-step integration of Hamilton's equations.
///
/// Parameters default to the system's values and may be overridden by the
/// initial condition's bindings. Samples are decimated to at most 10^4
/// stored points; drift is tracked at every step.
pub fn integrate(
    sys: &SystemDef,
    ic: &PhasePoint,
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory, DynamicsError> {
    if !(dt > 0.0) || !(t_end >= dt) || !t_end.is_finite() {
        return Err(DynamicsError::BadStep);
    }
    if method == Method::Leapfrog && !sys.separable {
        return Err(DynamicsError::NotSeparable);
    }
    let mut params = sys.default_binding();
    for (k, v) in &ic.params {
        if let Value::Exact(r) = v {
            params.insert(k.clone(), r.clone());
        }
    }
    let compiled = compile_system(sys, &params)?;
    let mut stack = Vec::new();

    let n_steps = (t_end / dt).round() as usize;
    let keep_every = n_steps.div_ceil(10_000).max(1);

    let mut state = ic.coords_f64();
    let start: Vec<f64> = compiled
        .integrals
        .iter()
        .map(|p| p.eval(&state, &mut stack))
        .collect();
    let integrals_at_start = [start[0], start[1], start[2]];
    let mut drift = [0.0f64; 3];
    let mut samples = vec![(0.0, state)];
    let mut guard_prev: Vec<f64> = compiled
        .guards
        .iter()
        .map(|(g, _)| g.eval(&state, &mut stack))
        .collect();

    let eval_rhs = |s: &[f64; 4], stack: &mut Vec<f64>| -> [f64; 4] {
        [
            compiled.rhs[0].eval(s, stack),
            compiled.rhs[1].eval(s, stack),
            compiled.rhs[2].eval(s, stack),
            compiled.rhs[3].eval(s, stack),
        ]
    };

    for step in 1..=n_steps {
        let t = step as f64 * dt;
        match method {
            Method::Rk4 => {
                let k1 = eval_rhs(&state, &mut stack);
                let s2 = add_scaled(&state, &k1, dt / 2.0);
                let k2 = eval_rhs(&s2, &mut stack);
                let s3 = add_scaled(&state, &k2, dt / 2.0);
                let k3 = eval_rhs(&s3, &mut stack);
                let s4 = add_scaled(&state, &k3, dt);
                let k4 = eval_rhs(&s4, &mut stack);
                for i in 0..4 {
                    state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            Method::Leapfrog => {
                // Kick-drift-kick; valid because H = K(p) + V(q).
                let f = eval_rhs(&state, &mut stack);
                state[2] += 0.5 * dt * f[2];
                state[3] += 0.5 * dt * f[3];
                let f = eval_rhs(&state, &mut stack);
                state[0] += dt * f[0];
                state[1] += dt * f[1];
                let f = eval_rhs(&state, &mut stack);
                state[2] += 0.5 * dt * f[2];
                state[3] += 0.5 * dt * f[3];
            }
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::NonFinite { t: t - dt });
        }
        for (gi, (guard, tol)) in compiled.guards.iter().enumerate() {
            let g = guard.eval(&state, &mut stack);
            // Trip on proximity, or when a step jumped across the excluded
            // set (sign change of the guard expression).
            if g.abs() < *tol || g * guard_prev[gi] < 0.0 {
                return Err(DynamicsError::Singularity { t: t - dt });
            }
            guard_prev[gi] = g;
        }
        for (i, p) in compiled.integrals.iter().enumerate() {
            let v = p.eval(&state, &mut stack);
            let d = (v - integrals_at_start[i]).abs();
            drift[i] = drift[i].max(d);
            // Catastrophic non-conservation means the step resolution lost
            // the orbit (typically a singular passage the guards missed).
            if d > 1e6 * (1.0 + integrals_at_start[i].abs()) {
                return Err(DynamicsError::Singularity { t: t - dt });
            }
        }
        if step % keep_every == 0 || step == n_steps {
            samples.push((t, state));
        }
    }
    Ok(Trajectory {
        samples,
        integrals_at_start,
        drift,
    })
}

fn add_scaled(s: &[f64; 4], k: &[f64; 4], c: f64) -> [f64; 4] {
    [
        s[0] + c * k[0],
        s[1] + c * k[1],
        s[2] + c * k[2],
        s[3] + c * k[3],
    ]
}

/// CSV export: `t,x,y,px,py,H,L,A` per stored sample.
pub fn trajectory_csv(sys: &SystemDef, ic: &PhasePoint, traj: &Trajectory) -> String {
    let mut params = sys.default_binding();
    for (k, v) in &ic.params {
        if let Value::Exact(r) = v {
            params.insert(k.clone(), r.clone());
        }
    }
    let compiled = compile_system(sys, &params).expect("trajectory was integrated");
    let mut stack = Vec::new();
    let mut out = String::from("t,x,y,px,py,H,L,A\n");
    for (t, s) in &traj.samples {
        let h = compiled.integrals[0].eval(s, &mut stack);
        let l = compiled.integrals[1].eval(s, &mut stack);
        let a = compiled.integrals[2].eval(s, &mut stack);
        out.push_str(&format!(
            "{:.6e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            t, s[0], s[1], s[2], s[3], h, l, a
        ));
    }
    out
}
