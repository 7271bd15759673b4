//! Algebraic trajectory extraction.
//!
//! Configuration-space orbits come from two routes: the built-in implicit
//! curve equations for five systems (at the reference parameter values), and
//! resultant-based elimination of the momenta from `{H = E, L = l, A = a}`.
//! Implicit curves are rendered by marching squares with bisection
//! refinement; sign-definite loci (perfect squares, possibly in the
//! quadratic extension by `sqrt(x^2+y^2)`) are traced through their
//! extracted square root.

use crate::catalog::SystemDef;
use crate::expr::{
    normalize, parse_with_symbols, Exclusion, Expr, FloatProgram, NormalForm, Rat,
};
use crate::mpoly::{
    self, div_exact, expr_to_mpoly, mpoly_to_expr, poly_sqrt, resultant, squarefree_part,
    strip_monomial_content, MPoly,
};
use num_traits::Signed;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("no built-in trajectory equation for `{0}`")]
    UnknownTrajectory(String),
    #[error("momenta cannot be eliminated: {0}")]
    NotEliminable(String),
    #[error("degenerate resultant: {0}")]
    DegenerateResultant(String),
    #[error("grid must have at least 16 nodes per side")]
    GridTooCoarse,
    #[error("window is empty or non-finite")]
    BadWindow,
}

const TR_EQUATIONS: &[(&str, &str)] = &[
    (
        "harmonic-isotropic",
        "L^2*(4*A*x*y - 2*H*(x^2+y^2) + x^4 - 2*x^2*y^2 + y^4) \
         + (A*(x^2+y^2) - 2*H*x*y)^2 + L^4",
    ),
    (
        "kepler",
        "A^2*(x^2+y^2) + 2*A*y*sqrt(x^2+y^2) + L^4 + y^2 \
         - 2*L^2*(A*y + H*x^2 + sqrt(x^2+y^2))",
    ),
    (
        "fokas-lagerstrom",
        "531441*A^4 \
         + (-729*x^2*(2*H-L)^3 + 216*L*y^4*(L-2*H) + 729*L*y^2*(L-2*H)^2 + 16*L*y^6)^2 \
         - 1458*A^2*(-216*y^4*(2*H-L)*(L-2*x^2) + 729*y^2*(L-2*H)^2*(L-2*x^2) \
                     + 729*x^2*(2*H-L)^3 + 16*y^6*(L-2*x^2))",
    ),
    (
        "holt",
        "A^4 + (L*(-2*H+L+4*x^2)^2 - 8*y^2*(-2*H+L-4)*(-2*H+L+4))^2 \
         - 2*A^2*(L*(-2*H+L+4*x^2)^2 \
                  - 8*y^2*(16*x^2*(L-2*H) + (L-2*H)^2 + 32*x^4 + 16))",
    ),
    (
        "smorodinsky-winternitz",
        "A^4 + 32*A^2*(L^2*(x^2*(-2*H+L+2*x^2)+2) \
                       + 2*y^4*(16*x^2*(L-2*H)+(L-2*H)^2+32*x^4+16) \
                       - L*y^2*(16*x^2*(L-2*H)+(L-2*H)^2+32*x^4+16)) \
         + 256*(L^2*(x^2*(-2*H+L+2*x^2)+2) \
                - 2*y^4*(-2*H+L-4)*(-2*H+L+4) \
                + L*y^2*(-2*H+L-4)*(-2*H+L+4))^2",
    ),
];

/// The implicit curve equation for one of the five reference systems, with
/// the constants `(E, l, a)` substituted (reference parameter values:
/// m = omega = alpha = delta = b = c = 1).
pub fn builtin_trajectory_equation(
    name: &str,
    constants: &(Rat, Rat, Rat),
) -> Result<Expr, TrajectoryError> {
    let template = TR_EQUATIONS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| TrajectoryError::UnknownTrajectory(name.to_string()))?;
    let syms: Vec<String> = ["x", "y", "H", "L", "A"].iter().map(|s| s.to_string()).collect();
    let e = parse_with_symbols(template, &syms).expect("built-in template parses");
    let mut map = BTreeMap::new();
    map.insert("H".to_string(), Expr::Num(constants.0.clone()));
    map.insert("L".to_string(), Expr::Num(constants.1.clone()));
    map.insert("A".to_string(), Expr::Num(constants.2.clone()));
    Ok(normalize(&e.substitute(&map)))
}

/// Systems with a built-in trajectory equation.
pub fn trajectory_equation_systems() -> Vec<&'static str> {
    TR_EQUATIONS.iter().map(|(n, _)| *n).collect()
}

// ---------------------------------------------------------------------------
// Momentum elimination
// ---------------------------------------------------------------------------

const XYU: [&str; 3] = ["x", "y", "u"];
const ELIM_VARS: [&str; 5] = ["x", "y", "u", "px", "py"];

fn radicand() -> Expr {
    normalize(
        &(Expr::powi(Expr::sym("x"), 2) + Expr::powi(Expr::sym("y"), 2)),
    )
}

/// Reduce powers of the radical variable by `u^2 = x^2 + y^2`.
fn u_reduce(p: &MPoly, u: usize, x: usize, y: usize) -> MPoly {
    let mut r2 = MPoly::zero(p.nvars);
    let mut ex = vec![0u16; p.nvars];
    ex[x] = 2;
    r2.insert_term(ex, Rat::from_integer(1.into()));
    let mut ey = vec![0u16; p.nvars];
    ey[y] = 2;
    r2.insert_term(ey, Rat::from_integer(1.into()));
    let mut cur = p.clone();
    while cur.deg_in(u) >= 2 {
        let coeffs = cur.coeffs_in(u);
        let mut next = coeffs[0].clone();
        if coeffs.len() > 1 {
            next = next.add(&coeffs[1].mul_var_pow(u, 1));
        }
        for (k, c) in coeffs.iter().enumerate().skip(2) {
            next = next.add(&c.mul(&r2).mul_var_pow(u, (k - 2) as u16));
        }
        cur = next;
    }
    cur
}

/// Eliminate `py` then `px` (or the reverse on degeneracy) from
/// `{H = E, L = l, A = a}` via Sylvester resultants, returning a squarefree
/// implicit equation in `(x, y)`. Parameters are fixed at their defaults.
/// `sqrt(x^2+y^2)` is carried as an auxiliary radical and restored in the
/// output.
pub fn eliminate_momenta(
    sys: &SystemDef,
    constants: &(Rat, Rat, Rat),
) -> Result<Expr, TrajectoryError> {
    let binding: BTreeMap<String, Expr> = sys
        .default_binding()
        .into_iter()
        .map(|(k, v)| (k, Expr::Num(v)))
        .collect();
    let rad = radicand();
    let mut polys = Vec::new();
    for (e, c) in [
        (&sys.h, &constants.0),
        (&sys.l, &constants.1),
        (&sys.a, &constants.2),
    ] {
        let shifted = normalize(&(e.substitute(&binding) - Expr::Num(c.clone())));
        let (p, _denominator) = expr_to_mpoly(&shifted, &ELIM_VARS, Some((2, &rad)))
            .map_err(|e| TrajectoryError::NotEliminable(e.to_string()))?;
        polys.push(u_reduce(&p, 2, 0, 1));
    }
    let [h, l, a]: [MPoly; 3] = polys.try_into().unwrap();

    // Iterated resultants over-approximate the projection: eliminating the
    // first momentum against a quadratic pivot keeps both root branches, so
    // the final resultant also vanishes where the two other equations hold
    // on *different* branches. Each (first variable, pivot) route carries
    // different extraneous branches — a pivot linear in the eliminated
    // variable carries none — while every route contains the true curve.
    // Intersecting the routes by gcd therefore cuts the projection down to
    // the genuine locus.
    let step = |f: &MPoly, g: &MPoly, v: usize| -> MPoly {
        if g.deg_in(v) == 0 {
            return g.clone();
        }
        if f.deg_in(v) == 0 {
            return f.clone();
        }
        tidy(&u_reduce(&resultant(f, g, v), 2, 0, 1))
    };
    let mut projections: Vec<MPoly> = Vec::new();
    // px is slot 3, py is slot 4 of ELIM_VARS.
    for (first, second) in [(4usize, 3usize), (3, 2 + 2)] {
        let sys3 = [&h, &l, &a];
        // Prefer pivots of low degree in the first variable (spec order
        // H-L / H-A corresponds to the H pivot).
        let mut pivot_order: Vec<usize> = (0..3).filter(|&i| sys3[i].deg_in(first) > 0).collect();
        pivot_order.sort_by_key(|&i| sys3[i].deg_in(first));
        for pivot in pivot_order {
            let rest: Vec<usize> = (0..3).filter(|&i| i != pivot).collect();
            let q1 = step(sys3[pivot], sys3[rest[0]], first);
            let q2 = step(sys3[pivot], sys3[rest[1]], first);
            if q1.is_zero() || q2.is_zero() {
                continue;
            }
            let r = step(&q1, &q2, second);
            if r.is_zero() {
                continue;
            }
            let r = tidy(&u_reduce(&r, 2, 0, 1));
            if !r.is_constant() {
                projections.push(r);
            }
        }
    }
    if projections.is_empty() {
        return Err(TrajectoryError::DegenerateResultant(
            "every elimination route vanished identically (common factors \
             between the level-set equations)"
                .into(),
        ));
    }
    let mut acc = projections[0].clone();
    for p in &projections[1..] {
        if acc.deg_in(2) == 0 && p.deg_in(2) == 0 {
            let g = mpoly::gcd(&acc, p);
            if !g.is_constant() {
                acc = g;
            }
        }
    }

    let out = finalize_projection(&acc)?;
    Ok(out)
}

/// Strip rational and monomial content (the monomial factors are artifacts
/// of denominator clearing, supported on the excluded coordinate axes).
fn tidy(p: &MPoly) -> MPoly {
    let (stripped, _) = strip_monomial_content(p);
    stripped.primitive_rat()
}

fn finalize_projection(p: &MPoly) -> Result<Expr, TrajectoryError> {
    let rad = radicand();
    let du = p.deg_in(2);
    debug_assert!(du <= 1);
    if du == 0 {
        // Pure polynomial in (x, y): squarefree, primitive.
        let sf = squarefree_part(&tidy(p));
        return Ok(mpoly_to_expr(&sf, &ELIM_VARS, None));
    }
    // Radical retained: strip common polynomial factors of the two halves.
    let halves = p.coeffs_in(2);
    let g = mpoly::gcd(&halves[0], &halves[1]);
    let reduced = if g.is_constant() {
        tidy(p)
    } else {
        let p0 = div_exact(&halves[0], &g).expect("gcd divides");
        let p1 = div_exact(&halves[1], &g).expect("gcd divides");
        tidy(&p0.add(&p1.mul_var_pow(2, 1)))
    };
    Ok(mpoly_to_expr(&reduced, &ELIM_VARS, Some((2, &rad))))
}

// ---------------------------------------------------------------------------
// Implicit-curve tracing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn square(half: f64) -> Window {
        Window {
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
    /// Residual of the *input* equation at this vertex.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
}

/// Polylines approximating the zero set of an implicit equation.
#[derive(Debug, Clone)]
pub struct CurveSet {
    pub window: Window,
    pub curves: Vec<Vec<Vertex>>,
    pub residual_stats: ResidualStats,
}

/// Scale-aware residual: value and the largest |monomial| of the equation at
/// a point, from the per-term compiled programs.
struct TermEvaluator {
    terms: Vec<FloatProgram>,
}

impl TermEvaluator {
    fn new(e: &Expr) -> Self {
        let slots: BTreeMap<String, usize> =
            [("x".to_string(), 0), ("y".to_string(), 1)].into_iter().collect();
        let nf = NormalForm::of(e);
        let terms = nf
            .term_exprs()
            .iter()
            .map(|t| FloatProgram::compile(t, &slots).expect("curve equation uses only x, y"))
            .collect();
        TermEvaluator { terms }
    }

    fn eval(&self, x: f64, y: f64, stack: &mut Vec<f64>) -> (f64, f64) {
        let slots = [x, y];
        let mut sum = 0.0;
        let mut largest = 0.0f64;
        for t in &self.terms {
            let v = t.eval(&slots, &mut *stack);
            sum += v;
            largest = largest.max(v.abs());
        }
        (sum, largest)
    }
}

/// Decide what function to march on. Sign-definite inputs (perfect squares,
/// also in the quadratic extension by `u = sqrt(x^2+y^2)`) are replaced by
/// their square-root core, whose sign changes across the locus.
fn traceable_core(eq: &Expr) -> Expr {
    let rad = radicand();
    let Ok((p, _)) = expr_to_mpoly(eq, &XYU, Some((2, &rad))) else {
        return eq.clone();
    };
    let p = u_reduce(&p, 2, 0, 1);
    if p.deg_in(2) == 0 {
        let prim = p.primitive_rat();
        if let Some(root) = poly_sqrt(&prim) {
            return mpoly_to_expr(&squarefree_part(&root), &XYU, None);
        }
        return mpoly_to_expr(&squarefree_part(&prim), &XYU, None);
    }
    // f = P + Q u, u^2 = x^2 + y^2. If f = (a + b u)^2 in the quotient ring
    // (up to positive content), trace a + b u instead:
    //   a^2 + b^2 (x^2+y^2) = P, 2ab = Q, and a^2 - b^2 r^2 = +-sqrt(P^2 - Q^2 r^2).
    let prim = p.primitive_rat();
    let halves = prim.coeffs_in(2);
    let (p0, q0) = (&halves[0], &halves[1]);
    let r2 = {
        let mut r = MPoly::zero(3);
        let mut ex = vec![0u16; 3];
        ex[0] = 2;
        r.insert_term(ex, Rat::from_integer(1.into()));
        let mut ey = vec![0u16; 3];
        ey[1] = 2;
        r.insert_term(ey, Rat::from_integer(1.into()));
        r
    };
    let n = p0.mul(p0).sub(&q0.mul(q0).mul(&r2));
    if let Some(m) = poly_sqrt(&n) {
        for m_signed in [m.clone(), m.neg()] {
            let twice_a2 = p0.add(&m_signed);
            let a2 = twice_a2.scale(&Rat::new(1.into(), 2.into()));
            if let Some(a) = poly_sqrt(&a2) {
                if !a.is_zero() {
                    if let Some(b) = div_exact(q0, &a.scale(&Rat::from_integer(2.into()))) {
                        // Verify (a + b u)^2 == f.
                        let back = a.mul(&a).add(&b.mul(&b).mul(&r2));
                        if back == *p0 && a.scale(&Rat::from_integer(2.into())).mul(&b) == *q0 {
                            let core = a.add(&b.mul_var_pow(2, 1));
                            return mpoly_to_expr(&core, &XYU, Some((2, &radicand())));
                        }
                    }
                }
            }
        }
    }
    eq.clone()
}

/// Marching-squares contour extraction of the zero level of `eq` on a
/// `grid_n` x `grid_n` node grid, with bisection refinement of the edge
/// crossings and polyline stitching. Cells touching domain exclusions are
/// skipped. An equation with no sign change yields an empty curve set.
pub fn trace_curves(
    eq: &Expr,
    window: &Window,
    grid_n: usize,
    exclusions: &[Exclusion],
) -> Result<CurveSet, TrajectoryError> {
    if grid_n < 16 {
        return Err(TrajectoryError::GridTooCoarse);
    }
    if !(window.x_max > window.x_min) || !(window.y_max > window.y_min) {
        return Err(TrajectoryError::BadWindow);
    }
    let core = traceable_core(eq);
    let core_eval = TermEvaluator::new(&core);
    let orig_eval = TermEvaluator::new(eq);
    let slots_xy: BTreeMap<String, usize> =
        [("x".to_string(), 0), ("y".to_string(), 1)].into_iter().collect();
    let excl_progs: Vec<(FloatProgram, bool)> = exclusions
        .iter()
        .filter_map(|ex| match ex {
            Exclusion::NonZero(g) => FloatProgram::compile(g, &slots_xy).ok().map(|p| (p, false)),
            Exclusion::Positive(g) => FloatProgram::compile(g, &slots_xy).ok().map(|p| (p, true)),
        })
        .collect();

    let nx = grid_n;
    let ny = grid_n;
    let hx = (window.x_max - window.x_min) / (nx - 1) as f64;
    let hy = (window.y_max - window.y_min) / (ny - 1) as f64;
    let xs: Vec<f64> = (0..nx).map(|i| window.x_min + i as f64 * hx).collect();
    let ys: Vec<f64> = (0..ny).map(|j| window.y_min + j as f64 * hy).collect();

    let mut stack = Vec::new();
    let mut values = vec![f64::NAN; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let (v, _) = core_eval.eval(xs[i], ys[j], &mut stack);
            values[j * nx + i] = v;
        }
    }

    let cell_diag = (hx * hx + hy * hy).sqrt();
    let cell_excluded = |i: usize, j: usize, stack: &mut Vec<f64>| -> bool {
        if excl_progs.is_empty() {
            return false;
        }
        let corners = [
            (xs[i], ys[j]),
            (xs[i + 1], ys[j]),
            (xs[i + 1], ys[j + 1]),
            (xs[i], ys[j + 1]),
        ];
        for (prog, positive) in &excl_progs {
            let vals: Vec<f64> = corners
                .iter()
                .map(|(cx, cy)| prog.eval(&[*cx, *cy], &mut *stack))
                .collect();
            if *positive {
                if vals.iter().any(|v| *v <= 0.0) {
                    return true;
                }
                continue;
            }
            let min_abs = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            let sign_change = vals.iter().any(|v| *v > 0.0) && vals.iter().any(|v| *v < 0.0);
            if sign_change || min_abs < cell_diag * cell_diag {
                return true;
            }
        }
        false
    };

    // Refined crossing per grid edge, shared between adjacent cells so the
    // stitched polylines connect exactly.
    let mut edge_cache: std::collections::HashMap<(usize, usize, u8), (f64, f64)> =
        std::collections::HashMap::new();
    let mut crossing = |i0: usize, j0: usize, horiz: bool,
                        values: &Vec<f64>,
                        stack: &mut Vec<f64>|
     -> Option<(f64, f64)> {
        let key = (i0, j0, horiz as u8);
        if let Some(p) = edge_cache.get(&key) {
            return Some(*p);
        }
        let (xa, ya, xb, yb, fa, fb) = if horiz {
            (
                xs[i0], ys[j0], xs[i0 + 1], ys[j0],
                values[j0 * nx + i0], values[j0 * nx + i0 + 1],
            )
        } else {
            (
                xs[i0], ys[j0], xs[i0], ys[j0 + 1],
                values[j0 * nx + i0], values[(j0 + 1) * nx + i0],
            )
        };
        if !fa.is_finite() || !fb.is_finite() || fa * fb > 0.0 {
            return None;
        }
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        let (mut f0, _f1) = (fa, fb);
        // Start from the linear interpolation, then bisect.
        let mut t = if fa == fb { 0.5 } else { fa / (fa - fb) };
        for _ in 0..50 {
            let px = xa + (xb - xa) * t;
            let py = ya + (yb - ya) * t;
            let (v, largest) = core_eval.eval(px, py, stack);
            if v.abs() < 1e-9 * (1.0 + largest) {
                break;
            }
            if v * f0 <= 0.0 {
                t1 = t;
            } else {
                t0 = t;
                f0 = v;
            }
            t = 0.5 * (t0 + t1);
        }
        let p = (xa + (xb - xa) * t, ya + (yb - ya) * t);
        edge_cache.insert(key, p);
        Some(p)
    };

    let mut segments: Vec<((f64, f64), (f64, f64))> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let f = [
                values[j * nx + i],
                values[j * nx + i + 1],
                values[(j + 1) * nx + i + 1],
                values[(j + 1) * nx + i],
            ];
            if f.iter().any(|v| !v.is_finite()) {
                continue;
            }
            if cell_excluded(i, j, &mut stack) {
                continue;
            }
            let mut case = 0usize;
            for (bit, v) in f.iter().enumerate() {
                if *v > 0.0 {
                    case |= 1 << bit;
                }
            }
            if case == 0 || case == 15 {
                continue;
            }
            // Edge order: bottom, right, top, left.
            let edges = [
                crossing(i, j, true, &values, &mut stack),
                crossing(i + 1, j, false, &values, &mut stack),
                crossing(i, j + 1, true, &values, &mut stack),
                crossing(i, j, false, &values, &mut stack),
            ];
            let pairs: &[(usize, usize)] = match case {
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(2, 3)],
                5 | 10 => {
                    // Saddle: disambiguate by the center value.
                    let cxm = 0.5 * (xs[i] + xs[i + 1]);
                    let cym = 0.5 * (ys[j] + ys[j + 1]);
                    let (c, _) = core_eval.eval(cxm, cym, &mut stack);
                    let center_pos = c > 0.0;
                    if (case == 5) == center_pos {
                        &[(3, 0), (1, 2)]
                    } else {
                        &[(0, 1), (2, 3)]
                    }
                }
                _ => &[],
            };
            for (ea, eb) in pairs {
                if let (Some(p1), Some(p2)) = (edges[*ea], edges[*eb]) {
                    segments.push((p1, p2));
                }
            }
        }
    }

    let mut curves_pts = stitch(segments, cell_diag * 1e-7);
    // Drop sub-resolution fragments (tiny parasitic loops from near-tangent
    // cells): anything with few vertices spanning less than ~a cell.
    curves_pts.retain(|pts| {
        if pts.len() >= 6 {
            return true;
        }
        let (mut lo_x, mut hi_x) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY);
        for (px, py) in pts {
            lo_x = lo_x.min(*px);
            hi_x = hi_x.max(*px);
            lo_y = lo_y.min(*py);
            hi_y = hi_y.max(*py);
        }
        let span = ((hi_x - lo_x).powi(2) + (hi_y - lo_y).powi(2)).sqrt();
        span > 1.5 * cell_diag
    });
    let mut curves = Vec::new();
    let mut res_max = 0.0f64;
    let mut res_sum = 0.0f64;
    let mut res_count = 0usize;
    for pts in curves_pts {
        let mut poly = Vec::with_capacity(pts.len());
        for (px, py) in pts {
            let (v, largest) = orig_eval.eval(px, py, &mut stack);
            let residual = v.abs() / (1.0 + largest);
            res_max = res_max.max(residual);
            res_sum += residual;
            res_count += 1;
            poly.push(Vertex {
                x: px,
                y: py,
                residual,
            });
        }
        curves.push(poly);
    }
    Ok(CurveSet {
        window: *window,
        curves,
        residual_stats: ResidualStats {
            max: res_max,
            mean: if res_count > 0 {
                res_sum / res_count as f64
            } else {
                0.0
            },
        },
    })
}

/// Join segments that share endpoints into polylines.
fn stitch(segments: Vec<((f64, f64), (f64, f64))>, eps: f64) -> Vec<Vec<(f64, f64)>> {
    use std::collections::HashMap;
    let quant = |p: (f64, f64)| -> (i64, i64) {
        ((p.0 / eps).round() as i64, (p.1 / eps).round() as i64)
    };
    let mut adjacency: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(quant(*a)).or_default().push(idx);
        adjacency.entry(quant(*b)).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut chain = std::collections::VecDeque::from([a, b]);
        // Extend forward from the back, then backward from the front.
        for forward in [true, false] {
            loop {
                let tip = if forward {
                    *chain.back().unwrap()
                } else {
                    *chain.front().unwrap()
                };
                let Some(cands) = adjacency.get(&quant(tip)) else {
                    break;
                };
                let next = cands.iter().find(|i| !used[**i]).copied();
                let Some(i) = next else { break };
                used[i] = true;
                let (a, b) = segments[i];
                let next_pt = if quant(a) == quant(tip) { b } else { a };
                if forward {
                    chain.push_back(next_pt);
                } else {
                    chain.push_front(next_pt);
                }
            }
        }
        out.push(chain.into_iter().collect());
    }
    out
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// CSV columns: `curve_id,vertex_index,x,y,residual`.
pub fn curves_csv(cs: &CurveSet) -> String {
    let mut out = String::from("curve_id,vertex_index,x,y,residual\n");
    for (ci, curve) in cs.curves.iter().enumerate() {
        for (vi, v) in curve.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.3e}\n",
                ci, vi, v.x, v.y, v.residual
            ));
        }
    }
    out
}

/// SVG export: one path per polyline, window mapped to an 800x800 viewport.
pub fn curves_svg(cs: &CurveSet) -> String {
    let w = &cs.window;
    let sx = 800.0 / (w.x_max - w.x_min);
    let sy = 800.0 / (w.y_max - w.y_min);
    let mut out = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" \
         width=\"800\" height=\"800\">\n\
         <rect width=\"800\" height=\"800\" fill=\"white\"/>\n",
    );
    for curve in &cs.curves {
        if curve.len() < 2 {
            continue;
        }
        out.push_str("<path d=\"");
        for (i, v) in curve.iter().enumerate() {
            let px = (v.x - w.x_min) * sx;
            let py = (w.y_max - v.y) * sy;
            out.push_str(&format!("{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, px, py));
        }
        out.push_str("\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::instantiate;
    use crate::expr::{evaluate, rat, rint, Valuation, Value};

    fn consts(e: (i64, i64), l: (i64, i64), a: (i64, i64)) -> (Rat, Rat, Rat) {
        (rat(e.0, e.1), rat(l.0, l.1), rat(a.0, a.1))
    }

    fn eval_xy(e: &Expr, x: Rat, y: Rat) -> Value {
        let mut v = Valuation::new();
        v.bind("x", x);
        v.bind("y", y);
        evaluate(e, &v).unwrap()
    }

    #[test]
    fn tr1_unit_circle_is_exact() {
        // (H, L, A) = (1, 1, 0): the locus is the unit circle; rational
        // circle points must satisfy the equation exactly.
        let eq = builtin_trajectory_equation("harmonic-isotropic", &consts((1, 1), (1, 1), (0, 1)))
            .unwrap();
        for (x, y) in [(rint(1), rint(0)), (rat(3, 5), rat(4, 5)), (rat(-5, 13), rat(12, 13))] {
            assert_eq!(eval_xy(&eq, x, y), Value::Exact(rint(0)));
        }
        // Off-curve point is nonzero.
        assert_ne!(eval_xy(&eq, rint(2), rint(0)), Value::Exact(rint(0)));
    }

    #[test]
    fn tr1_degenerate_axes() {
        // L = A = 0 collapses the equation to (2 H x y)^2.
        let eq = builtin_trajectory_equation("harmonic-isotropic", &consts((10, 1), (0, 1), (0, 1)))
            .unwrap();
        assert_eq!(eval_xy(&eq, rat(1, 2), rint(0)), Value::Exact(rint(0)));
        let want = normalize(
            &crate::expr::parse("400*x^2*y^2", &[]).unwrap(),
        );
        assert_eq!(eq, want);
    }

    #[test]
    fn tr2_circular_kepler_orbit() {
        let eq = builtin_trajectory_equation("kepler", &consts((-1, 2), (1, 1), (0, 1))).unwrap();
        assert_eq!(eval_xy(&eq, rint(1), rint(0)), Value::Exact(rint(0)));
        assert_eq!(eval_xy(&eq, rat(3, 5), rat(4, 5)), Value::Exact(rint(0)));
    }

    #[test]
    fn unknown_trajectory_name_is_rejected() {
        assert!(matches!(
            builtin_trajectory_equation("post-winternitz", &consts((1, 1), (1, 1), (1, 1))),
            Err(TrajectoryError::UnknownTrajectory(_))
        ));
    }

    #[test]
    fn eliminate_oscillator_contains_circle() {
        let sys = instantiate("harmonic-isotropic", &std::collections::BTreeMap::new()).unwrap();
        let r = eliminate_momenta(&sys, &consts((1, 1), (1, 1), (0, 1))).unwrap();
        for (x, y) in [(rint(1), rint(0)), (rat(3, 5), rat(4, 5))] {
            assert_eq!(eval_xy(&r, x, y), Value::Exact(rint(0)));
        }
    }

    #[test]
    fn eliminate_rejects_momenta_inside_transcendentals() {
        let sys = instantiate("trig-momentum", &std::collections::BTreeMap::new()).unwrap();
        assert!(matches!(
            eliminate_momenta(&sys, &consts((1, 2), (1, 1), (1, 1))),
            Err(TrajectoryError::NotEliminable(_))
        ));
    }

    #[test]
    fn trace_circle_topology() {
        let eq = builtin_trajectory_equation("harmonic-isotropic", &consts((1, 1), (1, 1), (0, 1)))
            .unwrap();
        let cs = trace_curves(&eq, &Window::square(2.0), 64, &[]).unwrap();
        assert_eq!(cs.curves.len(), 1, "unit circle is a single component");
        assert!(cs.residual_stats.max < 1e-9);
        for v in &cs.curves[0] {
            let r = (v.x * v.x + v.y * v.y).sqrt();
            assert!((r - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn trace_perfect_square_lines() {
        // L = 0 oscillator locus (3(x^2+y^2) - 20xy)^2: a sign-definite
        // quartic whose core is a line pair through the origin.
        let eq = builtin_trajectory_equation("harmonic-isotropic", &consts((10, 1), (0, 1), (3, 1)))
            .unwrap();
        let cs = trace_curves(&eq, &Window::square(5.0), 96, &[]).unwrap();
        assert!(!cs.curves.is_empty(), "definite locus must still be traced");
        assert!(cs.residual_stats.max < 1e-9);
    }

    #[test]
    fn trace_empty_curve_is_not_an_error() {
        let eq = crate::expr::parse("x^2 + y^2 + 1", &[]).unwrap();
        let cs = trace_curves(&eq, &Window::square(3.0), 32, &[]).unwrap();
        assert!(cs.curves.is_empty());
    }

    #[test]
    fn grid_validation() {
        let eq = crate::expr::parse("x^2 + y^2 - 1", &[]).unwrap();
        assert!(matches!(
            trace_curves(&eq, &Window::square(2.0), 8, &[]),
            Err(TrajectoryError::GridTooCoarse)
        ));
    }

    #[test]
    fn component_counts_stable_under_refinement() {
        let eq = builtin_trajectory_equation("harmonic-isotropic", &consts((10, 1), (2, 1), (3, 1)))
            .unwrap();
        let coarse = trace_curves(&eq, &Window::square(5.0), 96, &[]).unwrap();
        let fine = trace_curves(&eq, &Window::square(5.0), 192, &[]).unwrap();
        assert!(!coarse.curves.is_empty());
        assert_eq!(coarse.curves.len(), fine.curves.len());
    }

    #[test]
    fn exports_have_expected_shape() {
        let eq = builtin_trajectory_equation("harmonic-isotropic", &consts((1, 1), (1, 1), (0, 1)))
            .unwrap();
        let cs = trace_curves(&eq, &Window::square(2.0), 48, &[]).unwrap();
        let csv = curves_csv(&cs);
        assert!(csv.starts_with("curve_id,vertex_index,x,y,residual\n"));
        let svg = curves_svg(&cs);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<path"));
    }
}
