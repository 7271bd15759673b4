use std::collections::BTreeMap;
use superalg::catalog::instantiate;
use superalg::dynamics::{constants_of, PhasePoint};
use superalg::expr::{normalize, rat, rint, NormalForm};
use superalg::mpoly::{expr_to_mpoly, gcd, div_exact};
use superalg::trajectory::{builtin_trajectory_equation, eliminate_momenta};

fn main() {
    let sys = instantiate("harmonic-isotropic", &BTreeMap::new()).unwrap();
    // same ic as seeded_ics(..., 777)[0] — recompute via the same RNG logic is
    // awkward here; probe with a compact rational ic instead.
    let ic = PhasePoint::from_rationals(rint(1), rat(1, 2), rat(-3, 8), rat(7, 8));
    let c = constants_of(&sys, &ic).unwrap();
    let consts = (
        c[0].as_exact().unwrap().clone(),
        c[1].as_exact().unwrap().clone(),
        c[2].as_exact().unwrap().clone(),
    );
    println!("E={} l={} a={}", consts.0, consts.1, consts.2);
    let r = eliminate_momenta(&sys, &consts).unwrap();
    let tr = builtin_trajectory_equation("harmonic-isotropic", &consts).unwrap();
    let (rp, _) = expr_to_mpoly(&r, &["x", "y"], None).unwrap();
    let (tp, _) = expr_to_mpoly(&tr, &["x", "y"], None).unwrap();
    println!("deg R = {} ({} terms), deg Tr = {} ({} terms)",
        rp.total_degree(), rp.terms.len(), tp.total_degree(), tp.terms.len());
    let g = gcd(&rp, &tp);
    println!("deg gcd(R, Tr) = {}", g.total_degree());
    if let Some(q) = div_exact(&rp, &g) {
        println!("R / gcd = {} terms, degree {}", q.terms.len(), q.total_degree());
        let qe = superalg::mpoly::mpoly_to_expr(&q, &["x", "y"], None);
        println!("extraneous factor: {}", qe);
    }
    let _ = NormalForm::of(&normalize(&r));
}
