//! Symbolic-numeric workbench for two-dimensional superintegrable
//! Hamiltonian systems.
//!
//! Given a system `(H, L, A)` the crate derives its polynomial Poisson
//! algebra of integrals — the constant `k^2` with `{L, B} = -k^2 A`, the
//! structure polynomial `G(H, L)` with `B^2 + k^2 A^2 = G`, and the closure
//! bracket `{A, B} = -1/2 dG/dL` — and extracts configuration-space
//! trajectories algebraically, cross-validated against numerical integration
//! of Hamilton's equations.

pub mod algebra;
pub mod catalog;
pub mod dynamics;
pub mod expr;
pub mod mpoly;
pub mod poisson;
pub mod trajectory;
