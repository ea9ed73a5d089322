//! Quasi-periodic solutions for the three half-integral cases.
//!
//! `phi = P(y) Z(y)` where `P` is `[cn + i sn]^t`, `[dn + i k sn]^t` or
//! `[dn + k cn]^t`, and `Z` is a finite sum over `sn^{2k}` times one of
//! the two factor pairs fixed by the case and by the parity of `b + f + g`.

mod formula;
pub mod laurent;
mod pencil;
mod solution;
mod spec;

pub use formula::eigenvalue_formula;
pub use pencil::{build_pencil, solve_pencil, Pencil, PencilReport, PencilSolution, NULL_TOL, ROOT_TOL};
pub use solution::{construct, wronskian, ClosedFormSolution, QuasiPeriodicity};
pub use spec::{AnsatzSpec, Case, Parity};
