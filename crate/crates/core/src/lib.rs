//! Quasi-periodic solutions of Heun's equation built from generalized
//! associated Lamé potentials, together with the numerical checks that
//! certify them.

pub mod ansatz;
pub mod elliptic;
pub mod error;
pub mod families;
pub mod gal;
pub mod grid;
pub mod heun;
pub mod jet;
pub mod oracle;
pub mod verify;

pub use ansatz::{AnsatzSpec, Case, ClosedFormSolution, Parity, PencilSolution};
pub use elliptic::{EllipticModulus, EllipticPoint, QuarterPeriods};
pub use error::{Error, Result};
pub use gal::{GalParams, Generator, SpectralPair, SymmetryOp};
pub use grid::{GridSpec, Residual};
pub use heun::{CanonicalPoint, HeunParams};
pub use jet::Jet;
