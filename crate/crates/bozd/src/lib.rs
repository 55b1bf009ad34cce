//! Exact and zero-dispersion solutions of the Benjamin–Ono equation
//!
//! ```text
//! u_t + 2 u u_x + ε (|D_x| u)_x = 0
//! ```
//!
//! with rational initial data.  The crate provides
//!
//! * [`rational`] – the initial data `u0` and the Lax–Oleinik objective `h`;
//! * [`branches`] – the multivalued inviscid-Burgers solution (characteristic
//!   roots, phase count `J`, weak limit, caustics);
//! * [`zd`] – the zero-dispersion profile `u^ZD(t, x; ε)`;
//! * [`dk`] – exact multi-phase (Dobrokhotov–Krichever) solutions and the
//!   periodic travelling wave;
//! * [`exact`] – the exact solution by determinants of contour integrals
//!   along numerically constructed steepest-descent contours;
//! * [`matsuno`] – the `N`-soliton determinant for `u0 = 2/(1+x²)`, `ε = 1/N`;
//! * [`verify`] – sup-norm error sweeps, slope fits, `L²` checks and the
//!   named verification suites;
//! * [`profile`] – grid evaluations, heat maps and Stokes graphs for output.

pub mod branches;
pub mod config;
pub mod dk;
pub mod error;
pub mod exact;
pub mod matsuno;
pub mod poly;
pub mod profile;
pub mod quad;
pub mod rational;
pub mod verify;
pub mod zd;

pub use branches::{BranchData, BranchOptions};
pub use error::{Error, Result};
pub use exact::{ExactSolver, SolverConfig};
pub use rational::{LaxOleinikPoint, RationalInitialData, C64};
