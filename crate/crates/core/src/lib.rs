//! Numerical verification of sharp constants in Hardy inequalities with
//! remainder terms.
//!
//! The crate is organised bottom-up:
//!
//! | module | contents |
//! |--------|----------|
//! | [`special`] | `J0`, `J1`, their first zeros, the spectral constants `j01`, `Λ2`, `V0` |
//! | [`measure`] | step profiles on a measure interval: rearrangement, dominance, Lorentz norms |
//! | [`radial`] | radial profiles on balls: grids, quadrature, Hardy gap, changes of variable |
//! | [`varmin`] | discrete variational solvers recomputing each constant |
//! | [`constants`] | closed-form constants |
//! | [`symmetrize`] | gradient-preserving symmetrization pipeline |
//! | [`report`], [`cli`] | verification reports and the `hardylab` command line |

pub mod cli;
pub mod constants;
pub mod error;
pub mod measure;
pub mod radial;
pub mod report;
pub mod special;
pub mod symmetrize;
mod tridiag;
pub mod varmin;

pub use error::{Error, Result};
pub use measure::{LorentzIndex, StepProfile};
pub use radial::{Domain, RadialProfile};
pub use report::VerificationReport;
