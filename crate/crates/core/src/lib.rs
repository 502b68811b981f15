//! Rearrangement calculus and Lorentz-scale norm machinery, coupled to a
//! finite-volume solver for radial Schrödinger boundary-value problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`rearrange`]: distribution functions, decreasing/increasing
//!   rearrangements, maximal averages, medians.
//! * [`ri_spaces`]: Lorentz, Lorentz–Zygmund and Lorentz–Sobolev quasi-norms.
//! * [`interp`]: the Calderón operator, the two gradient bounds, and the
//!   K-functionals of the couples `(L¹, L^{n,1})` and `(L^{n',∞}, L^∞)`.
//! * [`hardy`]: weighted Hardy sup-conditions and randomized inequality probes.
//! * [`potentials`]: reverse Hölder quotients for candidate potentials.
//! * [`radial`]: the radial solver and gradient-profile extraction.
//! * [`reference`]: closed forms of the two model problems on the unit ball.
//! * [`verify`]: end-to-end verification cases, reports and batch runner.

pub mod error;
pub mod extended;
pub mod hardy;
pub mod interp;
pub mod potentials;
pub mod quad;
pub mod radial;
pub mod rearrange;
pub mod reference;
pub mod ri_spaces;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use extended::Extended;
pub use hardy::{HardyCondition, HardyExponents, HardyWeights, ProbeReport, Weight};
pub use interp::CalderonExponents;
pub use potentials::{Ball, BallFamily, Potential};
pub use radial::{BoundaryCondition, MeshSpec, RadialFn, RadialProblem, RadialSolution};
pub use rearrange::{
    Cell, GridFunction, IncreasingProfile, PowerTerm, RearrangementProfile,
};
pub use ri_spaces::{LorentzExponents, LorentzZygmundExponents};
pub use verify::{Claim, VerificationCase, VerificationReport, Verdict};
