//! Numerical toolkit for Weyl-Heisenberg SIC-POVMs and the geometry of their
//! tensor squares.
//!
//! A SIC-POVM in dimension d is an orbit of d² unit vectors under the
//! Weyl-Heisenberg displacement operators whose pairwise overlaps all have
//! modulus squared 1/(d+1). This crate implements the operator algebra and a
//! family of constructions that tie SIC fiducials to orthonormal bases of the
//! tensor square H ⊗ H:
//!
//! * [`heisenberg`] — clock/shift/displacement operators with exact phase
//!   arithmetic, the Fourier matrix, and doubled displacements on H ⊗ H.
//! * [`symspace`] — the symmetric-subspace projector (two constructions),
//!   partial traces, Schmidt rank, and the symmetric Schmidt (Takagi)
//!   decomposition.
//! * [`whbasis`] — WH-type orthonormal bases of H ⊗ H: the invariant
//!   subspace charts, canonical isometries, the complete unitary-block
//!   parametrization, membership testing, and connecting unitaries.
//! * [`sicframes`] — SIC fiducial verification, the projected tight frames
//!   on the symmetric subspace, and the lift from a SIC fiducial to a
//!   WH-type basis fiducial.
//! * [`sicsearch`] — purity-maximization search for SIC fiducials over the
//!   WH-type basis parameter manifold, with Riemannian gradient ascent.
//! * [`stff`] — SIC-phase tables and symmetric tight fusion frames in odd
//!   dimensions.
//! * [`files`] / [`cli`] — JSON interchange formats and the `whsic` command
//!   line tool.
//!
//! # Example
//!
//! Lift the exact dimension-3 SIC fiducial to a basis fiducial of C⁹ and
//! check that its projection onto the symmetric subspace reproduces the SIC
//! as a tight frame of product vectors:
//!
//! ```
//! use whsic::sicframes::{known_fiducial, lift_fiducial, projected_frame_report};
//! use whsic::whbasis::{is_wh_fiducial, SubspaceChart};
//!
//! # fn main() -> whsic::Result<()> {
//! let d = 3;
//! let fid = known_fiducial(d)?;
//! let chart = SubspaceChart::canonical(d)?;
//!
//! let lift = lift_fiducial(fid.vector(), &chart, 1e-10)?;
//! assert!(is_wh_fiducial(lift.fiducial.vector(), 1e-10)?.pass);
//!
//! let frame = projected_frame_report(lift.fiducial.vector(), whsic::DEFAULT_TOL)?;
//! assert_eq!(frame.schmidt_rank, 1); // frame vectors are products f⊗f
//! assert!((frame.equiangularity_max - 1.0 / (d as f64 + 1.0)).abs() < 1e-12);
//! # Ok(()) }
//! ```
//!
//! The guide in `book/` walks through each module with runnable examples;
//! every snippet there is compiled and executed by the test suite.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod files;
pub mod heisenberg;
pub mod linalg;
pub mod sicframes;
pub mod sicsearch;
pub mod stff;
pub mod symspace;
pub mod whbasis;

pub use error::{Error, Result};
pub use heisenberg::MAX_DIMENSION;

/// Default numerical tolerance for verification predicates.
pub const DEFAULT_TOL: f64 = 1e-9;
