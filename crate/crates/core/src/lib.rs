//! Exact-rational machinery for couplings of decreasing distributions on
//! `{0..p-1}` with a fixed coordinate sum, together with the calculators and
//! verifiers around them:
//!
//! - [`dist`]: probability distributions with exact rational masses, the
//!   staircase (`hat`/`unhat`) transform, mixtures, uniform and two-uniform
//!   blend constructors.
//! - [`decompose`]: simultaneous convex decomposition of a tuple of
//!   distributions into near-constant tuples that preserve the sum of
//!   expectations term by term.
//! - [`couple`]: constructs an explicit joint distribution with constant
//!   coordinate sum `p-1` for any decreasing triple whose means sum to `p-1`.
//! - [`oracle`]: an independent exact linear-feasibility decision procedure
//!   over the transportation slice, with Farkas-style infeasibility
//!   certificates.
//! - [`constants`]: the growth constant `theta_p`, the geometric parameter
//!   `rho`, the max-entropy distribution `psi` and the identity
//!   `eta(psi) = ln(theta_p)`.
//! - [`sumfree`]: verifiers for tri-coloured sum-free triple systems and
//!   progression-free sets in `Z_p^n`.
//! - [`io`]: the `.dist`, `.cpl` and `.tri` text formats.
//!
//! All probability arithmetic is exact; the only approximate values are the
//! real-valued outputs (entropy, `theta`, `rho`), which are produced as
//! rational enclosures with a caller-chosen number of correct decimal digits.

pub mod constants;
pub mod couple;
pub mod decompose;
pub mod dist;
pub mod io;
pub mod oracle;
pub mod real;
pub mod sumfree;

pub use dist::{Dist, DistError, PrecisionParam, Rat};
