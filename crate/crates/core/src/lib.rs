//! Gaussian and Gamma Mills ratios through Laplace-type continued fractions
//! with modified terminating denominators.
//!
//! * [`cf`]: generic continued-fraction machinery.
//! * [`gauss`] and [`tails`]: the Gaussian ratio, its tail families and
//!   error functionals.
//! * [`gamma`]: the Gamma-density ratio.
//! * [`oracle`]: self-contained reference values.
//! * [`maxerr`], [`report`], [`verify`]: error searches, CSV output and the
//!   invariant suites behind the command-line tool.

pub mod cf;
pub mod error;
pub mod gamma;
pub mod gauss;
pub mod jet;
pub mod maxerr;
pub mod oracle;
pub mod report;
pub mod tails;
pub mod verify;

pub use error::{Error, Result};
pub use gauss::{mills, Approximation, BoundSide, ModConstants};
pub use tails::{FamilyKind, SlopeRule, TailFamily};
