//! Ramsey interrogation of a two-level clock under dephasing.
//!
//! * [`statespace`]: pure states, density matrices and unitaries.
//! * [`ramsey`]: closed-form pulse and free-evolution propagators.
//! * [`lindblad`]: numerical master-equation reference.
//! * [`lineshape`]: frequency scans, fringe width and contrast.
//! * [`optimizer`]: relative uncertainty and stationary Ramsey times.
//! * [`cpi`]: a finite conditional-probability clock.

pub mod cpi;
pub mod error;
pub mod lindblad;
pub mod lineshape;
pub mod optimizer;
pub mod ramsey;
pub mod statespace;

pub use error::{Error, Result};
