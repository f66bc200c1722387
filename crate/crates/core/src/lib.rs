//! Numerical toolkit for operational probabilistic theories.
//!
//! * [`numkit`]: dense complex linear algebra (tensor, direct sum, partial trace, spectra, span rank).
//! * [`opcore`]: the abstract framework of states, transformations and effects, with a
//!   classical reference model and generic no-signaling verifiers.
//! * [`qmodel`]: quantum states, Kraus operations, instruments and their checks.
//! * [`dsum`]: the direct-sum composite, dynamically independent but not locally observable.
//! * [`tomo`]: informational completeness, affine dimensions and the local observability audit.
//! * [`boxworld`]: two-input two-output correlation boxes and CHSH values.

pub mod boxworld;
pub mod dsum;
pub mod error;
pub mod numkit;
pub mod opcore;
pub mod qmodel;
pub mod report;
pub mod sampling;
pub mod tomo;

pub use error::{Error, Result};
pub use report::VerificationReport;
