//! Operational probabilistic theories at finite dimension: transformations
//! as right-acting matrices, faithful bipartite states, transposition, and
//! the GNS construction that turns the transformation algebra into a
//! concrete operator algebra on a Hilbert space.
//!
//! ```
//! use opcstar_core::models::build_qubit;
//! use opcstar_core::suites::gns_suite;
//!
//! let (qubit, _bell) = build_qubit();
//! let suite = gns_suite(&qubit, 4, 7, 1e-9, 1e-10).unwrap();
//! assert!(suite.passed());
//! ```

pub mod bipartite;
pub mod calibration;
pub mod check;
pub mod cone;
pub mod error;
pub mod gns;
pub mod io;
pub mod linalg;
pub mod models;
pub mod pauli;
pub mod rng;
pub mod suites;
pub mod theory;

pub use bipartite::{BipartiteForm, FaithfulForm};
pub use check::{CheckRecord, Verdict};
pub use error::{Error, Result};
pub use gns::{Algebra, GnsSpace};
pub use theory::{Cone, EffectVector, StateVector, Theory, TransformationMatrix};
