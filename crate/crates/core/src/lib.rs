//! Discrete-time quantum walks on a qutrit chain.
//!
//! - [`angle`]: radians and π-fraction literals in configs.
//! - [`walk`]: exact ideal engines (unidirectional and bidirectional) and the
//!   mapping between them.
//! - [`topology`]: two-domain edge states, the interface overlap `P₀`, and
//!   the `P_edge` sweeps.
//! - [`qutrit`]: gate-level compilation onto a qutrit/shift-qubit chain and a
//!   density-operator simulator with amplitude damping.
//! - [`metrics`]: diffusion distance and distribution similarity.
//! - [`experiment`]: configuration, run records, and the CSV/JSON/SVG
//!   emitters behind the `dtqw` command line.

pub mod angle;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod qutrit;
pub mod topology;
pub mod walk;

pub use error::{Error, Result};
pub use metrics::Distribution;
pub use num_complex::Complex64 as C64;
