//! Trajectory-based simulation of monochromatic wave beams and mono-energetic
//! particle beams, with rays coupled through the wave potential
//! `G = ∇²R/R` rebuilt from the beam amplitude at every step.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a < b)` also rejects NaN

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod interp;
pub mod io;
pub mod model;
pub mod oracle;
pub mod profiles;
pub mod transport;

pub use error::{Error, Result};
