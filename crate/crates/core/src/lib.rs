//! Exact nonarchimedean dynamics on `P^N(Q_p)`: chordal distances, Macaulay
//! resultants, Green functions with certified brackets, good-reduction
//! classification and Fatou certificates.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod morphism;
pub mod padic;
pub mod projective;

pub use error::{Error, Result};
pub use morphism::{HomogeneousMap, MinimalLift, ResultantValuation};
pub use padic::{LogValue, PadicRational, PrimeContext, Valuation};
pub use projective::{ChordalDistance, Disk, ProjectivePoint};
