//! Exact laboratory for nondeterministic communication complexity of the
//! Hadamard Equality function `HEQ_{k,k'}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`hadamard`]: the Hadamard code, its local test and promise decoding.
//! * [`heqfun`]: reference oracles for `HEQ` and `NEQ` and instance enumeration.
//! * [`qsim`]: exact dyadic state-vector simulation of the protocol registers.
//! * [`protocols`]: the two-party protocols, transcripts and the
//!   nondeterminism verification harness.
//! * [`boundslab`]: rectangle covers, the extremal condition set, the
//!   polynomial-method certificate and the counting inequalities.
//!
//! Every probability that decides correctness is an exact rational.

pub mod boundslab;
pub mod error;
pub mod hadamard;
pub mod heqfun;
pub mod protocols;
pub mod qsim;

pub use error::{Error, Result};
pub use hadamard::Codeword;
pub use heqfun::{DeltaPattern, HeqInput, HeqParams, InstanceMode, Instances};
pub use protocols::{Guess, Proof, Transcript, VerificationReport};
pub use qsim::{DyadicState, Probability, RotationState};

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
