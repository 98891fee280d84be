//! Threshold analysis for monotone families of subsets: exact measure
//! polynomials, pivotality, moments, the fractional expectation-threshold LP,
//! tameness and decomposition, plus a verification ledger that checks the
//! threshold inequalities instance by instance.

pub mod error;
pub mod family;
pub mod generators;
pub mod lp;
pub mod measure;
pub mod moments;
pub mod par;
pub mod rational;
pub mod set;
pub mod simplex;
pub mod structure;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
pub use family::MintermFamily;
pub use par::Execution;
pub use rational::Rational;
pub use set::ElementSet;
