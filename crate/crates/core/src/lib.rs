//! Payoff analysis for autocallable reverse convertible notes.
//!
//! The crate covers term sheets ([`terms`]), index histories ([`path`]),
//! settlement under two readings of the payment procedure ([`payoff`]),
//! closed-form expectations and bounds ([`analytic`]) and simulation with
//! exact oracles ([`montecarlo`]).

pub mod analytic;
pub mod error;
pub mod exec;
mod kv;
pub mod montecarlo;
pub mod path;
pub mod payoff;
pub mod terms;

pub use error::{Error, Result};
pub use exec::Execution;
pub use path::{IndexPath, ObservationView, PricePoint};
pub use payoff::{payoff, settlement_amount, Interpretation, PayoffOutcome, Resolution};
pub use terms::{parse_term_sheet, Cents, NoteTerms};
