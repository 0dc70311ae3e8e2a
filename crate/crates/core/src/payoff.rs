//! Settlement of a note against an observed path under the two readings of
//! the payment procedure.
//!
//! * [`Interpretation::A`]: the trigger only matters at maturity. Any
//!   nonnegative observation return calls the note; if none does, a breach
//!   anywhere in the period turns the payout into `principal * (1 + I_R)`.
//! * [`Interpretation::B`]: a breach blocks every later call. Observation `r`
//!   can only call the note when no breach happened through observation
//!   `r - 1`.
//!
//! Called notes pay on the final valuation date in both readings.

use std::fmt;

use chrono::NaiveDate;

use crate::path::ObservationView;
use crate::terms::{Cents, NoteTerms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interpretation {
    A,
    B,
}

impl Interpretation {
    pub const BOTH: [Interpretation; 2] = [Interpretation::A, Interpretation::B];
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interpretation::A => f.write_str("A"),
            Interpretation::B => f.write_str("B"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resolution {
    /// Called on observation `r` (1-based).
    Called(usize),
    BreakEven,
    /// Interpretation A loss branch.
    TriggerLoss,
    /// Interpretation B loss branch: breach seen, held to final valuation.
    PostBreachHold,
}

impl Resolution {
    pub fn is_loss(self) -> bool {
        matches!(self, Resolution::TriggerLoss | Resolution::PostBreachHold)
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Called(r) => write!(f, "called({r})"),
            Resolution::BreakEven => f.write_str("break_even"),
            Resolution::TriggerLoss => f.write_str("trigger_loss"),
            Resolution::PostBreachHold => f.write_str("post_breach_hold"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffOutcome {
    /// Net payment per note in dollars, unrounded.
    pub net: f64,
    pub principal: Cents,
    pub resolution: Resolution,
    /// Call observation date, or the final valuation date otherwise.
    pub resolution_date: NaiveDate,
    pub payment_date: NaiveDate,
    pub interpretation: Interpretation,
}

impl PayoffOutcome {
    pub fn net_cents(&self) -> Cents {
        Cents::round_from_dollars(self.net)
    }

    pub fn gross_cents(&self) -> Cents {
        Cents(self.principal.0 + self.net_cents().0)
    }

    /// Net payment as a fraction of principal.
    pub fn total_return(&self) -> f64 {
        self.net / self.principal.as_dollars()
    }
}

/// Gross amount paid per note, in cents.
pub fn settlement_amount(outcome: &PayoffOutcome) -> Cents {
    outcome.gross_cents()
}

fn called(terms: &NoteTerms, interpretation: Interpretation, r: usize) -> PayoffOutcome {
    let obs = terms.observations[r];
    PayoffOutcome {
        net: obs.coupon.as_dollars(),
        principal: terms.principal,
        resolution: Resolution::Called(r + 1),
        resolution_date: obs.date,
        payment_date: terms.final_valuation_date,
        interpretation,
    }
}

fn at_final(
    terms: &NoteTerms,
    interpretation: Interpretation,
    resolution: Resolution,
    net: f64,
) -> PayoffOutcome {
    PayoffOutcome {
        net,
        principal: terms.principal,
        resolution,
        resolution_date: terms.final_valuation_date,
        payment_date: terms.final_valuation_date,
        interpretation,
    }
}

pub fn payoff_interpretation_a(terms: &NoteTerms, view: &ObservationView) -> PayoffOutcome {
    debug_assert_eq!(view.observations(), terms.observations.len());
    if let Some(r) = view.index_returns().iter().position(|&i| i >= 0.0) {
        return called(terms, Interpretation::A, r);
    }
    if view.d_min() >= terms.breach_threshold() {
        at_final(terms, Interpretation::A, Resolution::BreakEven, 0.0)
    } else {
        let net = terms.principal.as_dollars() * view.final_return();
        at_final(terms, Interpretation::A, Resolution::TriggerLoss, net)
    }
}

pub fn payoff_interpretation_b(terms: &NoteTerms, view: &ObservationView) -> PayoffOutcome {
    debug_assert_eq!(view.observations(), terms.observations.len());
    let threshold = terms.breach_threshold();
    let loss = || {
        let net = terms.principal.as_dollars() * view.final_return();
        at_final(terms, Interpretation::B, Resolution::PostBreachHold, net)
    };
    for (r, &ir) in view.index_returns().iter().enumerate() {
        let clean_before = r == 0 || !view.breached_by(r - 1, threshold);
        if clean_before && ir >= 0.0 {
            return called(terms, Interpretation::B, r);
        }
        if view.breached_by(r, threshold) {
            return loss();
        }
    }
    at_final(terms, Interpretation::B, Resolution::BreakEven, 0.0)
}

pub fn payoff(
    terms: &NoteTerms,
    view: &ObservationView,
    interpretation: Interpretation,
) -> PayoffOutcome {
    match interpretation {
        Interpretation::A => payoff_interpretation_a(terms, view),
        Interpretation::B => payoff_interpretation_b(terms, view),
    }
}
