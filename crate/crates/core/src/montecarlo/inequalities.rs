//! Exact checks of the upper-bound chain and the interpretation dominance
//! relations on a lattice model.

use std::fmt;

use crate::analytic::{CouponLadder, Curve};
use crate::error::Result;
use crate::exec::Execution;
use crate::terms::NoteTerms;

use super::enumerate::{enumerate_exact, LatticeExact};
use super::model::DailyLattice;

const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Holds,
    Fails,
    /// The conditioning event is empty.
    NotApplicable,
    /// Computed but not asserted.
    Reported,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Holds => "holds",
            CheckStatus::Fails => "FAILS",
            CheckStatus::NotApplicable => "n/a",
            CheckStatus::Reported => "reported",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub id: String,
    pub lhs: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub rhs: f64,
    pub status: CheckStatus,
}

impl InequalityCheck {
    fn new(id: String, lhs: f64, relation: &'static str, rhs: f64) -> Self {
        let holds = match relation {
            "<=" => lhs <= rhs + TOLERANCE,
            _ => lhs + TOLERANCE >= rhs,
        };
        InequalityCheck {
            id,
            lhs,
            relation,
            rhs,
            status: if holds {
                CheckStatus::Holds
            } else {
                CheckStatus::Fails
            },
        }
    }

    fn not_applicable(id: String, relation: &'static str) -> Self {
        InequalityCheck {
            id,
            lhs: f64::NAN,
            relation,
            rhs: f64::NAN,
            status: CheckStatus::NotApplicable,
        }
    }

    /// The id without its `[r]` suffix.
    pub fn family(&self) -> &str {
        self.id.split('[').next().unwrap_or(&self.id)
    }
}

impl fmt::Display for InequalityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.status == CheckStatus::NotApplicable {
            return write!(
                f,
                "{:<32} {:>12} {} {:<12} {}",
                self.id, "-", self.relation, "-", self.status
            );
        }
        write!(
            f,
            "{:<32} {:>12.8} {} {:<12.8} {}",
            self.id, self.lhs, self.relation, self.rhs, self.status
        )
    }
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub checks: Vec<InequalityCheck>,
    pub exact: LatticeExact,
}

impl InequalityReport {
    pub fn family<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a InequalityCheck> + 'a {
        self.checks.iter().filter(move |c| c.family() == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityCheck> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fails)
    }
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Computes both sides of each inequality exactly:
///
/// - `breach_probability_dominates[r]`: `P(breach | all neg) >= P(I_r < thr | all neg)`
/// - `loss_mean_ordering[r]`: `E(I_R | breach, all neg) <= E(I_R | I_r < thr, all neg)`
/// - `call_case_dominance[r]`: `P(called(r) under B) <= P(called(r) under A)`
/// - `expectation_b_vs_a`: `E[net_B] <= E[net_A]`, asserted only when no path
///   that A calls and B holds past a breach ends at or above the smallest
///   coupon rate
/// - `bound_dominates_exact`: `E[net_A]` against the `(p, tau)` bound at the
///   model's exact `p` and `tau`
pub fn verify_inequalities(model: &DailyLattice, terms: &NoteTerms) -> Result<InequalityReport> {
    let exact = enumerate_exact(model, terms, Execution::default())?;
    let t = &exact.tally;
    let r_count = terms.observations.len();
    let mut checks = Vec::new();

    let all_neg = t.all_negative.value();
    let a2 = t.a2.value();
    for r in 0..r_count {
        let id = format!("breach_probability_dominates[{}]", r + 1);
        checks.push(if all_neg > 0.0 {
            InequalityCheck::new(id, a2 / all_neg, ">=", t.a1[r].value() / all_neg)
        } else {
            InequalityCheck::not_applicable(id, ">=")
        });
    }
    for r in 0..r_count {
        let id = format!("loss_mean_ordering[{}]", r + 1);
        let a1 = t.a1[r].value();
        checks.push(if a1 > 0.0 && a2 > 0.0 {
            InequalityCheck::new(
                id,
                t.a2_final.value() / a2,
                "<=",
                t.a1_final[r].value() / a1,
            )
        } else {
            InequalityCheck::not_applicable(id, "<=")
        });
    }
    for r in 0..r_count {
        checks.push(InequalityCheck::new(
            format!("call_case_dominance[{}]", r + 1),
            exact.cases_b.q_call[r],
            "<=",
            exact.cases_a.q_call[r],
        ));
    }

    let ladder = CouponLadder::from_terms(terms);
    let min_rate = ladder.coupons.iter().copied().fold(f64::INFINITY, f64::min) / ladder.principal;
    let mut expectation = InequalityCheck::new(
        "expectation_b_vs_a".into(),
        exact.expected_net_b,
        "<=",
        exact.expected_net_a,
    );
    if t.recovery_max >= min_rate {
        expectation.status = CheckStatus::Reported;
    }
    checks.push(expectation);

    let bound = Curve::bound(exact.tau)?.eval(&ladder, exact.p);
    checks.push(InequalityCheck::new(
        "bound_dominates_exact".into(),
        exact.expected_net_a,
        "<=",
        bound,
    ));

    Ok(InequalityReport { checks, exact })
}
