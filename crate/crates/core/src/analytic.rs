//! Closed-form expected net payment for the first interpretation under IID
//! observation returns, its one-parameter upper bound, and the grid tools
//! used to explore both.
//!
//! With coupons `c_1..c_R`, principal `P` and `q = 1 - p`:
//!
//! ```text
//! E[net]   = sum_r c_r q^(r-1) p  -  P * B1 * B2 * q^R
//! E[net]  <= sum_r c_r q^(r-1) p  -  P * depth * q^(R-1) * tau
//! ```
//!
//! where `depth` is how far below the start the trigger sits (one half for a
//! 50% trigger), `B1 = -E(I_R | breach, all I_j < 0)`,
//! `B2 = P(breach | all I_j < 0)` and `tau = P(I_R < -depth)`.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::terms::NoteTerms;

/// The parts of a note the expectation formulas depend on, in dollars.
#[derive(Debug, Clone, PartialEq)]
pub struct CouponLadder {
    pub principal: f64,
    pub coupons: Vec<f64>,
    /// `1 - trigger_fraction`.
    pub breach_depth: f64,
}

impl CouponLadder {
    pub fn from_terms(terms: &NoteTerms) -> Self {
        CouponLadder {
            principal: terms.principal.as_dollars(),
            coupons: terms
                .observations
                .iter()
                .map(|o| o.coupon.as_dollars())
                .collect(),
            breach_depth: 1.0 - terms.trigger_fraction,
        }
    }

    pub fn observations(&self) -> usize {
        self.coupons.len()
    }

    /// `sum_r c_r (1-p)^(r-1) p`: the expected coupon income when every
    /// observation calls independently with probability `p`.
    pub fn call_income(&self, p: f64) -> f64 {
        let q = 1.0 - p;
        let mut weight = p;
        let mut total = 0.0;
        for &c in &self.coupons {
            total += c * weight;
            weight *= q;
        }
        total
    }
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub p: f64,
    pub b1: f64,
    pub b2: f64,
}

impl ScenarioParams {
    pub fn new(p: f64, b1: f64, b2: f64) -> Result<Self> {
        check_probability("p", p)?;
        if !(b1 > 0.0 && b1 <= 1.0) {
            return Err(Error::Domain(format!("B1 must lie in (0, 1], got {b1}")));
        }
        if !(b2 > 0.0 && b2 <= 1.0) {
            return Err(Error::Domain(format!("B2 must lie in (0, 1], got {b2}")));
        }
        Ok(ScenarioParams { p, b1, b2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauParams {
    pub p: f64,
    pub tau: f64,
}

impl TauParams {
    pub fn new(p: f64, tau: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("tau", tau)?;
        if p + tau > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "p + tau must not exceed 1, got {}",
                p + tau
            )));
        }
        Ok(TauParams { p, tau })
    }
}

/// Probabilities of each settlement case and the mean final return on the
/// loss branch.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseDistribution {
    pub q_call: Vec<f64>,
    pub q_even: f64,
    pub q_loss: f64,
    pub mean_loss_return: f64,
}

impl CaseDistribution {
    /// The case probabilities implied by IID observation signs.
    pub fn from_iid(params: ScenarioParams, observations: usize) -> Self {
        let q = 1.0 - params.p;
        let q_call: Vec<f64> = (0..observations)
            .map(|r| q.powi(r as i32) * params.p)
            .collect();
        let all_negative = q.powi(observations as i32);
        let q_loss = all_negative * params.b2;
        CaseDistribution {
            q_call,
            q_even: all_negative - q_loss,
            q_loss,
            mean_loss_return: -params.b1,
        }
    }

    pub fn total(&self) -> f64 {
        self.q_call.iter().sum::<f64>() + self.q_even + self.q_loss
    }

    fn validate(&self) -> Result<()> {
        for (i, &q) in self.q_call.iter().enumerate() {
            check_probability(&format!("q_call[{}]", i + 1), q)?;
        }
        check_probability("q_even", self.q_even)?;
        check_probability("q_loss", self.q_loss)?;
        let total = self.total();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::ProbabilitySum(total));
        }
        if self.q_loss > 0.0 && !(self.mean_loss_return >= -1.0 && self.mean_loss_return < 0.0) {
            return Err(Error::Domain(format!(
                "mean loss return must lie in [-1, 0), got {}",
                self.mean_loss_return
            )));
        }
        Ok(())
    }
}

/// Law of total expectation over the settlement cases.
pub fn expected_net_payment_cases(dist: &CaseDistribution, ladder: &CouponLadder) -> Result<f64> {
    dist.validate()?;
    if dist.q_call.len() != ladder.observations() {
        return Err(Error::Domain(format!(
            "{} call probabilities for {} coupons",
            dist.q_call.len(),
            ladder.observations()
        )));
    }
    let calls: f64 = ladder
        .coupons
        .iter()
        .zip(&dist.q_call)
        .map(|(c, q)| c * q)
        .sum();
    Ok(calls + ladder.principal * dist.mean_loss_return * dist.q_loss)
}

pub fn expected_net_payment_iid(ladder: &CouponLadder, params: ScenarioParams) -> f64 {
    iid_value(ladder, params.p, params.b1, params.b2)
}

pub fn expected_net_payment_upper_bound(ladder: &CouponLadder, params: TauParams) -> f64 {
    bound_value(ladder, params.p, params.tau)
}

fn iid_value(ladder: &CouponLadder, p: f64, b1: f64, b2: f64) -> f64 {
    let q = 1.0 - p;
    ladder.call_income(p) - ladder.principal * b1 * b2 * q.powi(ladder.observations() as i32)
}

fn bound_value(ladder: &CouponLadder, p: f64, tau: f64) -> f64 {
    let q = 1.0 - p;
    let r = ladder.observations() as i32;
    ladder.call_income(p) - ladder.principal * ladder.breach_depth * q.powi(r - 1) * tau
}

/// A one-dimensional curve in `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Iid {
        b1: f64,
        b2: f64,
    },
    /// The bound at fixed `tau`, over all of `p in [0, 1]`.
    Bound {
        tau: f64,
    },
}

impl Curve {
    pub fn iid(b1: f64, b2: f64) -> Result<Self> {
        ScenarioParams::new(0.0, b1, b2)?;
        Ok(Curve::Iid { b1, b2 })
    }

    pub fn bound(tau: f64) -> Result<Self> {
        check_probability("tau", tau)?;
        Ok(Curve::Bound { tau })
    }

    pub fn eval(&self, ladder: &CouponLadder, p: f64) -> f64 {
        match *self {
            Curve::Iid { b1, b2 } => iid_value(ladder, p, b1, b2),
            Curve::Bound { tau } => bound_value(ladder, p, tau),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub argmax: f64,
    pub max: f64,
    pub argmin: f64,
    pub min: f64,
}

pub const MIN_RESOLUTION: usize = 1000;
const REFINE_TOLERANCE: f64 = 1e-6;

/// Grid search over `p in [0, 1]` with `resolution` intervals, then ternary
/// refinement on the interval bracketing each grid extremum. A refined point
/// only replaces the grid point when it is strictly better, so extrema at
/// the endpoints are reported exactly.
pub fn find_extrema(ladder: &CouponLadder, curve: Curve, resolution: usize) -> Result<Extrema> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Domain(format!(
            "grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let f = |p: f64| curve.eval(ladder, p);
    let grid_p = |i: usize| i as f64 / resolution as f64;

    let (mut imax, mut imin) = (0usize, 0usize);
    let (mut vmax, mut vmin) = (f(0.0), f(0.0));
    for i in 1..=resolution {
        let v = f(grid_p(i));
        if v > vmax {
            vmax = v;
            imax = i;
        }
        if v < vmin {
            vmin = v;
            imin = i;
        }
    }

    let bracket = |i: usize| (grid_p(i.saturating_sub(1)), grid_p((i + 1).min(resolution)));

    let (lo, hi) = bracket(imax);
    let pmax = ternary(lo, hi, f);
    let (argmax, max) = if f(pmax) > vmax {
        (pmax, f(pmax))
    } else {
        (grid_p(imax), vmax)
    };

    let (lo, hi) = bracket(imin);
    let pmin = ternary(lo, hi, |p| -f(p));
    let (argmin, min) = if f(pmin) < vmin {
        (pmin, f(pmin))
    } else {
        (grid_p(imin), vmin)
    };

    Ok(Extrema {
        argmax,
        max,
        argmin,
        min,
    })
}

/// Maximizer of a unimodal function on `[lo, hi]`.
fn ternary(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    while hi - lo > REFINE_TOLERANCE {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepSpec {
    Iid {
        b1: f64,
        b2: f64,
        points: usize,
    },
    Bound {
        tau: f64,
        points: usize,
    },
    /// Bound over the `points x points` grid of `(p, tau)`, skipping cells
    /// with `p + tau > 1`.
    Surface {
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub tau: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Row holding the largest value (first on ties).
    pub max: SweepRow,
    pub min: SweepRow,
}

impl SweepTable {
    pub fn has_tau(&self) -> bool {
        self.rows.first().is_some_and(|r| r.tau.is_some())
    }

    /// CSV with six decimals; the grid extrema follow as `#` footer lines.
    pub fn to_csv(&self) -> String {
        let with_tau = self.has_tau();
        let mut out = String::new();
        out.push_str(if with_tau {
            "p,tau,expected_net_payment\n"
        } else {
            "p,expected_net_payment\n"
        });
        let fmt_row = |row: &SweepRow| match row.tau {
            Some(t) => format!("{:.6},{:.6},{:.6}", row.p, t, row.value),
            None => format!("{:.6},{:.6}", row.p, row.value),
        };
        for row in &self.rows {
            out.push_str(&fmt_row(row));
            out.push('\n');
        }
        out.push_str(&format!("# max,{}\n", fmt_row(&self.max)));
        out.push_str(&format!("# min,{}\n", fmt_row(&self.min)));
        out
    }
}

fn grid(points: usize) -> impl Fn(usize) -> f64 {
    move |i| {
        if i + 1 == points {
            1.0
        } else {
            i as f64 / (points - 1) as f64
        }
    }
}

pub fn sweep(ladder: &CouponLadder, spec: SweepSpec, execution: Execution) -> Result<SweepTable> {
    let points = match spec {
        SweepSpec::Iid { points, .. }
        | SweepSpec::Bound { points, .. }
        | SweepSpec::Surface { points } => points,
    };
    if points < 2 {
        return Err(Error::Domain(format!(
            "a sweep needs at least 2 grid points, got {points}"
        )));
    }
    let at = grid(points);

    let blocks: Vec<Vec<SweepRow>> = match spec {
        SweepSpec::Iid { b1, b2, .. } => {
            let curve = Curve::iid(b1, b2)?;
            execution.map_blocks(points, |i| {
                let p = at(i);
                vec![SweepRow {
                    p,
                    tau: None,
                    value: curve.eval(ladder, p),
                }]
            })
        }
        SweepSpec::Bound { tau, .. } => {
            let curve = Curve::bound(tau)?;
            execution.map_blocks(points, |i| {
                let p = at(i);
                vec![SweepRow {
                    p,
                    tau: None,
                    value: curve.eval(ladder, p),
                }]
            })
        }
        SweepSpec::Surface { .. } => execution.map_blocks(points, |i| {
            let p = at(i);
            // feasible cells: i + j <= points - 1
            (0..points - i)
                .map(|j| {
                    let tau = at(j);
                    SweepRow {
                        p,
                        tau: Some(tau),
                        value: bound_value(ladder, p, tau),
                    }
                })
                .collect()
        }),
    };
    let rows: Vec<SweepRow> = blocks.into_iter().flatten().collect();

    let mut max = rows[0];
    let mut min = rows[0];
    for row in &rows[1..] {
        if row.value > max.value {
            max = *row;
        }
        if row.value < min.value {
            min = *row;
        }
    }
    Ok(SweepTable { rows, max, min })
}
