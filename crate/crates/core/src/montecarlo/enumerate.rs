//! Exact expectations over the finite scenario spaces of the discrete models.

use crate::analytic::CaseDistribution;
use crate::error::{Error, Result};
use crate::exec::{CompensatedSum, Execution};
use crate::path::ObservationView;
use crate::payoff::{payoff, Interpretation, Resolution};
use crate::terms::NoteTerms;

use super::model::{
    observation_indices, DailyLattice, Layout, LossLaw, MarketModel, Scratch, SignMagnitudes,
};

/// Largest lattice depth `R * k` that [`enumerate_exact`] accepts.
pub const MAX_LATTICE_STEPS: usize = 22;
const MAX_SIGN_ENUMERATION: usize = 20;
const PATHS_PER_BLOCK: u64 = 1 << 12;

/// Probability-weighted sums over one block of lattice paths.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tally {
    pub mass: CompensatedSum,
    pub net: [CompensatedSum; 2],
    pub called: [Vec<CompensatedSum>; 2],
    pub even: [CompensatedSum; 2],
    pub loss: [CompensatedSum; 2],
    pub loss_final: [CompensatedSum; 2],
    pub first_up: CompensatedSum,
    pub tau: CompensatedSum,
    pub all_negative: CompensatedSum,
    /// All negative and breached.
    pub a2: CompensatedSum,
    pub a2_final: CompensatedSum,
    /// All negative and `I_r` below the threshold, per `r`.
    pub a1: Vec<CompensatedSum>,
    pub a1_final: Vec<CompensatedSum>,
    /// Highest final return on a path that A calls and B holds to maturity.
    pub recovery_max: f64,
}

impl Tally {
    fn new(observations: usize) -> Self {
        let zeros = vec![CompensatedSum::default(); observations];
        Tally {
            called: [zeros.clone(), zeros.clone()],
            a1: zeros.clone(),
            a1_final: zeros,
            recovery_max: f64::NEG_INFINITY,
            ..Tally::default()
        }
    }

    fn merge(&mut self, o: &Tally) {
        fn add(a: &mut CompensatedSum, b: &CompensatedSum) {
            a.add(b.value());
        }
        add(&mut self.mass, &o.mass);
        for i in 0..2 {
            add(&mut self.net[i], &o.net[i]);
            add(&mut self.even[i], &o.even[i]);
            add(&mut self.loss[i], &o.loss[i]);
            add(&mut self.loss_final[i], &o.loss_final[i]);
            for (a, b) in self.called[i].iter_mut().zip(&o.called[i]) {
                add(a, b);
            }
        }
        add(&mut self.first_up, &o.first_up);
        add(&mut self.tau, &o.tau);
        add(&mut self.all_negative, &o.all_negative);
        add(&mut self.a2, &o.a2);
        add(&mut self.a2_final, &o.a2_final);
        for (a, b) in self.a1.iter_mut().zip(&o.a1) {
            add(a, b);
        }
        for (a, b) in self.a1_final.iter_mut().zip(&o.a1_final) {
            add(a, b);
        }
        self.recovery_max = self.recovery_max.max(o.recovery_max);
    }

    fn visit(&mut self, w: f64, view: &ObservationView, terms: &NoteTerms) {
        let threshold = terms.breach_threshold();
        let returns = view.index_returns();
        let last = view.final_return();
        self.mass.add(w);
        let outcomes = [
            payoff(terms, view, Interpretation::A),
            payoff(terms, view, Interpretation::B),
        ];
        for (i, o) in outcomes.iter().enumerate() {
            self.net[i].add(w * o.net);
            match o.resolution {
                Resolution::Called(r) => self.called[i][r - 1].add(w),
                Resolution::BreakEven => self.even[i].add(w),
                Resolution::TriggerLoss | Resolution::PostBreachHold => {
                    self.loss[i].add(w);
                    self.loss_final[i].add(w * last);
                }
            }
        }
        if let (Resolution::Called(_), Resolution::PostBreachHold) =
            (outcomes[0].resolution, outcomes[1].resolution)
        {
            self.recovery_max = self.recovery_max.max(last);
        }
        if returns[0] >= 0.0 {
            self.first_up.add(w);
        }
        if last < threshold {
            self.tau.add(w);
        }
        if view.all_negative() {
            self.all_negative.add(w);
            if view.d_min() < threshold {
                self.a2.add(w);
                self.a2_final.add(w * last);
            }
            for (r, &ir) in returns.iter().enumerate() {
                if ir < threshold {
                    self.a1[r].add(w);
                    self.a1_final[r].add(w * last);
                }
            }
        }
    }
}

/// Exact quantities for a lattice model, from full path enumeration.
#[derive(Debug, Clone)]
pub struct LatticeExact {
    pub expected_net_a: f64,
    pub expected_net_b: f64,
    /// Case probabilities under A. `mean_loss_return` is 0 when the loss
    /// case has no mass.
    pub cases_a: CaseDistribution,
    pub cases_b: CaseDistribution,
    /// `P(I_1 >= 0)`.
    pub p: f64,
    /// `P(I_R < threshold)`.
    pub tau: f64,
    /// `P(all I_j < 0)`.
    pub all_negative: f64,
    /// `-E(I_R | breach, all negative)`, if that event has mass.
    pub b1: Option<f64>,
    /// `P(breach | all negative)`, if that event has mass.
    pub b2: Option<f64>,
    pub steps: usize,
    pub(crate) tally: Tally,
}

impl LatticeExact {
    pub fn expected_net(&self, interpretation: Interpretation) -> f64 {
        match interpretation {
            Interpretation::A => self.expected_net_a,
            Interpretation::B => self.expected_net_b,
        }
    }

    pub fn cases(&self, interpretation: Interpretation) -> &CaseDistribution {
        match interpretation {
            Interpretation::A => &self.cases_a,
            Interpretation::B => &self.cases_b,
        }
    }
}

/// Enumerates all `2^(R k)` daily paths of the lattice.
pub fn enumerate_exact(
    model: &DailyLattice,
    terms: &NoteTerms,
    execution: Execution,
) -> Result<LatticeExact> {
    let observations = terms.observations.len();
    let steps = model.steps(observations);
    if steps > MAX_LATTICE_STEPS {
        return Err(Error::InstanceTooLarge {
            steps,
            limit: MAX_LATTICE_STEPS,
        });
    }
    let idx = observation_indices(steps, observations);
    let total: u64 = 1 << steps;
    let blocks = total.div_ceil(PATHS_PER_BLOCK) as usize;
    let up_weight: Vec<f64> = (0..=steps)
        .map(|ups| model.q.powi(ups as i32) * (1.0 - model.q).powi((steps - ups) as i32))
        .collect();

    let parts = execution.map_blocks(blocks, |block| {
        let mut tally = Tally::new(observations);
        let mut daily = vec![0.0; steps];
        let mut view = ObservationView::default();
        let start = block as u64 * PATHS_PER_BLOCK;
        for bits in start..(start + PATHS_PER_BLOCK).min(total) {
            let w = up_weight[bits.count_ones() as usize];
            if w == 0.0 {
                continue;
            }
            let mut level = 1.0f64;
            for (day, d) in daily.iter_mut().enumerate() {
                level *= if bits >> day & 1 == 1 {
                    model.up
                } else {
                    model.down
                };
                *d = level - 1.0;
            }
            view.refill(&daily, &idx);
            tally.visit(w, &view, terms);
        }
        tally
    });
    let mut tally = Tally::new(observations);
    for part in &parts {
        tally.merge(part);
    }
    Ok(summarize(tally, steps))
}

fn cases(t: &Tally, i: usize) -> CaseDistribution {
    let q_loss = t.loss[i].value();
    CaseDistribution {
        q_call: t.called[i].iter().map(|s| s.value()).collect(),
        q_even: t.even[i].value(),
        q_loss,
        mean_loss_return: if q_loss > 0.0 {
            t.loss_final[i].value() / q_loss
        } else {
            0.0
        },
    }
}

fn summarize(tally: Tally, steps: usize) -> LatticeExact {
    let all_negative = tally.all_negative.value();
    let a2 = tally.a2.value();
    LatticeExact {
        expected_net_a: tally.net[0].value(),
        expected_net_b: tally.net[1].value(),
        cases_a: cases(&tally, 0),
        cases_b: cases(&tally, 1),
        p: tally.first_up.value(),
        tau: tally.tau.value(),
        all_negative,
        b1: (a2 > 0.0).then(|| -tally.a2_final.value() / a2),
        b2: (all_negative > 0.0).then(|| a2 / all_negative),
        steps,
        tally,
    }
}

/// Every scenario a sign model can produce, with its probability.
pub fn sign_scenario_space(
    model: &MarketModel,
    terms: &NoteTerms,
) -> Result<Vec<(f64, ObservationView)>> {
    let layout = Layout::from_terms(terms);
    let n = layout.observations;
    if n > MAX_SIGN_ENUMERATION {
        return Err(Error::InstanceTooLarge {
            steps: n,
            limit: MAX_SIGN_ENUMERATION,
        });
    }
    let (b1, b2) = match model {
        MarketModel::IidSign(m) => (m.b1, m.b2),
        MarketModel::MarkovSign(m) => (m.b1, m.b2),
        other => {
            return Err(Error::Model(format!(
                "{} has no finite scenario space",
                other.name()
            )))
        }
    };
    let sign_weight = |signs: &[bool]| -> f64 {
        match model {
            MarketModel::IidSign(m) => signs
                .iter()
                .map(|&s| if s { m.p } else { 1.0 - m.p })
                .product(),
            MarketModel::MarkovSign(m) => {
                let mut w = if signs[0] { m.p } else { 1.0 - m.p };
                for pair in signs.windows(2) {
                    w *= if pair[0] == pair[1] {
                        m.persistence
                    } else {
                        1.0 - m.persistence
                    };
                }
                w
            }
            _ => unreachable!(),
        }
    };
    let magnitudes = SignMagnitudes::for_threshold(layout.threshold);
    let mut scratch = Scratch::default();
    let mut out = Vec::new();
    let mut push = |w: f64, signs: &[bool], loss: Option<f64>| {
        if w > 0.0 {
            let mut view = ObservationView::default();
            magnitudes.fill(signs, loss, &mut scratch, &mut view);
            out.push((w, view));
        }
    };
    let mut signs = vec![false; n];
    for bits in 0u64..(1 << n) {
        for (r, s) in signs.iter_mut().enumerate() {
            *s = bits >> r & 1 == 1;
        }
        let w = sign_weight(&signs);
        if bits != 0 {
            push(w, &signs, None);
            continue;
        }
        push(w * (1.0 - b2), &signs, None);
        for x in LossLaw::with_mean_loss(b1).points() {
            push(w * b2 / 3.0, &signs, Some(x));
        }
    }
    Ok(out)
}

/// Exact expected net payment of a sign model.
pub fn exact_sign_expectation(
    model: &MarketModel,
    terms: &NoteTerms,
    interpretation: Interpretation,
) -> Result<f64> {
    let mut sum = CompensatedSum::default();
    for (w, view) in sign_scenario_space(model, terms)? {
        sum.add(w * payoff(terms, &view, interpretation).net);
    }
    Ok(sum.value())
}
