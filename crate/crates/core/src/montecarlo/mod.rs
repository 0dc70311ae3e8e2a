//! Monte Carlo estimation of expected payments over market models, with
//! exact oracles for the discrete models.
//!
//! Scenarios are generated in fixed-size blocks. Block `b` draws from the
//! ChaCha8 stream `b` of the master seed, and per-block statistics are merged
//! in block order, so results depend only on `(model, n, seed, block size)`
//! and never on the thread count.

mod enumerate;
mod inequalities;
mod model;

pub use enumerate::{
    enumerate_exact, exact_sign_expectation, sign_scenario_space, LatticeExact, MAX_LATTICE_STEPS,
};
pub use inequalities::{verify_inequalities, CheckStatus, InequalityCheck, InequalityReport};
pub use model::{
    load_model_spec, observation_indices, parse_model_spec, Bootstrap, DailyLattice, GeometricWalk,
    IidSign, LossLaw, MarketModel, MarkovSign, REFERENCE_TRADING_DAYS,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::path::ObservationView;
use crate::payoff::{payoff, Interpretation};
use crate::terms::NoteTerms;
use model::{Layout, Scratch};

pub const DEFAULT_BLOCK_SIZE: usize = 4096;
pub const MIN_ESTIMATE_PATHS: usize = 100;
/// Minimum number of all-negative scenarios before conditional parameters
/// are estimated.
pub const MIN_CONDITIONING_HITS: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub paths: usize,
    pub seed: u64,
    pub block_size: usize,
    pub execution: Execution,
}

impl McConfig {
    pub fn new(paths: usize, seed: u64) -> Self {
        McConfig {
            paths,
            seed,
            block_size: DEFAULT_BLOCK_SIZE,
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_block_size(mut self, block_size: usize) -> Self {
        self.block_size = block_size;
        self
    }

    fn blocks(&self) -> usize {
        self.paths.div_ceil(self.block_size)
    }

    fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        let start = block * self.block_size;
        start..(start + self.block_size).min(self.paths)
    }

    fn block_rng(&self, block: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(block as u64);
        rng
    }
}

/// Sample mean with its standard error and a normal 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub n_paths: usize,
    pub seed: u64,
}

impl Estimate {
    fn from_moments(m: &Moments, seed: u64) -> Self {
        let n = m.count as f64;
        let variance = if m.count > 1 { m.m2 / (n - 1.0) } else { 0.0 };
        let std_error = (variance / n).sqrt();
        Estimate {
            mean: m.mean,
            std_error,
            ci95: (m.mean - 1.96 * std_error, m.mean + 1.96 * std_error),
            n_paths: m.count as usize,
            seed,
        }
    }

    /// `|mean - target|` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.std_error
        }
    }
}

/// Welford accumulator, merged across blocks with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }
}

/// Runs `visit` over every scenario, block by block, and returns the
/// per-block accumulators in block order.
fn run_blocks<T, F>(
    model: &MarketModel,
    terms: &NoteTerms,
    cfg: &McConfig,
    visit: F,
) -> Result<Vec<T>>
where
    T: Default + Send,
    F: Fn(&mut T, &ObservationView, &Scratch) + Sync + Send,
{
    if cfg.block_size == 0 {
        return Err(Error::Domain("block size must be positive".into()));
    }
    let layout = Layout::from_terms(terms);
    model.check_layout(&layout)?;
    Ok(cfg.execution.map_blocks(cfg.blocks(), |block| {
        let mut rng = cfg.block_rng(block);
        let mut scratch = Scratch::default();
        model.prepare(&layout, &mut scratch);
        let mut view = ObservationView::default();
        let mut acc = T::default();
        for _ in cfg.block_range(block) {
            model.sample_into(&mut rng, &layout, &mut scratch, &mut view);
            visit(&mut acc, &view, &scratch);
        }
        acc
    }))
}

/// A generated scenario: sign models yield observation-level views, daily
/// models yield the full path of cumulative returns.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Observed(ObservationView),
    Daily(DailyPath),
}

impl Scenario {
    pub fn view(&self) -> ObservationView {
        match self {
            Scenario::Observed(v) => v.clone(),
            Scenario::Daily(d) => d.view(),
        }
    }
}

/// Daily cumulative returns `d_1..d_n` of a simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyPath {
    pub cumulative_returns: Vec<f64>,
    pub observation_idx: Vec<usize>,
}

impl DailyPath {
    pub fn view(&self) -> ObservationView {
        ObservationView::from_cumulative(&self.cumulative_returns, &self.observation_idx)
    }

    pub fn closes(&self, start_level: f64) -> Vec<f64> {
        self.cumulative_returns
            .iter()
            .map(|d| start_level * (1.0 + d))
            .collect()
    }
}

/// Materializes `n` scenarios using the default block size. Scenario `i`
/// is the same one the estimators see for the same seed.
pub fn simulate_paths(
    model: &MarketModel,
    terms: &NoteTerms,
    n: usize,
    seed: u64,
) -> Result<Vec<Scenario>> {
    if n == 0 {
        return Err(Error::Domain("need at least one path".into()));
    }
    let cfg = McConfig::new(n, seed);
    let daily = model.is_daily();
    let blocks = run_blocks(
        model,
        terms,
        &cfg,
        |acc: &mut Vec<Scenario>, view, scratch| {
            acc.push(if daily {
                Scenario::Daily(DailyPath {
                    cumulative_returns: scratch.daily.clone(),
                    observation_idx: scratch.observation_idx.clone(),
                })
            } else {
                Scenario::Observed(view.clone())
            });
        },
    )?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Sample mean of the net payment under one interpretation.
pub fn estimate_expected_payment(
    model: &MarketModel,
    terms: &NoteTerms,
    interpretation: Interpretation,
    cfg: &McConfig,
) -> Result<Estimate> {
    let [a, b] = estimate_both(model, terms, cfg)?;
    Ok(match interpretation {
        Interpretation::A => a,
        Interpretation::B => b,
    })
}

/// Both interpretations from the same scenarios.
pub fn estimate_both(
    model: &MarketModel,
    terms: &NoteTerms,
    cfg: &McConfig,
) -> Result<[Estimate; 2]> {
    if cfg.paths < MIN_ESTIMATE_PATHS {
        return Err(Error::Domain(format!(
            "need at least {MIN_ESTIMATE_PATHS} paths, got {}",
            cfg.paths
        )));
    }
    let blocks = run_blocks(model, terms, cfg, |acc: &mut [Moments; 2], view, _| {
        acc[0].push(payoff(terms, view, Interpretation::A).net);
        acc[1].push(payoff(terms, view, Interpretation::B).net);
    })?;
    let mut total = [Moments::default(); 2];
    for block in &blocks {
        total[0].merge(&block[0]);
        total[1].merge(&block[1]);
    }
    Ok([
        Estimate::from_moments(&total[0], cfg.seed),
        Estimate::from_moments(&total[1], cfg.seed),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimated {
    pub value: f64,
    pub std_error: f64,
}

impl Estimated {
    fn proportion(hits: u64, trials: u64) -> Self {
        let value = hits as f64 / trials as f64;
        Estimated {
            value,
            std_error: (value * (1.0 - value) / trials as f64).sqrt(),
        }
    }
}

/// Sample versions of the scenario parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParamEstimates {
    /// `P(I_1 >= 0)`.
    pub p: Estimated,
    /// `-E(I_R | breach, all I_j < 0)`.
    pub b1: Estimated,
    /// `P(breach | all I_j < 0)`.
    pub b2: Estimated,
    /// `P(I_R < threshold)`.
    pub tau: Estimated,
    pub all_negative_hits: u64,
    pub loss_hits: u64,
}

#[derive(Debug, Default)]
struct ParamTally {
    n: u64,
    first_up: u64,
    tau: u64,
    all_negative: u64,
    loss: Moments,
}

pub fn estimate_model_params(
    model: &MarketModel,
    terms: &NoteTerms,
    cfg: &McConfig,
) -> Result<ModelParamEstimates> {
    let threshold = terms.breach_threshold();
    let blocks = run_blocks(model, terms, cfg, |acc: &mut ParamTally, view, _| {
        acc.n += 1;
        if view.index_returns()[0] >= 0.0 {
            acc.first_up += 1;
        }
        if view.final_return() < threshold {
            acc.tau += 1;
        }
        if view.all_negative() {
            acc.all_negative += 1;
            if view.d_min() < threshold {
                acc.loss.push(view.final_return());
            }
        }
    })?;
    let mut t = ParamTally::default();
    for b in &blocks {
        t.n += b.n;
        t.first_up += b.first_up;
        t.tau += b.tau;
        t.all_negative += b.all_negative;
        t.loss.merge(&b.loss);
    }
    if t.all_negative < MIN_CONDITIONING_HITS {
        return Err(Error::RareEvent(format!(
            "only {} of {} scenarios have every observation return negative; need {MIN_CONDITIONING_HITS}",
            t.all_negative, t.n
        )));
    }
    if t.loss.count == 0 {
        return Err(Error::RareEvent(format!(
            "no breach among {} all-negative scenarios; B1 is undefined",
            t.all_negative
        )));
    }
    let loss = Estimate::from_moments(&t.loss, cfg.seed);
    Ok(ModelParamEstimates {
        p: Estimated::proportion(t.first_up, t.n),
        b1: Estimated {
            value: -loss.mean,
            std_error: loss.std_error,
        },
        b2: Estimated::proportion(t.loss.count, t.all_negative),
        tau: Estimated::proportion(t.tau, t.n),
        all_negative_hits: t.all_negative,
        loss_hits: t.loss.count,
    })
}
