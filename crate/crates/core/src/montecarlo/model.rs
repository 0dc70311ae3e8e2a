//! Generative laws for index paths, and the model spec file reader.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::kv;
use crate::path::{load_prices_csv, ObservationView};
use crate::terms::NoteTerms;

/// Trading days in the reference note's observation period.
pub const REFERENCE_TRADING_DAYS: usize = 381;

/// Final return on the loss branch of the sign models: three equally likely
/// points `-B1 - h, -B1, -B1 + h` with `h = min(B1, 1 - B1) / 2`. The law
/// has mean `-B1` and stays inside `[-1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossLaw {
    points: [f64; 3],
}

impl LossLaw {
    pub fn with_mean_loss(b1: f64) -> Self {
        let h = 0.5 * b1.min(1.0 - b1);
        LossLaw {
            points: [-b1 - h, -b1, -b1 + h],
        }
    }

    pub fn points(&self) -> [f64; 3] {
        self.points
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.points[rng.random_range(0..3)]
    }
}

/// Observation signs drawn IID; the breach indicator is drawn only on the
/// all-negative branch, with the breach placed in the final quarter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidSign {
    pub p: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Per-day multiplicative factor `up` with probability `q`, else `down`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailyLattice {
    pub up: f64,
    pub down: f64,
    pub q: f64,
    pub days_per_quarter: usize,
}

/// IID normal daily log returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricWalk {
    pub mu: f64,
    pub sigma: f64,
    pub days: usize,
}

/// Quarterly sign chain that keeps its current sign with probability
/// `persistence`. Loss branch as in [`IidSign`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovSign {
    pub p: f64,
    pub persistence: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Daily gross returns resampled with replacement from a price history.
#[derive(Debug, Clone, PartialEq)]
pub struct Bootstrap {
    pub ratios: Arc<[f64]>,
    pub days: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarketModel {
    IidSign(IidSign),
    DailyLattice(DailyLattice),
    GeometricWalk(GeometricWalk),
    MarkovSign(MarkovSign),
    Bootstrap(Bootstrap),
}

fn probability(name: &str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::Model(format!("{name} must lie in [0, 1], got {x}")))
    }
}

fn mean_loss(b1: f64) -> Result<f64> {
    if b1 > 0.0 && b1 <= 1.0 {
        Ok(b1)
    } else {
        Err(Error::Model(format!("b1 must lie in (0, 1], got {b1}")))
    }
}

impl IidSign {
    pub fn new(p: f64, b1: f64, b2: f64) -> Result<Self> {
        Ok(IidSign {
            p: probability("p", p)?,
            b1: mean_loss(b1)?,
            b2: probability("b2", b2)?,
        })
    }
}

impl DailyLattice {
    pub fn new(up: f64, down: f64, q: f64, days_per_quarter: usize) -> Result<Self> {
        if !(up > 1.0 && up.is_finite() && down > 0.0 && down < 1.0) {
            return Err(Error::Model(format!(
                "lattice factors need up > 1 > down > 0, got up={up} down={down}"
            )));
        }
        if days_per_quarter == 0 {
            return Err(Error::Model("days_per_quarter must be at least 1".into()));
        }
        Ok(DailyLattice {
            up,
            down,
            q: probability("q", q)?,
            days_per_quarter,
        })
    }

    pub fn steps(&self, observations: usize) -> usize {
        self.days_per_quarter * observations
    }
}

impl GeometricWalk {
    pub fn new(mu: f64, sigma: f64, days: usize) -> Result<Self> {
        if !mu.is_finite() || !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Model(format!(
                "need finite mu and sigma >= 0, got mu={mu} sigma={sigma}"
            )));
        }
        if days == 0 {
            return Err(Error::Model("days must be at least 1".into()));
        }
        Ok(GeometricWalk { mu, sigma, days })
    }
}

impl MarkovSign {
    /// `persistence` below one half describes a mean-reverting market and is
    /// rejected unless `allow_reversal` is set.
    pub fn new(p: f64, persistence: f64, b1: f64, b2: f64, allow_reversal: bool) -> Result<Self> {
        let persistence = probability("persistence", persistence)?;
        if persistence < 0.5 && !allow_reversal {
            return Err(Error::Model(format!(
                "persistence {persistence} < 0.5; set allow_euphoria = true to accept it"
            )));
        }
        Ok(MarkovSign {
            p: probability("p", p)?,
            persistence,
            b1: mean_loss(b1)?,
            b2: probability("b2", b2)?,
        })
    }
}

impl Bootstrap {
    pub fn from_closes(closes: &[f64], days: usize) -> Result<Self> {
        let ratios: Vec<f64> = closes.windows(2).map(|w| w[1] / w[0]).collect();
        if ratios.is_empty() {
            return Err(Error::Model(
                "bootstrap needs a history with at least two closes".into(),
            ));
        }
        if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Model(
                "bootstrap history has a non-positive close".into(),
            ));
        }
        if days == 0 {
            return Err(Error::Model("days must be at least 1".into()));
        }
        Ok(Bootstrap {
            ratios: ratios.into(),
            days,
        })
    }
}

const MAX_SIGN_OBSERVATIONS: usize = 64;

/// What a sampler needs from the note.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Layout {
    pub observations: usize,
    pub threshold: f64,
}

impl Layout {
    pub fn from_terms(terms: &NoteTerms) -> Self {
        Layout {
            observations: terms.observations.len(),
            threshold: terms.breach_threshold(),
        }
    }
}

/// Zero-based index of each observation among `days` daily entries, with
/// observation `r` on day `ceil(r * days / R)`.
pub fn observation_indices(days: usize, observations: usize) -> Vec<usize> {
    (1..=observations)
        .map(|r| (r * days).div_ceil(observations) - 1)
        .collect()
}

/// Reusable buffers for one worker.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    pub daily: Vec<f64>,
    pub observation_idx: Vec<usize>,
    returns: Vec<f64>,
    mins: Vec<f64>,
}

/// Magnitudes used by the sign models, which only fix signs and the loss.
pub(crate) struct SignMagnitudes {
    up: f64,
    down: f64,
    breach_floor: f64,
}

impl SignMagnitudes {
    pub fn for_threshold(threshold: f64) -> Self {
        SignMagnitudes {
            up: 0.10,
            down: 0.4 * threshold,
            breach_floor: 0.5 * (threshold - 1.0),
        }
    }

    /// Builds a view from observation signs (`true` = nonnegative) and, on
    /// the all-negative branch, an optional final loss return.
    pub fn fill(
        &self,
        nonnegative: &[bool],
        loss: Option<f64>,
        scratch: &mut Scratch,
        view: &mut ObservationView,
    ) {
        let n = nonnegative.len();
        scratch.returns.clear();
        scratch.mins.clear();
        let mut min = f64::INFINITY;
        for (r, &up) in nonnegative.iter().enumerate() {
            let mut ir = if up { self.up } else { self.down };
            if r + 1 == n {
                if let Some(x) = loss {
                    ir = x;
                    min = min.min(self.breach_floor);
                }
            }
            min = min.min(ir);
            scratch.returns.push(ir);
            scratch.mins.push(min);
        }
        view.set_unchecked(&scratch.returns, &scratch.mins);
    }
}

impl MarketModel {
    pub fn name(&self) -> &'static str {
        match self {
            MarketModel::IidSign(_) => "iid_sign",
            MarketModel::DailyLattice(_) => "daily_lattice",
            MarketModel::GeometricWalk(_) => "geometric_walk",
            MarketModel::MarkovSign(_) => "markov_sign",
            MarketModel::Bootstrap(_) => "bootstrap",
        }
    }

    /// Sign models produce observation-level scenarios with no daily path.
    pub fn is_daily(&self) -> bool {
        !matches!(self, MarketModel::IidSign(_) | MarketModel::MarkovSign(_))
    }

    pub(crate) fn days(&self, layout: &Layout) -> usize {
        match self {
            MarketModel::DailyLattice(m) => m.steps(layout.observations),
            MarketModel::GeometricWalk(m) => m.days,
            MarketModel::Bootstrap(m) => m.days,
            MarketModel::IidSign(_) | MarketModel::MarkovSign(_) => 0,
        }
    }

    pub(crate) fn check_layout(&self, layout: &Layout) -> Result<()> {
        if !self.is_daily() && layout.observations > MAX_SIGN_OBSERVATIONS {
            return Err(Error::Model(format!(
                "sign models support at most {MAX_SIGN_OBSERVATIONS} observations, got {}",
                layout.observations
            )));
        }
        let days = self.days(layout);
        if self.is_daily() && days < layout.observations {
            return Err(Error::Model(format!(
                "{} days cannot hold {} observations",
                days, layout.observations
            )));
        }
        Ok(())
    }

    pub(crate) fn prepare(&self, layout: &Layout, scratch: &mut Scratch) {
        if self.is_daily() {
            scratch.observation_idx = observation_indices(self.days(layout), layout.observations);
        }
    }

    /// Draws one scenario into `view`. For daily models the cumulative
    /// returns are left in `scratch.daily`.
    pub(crate) fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        layout: &Layout,
        scratch: &mut Scratch,
        view: &mut ObservationView,
    ) {
        match self {
            MarketModel::IidSign(m) => {
                let mut signs = [false; MAX_SIGN_OBSERVATIONS];
                let signs = &mut signs[..layout.observations];
                for s in signs.iter_mut() {
                    *s = rng.random::<f64>() < m.p;
                }
                let loss = sign_loss(rng, signs, m.b1, m.b2);
                SignMagnitudes::for_threshold(layout.threshold).fill(signs, loss, scratch, view);
            }
            MarketModel::MarkovSign(m) => {
                let mut signs = [false; MAX_SIGN_OBSERVATIONS];
                let signs = &mut signs[..layout.observations];
                signs[0] = rng.random::<f64>() < m.p;
                for r in 1..signs.len() {
                    let stay = rng.random::<f64>() < m.persistence;
                    signs[r] = if stay { signs[r - 1] } else { !signs[r - 1] };
                }
                let loss = sign_loss(rng, signs, m.b1, m.b2);
                SignMagnitudes::for_threshold(layout.threshold).fill(signs, loss, scratch, view);
            }
            MarketModel::DailyLattice(m) => {
                scratch.daily.clear();
                let mut level = 1.0f64;
                for _ in 0..m.steps(layout.observations) {
                    level *= if rng.random::<f64>() < m.q {
                        m.up
                    } else {
                        m.down
                    };
                    scratch.daily.push(level - 1.0);
                }
                view.refill(&scratch.daily, &scratch.observation_idx);
            }
            MarketModel::GeometricWalk(m) => {
                scratch.daily.clear();
                let normal = Normal::new(m.mu, m.sigma).expect("validated parameters");
                let mut log_level = 0.0f64;
                for _ in 0..m.days {
                    log_level += normal.sample(rng);
                    scratch.daily.push(log_level.exp() - 1.0);
                }
                view.refill(&scratch.daily, &scratch.observation_idx);
            }
            MarketModel::Bootstrap(m) => {
                scratch.daily.clear();
                let mut level = 1.0f64;
                for _ in 0..m.days {
                    level *= m.ratios[rng.random_range(0..m.ratios.len())];
                    scratch.daily.push(level - 1.0);
                }
                view.refill(&scratch.daily, &scratch.observation_idx);
            }
        }
    }
}

fn sign_loss<R: Rng + ?Sized>(rng: &mut R, signs: &[bool], b1: f64, b2: f64) -> Option<f64> {
    if signs.iter().any(|&s| s) {
        return None;
    }
    if rng.random::<f64>() < b2 {
        Some(LossLaw::with_mean_loss(b1).sample(rng))
    } else {
        None
    }
}

struct SpecReader {
    entries: Vec<kv::Entry>,
    used: Vec<bool>,
}

impl SpecReader {
    fn take(&mut self, key: &str) -> Option<String> {
        let pos = self.entries.iter().position(|e| e.key == key)?;
        self.used[pos] = true;
        Some(self.entries[pos].value.clone())
    }

    fn real(&mut self, key: &str) -> Result<f64> {
        let raw = self
            .take(key)
            .ok_or_else(|| Error::Model(format!("missing key `{key}`")))?;
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Model(format!("`{key}`: `{raw}` is not a finite number")))
    }

    fn count(&mut self, key: &str, default: Option<usize>) -> Result<usize> {
        match self.take(key) {
            Some(raw) => raw
                .parse::<usize>()
                .map_err(|_| Error::Model(format!("`{key}`: `{raw}` is not a count"))),
            None => default.ok_or_else(|| Error::Model(format!("missing key `{key}`"))),
        }
    }

    fn flag(&mut self, key: &str) -> Result<bool> {
        match self.take(key).as_deref() {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(other) => Err(Error::Model(format!(
                "`{key}`: expected true or false, got `{other}`"
            ))),
        }
    }

    fn finish(self) -> Result<()> {
        let unused: Vec<_> = self
            .entries
            .iter()
            .zip(&self.used)
            .filter(|(_, &u)| !u)
            .map(|(e, _)| format!("`{}` (line {})", e.key, e.line))
            .collect();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(Error::Model(format!(
                "unknown or repeated keys: {}",
                unused.join(", ")
            )))
        }
    }
}

/// Parses a model spec document. A relative `history` path of a bootstrap
/// model is resolved against `base_dir`.
pub fn parse_model_spec(text: &str, base_dir: Option<&Path>) -> Result<MarketModel> {
    let (entries, bad) = kv::parse_document(text);
    if let Some((line, raw)) = bad.first() {
        return Err(Error::Model(format!(
            "line {line}: expected `key = value`, found `{raw}`"
        )));
    }
    let used = vec![false; entries.len()];
    let mut spec = SpecReader { entries, used };
    let kind = spec
        .take("model")
        .ok_or_else(|| Error::Model("missing key `model`".into()))?;
    let model = match kind.as_str() {
        "iid_sign" => MarketModel::IidSign(IidSign::new(spec.real("p")?, spec.real("b1")?, spec.real("b2")?)?),
        "daily_lattice" => MarketModel::DailyLattice(DailyLattice::new(
            spec.real("up")?,
            spec.real("down")?,
            spec.real("q")?,
            spec.count("days_per_quarter", None)?,
        )?),
        "geometric_walk" => MarketModel::GeometricWalk(GeometricWalk::new(
            spec.real("mu")?,
            spec.real("sigma")?,
            spec.count("days", Some(REFERENCE_TRADING_DAYS))?,
        )?),
        "markov_sign" => {
            let p = spec.real("p")?;
            let persistence = spec.real("persistence")?;
            let b1 = spec.real("b1")?;
            let b2 = spec.real("b2")?;
            let allow = spec.flag("allow_euphoria")?;
            MarketModel::MarkovSign(MarkovSign::new(p, persistence, b1, b2, allow)?)
        }
        "bootstrap" => {
            let history = spec
                .take("history")
                .ok_or_else(|| Error::Model("missing key `history`".into()))?;
            let days = spec.count("days", Some(REFERENCE_TRADING_DAYS))?;
            let mut path = PathBuf::from(&history);
            if path.is_relative() {
                if let Some(dir) = base_dir {
                    path = dir.join(path);
                }
            }
            let closes: Vec<f64> = load_prices_csv(&path)?.iter().map(|p| p.close).collect();
            MarketModel::Bootstrap(Bootstrap::from_closes(&closes, days)?)
        }
        other => {
            return Err(Error::Model(format!(
                "unknown model `{other}`; expected iid_sign, daily_lattice, geometric_walk, markov_sign or bootstrap"
            )))
        }
    };
    spec.finish()?;
    Ok(model)
}

pub fn load_model_spec(path: impl AsRef<Path>) -> Result<MarketModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model_spec(&text, path.parent())
}
