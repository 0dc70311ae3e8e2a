//! Command-line front end: term-sheet validation, historical replay,
//! closed-form pricing, scenario sweeps and simulation reports.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use autocall::analytic::{
    expected_net_payment_iid, expected_net_payment_upper_bound, find_extrema, sweep, CouponLadder,
    Curve, ScenarioParams, SweepSpec, TauParams,
};
use autocall::montecarlo::{
    enumerate_exact, estimate_both, estimate_model_params, exact_sign_expectation, load_model_spec,
    verify_inequalities, MarketModel, McConfig, DEFAULT_BLOCK_SIZE, MAX_LATTICE_STEPS,
};
use autocall::path::{breach_date, load_prices_csv, observe};
use autocall::terms::parse_term_sheet_with_warnings;
use autocall::{
    payoff, settlement_amount, Execution, IndexPath, Interpretation, NoteTerms, PayoffOutcome,
    Resolution,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] autocall::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_io() => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "autocall",
    version,
    about = "Payoff analysis for autocallable reverse convertible notes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a term sheet and print its diagnostics.
    Validate {
        #[arg(long)]
        terms: PathBuf,
    },
    /// Settle a note against a historical price file.
    Replay {
        #[arg(long)]
        terms: PathBuf,
        #[arg(long)]
        prices: PathBuf,
        #[arg(long, value_enum, default_value_t = Choice::Both)]
        interpretation: Choice,
    },
    /// Expected net payment from the closed-form expressions.
    Price(PriceArgs),
    /// Tabulate the expected net payment over a grid of p (and tau).
    Sweep(SweepArgs),
    /// Monte Carlo report for a market model.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Choice {
    A,
    B,
    Both,
}

impl Choice {
    fn interpretations(self) -> &'static [Interpretation] {
        match self {
            Choice::A => &[Interpretation::A],
            Choice::B => &[Interpretation::B],
            Choice::Both => &Interpretation::BOTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PriceMode {
    Iid,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepMode {
    Iid,
    Bound,
    Surface,
}

#[derive(Debug, Args)]
struct PriceArgs {
    #[arg(long, value_enum)]
    mode: PriceMode,
    #[arg(long)]
    p: f64,
    #[arg(long, required_if_eq("mode", "iid"))]
    b1: Option<f64>,
    #[arg(long, required_if_eq("mode", "iid"))]
    b2: Option<f64>,
    #[arg(long, required_if_eq("mode", "bound"))]
    tau: Option<f64>,
    /// Also search the curve through the given parameters for its extrema in p.
    #[arg(long)]
    extrema: bool,
    #[arg(long, default_value_t = 100_000)]
    resolution: usize,
    /// Term sheet; the reference note when omitted.
    #[arg(long)]
    terms: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    mode: SweepMode,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long, required_if_eq("mode", "iid"))]
    b1: Option<f64>,
    #[arg(long, required_if_eq("mode", "iid"))]
    b2: Option<f64>,
    #[arg(long, required_if_eq("mode", "bound"))]
    tau: Option<f64>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    terms: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    terms: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Choice::Both)]
    interpretation: Choice,
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    block_size: usize,
    #[arg(long)]
    sequential: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { terms } => cmd_validate(&terms, out, err),
        Command::Replay {
            terms,
            prices,
            interpretation,
        } => cmd_replay(&terms, &prices, interpretation, out).map(|_| 0),
        Command::Price(args) => cmd_price(&args, out).map(|_| 0),
        Command::Sweep(args) => cmd_sweep(&args, out).map(|_| 0),
        Command::Simulate(args) => cmd_simulate(&args, out).map(|_| 0),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_terms(path: &Path) -> Result<NoteTerms> {
    Ok(parse_term_sheet_with_warnings(&read_text(path)?)?.0)
}

fn terms_or_reference(path: Option<&Path>) -> Result<NoteTerms> {
    path.map_or_else(|| Ok(NoteTerms::reference()), load_terms)
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn cmd_validate(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match parse_term_sheet_with_warnings(&read_text(path)?) {
        Ok((terms, warnings)) => {
            for w in &warnings {
                writeln!(err, "{w}")?;
            }
            let coupons: Vec<String> = terms.coupons().iter().map(|c| c.to_string()).collect();
            writeln!(
                out,
                "ok: {} observations, trigger level {:.2}, coupons {}",
                terms.observations.len(),
                terms.trigger_level(),
                coupons.join(", ")
            )?;
            Ok(0)
        }
        Err(autocall::Error::TermSheet(diags)) => {
            for d in &diags {
                writeln!(err, "{d}")?;
            }
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn percent(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn dollars(cents: autocall::Cents) -> String {
    if cents.0 < 0 {
        format!("-${}", autocall::Cents(-cents.0))
    } else {
        format!("${cents}")
    }
}

fn row_outcome(outcome: &PayoffOutcome, row: usize) -> &'static str {
    match outcome.resolution {
        Resolution::Called(r) if r == row => "Securities called",
        Resolution::Called(r) if r < row => "previously called",
        _ => "Securities NOT called",
    }
}

/// Act/365 compound annual rate from the trade date to payment.
fn compound_return(
    gross: autocall::Cents,
    principal: autocall::Cents,
    from: NaiveDate,
    to: NaiveDate,
) -> f64 {
    let years = (to - from).num_days() as f64 / 365.0;
    (gross.as_dollars() / principal.as_dollars()).powf(1.0 / years) - 1.0
}

fn cmd_replay(terms_path: &Path, prices: &Path, choice: Choice, out: &mut dyn Write) -> Result<()> {
    let terms = load_terms(terms_path)?;
    let path = IndexPath::new(load_prices_csv(prices)?, terms.index_starting_level)?;
    let view = observe(&path, &terms)?;
    let outcomes: Vec<PayoffOutcome> = choice
        .interpretations()
        .iter()
        .map(|&i| payoff(&terms, &view, i))
        .collect();
    let trigger = terms.trigger_level();

    writeln!(
        out,
        "Index Starting Level {:.2}, Trigger Level {:.2}",
        terms.index_starting_level, trigger
    )?;
    match breach_date(&path, &terms) {
        Some(d) => writeln!(out, "First close below Trigger Level: {d}")?,
        None => writeln!(out, "No close below Trigger Level")?,
    }
    writeln!(out)?;
    writeln!(
        out,
        "{:<18} {:>18} {:>12}  Outcome",
        "Observation Date", "Index Ending Level", "Index Return"
    )?;
    for (r, obs) in terms.observations.iter().enumerate() {
        let close = path.close_on(obs.date).expect("observe checked every date");
        let ir = view.index_returns()[r];
        let start_side = if ir >= 0.0 {
            "At or Above Index Starting Level"
        } else {
            "Below Index Starting Level"
        };
        let trigger_side = if close < trigger { "Below" } else { "Above" };
        let called = if outcomes.len() == 1 {
            row_outcome(&outcomes[0], r + 1).to_string()
        } else {
            outcomes
                .iter()
                .map(|o| format!("{}: {}", o.interpretation, row_outcome(o, r + 1)))
                .collect::<Vec<_>>()
                .join(" | ")
        };
        writeln!(
            out,
            "{:<18} {:>18.2} {:>12}  {start_side} and {trigger_side} Trigger Level; {called}",
            obs.date.to_string(),
            close,
            percent(ir)
        )?;
    }
    writeln!(out)?;
    for o in &outcomes {
        let gross = settlement_amount(o);
        writeln!(
            out,
            "Settlement Amount (per {}) [{}]: {} (total return of {}, or a compound return of {} per annum); {}, paid {}",
            dollars(terms.principal),
            o.interpretation,
            dollars(gross),
            percent(o.total_return()),
            percent(compound_return(gross, terms.principal, terms.trade_date, o.payment_date)),
            o.resolution,
            o.payment_date
        )?;
    }
    if let [a, b] = outcomes.as_slice() {
        let diff = autocall::Cents(settlement_amount(b).0 - settlement_amount(a).0);
        writeln!(
            out,
            "Difference (B - A): {} ({} of principal)",
            dollars(diff),
            percent(b.total_return() - a.total_return())
        )?;
    }
    Ok(())
}

fn cmd_price(args: &PriceArgs, out: &mut dyn Write) -> Result<()> {
    let terms = terms_or_reference(args.terms.as_deref())?;
    let ladder = CouponLadder::from_terms(&terms);
    let (value, curve) = match args.mode {
        PriceMode::Iid => {
            let (b1, b2) = (args.b1.unwrap_or_default(), args.b2.unwrap_or_default());
            let params = ScenarioParams::new(args.p, b1, b2)?;
            (
                expected_net_payment_iid(&ladder, params),
                Curve::iid(b1, b2)?,
            )
        }
        PriceMode::Bound => {
            let tau = args.tau.unwrap_or_default();
            let params = TauParams::new(args.p, tau)?;
            (
                expected_net_payment_upper_bound(&ladder, params),
                Curve::bound(tau)?,
            )
        }
    };
    writeln!(out, "expected net payment: {value:.2} ({value:.6})")?;
    if args.extrema {
        let e = find_extrema(&ladder, curve, args.resolution)?;
        writeln!(
            out,
            "max: {:.2} ({:.6}) at p = {:.4}",
            e.max, e.max, e.argmax
        )?;
        writeln!(
            out,
            "min: {:.2} ({:.6}) at p = {:.4}",
            e.min, e.min, e.argmin
        )?;
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let terms = terms_or_reference(args.terms.as_deref())?;
    let ladder = CouponLadder::from_terms(&terms);
    let spec = match args.mode {
        SweepMode::Iid => SweepSpec::Iid {
            b1: args.b1.unwrap_or_default(),
            b2: args.b2.unwrap_or_default(),
            points: args.points,
        },
        SweepMode::Bound => SweepSpec::Bound {
            tau: args.tau.unwrap_or_default(),
            points: args.points,
        },
        SweepMode::Surface => SweepSpec::Surface {
            points: args.points,
        },
    };
    let csv = sweep(&ladder, spec, execution(args.sequential))?.to_csv();
    match &args.out {
        Some(path) => fs::write(path, csv).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let terms = terms_or_reference(args.terms.as_deref())?;
    if !args.model.exists() {
        return Err(CliError::Io {
            path: args.model.clone(),
            source: io::Error::new(io::ErrorKind::NotFound, "model spec not found"),
        });
    }
    let model = load_model_spec(&args.model)?;
    let cfg = McConfig::new(args.paths, args.seed)
        .with_block_size(args.block_size)
        .with_execution(execution(args.sequential));
    let ladder = CouponLadder::from_terms(&terms);

    writeln!(
        out,
        "model {}, {} paths, seed {}, block size {}",
        model.name(),
        cfg.paths,
        cfg.seed,
        cfg.block_size
    )?;
    let estimates = estimate_both(&model, &terms, &cfg)?;
    for &i in args.interpretation.interpretations() {
        let e = &estimates[matches!(i, Interpretation::B) as usize];
        writeln!(
            out,
            "E[net {i}] = {:.6}  SE {:.6}  95% CI [{:.6}, {:.6}]",
            e.mean, e.std_error, e.ci95.0, e.ci95.1
        )?;
    }

    match estimate_model_params(&model, &terms, &cfg) {
        Ok(est) => {
            writeln!(
                out,
                "estimated p = {:.6} ({:.6}), B1 = {:.6} ({:.6}), B2 = {:.6} ({:.6}), tau = {:.6} ({:.6})",
                est.p.value,
                est.p.std_error,
                est.b1.value,
                est.b1.std_error,
                est.b2.value,
                est.b2.std_error,
                est.tau.value,
                est.tau.std_error
            )?;
            match ScenarioParams::new(est.p.value, est.b1.value, est.b2.value) {
                Ok(params) => writeln!(
                    out,
                    "closed form at estimates: {:.6}",
                    expected_net_payment_iid(&ladder, params)
                )?,
                Err(e) => writeln!(out, "closed form at estimates: unavailable ({e})")?,
            }
            let bound = Curve::bound(est.tau.value)?.eval(&ladder, est.p.value);
            writeln!(out, "bound at estimated (p, tau): {bound:.6}")?;
        }
        Err(e @ autocall::Error::RareEvent(_)) => {
            writeln!(out, "parameter estimates unavailable: {e}")?
        }
        Err(e) => return Err(e.into()),
    }

    match &model {
        MarketModel::DailyLattice(lattice)
            if lattice.steps(terms.observations.len()) <= MAX_LATTICE_STEPS =>
        {
            let exact = enumerate_exact(lattice, &terms, cfg.execution)?;
            writeln!(out)?;
            writeln!(out, "exact enumeration over {} steps:", exact.steps)?;
            writeln!(
                out,
                "E[net A] = {:.6}, E[net B] = {:.6}, p = {:.6}, tau = {:.6}, B1 = {}, B2 = {}",
                exact.expected_net_a,
                exact.expected_net_b,
                exact.p,
                exact.tau,
                optional(exact.b1),
                optional(exact.b2)
            )?;
            writeln!(out)?;
            write!(out, "{}", verify_inequalities(lattice, &terms)?)?;
        }
        MarketModel::IidSign(_) | MarketModel::MarkovSign(_) => {
            writeln!(out)?;
            for &i in args.interpretation.interpretations() {
                writeln!(
                    out,
                    "exact E[net {i}] = {:.6}",
                    exact_sign_expectation(&model, &terms, i)?
                )?;
            }
        }
        _ => {}
    }
    Ok(())
}

fn optional(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"))
}
