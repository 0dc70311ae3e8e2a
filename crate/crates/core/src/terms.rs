//! Contract terms of an autocallable note: the data model, the term-sheet
//! reader/writer and the quarterly coupon ladder.
//!
//! Term sheets are line-oriented `key = value` documents:
//!
//! ```text
//! principal = 10.00
//! index_starting_level = 369.44
//! trigger_fraction = 0.5
//! trade_date = 2008-02-05
//! final_valuation_date = 2009-08-05
//! maturity_date = 2009-08-10
//! observation = 2008-05-05, 0.52
//! observation = 2008-08-05, 1.04
//! ```

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::kv;

/// Currency amount in integer cents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cents(pub i64);

impl Cents {
    pub fn as_dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }

    /// Rounds a dollar amount to cents, half away from zero.
    pub fn round_from_dollars(dollars: f64) -> Self {
        Cents((dollars * 100.0).round() as i64)
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl FromStr for Cents {
    type Err = String;

    /// Parses a decimal amount exactly. Digits past the second decimal place
    /// must be zero.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
        if whole.is_empty() && frac.is_empty() {
            return Err(format!("`{s}` is not an amount"));
        }
        let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(whole) || !all_digits(frac) {
            return Err(format!("`{s}` is not an amount"));
        }
        if frac.len() > 2 && frac[2..].bytes().any(|b| b != b'0') {
            return Err(format!("`{s}` has more precision than cents"));
        }
        let whole: i64 = if whole.is_empty() {
            0
        } else {
            whole
                .parse()
                .map_err(|_| format!("`{s}` is out of range"))?
        };
        let mut cents_part = 0i64;
        for (i, b) in frac.bytes().take(2).enumerate() {
            cents_part += i64::from(b - b'0') * if i == 0 { 10 } else { 1 };
        }
        let value = whole
            .checked_mul(100)
            .and_then(|w| w.checked_add(cents_part))
            .ok_or_else(|| format!("`{s}` is out of range"))?;
        Ok(Cents(if negative { -value } else { value }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub date: NaiveDate,
    /// Net amount paid per note if the note is called on this date.
    pub coupon: Cents,
}

/// Contractual parameters of one note.
#[derive(Debug, Clone, PartialEq)]
pub struct NoteTerms {
    pub principal: Cents,
    pub index_starting_level: f64,
    pub trigger_fraction: f64,
    pub trade_date: NaiveDate,
    pub settlement_date: Option<NaiveDate>,
    pub final_valuation_date: NaiveDate,
    pub maturity_date: NaiveDate,
    pub observations: Vec<Observation>,
    pub per_annum_call_rate: Option<f64>,
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

impl NoteTerms {
    /// The S&P 500 Financials note issued February 2008: six quarterly
    /// observations, 50% trigger, 20.84% p.a. call schedule.
    pub fn reference() -> Self {
        let dates = [
            ymd(2008, 5, 5),
            ymd(2008, 8, 5),
            ymd(2008, 11, 5),
            ymd(2009, 2, 5),
            ymd(2009, 5, 5),
            ymd(2009, 8, 5),
        ];
        let coupons = [52, 104, 156, 208, 261, 313];
        NoteTerms {
            principal: Cents(1000),
            index_starting_level: 369.44,
            trigger_fraction: 0.5,
            trade_date: ymd(2008, 2, 5),
            settlement_date: Some(ymd(2008, 2, 8)),
            final_valuation_date: ymd(2009, 8, 5),
            maturity_date: ymd(2009, 8, 10),
            observations: dates
                .iter()
                .zip(coupons)
                .map(|(&date, c)| Observation {
                    date,
                    coupon: Cents(c),
                })
                .collect(),
            per_annum_call_rate: Some(0.2084),
        }
    }

    pub fn trigger_level(&self) -> f64 {
        self.trigger_fraction * self.index_starting_level
    }

    /// Cumulative return below which the trigger counts as breached
    /// (-0.5 for a 50% trigger).
    pub fn breach_threshold(&self) -> f64 {
        self.trigger_fraction - 1.0
    }

    pub fn coupons(&self) -> Vec<Cents> {
        self.observations.iter().map(|o| o.coupon).collect()
    }

    pub fn observation_dates(&self) -> Vec<NaiveDate> {
        self.observations.iter().map(|o| o.date).collect()
    }

    /// Renders the terms in the term-sheet file format.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("principal = {}\n", self.principal));
        out.push_str(&format!(
            "index_starting_level = {}\n",
            self.index_starting_level
        ));
        out.push_str(&format!("trigger_fraction = {}\n", self.trigger_fraction));
        out.push_str(&format!("trade_date = {}\n", self.trade_date));
        if let Some(d) = self.settlement_date {
            out.push_str(&format!("settlement_date = {d}\n"));
        }
        out.push_str(&format!(
            "final_valuation_date = {}\n",
            self.final_valuation_date
        ));
        out.push_str(&format!("maturity_date = {}\n", self.maturity_date));
        if let Some(rate) = self.per_annum_call_rate {
            out.push_str(&format!("per_annum_call_rate = {rate}\n"));
        }
        for o in &self.observations {
            out.push_str(&format!("observation = {}, {}\n", o.date, o.coupon));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermSheetDiagnostic {
    pub severity: Severity,
    pub field_path: String,
    pub message: String,
}

impl TermSheetDiagnostic {
    fn error(field_path: impl Into<String>, message: impl Into<String>) -> Self {
        TermSheetDiagnostic {
            severity: Severity::Error,
            field_path: field_path.into(),
            message: message.into(),
        }
    }

    fn warning(field_path: impl Into<String>, message: impl Into<String>) -> Self {
        TermSheetDiagnostic {
            severity: Severity::Warning,
            field_path: field_path.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for TermSheetDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}[{}]: {}", self.field_path, self.message)
    }
}

const REQUIRED_KEYS: [&str; 6] = [
    "principal",
    "index_starting_level",
    "trigger_fraction",
    "trade_date",
    "final_valuation_date",
    "maturity_date",
];

#[derive(Default)]
struct Draft {
    principal: Option<Cents>,
    index_starting_level: Option<f64>,
    trigger_fraction: Option<f64>,
    trade_date: Option<NaiveDate>,
    settlement_date: Option<NaiveDate>,
    final_valuation_date: Option<NaiveDate>,
    maturity_date: Option<NaiveDate>,
    per_annum_call_rate: Option<f64>,
    observations: Vec<Observation>,
}

fn parse_date(field: &str, value: &str) -> std::result::Result<NaiveDate, TermSheetDiagnostic> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d").map_err(|_| {
        TermSheetDiagnostic::error(field, format!("`{value}` is not a YYYY-MM-DD date"))
    })
}

fn parse_real(field: &str, value: &str) -> std::result::Result<f64, TermSheetDiagnostic> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(TermSheetDiagnostic::error(
            field,
            format!("`{value}` is not a finite number"),
        )),
    }
}

/// Reads a term-sheet document. On failure every problem found is reported,
/// each tagged with the offending field.
pub fn parse_term_sheet(text: &str) -> Result<NoteTerms> {
    parse_term_sheet_with_warnings(text).map(|(terms, _)| terms)
}

/// Like [`parse_term_sheet`], also returning the warnings of a valid sheet.
pub fn parse_term_sheet_with_warnings(text: &str) -> Result<(NoteTerms, Vec<TermSheetDiagnostic>)> {
    let (entries, bad_lines) = kv::parse_document(text);
    let mut diags: Vec<TermSheetDiagnostic> = bad_lines
        .into_iter()
        .map(|(line, raw)| {
            TermSheetDiagnostic::error(
                format!("line {line}"),
                format!("expected `key = value`, found `{raw}`"),
            )
        })
        .collect();

    let mut draft = Draft::default();
    let mut seen: Vec<&str> = Vec::new();

    for entry in &entries {
        let key = entry.key.as_str();
        let value = entry.value.as_str();
        if key != "observation" {
            if seen.contains(&key) {
                diags.push(TermSheetDiagnostic::error(
                    key,
                    format!("duplicate key on line {}", entry.line),
                ));
                continue;
            }
            seen.push(key);
        }
        let outcome = match key {
            "principal" => value
                .parse::<Cents>()
                .map(|c| draft.principal = Some(c))
                .map_err(|m| TermSheetDiagnostic::error(key, m)),
            "index_starting_level" => {
                parse_real(key, value).map(|v| draft.index_starting_level = Some(v))
            }
            "trigger_fraction" => parse_real(key, value).map(|v| draft.trigger_fraction = Some(v)),
            "per_annum_call_rate" => {
                parse_real(key, value).map(|v| draft.per_annum_call_rate = Some(v))
            }
            "trade_date" => parse_date(key, value).map(|d| draft.trade_date = Some(d)),
            "settlement_date" => parse_date(key, value).map(|d| draft.settlement_date = Some(d)),
            "final_valuation_date" => {
                parse_date(key, value).map(|d| draft.final_valuation_date = Some(d))
            }
            "maturity_date" => parse_date(key, value).map(|d| draft.maturity_date = Some(d)),
            "observation" => {
                let path = format!("observations[{}]", draft.observations.len());
                parse_observation(&path, value).map(|o| draft.observations.push(o))
            }
            other => Err(TermSheetDiagnostic::warning(
                other,
                format!("unknown key on line {}", entry.line),
            )),
        };
        if let Err(d) = outcome {
            diags.push(d);
        }
    }

    for key in REQUIRED_KEYS {
        if !seen.contains(&key) {
            diags.push(TermSheetDiagnostic::error(key, "required key is missing"));
        }
    }
    if draft.observations.is_empty()
        && !diags
            .iter()
            .any(|d| d.field_path.starts_with("observations"))
    {
        diags.push(TermSheetDiagnostic::error(
            "observations",
            "at least one `observation = <date>, <coupon>` line is required",
        ));
    }

    if diags.iter().any(TermSheetDiagnostic::is_error) {
        return Err(Error::TermSheet(diags));
    }

    // All required fields are present once no error was recorded.
    let terms = NoteTerms {
        principal: draft.principal.expect("checked above"),
        index_starting_level: draft.index_starting_level.expect("checked above"),
        trigger_fraction: draft.trigger_fraction.expect("checked above"),
        trade_date: draft.trade_date.expect("checked above"),
        settlement_date: draft.settlement_date,
        final_valuation_date: draft.final_valuation_date.expect("checked above"),
        maturity_date: draft.maturity_date.expect("checked above"),
        observations: draft.observations,
        per_annum_call_rate: draft.per_annum_call_rate,
    };

    diags.extend(validate(&terms));
    if diags.iter().any(TermSheetDiagnostic::is_error) {
        Err(Error::TermSheet(
            diags
                .into_iter()
                .filter(TermSheetDiagnostic::is_error)
                .collect(),
        ))
    } else {
        Ok((terms, diags))
    }
}

fn parse_observation(
    path: &str,
    value: &str,
) -> std::result::Result<Observation, TermSheetDiagnostic> {
    let Some((date, coupon)) = value.split_once(',') else {
        return Err(TermSheetDiagnostic::error(
            path,
            "observation has no coupon; coupon count must match observation count",
        ));
    };
    let date = parse_date(path, date.trim())?;
    let coupon = coupon
        .trim()
        .parse::<Cents>()
        .map_err(|m| TermSheetDiagnostic::error(path, m))?;
    Ok(Observation { date, coupon })
}

/// Checks every `NoteTerms` invariant. Returns an empty list for valid terms;
/// a stated call rate that does not reproduce the stored coupons is a warning.
pub fn validate(terms: &NoteTerms) -> Vec<TermSheetDiagnostic> {
    let mut diags = Vec::new();
    let err = |diags: &mut Vec<_>, field: &str, msg: String| {
        diags.push(TermSheetDiagnostic::error(field, msg));
    };

    if terms.principal.0 <= 0 {
        err(
            &mut diags,
            "principal",
            format!("must be positive, got {}", terms.principal),
        );
    }
    if !(terms.index_starting_level > 0.0 && terms.index_starting_level.is_finite()) {
        err(
            &mut diags,
            "index_starting_level",
            format!("must be positive, got {}", terms.index_starting_level),
        );
    }
    if !(terms.trigger_fraction > 0.0 && terms.trigger_fraction < 1.0) {
        err(
            &mut diags,
            "trigger_fraction",
            format!("must lie in (0, 1), got {}", terms.trigger_fraction),
        );
    }
    if let Some(settle) = terms.settlement_date {
        if settle < terms.trade_date {
            err(
                &mut diags,
                "settlement_date",
                format!("{settle} precedes the trade date"),
            );
        }
    }

    match terms.observations.first() {
        None => err(&mut diags, "observations", "no observation dates".into()),
        Some(first) if first.date <= terms.trade_date => err(
            &mut diags,
            "observations",
            format!(
                "first observation {} is not after the trade date {}",
                first.date, terms.trade_date
            ),
        ),
        Some(_) => {}
    }
    for (i, pair) in terms.observations.windows(2).enumerate() {
        if pair[1].date <= pair[0].date {
            err(
                &mut diags,
                "observations",
                format!(
                    "observation dates must be strictly increasing: {} follows {} at position {}",
                    pair[1].date,
                    pair[0].date,
                    i + 1
                ),
            );
        }
        if pair[1].coupon <= pair[0].coupon {
            err(
                &mut diags,
                &format!("observations[{}]", i + 1),
                format!(
                    "coupons must be strictly increasing: {} follows {}",
                    pair[1].coupon, pair[0].coupon
                ),
            );
        }
    }
    for (i, o) in terms.observations.iter().enumerate() {
        if o.coupon.0 <= 0 {
            err(
                &mut diags,
                &format!("observations[{i}]"),
                format!("coupon must be positive, got {}", o.coupon),
            );
        }
    }
    if let Some(last) = terms.observations.last() {
        if last.date != terms.final_valuation_date {
            err(
                &mut diags,
                "final_valuation_date",
                format!(
                    "{} does not match the last observation date {}",
                    terms.final_valuation_date, last.date
                ),
            );
        }
    }
    if terms.maturity_date < terms.final_valuation_date {
        err(
            &mut diags,
            "maturity_date",
            format!(
                "{} precedes the final valuation date {}",
                terms.maturity_date, terms.final_valuation_date
            ),
        );
    }

    if let Some(rate) = terms.per_annum_call_rate {
        if !(rate > 0.0 && rate.is_finite()) {
            err(
                &mut diags,
                "per_annum_call_rate",
                format!("must be positive, got {rate}"),
            );
        } else if terms.principal.0 > 0 && !terms.observations.is_empty() {
            let derived = derive_coupon_schedule(rate, terms.principal, terms.observations.len());
            let stored = terms.coupons();
            if derived != stored {
                let show = |v: &[Cents]| {
                    v.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                diags.push(TermSheetDiagnostic::warning(
                    "observations",
                    format!(
                        "stored coupons [{}] differ from the schedule implied by per_annum_call_rate {rate}: [{}]",
                        show(&stored),
                        show(&derived)
                    ),
                ));
            }
        }
    }
    diags
}

/// Quarterly call amounts accrued at `rate` per annum: entry `r` (1-based)
/// is `principal * rate * r / 4` rounded to cents, half away from zero.
///
/// The arithmetic is done in integers with the rate fixed to nine decimal
/// places, so amounts like 2.605 round the way they read.
pub fn derive_coupon_schedule(rate: f64, principal: Cents, quarters: usize) -> Vec<Cents> {
    const RATE_SCALE: i128 = 1_000_000_000;
    let rate_scaled = (rate * RATE_SCALE as f64).round() as i128;
    let denom = 4 * RATE_SCALE;
    (1..=quarters as i128)
        .map(|r| {
            let num = i128::from(principal.0) * rate_scaled * r;
            Cents(div_round_half_away(num, denom) as i64)
        })
        .collect()
}

fn div_round_half_away(num: i128, den: i128) -> i128 {
    let q = num / den;
    let rem = num % den;
    if 2 * rem.abs() >= den.abs() {
        q + num.signum() * den.signum()
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const REFERENCE_DOC: &str = "\
# Autocallable Optimization Securities, S&P 500 Financials
principal = 10.00
index_starting_level = 369.44
trigger_fraction = 0.5
trade_date = 2008-02-05
settlement_date = 2008-02-08
final_valuation_date = 2009-08-05
maturity_date = 2009-08-10
per_annum_call_rate = 0.2084
observation = 2008-05-05, 0.52
observation = 2008-08-05, 1.04
observation = 2008-11-05, 1.56
observation = 2009-02-05, 2.08
observation = 2009-05-05, 2.61
observation = 2009-08-05, 3.13
";

    fn diagnostics(result: Result<NoteTerms>) -> Vec<TermSheetDiagnostic> {
        match result {
            Err(Error::TermSheet(d)) => d,
            other => panic!("expected term-sheet error, got {other:?}"),
        }
    }

    #[test]
    fn parses_reference_sheet() {
        let terms = parse_term_sheet(REFERENCE_DOC).unwrap();
        assert_eq!(terms, NoteTerms::reference());
        assert_eq!(terms.trigger_level(), 184.72);
        assert_eq!(terms.breach_threshold(), -0.5);
        assert!(validate(&terms).is_empty());
    }

    #[test]
    fn out_of_order_observations_flagged() {
        let doc = REFERENCE_DOC.replace(
            "observation = 2008-08-05, 1.04",
            "observation = 2008-04-05, 1.04",
        );
        let diags = diagnostics(parse_term_sheet(&doc));
        assert!(diags
            .iter()
            .any(|d| d.is_error() && d.field_path == "observations"));
    }

    #[test]
    fn missing_principal_flagged() {
        let doc = REFERENCE_DOC.replace("principal = 10.00\n", "");
        let diags = diagnostics(parse_term_sheet(&doc));
        assert!(diags
            .iter()
            .any(|d| d.is_error() && d.field_path == "principal"));
    }

    #[test]
    fn bad_values_each_reported() {
        let doc = REFERENCE_DOC
            .replace("trade_date = 2008-02-05", "trade_date = 02/05/2008")
            .replace(
                "index_starting_level = 369.44",
                "index_starting_level = lots",
            )
            .replace("observation = 2009-02-05, 2.08", "observation = 2009-02-05");
        let diags = diagnostics(parse_term_sheet(&doc));
        let fields: Vec<_> = diags.iter().map(|d| d.field_path.as_str()).collect();
        assert!(fields.contains(&"trade_date"));
        assert!(fields.contains(&"index_starting_level"));
        assert!(fields.contains(&"observations[3]"));
    }

    #[test]
    fn duplicate_key_is_an_error() {
        let doc = format!("{REFERENCE_DOC}principal = 20.00\n");
        let diags = diagnostics(parse_term_sheet(&doc));
        assert!(diags.iter().any(|d| d.field_path == "principal"));
    }

    #[test]
    fn trigger_fraction_out_of_range() {
        let mut terms = NoteTerms::reference();
        terms.trigger_fraction = 1.2;
        let diags = validate(&terms);
        assert!(diags
            .iter()
            .any(|d| d.is_error() && d.field_path == "trigger_fraction"));
    }

    #[test]
    fn rate_mismatch_is_warning_only() {
        let mut terms = NoteTerms::reference();
        terms.per_annum_call_rate = Some(0.30);
        let diags = validate(&terms);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);
        assert_eq!(diags[0].field_path, "observations");
        // 10 * 0.30 / 4 = 0.75 per quarter
        assert!(diags[0]
            .message
            .contains("0.75, 1.50, 2.25, 3.00, 3.75, 4.50"));
    }

    #[test]
    fn reference_coupon_schedule() {
        let expect = [52, 104, 156, 208, 261, 313].map(Cents);
        assert_eq!(derive_coupon_schedule(0.2084, Cents(1000), 6), expect);
        assert_eq!(derive_coupon_schedule(0.2084, Cents(1000), 1), [Cents(52)]);
        assert_eq!(
            derive_coupon_schedule(0.40, Cents(1000), 2),
            [Cents(100), Cents(200)]
        );
    }

    #[test]
    fn half_cent_rounds_away_from_zero() {
        assert_eq!(div_round_half_away(5, 2), 3);
        assert_eq!(div_round_half_away(-5, 2), -3);
        assert_eq!(div_round_half_away(7, 4), 2);
        assert_eq!(div_round_half_away(5, 4), 1);
    }

    #[test]
    fn cents_parse_and_display() {
        assert_eq!("10".parse::<Cents>(), Ok(Cents(1000)));
        assert_eq!("0.5".parse::<Cents>(), Ok(Cents(50)));
        assert_eq!("-4.87".parse::<Cents>(), Ok(Cents(-487)));
        assert_eq!("3.130".parse::<Cents>(), Ok(Cents(313)));
        assert!("3.131".parse::<Cents>().is_err());
        assert!("1e3".parse::<Cents>().is_err());
        assert!("".parse::<Cents>().is_err());
        assert_eq!(Cents(-487).to_string(), "-4.87");
        assert_eq!(Cents(5).to_string(), "0.05");
        assert_eq!(Cents::round_from_dollars(-4.8742), Cents(-487));
        assert_eq!(Cents::round_from_dollars(0.125), Cents(13));
    }

    fn arb_terms() -> impl Strategy<Value = NoteTerms> {
        (
            1i64..1_000_000,
            0.01f64..20_000.0,
            0.01f64..0.99,
            prop::collection::vec((1i64..200, 1i64..500), 1..9),
            0i64..30,
            prop::option::of(0i64..5),
            prop::option::of(0.001f64..2.0),
        )
            .prop_map(
                |(principal, start, trigger, steps, mat_gap, settle, rate)| {
                    let trade = ymd(2010, 1, 4);
                    let mut date = trade;
                    let mut coupon = 0i64;
                    let observations: Vec<Observation> = steps
                        .into_iter()
                        .map(|(gap, bump)| {
                            date += chrono::Duration::days(gap);
                            coupon += bump;
                            Observation {
                                date,
                                coupon: Cents(coupon),
                            }
                        })
                        .collect();
                    let last = observations.last().unwrap().date;
                    NoteTerms {
                        principal: Cents(principal),
                        index_starting_level: start,
                        trigger_fraction: trigger,
                        trade_date: trade,
                        settlement_date: settle.map(|g| trade + chrono::Duration::days(g)),
                        final_valuation_date: last,
                        maturity_date: last + chrono::Duration::days(mat_gap),
                        observations,
                        per_annum_call_rate: rate,
                    }
                },
            )
    }

    proptest! {
        #[test]
        fn document_round_trip(terms in arb_terms()) {
            let doc = terms.to_document();
            let parsed = parse_term_sheet(&doc).unwrap();
            prop_assert_eq!(&parsed, &terms);
            prop_assert_eq!(parsed.to_document(), doc);
        }

        #[test]
        fn derived_schedule_strictly_increasing(rate in 0.01f64..3.0, principal in 1000i64..1_000_000, quarters in 1usize..12) {
            let schedule = derive_coupon_schedule(rate, Cents(principal), quarters);
            prop_assert_eq!(schedule.len(), quarters);
            for w in schedule.windows(2) {
                prop_assert!(w[1] > w[0]);
            }
        }
    }
}
