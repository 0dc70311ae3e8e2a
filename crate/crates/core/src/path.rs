//! Daily index paths and the quantities the payoff rules read from them.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::terms::NoteTerms;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub close: f64,
}

/// Daily closing levels measured against a fixed starting level.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPath {
    entries: Vec<PricePoint>,
    start_level: f64,
}

impl IndexPath {
    /// Dates must be strictly increasing and every level positive.
    pub fn new(entries: Vec<PricePoint>, start_level: f64) -> Result<Self> {
        if !(start_level > 0.0 && start_level.is_finite()) {
            return Err(Error::Prices(format!(
                "start level must be positive, got {start_level}"
            )));
        }
        for (i, p) in entries.iter().enumerate() {
            if !(p.close > 0.0 && p.close.is_finite()) {
                return Err(Error::Prices(format!(
                    "close on {} must be positive, got {}",
                    p.date, p.close
                )));
            }
            if i > 0 && p.date <= entries[i - 1].date {
                return Err(Error::Prices(format!(
                    "rows must be sorted by strictly increasing date: {} follows {}",
                    p.date,
                    entries[i - 1].date
                )));
            }
        }
        Ok(IndexPath {
            entries,
            start_level,
        })
    }

    pub fn entries(&self) -> &[PricePoint] {
        &self.entries
    }

    pub fn start_level(&self) -> f64 {
        self.start_level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn close_on(&self, date: NaiveDate) -> Option<f64> {
        self.entries
            .binary_search_by_key(&date, |p| p.date)
            .ok()
            .map(|i| self.entries[i].close)
    }
}

/// Reads a `date,close` CSV with ISO-8601 dates, presorted ascending.
pub fn read_prices_csv<R: Read>(reader: R) -> Result<Vec<PricePoint>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Prices(e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "close" {
        return Err(Error::Prices(format!(
            "expected header `date,close`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points: Vec<PricePoint> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Prices(format!("row {row}: {e}")))?;
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|_| {
            Error::Prices(format!(
                "row {row}: `{}` is not a YYYY-MM-DD date",
                &record[0]
            ))
        })?;
        let close: f64 = record[1]
            .parse()
            .map_err(|_| Error::Prices(format!("row {row}: `{}` is not a number", &record[1])))?;
        if let Some(prev) = points.last() {
            if date <= prev.date {
                return Err(Error::Prices(format!(
                    "row {row}: {date} is not after {}; rows must be sorted ascending",
                    prev.date
                )));
            }
        }
        points.push(PricePoint { date, close });
    }
    Ok(points)
}

pub fn load_prices_csv(path: impl AsRef<Path>) -> Result<Vec<PricePoint>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_prices_csv(std::io::BufReader::new(file))
}

/// `d_i = (close_i - start) / start` for every entry, in order.
pub fn cumulative_returns(path: &IndexPath) -> Vec<f64> {
    path.entries
        .iter()
        .map(|p| cumulative_return(p.close, path.start_level))
        .collect()
}

#[inline]
pub fn cumulative_return(close: f64, start_level: f64) -> f64 {
    (close - start_level) / start_level
}

/// Index returns on the observation dates and the running minimum of the
/// daily cumulative return up to each of them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservationView {
    index_returns: Vec<f64>,
    running_min: Vec<f64>,
}

impl ObservationView {
    /// Checks that the running minimum is nonincreasing and never above the
    /// matching index return.
    pub fn new(index_returns: Vec<f64>, running_min: Vec<f64>) -> Result<Self> {
        if index_returns.is_empty() || index_returns.len() != running_min.len() {
            return Err(Error::Domain(format!(
                "view needs matching non-empty return and minimum lists, got {} and {}",
                index_returns.len(),
                running_min.len()
            )));
        }
        for r in 0..index_returns.len() {
            if running_min[r] > index_returns[r] {
                return Err(Error::Domain(format!(
                    "running minimum {} exceeds index return {} at observation {}",
                    running_min[r],
                    index_returns[r],
                    r + 1
                )));
            }
            if r > 0 && running_min[r] > running_min[r - 1] {
                return Err(Error::Domain(format!(
                    "running minimum increases at observation {}",
                    r + 1
                )));
            }
        }
        Ok(ObservationView {
            index_returns,
            running_min,
        })
    }

    /// Builds the view from daily cumulative returns; `observation_idx[r]`
    /// is the position of observation `r` in `daily`.
    pub fn from_cumulative(daily: &[f64], observation_idx: &[usize]) -> Self {
        let mut view = ObservationView::default();
        view.refill(daily, observation_idx);
        view
    }

    /// Same as [`ObservationView::from_cumulative`] but reuses this view's buffers.
    pub fn refill(&mut self, daily: &[f64], observation_idx: &[usize]) {
        self.index_returns.clear();
        self.running_min.clear();
        let mut min = f64::INFINITY;
        let mut cursor = 0;
        for &idx in observation_idx {
            for &d in &daily[cursor..=idx] {
                min = min.min(d);
            }
            cursor = idx + 1;
            self.index_returns.push(daily[idx]);
            self.running_min.push(min);
        }
    }

    pub(crate) fn set_unchecked(&mut self, index_returns: &[f64], running_min: &[f64]) {
        self.index_returns.clear();
        self.index_returns.extend_from_slice(index_returns);
        self.running_min.clear();
        self.running_min.extend_from_slice(running_min);
    }

    pub fn index_returns(&self) -> &[f64] {
        &self.index_returns
    }

    pub fn running_min(&self) -> &[f64] {
        &self.running_min
    }

    pub fn observations(&self) -> usize {
        self.index_returns.len()
    }

    /// Minimum daily cumulative return over the whole observation period.
    pub fn d_min(&self) -> f64 {
        *self.running_min.last().expect("view is non-empty")
    }

    /// Index return on the final valuation date.
    pub fn final_return(&self) -> f64 {
        *self.index_returns.last().expect("view is non-empty")
    }

    pub fn all_negative(&self) -> bool {
        self.index_returns.iter().all(|&i| i < 0.0)
    }

    /// Breach is strict: a minimum exactly at the threshold is not a breach.
    pub fn breached_by(&self, r: usize, threshold: f64) -> bool {
        self.running_min[r] < threshold
    }
}

/// The entries that fall in the observation period, from the trade date to
/// the final valuation date inclusive.
fn observation_window<'a>(path: &'a IndexPath, terms: &NoteTerms) -> &'a [PricePoint] {
    let lo = path.entries.partition_point(|p| p.date < terms.trade_date);
    let hi = path
        .entries
        .partition_point(|p| p.date <= terms.final_valuation_date);
    &path.entries[lo..hi.max(lo)]
}

/// Reads the index returns on each observation date and the running minimum
/// of the cumulative return over the observation period. Every observation
/// date must be present in the path; nothing is interpolated.
pub fn observe(path: &IndexPath, terms: &NoteTerms) -> Result<ObservationView> {
    let window = observation_window(path, terms);
    let daily: Vec<f64> = window
        .iter()
        .map(|p| cumulative_return(p.close, path.start_level))
        .collect();
    let idx = terms
        .observations
        .iter()
        .map(|o| {
            window
                .binary_search_by_key(&o.date, |p| p.date)
                .map_err(|_| Error::MissingObservation(o.date))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ObservationView::from_cumulative(&daily, &idx))
}

/// First date in the observation period whose close is strictly below the
/// trigger level.
pub fn breach_date(path: &IndexPath, terms: &NoteTerms) -> Option<NaiveDate> {
    let threshold = terms.breach_threshold();
    observation_window(path, terms)
        .iter()
        .find(|p| cumulative_return(p.close, path.start_level) < threshold)
        .map(|p| p.date)
}
