//! `date,price` CSV ingestion onto a Monday-Friday calendar.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Observed,
    Interpolated,
}

/// Raw observations of one price file.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
}

/// Log returns on the aligned calendar. `log_prices` and `price_dates`
/// include the first date, which carries no return.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub name: String,
    pub price_dates: Vec<NaiveDate>,
    pub log_prices: Vec<f64>,
    /// Input prices where observed, exp(log price) where interpolated.
    pub prices: Vec<f64>,
    pub price_flags: Vec<Provenance>,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
    /// A return is interpolated when either of its log prices is.
    pub flags: Vec<Provenance>,
}

impl ReturnSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn interpolated_count(&self) -> usize {
        self.flags.iter().filter(|f| **f == Provenance::Interpolated).count()
    }

    /// The observed (date, price) pairs, in the same form they were read.
    pub fn observed_prices(&self) -> PriceSeries {
        let (dates, prices) = self
            .price_dates
            .iter()
            .zip(&self.prices)
            .zip(&self.price_flags)
            .filter(|(_, f)| **f == Provenance::Observed)
            .map(|((d, p), _)| (*d, *p))
            .unzip();
        PriceSeries { name: self.name.clone(), dates, prices }
    }
}

fn malformed(path: &str, reason: impl Into<String>) -> Error {
    Error::MalformedCsv { path: path.to_string(), reason: reason.into() }
}

pub fn parse_prices(name: &str, reader: impl std::io::Read) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| malformed(name, e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "price" {
        return Err(malformed(name, format!("expected header `date,price`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut prices = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| malformed(name, e.to_string()))?;
        let line = i + 2;
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d")
            .map_err(|e| malformed(name, format!("line {line}: bad date `{}`: {e}", &rec[0])))?;
        let price: f64 = rec[1]
            .parse()
            .map_err(|_| malformed(name, format!("line {line}: bad price `{}`", &rec[1])))?;
        if !(price > 0.0) || !price.is_finite() {
            return Err(Error::NonPositivePrice { path: name.to_string(), date: date.to_string(), price });
        }
        if let Some(last) = dates.last() {
            if date <= *last {
                return Err(malformed(name, format!("line {line}: dates must be strictly increasing")));
            }
        }
        dates.push(date);
        prices.push(price);
    }
    if dates.is_empty() {
        return Err(Error::EmptySeries(name.to_string()));
    }
    Ok(PriceSeries { name: name.to_string(), dates, prices })
}

pub fn read_prices(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    parse_prices(&path.display().to_string(), file)
}

pub fn write_prices(path: impl AsRef<Path>, series: &PriceSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["date", "price"])?;
    for (d, p) in series.dates.iter().zip(&series.prices) {
        w.write_record([d.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn is_weekday(d: NaiveDate) -> bool {
    !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

/// Aligns several price series on the Monday-Friday calendar spanning the
/// dates they all cover. Weekend observations are ignored. A business day
/// missing from a series gets its log price by linear interpolation in
/// calendar position between the neighbouring observations.
pub fn align_returns(series: &[PriceSeries]) -> Result<Vec<ReturnSeries>> {
    if series.is_empty() {
        return Err(Error::InvalidInput("no price series given".into()));
    }
    let weekday_obs: Vec<BTreeMap<NaiveDate, f64>> = series
        .iter()
        .map(|s| {
            s.dates
                .iter()
                .zip(&s.prices)
                .filter(|(d, _)| is_weekday(**d))
                .map(|(d, p)| (*d, *p))
                .collect::<BTreeMap<_, _>>()
        })
        .collect();
    for (s, obs) in series.iter().zip(&weekday_obs) {
        if obs.is_empty() {
            return Err(Error::EmptySeries(s.name.clone()));
        }
    }
    let start = weekday_obs.iter().map(|o| *o.keys().next().unwrap()).max().unwrap();
    let end = weekday_obs.iter().map(|o| *o.keys().next_back().unwrap()).min().unwrap();
    let calendar: Vec<NaiveDate> = start.iter_days().take_while(|d| *d <= end).filter(|d| is_weekday(*d)).collect();
    if calendar.len() < 2 {
        return Err(Error::EmptySeries("the series share fewer than two business days".into()));
    }

    let mut out = Vec::with_capacity(series.len());
    for (s, obs) in series.iter().zip(&weekday_obs) {
        let mut lp = vec![f64::NAN; calendar.len()];
        let mut prices = vec![f64::NAN; calendar.len()];
        let mut flags = vec![Provenance::Interpolated; calendar.len()];
        let mut known = Vec::new();
        for (i, d) in calendar.iter().enumerate() {
            if let Some(v) = obs.get(d) {
                prices[i] = *v;
                lp[i] = v.ln();
                flags[i] = Provenance::Observed;
                known.push(i);
            }
        }
        // the calendar starts and ends on dates observed by every series
        for w in known.windows(2) {
            let (a, b) = (w[0], w[1]);
            for i in a + 1..b {
                let f = (i - a) as f64 / (b - a) as f64;
                lp[i] = lp[a] + f * (lp[b] - lp[a]);
                prices[i] = lp[i].exp();
            }
        }
        let values: Vec<f64> = lp.windows(2).map(|w| w[1] - w[0]).collect();
        let rflags = flags
            .windows(2)
            .map(|w| if w.contains(&Provenance::Interpolated) { Provenance::Interpolated } else { Provenance::Observed })
            .collect();
        out.push(ReturnSeries {
            name: s.name.clone(),
            price_dates: calendar.clone(),
            log_prices: lp,
            prices,
            price_flags: flags,
            dates: calendar[1..].to_vec(),
            values,
            flags: rflags,
        });
    }
    Ok(out)
}

/// Reads and aligns the given files.
pub fn ingest_prices<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<ReturnSeries>> {
    let series = paths.iter().map(read_prices).collect::<Result<Vec<_>>>()?;
    align_returns(&series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn parse(text: &str) -> Result<PriceSeries> {
        parse_prices("test", text.as_bytes())
    }

    #[test]
    fn interpolates_a_missing_day() {
        // Monday to Wednesday, Tuesday missing
        let a = parse("date,price\n2024-01-01,100\n2024-01-03,121\n").unwrap();
        let b = parse("date,price\n2024-01-01,10\n2024-01-02,11\n2024-01-03,12\n").unwrap();
        let r = align_returns(&[a, b]).unwrap();
        assert_abs_diff_eq!(r[0].log_prices[1], 0.5 * (100f64.ln() + 121f64.ln()), epsilon = 1e-15);
        assert_abs_diff_eq!(r[0].values[0], 0.5 * 1.21f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(r[0].values[1], 0.5 * 1.21f64.ln(), epsilon = 1e-15);
        assert_eq!(r[0].interpolated_count(), 2);
        assert_eq!(r[1].interpolated_count(), 0);
    }

    #[test]
    fn disjoint_holidays_give_equal_lengths() {
        let a = parse("date,price\n2024-01-01,1\n2024-01-02,1.1\n2024-01-04,1.2\n2024-01-05,1.3\n").unwrap();
        let b = parse("date,price\n2024-01-01,5\n2024-01-03,5.1\n2024-01-04,5.2\n2024-01-05,5.3\n").unwrap();
        let r = align_returns(&[a, b]).unwrap();
        assert_eq!(r[0].len(), 4);
        assert_eq!(r[0].dates, r[1].dates);
    }

    #[test]
    fn weekends_are_skipped() {
        let a = parse("date,price\n2024-01-05,1\n2024-01-06,9\n2024-01-08,2\n").unwrap();
        let r = align_returns(&[a]).unwrap();
        assert_eq!(r[0].len(), 1);
        assert_eq!(r[0].interpolated_count(), 0);
        assert_abs_diff_eq!(r[0].values[0], 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn zero_price_is_rejected() {
        assert!(matches!(parse("date,price\n2024-01-01,0\n"), Err(Error::NonPositivePrice { .. })));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse("day,close\n2024-01-01,1\n"), Err(Error::MalformedCsv { .. })));
        assert!(matches!(parse("date,price\n01/02/2024,1\n"), Err(Error::MalformedCsv { .. })));
        assert!(matches!(parse("date,price\n2024-01-02,1\n2024-01-01,2\n"), Err(Error::MalformedCsv { .. })));
        assert!(matches!(parse("date,price\n"), Err(Error::EmptySeries(_))));
    }

    #[test]
    fn export_and_reingest_reproduces_returns() {
        let a = parse("date,price\n2024-01-01,100.5\n2024-01-03,101.25\n2024-01-04,99.875\n2024-01-08,100.0\n").unwrap();
        let r = align_returns(&[a]).unwrap().remove(0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_prices(&path, &r.observed_prices()).unwrap();
        let again = ingest_prices(&[&path]).unwrap().remove(0);
        assert_eq!(again.values, r.values);
        assert_eq!(again.flags, r.flags);
    }
}
