#![allow(dead_code)]

use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate, Weekday};
use tarlev::io::{write_prices, PriceSeries};
use tarlev::tar::presets::bovespa;
use tarlev::tar::simulate_tar;

/// Weekday dates starting on Monday 2018-01-01.
pub fn weekdays(n: usize) -> Vec<NaiveDate> {
    NaiveDate::from_ymd_opt(2018, 1, 1)
        .unwrap()
        .iter_days()
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .take(n)
        .collect()
}

/// Prices 100 exp(cumsum r), dropping the days in `holidays` (never the first
/// or last).
pub fn prices(name: &str, returns: &[f64], holidays: &[usize]) -> PriceSeries {
    let dates = weekdays(returns.len() + 1);
    let mut lp = 100f64.ln();
    let mut out = PriceSeries { name: name.into(), dates: vec![dates[0]], prices: vec![100.0] };
    for (i, r) in returns.iter().enumerate() {
        lp += r;
        if !holidays.contains(&(i + 1)) || i + 1 == returns.len() {
            out.dates.push(dates[i + 1]);
            out.prices.push(lp.exp());
        }
    }
    out
}

/// A Bovespa-like TAR sample written as two price files with a few
/// non-overlapping missing days. Returns (target, threshold).
pub fn write_pair(dir: &Path, n: usize, seed: u64) -> (PathBuf, PathBuf) {
    let m = bovespa();
    let path = simulate_tar(&m.spec, m.z.as_ref().unwrap(), n, 200, seed).unwrap();
    let target = dir.join("target.csv");
    let threshold = dir.join("threshold.csv");
    write_prices(&target, &prices("target", &path.x, &[10, 57, 300])).unwrap();
    write_prices(&threshold, &prices("threshold", &path.z, &[11, 120])).unwrap();
    (target, threshold)
}
