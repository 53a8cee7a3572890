//! End-to-end run from price files: write two synthetic `date,price` CSVs,
//! then run the fit-tar and nic pipelines on them and list the outputs.

use chrono::{Datelike, NaiveDate, Weekday};
use tarlev::io::{run_experiment, write_prices, ExperimentConfig, Inputs, Pipeline, PriceSeries};
use tarlev::tar::presets::bovespa;
use tarlev::tar::simulate_tar;

fn to_prices(name: &str, returns: &[f64]) -> PriceSeries {
    let dates: Vec<NaiveDate> = NaiveDate::from_ymd_opt(2015, 1, 5)
        .unwrap()
        .iter_days()
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .take(returns.len() + 1)
        .collect();
    let mut lp = 100f64.ln();
    let mut prices = vec![100.0];
    for r in returns {
        lp += r;
        prices.push(lp.exp());
    }
    // a holiday: the pipeline interpolates it back
    let (mut dates, mut prices) = (dates, prices);
    dates.remove(40);
    prices.remove(40);
    PriceSeries { name: name.into(), dates, prices }
}

fn main() -> tarlev::Result<()> {
    let dir = std::env::temp_dir().join("tarlev-example");
    std::fs::create_dir_all(&dir)?;
    let m = bovespa();
    let path = simulate_tar(&m.spec, m.z_process()?, 1200, 300, 4)?;
    let target = dir.join("index.csv");
    let threshold = dir.join("futures.csv");
    write_prices(&target, &to_prices("index", &path.x))?;
    write_prices(&threshold, &to_prices("futures", &path.z))?;

    let mut config = ExperimentConfig {
        pipeline: Some(Pipeline::FitTar),
        seed: 1,
        out: Some(dir.join("fit")),
        inputs: Some(Inputs { target, threshold }),
        ..Default::default()
    };
    config.fit_tar.max_k = 6;
    let manifest = run_experiment(&config)?;
    println!("fit-tar wrote {:?}, interpolated {:?}", manifest.files.iter().map(|f| &f.path).collect::<Vec<_>>(), manifest.interpolated_points);

    config.pipeline = Some(Pipeline::Nic);
    config.model = Some(dir.join("fit").join("fitted_model.json").display().to_string());
    config.out = Some(dir.join("nic"));
    let manifest = run_experiment(&config)?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, dir.join("nic").join(&f.path).display());
    }
    Ok(())
}
