//! Pipeline orchestration: each run reads its inputs, computes, writes its
//! files in a fixed order and finishes with the manifest.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use super::config::{load_bekk, load_model, ExperimentConfig, Pipeline};
use super::output::{row, Manifest, OutputDir};
use super::prices::{ingest_prices, ReturnSeries};
use crate::bekk::{
    asymmetry_tests, bekk_filter, fit_bekk, nis_equations, nis_slice, nis_surface, simulate_bekk, AsymmetryReport,
    BekkParams, FitBlock, FitConfig, NisCoefficients,
};
use crate::error::{Error, Result};
use crate::inference::{
    arch_lm, fit_gibbs, identify_structure, jarque_bera, ljung_box, nonlinearity_test, validate, GibbsConfig,
    ParamSummary, PriorSpec, TestResult,
};
use crate::leverage::{convexity_check, leverage_elasticity, nic_curve, volatility_path, x_star_min, ElasticityFit};
use crate::stats::{kurtosis, mean, skewness, variance};
use crate::tar::presets::Model;
use crate::tar::{autocovariance, replicate_moments, unconditional_moments, ModelDocument, RegimeProbs, TarSpec};

struct Data {
    dates: Vec<String>,
    x: Vec<f64>,
    z: Vec<f64>,
    interpolated: BTreeMap<String, usize>,
}

fn load_data(config: &ExperimentConfig) -> Result<Option<Data>> {
    let Some(inp) = &config.inputs else { return Ok(None) };
    let series = ingest_prices(&[&inp.target, &inp.threshold])?;
    let (x, z): (&ReturnSeries, &ReturnSeries) = (&series[0], &series[1]);
    let mut interpolated = BTreeMap::new();
    interpolated.insert("target".to_string(), x.interpolated_count());
    interpolated.insert("threshold".to_string(), z.interpolated_count());
    Ok(Some(Data {
        dates: x.dates.iter().map(|d| d.to_string()).collect(),
        x: x.values.clone(),
        z: z.values.clone(),
        interpolated,
    }))
}

fn require(data: &Option<Data>) -> Result<&Data> {
    data.as_ref().ok_or_else(|| Error::Config("this pipeline needs input price files".into()))
}

/// Validates the configuration, runs the selected pipeline and returns the
/// manifest of written files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Manifest> {
    let pipeline = config.validate()?;
    let out_dir = config.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let data = load_data(config).map_err(|e| e.context(format!("{pipeline}: reading inputs")))?;
    let mut out = OutputDir::create(&out_dir)?;
    let run = match pipeline {
        Pipeline::Simulate => run_simulate(config, &mut out),
        Pipeline::Moments => run_moments(config, &mut out),
        Pipeline::FitTar => run_fit_tar(config, require(&data)?, &mut out),
        Pipeline::FitBekk => run_fit_bekk(config, require(&data)?, &mut out),
        Pipeline::Nic => run_nic(config, data.as_ref(), &mut out),
        Pipeline::Validate => run_validate(config, require(&data)?, &mut out),
        Pipeline::Compare => run_compare(config, data.as_ref(), &mut out),
    };
    run.map_err(|e| e.context(pipeline.name()))?;
    let interpolated = data.map(|d| d.interpolated).unwrap_or_default();
    out.finish(pipeline.name(), config.seed, interpolated)
}

#[derive(Serialize)]
struct IntervalReport {
    mean: f64,
    sd: f64,
    lower: f64,
    upper: f64,
    theoretical: f64,
    contains_theoretical: bool,
}

#[derive(Serialize)]
struct SimulateReport {
    model: String,
    reps: usize,
    len: usize,
    burn_in: usize,
    seed: u64,
    skewness: IntervalReport,
    kurtosis: IntervalReport,
}

fn run_simulate(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let model = load_model(&config.model_source(None)?)?;
    let o = &config.simulate;
    let theory = unconditional_moments(&model.spec, &model.probs)?;
    let sum = replicate_moments(&model.spec, model.z_process()?, o.reps, o.len, o.burn_in, config.seed)?;
    let block = |s: &crate::stats::SampleSummary, t: f64| IntervalReport {
        mean: s.mean,
        sd: s.sd,
        lower: s.lower,
        upper: s.upper,
        theoretical: t,
        contains_theoretical: s.contains(t),
    };
    out.write_json(
        "simulate.json",
        &SimulateReport {
            model: model.name.clone(),
            reps: o.reps,
            len: o.len,
            burn_in: o.burn_in,
            seed: config.seed,
            skewness: block(&sum.skewness, theory.skewness),
            kurtosis: block(&sum.kurtosis, theory.kurtosis),
        },
    )?;
    let rows = (0..o.reps).map(|i| {
        let mut r = vec![i.to_string()];
        r.extend(row(&[sum.skewness_draws[i], sum.kurtosis_draws[i]]));
        r
    });
    out.write_csv("simulate_draws.csv", &["replication", "skewness", "kurtosis"], rows)
}

#[derive(Serialize)]
struct Unconditional {
    mean: f64,
    variance: f64,
    skewness: f64,
    kurtosis: f64,
}

#[derive(Serialize)]
struct RegimeBlock {
    regime: usize,
    probability: f64,
    /// E(X_t | Z_t in B_j)
    mean: f64,
    /// Var(X_t | Z_t in B_j)
    variance: f64,
    second_moment: f64,
    psi_sum: f64,
    sigma_bar_sq: f64,
    /// E(X_t | Z_t in B_j, past) = intercept + sum ar_i x_{t-i}
    intercept: f64,
    ar: Vec<f64>,
    /// Var(X_t | Z_t in B_j, past) = h^2
    noise_variance: f64,
}

/// Var(X_t | past) = noise_variance + sum_j p_j m_j^2 - (sum_j p_j m_j)^2 with
/// m_j the regime predictors; E(X_t | past) = mean_intercept + sum mean_ar_i x_{t-i}.
#[derive(Serialize)]
struct PastDataBlock {
    mean_intercept: f64,
    mean_ar: Vec<f64>,
    noise_variance: f64,
}

#[derive(Serialize)]
struct MomentsReport {
    model: String,
    probabilities: Vec<f64>,
    unconditional: Unconditional,
    regimes: Vec<RegimeBlock>,
    past_data: PastDataBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    autocovariance: Option<Vec<f64>>,
}

fn past_data_block(spec: &TarSpec, probs: &RegimeProbs) -> PastDataBlock {
    let k = spec.max_order();
    let mut mean_ar = vec![0.0; k];
    let (mut a0, mut noise) = (0.0, 0.0);
    for (r, p) in spec.regimes().iter().zip(&probs.marginal) {
        a0 += p * r.intercept;
        noise += p * r.h * r.h;
        for (i, a) in r.ar.iter().enumerate() {
            mean_ar[i] += p * a;
        }
    }
    PastDataBlock { mean_intercept: a0, mean_ar, noise_variance: noise }
}

fn moments_report(model: &Model, max_lag: usize) -> Result<MomentsReport> {
    let m = unconditional_moments(&model.spec, &model.probs)?;
    let regimes = model
        .spec
        .regimes()
        .iter()
        .zip(&m.per_regime)
        .zip(&model.probs.marginal)
        .enumerate()
        .map(|(j, ((r, rm), p))| RegimeBlock {
            regime: j + 1,
            probability: *p,
            mean: rm.mu1,
            variance: rm.sigma2,
            second_moment: rm.mu2,
            psi_sum: rm.psi_sum,
            sigma_bar_sq: rm.sigma_bar_sq,
            intercept: r.intercept,
            ar: r.ar.clone(),
            noise_variance: r.h * r.h,
        })
        .collect();
    let autocovariance = match (&model.z, model.document.probabilities.is_some()) {
        (Some(z), false) => Some(autocovariance(&model.spec, z, max_lag)?),
        _ => None,
    };
    Ok(MomentsReport {
        model: model.name.clone(),
        probabilities: model.probs.marginal.clone(),
        unconditional: Unconditional { mean: m.mean, variance: m.variance, skewness: m.skewness, kurtosis: m.kurtosis },
        regimes,
        past_data: past_data_block(&model.spec, &model.probs),
        autocovariance,
    })
}

fn run_moments(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let model = load_model(&config.model_source(None)?)?;
    out.write_json("moments.json", &moments_report(&model, config.moments.max_lag)?)
}

#[derive(Serialize)]
struct PosteriorReport {
    thresholds: Vec<f64>,
    orders: Vec<usize>,
    n_per_regime: Vec<usize>,
    iters: usize,
    burn_in: usize,
    level: f64,
    parameters: Vec<ParamSummary>,
    rhat_variance: Vec<f64>,
}

fn run_fit_tar(config: &ExperimentConfig, data: &Data, out: &mut OutputDir) -> Result<()> {
    let o = &config.fit_tar;
    let nl = nonlinearity_test(&data.x, &data.z, o.max_k, &o.delays)?;
    out.write_json("nonlinearity.json", &nl)?;
    let structure = match &o.structure {
        Some(s) => s.clone(),
        None => {
            let mut report = identify_structure(&data.x, &data.z, o.max_l, o.max_k, &o.grid)?;
            report.candidates.truncate(25);
            out.write_json("identification.json", &report)?;
            report.best.structure
        }
    };
    let prior = match &o.prior {
        Some(p) => p.clone(),
        None => PriorSpec::default_for(&data.x, &structure),
    };
    let draws = fit_gibbs(
        &data.x,
        &data.z,
        &structure,
        &prior,
        GibbsConfig { iters: o.iters, burn_in: o.burn_in, seed: config.seed },
    )?;
    let mut header: Vec<&str> = vec!["draw"];
    header.extend(draws.names.iter().map(|s| s.as_str()));
    let rows = draws.draws.iter().enumerate().map(|(i, d)| {
        let mut r = vec![(o.burn_in + i).to_string()];
        r.extend(row(d));
        r
    });
    out.write_csv("posterior.csv", &header, rows)?;
    out.write_json(
        "posterior.json",
        &PosteriorReport {
            thresholds: structure.thresholds.clone(),
            orders: structure.orders.clone(),
            n_per_regime: draws.n_per_regime.clone(),
            iters: draws.iters,
            burn_in: draws.burn_in,
            level: 0.90,
            parameters: draws.summaries.clone(),
            rhat_variance: draws.rhat_variance.clone(),
        },
    )?;
    let spec = draws.posterior_mean_spec()?;
    let total: usize = draws.n_per_regime.iter().sum();
    let mut doc = ModelDocument::from_spec(&spec, None);
    doc.description = Some("posterior means; regime probabilities are in-sample regime frequencies".into());
    doc.probabilities = Some(draws.n_per_regime.iter().map(|&n| n as f64 / total as f64).collect());
    out.write_json("fitted_model.json", &doc)
}

#[derive(Serialize)]
struct SeriesDiagnostics {
    series: usize,
    ljung_box: TestResult,
    arch_lm: TestResult,
    jarque_bera: TestResult,
    asymmetry: AsymmetryReport,
}

#[derive(Serialize)]
struct BekkFitReport {
    blocks: Vec<FitBlock>,
    log_likelihood: f64,
    n_obs: usize,
    converged: bool,
    iterations: usize,
    grad_norm: f64,
    message: String,
    h0: [[f64; 2]; 2],
    mean_covariance: [[f64; 2]; 2],
    diagnostics: Vec<SeriesDiagnostics>,
    nis_sigma11: NisCoefficients,
    nis_sigma22: NisCoefficients,
    nis_sigma12: NisCoefficients,
}

fn pair(data: &Data) -> Vec<[f64; 2]> {
    data.x.iter().zip(&data.z).map(|(a, b)| [*a, *b]).collect()
}

fn run_fit_bekk(config: &ExperimentConfig, data: &Data, out: &mut OutputDir) -> Result<()> {
    let o = &config.fit_bekk;
    let returns = pair(data);
    let fit = fit_bekk(&returns, o.p, &FitConfig { optimizer: o.optimizer, init: o.init.clone(), h0: None })?;
    let filt = bekk_filter(&fit.params, &returns, &fit.h0)?;
    let diagnostics = (0..2)
        .map(|i| {
            let eta = filt.standardized_series(i);
            Ok(SeriesDiagnostics {
                series: i + 1,
                ljung_box: ljung_box(&eta, o.diagnostic_lags, 0)?,
                arch_lm: arch_lm(&eta, o.diagnostic_lags)?,
                jarque_bera: jarque_bera(&eta)?,
                asymmetry: asymmetry_tests(&eta, o.asymmetry_lags)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eq = nis_equations(&fit.params);
    let hbar = filt.mean_covariance();
    out.write_json(
        "bekk_fit.json",
        &BekkFitReport {
            blocks: fit.table(),
            log_likelihood: fit.log_likelihood,
            n_obs: fit.n_obs,
            converged: fit.converged,
            iterations: fit.iterations,
            grad_norm: fit.grad_norm,
            message: fit.message.clone(),
            h0: fit.h0,
            mean_covariance: hbar,
            diagnostics,
            nis_sigma11: eq.sigma11,
            nis_sigma22: eq.sigma22,
            nis_sigma12: eq.sigma12,
        },
    )?;
    out.write_json("bekk_params.json", &fit.params)?;
    write_nis(out, &fit.params, &hbar, &filt.residual_series(0), &filt.residual_series(1), o.nis_points)
}

fn write_nis(out: &mut OutputDir, params: &BekkParams, hbar: &[[f64; 2]; 2], a1: &[f64], a2: &[f64], points: usize) -> Result<()> {
    let axis = |a: &[f64]| {
        let m = 3.0 * variance(a).sqrt();
        (0..points).map(|i| -m + 2.0 * m * i as f64 / (points - 1) as f64).collect::<Vec<_>>()
    };
    let (g1, g2) = (axis(a1), axis(a2));
    let header = ["a1", "a2", "sigma11", "sigma22", "sigma12"];
    let to_rows = |pts: Vec<crate::bekk::NisPoint>| {
        pts.into_iter().map(|p| row(&[p.a1, p.a2, p.sigma11, p.sigma22, p.sigma12])).collect::<Vec<_>>()
    };
    out.write_csv("nis.csv", &header, to_rows(nis_surface(params, hbar, &g1, &g2)))?;
    out.write_csv("nis_slice.csv", &header, to_rows(nis_slice(params, hbar, mean(a2), &g1)))
}

#[derive(Serialize)]
struct SymmetricPair {
    x: f64,
    volatility_negative: f64,
    volatility_positive: f64,
}

#[derive(Serialize)]
struct LeverageReport {
    model: String,
    x_star_min: f64,
    denominator: f64,
    degenerate: bool,
    second_derivative: f64,
    sufficient_condition: bool,
    convex: bool,
    leverage_detected: bool,
    grid_minimum: [f64; 2],
    pairs: Vec<SymmetricPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elasticity: Option<ElasticityFit>,
}

fn tar_elasticity(model: &Model, x: &[f64]) -> Result<ElasticityFit> {
    let vol = volatility_path(&model.spec, &model.probs, x)?;
    leverage_elasticity(&vol, &x[model.spec.max_order()..])
}

fn run_nic(config: &ExperimentConfig, data: Option<&Data>, out: &mut OutputDir) -> Result<()> {
    let model = load_model(&config.model_source(Some("bovespa-tar"))?)?;
    let grid = config.nic.grid();
    let curve = nic_curve(&model.spec, &model.probs, &grid)?;
    let xm = x_star_min(&model.spec, &model.probs);
    let cv = convexity_check(&model.spec, &model.probs);
    let imin = (0..grid.len()).min_by(|&a, &b| curve.volatility[a].total_cmp(&curve.volatility[b])).unwrap_or(0);
    let vol = |x: f64| crate::leverage::nic_variance(&model.spec, &model.probs, x).max(0.0).sqrt();
    let pairs = [0.01, 0.025, 0.05, 0.1]
        .iter()
        .map(|&x| SymmetricPair { x, volatility_negative: vol(-x), volatility_positive: vol(x) })
        .collect();
    let elasticity = data.map(|d| tar_elasticity(&model, &d.x)).transpose()?;
    out.write_csv(
        "nic.csv",
        &["x", "volatility", "variance"],
        grid.iter().zip(&curve.volatility).map(|(x, v)| row(&[*x, *v, v * v])),
    )?;
    out.write_json(
        "leverage.json",
        &LeverageReport {
            model: model.name.clone(),
            x_star_min: xm.value,
            denominator: xm.denominator,
            degenerate: xm.degenerate,
            second_derivative: cv.second_derivative,
            sufficient_condition: cv.sufficient_condition_holds,
            convex: cv.convex,
            leverage_detected: curve.leverage_detected,
            grid_minimum: [grid[imin], curve.volatility[imin]],
            pairs,
            elasticity,
        },
    )
}

#[derive(Serialize)]
struct ValidationOutput {
    model: String,
    n_residuals: usize,
    residual_mean: f64,
    residual_variance: f64,
    ljung_box: TestResult,
    arch_lm: TestResult,
    jarque_bera: TestResult,
    acf: Vec<f64>,
    pacf: Vec<f64>,
    band: f64,
    acf_inside_rate: f64,
    level: f64,
    cusum_inside: bool,
    cusumsq_inside: bool,
}

fn run_validate(config: &ExperimentConfig, data: &Data, out: &mut OutputDir) -> Result<()> {
    let model = load_model(&config.model_source(None)?)?;
    let o = &config.validate;
    let regimes = model.spec.regime_path(&data.z);
    let rep = validate(&model.spec, &data.x, &regimes, o.max_lag, o.level)?;
    out.write_json(
        "validation.json",
        &ValidationOutput {
            model: model.name.clone(),
            n_residuals: rep.residuals.len(),
            residual_mean: rep.residual_mean,
            residual_variance: rep.residual_variance,
            ljung_box: rep.ljung_box,
            arch_lm: arch_lm(&rep.residuals, o.max_lag.min(10))?,
            jarque_bera: jarque_bera(&rep.residuals)?,
            acf: rep.correlogram.acf.clone(),
            pacf: rep.correlogram.pacf.clone(),
            band: rep.correlogram.band,
            acf_inside_rate: rep.correlogram.acf_inside_rate(),
            level: o.level,
            cusum_inside: rep.cusum.cusum_inside,
            cusumsq_inside: rep.cusum.cusumsq_inside,
        },
    )?;
    let c = &rep.cusum;
    out.write_csv(
        "cusum.csv",
        &["t", "cusum", "cusum_band", "cusumsq", "cusumsq_lower", "cusumsq_upper"],
        (0..c.t.len()).map(|i| {
            let mut r = vec![c.t[i].to_string()];
            r.extend(row(&[c.cusum[i], c.cusum_band[i], c.cusumsq[i], c.cusumsq_lower[i], c.cusumsq_upper[i]]));
            r
        }),
    )?;
    let offset = data.x.len() - rep.residuals.len();
    out.write_csv(
        "residuals.csv",
        &["date", "residual"],
        rep.residuals.iter().enumerate().map(|(i, e)| vec![data.dates[offset + i].clone(), e.to_string()]),
    )
}

#[derive(Serialize)]
struct TarSide {
    model: String,
    unconditional: Unconditional,
    past_data: PastDataBlock,
    regimes: Vec<(f64, f64, Vec<f64>)>,
    x_star_min: f64,
    leverage_detected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    elasticity: Option<ElasticityFit>,
}

#[derive(Serialize)]
struct MgarchSide {
    source: String,
    /// Sample moments of the first residual series.
    unconditional: Unconditional,
    mean_intercept: f64,
    /// Row 1 of each Gamma_j.
    mean_coefficients: Vec<[f64; 2]>,
    variance: NisCoefficients,
    mean_covariance: [[f64; 2]; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    elasticity: Option<ElasticityFit>,
}

#[derive(Serialize)]
struct CompareReport {
    tar: TarSide,
    mgarch: MgarchSide,
}

fn run_compare(config: &ExperimentConfig, data: Option<&Data>, out: &mut OutputDir) -> Result<()> {
    let model = load_model(&config.model_source(Some("bovespa-tar"))?)?;
    let m = unconditional_moments(&model.spec, &model.probs)?;
    let xm = x_star_min(&model.spec, &model.probs);
    let curve = nic_curve(&model.spec, &model.probs, &config.nic.grid())?;
    let tar = TarSide {
        model: model.name.clone(),
        unconditional: Unconditional { mean: m.mean, variance: m.variance, skewness: m.skewness, kurtosis: m.kurtosis },
        past_data: past_data_block(&model.spec, &model.probs),
        regimes: model
            .spec
            .regimes()
            .iter()
            .zip(&model.probs.marginal)
            .map(|(r, p)| (*p, r.intercept, r.ar.clone()))
            .collect(),
        x_star_min: xm.value,
        leverage_detected: curve.leverage_detected,
        elasticity: data.map(|d| tar_elasticity(&model, &d.x)).transpose()?,
    };

    let (source, params, returns) = match (data, &config.bekk_model) {
        (Some(d), Some(src)) => (src.clone(), load_bekk(src)?, pair(d)),
        (Some(d), None) => {
            let returns = pair(d);
            let o = &config.fit_bekk;
            let fit = fit_bekk(&returns, o.p, &FitConfig { optimizer: o.optimizer, init: o.init.clone(), h0: None })?;
            ("fitted".to_string(), fit.params, returns)
        }
        (None, src) => {
            let src = src.clone().unwrap_or_else(|| "bovespa-bekk".to_string());
            let params = load_bekk(&src)?;
            let o = &config.compare;
            let path = simulate_bekk(&params, o.sim_len, o.burn_in, config.seed)?;
            (format!("{src} (simulated, {} steps)", o.sim_len), params, path.returns)
        }
    };
    let h0 = crate::bekk::sample_h0(&returns, params.p)?;
    let filt = bekk_filter(&params, &returns, &h0)?;
    let a1 = filt.residual_series(0);
    let elasticity = match data {
        Some(d) => Some(leverage_elasticity(&filt.volatility(0), &d.x[params.p..])?),
        None => None,
    };
    let mgarch = MgarchSide {
        source,
        unconditional: Unconditional { mean: mean(&a1), variance: variance(&a1), skewness: skewness(&a1), kurtosis: kurtosis(&a1) },
        mean_intercept: params.mu[0],
        mean_coefficients: params.gamma.iter().map(|g| g[0]).collect(),
        variance: nis_equations(&params).sigma11,
        mean_covariance: filt.mean_covariance(),
        elasticity,
    };
    out.write_json("compare.json", &CompareReport { tar, mgarch })
}
