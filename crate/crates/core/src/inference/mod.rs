//! Estimation and checking of TAR models from data.

pub mod gibbs;
pub mod identify;
pub mod likelihood;
pub mod nonlinearity;
pub mod validate;

pub use gibbs::{fit_gibbs, CoefPrior, GibbsConfig, ParamSummary, PosteriorDraws, PriorSpec};
pub use identify::{
    fit_least_squares, identify_structure, CandidateScore, IdentificationReport, StructureCandidate, ThresholdGrid,
};
pub use likelihood::{conditional_log_likelihood, pseudo_residuals};
pub use nonlinearity::{nonlinearity_test, DelayResult, NonlinearityTest};
pub use validate::{
    acf, acf_pacf, arch_lm, cusum_tests, jarque_bera, ljung_box, pacf, validate, AcfPacf, CusumReport, TestResult,
    ValidationReport,
};
