//! Method-of-types toolkit for Bayesian multiple hypothesis testing over
//! finite alphabets.
//!
//! The numeric modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar. The Monte Carlo [`harness`] works in `f64`.

pub mod decide;
pub mod error;
pub mod exponents;
pub mod format;
pub mod harness;
pub mod quantize;
pub mod robustify;
pub mod scalar;
pub mod simplex;
pub mod types;

pub use decide::{
    dgl_decide, dgl_decide_counted, dgl_decide_type, map_decide, map_decide_type, nn_decide,
    nn_decide_sequence_counted, robust_decide, robust_decide_sequence_counted,
    scheffe_tournament_decide, Decision, HypothesisSet, OpCount,
};
pub use error::{Error, Result};
pub use exponents::{
    classical_bound, exponent_report, min_over_types, per_type_exponent, ratio_curve,
    write_ratio_csv, Bound, ExponentReport, RatioPoint,
};
pub use format::format_sig;
pub use harness::{
    empirical_exponent, run_experiment, run_experiment_with_threads, run_trial,
    write_summaries_csv, ExperimentPlan, Rule, RunSummary, TrialRecord,
};
pub use quantize::{
    quantization_radius, quantize_all, quantize_distribution, QuantizationRadius, QuantizerSpec,
};
pub use robustify::{
    build_robust_model, dgl_exponent, nominal_from_training, positivity_check, representative,
    robust_bound, robust_log_bound, robust_log_bound_entropic, training_bound, Positivity,
    RobustModel,
};
pub use scalar::Real;
pub use simplex::{
    chernoff_information, entropy, kl_divergence, min_pairwise_chernoff, sason_lower_bound, tilted,
    variational_distance, Chernoff, Distribution, PairwiseChernoff,
};
pub use types::{
    enumerate_types, sample_sequence, sequence_log_prob, type_class_count, type_class_size,
    type_of, InverseCdf, SymbolSequence, TypeClassSize, TypeEnumeration, TypeVector,
};

pub type DistributionF64 = Distribution<f64>;
pub type DistributionF32 = Distribution<f32>;
pub type HypothesisSetF64 = HypothesisSet<f64>;
pub type HypothesisSetF32 = HypothesisSet<f32>;
pub type RobustModelF64 = RobustModel<f64>;
pub type RobustModelF32 = RobustModel<f32>;
pub type DecisionF64 = Decision<f64>;
pub type DecisionF32 = Decision<f32>;
pub type BoundF64 = Bound<f64>;
pub type BoundF32 = Bound<f32>;
