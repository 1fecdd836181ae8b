//! Numerical estimators for smoothing exponents, long-time rates, product
//! estimates and singular weights.

mod decay;
mod longtime;
mod probes;
mod products;
mod singular;

pub use decay::{
    default_n_pow, default_t_list, fit_decay_exponent, sigma, weight_quotient_norm, DecayFitResult, QuotientForm,
    WeightQuotientParams,
};
pub use longtime::{
    longtime_rate, probe_bound_with, probe_operator_bound, source_norms, spectral_sum_bound, ProbeBound, RateFit,
};
pub use probes::{
    band_limit, fifty_probe_family, mixed_corpus, packet_pairs, probe_corpus, random_packets, GaussianPacket,
    DEFAULT_PROBE_SEED,
};
pub use products::{
    algebra_ratio, check_multilinear_exponents, multilinear_ratio, sobolev_modulation_equivalence, EquivalenceBand,
};
pub use singular::{
    local_singular_part, singular_frequency_growth, singular_weight_norm, truncated_singular_weight, TruncationTrend,
};
