#pragma once

#include <span>

#include "regretlab/regret.hpp"

namespace regretlab {

// Blind channel-gain estimator acting on past outputs only.
struct GainEstimator {
    enum class Kind { moment_matching, numerical_mle };
    Kind kind = Kind::numerical_mle;
    double bracket_lo = 1e-3;
    double bracket_hi = 1e3;
    double tol = 1e-8;

    void validate() const;
};

struct EfficiencyReport {
    std::size_t n = 0;
    std::size_t trials = 0;
    double mean_estimate = 0.0;
    double empirical_bias = 0.0;
    double bias_stderr = 0.0;
    double empirical_var = 0.0;
    double crb = 0.0;
    double efficiency_ratio = 0.0;  // crb / empirical_var
    std::size_t degenerate_trials = 0;
};

struct McRegret {
    double abs_mean = 0.0;
    double abs_stderr = 0.0;
    double rel_mean = 0.0;
    double rel_stderr = 0.0;
    std::size_t trials_used = 0;
    std::size_t degenerate_trials = 0;
};

// Estimates the gain from outputs. Moment matching inverts
// E[Y^2] = a^2 E[X^2] + sv2 (zero-mean priors only) and reports a
// DegenerateSampleError when the sample falls below the noise floor instead
// of clamping into the parameter space. The MLE maximizes the exact marginal
// log likelihood over the bracket.
double estimate_gain(const GainEstimator& est, const InputDistribution& prior,
                     double noise_var, std::span<const double> ys);

// 1 / ((n-1) I(Y;a)): the best variance an unbiased estimator of the gain
// can reach from n-1 past outputs.
double crb(const ChannelModel& ch, std::size_t n, const QuadratureSpec& spec = {});

// Expected-regret ceilings for an efficient estimator at sample size n.
double lemma2_bound_rhs(const ChannelModel& ch, std::size_t n,
                        const QuadratureSpec& spec = {});
double lemma4_rregret_bound_rhs(const ChannelModel& ch, std::size_t n,
                                const QuadratureSpec& spec = {});

// Monte Carlo over trials: draw n-1 outputs, estimate the gain, evaluate the
// exact regrets at that estimate, average. Trials whose estimate degenerates
// are counted and excluded. Deterministic for a fixed seed; trial t uses
// substream (seed, t) so the aggregate does not depend on scheduling.
McRegret expected_regret_mc(const ChannelModel& ch, const GainEstimator& est,
                            std::size_t n, std::size_t trials, std::uint64_t seed,
                            const QuadratureSpec& spec = {});

EfficiencyReport efficiency_experiment(const ChannelModel& ch, const GainEstimator& est,
                                       std::size_t n, std::size_t trials,
                                       std::uint64_t seed,
                                       const QuadratureSpec& spec = {});

} // namespace regretlab
