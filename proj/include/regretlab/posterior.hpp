#pragma once

#include <cstdint>

#include "regretlab/model.hpp"

namespace regretlab {

// Posterior of X at one observation, under one assumed gain.
struct PosteriorSummary {
    double y = 0.0;
    double gain_used = 0.0;
    double mean = 0.0;           // E[X | Y=y] under the assumed gain
    double second_moment = 0.0;  // E[X^2 | Y=y]
    double log_marginal = 0.0;   // ln f_gain(y)
};

// E[g(X) | Y=y]: per-component quadrature for continuous priors, exact
// normalized weights for discrete ones.
double posterior_expect(const ChannelModel& ch, double y, const Fn& g,
                        const QuadratureSpec& spec = {});

double posterior_mean(const ChannelModel& ch, double y, const QuadratureSpec& spec = {});
double posterior_second_moment(const ChannelModel& ch, double y,
                               const QuadratureSpec& spec = {});
PosteriorSummary summarize_posterior(const ChannelModel& ch, double y,
                                     const QuadratureSpec& spec = {});

// phi_{a_hat}(y): the MMSE estimate computed under gain a_hat while the data
// comes from ch_true. a_hat must be positive.
double mismatched_estimate(const ChannelModel& ch_true, double a_hat, double y,
                           const QuadratureSpec& spec = {});

struct MseMethod {
    enum class Kind { quadrature, monte_carlo };
    Kind kind = Kind::quadrature;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    static MseMethod quadrature() { return {}; }
    static MseMethod monte_carlo(std::size_t n, std::uint64_t seed) {
        return {Kind::monte_carlo, n, seed};
    }
};

// E[(X - phi_g(Y))^2] under the true channel, where g = estimator_gain.
// The Monte Carlo path evaluates the estimator in closed form and averages
// over a fixed number of seeded chunks, so the result does not depend on how
// the chunks are scheduled across threads.
double mse(const ChannelModel& ch, double estimator_gain, const MseMethod& method,
           const QuadratureSpec& spec = {});

// Exact conjugate-algebra path, available for every supported prior kind.
// Kept public, alongside the quadrature path, so tests can diff the two.
namespace closed {

struct PosteriorComponent {
    double log_weight = 0.0;  // normalized: sum of exp(log_weight) is 1
    double mean = 0.0;
    double var = 0.0;  // 0 for discrete atoms
};

std::vector<PosteriorComponent> posterior_components(const ChannelModel& ch, double y);

double log_marginal(const ChannelModel& ch, double y);
double posterior_mean(const ChannelModel& ch, double y);
double posterior_second_moment(const ChannelModel& ch, double y);

// Pure-Gaussian-prior forms from the linear estimator algebra.
bool gaussian_prior(const ChannelModel& ch);
double gaussian_gain_coeff(const ChannelModel& ch);     // a*sx2 / (a^2*sx2 + sv2)
double gaussian_posterior_var(const ChannelModel& ch);  // sx2*sv2 / (a^2*sx2 + sv2)
double mse(const ChannelModel& ch, double estimator_gain);

} // namespace closed

} // namespace regretlab
