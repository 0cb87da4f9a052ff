#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regretlab/numerics.hpp"

namespace regretlab {

// One Gaussian component (weight, mean, var) or one atom (prob, value).
struct PriorComponent {
    double weight = 1.0;
    double mean = 0.0;
    double var = 1.0;  // unused for discrete atoms
};

struct Atom {
    double prob = 1.0;
    double value = 0.0;
};

// The known input prior P_X. Immutable after construction; the factory
// functions validate weights/variances up front.
class InputDistribution {
public:
    enum class Kind { gaussian, gaussian_mixture, discrete };

    static InputDistribution gaussian(double mean, double var);
    static InputDistribution gaussian_mixture(std::vector<PriorComponent> components);
    static InputDistribution discrete(std::vector<Atom> atoms);

    Kind kind() const { return kind_; }
    bool is_continuous() const { return kind_ != Kind::discrete; }

    double mean() const { return mean_; }
    double variance() const { return var_; }
    double second_moment() const { return var_ + mean_ * mean_; }
    bool zero_mean() const { return mean_ == 0.0; }

    // Support bounds at `tail_sigmas` standard deviations per component
    // (exact atom range for discrete priors).
    std::pair<double, double> support(double tail_sigmas = 10.0) const;

    const std::vector<PriorComponent>& components() const { return components_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    // Log density of a continuous prior (log-sum-exp over components).
    double log_density(double x) const;

    std::string describe() const;

private:
    InputDistribution() = default;
    Kind kind_ = Kind::gaussian;
    std::vector<PriorComponent> components_;  // continuous kinds
    std::vector<Atom> atoms_;                 // discrete kind
    double mean_ = 0.0;
    double var_ = 1.0;
};

// Gain-a AWGN channel: Y = a X + V with V ~ N(0, noise_var).
class ChannelModel {
public:
    ChannelModel(double gain, double noise_var, InputDistribution input);

    double gain() const { return gain_; }
    double noise_var() const { return noise_var_; }
    const InputDistribution& input() const { return input_; }

    double snr() const { return input_.variance() / noise_var_; }

    // Same prior and noise, different gain.
    ChannelModel with_gain(double gain) const { return {gain, noise_var_, input_}; }

private:
    double gain_;
    double noise_var_;
    InputDistribution input_;
};

struct SampleBatch {
    std::vector<double> xs;
    std::vector<double> ys;
    std::uint64_t seed = 0;
    ChannelModel channel;
};

// ln f_a(y | x): exact Gaussian log conditional density.
double likelihood_log(const ChannelModel& ch, double y, double x);

// ln f_a(y): quadrature over the prior for continuous kinds, exact
// log-sum-exp for discrete kinds.
double marginal_log(const ChannelModel& ch, double y, const QuadratureSpec& spec = {});

SampleBatch sample(const ChannelModel& ch, std::size_t n, std::uint64_t seed);

class Rng;

// One draw from the prior (inverse-CDF over components/atoms).
double draw_input(const InputDistribution& prior, Rng& rng);

// Deterministic 64-bit generator. Substreams come from the SplitMix64 mixer
// applied to seed XOR stream-index, so parallel Monte Carlo trials are
// order-independent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed)) {}

    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed ^ index);
    }

    std::uint64_t next_u64();
    double next_unit();    // uniform in (0, 1)
    double next_normal();  // standard normal, Box-Muller

private:
    static std::uint64_t mix(std::uint64_t z);
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// --- integration geometry -------------------------------------------------
//
// Every integral in the library is a sum of per-component integrals against a
// Gaussian-shaped factor. A window records where one such term lives.
struct GaussWindow {
    double center = 0.0;
    double scale = 1.0;
};

// Windows of the Y marginal: one per prior component / atom.
std::vector<GaussWindow> y_windows(const ChannelModel& ch);

// Windows of the x-integrand f_a(y|x) * (prior component i): the
// prior-times-likelihood product is Gaussian-shaped with these parameters.
std::vector<GaussWindow> x_windows(const ChannelModel& ch, double y);

// E_prior[g(X)]: per-component quadrature (continuous) or exact sum (discrete).
double expect_prior(const InputDistribution& prior, const Fn& g,
                    const QuadratureSpec& spec = {});

// ln of the i-th term of the Y marginal: w_i * integral of N_i(x) f(y|x) dx
// for continuous priors, p_i * f(y|atom_i) for discrete ones. The full
// marginal is the log-sum-exp of these over i.
double marginal_component_log(const ChannelModel& ch, std::size_t i, double y,
                              const QuadratureSpec& spec = {});

// E[h(Y)] under the channel's output marginal. Gauss-Hermite evaluates each
// component window against its own Gaussian weight; adaptive Simpson
// integrates h * exp(marginal_log) over merged window segments.
double expect_y(const ChannelModel& ch, const Fn& h, const QuadratureSpec& spec = {});

} // namespace regretlab
