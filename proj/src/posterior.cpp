#include "regretlab/posterior.hpp"

#include <cmath>
#include <numbers>

namespace regretlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double gauss_log_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
}

// E[g(X) | Y=y] with the log marginal already known.
double posterior_expect_with_marginal(const ChannelModel& ch, double y, const Fn& g,
                                      double log_marginal_value,
                                      const QuadratureSpec& spec) {
    const auto& prior = ch.input();
    if (prior.kind() == InputDistribution::Kind::discrete) {
        double sum = 0.0;
        for (const auto& atom : prior.atoms()) {
            if (atom.prob == 0.0) continue;
            const double lw = std::log(atom.prob) + likelihood_log(ch, y, atom.value) -
                              log_marginal_value;
            sum += std::exp(lw) * g(atom.value);
        }
        return sum;
    }
    const auto windows = x_windows(ch, y);
    double sum = 0.0;
    std::size_t wi = 0;
    for (const auto& c : prior.components()) {
        if (c.weight == 0.0) continue;
        const auto& win = windows[wi++];
        auto posterior_term = [&](double x) {
            return std::exp(std::log(c.weight) + gauss_log_pdf(x, c.mean, c.var) +
                            likelihood_log(ch, y, x) - log_marginal_value);
        };
        sum += integrate([&](double x) { return posterior_term(x) * g(x); },
                         win.center, win.scale, spec);
    }
    return sum;
}

} // namespace

double posterior_expect(const ChannelModel& ch, double y, const Fn& g,
                        const QuadratureSpec& spec) {
    return posterior_expect_with_marginal(ch, y, g, marginal_log(ch, y, spec), spec);
}

double posterior_mean(const ChannelModel& ch, double y, const QuadratureSpec& spec) {
    return posterior_expect(ch, y, [](double x) { return x; }, spec);
}

double posterior_second_moment(const ChannelModel& ch, double y,
                               const QuadratureSpec& spec) {
    return posterior_expect(ch, y, [](double x) { return x * x; }, spec);
}

PosteriorSummary summarize_posterior(const ChannelModel& ch, double y,
                                     const QuadratureSpec& spec) {
    PosteriorSummary s;
    s.y = y;
    s.gain_used = ch.gain();
    s.log_marginal = marginal_log(ch, y, spec);
    s.mean = posterior_expect_with_marginal(ch, y, [](double x) { return x; },
                                            s.log_marginal, spec);
    s.second_moment = posterior_expect_with_marginal(
        ch, y, [](double x) { return x * x; }, s.log_marginal, spec);
    return s;
}

double mismatched_estimate(const ChannelModel& ch_true, double a_hat, double y,
                           const QuadratureSpec& spec) {
    if (!(a_hat > 0.0))
        throw InvalidGainError("mismatched_estimate: a_hat must be > 0");
    return posterior_mean(ch_true.with_gain(a_hat), y, spec);
}

double mse(const ChannelModel& ch, double estimator_gain, const MseMethod& method,
           const QuadratureSpec& spec) {
    if (!(estimator_gain > 0.0)) throw InvalidGainError("mse: estimator_gain must be > 0");

    if (method.kind == MseMethod::Kind::quadrature) {
        const ChannelModel assumed = ch.with_gain(estimator_gain);
        const QuadratureSpec inner = spec.inner();
        return expect_y(ch,
                        [&](double y) {
                            const auto truth = summarize_posterior(ch, y, inner);
                            const double est =
                                (estimator_gain == ch.gain())
                                    ? truth.mean
                                    : posterior_mean(assumed, y, inner);
                            return truth.second_moment - 2.0 * est * truth.mean +
                                   est * est;
                        },
                        spec);
    }

    if (method.n < 1) throw std::invalid_argument("mse: monte carlo needs n >= 1");
    const ChannelModel assumed = ch.with_gain(estimator_gain);
    // Fixed chunking keeps the sum independent of scheduling.
    const std::size_t chunks = std::min<std::size_t>(256, method.n);
    double total = 0.0;
    std::size_t done = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t count = method.n / chunks + (c < method.n % chunks ? 1 : 0);
        Rng rng = Rng::substream(method.seed, c);
        const double noise_sd = std::sqrt(ch.noise_var());
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            // Draw (x, y) from the true channel; evaluate the estimator exactly.
            const double x = draw_input(ch.input(), rng);
            const double y = ch.gain() * x + noise_sd * rng.next_normal();
            const double est = closed::posterior_mean(assumed, y);
            acc += (x - est) * (x - est);
        }
        total += acc;
        done += count;
    }
    return total / static_cast<double>(done);
}

namespace closed {

bool gaussian_prior(const ChannelModel& ch) {
    return ch.input().kind() == InputDistribution::Kind::gaussian;
}

double gaussian_gain_coeff(const ChannelModel& ch) {
    const double a = ch.gain();
    const double sx2 = ch.input().variance();
    return a * sx2 / (a * a * sx2 + ch.noise_var());
}

double gaussian_posterior_var(const ChannelModel& ch) {
    const double a = ch.gain();
    const double sx2 = ch.input().variance();
    return sx2 * ch.noise_var() / (a * a * sx2 + ch.noise_var());
}

std::vector<PosteriorComponent> posterior_components(const ChannelModel& ch, double y) {
    const auto& prior = ch.input();
    const double a = ch.gain();
    const double sv2 = ch.noise_var();
    std::vector<PosteriorComponent> out;
    std::vector<double> logw;

    if (prior.kind() == InputDistribution::Kind::discrete) {
        for (const auto& atom : prior.atoms()) {
            if (atom.prob == 0.0) continue;
            logw.push_back(std::log(atom.prob) + likelihood_log(ch, y, atom.value));
            out.push_back({0.0, atom.value, 0.0});
        }
    } else {
        for (const auto& c : prior.components()) {
            if (c.weight == 0.0) continue;
            // Conjugate update: evidence weight times Gaussian posterior.
            const double evidence_var = a * a * c.var + sv2;
            logw.push_back(std::log(c.weight) + gauss_log_pdf(y, a * c.mean, evidence_var));
            const double prec = 1.0 / c.var + a * a / sv2;
            const double m = (c.mean / c.var + a * y / sv2) / prec;
            out.push_back({0.0, m, 1.0 / prec});
        }
    }
    const double lz = log_sum_exp(logw);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].log_weight = logw[i] - lz;
    return out;
}

double log_marginal(const ChannelModel& ch, double y) {
    const auto& prior = ch.input();
    const double a = ch.gain();
    const double sv2 = ch.noise_var();
    std::vector<double> terms;
    if (prior.kind() == InputDistribution::Kind::discrete) {
        for (const auto& atom : prior.atoms())
            if (atom.prob > 0.0)
                terms.push_back(std::log(atom.prob) + likelihood_log(ch, y, atom.value));
    } else {
        for (const auto& c : prior.components())
            if (c.weight > 0.0)
                terms.push_back(std::log(c.weight) +
                                gauss_log_pdf(y, a * c.mean, a * a * c.var + sv2));
    }
    return log_sum_exp(terms);
}

double posterior_mean(const ChannelModel& ch, double y) {
    double sum = 0.0;
    for (const auto& c : posterior_components(ch, y))
        sum += std::exp(c.log_weight) * c.mean;
    return sum;
}

double posterior_second_moment(const ChannelModel& ch, double y) {
    double sum = 0.0;
    for (const auto& c : posterior_components(ch, y))
        sum += std::exp(c.log_weight) * (c.var + c.mean * c.mean);
    return sum;
}

double mse(const ChannelModel& ch, double estimator_gain) {
    if (!gaussian_prior(ch))
        throw std::invalid_argument("closed::mse: closed form requires a Gaussian prior");
    // phi_g is affine: c_g y + d_g. Then X - phi_g(Y) = (1 - c_g a) X - c_g V - d_g.
    const double a = ch.gain();
    const double g = estimator_gain;
    const double sx2 = ch.input().variance();
    const double mu = ch.input().mean();
    const double sv2 = ch.noise_var();
    const double cg = g * sx2 / (g * g * sx2 + sv2);
    const double dg = mu * sv2 / (g * g * sx2 + sv2);
    const double bias = (1.0 - cg * a) * mu - dg;
    const double var = (1.0 - cg * a) * (1.0 - cg * a) * sx2 + cg * cg * sv2;
    return var + bias * bias;
}

} // namespace closed

} // namespace regretlab
