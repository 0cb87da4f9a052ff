#include "regretlab/information.hpp"

#include <algorithm>
#include <cmath>

namespace regretlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double gauss_log_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
}

// ln prior(x) + ln f_a(y|x): the unnormalized posterior log density.
double joint_log(const ChannelModel& ch, double y, double x) {
    return ch.input().log_density(x) + likelihood_log(ch, y, x);
}

// Exact log difference of the likelihood logs between gains, factored so
// that no catastrophic cancellation occurs for a_hat near a.
double likelihood_log_diff(const ChannelModel& ch, double a_hat, double y, double x) {
    const double a = ch.gain();
    // (y - a x)^2 - (y - ah x)^2 = (ah - a) x (2y - (a + ah) x)
    return (a_hat - a) * x * (2.0 * y - (a + a_hat) * x) / (2.0 * ch.noise_var());
}

std::vector<std::pair<double, double>> merged_x_segments(const ChannelModel& ch_a,
                                                         const ChannelModel& ch_b,
                                                         double y, double tail) {
    auto wins = x_windows(ch_a, y);
    const auto more = x_windows(ch_b, y);
    wins.insert(wins.end(), more.begin(), more.end());
    std::vector<std::pair<double, double>> segs;
    segs.reserve(wins.size());
    for (const auto& w : wins)
        segs.emplace_back(w.center - tail * w.scale, w.center + tail * w.scale);
    std::sort(segs.begin(), segs.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& s : segs) {
        if (!merged.empty() && s.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, s.second);
        else
            merged.push_back(s);
    }
    return merged;
}

// Normalized posterior atom log-weights for a discrete prior.
std::vector<double> discrete_posterior_logw(const ChannelModel& ch, double y) {
    std::vector<double> logw;
    for (const auto& atom : ch.input().atoms()) {
        if (atom.prob == 0.0) continue;
        logw.push_back(std::log(atom.prob) + likelihood_log(ch, y, atom.value));
    }
    const double lz = log_sum_exp(logw);
    for (double& v : logw) v -= lz;
    return logw;
}

} // namespace

double likelihood_score(const ChannelModel& ch, double y, double x) {
    return x * (y - ch.gain() * x) / ch.noise_var();
}

double marginal_score(const ChannelModel& ch, double y, const QuadratureSpec& spec) {
    return posterior_expect(ch, y, [&](double x) { return likelihood_score(ch, y, x); },
                            spec);
}

double score_x_given_y(const ChannelModel& ch, double x, double y,
                       const QuadratureSpec& spec) {
    return likelihood_score(ch, y, x) - marginal_score(ch, y, spec);
}

double fisher_x_given_y_at(const ChannelModel& ch, double y,
                           const QuadratureSpec& spec) {
    const double mu = marginal_score(ch, y, spec);
    return posterior_expect(
        ch, y,
        [&](double x) {
            const double s = likelihood_score(ch, y, x) - mu;
            return s * s;
        },
        spec);
}

double fisher_x_given_y_avg(const ChannelModel& ch, const QuadratureSpec& spec) {
    const QuadratureSpec inner = spec.inner();
    return expect_y(ch, [&](double y) { return fisher_x_given_y_at(ch, y, inner); },
                    spec);
}

double fisher_y(const ChannelModel& ch, const QuadratureSpec& spec) {
    const QuadratureSpec inner = spec.inner();
    return expect_y(ch,
                    [&](double y) {
                        const double s = marginal_score(ch, y, inner);
                        return s * s;
                    },
                    spec);
}

double fisher_y_given_x(const ChannelModel& ch) {
    if (!ch.input().zero_mean())
        throw NotZeroMeanError(
            "fisher_y_given_x: identity E[X^2]/sv2 is claimed for zero-mean inputs");
    return ch.input().second_moment() / ch.noise_var();
}

double fisher_y_given_x_quad(const ChannelModel& ch, const QuadratureSpec& spec) {
    const double a = ch.gain();
    const double sv2 = ch.noise_var();
    const double sv = std::sqrt(sv2);
    const QuadratureSpec inner = spec.inner();
    return expect_prior(
        ch.input(),
        [&](double x) {
            return integrate(
                [&](double y) {
                    const double s = likelihood_score(ch, y, x);
                    return std::exp(gauss_log_pdf(y, a * x, sv2)) * s * s;
                },
                a * x, sv, inner);
        },
        spec);
}

double kl_posteriors(const ChannelModel& ch, double a_hat, double y,
                     const QuadratureSpec& spec) {
    if (!(a_hat > 0.0)) throw InvalidGainError("kl_posteriors: a_hat must be > 0");
    const double a = ch.gain();
    if (a_hat == a) return 0.0;

    if (ch.input().kind() == InputDistribution::Kind::discrete) {
        const auto lw_hat = discrete_posterior_logw(ch.with_gain(a_hat), y);
        const auto lw = discrete_posterior_logw(ch, y);
        double kl = 0.0;
        for (std::size_t i = 0; i < lw.size(); ++i)
            kl += std::exp(lw_hat[i]) * (lw_hat[i] - lw[i]);
        return std::max(kl, 0.0);
    }

    const ChannelModel assumed = ch.with_gain(a_hat);
    auto dlog = [&](double x) { return likelihood_log_diff(ch, a_hat, y, x); };
    // KL = E_hat[dlog] - ln(Z_hat/Z); the prior log-density cancels in dlog.
    const double mean_dlog = posterior_expect(assumed, y, dlog, spec);

    if (std::abs(a_hat - a) <= 0.05 * a) {
        // ln(Z_hat/Z) = log1p(E_a[expm1(dlog)]) keeps full relative precision
        // when the divergence is quadratically small.
        const double c = posterior_expect(
            ch, y, [&](double x) { return std::expm1(dlog(x)); }, spec);
        return mean_dlog - std::log1p(c);
    }
    const double log_z_hat = marginal_log(assumed, y, spec);
    const double log_z = marginal_log(ch, y, spec);
    return mean_dlog - (log_z_hat - log_z);
}

double hellinger_sq_posteriors(const ChannelModel& ch, double a_hat, double y,
                               const QuadratureSpec& spec) {
    if (!(a_hat > 0.0))
        throw InvalidGainError("hellinger_sq_posteriors: a_hat must be > 0");
    const double a = ch.gain();
    if (a_hat == a) return 0.0;

    if (ch.input().kind() == InputDistribution::Kind::discrete) {
        const auto lw_hat = discrete_posterior_logw(ch.with_gain(a_hat), y);
        const auto lw = discrete_posterior_logw(ch, y);
        double sum = 0.0;
        for (std::size_t i = 0; i < lw.size(); ++i) {
            const double d = std::exp(0.5 * lw_hat[i]) - std::exp(0.5 * lw[i]);
            sum += d * d;
        }
        return std::min(0.5 * sum, 1.0);
    }

    const ChannelModel assumed = ch.with_gain(a_hat);
    const double log_z_hat = marginal_log(assumed, y, spec.inner());
    const double log_z = marginal_log(ch, y, spec.inner());
    // 1/2 int (sqrt(p_hat) - sqrt(p))^2 dx: nonnegative integrand, so the
    // small-divergence case costs no cancellation against the total mass.
    double sum = 0.0;
    for (const auto& [lo, hi] : merged_x_segments(ch, assumed, y, spec.tail_sigmas)) {
        sum += integrate_interval(
            [&](double x) {
                const double d = std::exp(0.5 * (joint_log(assumed, y, x) - log_z_hat)) -
                                 std::exp(0.5 * (joint_log(ch, y, x) - log_z));
                return d * d;
            },
            lo, hi, spec);
    }
    return std::min(0.5 * sum, 1.0);
}

FisherReport make_fisher_report(const ChannelModel& ch, const QuadratureSpec& spec,
                                bool with_per_y_samples) {
    FisherReport r;
    r.a = ch.gain();
    r.fisher_x_given_Y_avg = fisher_x_given_y_avg(ch, spec);
    r.fisher_y = fisher_y(ch, spec);
    r.fisher_y_given_x = fisher_y_given_x(ch);
    if (with_per_y_samples) {
        std::vector<std::pair<double, double>> samples;
        const QuadratureSpec inner = spec.inner();
        for (const auto& win : y_windows(ch)) {
            for (int i = -20; i <= 20; ++i) {
                const double y = win.center + win.scale * (spec.tail_sigmas * i / 20.0);
                samples.emplace_back(y, fisher_x_given_y_at(ch, y, inner));
            }
        }
        std::sort(samples.begin(), samples.end());
        r.per_y_samples = std::move(samples);
    }
    return r;
}

namespace closed {

double fisher_cond_at(const ChannelModel& ch, double y) {
    if (!gaussian_prior(ch))
        throw std::invalid_argument("closed::fisher_cond_at: requires a Gaussian prior");
    // With X|y ~ N(m, v): Var[X(y - aX)/sv2] = v [(y - 2am)^2 + 2 a^2 v] / sv2^2.
    const double a = ch.gain();
    const double v = gaussian_posterior_var(ch);
    const double m = closed::posterior_mean(ch, y);
    const double sv2 = ch.noise_var();
    const double t = y - 2.0 * a * m;
    return v * (t * t + 2.0 * a * a * v) / (sv2 * sv2);
}

double fisher_y(const ChannelModel& ch) {
    if (!gaussian_prior(ch))
        throw std::invalid_argument("closed::fisher_y: requires a Gaussian prior");
    const double a = ch.gain();
    const double sx2 = ch.input().variance();
    const double mu = ch.input().mean();
    const double s = a * a * sx2 + ch.noise_var();
    return mu * mu / s + 2.0 * a * a * sx2 * sx2 / (s * s);
}

double fisher_avg(const ChannelModel& ch) {
    if (!gaussian_prior(ch))
        throw std::invalid_argument("closed::fisher_avg: requires a Gaussian prior");
    const double a = ch.gain();
    const double sx2 = ch.input().variance();
    const double mu = ch.input().mean();
    const double sv2 = ch.noise_var();
    const double s = a * a * sx2 + sv2;
    const double v = sx2 * sv2 / s;
    const double c = a * sx2 / s;
    const double d = mu * sv2 / s;
    // E[(Y - 2aM)^2] for M = cY + d, with E[Y] = a mu and E[Y^2] = s + a^2 mu^2.
    const double slope = 1.0 - 2.0 * a * c;
    const double ey = a * mu;
    const double ey2 = s + ey * ey;
    const double t2 = slope * slope * ey2 - 4.0 * a * d * slope * ey + 4.0 * a * a * d * d;
    return v * (t2 + 2.0 * a * a * v) / (sv2 * sv2);
}

double kl(const ChannelModel& ch, double a_hat, double y) {
    if (!gaussian_prior(ch))
        throw std::invalid_argument("closed::kl: requires a Gaussian prior");
    const ChannelModel assumed = ch.with_gain(a_hat);
    const double m1 = closed::posterior_mean(assumed, y);
    const double v1 = gaussian_posterior_var(assumed);
    const double m2 = closed::posterior_mean(ch, y);
    const double v2 = gaussian_posterior_var(ch);
    return 0.5 * (std::log(v2 / v1) + v1 / v2 + (m1 - m2) * (m1 - m2) / v2 - 1.0);
}

double hellinger_sq(const ChannelModel& ch, double a_hat, double y) {
    if (!gaussian_prior(ch))
        throw std::invalid_argument("closed::hellinger_sq: requires a Gaussian prior");
    const ChannelModel assumed = ch.with_gain(a_hat);
    const double m1 = closed::posterior_mean(assumed, y);
    const double v1 = gaussian_posterior_var(assumed);
    const double m2 = closed::posterior_mean(ch, y);
    const double v2 = gaussian_posterior_var(ch);
    const double bc = std::sqrt(2.0 * std::sqrt(v1 * v2) / (v1 + v2)) *
                      std::exp(-(m1 - m2) * (m1 - m2) / (4.0 * (v1 + v2)));
    return 1.0 - bc;
}

} // namespace closed

} // namespace regretlab
