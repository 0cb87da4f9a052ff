#include "regretlab/regret.hpp"

#include <cmath>
#include <numbers>

namespace regretlab {

namespace {

void check_gain(double a_hat, const char* where) {
    if (!(a_hat > 0.0)) throw InvalidGainError(std::string(where) + ": a_hat must be > 0");
}

} // namespace

double absolute_regret(const ChannelModel& ch, double a_hat, const MseMethod& method,
                       const QuadratureSpec& spec) {
    check_gain(a_hat, "absolute_regret");
    if (a_hat == ch.gain()) return 0.0;
    const ChannelModel assumed = ch.with_gain(a_hat);

    if (method.kind == MseMethod::Kind::quadrature) {
        const QuadratureSpec inner = spec.inner();
        return expect_y(ch,
                        [&](double y) {
                            const double gap = posterior_mean(assumed, y, inner) -
                                               posterior_mean(ch, y, inner);
                            return gap * gap;
                        },
                        spec);
    }
    if (method.n < 1) throw std::invalid_argument("absolute_regret: monte carlo needs n >= 1");
    double total = 0.0;
    const std::size_t chunks = std::min<std::size_t>(256, method.n);
    std::size_t done = 0;
    const double noise_sd = std::sqrt(ch.noise_var());
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t count = method.n / chunks + (c < method.n % chunks ? 1 : 0);
        Rng rng = Rng::substream(method.seed, c);
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double x = draw_input(ch.input(), rng);
            const double y = ch.gain() * x + noise_sd * rng.next_normal();
            const double d = closed::posterior_mean(assumed, y) -
                             closed::posterior_mean(ch, y);
            acc += d * d;
        }
        total += acc;
        done += count;
    }
    return total / static_cast<double>(done);
}

RegretForms absolute_regret_forms(const ChannelModel& ch, double a_hat,
                                  const MseMethod& method, const QuadratureSpec& spec) {
    check_gain(a_hat, "absolute_regret_forms");
    RegretForms f;
    f.gap_form = absolute_regret(ch, a_hat, method, spec);
    f.mse_diff_form = mse(ch, a_hat, method, spec) - mse(ch, ch.gain(), method, spec);
    return f;
}

McGap orthogonality_gap_mc(const ChannelModel& ch, double a_hat, std::size_t n,
                           std::uint64_t seed) {
    check_gain(a_hat, "orthogonality_gap_mc");
    if (n < 2) throw std::invalid_argument("orthogonality_gap_mc: n must be >= 2");
    const ChannelModel assumed = ch.with_gain(a_hat);
    const double noise_sd = std::sqrt(ch.noise_var());
    double sum = 0.0, sumsq = 0.0;
    const std::size_t chunks = std::min<std::size_t>(256, n);
    std::size_t done = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t count = n / chunks + (c < n % chunks ? 1 : 0);
        Rng rng = Rng::substream(seed, c);
        for (std::size_t i = 0; i < count; ++i) {
            const double x = draw_input(ch.input(), rng);
            const double y = ch.gain() * x + noise_sd * rng.next_normal();
            const double phi_hat = closed::posterior_mean(assumed, y);
            const double phi = closed::posterior_mean(ch, y);
            const double d = (x - phi_hat) * (x - phi_hat) - (x - phi) * (x - phi) -
                             (phi_hat - phi) * (phi_hat - phi);
            sum += d;
            sumsq += d * d;
        }
        done += count;
    }
    const double dn = static_cast<double>(done);
    McGap g;
    g.mean = sum / dn;
    const double var = std::max(0.0, sumsq / dn - g.mean * g.mean);
    g.stderr_ = std::sqrt(var / dn);
    return g;
}

double relative_regret(const ChannelModel& ch, double a_hat, const QuadratureSpec& spec) {
    check_gain(a_hat, "relative_regret");
    if (!(ch.input().variance() > 0.0))
        throw DegeneratePriorError("relative_regret: prior variance is zero");
    if (a_hat == ch.gain()) return 0.0;
    const ChannelModel assumed = ch.with_gain(a_hat);
    const QuadratureSpec inner = spec.inner();
    return expect_y(ch,
                    [&](double y) {
                        const auto s_hat = summarize_posterior(assumed, y, inner);
                        const auto s = summarize_posterior(ch, y, inner);
                        const double num = (s_hat.mean - s.mean) * (s_hat.mean - s.mean);
                        return num / (s_hat.second_moment + s.second_moment);
                    },
                    spec);
}

double lemma1_weight_expectation(const ChannelModel& ch, const QuadratureSpec& spec) {
    const double sx2 = ch.input().variance();
    const double a2 = ch.gain() * ch.gain();
    const QuadratureSpec inner = spec.inner();
    return expect_y(ch,
                    [&](double y) {
                        return (6.0 * sx2 + 8.0 * y * y / a2) *
                               fisher_x_given_y_at(ch, y, inner);
                    },
                    spec);
}

double lemma1_bound_rhs(const ChannelModel& ch, double a_hat, const QuadratureSpec& spec) {
    check_gain(a_hat, "lemma1_bound_rhs");
    const double d = a_hat - ch.gain();
    if (d == 0.0) return 0.0;
    return d * d * lemma1_weight_expectation(ch, spec);
}

double lemma1_bound_rhs_eq25(const ChannelModel& ch, double a_hat,
                             const QuadratureSpec& spec) {
    check_gain(a_hat, "lemma1_bound_rhs_eq25");
    const double d = a_hat - ch.gain();
    if (d == 0.0) return 0.0;
    const double sx2 = ch.input().variance();
    const double a2 = ch.gain() * ch.gain();
    const double ah2 = a_hat * a_hat;
    const QuadratureSpec inner = spec.inner();
    const double w = expect_y(
        ch,
        [&](double y) {
            return (6.0 * sx2 + 4.0 * y * y / ah2 + 4.0 * y * y / a2) *
                   fisher_x_given_y_at(ch, y, inner);
        },
        spec);
    return d * d * w;
}

double corollary1_bound_rhs(const ChannelModel& ch, double a_hat,
                            const QuadratureSpec& spec) {
    check_gain(a_hat, "corollary1_bound_rhs");
    const double d = a_hat - ch.gain();
    if (d == 0.0) return 0.0;
    const double sx2 = ch.input().variance();
    const double a2 = ch.gain() * ch.gain();
    return d * d * (14.0 * sx2 + 8.0 * ch.noise_var() / a2) *
           fisher_x_given_y_avg(ch, spec);
}

double fisher_ysq_correlation(const ChannelModel& ch, const QuadratureSpec& spec) {
    const QuadratureSpec inner = spec.inner();
    auto info = [&](double y) { return fisher_x_given_y_at(ch, y, inner); };
    const double e_i = expect_y(ch, info, spec);
    const double e_y2 = expect_y(ch, [](double y) { return y * y; }, spec);
    const double e_iy2 = expect_y(ch, [&](double y) { return info(y) * y * y; }, spec);
    const double var_i = expect_y(
        ch, [&](double y) { const double d = info(y) - e_i; return d * d; }, spec);
    const double var_y2 = expect_y(
        ch, [&](double y) { const double d = y * y - e_y2; return d * d; }, spec);
    // A flat conditional information leaves only quadrature noise in var_i;
    // report zero correlation rather than a noise/noise ratio.
    const double noise_floor = 100.0 * (spec.rel_tol * std::abs(e_i) + spec.abs_tol);
    if (var_i <= noise_floor * noise_floor) return 0.0;
    const double denom = std::sqrt(var_i * var_y2);
    if (denom <= 0.0) return 0.0;
    return (e_iy2 - e_i * e_y2) / denom;
}

double lemma3_bound_rhs(const ChannelModel& ch, double a_hat, const QuadratureSpec& spec) {
    check_gain(a_hat, "lemma3_bound_rhs");
    const double d = a_hat - ch.gain();
    if (d == 0.0) return 0.0;
    return d * d * fisher_x_given_y_avg(ch, spec);
}

PointwiseCheck pointwise_bound_check(const ChannelModel& ch, double a_hat, double y,
                                     const QuadratureSpec& spec) {
    check_gain(a_hat, "pointwise_bound_check");
    PointwiseCheck c;
    if (a_hat == ch.gain()) {
        c.holds = true;
        return c;
    }
    const ChannelModel assumed = ch.with_gain(a_hat);
    const auto s_hat = summarize_posterior(assumed, y, spec);
    const auto s = summarize_posterior(ch, y, spec);
    const double gap = s_hat.mean - s.mean;
    c.lhs = gap * gap;
    c.rhs = 2.0 * (s_hat.second_moment + s.second_moment) *
            kl_posteriors(ch, a_hat, y, spec);
    c.holds = c.lhs <= c.rhs + 1e-9;
    return c;
}

double regret_scalar(const ChannelModel& ch, const QuadratureSpec& spec) {
    const double fy = fisher_y(ch, spec);
    if (fy < 1e-12)
        throw DegenerateFisherError("regret_scalar: output Fisher information is ~0");
    return fisher_x_given_y_avg(ch, spec) / fy;
}

TradeoffReport tradeoff_residual(const ChannelModel& ch, const QuadratureSpec& spec) {
    if (!ch.input().zero_mean())
        throw NotZeroMeanError("tradeoff_residual: identity requires a zero-mean input");
    TradeoffReport t;
    t.a = ch.gain();
    t.fisher_y = fisher_y(ch, spec);
    if (t.fisher_y < 1e-12)
        throw DegenerateFisherError("tradeoff_residual: output Fisher information is ~0");
    t.rho = fisher_x_given_y_avg(ch, spec) / t.fisher_y;
    t.snr = ch.snr();
    t.residual = (t.rho + 1.0) * t.fisher_y - t.snr;
    return t;
}

RegretReport make_regret_report(const ChannelModel& ch, double a_hat,
                                const QuadratureSpec& spec) {
    check_gain(a_hat, "make_regret_report");
    RegretReport r;
    r.a = ch.gain();
    r.a_hat = a_hat;
    r.regret_abs = absolute_regret(ch, a_hat, MseMethod::quadrature(), spec);
    r.regret_rel = relative_regret(ch, a_hat, spec);
    r.lemma1_rhs = lemma1_bound_rhs(ch, a_hat, spec);
    r.lemma1_rhs_eq25 = lemma1_bound_rhs_eq25(ch, a_hat, spec);
    r.corollary1_rhs = corollary1_bound_rhs(ch, a_hat, spec);
    r.lemma3_rhs = lemma3_bound_rhs(ch, a_hat, spec);
    r.corr_fisher_ysq = fisher_ysq_correlation(ch, spec);
    r.slack = std::abs(a_hat - ch.gain()) / ch.gain();
    r.abs_bound_holds = r.regret_abs <= r.lemma1_rhs * (1.0 + r.slack);
    r.rel_bound_holds = r.regret_rel <= r.lemma3_rhs * (1.0 + r.slack);
    r.factor_two_flag =
        !r.abs_bound_holds && r.regret_abs <= 2.0 * r.lemma1_rhs * (1.0 + r.slack);
    const QuadratureSpec inner = spec.inner();
    for (const auto& win : y_windows(ch)) {
        for (int i = -10; i <= 10; ++i) {
            const double y = win.center + win.scale * (spec.tail_sigmas * i / 10.0);
            if (!pointwise_bound_check(ch, a_hat, y, inner).holds) ++r.pointwise_checks;
        }
    }
    return r;
}

namespace closed {

double absolute_regret(const ChannelModel& ch, double a_hat) {
    check_gain(a_hat, "closed::absolute_regret");
    if (!gaussian_prior(ch))
        throw std::invalid_argument("closed::absolute_regret: requires a Gaussian prior");
    // phi_g affine in y: the gap is (dc) Y + (dd).
    const double a = ch.gain();
    const double sx2 = ch.input().variance();
    const double mu = ch.input().mean();
    const double sv2 = ch.noise_var();
    auto coeffs = [&](double g) {
        const double den = g * g * sx2 + sv2;
        return std::pair<double, double>{g * sx2 / den, mu * sv2 / den};
    };
    const auto [c1, d1] = coeffs(a_hat);
    const auto [c0, d0] = coeffs(a);
    const double dc = c1 - c0, dd = d1 - d0;
    const double ey = a * mu;
    const double ey2 = a * a * (sx2 + mu * mu) + sv2;
    return dc * dc * ey2 + 2.0 * dc * dd * ey + dd * dd;
}

double relative_regret(const ChannelModel& ch, double a_hat, int gh_order) {
    check_gain(a_hat, "closed::relative_regret");
    if (!gaussian_prior(ch))
        throw std::invalid_argument("closed::relative_regret: requires a Gaussian prior");
    if (a_hat == ch.gain()) return 0.0;
    const ChannelModel assumed = ch.with_gain(a_hat);
    const double a = ch.gain();
    const double mu = ch.input().mean();
    const double sx2 = ch.input().variance();
    const double s = a * a * sx2 + ch.noise_var();
    const double v_hat = gaussian_posterior_var(assumed);
    const double v = gaussian_posterior_var(ch);
    const auto& rule = GaussHermiteRule::get(gh_order);
    const double inv_sqrt_pi = 0.5641895835477563;
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double y = a * mu + std::numbers::sqrt2 * std::sqrt(s) * rule.nodes[j];
        const double m_hat = closed::posterior_mean(assumed, y);
        const double m = closed::posterior_mean(ch, y);
        const double num = (m_hat - m) * (m_hat - m);
        const double den = (v_hat + m_hat * m_hat) + (v + m * m);
        sum += rule.weights[j] * num / den;
    }
    return inv_sqrt_pi * sum;
}

double rho(const ChannelModel& ch) {
    const double fy = closed::fisher_y(ch);
    if (fy < 1e-12)
        throw DegenerateFisherError("closed::rho: output Fisher information is ~0");
    return closed::fisher_avg(ch) / fy;
}

} // namespace closed

} // namespace regretlab
