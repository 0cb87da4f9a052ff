#include "regretlab/blindest.hpp"

#include <cmath>

namespace regretlab {

void GainEstimator::validate() const {
    if (!(bracket_lo < bracket_hi))
        throw BadBracketError("GainEstimator: bracket_lo must be < bracket_hi");
    if (!(bracket_lo > 0.0))
        throw std::invalid_argument("GainEstimator: bracket must stay in a > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("GainEstimator: tol must be > 0");
}

double estimate_gain(const GainEstimator& est, const InputDistribution& prior,
                     double noise_var, std::span<const double> ys) {
    est.validate();
    if (ys.size() < 2)
        throw std::invalid_argument("estimate_gain: need at least 2 observations");
    if (!(noise_var > 0.0))
        throw std::invalid_argument("estimate_gain: noise_var must be > 0");

    if (est.kind == GainEstimator::Kind::moment_matching) {
        if (!prior.zero_mean())
            throw NotZeroMeanError("estimate_gain: moment matching needs a zero-mean prior");
        double q = 0.0;
        for (double y : ys) q += y * y;
        q /= static_cast<double>(ys.size());
        if (q <= noise_var)
            throw DegenerateSampleError(
                "estimate_gain: mean(Y^2) at or below the noise floor", 0.0);
        return std::sqrt((q - noise_var) / prior.second_moment());
    }

    // Numerical MLE on the exact marginal log likelihood.
    auto neg_loglik = [&](double a) {
        const ChannelModel ch(a, noise_var, prior);
        double ll = 0.0;
        for (double y : ys) ll += closed::log_marginal(ch, y);
        return -ll;
    };
    const auto [argmin, value] = minimize_scalar(neg_loglik, est.bracket_lo,
                                                 est.bracket_hi, est.tol);
    (void)value;
    const double margin = 4.0 * est.tol * std::max(1.0, std::abs(argmin));
    if (argmin - est.bracket_lo <= margin || est.bracket_hi - argmin <= margin)
        throw MinimumAtBoundaryError("estimate_gain: MLE hit the search bracket at " +
                                     std::to_string(argmin));
    return argmin;
}

double crb(const ChannelModel& ch, std::size_t n, const QuadratureSpec& spec) {
    if (n < 2) throw std::invalid_argument("crb: n must be >= 2");
    const double fy = fisher_y(ch, spec);
    if (fy < 1e-12) throw DegenerateFisherError("crb: output Fisher information is ~0");
    return 1.0 / (static_cast<double>(n - 1) * fy);
}

double lemma2_bound_rhs(const ChannelModel& ch, std::size_t n,
                        const QuadratureSpec& spec) {
    if (n < 2) throw std::invalid_argument("lemma2_bound_rhs: n must be >= 2");
    return lemma1_weight_expectation(ch, spec) * crb(ch, n, spec);
}

double lemma4_rregret_bound_rhs(const ChannelModel& ch, std::size_t n,
                                const QuadratureSpec& spec) {
    if (n < 2) throw std::invalid_argument("lemma4_rregret_bound_rhs: n must be >= 2");
    return regret_scalar(ch, spec) / static_cast<double>(n - 1);
}

namespace {

struct TrialRegret {
    bool degenerate = false;
    double abs = 0.0;
    double rel = 0.0;
    double estimate = 0.0;
};

TrialRegret run_trial(const ChannelModel& ch, const GainEstimator& est, std::size_t n,
                      std::uint64_t seed, std::uint64_t trial, bool want_regret,
                      const QuadratureSpec& spec) {
    TrialRegret out;
    Rng rng = Rng::substream(seed, trial);
    const double noise_sd = std::sqrt(ch.noise_var());
    std::vector<double> ys(n - 1);
    for (double& y : ys)
        y = ch.gain() * draw_input(ch.input(), rng) + noise_sd * rng.next_normal();
    double a_hat = 0.0;
    try {
        a_hat = estimate_gain(est, ch.input(), ch.noise_var(), ys);
    } catch (const DegenerateSampleError&) {
        out.degenerate = true;
        return out;
    } catch (const MinimumAtBoundaryError&) {
        out.degenerate = true;
        return out;
    }
    out.estimate = a_hat;
    if (want_regret) {
        if (closed::gaussian_prior(ch)) {
            out.abs = closed::absolute_regret(ch, a_hat);
            out.rel = closed::relative_regret(ch, a_hat);
        } else {
            out.abs = absolute_regret(ch, a_hat, MseMethod::quadrature(), spec);
            out.rel = relative_regret(ch, a_hat, spec);
        }
    }
    return out;
}

} // namespace

McRegret expected_regret_mc(const ChannelModel& ch, const GainEstimator& est,
                            std::size_t n, std::size_t trials, std::uint64_t seed,
                            const QuadratureSpec& spec) {
    if (n < 2) throw std::invalid_argument("expected_regret_mc: n must be >= 2");
    if (trials < 1) throw std::invalid_argument("expected_regret_mc: trials must be >= 1");
    McRegret r;
    double abs_sum = 0.0, abs_sq = 0.0, rel_sum = 0.0, rel_sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto res = run_trial(ch, est, n, seed, t, true, spec);
        if (res.degenerate) {
            ++r.degenerate_trials;
            continue;
        }
        ++r.trials_used;
        abs_sum += res.abs;
        abs_sq += res.abs * res.abs;
        rel_sum += res.rel;
        rel_sq += res.rel * res.rel;
    }
    if (r.trials_used == 0) return r;
    const double k = static_cast<double>(r.trials_used);
    r.abs_mean = abs_sum / k;
    r.rel_mean = rel_sum / k;
    if (r.trials_used > 1) {
        r.abs_stderr = std::sqrt(std::max(0.0, abs_sq / k - r.abs_mean * r.abs_mean) / k);
        r.rel_stderr = std::sqrt(std::max(0.0, rel_sq / k - r.rel_mean * r.rel_mean) / k);
    }
    return r;
}

EfficiencyReport efficiency_experiment(const ChannelModel& ch, const GainEstimator& est,
                                       std::size_t n, std::size_t trials,
                                       std::uint64_t seed, const QuadratureSpec& spec) {
    if (n < 2) throw std::invalid_argument("efficiency_experiment: n must be >= 2");
    if (trials < 2)
        throw std::invalid_argument("efficiency_experiment: trials must be >= 2");
    EfficiencyReport rep;
    rep.n = n;
    std::vector<double> estimates;
    estimates.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const auto res = run_trial(ch, est, n, seed, t, false, spec);
        if (res.degenerate) {
            ++rep.degenerate_trials;
            continue;
        }
        estimates.push_back(res.estimate);
    }
    rep.trials = estimates.size();
    if (estimates.size() < 2) return rep;
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= static_cast<double>(estimates.size() - 1);
    rep.mean_estimate = mean;
    rep.empirical_bias = mean - ch.gain();
    rep.bias_stderr = std::sqrt(var / static_cast<double>(estimates.size()));
    rep.empirical_var = var;
    rep.crb = crb(ch, n, spec);
    rep.efficiency_ratio = rep.crb / rep.empirical_var;
    return rep;
}

} // namespace regretlab
