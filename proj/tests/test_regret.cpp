#include <doctest.h>

#include <cmath>
#include <random>

#include "regretlab/regret.hpp"
#include "test_support.hpp"

using namespace regretlab;

namespace {

ChannelModel unit_gaussian_channel(double a = 1.0, double sv2 = 1.0) {
    return {a, sv2, InputDistribution::gaussian(0.0, 1.0)};
}

QuadratureSpec gh_spec() {
    QuadratureSpec s;
    s.method = QuadratureSpec::Method::gauss_hermite;
    return s;
}

} // namespace

TEST_CASE("absolute_regret: closed gaussian value") {
    const auto ch = unit_gaussian_channel();
    CHECK(absolute_regret(ch, 1.0) == 0.0);
    // (c_a - c_ah)^2 E[Y^2] frozen from the closed coefficients
    const double expected = 1.0237300628569683e-05;
    CHECK(absolute_regret(ch, 1.1) == doctest::Approx(expected).epsilon(1e-7));
    CHECK(closed::absolute_regret(ch, 1.1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(absolute_regret(ch, 0.0), InvalidGainError);
}

TEST_CASE("absolute_regret: quadrature matches closed form across gains") {
    for (double a : {0.5, 1.0, 2.0}) {
        const auto ch = unit_gaussian_channel(a);
        for (double ah : {0.7 * a, 1.01 * a, 1.5 * a}) {
            const double q = absolute_regret(ch, ah);
            const double c = closed::absolute_regret(ch, ah);
            CHECK(q == doctest::Approx(c).epsilon(3e-5).scale(1e-14));
        }
    }
}

TEST_CASE("absolute_regret forms: mse difference equals the gap form") {
    const auto ch = unit_gaussian_channel(1.3);
    const auto f = absolute_regret_forms(ch, 1.5);
    CHECK(f.gap_form == doctest::Approx(f.mse_diff_form).epsilon(1e-5));
    // monte carlo route with common seed
    const auto fmc = absolute_regret_forms(ch, 1.5, MseMethod::monte_carlo(200000, 31));
    CHECK(fmc.gap_form == doctest::Approx(f.gap_form).epsilon(0.02));
}

TEST_CASE("orthogonality gap: zero within 3 stderr on random configurations") {
    std::mt19937 gen(515151);
    std::uniform_real_distribution<double> gain(0.3, 2.5);
    std::uniform_real_distribution<double> rel(0.5, 2.0);
    for (int rep = 0; rep < 6; ++rep) {
        const auto& named =
            testsupport::registered_priors()[rep % testsupport::registered_priors().size()];
        CAPTURE(named.name);
        const double a = gain(gen);
        const ChannelModel ch(a, 0.8, named.prior);
        const auto g = orthogonality_gap_mc(ch, a * rel(gen), 100000, 1000 + rep);
        CHECK(std::abs(g.mean) <= 3.0 * g.stderr_);
    }
}

TEST_CASE("relative_regret: discrete two-atom prior halves the absolute regret") {
    const ChannelModel ch(1.0, 1.0,
                          InputDistribution::discrete({{0.5, -1.0}, {0.5, 1.0}}));
    const double abs = absolute_regret(ch, 1.2);
    const double rel = relative_regret(ch, 1.2);
    CHECK(rel == doctest::Approx(abs / 2.0).epsilon(1e-8));
    CHECK(relative_regret(ch, 1.0) == 0.0);
}

TEST_CASE("relative_regret: small deviation sits under the lemma-3 ceiling") {
    const auto ch = unit_gaussian_channel();
    const double d = 1e-3;
    const double rel = relative_regret(ch, 1.0 + d);
    CHECK(rel >= 0.0);
    CHECK(rel <= d * d * 0.5 * (1.0 + d));
    CHECK(rel == doctest::Approx(closed::relative_regret(ch, 1.0 + d)).epsilon(1e-6));
}

TEST_CASE("relative_regret: degenerate prior rejected") {
    const ChannelModel ch(1.0, 1.0, InputDistribution::discrete({{1.0, 0.7}}));
    CHECK_THROWS_AS(relative_regret(ch, 1.2), DegeneratePriorError);
}

TEST_CASE("lemma1 weight expectation: unit gaussian equals 11") {
    // E[(6 + 8 Y^2) * 1/2] with E[Y^2] = 2.
    const auto ch = unit_gaussian_channel();
    CHECK(lemma1_weight_expectation(ch) == doctest::Approx(11.0).epsilon(1e-7));
    CHECK(lemma1_bound_rhs(ch, 1.0) == 0.0);
    CHECK(lemma1_bound_rhs(ch, 1.01) == doctest::Approx(1e-4 * 11.0).epsilon(1e-6));
}

TEST_CASE("lemma1 weight expectation: monte carlo oracle") {
    const auto ch = unit_gaussian_channel();
    // Sample Y, evaluate the closed conditional information, average.
    Rng rng(777);
    const std::size_t n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.next_normal();
        const double y = x + rng.next_normal();
        const double w = (6.0 + 8.0 * y * y) * closed::fisher_cond_at(ch, y);
        sum += w;
        sumsq += w * w;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    const double se = sd / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(lemma1_weight_expectation(ch) - mean) <= 3.0 * se);
}

TEST_CASE("bound dominance on the small-deviation grid") {
    QuadratureSpec gh = gh_spec();
    for (const auto& [name, prior] : testsupport::registered_priors()) {
        CAPTURE(name);
        for (double a : {0.5, 1.0, 2.0}) {
            const ChannelModel ch(a, 1.0, prior);
            const double w1 = lemma1_weight_expectation(ch, gh);
            const double i_avg = fisher_x_given_y_avg(ch, gh);
            for (double eps : {1e-3, 1e-2}) {
                for (double sign : {-1.0, 1.0}) {
                    const double ah = a * (1.0 + sign * eps);
                    const double d = ah - a;
                    const double slack = std::abs(d) / a;
                    const double abs = absolute_regret(ch, ah, MseMethod::quadrature(), gh);
                    const double rel = relative_regret(ch, ah, gh);
                    CHECK(abs <= d * d * w1 * (1.0 + slack));
                    CHECK(rel <= d * d * i_avg * (1.0 + slack));
                }
            }
        }
    }
}

TEST_CASE("regret vanishes quadratically with a finite second-order limit") {
    const auto ch = unit_gaussian_channel(2.0);
    double prev = std::numeric_limits<double>::infinity();
    double prev_ratio = -1.0;
    for (double d : {0.1, 0.03, 0.01, 0.003, 0.001}) {
        const double r = absolute_regret(ch, 2.0 + d);
        CHECK(r < prev);
        prev = r;
        const double ratio = r / (d * d);
        if (prev_ratio > 0.0)
            CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.25));
        prev_ratio = ratio;
    }
}

TEST_CASE("corollary1 bound and the correlation premise") {
    const auto ch = unit_gaussian_channel();
    // 1e-4 * (14 + 8) * 0.5
    CHECK(corollary1_bound_rhs(ch, 1.01) == doctest::Approx(1.1e-3).epsilon(1e-6));
    // At a=1, sx2=sv2=1 the conditional information is constant in y, so the
    // correlation premise holds exactly.
    CHECK(std::abs(fisher_ysq_correlation(ch)) < 1e-6);
    // At other gains it is genuinely nonzero.
    const auto ch2 = unit_gaussian_channel(2.0);
    CHECK(std::abs(fisher_ysq_correlation(ch2)) > 0.1);
}

TEST_CASE("lemma3 bound value") {
    const auto ch = unit_gaussian_channel();
    CHECK(lemma3_bound_rhs(ch, 1.01) == doctest::Approx(5e-5).epsilon(1e-6));
    CHECK(lemma3_bound_rhs(ch, 1.0) == 0.0);
}

TEST_CASE("pointwise bound: frozen example and equality case") {
    const auto ch = unit_gaussian_channel();
    const auto eq = pointwise_bound_check(ch, 1.0, 0.3);
    CHECK(eq.lhs == 0.0);
    CHECK(eq.rhs == 0.0);
    CHECK(eq.holds);

    const auto c = pointwise_bound_check(ch, 1.1, 1.0);
    // lhs = (0.5 - 0.49774)^2; rhs = 2 (0.70023 + 0.75) KL with the frozen KL
    CHECK(c.lhs == doctest::Approx(5.118650314284842e-06).epsilon(1e-6));
    CHECK(c.rhs == doctest::Approx(0.007008892527417567).epsilon(1e-6));
    CHECK(c.holds);
}

TEST_CASE("pointwise bound: fuzz across priors, gains, observations") {
    std::mt19937 gen(99173);
    std::uniform_real_distribution<double> gain(0.2, 3.0);
    std::uniform_real_distribution<double> ratio(0.5, 2.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto& priors = testsupport::registered_priors();
    int violations = 0;
    for (int rep = 0; rep < 400; ++rep) {
        const auto& named = priors[gen() % priors.size()];
        const double a = gain(gen);
        const ChannelModel ch(a, 0.9, named.prior);
        const double ah = a * ratio(gen);
        const double sd_y = std::sqrt(a * a * named.prior.second_moment() + 0.9);
        const double y = 6.0 * sd_y * unit(gen);
        if (!pointwise_bound_check(ch, ah, y).holds) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("regret scalar: gaussian closed form and grid minimum") {
    const auto ch = unit_gaussian_channel();
    CHECK(regret_scalar(ch) == doctest::Approx(1.0).epsilon(1e-6));
    for (double a : {0.5, 2.0}) {
        const auto cha = unit_gaussian_channel(a);
        const double u = a * a;
        CHECK(regret_scalar(cha) ==
              doctest::Approx(0.5 * (u + 1.0 / u)).epsilon(1e-6));
        CHECK(regret_scalar(cha) >= 1.0);  // AM-GM on the closed form
    }
    // SNR = 10: the scalar dips to 1 near a = 10^{-1/2} on a coarse grid scan
    double best_a = 0.0, best = 1e300;
    for (double a = 0.22; a <= 0.45; a += 0.01) {
        const ChannelModel c(a, 0.1, InputDistribution::gaussian(0.0, 1.0));
        const double r = closed::rho(c);
        if (r < best) { best = r; best_a = a; }
    }
    CHECK(best_a == doctest::Approx(0.32).epsilon(0.05));
    CHECK(best == doctest::Approx(1.0).epsilon(1e-3));

    const ChannelModel tiny(1e-7, 1.0, InputDistribution::gaussian(0.0, 1.0));
    CHECK_THROWS_AS(closed::rho(tiny), DegenerateFisherError);
}

TEST_CASE("tradeoff identity across zero-mean priors and gains") {
    QuadratureSpec gh = gh_spec();
    for (const auto& [name, prior] : testsupport::registered_priors()) {
        CAPTURE(name);
        for (double a : testsupport::gain_grid()) {
            CAPTURE(a);
            const ChannelModel ch(a, 1.0, prior);
            const auto t = tradeoff_residual(ch, gh);
            CHECK(std::abs(t.residual) <= 1e-4);
        }
    }
    // spec'd examples
    const ChannelModel pm1(0.7, 0.25,
                           InputDistribution::discrete({{0.5, -1.0}, {0.5, 1.0}}));
    CHECK(std::abs(tradeoff_residual(pm1, gh).residual) <= 1e-4);
    const ChannelModel mix(1.3, 1.0, InputDistribution::gaussian_mixture(
                                          {{0.5, -1.0, 0.5}, {0.5, 1.0, 0.5}}));
    CHECK(std::abs(tradeoff_residual(mix, gh).residual) <= 1e-4);
    CHECK(mix.snr() == doctest::Approx(1.5));

    const ChannelModel shifted(1.0, 1.0, InputDistribution::gaussian(0.4, 1.0));
    CHECK_THROWS_AS(tradeoff_residual(shifted), NotZeroMeanError);
}

TEST_CASE("regret report: fields, flags, factor-two diagnostic") {
    const auto ch = unit_gaussian_channel();
    QuadratureSpec gh = gh_spec();
    const auto r = make_regret_report(ch, 1.01, gh);
    CHECK(r.a == 1.0);
    CHECK(r.a_hat == 1.01);
    CHECK(r.slack == doctest::Approx(0.01));
    CHECK(r.regret_abs >= 0.0);
    CHECK(r.regret_rel >= 0.0);
    CHECK(r.abs_bound_holds);
    CHECK(r.rel_bound_holds);
    CHECK(!r.factor_two_flag);
    CHECK(r.pointwise_checks == 0);
    // eq25 weight approaches the headline weight as the deviation shrinks
    CHECK(r.lemma1_rhs_eq25 == doctest::Approx(r.lemma1_rhs).epsilon(0.02));
}
