#include <doctest.h>

#include <cmath>
#include <random>

#include "regretlab/posterior.hpp"
#include "test_support.hpp"

using namespace regretlab;

namespace {

ChannelModel unit_gaussian_channel(double a = 1.0, double sv2 = 1.0) {
    return {a, sv2, InputDistribution::gaussian(0.0, 1.0)};
}

} // namespace

TEST_CASE("posterior_mean: gaussian closed form") {
    const auto ch = unit_gaussian_channel();
    // a sx2 / (a^2 sx2 + sv2) * y = 0.5 * y
    CHECK(posterior_mean(ch, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(posterior_mean(ch, 0.0)) < 1e-9);

    for (double a : testsupport::gain_grid()) {
        const auto cha = unit_gaussian_channel(a);
        const double c = a / (a * a + 1.0);
        for (double y : {-3.0, 0.7, 5.0}) {
            CHECK(posterior_mean(cha, y) == doctest::Approx(c * y).epsilon(1e-9));
        }
    }
}

TEST_CASE("posterior_mean: symmetric priors vanish at y=0") {
    for (const auto& [name, prior] : testsupport::registered_priors()) {
        CAPTURE(name);
        const ChannelModel ch(0.9, 0.8, prior);
        CHECK(std::abs(posterior_mean(ch, 0.0)) < 1e-9);
    }
}

TEST_CASE("posterior_mean: two-atom bayes rule gives tanh") {
    const ChannelModel ch(1.0, 1.0,
                          InputDistribution::discrete({{0.5, -1.0}, {0.5, 1.0}}));
    CHECK(posterior_mean(ch, 1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
    // General point: tanh(a y / sv2)
    const ChannelModel ch2(0.7, 0.25,
                           InputDistribution::discrete({{0.5, -1.0}, {0.5, 1.0}}));
    CHECK(posterior_mean(ch2, 0.4) ==
          doctest::Approx(std::tanh(0.7 * 0.4 / 0.25)).epsilon(1e-12));
}

TEST_CASE("posterior_second_moment: gaussian and discrete oracles") {
    const auto ch = unit_gaussian_channel();
    CHECK(posterior_second_moment(ch, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(posterior_second_moment(ch, 2.0) == doctest::Approx(1.5).epsilon(1e-9));

    const ChannelModel pm1(1.7, 0.6,
                           InputDistribution::discrete({{0.5, -1.0}, {0.5, 1.0}}));
    for (double y : {-4.0, 0.0, 2.5})
        CHECK(posterior_second_moment(pm1, y) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature path vs closed conjugate path on the grid") {
    for (const auto& [name, prior] : testsupport::registered_priors()) {
        CAPTURE(name);
        for (double a : testsupport::gain_grid()) {
            const ChannelModel ch(a, 1.0, prior);
            const double sd_y = std::sqrt(a * a * prior.second_moment() + 1.0);
            for (int i = -5; i <= 5; ++i) {
                const double y = 2.0 * sd_y * i;
                const auto s = summarize_posterior(ch, y);
                const double cm = closed::posterior_mean(ch, y);
                CHECK(std::abs(s.mean - cm) <= 1e-8 * std::max(1e-2, std::abs(cm)));
                CHECK(s.second_moment ==
                      doctest::Approx(closed::posterior_second_moment(ch, y)).epsilon(1e-8));
                CHECK(s.log_marginal ==
                      doctest::Approx(closed::log_marginal(ch, y)).epsilon(1e-8));
                // Jensen
                CHECK(s.second_moment + 1e-12 >= s.mean * s.mean);
            }
        }
    }
}

TEST_CASE("proposition-2 style bound on the grid") {
    for (const auto& [name, prior] : testsupport::registered_priors()) {
        CAPTURE(name);
        const double sx2 = prior.variance();
        for (double a : testsupport::gain_grid()) {
            const ChannelModel ch(a, 1.0, prior);
            const double sd_y = std::sqrt(a * a * prior.second_moment() + 1.0);
            for (int i = -10; i <= 10; ++i) {
                const double y = sd_y * i;
                const double m2 = posterior_second_moment(ch, y);
                CHECK(m2 <= 3.0 * sx2 + 4.0 * y * y / (a * a) + 1e-7);
            }
        }
    }
}

TEST_CASE("mismatched_estimate") {
    const auto ch = unit_gaussian_channel();
    CHECK(mismatched_estimate(ch, 1.0, 1.7) ==
          doctest::Approx(posterior_mean(ch, 1.7)).epsilon(1e-12));
    // paper closed form: ah sx2 / (ah^2 sx2 + sv2) * y
    CHECK(mismatched_estimate(ch, 1.1, 1.0) ==
          doctest::Approx(1.1 / 2.21).epsilon(1e-9));
    // large assumed gain drives the estimate toward zero
    CHECK(std::abs(mismatched_estimate(ch, 60.0, 1.0)) < 0.02);
    CHECK_THROWS_AS(mismatched_estimate(ch, 0.0, 1.0), InvalidGainError);
    CHECK_THROWS_AS(mismatched_estimate(ch, -0.5, 1.0), InvalidGainError);
}

TEST_CASE("mse: matched gaussian equals sx2 sv2 / (a^2 sx2 + sv2)") {
    const auto ch = unit_gaussian_channel();
    CHECK(mse(ch, 1.0, MseMethod::quadrature()) == doctest::Approx(0.5).epsilon(1e-8));
    // mismatched: mmse + (c_a - c_ah)^2 E[Y^2]
    const double expected = 0.5 + 1.0237300628569683e-05;
    CHECK(mse(ch, 1.1, MseMethod::quadrature()) ==
          doctest::Approx(expected).epsilon(1e-8));
    CHECK(mse(ch, 1.1, MseMethod::quadrature()) ==
          doctest::Approx(closed::mse(ch, 1.1)).epsilon(1e-9));

    // noiseless limit of the closed form
    const ChannelModel quiet(1.0, 1e-8, InputDistribution::gaussian(0.0, 1.0));
    CHECK(closed::mse(quiet, 1.0) < 1e-7);

    CHECK_THROWS_AS(mse(ch, -1.0, MseMethod::quadrature()), InvalidGainError);
}

TEST_CASE("mse: monte carlo converges to the quadrature value") {
    const auto ch = unit_gaussian_channel();
    const double mc = mse(ch, 1.3, MseMethod::monte_carlo(400000, 97));
    const double exact = closed::mse(ch, 1.3);
    CHECK(mc == doctest::Approx(exact).epsilon(0.01));
    // deterministic given the seed
    CHECK(mse(ch, 1.3, MseMethod::monte_carlo(10000, 5)) ==
          mse(ch, 1.3, MseMethod::monte_carlo(10000, 5)));
}

TEST_CASE("law of total variance across priors") {
    for (const auto& [name, prior] : testsupport::registered_priors()) {
        CAPTURE(name);
        const ChannelModel ch(1.2, 0.9, prior);
        const double total = expect_y(
            ch, [&](double y) { return posterior_second_moment(ch, y); });
        CHECK(total == doctest::Approx(prior.second_moment()).epsilon(1e-6));
        const double var_part = expect_y(ch, [&](double y) {
            const auto s = summarize_posterior(ch, y);
            return s.second_moment - s.mean * s.mean;
        });
        const double mean_part = expect_y(ch, [&](double y) {
            const double m = posterior_mean(ch, y);
            return m * m;
        });
        CHECK(var_part + mean_part ==
              doctest::Approx(prior.second_moment()).epsilon(1e-6));
    }
}

TEST_CASE("orthogonality: residual uncorrelated with functions of Y") {
    const auto ch = unit_gaussian_channel();
    const std::size_t n = 1000000;
    const auto batch = sample(ch, n, 2024);
    double s1 = 0.0, sy = 0.0, sphi = 0.0;
    double q1 = 0.0, qy = 0.0, qphi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = closed::posterior_mean(ch, batch.ys[i]);
        const double r = batch.xs[i] - phi;
        const double ry = r * batch.ys[i];
        const double rphi = r * phi;
        s1 += r; q1 += r * r;
        sy += ry; qy += ry * ry;
        sphi += rphi; qphi += rphi * rphi;
    }
    const double dn = static_cast<double>(n);
    auto check_zero = [&](double sum, double sumsq) {
        const double mean = sum / dn;
        const double var = sumsq / dn - mean * mean;
        const double stderr_ = std::sqrt(var / dn);
        CHECK(std::abs(mean) <= 3.0 * stderr_);
    };
    check_zero(s1, q1);
    check_zero(sy, qy);
    check_zero(sphi, qphi);
}
