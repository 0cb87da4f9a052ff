#pragma once

#include "regretlab/information.hpp"

namespace regretlab {

// Everything the library can say about one (a, a_hat) pair. The eq25 variant
// of the first deviation bound keeps the pre-collapse weight
// (6 sx2 + 4 Y^2/ah^2 + 4 Y^2/a^2); if the measured regret ever exceeded the
// headline bound but not twice it, factor_two_flag records that.
struct RegretReport {
    double a = 0.0;
    double a_hat = 0.0;
    double regret_abs = 0.0;
    double regret_rel = 0.0;
    double lemma1_rhs = 0.0;
    double lemma1_rhs_eq25 = 0.0;
    double corollary1_rhs = 0.0;
    double lemma3_rhs = 0.0;
    double corr_fisher_ysq = 0.0;  // premise check for the corollary bound
    double slack = 0.0;            // |a_hat - a| / a
    bool abs_bound_holds = false;
    bool rel_bound_holds = false;
    bool factor_two_flag = false;
    int pointwise_checks = 0;      // grid violations of the pointwise bound
};

struct TradeoffReport {
    double a = 0.0;
    double rho = 0.0;
    double fisher_y = 0.0;
    double snr = 0.0;
    double residual = 0.0;  // (rho + 1) * fisher_y - snr
};

struct PointwiseCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// E[(phi_ah(Y) - phi_a(Y))^2] under the true channel (the orthogonality form
// of the excess MSE).
double absolute_regret(const ChannelModel& ch, double a_hat,
                       const MseMethod& method = MseMethod::quadrature(),
                       const QuadratureSpec& spec = {});

// Both algebraic routes to the absolute regret: the estimator-gap form and
// the MSE difference. They agree up to numerical error.
struct RegretForms {
    double gap_form = 0.0;       // E[(phi_ah - phi_a)^2]
    double mse_diff_form = 0.0;  // MSE(ah) - MSE(a)
};
RegretForms absolute_regret_forms(const ChannelModel& ch, double a_hat,
                                  const MseMethod& method = MseMethod::quadrature(),
                                  const QuadratureSpec& spec = {});

// Per-sample Monte Carlo of d_i = (x - phi_ah)^2 - (x - phi_a)^2
// - (phi_ah - phi_a)^2, whose mean is zero by orthogonality.
struct McGap {
    double mean = 0.0;
    double stderr_ = 0.0;
};
McGap orthogonality_gap_mc(const ChannelModel& ch, double a_hat, std::size_t n,
                           std::uint64_t seed);

// E over Y of (phi_ah - phi_a)^2 / (E_ah[X^2|Y] + E_a[X^2|Y]).
double relative_regret(const ChannelModel& ch, double a_hat,
                       const QuadratureSpec& spec = {});

// E[(6 sx2 + 8 Y^2/a^2) I(X;a||Y)]: the weighted conditional information that
// multiplies (ah - a)^2 in the first deviation bound.
double lemma1_weight_expectation(const ChannelModel& ch, const QuadratureSpec& spec = {});
double lemma1_bound_rhs(const ChannelModel& ch, double a_hat,
                        const QuadratureSpec& spec = {});
double lemma1_bound_rhs_eq25(const ChannelModel& ch, double a_hat,
                             const QuadratureSpec& spec = {});

// (ah - a)^2 (14 sx2 + 8 sv2/a^2) I(X;a|Y): valid when I(X;a||Y) and Y^2 are
// uncorrelated; fisher_ysq_correlation reports how far that premise is off.
double corollary1_bound_rhs(const ChannelModel& ch, double a_hat,
                            const QuadratureSpec& spec = {});
double fisher_ysq_correlation(const ChannelModel& ch, const QuadratureSpec& spec = {});

// (ah - a)^2 I(X;a|Y): the relative-regret deviation bound.
double lemma3_bound_rhs(const ChannelModel& ch, double a_hat,
                        const QuadratureSpec& spec = {});

// Exact pointwise bound (phi_ah(y) - phi_a(y))^2 <=
// 2 (E_ah[X^2|y] + E_a[X^2|y]) KL(P_ah|y || P_a|y); non-asymptotic, no slack.
PointwiseCheck pointwise_bound_check(const ChannelModel& ch, double a_hat, double y,
                                     const QuadratureSpec& spec = {});

// rho(a) = I(X;a|Y) / I(Y;a).
double regret_scalar(const ChannelModel& ch, const QuadratureSpec& spec = {});

// (rho(a) + 1) I(Y;a) - sx2/sv2, which vanishes for zero-mean inputs.
TradeoffReport tradeoff_residual(const ChannelModel& ch, const QuadratureSpec& spec = {});

RegretReport make_regret_report(const ChannelModel& ch, double a_hat,
                                const QuadratureSpec& spec = {});

namespace closed {

// Gaussian-prior forms.
double absolute_regret(const ChannelModel& ch, double a_hat);
double relative_regret(const ChannelModel& ch, double a_hat, int gh_order = 128);
double rho(const ChannelModel& ch);

} // namespace closed

} // namespace regretlab
