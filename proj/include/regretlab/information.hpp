#pragma once

#include <optional>

#include "regretlab/posterior.hpp"

namespace regretlab {

// The three Fisher quantities tied to one channel, plus optional per-y
// samples of the conditional information I(X;a||Y=y).
struct FisherReport {
    double a = 0.0;
    double fisher_x_given_Y_avg = 0.0;  // I(X;a|Y)
    double fisher_y = 0.0;              // I(Y;a)
    double fisher_y_given_x = 0.0;      // I(Y;a|X) = E[X^2]/sv2
    std::optional<std::vector<std::pair<double, double>>> per_y_samples;
};

// Score of the likelihood in the gain: d/da ln f_a(y|x) = x (y - a x) / sv2.
double likelihood_score(const ChannelModel& ch, double y, double x);

// d/da ln f_a(y): the posterior mean of the likelihood score.
double marginal_score(const ChannelModel& ch, double y, const QuadratureSpec& spec = {});

// d/da ln f_a(x|y) = likelihood score minus marginal score.
double score_x_given_y(const ChannelModel& ch, double x, double y,
                       const QuadratureSpec& spec = {});

// I(X;a||Y=y): posterior variance of the likelihood score at one observation.
double fisher_x_given_y_at(const ChannelModel& ch, double y,
                           const QuadratureSpec& spec = {});

// I(X;a|Y): the Y-average of the conditional information.
double fisher_x_given_y_avg(const ChannelModel& ch, const QuadratureSpec& spec = {});

// I(Y;a): expected squared marginal score.
double fisher_y(const ChannelModel& ch, const QuadratureSpec& spec = {});

// I(Y;a|X) = E[X^2]/sv2, claimed for zero-mean inputs; throws NotZeroMeanError
// otherwise. fisher_y_given_x_quad evaluates the defining double integral.
double fisher_y_given_x(const ChannelModel& ch);
double fisher_y_given_x_quad(const ChannelModel& ch, const QuadratureSpec& spec = {});

// D(P_{a_hat|y} || P_{a|y}) between the two posteriors at one observation.
double kl_posteriors(const ChannelModel& ch, double a_hat, double y,
                     const QuadratureSpec& spec = {});

// Squared Kakutani-Hellinger distance r^2 between the posteriors; in [0, 1]
// and 2 r^2 <= KL.
double hellinger_sq_posteriors(const ChannelModel& ch, double a_hat, double y,
                               const QuadratureSpec& spec = {});

FisherReport make_fisher_report(const ChannelModel& ch, const QuadratureSpec& spec = {},
                                bool with_per_y_samples = false);

namespace closed {

// Gaussian-prior forms (general mean unless noted).
double fisher_cond_at(const ChannelModel& ch, double y);  // I(X;a||Y=y)
double fisher_y(const ChannelModel& ch);                  // I(Y;a)
double fisher_avg(const ChannelModel& ch);                // I(X;a|Y)
double kl(const ChannelModel& ch, double a_hat, double y);
double hellinger_sq(const ChannelModel& ch, double a_hat, double y);

} // namespace closed

} // namespace regretlab
