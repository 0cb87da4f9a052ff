#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "regretlab/errors.hpp"

namespace regretlab {

using Fn = std::function<double(double)>;

// Controls every quadrature in the library. Tolerances default one order
// tighter than the acceptance thresholds so quadrature error never masks a
// bound violation.
struct QuadratureSpec {
    enum class Method { adaptive_simpson, gauss_hermite };

    Method method = Method::adaptive_simpson;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 60;   // recursion depth cap for adaptive Simpson
    int gh_order = 128;
    double tail_sigmas = 10.0;   // truncation half-width in units of `scale`

    void validate() const;

    // Spec for quadratures nested inside an integrand evaluated at this
    // spec's tolerance. Two orders tighter, so inner noise cannot stall the
    // outer subdivision.
    QuadratureSpec inner() const {
        QuadratureSpec s = *this;
        s.rel_tol = std::max(rel_tol * 1e-2, 1e-14);
        s.abs_tol = std::max(abs_tol * 1e-2, 1e-300);
        return s;
    }
};

// Integrates f over [center - tail_sigmas*scale, center + tail_sigmas*scale].
// Throws NonFiniteError if f evaluates to NaN/Inf at a node, NoConvergenceError
// if adaptive subdivision is exhausted before the tolerance is met.
double integrate(const Fn& f, double center, double scale,
                 const QuadratureSpec& spec = {});

// Same, over an explicit interval [lo, hi]. Gauss-Hermite uses the interval
// midpoint/half-width mapped back to (center, scale).
double integrate_interval(const Fn& f, double lo, double hi,
                          const QuadratureSpec& spec = {});

// Brent minimization of a unimodal f on [lo, hi]. Returns (argmin, min).
std::pair<double, double> minimize_scalar(const Fn& f, double lo, double hi,
                                          double tol = 1e-8);

// Central difference (f(x+h) - f(x-h)) / (2h).
double fd_derivative(const Fn& f, double x, double h);

double log_sum_exp(std::span<const double> logs);

// Gauss-Hermite rule for weight exp(-t^2) on the real line: sum w_i f(t_i).
// Rules are computed once per order and cached.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    static const GaussHermiteRule& get(int order);
};

} // namespace regretlab
