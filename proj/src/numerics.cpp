#include "regretlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace regretlab {

namespace {

double checked_eval(const Fn& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw NonFiniteError("integrate", x);
    return v;
}

// Adaptive Simpson with the classic S(a,b) vs S(a,m)+S(m,b) error estimate.
// The halves use their exact sub-widths (m - a, b - m): with h/2 instead, the
// midpoint quantization puts an h-independent floor under the error estimate
// and tight tolerances can never be met.
double simpson_rec(const Fn& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    if (!(a < m && m < b)) return whole;  // interval at machine resolution
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = checked_eval(f, lm);
    const double frm = checked_eval(f, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
    if (depth <= 0)
        throw NoConvergenceError("integrate: subdivision limit reached before tolerance");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const Fn& f, double lo, double hi,
                        const QuadratureSpec& spec) {
    // Seed with 16 fixed panels; the per-panel budget is the global tolerance
    // split evenly. The tolerance scale comes from the composite estimate,
    // with a floor from the absolute panel sum so cancelling integrands do
    // not demand unbounded depth.
    constexpr int kPanels = 16;
    const double h = (hi - lo) / kPanels;
    double rough = 0.0, rough_abs = 0.0;
    struct Panel { double a, b, fa, fm, fb, whole; };
    std::vector<Panel> panels(kPanels);
    double fprev = checked_eval(f, lo);
    for (int i = 0; i < kPanels; ++i) {
        const double a = lo + i * h;
        const double b = (i == kPanels - 1) ? hi : a + h;
        const double fm = checked_eval(f, 0.5 * (a + b));
        const double fb = checked_eval(f, b);
        const double whole = (b - a) / 6.0 * (fprev + 4.0 * fm + fb);
        panels[i] = {a, b, fprev, fm, fb, whole};
        rough += whole;
        rough_abs += std::abs(whole);
        fprev = fb;
    }
    const double scale = std::max(std::abs(rough), 0.01 * rough_abs);
    const double tol = std::max(spec.abs_tol, spec.rel_tol * scale) / kPanels;

    double total = 0.0;
    for (const auto& p : panels)
        total += simpson_rec(f, p.a, p.b, p.fa, p.fm, p.fb, p.whole, tol,
                             spec.max_subdivisions);
    return total;
}

double gauss_hermite_interval(const Fn& f, double center, double scale,
                              double half_width, int order) {
    const auto& rule = GaussHermiteRule::get(order);
    const double sqrt2s = std::sqrt(2.0) * scale;
    double sum = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.nodes[i];
        const double x = center + sqrt2s * t;
        if (std::abs(x - center) > half_width) continue;  // honor the interval
        sum += rule.weights[i] * std::exp(t * t) * checked_eval(f, x);
    }
    return sqrt2s * sum;
}

} // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
    if (gh_order < 2) throw std::invalid_argument("QuadratureSpec: gh_order must be >= 2");
    if (!(tail_sigmas >= 4.0)) throw std::invalid_argument("QuadratureSpec: tail_sigmas must be >= 4");
    if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
}

double integrate(const Fn& f, double center, double scale,
                 const QuadratureSpec& spec) {
    spec.validate();
    if (!(scale > 0.0)) throw std::invalid_argument("integrate: scale must be > 0");
    const double hw = spec.tail_sigmas * scale;
    if (spec.method == QuadratureSpec::Method::gauss_hermite)
        return gauss_hermite_interval(f, center, scale, hw, spec.gh_order);
    return adaptive_simpson(f, center - hw, center + hw, spec);
}

double integrate_interval(const Fn& f, double lo, double hi,
                          const QuadratureSpec& spec) {
    spec.validate();
    if (!(lo < hi)) throw std::invalid_argument("integrate_interval: requires lo < hi");
    if (spec.method == QuadratureSpec::Method::gauss_hermite) {
        const double center = 0.5 * (lo + hi);
        const double hw = 0.5 * (hi - lo);
        return gauss_hermite_interval(f, center, hw / spec.tail_sigmas, hw, spec.gh_order);
    }
    return adaptive_simpson(f, lo, hi, spec);
}

std::pair<double, double> minimize_scalar(const Fn& f, double lo, double hi,
                                          double tol) {
    if (!(lo < hi)) throw BadBracketError("minimize_scalar: requires lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: tol must be > 0");

    // Brent's method (golden section with parabolic interpolation).
    constexpr double kGolden = 0.3819660112501051;
    double a = lo, b = hi;
    double x = a + kGolden * (b - a);
    double w = x, v = x;
    double fx = f(x);
    if (!std::isfinite(fx)) throw NonFiniteError("minimize_scalar", x);
    double fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < 200; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + 1e-14;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

        bool golden = true;
        if (std::abs(e) > tol1) {
            // Try a parabolic fit through (v, w, x).
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (m > x) ? tol1 : -tol1;
                golden = false;
            }
        }
        if (golden) {
            e = (x < m) ? b - x : a - x;
            d = kGolden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
        const double fu = f(u);
        if (!std::isfinite(fu)) throw NonFiniteError("minimize_scalar", u);

        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx};
}

double fd_derivative(const Fn& f, double x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_derivative: h must be > 0");
    const double fp = f(x + h);
    const double fm = f(x - h);
    if (!std::isfinite(fp)) throw NonFiniteError("fd_derivative", x + h);
    if (!std::isfinite(fm)) throw NonFiniteError("fd_derivative", x - h);
    return (fp - fm) / (2.0 * h);
}

double log_sum_exp(std::span<const double> logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logs) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double sum = 0.0;
    for (double v : logs) sum += std::exp(v - m);
    return m + std::log(sum);
}

const GaussHermiteRule& GaussHermiteRule::get(int order) {
    static std::mutex mu;
    static std::map<int, GaussHermiteRule> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    // Roots of H_n by Newton iteration on the orthonormal recurrence,
    // largest root first, symmetric pairs filled in.
    GaussHermiteRule rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    const int m = (order + 1) / 2;
    const double pi_m4 = 0.7511255444649425;  // pi^{-1/4}
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * order + 1.0) -
                1.85575 * std::pow(2.0 * order + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(order, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            double p1 = pi_m4, p2 = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * order) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        rule.nodes[i] = z;
        rule.nodes[order - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[order - 1 - i] = rule.weights[i];
    }
    // Store ascending.
    std::reverse(rule.nodes.begin(), rule.nodes.end());
    std::reverse(rule.weights.begin(), rule.weights.end());
    auto [pos, ok] = cache.emplace(order, std::move(rule));
    (void)ok;
    return pos->second;
}

} // namespace regretlab
