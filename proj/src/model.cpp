#include "regretlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace regretlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)

double gauss_log_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
}

void validate_weights(double total) {
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("InputDistribution: weights must sum to 1 (got " +
                                    std::to_string(total) + ")");
}

} // namespace

InputDistribution InputDistribution::gaussian(double mean, double var) {
    if (!(var > 0.0)) throw std::invalid_argument("InputDistribution: var must be > 0");
    InputDistribution d;
    d.kind_ = Kind::gaussian;
    d.components_ = {{1.0, mean, var}};
    d.mean_ = mean;
    d.var_ = var;
    return d;
}

InputDistribution InputDistribution::gaussian_mixture(std::vector<PriorComponent> components) {
    if (components.empty())
        throw std::invalid_argument("InputDistribution: mixture needs at least one component");
    double wsum = 0.0, mean = 0.0, m2 = 0.0;
    for (const auto& c : components) {
        if (c.weight < 0.0)
            throw std::invalid_argument("InputDistribution: negative mixture weight");
        if (!(c.var > 0.0))
            throw std::invalid_argument("InputDistribution: component var must be > 0");
        wsum += c.weight;
        mean += c.weight * c.mean;
        m2 += c.weight * (c.var + c.mean * c.mean);
    }
    validate_weights(wsum);
    InputDistribution d;
    d.kind_ = Kind::gaussian_mixture;
    d.components_ = std::move(components);
    d.mean_ = mean;
    d.var_ = m2 - mean * mean;
    return d;
}

InputDistribution InputDistribution::discrete(std::vector<Atom> atoms) {
    if (atoms.empty())
        throw std::invalid_argument("InputDistribution: discrete prior needs at least one atom");
    double psum = 0.0, mean = 0.0, m2 = 0.0;
    for (const auto& a : atoms) {
        if (a.prob < 0.0) throw std::invalid_argument("InputDistribution: negative atom prob");
        psum += a.prob;
        mean += a.prob * a.value;
        m2 += a.prob * a.value * a.value;
    }
    validate_weights(psum);
    InputDistribution d;
    d.kind_ = Kind::discrete;
    d.atoms_ = std::move(atoms);
    d.mean_ = mean;
    d.var_ = m2 - mean * mean;
    return d;
}

std::pair<double, double> InputDistribution::support(double tail_sigmas) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    if (kind_ == Kind::discrete) {
        for (const auto& a : atoms_) {
            lo = std::min(lo, a.value);
            hi = std::max(hi, a.value);
        }
    } else {
        for (const auto& c : components_) {
            const double sd = std::sqrt(c.var);
            lo = std::min(lo, c.mean - tail_sigmas * sd);
            hi = std::max(hi, c.mean + tail_sigmas * sd);
        }
    }
    return {lo, hi};
}

double InputDistribution::log_density(double x) const {
    if (kind_ == Kind::discrete)
        throw std::logic_error("InputDistribution: discrete prior has no density");
    std::vector<double> terms;
    terms.reserve(components_.size());
    for (const auto& c : components_) {
        if (c.weight == 0.0) continue;
        terms.push_back(std::log(c.weight) + gauss_log_pdf(x, c.mean, c.var));
    }
    return log_sum_exp(terms);
}

std::string InputDistribution::describe() const {
    std::ostringstream os;
    os.precision(12);
    switch (kind_) {
        case Kind::gaussian:
            os << "gaussian(" << components_[0].mean << "," << components_[0].var << ")";
            break;
        case Kind::gaussian_mixture: {
            os << "mixture(";
            for (size_t i = 0; i < components_.size(); ++i) {
                if (i) os << ";";
                os << components_[i].weight << ":N(" << components_[i].mean << ","
                   << components_[i].var << ")";
            }
            os << ")";
            break;
        }
        case Kind::discrete: {
            os << "discrete(";
            for (size_t i = 0; i < atoms_.size(); ++i) {
                if (i) os << ";";
                os << atoms_[i].prob << ":" << atoms_[i].value;
            }
            os << ")";
            break;
        }
    }
    return os.str();
}

ChannelModel::ChannelModel(double gain, double noise_var, InputDistribution input)
    : gain_(gain), noise_var_(noise_var), input_(std::move(input)) {
    if (!(gain > 0.0))
        throw InvalidGainError("ChannelModel: gain must be > 0 (a is a positive real)");
    if (!(noise_var > 0.0))
        throw std::invalid_argument("ChannelModel: noise_var must be > 0");
}

double likelihood_log(const ChannelModel& ch, double y, double x) {
    return gauss_log_pdf(y, ch.gain() * x, ch.noise_var());
}

std::vector<GaussWindow> y_windows(const ChannelModel& ch) {
    std::vector<GaussWindow> w;
    const double a = ch.gain();
    if (ch.input().kind() == InputDistribution::Kind::discrete) {
        const double sd = std::sqrt(ch.noise_var());
        for (const auto& atom : ch.input().atoms())
            if (atom.prob > 0.0) w.push_back({a * atom.value, sd});
    } else {
        for (const auto& c : ch.input().components())
            if (c.weight > 0.0)
                w.push_back({a * c.mean, std::sqrt(a * a * c.var + ch.noise_var())});
    }
    return w;
}

std::vector<GaussWindow> x_windows(const ChannelModel& ch, double y) {
    std::vector<GaussWindow> w;
    const double a = ch.gain();
    const double sv2 = ch.noise_var();
    if (ch.input().kind() == InputDistribution::Kind::discrete) return w;
    for (const auto& c : ch.input().components()) {
        if (c.weight == 0.0) continue;
        const double prec = 1.0 / c.var + a * a / sv2;
        const double m = (c.mean / c.var + a * y / sv2) / prec;
        w.push_back({m, std::sqrt(1.0 / prec)});
    }
    return w;
}

double marginal_log(const ChannelModel& ch, double y, const QuadratureSpec& spec) {
    const auto& prior = ch.input();
    if (prior.kind() == InputDistribution::Kind::discrete) {
        std::vector<double> terms;
        terms.reserve(prior.atoms().size());
        for (const auto& atom : prior.atoms())
            if (atom.prob > 0.0)
                terms.push_back(std::log(atom.prob) + likelihood_log(ch, y, atom.value));
        return log_sum_exp(terms);
    }

    // Continuous prior: per-component quadrature of w_i N_i(x) f(y|x). Each
    // term is Gaussian-shaped around its x-window; shift by the peak value so
    // the integrand stays in exp range far out in the y tails.
    const auto windows = x_windows(ch, y);
    const auto& comps = prior.components();
    std::vector<double> terms;
    terms.reserve(windows.size());
    size_t wi = 0;
    for (const auto& c : comps) {
        if (c.weight == 0.0) continue;
        const auto& win = windows[wi++];
        auto term_log = [&](double x) {
            return std::log(c.weight) + gauss_log_pdf(x, c.mean, c.var) +
                   likelihood_log(ch, y, x);
        };
        const double shift = term_log(win.center);
        const double integral = integrate(
            [&](double x) { return std::exp(term_log(x) - shift); }, win.center,
            win.scale, spec);
        terms.push_back(shift + std::log(integral));
    }
    return log_sum_exp(terms);
}

double expect_prior(const InputDistribution& prior, const Fn& g,
                    const QuadratureSpec& spec) {
    if (prior.kind() == InputDistribution::Kind::discrete) {
        double sum = 0.0;
        for (const auto& atom : prior.atoms()) sum += atom.prob * g(atom.value);
        return sum;
    }
    double sum = 0.0;
    for (const auto& c : prior.components()) {
        if (c.weight == 0.0) continue;
        const double sd = std::sqrt(c.var);
        sum += c.weight * integrate(
                              [&](double x) {
                                  return std::exp(gauss_log_pdf(x, c.mean, c.var)) * g(x);
                              },
                              c.mean, sd, spec);
    }
    return sum;
}

double marginal_component_log(const ChannelModel& ch, std::size_t i, double y,
                              const QuadratureSpec& spec) {
    const auto& prior = ch.input();
    if (prior.kind() == InputDistribution::Kind::discrete) {
        const auto& atom = prior.atoms().at(i);
        if (atom.prob == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(atom.prob) + likelihood_log(ch, y, atom.value);
    }
    const auto& c = prior.components().at(i);
    if (c.weight == 0.0) return -std::numeric_limits<double>::infinity();
    const double a = ch.gain();
    const double sv2 = ch.noise_var();
    const double prec = 1.0 / c.var + a * a / sv2;
    const double m = (c.mean / c.var + a * y / sv2) / prec;
    const double s = std::sqrt(1.0 / prec);
    auto term_log = [&](double x) {
        return std::log(c.weight) + gauss_log_pdf(x, c.mean, c.var) +
               likelihood_log(ch, y, x);
    };
    const double shift = term_log(m);
    const double integral =
        integrate([&](double x) { return std::exp(term_log(x) - shift); }, m, s, spec);
    return shift + std::log(integral);
}

namespace {

std::vector<std::pair<double, double>> merged_segments(
    const std::vector<GaussWindow>& windows, double tail_sigmas) {
    std::vector<std::pair<double, double>> segs;
    segs.reserve(windows.size());
    for (const auto& w : windows)
        segs.emplace_back(w.center - tail_sigmas * w.scale,
                          w.center + tail_sigmas * w.scale);
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

} // namespace

double expect_y(const ChannelModel& ch, const Fn& h, const QuadratureSpec& spec) {
    const auto windows = y_windows(ch);
    const bool discrete = ch.input().kind() == InputDistribution::Kind::discrete;
    const std::size_t count = discrete ? ch.input().atoms().size()
                                       : ch.input().components().size();

    const QuadratureSpec inner = spec.inner();
    if (spec.method == QuadratureSpec::Method::gauss_hermite) {
        const auto& rule = GaussHermiteRule::get(spec.gh_order);
        const double inv_sqrt_pi = 0.5641895835477563;
        double total = 0.0;
        std::size_t wi = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const double weight = discrete ? ch.input().atoms()[i].prob
                                           : ch.input().components()[i].weight;
            if (weight == 0.0) continue;
            const auto& win = windows[wi++];
            const double var = win.scale * win.scale;
            double sum = 0.0;
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                const double t = rule.nodes[j];
                if (std::abs(t) * std::numbers::sqrt2 > spec.tail_sigmas) continue;
                const double y = win.center + std::numbers::sqrt2 * win.scale * t;
                const double log_ratio = marginal_component_log(ch, i, y, inner) -
                                         gauss_log_pdf(y, win.center, var);
                const double v = h(y);
                if (!std::isfinite(v)) throw NonFiniteError("expect_y", y);
                sum += rule.weights[j] * std::exp(log_ratio) * v;
            }
            total += inv_sqrt_pi * sum;
        }
        return total;
    }

    double total = 0.0;
    for (const auto& [lo, hi] : merged_segments(windows, spec.tail_sigmas)) {
        total += integrate_interval(
            [&](double y) { return h(y) * std::exp(marginal_log(ch, y, inner)); }, lo,
            hi, spec);
    }
    return total;
}

std::uint64_t Rng::mix(std::uint64_t z) {
    // SplitMix64 finalizer.
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
    // xorshift128+ would do; SplitMix64 stepping is enough for this workload
    // and keeps the stream a pure function of the 64-bit state.
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::next_unit() {
    // 53-bit mantissa in (0,1); never returns 0 so log() below is safe.
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

double draw_input(const InputDistribution& prior, Rng& rng) {
    switch (prior.kind()) {
        case InputDistribution::Kind::gaussian: {
            const auto& c = prior.components()[0];
            return c.mean + std::sqrt(c.var) * rng.next_normal();
        }
        case InputDistribution::Kind::gaussian_mixture: {
            const double u = rng.next_unit();
            double acc = 0.0;
            const auto& comps = prior.components();
            for (const auto& c : comps) {
                acc += c.weight;
                if (u <= acc || &c == &comps.back())
                    return c.mean + std::sqrt(c.var) * rng.next_normal();
            }
            return comps.back().mean;  // unreachable
        }
        case InputDistribution::Kind::discrete: {
            const double u = rng.next_unit();
            double acc = 0.0;
            const auto& atoms = prior.atoms();
            for (const auto& a : atoms) {
                acc += a.prob;
                if (u <= acc || &a == &atoms.back()) return a.value;
            }
            return atoms.back().value;  // unreachable
        }
    }
    return 0.0;
}

SampleBatch sample(const ChannelModel& ch, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    SampleBatch batch{{}, {}, seed, ch};
    batch.xs.reserve(n);
    batch.ys.reserve(n);
    Rng rng(seed);
    const double noise_sd = std::sqrt(ch.noise_var());
    for (std::size_t i = 0; i < n; ++i) {
        const double x = draw_input(ch.input(), rng);
        const double y = ch.gain() * x + noise_sd * rng.next_normal();
        batch.xs.push_back(x);
        batch.ys.push_back(y);
    }
    return batch;
}

} // namespace regretlab
