#include "starsketch/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace starsketch {

namespace {

void require_same_length(const ProbabilityVector& p, const ProbabilityVector& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("divergence operands differ in length (" +
                                    std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                                    ")");
    }
}

// p log2(p / q) with the 0 log(0/q) = 0 and p log(p/0) = inf conventions.
double relative_term(double p, double q) {
    if (p == 0.0) return 0.0;
    if (q == 0.0) return kInfinity;
    return p * std::log2(p / q);
}

}  // namespace

double entropy(const ProbabilityVector& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

double cross_entropy(const ProbabilityVector& p, const ProbabilityVector& q) {
    require_same_length(p, q);
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return kInfinity;
        h -= p[i] * std::log2(q[i]);
    }
    return h;
}

double kl(const ProbabilityVector& p, const ProbabilityVector& q) {
    require_same_length(p, q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == q[i]) continue;
        d += relative_term(p[i], q[i]);
        if (d == kInfinity) return d;
    }
    // Gibbs: rounding can leave a few ulps below zero.
    return std::max(d, 0.0);
}

double js(const ProbabilityVector& p, const ProbabilityVector& q) {
    require_same_length(p, q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == q[i]) continue;
        const double mid = 0.5 * (p[i] + q[i]);
        d += 0.5 * relative_term(p[i], mid) + 0.5 * relative_term(q[i], mid);
    }
    return std::clamp(d, 0.0, 1.0);
}

double bhattacharyya_coefficient(const ProbabilityVector& p, const ProbabilityVector& q) {
    require_same_length(p, q);
    double bc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
    return std::min(bc, 1.0);
}

double bhattacharyya(const ProbabilityVector& p, const ProbabilityVector& q) {
    if (p == q) return 0.0;
    const double bc = bhattacharyya_coefficient(p, q);
    if (bc == 0.0) return kInfinity;
    return std::max(0.0, -std::log2(bc));
}

double hellinger(const ProbabilityVector& p, const ProbabilityVector& q) {
    if (p == q) return 0.0;
    return std::sqrt(std::max(0.0, 1.0 - bhattacharyya_coefficient(p, q)));
}

double total_variation(const ProbabilityVector& p, const ProbabilityVector& q) {
    require_same_length(p, q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return 0.5 * d;
}

// ---------------------------------------------------------------------------
// f-divergences

FGenerator kl_generator() {
    return {[](double u) { return u == 0.0 ? 0.0 : u * std::log2(u); }, 0.0, kInfinity};
}

FGenerator js_generator() {
    // f(u) = (u log u - (u + 1) log((u + 1) / 2)) / 2
    return {[](double u) {
                const double a = u == 0.0 ? 0.0 : u * std::log2(u);
                return 0.5 * (a - (u + 1.0) * std::log2(0.5 * (u + 1.0)));
            },
            0.5, 0.5};
}

FGenerator total_variation_generator() {
    return {[](double u) { return 0.5 * std::abs(u - 1.0); }, 0.5, 0.5};
}

FGenerator squared_hellinger_generator() {
    // f(u) = (sqrt(u) - 1)^2 / 2, giving 1 - BC
    return {[](double u) {
                const double s = std::sqrt(u) - 1.0;
                return 0.5 * s * s;
            },
            0.5, 0.5};
}

double f_divergence(const FGenerator& gen, const ProbabilityVector& p, const ProbabilityVector& q) {
    require_same_length(p, q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i];
        const double qi = q[i];
        double term = 0.0;
        if (pi == qi) {
            term = 0.0;  // covers 0 f(0/0) and f(1) = 0
        } else if (qi == 0.0) {
            if (!gen.slope_at_infinity) {
                throw DomainError("f-divergence: lim f(u)/u undefined at index " + std::to_string(i), i);
            }
            term = pi * *gen.slope_at_infinity;
        } else if (pi == 0.0) {
            if (!gen.limit_at_zero) {
                throw DomainError("f-divergence: lim f(u) at 0 undefined at index " + std::to_string(i), i);
            }
            term = qi * *gen.limit_at_zero;
        } else {
            term = qi * gen.f(pi / qi);
        }
        d += term;
    }
    return std::max(d, 0.0);
}

// ---------------------------------------------------------------------------
// Bregman divergences

BregmanGenerator entropy_bregman_generator() {
    return {[](double t) { return t == 0.0 ? 0.0 : t * std::log2(t); },
            [](double t) { return t == 0.0 ? -kInfinity : std::log2(t) + 1.0 / std::log(2.0); }};
}

BregmanGenerator squared_bregman_generator() {
    return {[](double t) { return t * t; }, [](double t) { return 2.0 * t; }};
}

BregmanGenerator combine(const BregmanGenerator& first, const BregmanGenerator& second,
                         double lambda) {
    return {[f = first.F, g = second.F, lambda](double t) { return f(t) + lambda * g(t); },
            [f = first.derivative, g = second.derivative, lambda](double t) {
                const double b = g(t);
                // Avoid 0 * inf when lambda = 0.
                return lambda == 0.0 ? f(t) : f(t) + lambda * b;
            }};
}

double bregman(const BregmanGenerator& gen, const ProbabilityVector& p, const ProbabilityVector& q) {
    require_same_length(p, q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i];
        const double qi = q[i];
        if (pi == qi) continue;
        const double slope = gen.derivative(qi);
        if (std::isnan(slope)) {
            throw DomainError("bregman: F'(q) undefined at index " + std::to_string(i), i);
        }
        if (std::isinf(slope)) {
            // -(p - q) F'(q) dominates the finite F terms.
            const double linear = -(pi - qi) * slope;
            if (std::isnan(linear)) throw DomainError("bregman: indeterminate term at index " + std::to_string(i), i);
            if (linear == kInfinity) return kInfinity;
            d += linear;
            continue;
        }
        d += gen.F(pi) - gen.F(qi) - (pi - qi) * slope;
    }
    return std::max(d, 0.0);
}

ProbabilityVector smooth(const ProbabilityVector& p, double alpha) {
    if (alpha == 0.0) return p;
    if (!(alpha > 0.0)) throw std::invalid_argument("smoothing alpha must be nonnegative");
    const double total = p.sum() + alpha * static_cast<double>(p.size());
    std::vector<double> w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) w[i] = (p[i] + alpha) / total;
    return ProbabilityVector(std::move(w));
}

// ---------------------------------------------------------------------------
// Registry

namespace {

struct Registry {
    std::mutex mutex;
    std::map<std::string, std::unique_ptr<DivergenceSpec>> specs;

    Registry() {
        add({"kl", [](const auto& p, const auto& q) { return kl(p, q); },
             {.f_div = true, .bregman = true, .monotone = true},
             kl_generator(), entropy_bregman_generator()});
        add({"js", [](const auto& p, const auto& q) { return js(p, q); },
             {.symmetric = true, .f_div = true, .monotone = true},
             js_generator(), std::nullopt});
        add({"bhattacharyya", [](const auto& p, const auto& q) { return bhattacharyya(p, q); },
             {.symmetric = true, .monotone = true}, std::nullopt, std::nullopt});
        add({"hellinger", [](const auto& p, const auto& q) { return hellinger(p, q); },
             {.symmetric = true, .triangle = true, .monotone = true}, std::nullopt, std::nullopt});
        add({"tv", [](const auto& p, const auto& q) { return total_variation(p, q); },
             {.symmetric = true, .triangle = true, .f_div = true, .monotone = true},
             total_variation_generator(), std::nullopt});
    }

    void add(DivergenceSpec spec) {
        auto name = spec.name;
        specs[name] = std::make_unique<DivergenceSpec>(std::move(spec));
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

const DivergenceSpec& divergence_by_name(const std::string& name) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.specs.find(name);
    if (it == r.specs.end()) throw std::invalid_argument("unknown divergence '" + name + "'");
    return *it->second;
}

std::vector<std::string> divergence_names() {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> out;
    for (const auto& [name, spec] : r.specs) out.push_back(name);
    return out;
}

void register_f_divergence(const std::string& name, FGenerator gen, bool symmetric) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    if (r.specs.count(name)) throw std::invalid_argument("divergence '" + name + "' already registered");
    if (std::abs(gen.f(1.0)) > 1e-12) throw std::invalid_argument("f-divergence generator needs f(1) = 0");
    auto eval = [gen](const ProbabilityVector& p, const ProbabilityVector& q) {
        return f_divergence(gen, p, q);
    };
    r.add({name, eval, {.symmetric = symmetric, .f_div = true, .monotone = true}, gen, std::nullopt});
}

void register_bregman_divergence(const std::string& name, BregmanGenerator gen) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    if (r.specs.count(name)) throw std::invalid_argument("divergence '" + name + "' already registered");
    auto eval = [gen](const ProbabilityVector& p, const ProbabilityVector& q) {
        return bregman(gen, p, q);
    };
    r.add({name, eval, {.bregman = true}, std::nullopt, gen});
}

}  // namespace starsketch
