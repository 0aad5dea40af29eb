#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "starsketch/histogram.hpp"

namespace starsketch {

// All logarithms are base 2; results are in bits. +infinity is a legal value.

double entropy(const ProbabilityVector& p);
double cross_entropy(const ProbabilityVector& p, const ProbabilityVector& q);

double kl(const ProbabilityVector& p, const ProbabilityVector& q);
double js(const ProbabilityVector& p, const ProbabilityVector& q);
double bhattacharyya_coefficient(const ProbabilityVector& p, const ProbabilityVector& q);
double bhattacharyya(const ProbabilityVector& p, const ProbabilityVector& q);
double hellinger(const ProbabilityVector& p, const ProbabilityVector& q);
double total_variation(const ProbabilityVector& p, const ProbabilityVector& q);

/// Convex f on (0, inf) with f(1) = 0 plus the limits used at zero cells.
/// A std::nullopt limit means "does not exist"; meeting the corresponding
/// zero pattern raises DomainError.
struct FGenerator {
    std::function<double(double)> f;
    std::optional<double> limit_at_zero;      // lim_{u->0} f(u)
    std::optional<double> slope_at_infinity;  // lim_{u->inf} f(u)/u
};

FGenerator kl_generator();
FGenerator js_generator();
FGenerator total_variation_generator();
FGenerator squared_hellinger_generator();

/// sum_i q_i f(p_i / q_i) with 0 f(0/0) = 0, a f(0/a) = a f(0+),
/// 0 f(a/0) = a lim f(u)/u.
double f_divergence(const FGenerator& gen, const ProbabilityVector& p, const ProbabilityVector& q);

/// Strictly convex F on (0, 1] and its derivative, evaluated at 0 as limits
/// (F'(0) may be -inf).
struct BregmanGenerator {
    std::function<double(double)> F;
    std::function<double(double)> derivative;
};

BregmanGenerator entropy_bregman_generator();   // F(t) = t log2 t, F(0) = 0
BregmanGenerator squared_bregman_generator();   // F(t) = t^2

/// F1 + lambda F2.
BregmanGenerator combine(const BregmanGenerator& first, const BregmanGenerator& second,
                         double lambda);

/// sum_i F(p_i) - F(q_i) - (p_i - q_i) F'(q_i); identical coordinates
/// contribute 0. Throws DomainError when F'(q_i) is NaN with p_i != q_i.
double bregman(const BregmanGenerator& gen, const ProbabilityVector& p, const ProbabilityVector& q);

/// Additive smoothing: add alpha to each entry and renormalize. alpha = 0 is
/// the identity.
ProbabilityVector smooth(const ProbabilityVector& p, double alpha);

struct DivergenceFlags {
    bool nonneg = true;
    bool identity = true;
    bool symmetric = false;
    bool triangle = false;
    bool f_div = false;
    bool bregman = false;
    bool monotone = false;  // never increases under aggregation; implied by f_div
};

using DivergenceFunction = std::function<double(const ProbabilityVector&, const ProbabilityVector&)>;

struct DivergenceSpec {
    std::string name;
    DivergenceFunction eval;
    DivergenceFlags flags;
    std::optional<FGenerator> f_generator;
    std::optional<BregmanGenerator> bregman_generator;

    double operator()(const ProbabilityVector& p, const ProbabilityVector& q) const {
        return eval(p, q);
    }
};

/// Looks up "kl", "js", "bhattacharyya", "hellinger", "tv", or a registered
/// custom divergence. Throws std::invalid_argument for unknown names.
const DivergenceSpec& divergence_by_name(const std::string& name);
std::vector<std::string> divergence_names();

/// Registers an f-divergence under `name` (flags nonneg, identity, f_div).
void register_f_divergence(const std::string& name, FGenerator gen, bool symmetric = false);
/// Registers a Bregman divergence under `name` (flags nonneg, identity, bregman).
void register_bregman_divergence(const std::string& name, BregmanGenerator gen);

}  // namespace starsketch
