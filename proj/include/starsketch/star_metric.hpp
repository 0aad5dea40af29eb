#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "starsketch/divergence.hpp"
#include "starsketch/histogram.hpp"
#include "starsketch/sketch.hpp"

namespace starsketch {

enum class StarMode { exact, approximate };

std::string to_string(StarMode mode);

struct StarMetricResult {
    double value = 0.0;
    // Exact mode: the first maximizing partition in enumeration order.
    // Approximate mode: the lowest maximizing sketch row.
    std::variant<Partition, std::size_t> argmax;
    StarMode mode = StarMode::exact;
    std::size_t k = 0;
    std::uint64_t evaluated_partitions = 0;

    const Partition& argmax_partition() const { return std::get<Partition>(argmax); }
    std::size_t argmax_row() const { return std::get<std::size_t>(argmax); }
};

struct ExactOptions {
    std::uint64_t budget = kDefaultPartitionBudget;
    unsigned threads = 1;
};

/// Max of phi over every k-cell aggregation of (p, q). For k > n the
/// divergence of the unaggregated pair is returned with the singleton
/// partition as argmax and zero evaluated partitions.
///
/// Throws std::invalid_argument on length mismatch or k = 0, BudgetExceeded
/// when S(n, k) > options.budget.
StarMetricResult exact_star_metric(const DivergenceSpec& phi, const ProbabilityVector& p,
                                   const ProbabilityVector& q, std::size_t k,
                                   const ExactOptions& options = {});

/// Max of phi over the t row pairs, each row normalized by its own stream
/// length. `alpha` is optional additive smoothing applied to each row.
///
/// Throws FamilyMismatch for sketches hashed differently and
/// std::invalid_argument when either sketch is empty.
StarMetricResult sketch_star_metric(const DivergenceSpec& phi, const SketchMatrix& first,
                                    const SketchMatrix& second, double alpha = 0.0);

/// phi on the full normalized distributions over the union of both supports.
double reference_distance(const DivergenceSpec& phi, const EmpiricalDistribution& first,
                          const EmpiricalDistribution& second, double alpha = 0.0);

// ---------------------------------------------------------------------------
// Property preservation suite

enum class CheckStatus { passed, failed, skipped, reported };

std::string to_string(CheckStatus status);

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::skipped;
    std::uint64_t cases = 0;
    std::uint64_t violations = 0;
    std::string witness;  // first violating case, or an informational note
};

struct PreservationReport {
    std::string divergence;
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<CheckResult> checks;

    bool passed() const;
    const CheckResult& check(const std::string& name) const;
};

struct PreservationOptions {
    double tolerance = 1e-9;
    std::uint64_t budget = kDefaultPartitionBudget;
    std::vector<double> lambdas = {0.0, 0.25, 0.5, 0.75, 1.0};
};

/// Runs the flag-selected checks on exact_star_metric over random
/// distributions of dimension n:
///   non_negativity, identity, symmetry (or asymmetry_witness), triangle,
///   monotonicity_coarse (coarsening to c >= k cells),
///   monotonicity_fine (coarsening to c < k cells), convexity,
///   bregman_linearity (<= asserted; equality reported), pythagorean.
PreservationReport preservation_suite(const DivergenceSpec& phi, std::size_t n, std::size_t k,
                                      std::size_t trials, std::uint64_t seed,
                                      const PreservationOptions& options = {});

/// Dirichlet(1, ..., 1) draw of dimension n.
ProbabilityVector random_distribution(std::size_t n, std::mt19937_64& rng);

/// Uniformly labelled random partition of [0, n) into exactly c cells.
Partition random_partition(std::size_t n, std::size_t c, std::mt19937_64& rng);

/// Distribution with the cell masses of `target` on `mu` and the within-cell
/// shape of `shape`: the I-projection of `shape` onto the set of
/// distributions sharing `target`'s mu-marginals.
ProbabilityVector project_onto_marginals(const ProbabilityVector& shape,
                                         const ProbabilityVector& target, const Partition& mu);

}  // namespace starsketch
