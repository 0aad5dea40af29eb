#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "starsketch/generators.hpp"

namespace starsketch {

/// Either a synthetic family or a stream file on disk.
struct StreamSource {
    std::optional<DistributionFamily> family;
    std::filesystem::path file;

    static StreamSource parse(const std::string& text, std::uint64_t default_n);
    std::string describe() const;
};

struct StreamPair {
    StreamSource first;
    StreamSource second;
    std::string id() const;
};

/// Plan file grammar (one `key = value` per line, `#` starts a comment):
///
///     pair = uniform vs pascal:r=3      # repeatable; `file:path` also allowed
///     divergences = js,kl,bhattacharyya
///     k = 50,100,200
///     t = 4
///     trials = 100
///     m = 200000
///     n = 4000
///     seed = 1
///     alpha_smoothing = 0
///     threads = 1
struct ExperimentPlan {
    std::vector<StreamPair> pairs;
    std::vector<std::string> divergences;
    std::vector<std::uint64_t> k_values;
    std::vector<std::size_t> t_values;
    std::size_t trials = 1;
    std::uint64_t m = 200'000;
    std::uint64_t n = 4'000;
    std::uint64_t master_seed = 1;
    double alpha_smoothing = 0.0;
    unsigned threads = 1;

    /// Throws std::invalid_argument for empty sweeps, zero values, or unknown
    /// divergences; FormatError for unreadable stream files.
    void validate() const;

    static ExperimentPlan parse(std::istream& in);
    static ExperimentPlan parse_file(const std::filesystem::path& path);
    std::string to_text() const;
};

struct ResultRow {
    std::string pair;
    std::string phi;
    std::uint64_t k = 0;
    std::size_t t = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double ref = 0.0;
    double sketch = 0.0;
    double abs_error = 0.0;  // NaN unless both values are finite
    std::size_t argmax_row = 0;
    double alpha_smoothing = 0.0;
    // Timing; kept out of results.csv so that file stays byte-reproducible.
    double build_seconds = 0.0;   // both sketches of the pair
    double query_seconds = 0.0;
    std::uint64_t updates = 0;    // items absorbed by both sketches

    double runtime_seconds() const { return build_seconds + query_seconds; }
    double updates_per_second() const;

    bool infinite() const;
};

/// Raised when a monotone divergence's sketch estimate exceeds its
/// reference value on some row (with no smoothing).
class SandwichViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<ResultRow> run_plan(const ExperimentPlan& plan);

struct SummaryRow {
    std::string pair;
    std::string phi;
    std::uint64_t k = 0;
    std::size_t t = 0;
    std::size_t rows = 0;
    std::size_t finite_rows = 0;
    std::size_t infinite_rows = 0;
    double mean_ref = 0.0;
    double mean_sketch = 0.0;
    double mean_difference = 0.0;  // sketch - ref
    double mean_abs_error = 0.0;
    double stdev_ref = 0.0;
    double stdev_sketch = 0.0;
    double stdev_abs_error = 0.0;
};

/// Groups by (pair, phi, k, t); means over finite rows only.
std::vector<SummaryRow> sweep_summary(const std::vector<ResultRow>& rows);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);
void write_timing_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Writes results.csv, summary.csv, timing.csv and manifest.txt into `dir`.
void run_plan_to_directory(const ExperimentPlan& plan, const std::filesystem::path& dir);

/// Formats a double for CSV output: shortest round-trip form, `inf`, `nan`.
std::string format_double(double v);

extern const char* const kVersion;

}  // namespace starsketch
