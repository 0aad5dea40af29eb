#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "starsketch/common.hpp"
#include "starsketch/histogram.hpp"

namespace starsketch {

enum class FamilyKind { uniform, zipf, pascal, binomial, poisson };

/// One of the synthetic stream families over items [1..n]. Parameters that
/// do not apply to `kind` are ignored.
struct DistributionFamily {
    FamilyKind kind = FamilyKind::uniform;
    std::uint64_t n = 1;
    double alpha = 1.0;   // zipf exponent
    double r = 3.0;       // pascal stopping count
    double p = -1.0;      // pascal/binomial probability; < 0 selects the default
    double lambda = -1.0; // poisson mean; < 0 selects n / 2
    // When set, probabilities are permuted over items with this seed, so the
    // most likely item is no longer item 1.
    std::optional<std::uint64_t> shuffle_seed;

    static DistributionFamily uniform(std::uint64_t n);
    static DistributionFamily zipf(std::uint64_t n, double alpha);
    /// p defaults to n / (2r + n), which pins the mean at n / 2 for every r.
    static DistributionFamily pascal(std::uint64_t n, double r, double p = -1.0);
    static DistributionFamily binomial(std::uint64_t n, double p = 0.5);
    static DistributionFamily poisson(std::uint64_t n, double lambda = -1.0);

    double effective_p() const;
    double effective_lambda() const;

    /// Throws std::invalid_argument for out-of-range parameters.
    void validate() const;

    /// Round-trippable descriptor such as `zipf:n=4000,alpha=1`.
    std::string describe() const;
    /// Parses `kind[:key=value,...]`; `n` may be supplied as a default.
    static DistributionFamily parse(const std::string& text, std::uint64_t default_n = 0);
};

std::string to_string(FamilyKind kind);

/// Probabilities of items 1..n (entry i is item i + 1).
ProbabilityVector pmf(const DistributionFamily& family);

/// m i.i.d. inverse-CDF draws in [1..n], deterministic per seed.
std::vector<ItemId> sample_stream(const DistributionFamily& family, std::uint64_t m,
                                  std::uint64_t seed);

/// Inverse-CDF sampler over a fixed pmf.
class InverseCdfSampler {
public:
    explicit InverseCdfSampler(const ProbabilityVector& pmf);
    /// Index in [0, size) for u in [0, 1).
    std::size_t operator()(double u) const;
    std::size_t size() const noexcept { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
inline double unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Stream files: magic, version, n, m, descriptor, then m little-endian u64 ids.

struct StreamFile {
    static constexpr std::uint32_t kVersion = 1;

    std::uint64_t universe = 0;  // n, or 0 when unknown (real traces)
    std::string descriptor;
    std::vector<ItemId> items;
};

void write_stream(std::ostream& out, const StreamFile& stream);
StreamFile read_stream(std::istream& in);
void write_stream(const std::filesystem::path& path, const StreamFile& stream);
StreamFile read_stream(const std::filesystem::path& path);

}  // namespace starsketch
