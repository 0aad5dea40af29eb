#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "starsketch/hashing.hpp"
#include "starsketch/histogram.hpp"

namespace starsketch {

/// t x k counter grid updated once per row for every arriving item.
///
/// Invariant: every row sums to total(). Counters only grow. Single writer;
/// parallel ingestion goes through per-worker sketches and merge().
class SketchMatrix {
public:
    static constexpr std::uint32_t kFileVersion = 1;

    explicit SketchMatrix(HashFamily family);

    const HashFamily& family() const noexcept { return family_; }
    std::uint64_t family_fingerprint() const noexcept { return fingerprint_; }
    std::size_t rows() const noexcept { return family_.size(); }
    std::uint64_t columns() const noexcept { return family_.range(); }
    std::uint64_t total() const noexcept { return total_; }

    std::uint64_t at(std::size_t row, std::uint64_t column) const {
        return counters_[row * columns() + column];
    }
    std::span<const std::uint64_t> row(std::size_t i) const {
        return std::span<const std::uint64_t>(counters_).subspan(i * columns(), columns());
    }
    std::span<const std::uint64_t> counters() const noexcept { return counters_; }

    /// Throws std::overflow_error instead of wrapping at 2^64 - 1 arrivals.
    void update(ItemId item);
    void update(std::span<const ItemId> items);

    /// Adds `other` cellwise. Throws FamilyMismatch on differing families.
    void merge(const SketchMatrix& other);

    /// Row counters over total. Throws std::invalid_argument on an empty
    /// sketch and std::out_of_range for a bad row.
    ProbabilityVector row_distribution(std::size_t i) const;

    void save(std::ostream& out) const;
    static SketchMatrix load(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static SketchMatrix load(const std::filesystem::path& path);

    friend bool operator==(const SketchMatrix&, const SketchMatrix&) = default;

private:
    HashFamily family_;
    std::uint64_t fingerprint_;
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> counters_;
};

SketchMatrix new_sketch(const HashFamily& family);
SketchMatrix merge(SketchMatrix a, const SketchMatrix& b);

/// Convenience: one pass of `items` into a fresh sketch.
SketchMatrix build_sketch(const HashFamily& family, std::span<const ItemId> items);

}  // namespace starsketch
