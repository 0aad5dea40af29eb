#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "starsketch/common.hpp"

namespace starsketch {

/// Dense vector of nonnegative weights over an explicitly ordered universe.
class ProbabilityVector {
public:
    static constexpr double kNormalizationTolerance = 1e-9;

    ProbabilityVector() = default;
    /// Throws std::invalid_argument on a negative or non-finite weight.
    explicit ProbabilityVector(std::vector<double> weights);

    std::size_t size() const noexcept { return weights_.size(); }
    bool empty() const noexcept { return weights_.empty(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }
    auto begin() const noexcept { return weights_.begin(); }
    auto end() const noexcept { return weights_.end(); }

    double sum() const noexcept;
    bool is_normalized() const noexcept;

    friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

private:
    std::vector<double> weights_;
};

/// Assignment of positions [0, n) to exactly k nonempty cells. Cell labels
/// are dense in [0, k).
class Partition {
public:
    Partition() = default;
    /// Labels may be arbitrary; they are relabelled by order of first
    /// appearance so equal groupings compare equal.
    static Partition from_labels(std::span<const std::size_t> labels);
    static Partition from_cells(const std::vector<std::vector<std::size_t>>& cells, std::size_t n);
    static Partition singletons(std::size_t n);

    std::size_t universe_size() const noexcept { return labels_.size(); }
    std::size_t cell_count() const noexcept { return cell_count_; }
    std::size_t cell_of(std::size_t position) const { return labels_[position]; }
    std::span<const std::size_t> labels() const noexcept { return labels_; }
    std::vector<std::vector<std::size_t>> cells() const;

    /// True when every cell of `*this` lies inside a cell of `coarser`.
    bool refines(const Partition& coarser) const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::size_t> labels_;
    std::size_t cell_count_ = 0;
};

std::string to_string(const Partition& partition);

/// Sparse per-item counts of one stream.
class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;

    void add(ItemId item, std::uint64_t count = 1);

    std::uint64_t total() const noexcept { return total_; }
    std::size_t distinct() const noexcept { return counts_.size(); }
    std::uint64_t count(ItemId item) const;
    std::uint64_t max_count() const noexcept;
    const std::unordered_map<ItemId, std::uint64_t>& counts() const noexcept { return counts_; }

    /// Support in ascending item order.
    std::vector<ItemId> support() const;

    friend bool operator==(const EmpiricalDistribution&, const EmpiricalDistribution&) = default;

private:
    std::unordered_map<ItemId, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

EmpiricalDistribution from_stream(std::span<const ItemId> items);

/// Sorted union of both supports.
std::vector<ItemId> union_universe(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Entry i = count(universe[i]) / total. Throws std::invalid_argument when the
/// stream is empty.
ProbabilityVector normalize(const EmpiricalDistribution& d, std::span<const ItemId> universe);

/// Cell masses of `p` under `partition`. Throws std::invalid_argument when the
/// partition is over a different number of positions.
ProbabilityVector aggregate(const ProbabilityVector& p, const Partition& partition);

/// Integer cell counts of `d` over `universe` grouped by `partition`.
std::vector<std::uint64_t> aggregate_counts(const EmpiricalDistribution& d,
                                            std::span<const ItemId> universe,
                                            const Partition& partition);

/// Cell counts divided by the stream total; bit-identical to dividing any
/// other integer representation of the same cell counts by the same total.
ProbabilityVector aggregate(const EmpiricalDistribution& d, std::span<const ItemId> universe,
                            const Partition& partition);

/// Exact S(n, k) by the additive recurrence. Requires k <= n <= 26.
std::uint64_t stirling(std::size_t n, std::size_t k);

/// min(S(n, k), cap + 1) with saturating arithmetic; defined for any n.
std::uint64_t stirling_capped(std::size_t n, std::size_t k, std::uint64_t cap);

inline constexpr std::uint64_t kDefaultPartitionBudget = 10'000'000;

/// Streams every partition of [0, n) into exactly k cells as a restricted
/// growth string, in lexicographic order.
///
///     PartitionEnumerator e(4, 2);
///     do { use(e.labels()); } while (e.next());
class PartitionEnumerator {
public:
    /// Throws std::invalid_argument unless 1 <= k <= n, and BudgetExceeded when
    /// S(n, k) > budget.
    PartitionEnumerator(std::size_t n, std::size_t k,
                        std::uint64_t budget = kDefaultPartitionBudget);

    std::span<const std::size_t> labels() const noexcept { return labels_; }
    Partition partition() const { return Partition::from_labels(labels_); }
    std::uint64_t index() const noexcept { return index_; }
    std::uint64_t count() const noexcept { return count_; }

    /// Advances to the next partition; false once exhausted.
    bool next();

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<std::size_t> labels_;
    std::vector<std::size_t> prefix_max_;  // max label over labels_[0..i]
    std::uint64_t index_ = 0;
    std::uint64_t count_ = 0;
};

/// Every partition of [0, n) into k cells, materialized.
std::vector<Partition> enumerate_partitions(std::size_t n, std::size_t k,
                                            std::uint64_t budget = kDefaultPartitionBudget);

/// CSV `item,count` preceded by a `# total=m` line.
void write_histogram_csv(std::ostream& out, const EmpiricalDistribution& d);
EmpiricalDistribution read_histogram_csv(std::istream& in);

}  // namespace starsketch
