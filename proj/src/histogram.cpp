#include "starsketch/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace starsketch {

// ---------------------------------------------------------------------------
// ProbabilityVector

ProbabilityVector::ProbabilityVector(std::vector<double> weights) : weights_(std::move(weights)) {
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("probability weights must be finite and nonnegative");
        }
    }
}

double ProbabilityVector::sum() const noexcept {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

bool ProbabilityVector::is_normalized() const noexcept {
    return std::abs(sum() - 1.0) <= kNormalizationTolerance;
}

// ---------------------------------------------------------------------------
// Partition

Partition Partition::from_labels(std::span<const std::size_t> labels) {
    Partition out;
    out.labels_.resize(labels.size());
    std::unordered_map<std::size_t, std::size_t> relabel;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = relabel.emplace(labels[i], relabel.size());
        out.labels_[i] = it->second;
    }
    out.cell_count_ = relabel.size();
    return out;
}

Partition Partition::from_cells(const std::vector<std::vector<std::size_t>>& cells, std::size_t n) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> labels(n, unset);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) throw std::invalid_argument("partition cells must be nonempty");
        for (std::size_t i : cells[c]) {
            if (i >= n) throw std::invalid_argument("partition cell member outside the universe");
            if (labels[i] != unset) throw std::invalid_argument("partition cells must be disjoint");
            labels[i] = c;
        }
    }
    if (std::find(labels.begin(), labels.end(), unset) != labels.end()) {
        throw std::invalid_argument("partition cells must cover the universe");
    }
    return from_labels(labels);
}

Partition Partition::singletons(std::size_t n) {
    Partition out;
    out.labels_.resize(n);
    std::iota(out.labels_.begin(), out.labels_.end(), std::size_t{0});
    out.cell_count_ = n;
    return out;
}

std::vector<std::vector<std::size_t>> Partition::cells() const {
    std::vector<std::vector<std::size_t>> out(cell_count_);
    for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(i);
    return out;
}

bool Partition::refines(const Partition& coarser) const {
    if (coarser.universe_size() != universe_size()) return false;
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(cell_count_, unset);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        std::size_t& p = parent[labels_[i]];
        if (p == unset) {
            p = coarser.labels_[i];
        } else if (p != coarser.labels_[i]) {
            return false;
        }
    }
    return true;
}

std::string to_string(const Partition& partition) {
    std::ostringstream out;
    out << '{';
    bool first_cell = true;
    for (const auto& cell : partition.cells()) {
        out << (first_cell ? "{" : ",{");
        first_cell = false;
        for (std::size_t j = 0; j < cell.size(); ++j) out << (j ? "," : "") << cell[j] + 1;
        out << '}';
    }
    out << '}';
    return out.str();
}

// ---------------------------------------------------------------------------
// EmpiricalDistribution

void EmpiricalDistribution::add(ItemId item, std::uint64_t count) {
    if (count == 0) return;
    counts_[item] += count;
    total_ += count;
}

std::uint64_t EmpiricalDistribution::count(ItemId item) const {
    auto it = counts_.find(item);
    return it == counts_.end() ? 0 : it->second;
}

std::uint64_t EmpiricalDistribution::max_count() const noexcept {
    std::uint64_t best = 0;
    for (const auto& [item, c] : counts_) best = std::max(best, c);
    return best;
}

std::vector<ItemId> EmpiricalDistribution::support() const {
    std::vector<ItemId> out;
    out.reserve(counts_.size());
    for (const auto& [item, c] : counts_) out.push_back(item);
    std::sort(out.begin(), out.end());
    return out;
}

EmpiricalDistribution from_stream(std::span<const ItemId> items) {
    EmpiricalDistribution d;
    for (ItemId v : items) d.add(v);
    return d;
}

std::vector<ItemId> union_universe(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    std::vector<ItemId> out = a.support();
    for (const auto& [item, c] : b.counts()) {
        if (a.count(item) == 0) out.push_back(item);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ProbabilityVector normalize(const EmpiricalDistribution& d, std::span<const ItemId> universe) {
    if (d.total() == 0) throw std::invalid_argument("cannot normalize an empty stream");
    std::vector<double> w(universe.size());
    const auto m = static_cast<double>(d.total());
    for (std::size_t i = 0; i < universe.size(); ++i) {
        w[i] = static_cast<double>(d.count(universe[i])) / m;
    }
    return ProbabilityVector(std::move(w));
}

ProbabilityVector aggregate(const ProbabilityVector& p, const Partition& partition) {
    if (partition.universe_size() != p.size()) {
        throw std::invalid_argument("partition does not cover the vector's universe");
    }
    std::vector<double> out(partition.cell_count(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) out[partition.cell_of(i)] += p[i];
    return ProbabilityVector(std::move(out));
}

std::vector<std::uint64_t> aggregate_counts(const EmpiricalDistribution& d,
                                            std::span<const ItemId> universe,
                                            const Partition& partition) {
    if (partition.universe_size() != universe.size()) {
        throw std::invalid_argument("partition does not cover the universe");
    }
    std::vector<std::uint64_t> out(partition.cell_count(), 0);
    for (std::size_t i = 0; i < universe.size(); ++i) {
        out[partition.cell_of(i)] += d.count(universe[i]);
    }
    return out;
}

ProbabilityVector aggregate(const EmpiricalDistribution& d, std::span<const ItemId> universe,
                            const Partition& partition) {
    if (d.total() == 0) throw std::invalid_argument("cannot normalize an empty stream");
    const auto counts = aggregate_counts(d, universe, partition);
    const auto m = static_cast<double>(d.total());
    std::vector<double> w(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) w[c] = static_cast<double>(counts[c]) / m;
    return ProbabilityVector(std::move(w));
}

// ---------------------------------------------------------------------------
// Stirling numbers

std::uint64_t stirling(std::size_t n, std::size_t k) {
    if (n > 26) throw std::out_of_range("stirling: n > 26 exceeds exact 64-bit range");
    if (k > n) throw std::out_of_range("stirling: k > n");
    return stirling_capped(n, k, UINT64_MAX - 1);
}

std::uint64_t stirling_capped(std::size_t n, std::size_t k, std::uint64_t cap) {
    if (k > n) return 0;
    const std::uint64_t saturated = cap == UINT64_MAX ? cap : cap + 1;
    auto clamp = [&](unsigned __int128 v) -> std::uint64_t {
        return v > saturated ? saturated : static_cast<std::uint64_t>(v);
    };
    // row[j] = S(i, j) for the current i, saturated at cap + 1.
    std::vector<std::uint64_t> row(k + 1, 0);
    row[0] = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = std::min(i, k); j >= 1; --j) {
            const unsigned __int128 v =
                static_cast<unsigned __int128>(j) * row[j] + row[j - 1];
            row[j] = clamp(v);
        }
        row[0] = 0;
    }
    return row[k];
}

// ---------------------------------------------------------------------------
// Restricted-growth-string enumeration

PartitionEnumerator::PartitionEnumerator(std::size_t n, std::size_t k, std::uint64_t budget)
    : n_(n), k_(k), labels_(n, 0), prefix_max_(n, 0) {
    if (k == 0 || k > n) throw std::invalid_argument("partition enumeration needs 1 <= k <= n");
    count_ = stirling_capped(n, k, budget);
    if (count_ > budget) {
        throw BudgetExceeded("S(" + std::to_string(n) + ", " + std::to_string(k) +
                             ") exceeds the partition budget of " + std::to_string(budget));
    }
    // Lexicographically smallest string that still reaches k cells.
    for (std::size_t j = 1; j < n_; ++j) {
        const std::size_t cur = prefix_max_[j - 1];
        labels_[j] = cur + (n_ - 1 - j) >= k_ - 1 ? 0 : cur + 1;
        prefix_max_[j] = std::max(cur, labels_[j]);
    }
}

bool PartitionEnumerator::next() {
    for (std::size_t i = n_; i-- > 1;) {
        const std::size_t limit = std::min(k_ - 1, prefix_max_[i - 1] + 1);
        if (labels_[i] >= limit) continue;
        const std::size_t value = labels_[i] + 1;
        const std::size_t cur = std::max(prefix_max_[i - 1], value);
        if (cur + (n_ - 1 - i) < k_ - 1) continue;
        labels_[i] = value;
        prefix_max_[i] = cur;
        for (std::size_t j = i + 1; j < n_; ++j) {
            const std::size_t m = prefix_max_[j - 1];
            labels_[j] = m + (n_ - 1 - j) >= k_ - 1 ? 0 : m + 1;
            prefix_max_[j] = std::max(m, labels_[j]);
        }
        ++index_;
        return true;
    }
    return false;
}

std::vector<Partition> enumerate_partitions(std::size_t n, std::size_t k, std::uint64_t budget) {
    PartitionEnumerator e(n, k, budget);
    std::vector<Partition> out;
    out.reserve(e.count());
    do {
        out.push_back(e.partition());
    } while (e.next());
    return out;
}

// ---------------------------------------------------------------------------
// CSV

void write_histogram_csv(std::ostream& out, const EmpiricalDistribution& d) {
    out << "# total=" << d.total() << '\n' << "item,count\n";
    for (ItemId item : d.support()) out << item << ',' << d.count(item) << '\n';
}

EmpiricalDistribution read_histogram_csv(std::istream& in) {
    std::string line;
    std::optional<std::uint64_t> declared;
    EmpiricalDistribution d;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("# total=", 0) == 0) {
            declared = std::stoull(line.substr(8));
            continue;
        }
        if (line[0] == '#' || line == "item,count") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw FormatError("histogram line " + std::to_string(line_no) + ": expected item,count");
        }
        try {
            d.add(std::stoull(line.substr(0, comma)), std::stoull(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw FormatError("histogram line " + std::to_string(line_no) + ": bad integer");
        }
    }
    if (!declared) throw FormatError("histogram is missing the '# total=' header");
    if (*declared != d.total()) throw FormatError("histogram total does not match its counts");
    return d;
}

}  // namespace starsketch
