#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "starsketch/common.hpp"
#include "starsketch/histogram.hpp"

namespace starsketch {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// Stateless splitmix64 step; used for seed splitting and parameter draws.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent sub-seed from a master seed and a path of indices.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Carter-Wegman function x -> ((a*x + b) mod P) mod k.
class HashFunction {
public:
    HashFunction(std::uint64_t a, std::uint64_t b, std::uint64_t prime, std::uint64_t range);

    std::uint64_t a() const noexcept { return a_; }
    std::uint64_t b() const noexcept { return b_; }
    std::uint64_t prime() const noexcept { return prime_; }
    std::uint64_t range() const noexcept { return range_; }

    // Items >= P are reduced mod P first.
    std::uint64_t operator()(ItemId x) const noexcept {
        if (prime_ == kMersenne61) {
            return mod_mersenne(static_cast<unsigned __int128>(a_) * mod_mersenne(x) + b_) % range_;
        }
        const unsigned __int128 v = static_cast<unsigned __int128>(a_) * (x % prime_) + b_;
        return static_cast<std::uint64_t>(v % prime_) % range_;
    }

    friend bool operator==(const HashFunction&, const HashFunction&) = default;

private:
    static std::uint64_t mod_mersenne(unsigned __int128 v) noexcept {
        std::uint64_t r = static_cast<std::uint64_t>(v & kMersenne61) +
                          static_cast<std::uint64_t>(v >> 61);
        r = (r & kMersenne61) + (r >> 61);
        return r >= kMersenne61 ? r - kMersenne61 : r;
    }

    std::uint64_t a_;
    std::uint64_t b_;
    std::uint64_t prime_;
    std::uint64_t range_;
};

inline std::uint64_t evaluate(const HashFunction& h, ItemId x) noexcept { return h(x); }

/// t independently seeded 2-universal functions sharing one range and prime.
/// Immutable; a pure function of (seed, t, k, P).
class HashFamily {
public:
    static HashFamily create(std::size_t t, std::uint64_t k, std::uint64_t seed,
                             std::uint64_t prime = kMersenne61);

    std::size_t size() const noexcept { return functions_.size(); }
    std::uint64_t range() const noexcept { return range_; }
    std::uint64_t prime() const noexcept { return prime_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const HashFunction& operator[](std::size_t i) const { return functions_[i]; }
    std::span<const HashFunction> functions() const noexcept { return functions_; }

    /// `t k P seed` followed by t lines `a b`.
    std::string serialize() const;
    static HashFamily parse(const std::string& text);

    /// FNV-1a digest of the serialized form.
    std::uint64_t fingerprint() const;

    friend bool operator==(const HashFamily&, const HashFamily&) = default;

private:
    HashFamily(std::vector<HashFunction> functions, std::uint64_t seed);

    std::vector<HashFunction> functions_;
    std::uint64_t range_ = 0;
    std::uint64_t prime_ = 0;
    std::uint64_t seed_ = 0;
};

/// Draws a family of t functions [universe_bound] -> [k]. Throws
/// std::invalid_argument for t = 0, k = 0, universe_bound = 0, or a universe
/// that does not fit under the prime.
HashFamily new_family(std::size_t t, std::uint64_t k, std::uint64_t universe_bound,
                      std::uint64_t seed, std::uint64_t prime = kMersenne61);

struct SketchDimensions {
    std::uint64_t k;
    std::size_t t;
};

/// Count-Min style conversion k = ceil(2/eps), t = ceil(ln(1/delta)). No
/// accuracy guarantee for divergence estimates is implied.
SketchDimensions dimensions_for(double epsilon, double delta);

/// Partition of `universe` (by position) grouping items with equal hash value.
/// Cells are labelled by first appearance in `universe`; hash values hit by no
/// item are dropped, so the cell count k' may be below k.
struct InducedPartition {
    Partition partition;
    std::vector<std::uint64_t> cell_hash;  // hash value of each cell
};

InducedPartition induced_partition(const HashFunction& h, std::span<const ItemId> universe);

}  // namespace starsketch
