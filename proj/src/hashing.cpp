#include "starsketch/hashing.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace starsketch {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = master;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t step : path) {
        state = out ^ (step * 0xd1b54a32d192ed03ULL);
        out = splitmix64(state);
    }
    return out;
}

namespace {

// Uniform in [0, bound) by rejection on the smallest covering bit mask.
std::uint64_t draw_below(std::uint64_t& state, std::uint64_t bound) {
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
        const std::uint64_t v = splitmix64(state) & mask;
        if (v < bound) return v;
    }
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

HashFunction::HashFunction(std::uint64_t a, std::uint64_t b, std::uint64_t prime,
                           std::uint64_t range)
    : a_(a), b_(b), prime_(prime), range_(range) {
    if (prime < 2 || prime > kMersenne61) {
        throw std::invalid_argument("hash prime must lie in [2, 2^61 - 1]");
    }
    if (a == 0 || a >= prime || b >= prime) {
        throw std::invalid_argument("hash parameters require 1 <= a < P and 0 <= b < P");
    }
    if (range == 0) throw std::invalid_argument("hash range must be at least 1");
}

HashFamily::HashFamily(std::vector<HashFunction> functions, std::uint64_t seed)
    : functions_(std::move(functions)), seed_(seed) {
    if (functions_.empty()) throw std::invalid_argument("hash family needs at least one function");
    range_ = functions_.front().range();
    prime_ = functions_.front().prime();
    for (const auto& h : functions_) {
        if (h.range() != range_ || h.prime() != prime_) {
            throw std::invalid_argument("hash family members must share k and P");
        }
    }
}

HashFamily HashFamily::create(std::size_t t, std::uint64_t k, std::uint64_t seed,
                              std::uint64_t prime) {
    if (t == 0) throw std::invalid_argument("hash family size t must be at least 1");
    if (k == 0) throw std::invalid_argument("hash range k must be at least 1");
    std::vector<HashFunction> functions;
    functions.reserve(t);
    for (std::size_t i = 0; i < t; ++i) {
        std::uint64_t state = derive_seed(seed, {i});
        const std::uint64_t a = 1 + draw_below(state, prime - 1);
        const std::uint64_t b = draw_below(state, prime);
        functions.emplace_back(a, b, prime, k);
    }
    return HashFamily(std::move(functions), seed);
}

std::string HashFamily::serialize() const {
    std::ostringstream out;
    out << size() << ' ' << range_ << ' ' << prime_ << ' ' << seed_ << '\n';
    for (const auto& h : functions_) out << h.a() << ' ' << h.b() << '\n';
    return out.str();
}

HashFamily HashFamily::parse(const std::string& text) {
    std::istringstream in(text);
    std::size_t t = 0;
    std::uint64_t k = 0, prime = 0, seed = 0;
    if (!(in >> t >> k >> prime >> seed) || t == 0) {
        throw FormatError("malformed hash family header");
    }
    std::vector<HashFunction> functions;
    functions.reserve(t);
    for (std::size_t i = 0; i < t; ++i) {
        std::uint64_t a = 0, b = 0;
        if (!(in >> a >> b)) throw FormatError("truncated hash family parameters");
        try {
            functions.emplace_back(a, b, prime, k);
        } catch (const std::invalid_argument& e) {
            throw FormatError(std::string("invalid hash family parameters: ") + e.what());
        }
    }
    return HashFamily(std::move(functions), seed);
}

std::uint64_t HashFamily::fingerprint() const { return fnv1a(serialize()); }

HashFamily new_family(std::size_t t, std::uint64_t k, std::uint64_t universe_bound,
                      std::uint64_t seed, std::uint64_t prime) {
    if (universe_bound == 0) throw std::invalid_argument("universe bound must be at least 1");
    if (universe_bound > prime) {
        throw std::invalid_argument("universe bound exceeds the hash prime");
    }
    return HashFamily::create(t, k, seed, prime);
}

SketchDimensions dimensions_for(double epsilon, double delta) {
    if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("need epsilon > 0 and 0 < delta < 1");
    }
    const auto k = static_cast<std::uint64_t>(std::ceil(2.0 / epsilon));
    const auto t = static_cast<std::size_t>(std::ceil(std::log(1.0 / delta)));
    return {k, t == 0 ? std::size_t{1} : t};
}

InducedPartition induced_partition(const HashFunction& h, std::span<const ItemId> universe) {
    std::vector<std::size_t> labels(universe.size());
    for (std::size_t i = 0; i < universe.size(); ++i) labels[i] = static_cast<std::size_t>(h(universe[i]));
    InducedPartition out{Partition::from_labels(labels), {}};
    out.cell_hash.resize(out.partition.cell_count());
    for (std::size_t i = 0; i < universe.size(); ++i) out.cell_hash[out.partition.cell_of(i)] = labels[i];
    return out;
}

}  // namespace starsketch
