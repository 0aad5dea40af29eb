#include "starsketch/sketch.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "binary_io.hpp"

namespace starsketch {

namespace {
constexpr std::array<char, 8> kMagic = {'S', 'T', 'A', 'R', 'S', 'K', 'C', 'H'};
}

SketchMatrix::SketchMatrix(HashFamily family)
    : family_(std::move(family)),
      fingerprint_(family_.fingerprint()),
      counters_(family_.size() * family_.range(), 0) {}

void SketchMatrix::update(ItemId item) {
    if (total_ == UINT64_MAX) throw std::overflow_error("sketch counter overflow");
    const std::uint64_t k = columns();
    std::uint64_t* row = counters_.data();
    for (const auto& h : family_.functions()) {
        ++row[h(item)];
        row += k;
    }
    ++total_;
}

void SketchMatrix::update(std::span<const ItemId> items) {
    if (items.size() > UINT64_MAX - total_) throw std::overflow_error("sketch counter overflow");
    const std::uint64_t k = columns();
    std::uint64_t* row = counters_.data();
    for (const auto& h : family_.functions()) {
        for (ItemId v : items) ++row[h(v)];
        row += k;
    }
    total_ += items.size();
}

void SketchMatrix::merge(const SketchMatrix& other) {
    if (fingerprint_ != other.fingerprint_ || !(family_ == other.family_)) {
        throw FamilyMismatch("cannot merge sketches built with different hash families");
    }
    if (other.total_ > UINT64_MAX - total_) throw std::overflow_error("sketch counter overflow");
    for (std::size_t i = 0; i < counters_.size(); ++i) counters_[i] += other.counters_[i];
    total_ += other.total_;
}

ProbabilityVector SketchMatrix::row_distribution(std::size_t i) const {
    if (i >= rows()) throw std::out_of_range("sketch row index out of range");
    if (total_ == 0) throw std::invalid_argument("row_distribution of an empty sketch");
    const auto counts = row(i);
    const auto m = static_cast<double>(total_);
    std::vector<double> w(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) w[j] = static_cast<double>(counts[j]) / m;
    return ProbabilityVector(std::move(w));
}

void SketchMatrix::save(std::ostream& out) const {
    out.write(kMagic.data(), kMagic.size());
    detail::write_u32(out, kFileVersion);
    const std::string header = family_.serialize();
    detail::write_u32(out, static_cast<std::uint32_t>(header.size()));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    detail::write_u64(out, rows());
    detail::write_u64(out, columns());
    detail::write_u64(out, total_);
    for (std::uint64_t c : counters_) detail::write_u64(out, c);
    if (!out) throw std::runtime_error("failed to write sketch");
}

SketchMatrix SketchMatrix::load(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw FormatError("not a sketch file (bad magic)");
    const std::uint32_t version = detail::read_u32(in);
    if (version != kFileVersion) {
        throw FormatError("unsupported sketch file version " + std::to_string(version));
    }
    const std::uint32_t header_size = detail::read_u32(in);
    if (header_size > (1u << 26)) throw FormatError("implausible sketch header size");
    std::string header(header_size, '\0');
    in.read(header.data(), header_size);
    if (!in) throw FormatError("truncated sketch header");
    SketchMatrix s(HashFamily::parse(header));
    const std::uint64_t t = detail::read_u64(in);
    const std::uint64_t k = detail::read_u64(in);
    if (t != s.rows() || k != s.columns()) throw FormatError("sketch dimensions disagree with its family");
    s.total_ = detail::read_u64(in);
    for (auto& c : s.counters_) c = detail::read_u64(in);
    for (std::size_t i = 0; i < s.rows(); ++i) {
        std::uint64_t sum = 0;
        for (std::uint64_t c : s.row(i)) sum += c;
        if (sum != s.total_) throw FormatError("sketch row " + std::to_string(i) + " does not sum to total");
    }
    return s;
}

void SketchMatrix::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    save(out);
}

SketchMatrix SketchMatrix::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return load(in);
}

SketchMatrix new_sketch(const HashFamily& family) { return SketchMatrix(family); }

SketchMatrix merge(SketchMatrix a, const SketchMatrix& b) {
    a.merge(b);
    return a;
}

SketchMatrix build_sketch(const HashFamily& family, std::span<const ItemId> items) {
    SketchMatrix s(family);
    s.update(items);
    return s;
}

}  // namespace starsketch
