#include "starsketch/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "binary_io.hpp"

namespace starsketch {

namespace {
constexpr std::array<char, 8> kStreamMagic = {'S', 'T', 'A', 'R', 'S', 'T', 'R', 'M'};

std::string format_param(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}
}  // namespace

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::uniform: return "uniform";
        case FamilyKind::zipf: return "zipf";
        case FamilyKind::pascal: return "pascal";
        case FamilyKind::binomial: return "binomial";
        case FamilyKind::poisson: return "poisson";
    }
    return "?";
}

DistributionFamily DistributionFamily::uniform(std::uint64_t n) {
    DistributionFamily d;
    d.kind = FamilyKind::uniform;
    d.n = n;
    return d;
}

DistributionFamily DistributionFamily::zipf(std::uint64_t n, double alpha) {
    DistributionFamily d;
    d.kind = FamilyKind::zipf;
    d.n = n;
    d.alpha = alpha;
    return d;
}

DistributionFamily DistributionFamily::pascal(std::uint64_t n, double r, double p) {
    DistributionFamily d;
    d.kind = FamilyKind::pascal;
    d.n = n;
    d.r = r;
    d.p = p;
    return d;
}

DistributionFamily DistributionFamily::binomial(std::uint64_t n, double p) {
    DistributionFamily d;
    d.kind = FamilyKind::binomial;
    d.n = n;
    d.p = p;
    return d;
}

DistributionFamily DistributionFamily::poisson(std::uint64_t n, double lambda) {
    DistributionFamily d;
    d.kind = FamilyKind::poisson;
    d.n = n;
    d.lambda = lambda;
    return d;
}

double DistributionFamily::effective_p() const {
    if (p >= 0.0) return p;
    if (kind == FamilyKind::pascal) {
        const double nd = static_cast<double>(n);
        return nd / (2.0 * r + nd);
    }
    return 0.5;
}

double DistributionFamily::effective_lambda() const {
    return lambda >= 0.0 ? lambda : static_cast<double>(n) / 2.0;
}

void DistributionFamily::validate() const {
    if (n == 0) throw std::invalid_argument("distribution universe n must be at least 1");
    switch (kind) {
        case FamilyKind::uniform: break;
        case FamilyKind::zipf:
            if (!(alpha > 0.0)) throw std::invalid_argument("zipf requires alpha > 0");
            break;
        case FamilyKind::pascal: {
            const double pe = effective_p();
            if (!(r >= 1.0)) throw std::invalid_argument("pascal requires r >= 1");
            if (!(pe > 0.0 && pe < 1.0)) throw std::invalid_argument("pascal requires 0 < p < 1");
            break;
        }
        case FamilyKind::binomial: {
            const double pe = effective_p();
            if (!(pe >= 0.0 && pe <= 1.0)) throw std::invalid_argument("binomial requires 0 <= p <= 1");
            break;
        }
        case FamilyKind::poisson:
            if (!(effective_lambda() > 0.0)) throw std::invalid_argument("poisson requires lambda > 0");
            break;
    }
}

std::string DistributionFamily::describe() const {
    std::string out = to_string(kind) + ":n=" + std::to_string(n);
    switch (kind) {
        case FamilyKind::uniform: break;
        case FamilyKind::zipf: out += ",alpha=" + format_param(alpha); break;
        case FamilyKind::pascal:
            out += ",r=" + format_param(r) + ",p=" + format_param(effective_p());
            break;
        case FamilyKind::binomial: out += ",p=" + format_param(effective_p()); break;
        case FamilyKind::poisson: out += ",lambda=" + format_param(effective_lambda()); break;
    }
    if (shuffle_seed) out += ",shuffle=" + std::to_string(*shuffle_seed);
    return out;
}

DistributionFamily DistributionFamily::parse(const std::string& text, std::uint64_t default_n) {
    const auto colon = text.find(':');
    const std::string kind_name = text.substr(0, colon);
    DistributionFamily d;
    if (kind_name == "uniform") d.kind = FamilyKind::uniform;
    else if (kind_name == "zipf") d.kind = FamilyKind::zipf;
    else if (kind_name == "pascal") d.kind = FamilyKind::pascal;
    else if (kind_name == "binomial") d.kind = FamilyKind::binomial;
    else if (kind_name == "poisson") d.kind = FamilyKind::poisson;
    else throw std::invalid_argument("unknown distribution family '" + kind_name + "'");
    d.n = default_n;
    if (colon != std::string::npos) {
        std::istringstream params(text.substr(colon + 1));
        std::string kv;
        while (std::getline(params, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            try {
                if (key == "n") d.n = std::stoull(value);
                else if (key == "alpha") d.alpha = std::stod(value);
                else if (key == "r") d.r = std::stod(value);
                else if (key == "p") d.p = std::stod(value);
                else if (key == "lambda") d.lambda = std::stod(value);
                else if (key == "shuffle") d.shuffle_seed = std::stoull(value);
                else throw std::invalid_argument("unknown distribution parameter '" + key + "'");
            } catch (const std::out_of_range&) {
                throw std::invalid_argument("parameter out of range: " + kv);
            }
        }
    }
    d.validate();
    return d;
}

ProbabilityVector pmf(const DistributionFamily& family) {
    family.validate();
    const std::size_t n = family.n;
    std::vector<double> w(n);
    switch (family.kind) {
        case FamilyKind::uniform:
            std::fill(w.begin(), w.end(), 1.0);
            break;
        case FamilyKind::zipf:
            for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i + 1), -family.alpha);
            break;
        case FamilyKind::pascal: {
            // P(x) = C(x + r - 1, x) p^x (1 - p)^r at x = item value.
            const double r = family.r;
            const double p = family.effective_p();
            std::vector<double> logs(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = static_cast<double>(i + 1);
                logs[i] = std::lgamma(x + r) - std::lgamma(r) - std::lgamma(x + 1.0) +
                          x * std::log(p) + r * std::log1p(-p);
            }
            const double top = *std::max_element(logs.begin(), logs.end());
            for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(logs[i] - top);
            break;
        }
        case FamilyKind::binomial: {
            // n - 1 trials shifted by one so the support is exactly [1..n].
            const double trials = static_cast<double>(n - 1);
            const double p = family.effective_p();
            if (n == 1) {
                w[0] = 1.0;
                break;
            }
            if (p == 0.0 || p == 1.0) {
                w[p == 0.0 ? 0 : n - 1] = 1.0;
                break;
            }
            std::vector<double> logs(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = static_cast<double>(i);
                logs[i] = std::lgamma(trials + 1.0) - std::lgamma(x + 1.0) - std::lgamma(trials - x + 1.0) +
                          x * std::log(p) + (trials - x) * std::log1p(-p);
            }
            const double top = *std::max_element(logs.begin(), logs.end());
            for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(logs[i] - top);
            break;
        }
        case FamilyKind::poisson: {
            const double lambda = family.effective_lambda();
            std::vector<double> logs(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = static_cast<double>(i + 1);
                logs[i] = x * std::log(lambda) - lambda - std::lgamma(x + 1.0);
            }
            const double top = *std::max_element(logs.begin(), logs.end());
            for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(logs[i] - top);
            break;
        }
    }
    if (family.shuffle_seed) {
        std::mt19937_64 rng(*family.shuffle_seed);
        for (std::size_t i = n; i > 1; --i) std::swap(w[i - 1], w[rng() % i]);
    }
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
    return ProbabilityVector(std::move(w));
}

InverseCdfSampler::InverseCdfSampler(const ProbabilityVector& pmf) : cdf_(pmf.size()) {
    if (pmf.empty()) throw std::invalid_argument("cannot sample from an empty pmf");
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        cdf_[i] = acc;
    }
    // Renormalize so the last entry is exactly 1 and every u < 1 lands.
    for (double& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
}

std::size_t InverseCdfSampler::operator()(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

std::vector<ItemId> sample_stream(const DistributionFamily& family, std::uint64_t m,
                                  std::uint64_t seed) {
    const InverseCdfSampler sampler(pmf(family));
    std::mt19937_64 rng(seed);
    std::vector<ItemId> out(m);
    for (auto& v : out) v = sampler(unit_interval(rng())) + 1;
    return out;
}

// ---------------------------------------------------------------------------
// Stream files

void write_stream(std::ostream& out, const StreamFile& stream) {
    out.write(kStreamMagic.data(), kStreamMagic.size());
    detail::write_u32(out, StreamFile::kVersion);
    detail::write_u64(out, stream.universe);
    detail::write_u64(out, stream.items.size());
    detail::write_u32(out, static_cast<std::uint32_t>(stream.descriptor.size()));
    out.write(stream.descriptor.data(), static_cast<std::streamsize>(stream.descriptor.size()));
    std::vector<char> buffer;
    buffer.reserve(8 * 4096);
    for (std::size_t i = 0; i < stream.items.size(); ++i) {
        const ItemId v = stream.items[i];
        for (int b = 0; b < 8; ++b) buffer.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
        if (buffer.size() >= 8 * 4096 || i + 1 == stream.items.size()) {
            out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
            buffer.clear();
        }
    }
    if (!out) throw std::runtime_error("failed to write stream");
}

StreamFile read_stream(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kStreamMagic) throw FormatError("not a stream file (bad magic)");
    const std::uint32_t version = detail::read_u32(in);
    if (version != StreamFile::kVersion) {
        throw FormatError("unsupported stream file version " + std::to_string(version));
    }
    StreamFile s;
    s.universe = detail::read_u64(in);
    const std::uint64_t m = detail::read_u64(in);
    const std::uint32_t desc_size = detail::read_u32(in);
    if (desc_size > (1u << 20)) throw FormatError("implausible stream descriptor size");
    s.descriptor.resize(desc_size);
    in.read(s.descriptor.data(), desc_size);
    if (!in) throw FormatError("truncated stream descriptor");
    s.items.resize(m);
    std::vector<unsigned char> buffer(8 * 4096);
    std::uint64_t done = 0;
    while (done < m) {
        const std::uint64_t chunk = std::min<std::uint64_t>(4096, m - done);
        in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(chunk * 8));
        if (!in) throw FormatError("truncated stream body");
        for (std::uint64_t i = 0; i < chunk; ++i) {
            ItemId v = 0;
            for (int b = 0; b < 8; ++b) v |= static_cast<ItemId>(buffer[i * 8 + b]) << (8 * b);
            s.items[done + i] = v;
        }
        done += chunk;
    }
    return s;
}

void write_stream(const std::filesystem::path& path, const StreamFile& stream) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_stream(out, stream);
}

StreamFile read_stream(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_stream(in);
}

}  // namespace starsketch
