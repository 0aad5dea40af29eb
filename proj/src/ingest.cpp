#include "starsketch/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace starsketch {

LogRecord parse_clf_line(std::string_view line) {
    LogRecord record;
    record.raw_line.assign(line);
    // host ident user [date] "request" status bytes
    const auto open = line.find('"');
    if (open == std::string_view::npos) return record;
    const auto close = line.find('"', open + 1);
    if (close == std::string_view::npos) return record;
    const std::string_view request = line.substr(open + 1, close - open - 1);

    auto skip_spaces = [&](std::size_t pos) {
        while (pos < request.size() && (request[pos] == ' ' || request[pos] == '\t')) ++pos;
        return pos;
    };
    auto token_end = [&](std::size_t pos) {
        while (pos < request.size() && request[pos] != ' ' && request[pos] != '\t') ++pos;
        return pos;
    };
    const std::size_t method_begin = skip_spaces(0);
    const std::size_t method_end = token_end(method_begin);
    if (method_end == method_begin) return record;
    const std::size_t target_begin = skip_spaces(method_end);
    const std::size_t target_end = token_end(target_begin);
    if (target_end == target_begin) return record;
    record.request_target.assign(request.substr(target_begin, target_end - target_begin));
    record.valid = true;
    return record;
}

ItemId target_to_item(std::string_view target) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : target) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

TraceStats trace_stats(const std::vector<LogRecord>& records) {
    EmpiricalDistribution histogram;
    std::uint64_t malformed = 0;
    for (const auto& r : records) {
        if (r.valid) histogram.add(target_to_item(r.request_target));
        else ++malformed;
    }
    return trace_stats(histogram, malformed);
}

TraceStats trace_stats(const EmpiricalDistribution& histogram, std::uint64_t malformed) {
    return {histogram.total(), histogram.distinct(), histogram.max_count(), malformed};
}

namespace {

template <typename NextLine>
IngestResult ingest_lines(NextLine&& next_line) {
    IngestResult result;
    std::string line;
    while (next_line(line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto record = parse_clf_line(line);
        if (!record.valid) {
            ++result.stats.malformed;
            continue;
        }
        const ItemId id = target_to_item(record.request_target);
        result.items.push_back(id);
        result.histogram.add(id);
    }
    result.stats = trace_stats(result.histogram, result.stats.malformed);
    return result;
}

}  // namespace

IngestResult ingest_clf(std::istream& in) {
    return ingest_lines([&](std::string& line) { return static_cast<bool>(std::getline(in, line)); });
}

IngestResult ingest_clf_file(const std::filesystem::path& path) {
    // gzread passes uncompressed files through unchanged.
    std::unique_ptr<gzFile_s, decltype(&gzclose)> file(gzopen(path.c_str(), "rb"), &gzclose);
    if (!file) throw std::runtime_error("cannot open " + path.string());
    std::vector<char> buffer(1 << 16);
    std::string pending;
    std::size_t start = 0;
    bool eof = false;
    auto next_line = [&](std::string& line) -> bool {
        for (;;) {
            const auto nl = pending.find('\n', start);
            if (nl != std::string::npos) {
                line.assign(pending, start, nl - start);
                start = nl + 1;
                return true;
            }
            pending.erase(0, start);
            start = 0;
            if (eof) {
                if (pending.empty()) return false;
                line = std::move(pending);
                pending.clear();
                return true;
            }
            const int got = gzread(file.get(), buffer.data(), static_cast<unsigned>(buffer.size()));
            if (got < 0) {
                int err = 0;
                throw std::runtime_error(path.string() + ": " + gzerror(file.get(), &err));
            }
            if (got == 0) eof = true;
            pending.append(buffer.data(), static_cast<std::size_t>(got));
        }
    };
    return ingest_lines(next_line);
}

void write_trace_stats_csv(std::ostream& out, const TraceStats& stats) {
    out << "metric,value\n"
        << "items," << stats.items << '\n'
        << "distinct," << stats.distinct << '\n'
        << "max_frequency," << stats.max_frequency << '\n'
        << "malformed," << stats.malformed << '\n'
        << "item_fingerprint_version," << kItemFingerprintVersion << '\n';
}

void write_rank_frequency_csv(std::ostream& out, const EmpiricalDistribution& histogram) {
    std::vector<std::uint64_t> freq;
    freq.reserve(histogram.distinct());
    for (const auto& [item, c] : histogram.counts()) freq.push_back(c);
    std::sort(freq.begin(), freq.end(), std::greater<>());
    out << "rank,frequency\n";
    for (std::size_t i = 0; i < freq.size(); ++i) out << i + 1 << ',' << freq[i] << '\n';
}

}  // namespace starsketch
