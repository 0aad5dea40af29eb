#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "starsketch/common.hpp"
#include "starsketch/histogram.hpp"

namespace starsketch {

struct LogRecord {
    std::string raw_line;
    std::string request_target;
    bool valid = false;
};

/// Extracts the URL of a Common Log Format line, i.e. the second token of
/// the quoted request. Never throws; malformed lines come back invalid.
LogRecord parse_clf_line(std::string_view line);

inline constexpr std::uint32_t kItemFingerprintVersion = 1;

/// 64-bit FNV-1a of the exact (case-sensitive) target string.
ItemId target_to_item(std::string_view target) noexcept;

struct TraceStats {
    std::uint64_t items = 0;
    std::uint64_t distinct = 0;
    std::uint64_t max_frequency = 0;
    std::uint64_t malformed = 0;

    /// Input lines seen, valid or not.
    std::uint64_t lines() const noexcept { return items + malformed; }

    friend bool operator==(const TraceStats&, const TraceStats&) = default;
};

/// Stats over the valid records; invalid ones are only counted.
TraceStats trace_stats(const std::vector<LogRecord>& records);

/// Stats of an already-derived item stream.
TraceStats trace_stats(const EmpiricalDistribution& histogram, std::uint64_t malformed = 0);

struct IngestResult {
    std::vector<ItemId> items;
    EmpiricalDistribution histogram;
    TraceStats stats;
};

/// Single pass over CLF text from `in`.
IngestResult ingest_clf(std::istream& in);

/// Reads a plain or gzip-compressed CLF file.
IngestResult ingest_clf_file(const std::filesystem::path& path);

/// `metric,value` rows.
void write_trace_stats_csv(std::ostream& out, const TraceStats& stats);

/// `rank,frequency` rows in descending frequency.
void write_rank_frequency_csv(std::ostream& out, const EmpiricalDistribution& histogram);

}  // namespace starsketch
