#include <doctest.h>
#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "starsketch/ingest.hpp"

using namespace starsketch;

namespace {
const char* kSample =
    "199.72.81.55 - - [01/Jul/1995:00:00:01 -0400] \"GET /history/apollo/ HTTP/1.0\" 200 6245\n"
    "unicomp6.unicomp.net - - [01/Jul/1995:00:00:06 -0400] \"GET /shuttle/countdown/ HTTP/1.0\" 200 3985\n"
    "\n"
    "burger.letters.com - - [01/Jul/1995:00:00:11 -0400] \"GET /history/apollo/ HTTP/1.0\" 304 0\n"
    "garbage line without quotes\r\n"
    "d104.aa.net - - [01/Jul/1995:00:00:13 -0400] \"GET /x\" 200 1\r\n"
    "h - - [01/Jul/1995:00:00:13 -0400] \"\" 400 -\n"
    "tail - - [01/Jul/1995:00:00:14 -0400] \"GET /history/apollo/ HTTP/1.0\" 200 6245";
}

TEST_CASE("CLF line parsing") {
    auto r = parse_clf_line(
        "host - - [01/Jul/1995:00:00:01 -0400] \"GET /history/apollo/ HTTP/1.0\" 200 6245");
    CHECK(r.valid);
    CHECK(r.request_target == "/history/apollo/");
    CHECK_FALSE(parse_clf_line("").valid);
    r = parse_clf_line("h - - [d] \"GET /x\" 200 1");
    CHECK(r.valid);
    CHECK(r.request_target == "/x");
    CHECK_FALSE(parse_clf_line("h - - [d] \"GET\" 200 1").valid);
    CHECK_FALSE(parse_clf_line("h - - [d] \"GET /unterminated 200 1").valid);
    CHECK(parse_clf_line("h - - [d] \"GET /q?a=1&b=2 HTTP/1.0\" 200 1").request_target == "/q?a=1&b=2");
}

TEST_CASE("item ids") {
    CHECK(target_to_item("/a") == target_to_item("/a"));
    CHECK(target_to_item("/a") != target_to_item("/A"));
    CHECK(target_to_item("") == 0xcbf29ce484222325ULL);
    std::set<ItemId> ids;
    for (int i = 0; i < 100000; ++i) ids.insert(target_to_item("/path/" + std::to_string(i) + ".html"));
    CHECK(ids.size() == 100000);
}

TEST_CASE("trace stats") {
    CHECK(trace_stats(std::vector<LogRecord>{}) == TraceStats{});
    std::istringstream in(kSample);
    const auto res = ingest_clf(in);
    CHECK(res.stats.items == 5);
    CHECK(res.stats.distinct == 3);
    CHECK(res.stats.max_frequency == 3);
    CHECK(res.stats.malformed == 3);
    CHECK(res.stats.lines() == 8);
    CHECK(res.items.size() == 5);
    CHECK(trace_stats(from_stream(res.items), res.stats.malformed) == res.stats);

    std::vector<LogRecord> records;
    std::istringstream again(kSample);
    std::string line;
    while (std::getline(again, line)) records.push_back(parse_clf_line(line));
    CHECK(trace_stats(records).items == 5);
}

TEST_CASE("plain and gzip files give identical results") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto plain = dir / "starsketch_unit.log", gz = dir / "starsketch_unit.log.gz";
    std::string big;
    for (int i = 0; i < 20000; ++i) {
        big += "h - - [01/Jul/1995:00:00:01 -0400] \"GET /p" + std::to_string(i % 777) + " HTTP/1.0\" 200 1\n";
    }
    big += kSample;
    {
        std::ofstream out(plain, std::ios::binary);
        out << big;
    }
    {
        gzFile f = gzopen(gz.c_str(), "wb");
        REQUIRE(f != nullptr);
        gzwrite(f, big.data(), static_cast<unsigned>(big.size()));
        gzclose(f);
    }
    const auto a = ingest_clf_file(plain);
    const auto b = ingest_clf_file(gz);
    std::istringstream in(big);
    const auto c = ingest_clf(in);
    CHECK(a.stats == b.stats);
    CHECK(a.items == b.items);
    CHECK(a.items == c.items);
    CHECK(a.stats.items == 20005);
    CHECK(a.stats.distinct == 780);
    std::filesystem::remove(plain);
    std::filesystem::remove(gz);
    CHECK_THROWS(ingest_clf_file(dir / "does_not_exist.log"));
}

TEST_CASE("CSV outputs") {
    std::istringstream in(kSample);
    const auto res = ingest_clf(in);
    std::ostringstream stats, freq;
    write_trace_stats_csv(stats, res.stats);
    CHECK(stats.str() ==
          "metric,value\nitems,5\ndistinct,3\nmax_frequency,3\nmalformed,3\nitem_fingerprint_version,1\n");
    write_rank_frequency_csv(freq, res.histogram);
    CHECK(freq.str() == "rank,frequency\n1,3\n2,1\n3,1\n");
}
