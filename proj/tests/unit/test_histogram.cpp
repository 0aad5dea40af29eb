#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "starsketch/histogram.hpp"

using namespace starsketch;

namespace {
std::uint64_t stirling_alternating(int n, int k) {
    // (1/k!) sum_j (-1)^{k-j} C(k,j) j^n, exact in 128-bit for n <= 10
    __int128 sum = 0, binom = 1;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) binom = binom * (k - j + 1) / j;
        __int128 pw = 1;
        for (int e = 0; e < n; ++e) pw *= j;
        sum += ((k - j) % 2 ? -1 : 1) * binom * pw;
    }
    __int128 fact = 1;
    for (int i = 2; i <= k; ++i) fact *= i;
    return static_cast<std::uint64_t>(sum / fact);
}
}  // namespace

TEST_CASE("from_stream") {
    CHECK(from_stream({}).total() == 0);
    const std::vector<ItemId> s{5, 5, 7};
    const auto d = from_stream(s);
    CHECK(d.total() == 3);
    CHECK(d.count(5) == 2);
    CHECK(d.count(7) == 1);
    CHECK(d.count(6) == 0);
    CHECK(d.distinct() == 2);
    CHECK(d.max_count() == 2);
    CHECK(d.support() == std::vector<ItemId>{5, 7});
}

TEST_CASE("normalize") {
    const std::vector<ItemId> one{1};
    const auto d1 = from_stream(one);
    CHECK(normalize(d1, one) == ProbabilityVector({1.0}));
    const std::vector<ItemId> s{5, 5, 7};
    const std::vector<ItemId> u{5, 7};
    const auto p = normalize(from_stream(s), u);
    CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const std::vector<ItemId> s2{1, 2, 3, 3};
    const std::vector<ItemId> u2{1, 2, 3, 4};
    CHECK(normalize(from_stream(s2), u2) == ProbabilityVector({0.25, 0.25, 0.5, 0.0}));
    CHECK_THROWS_AS(normalize(EmpiricalDistribution{}, u2), std::invalid_argument);
}

TEST_CASE("ProbabilityVector validation") {
    CHECK_THROWS_AS(ProbabilityVector({0.5, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(ProbabilityVector({0.5, NAN}), std::invalid_argument);
    CHECK(ProbabilityVector({0.5, 0.5}).is_normalized());
    CHECK_FALSE(ProbabilityVector({2.0, 1.0}).is_normalized());
}

TEST_CASE("aggregate") {
    const ProbabilityVector p({0.1, 0.2, 0.3, 0.4});
    const auto rho = Partition::from_cells({{0, 2}, {1, 3}}, 4);
    const auto a = aggregate(p, rho);
    CHECK(a[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(a[1] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(aggregate(p, Partition::singletons(4)) == p);
    const auto b = aggregate(ProbabilityVector({0.5, 0.3, 0.2}), Partition::from_cells({{0}, {1, 2}}, 3));
    CHECK(b[0] == 0.5);
    CHECK(b[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(aggregate(p, Partition::singletons(3)), std::invalid_argument);
}

TEST_CASE("aggregate preserves mass and singletons permute") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 30;
        std::vector<double> w(n);
        for (auto& x : w) x = std::uniform_real_distribution<double>(0, 1)(rng);
        const ProbabilityVector p(w);
        const std::size_t k = 1 + rng() % n;
        std::vector<std::size_t> labels(n);
        for (auto& l : labels) l = rng() % k;
        const auto agg = aggregate(p, Partition::from_labels(labels));
        CHECK(std::abs(agg.sum() - p.sum()) <= 1e-12);
    }
}

TEST_CASE("Partition canonical form") {
    const std::vector<std::size_t> l1{7, 7, 3, 9}, l2{0, 0, 1, 2};
    CHECK(Partition::from_labels(l1) == Partition::from_labels(l2));
    const auto p = Partition::from_labels(l1);
    CHECK(p.cell_count() == 3);
    CHECK(to_string(p) == "{{1,2},{3},{4}}");
    CHECK(Partition::singletons(4).refines(p));
    CHECK_FALSE(p.refines(Partition::singletons(4)));
    CHECK_THROWS_AS(Partition::from_cells({{0, 1}, {1, 2}}, 3), std::invalid_argument);
    CHECK_THROWS_AS(Partition::from_cells({{0, 1}}, 3), std::invalid_argument);
    CHECK_THROWS_AS(Partition::from_cells({{0, 1}, {}, {2}}, 3), std::invalid_argument);
}

TEST_CASE("enumeration: n=3, k=2 in lexicographic order") {
    const auto parts = enumerate_partitions(3, 2);
    REQUIRE(parts.size() == 3);
    CHECK(to_string(parts[0]) == "{{1,2},{3}}");
    CHECK(to_string(parts[1]) == "{{1,3},{2}}");
    CHECK(to_string(parts[2]) == "{{1},{2,3}}");
}

TEST_CASE("enumeration boundaries") {
    const auto all = enumerate_partitions(5, 5);
    REQUIRE(all.size() == 1);
    CHECK(all[0] == Partition::singletons(5));
    CHECK(enumerate_partitions(5, 1).size() == 1);
    CHECK(enumerate_partitions(4, 2).size() == 7);
    CHECK_THROWS_AS(PartitionEnumerator(3, 0), std::invalid_argument);
    CHECK_THROWS_AS(PartitionEnumerator(3, 4), std::invalid_argument);
    CHECK_THROWS_AS(PartitionEnumerator(12, 4, 1000), BudgetExceeded);
}

TEST_CASE("enumeration counts match brute force and the alternating sum") {
    for (std::size_t k = 1; k <= 6; ++k) CHECK(stirling(6, k) == fixtures::kStirlingBrute_6[k - 1]);
    for (int n = 1; n <= 10; ++n) {
        for (int k = 1; k <= n; ++k) {
            PartitionEnumerator e(n, k);
            std::uint64_t count = 0;
            std::set<std::vector<std::size_t>> seen;
            do {
                ++count;
                const auto lab = e.labels();
                // restricted growth: each label at most one above the running max
                std::size_t mx = 0;
                for (std::size_t i = 0; i < lab.size(); ++i) {
                    REQUIRE(lab[i] <= (i == 0 ? 0 : mx + 1));
                    mx = std::max(mx, lab[i]);
                }
                REQUIRE(mx + 1 == static_cast<std::size_t>(k));
                if (n <= 7) REQUIRE(seen.insert({lab.begin(), lab.end()}).second);
            } while (e.next());
            CHECK(count == stirling(n, k));
            CHECK(count == stirling_alternating(n, k));
            CHECK(e.count() == count);
        }
    }
    CHECK(stirling(10, 3) == fixtures::kStirling_10_3);
    CHECK(stirling(4, 2) == 7);
}

TEST_CASE("stirling boundaries and range") {
    for (std::size_t n = 1; n <= 26; ++n) {
        CHECK(stirling(n, 1) == 1);
        CHECK(stirling(n, n) == 1);
    }
    CHECK(stirling(0, 0) == 1);
    CHECK(stirling(5, 0) == 0);
    CHECK(stirling(26, 13) == 1850568574253550060ULL);
    CHECK_THROWS_AS(stirling(27, 3), std::out_of_range);
    CHECK(stirling_capped(40, 4, 1000) == 1001);
    CHECK(stirling_capped(10, 3, 1'000'000) == 9330);
}

TEST_CASE("histogram CSV round trip") {
    const std::vector<ItemId> s{3, 1, 3, 99, 3};
    const auto d = from_stream(s);
    std::stringstream io;
    write_histogram_csv(io, d);
    CHECK(io.str() == "# total=5\nitem,count\n1,1\n3,3\n99,1\n");
    CHECK(read_histogram_csv(io) == d);
    std::stringstream bad("# total=4\nitem,count\n1,1\n3,3\n99,1\n");
    CHECK_THROWS_AS(read_histogram_csv(bad), FormatError);
    std::stringstream junk("item,count\n1,x\n");
    CHECK_THROWS_AS(read_histogram_csv(junk), FormatError);
}

TEST_CASE("count aggregation equals vector aggregation") {
    const std::vector<ItemId> s{1, 2, 2, 3, 3, 3, 4};
    const auto d = from_stream(s);
    const std::vector<ItemId> u{1, 2, 3, 4};
    const auto rho = Partition::from_cells({{0, 3}, {1, 2}}, 4);
    CHECK(aggregate_counts(d, u, rho) == std::vector<std::uint64_t>{2, 5});
    const auto via_counts = aggregate(d, u, rho);
    CHECK(via_counts[0] == 2.0 / 7.0);
    CHECK(via_counts[1] == 5.0 / 7.0);
}
