#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "starsketch/generators.hpp"
#include "starsketch/histogram.hpp"

using namespace starsketch;

namespace {
void check_against(const ProbabilityVector& got, const double* expected, std::size_t n) {
    REQUIRE(got.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}
}  // namespace

TEST_CASE("pmf values") {
    CHECK(pmf(DistributionFamily::uniform(4)) == ProbabilityVector({0.25, 0.25, 0.25, 0.25}));
    const auto z = pmf(DistributionFamily::zipf(3, 1.0));
    CHECK(z[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(3.0 / 11.0).epsilon(1e-15));
    CHECK(z[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-15));
    check_against(pmf(DistributionFamily::zipf(20, 2.0)), fixtures::kZipf2_20, 20);
    check_against(pmf(DistributionFamily::pascal(20, 3.0)), fixtures::kPascal20, 20);
    check_against(pmf(DistributionFamily::poisson(20)), fixtures::kPoisson20, 20);
    check_against(pmf(DistributionFamily::binomial(20, 0.5)), fixtures::kBinomial20, 20);
}

TEST_CASE("pascal default probability") {
    const auto fam = DistributionFamily::pascal(4000, 3.0);
    CHECK(fam.effective_p() == doctest::Approx(4000.0 / 4006.0).epsilon(1e-15));
    CHECK(DistributionFamily::poisson(4000).effective_lambda() == 2000.0);
}

TEST_CASE("every pmf sums to one") {
    for (const char* spec : {"uniform", "zipf:alpha=1", "zipf:alpha=2", "zipf:alpha=4", "pascal:r=3", "pascal:r=10",
                             "binomial", "binomial:p=0.9", "poisson", "poisson:lambda=3"}) {
        const auto p = pmf(DistributionFamily::parse(spec, 4000));
        CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
        for (double v : p) CHECK(v >= 0.0);
    }
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(DistributionFamily::zipf(10, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DistributionFamily::pascal(10, 0.5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DistributionFamily::pascal(10, 3.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DistributionFamily::binomial(10, 1.5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DistributionFamily::poisson(10, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DistributionFamily::uniform(0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DistributionFamily::parse("gauss", 10), std::invalid_argument);
    CHECK_THROWS_AS(DistributionFamily::parse("zipf:beta=1", 10), std::invalid_argument);
    CHECK_THROWS_AS(DistributionFamily::parse("zipf:alpha=x", 10), std::invalid_argument);
}

TEST_CASE("describe and parse round trip") {
    for (const char* spec : {"uniform", "zipf:alpha=1.5", "pascal:r=3", "binomial:p=0.25", "poisson:lambda=7",
                             "zipf:alpha=1,shuffle=9"}) {
        const auto fam = DistributionFamily::parse(spec, 100);
        const auto again = DistributionFamily::parse(fam.describe());
        CHECK(again.describe() == fam.describe());
        CHECK(pmf(again) == pmf(fam));
    }
    CHECK(DistributionFamily::zipf(4000, 1.0).describe() == "zipf:n=4000,alpha=1");
}

TEST_CASE("shuffling permutes the pmf") {
    auto fam = DistributionFamily::zipf(50, 1.0);
    const auto plain = pmf(fam);
    fam.shuffle_seed = 3;
    const auto shuffled = pmf(fam);
    CHECK_FALSE(plain == shuffled);
    std::vector<double> a(plain.begin(), plain.end()), b(shuffled.begin(), shuffled.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("sampling basics") {
    const auto fam = DistributionFamily::pascal(4000, 3.0);
    CHECK(sample_stream(fam, 0, 1).empty());
    const auto s = sample_stream(fam, 200000, 7);
    CHECK(s.size() == 200000);
    for (auto x : s) REQUIRE((x >= 1 && x <= 4000));
    CHECK(s == sample_stream(fam, 200000, 7));
    CHECK_FALSE(s == sample_stream(fam, 200000, 8));
}

TEST_CASE("inverse CDF sampler") {
    const InverseCdfSampler sampler(ProbabilityVector({0.25, 0.0, 0.75}));
    CHECK(sampler(0.0) == 0);
    CHECK(sampler(0.2499) == 0);
    CHECK(sampler(0.25) == 2);
    CHECK(sampler(0.9999999) == 2);
    CHECK(unit_interval(0) == 0.0);
    CHECK(unit_interval(~0ULL) < 1.0);
}

TEST_CASE("uniform frequencies within 5 sigma") {
    const std::uint64_t n = 100, m = 1'000'000;
    const auto s = sample_stream(DistributionFamily::uniform(n), m, 11);
    const auto h = from_stream(s);
    const double p = 1.0 / n;
    const double sigma = std::sqrt(m * p * (1 - p));
    for (ItemId i = 1; i <= n; ++i) CHECK(std::abs(static_cast<double>(h.count(i)) - m * p) <= 5 * sigma);
}

TEST_CASE("chi-squared goodness of fit, m = 10^6, n = 100") {
    const std::uint64_t n = 100, m = 1'000'000;
    std::uint64_t seed = 21;
    for (const char* spec : {"uniform", "zipf:alpha=1", "pascal:r=3", "binomial", "poisson"}) {
        const auto fam = DistributionFamily::parse(spec, n);
        const auto p = pmf(fam);
        const auto h = from_stream(sample_stream(fam, m, seed++));
        // Pool cells with expected count < 5 (binomial tails) into one bin.
        double chi2 = 0.0, pooled_e = 0.0, pooled_o = 0.0;
        std::size_t bins = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = m * p[i];
            const double o = static_cast<double>(h.count(i + 1));
            if (e < 5.0) {
                pooled_e += e;
                pooled_o += o;
                continue;
            }
            chi2 += (o - e) * (o - e) / e;
            ++bins;
        }
        if (pooled_e > 0.0) {
            chi2 += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
            ++bins;
        }
        INFO(spec << " chi2=" << chi2 << " bins=" << bins);
        if (bins == n) {
            CHECK(chi2 < fixtures::kChi2_999_df99);
        } else {
            // fewer bins means fewer degrees of freedom; the df=99 quantile is then looser,
            // so use the Wilson-Hilferty approximation for the matching quantile
            const double df = static_cast<double>(bins - 1);
            const double z = 3.090232306167813;  // standard normal 0.999 quantile
            const double q = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
            CHECK(chi2 < q);
        }
    }
}

TEST_CASE("stream file round trip") {
    const auto fam = DistributionFamily::zipf(4000, 1.0);
    StreamFile f{4000, fam.describe(), sample_stream(fam, 1000, 3)};
    std::stringstream io;
    write_stream(io, f);
    const auto back = read_stream(io);
    CHECK(back.universe == 4000);
    CHECK(back.descriptor == "zipf:n=4000,alpha=1");
    CHECK(back.items == f.items);
    std::stringstream bad("STARSTRMjunk");
    CHECK_THROWS_AS(read_stream(bad), FormatError);
    const auto path = std::filesystem::temp_directory_path() / "starsketch_unit.bin";
    write_stream(path, f);
    CHECK(read_stream(path).items == f.items);
    std::filesystem::remove(path);
}
