#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "scwd/errors.hpp"
#include "scwd/quantile.hpp"
#include "scwd/rng.hpp"

using namespace scwd;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> normal_sample(std::size_t n, double mu, double sd, std::uint64_t seed,
                                  std::uint64_t stream) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = mu + sd * rng::normal(seed, stream, i);
    return x;
}
}  // namespace

TEST_SUITE_BEGIN("quantile");

TEST_CASE("midpoint quantile grid") {
    const auto g = QuantileGrid::midpoints();
    REQUIRE(g.size() == 200);
    CHECK(g.levels.front() == doctest::Approx(0.0025).epsilon(1e-15));
    CHECK(g.levels.back() == doctest::Approx(0.9975).epsilon(1e-15));
    CHECK(std::is_sorted(g.levels.begin(), g.levels.end()));
    CHECK(g.levels.front() > 0.0);
    CHECK(g.levels.back() < 1.0);
    CHECK_THROWS_AS(QuantileGrid::midpoints(0), InvalidArgumentError);
}

TEST_CASE("empirical quantiles") {
    const auto g = QuantileGrid::midpoints();
    SUBCASE("single observation") {
        const std::vector<double> s = {5.0};
        const auto q = empirical_quantiles(s, g);
        CHECK(q.sample_size == 1);
        for (const double v : q.values) CHECK(v == 5.0);
    }
    SUBCASE("nearest rank") {
        const std::vector<double> s = {1.0, 2.0, 3.0, 4.0};
        QuantileGrid half{{0.5}};
        CHECK(empirical_quantiles(s, half).values[0] == 2.0);
    }
    SUBCASE("missing entries dropped") {
        const std::vector<double> s = {3.0, 1.0, kNaN, 2.0};
        QuantileGrid g9{{0.9}};
        const auto q = empirical_quantiles(s, g9);
        CHECK(q.sample_size == 3);
        CHECK(q.values[0] == 3.0);
    }
    SUBCASE("empty sample rejected") {
        const std::vector<double> s = {kNaN, kNaN};
        CHECK_THROWS_AS(empirical_quantiles(s, g), NumericError);
    }
    SUBCASE("nondecreasing in the level index") {
        const auto s = normal_sample(97, 0.0, 2.0, 42, 0);
        const auto q = empirical_quantiles(s, g);
        CHECK(std::is_sorted(q.values.begin(), q.values.end()));
    }
}

TEST_CASE("quantile Wasserstein distance") {
    const auto g = QuantileGrid::midpoints();
    SUBCASE("identity") {
        const auto q = empirical_quantiles(normal_sample(50, 1.0, 1.0, 1, 0), g);
        CHECK(quantile_wd(q, q, 2.0) == 0.0);
        CHECK(quantile_wd(q, q, 1.0) == 0.0);
    }
    SUBCASE("point masses") {
        const std::vector<double> zeros = {0.0, 0.0, 0.0};
        const std::vector<double> cs = {-2.5, -2.5};
        const auto qa = empirical_quantiles(zeros, g);
        const auto qb = empirical_quantiles(cs, g);
        for (const double r : {1.0, 1.5, 2.0, 3.0}) {
            CHECK(quantile_wd(qa, qb, r) == doctest::Approx(2.5).epsilon(1e-12));
        }
    }
    SUBCASE("grid mismatch rejected") {
        const std::vector<double> s = {1.0, 2.0};
        const auto qa = empirical_quantiles(s, QuantileGrid::midpoints(100));
        const auto qb = empirical_quantiles(s, QuantileGrid::midpoints(200));
        CHECK_THROWS_AS(quantile_wd(qa, qb, 2.0), GridMismatchError);
    }
    SUBCASE("order below 1 rejected") {
        const std::vector<double> s = {1.0};
        const auto q = empirical_quantiles(s, g);
        CHECK_THROWS_AS(quantile_wd(q, q, 0.5), InvalidArgumentError);
    }
    SUBCASE("pseudometric on random samples") {
        for (int k = 0; k < 30; ++k) {
            const auto qa = empirical_quantiles(normal_sample(40, k * 0.1, 1.0, 10 + k, 0), g);
            const auto qb = empirical_quantiles(normal_sample(60, 0.0, 1.0 + k * 0.05, 11 + k, 1), g);
            const auto qc = empirical_quantiles(normal_sample(25, -0.5, 2.0, 12 + k, 2), g);
            const double ab = quantile_wd(qa, qb, 2.0);
            const double ba = quantile_wd(qb, qa, 2.0);
            const double ac = quantile_wd(qa, qc, 2.0);
            const double bc = quantile_wd(qb, qc, 2.0);
            CHECK(ab == ba);
            CHECK(ab >= 0.0);
            CHECK(ac <= ab + bc + 1e-12);
        }
    }
    SUBCASE("positive homogeneity") {
        const auto base = normal_sample(80, 0.4, 1.3, 77, 0);
        const auto other = normal_sample(90, -0.2, 0.8, 78, 1);
        auto sa = base, sb = other;
        for (auto& v : sa) v *= 3.5;
        for (auto& v : sb) v *= 3.5;
        const double d0 = quantile_wd(empirical_quantiles(base, g),
                                      empirical_quantiles(other, g), 2.0);
        const double d1 = quantile_wd(empirical_quantiles(sa, g),
                                      empirical_quantiles(sb, g), 2.0);
        CHECK(d1 == doctest::Approx(3.5 * d0).epsilon(1e-12));
    }
    SUBCASE("translation of both samples leaves the distance unchanged") {
        const auto base = normal_sample(80, 0.0, 1.0, 97, 0);
        const auto other = normal_sample(60, 1.0, 2.0, 98, 1);
        auto sa = base, sb = other;
        for (auto& v : sa) v += 12.5;
        for (auto& v : sb) v += 12.5;
        const double d0 = quantile_wd(empirical_quantiles(base, g),
                                      empirical_quantiles(other, g), 2.0);
        const double d1 = quantile_wd(empirical_quantiles(sa, g),
                                      empirical_quantiles(sb, g), 2.0);
        CHECK(d1 == doctest::Approx(d0).epsilon(1e-12));
    }
    SUBCASE("translating one point mass changes W1 by the offset") {
        const std::vector<double> a = {1.0, 1.0};
        const std::vector<double> b = {4.0, 4.0};
        const double d = quantile_wd(empirical_quantiles(a, g), empirical_quantiles(b, g), 1.0);
        CHECK(d == doctest::Approx(3.0).epsilon(1e-15));
    }
    SUBCASE("Gaussian closed form") {
        const auto qa = empirical_quantiles(normal_sample(100000, 0.0, 1.0, 2024, 0), g);
        const auto qb = empirical_quantiles(normal_sample(100000, 3.0, 1.0, 2025, 1), g);
        CHECK(quantile_wd(qa, qb, 2.0) == doctest::Approx(3.0).epsilon(0.02 / 3.0));
    }
    SUBCASE("strict paper scaling multiplies by |Q|^(1/r)") {
        const auto qa = empirical_quantiles(normal_sample(100, 0.0, 1.0, 5, 0), g);
        const auto qb = empirical_quantiles(normal_sample(100, 1.0, 1.0, 6, 1), g);
        const double lax = quantile_wd(qa, qb, 2.0, false);
        const double strict = quantile_wd(qa, qb, 2.0, true);
        CHECK(strict == doctest::Approx(lax * std::sqrt(200.0)).epsilon(1e-12));
    }
    SUBCASE("level-count refinement is grid-size stable") {
        const auto a = normal_sample(20000, 0.0, 1.0, 500, 0);
        const auto b = normal_sample(20000, 1.0, 1.4, 501, 1);
        const auto g200 = QuantileGrid::midpoints(200);
        const auto g400 = QuantileGrid::midpoints(400);
        const double d200 = quantile_wd(empirical_quantiles(a, g200),
                                        empirical_quantiles(b, g200), 2.0);
        const double d400 = quantile_wd(empirical_quantiles(a, g400),
                                        empirical_quantiles(b, g400), 2.0);
        CHECK(std::abs(d400 - d200) / d200 < 0.02);
    }
}

TEST_CASE("Gaussian W2 oracle") {
    CHECK(gaussian_w2(0, 1, 0, 1) == 0.0);
    CHECK(gaussian_w2(0, 1, 3, 1) == 3.0);
    CHECK(gaussian_w2(0, 1, 0, 2) == 1.0);
    CHECK(gaussian_w2(1, 2, 4, 6) == 5.0);
    CHECK_THROWS_AS(gaussian_w2(0, -1, 0, 1), InvalidArgumentError);
}
