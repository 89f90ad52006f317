#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "scwd/core.hpp"
#include "scwd/errors.hpp"
#include "scwd/rng.hpp"
#include "scwd/synth.hpp"

using namespace scwd;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Small parameter set for desk-size grids.
ScwdParams small_params(std::size_t work_nlat = 8, std::size_t work_nlon = 16,
                        double range_km = 4000.0) {
    ScwdParams p;
    p.centers = make_center_grid(4, 8);
    p.work = make_center_grid(work_nlat, work_nlon);
    p.range_km = range_km;
    return p;
}

// Stack of dyadic random values so shifts by dyadic constants stay exact.
FieldStack dyadic_stack(const LatLonGrid& grid, std::size_t T, std::uint64_t seed) {
    FieldStack s;
    s.grid = grid;
    for (std::size_t t = 0; t < T; ++t) s.timestamps.push_back("t" + std::to_string(t));
    s.values.resize(T * grid.cell_count());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double u = rng::uniform01(seed, 3, i);
        s.values[i] = static_cast<float>((std::floor(u * 1024.0) - 512.0) / 256.0);
    }
    return s;
}

SliceMatrix make_slices(const LatLonGrid& centers, std::vector<std::vector<double>> rows) {
    SliceMatrix m;
    m.centers = centers;
    for (std::size_t t = 0; t < rows[0].size(); ++t) m.timestamps.push_back("t");
    for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
    return m;
}
}  // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("local WD map") {
    const auto centers = LatLonGrid::create({0.0}, {90.0, 270.0});
    const auto q = QuantileGrid::midpoints();
    SUBCASE("identical slices give zero map") {
        const auto a = make_slices(centers, {{0.5, 1.5, -2.0}, {3.0, 3.5, 4.0}});
        const auto m = local_wd_map(a, a, q, 2.0);
        CHECK(m.values[0] == 0.0);
        CHECK(m.values[1] == 0.0);
    }
    SUBCASE("constant offset appears at every center") {
        const auto a = make_slices(centers, {{0.5, 1.5, -2.0}, {3.0, 3.5, 4.0}});
        auto b = a;
        for (auto& v : b.values) v += 1.25;
        const auto m = local_wd_map(a, b, q, 2.0);
        CHECK(m.values[0] == doctest::Approx(1.25).epsilon(1e-12));
        CHECK(m.values[1] == doctest::Approx(1.25).epsilon(1e-12));
    }
    SUBCASE("two-center toy at r = 1") {
        const auto a = make_slices(centers, {{0.0, 0.0}, {5.0, 6.0}});
        const auto b = make_slices(centers, {{1.0, 3.0}, {5.0, 6.0}});
        const auto m = local_wd_map(a, b, q, 1.0);
        CHECK(m.values[0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(m.values[1] == 0.0);
    }
    SUBCASE("all-missing rows yield missing centers") {
        const auto a = make_slices(centers, {{kNaN, kNaN}, {1.0, 2.0}});
        const auto b = make_slices(centers, {{1.0, 2.0}, {1.0, 2.0}});
        const auto m = local_wd_map(a, b, q, 2.0);
        CHECK(is_missing(m.values[0]));
        CHECK(m.values[1] == 0.0);
    }
    SUBCASE("center grid mismatch rejected") {
        const auto a = make_slices(centers, {{1.0}, {2.0}});
        const auto b = make_slices(LatLonGrid::create({0.0}, {10.0, 20.0}), {{1.0}, {2.0}});
        CHECK_THROWS_AS(local_wd_map(a, b, q, 2.0), GridMismatchError);
    }
}

TEST_CASE("aggregation") {
    const auto centers = make_center_grid(3, 4);
    ScwdParams p = small_params();
    p.centers = centers;
    SUBCASE("all-zero map") {
        LocalWDMap m{centers, std::vector<double>(12, 0.0), 2.0};
        p.aggregation = Aggregation::PaperSum;
        CHECK(aggregate(m, p) == 0.0);
        p.aggregation = Aggregation::AreaMean;
        CHECK(aggregate(m, p) == 0.0);
    }
    SUBCASE("constant map, area mean") {
        LocalWDMap m{centers, std::vector<double>(12, 1.75), 2.0};
        p.aggregation = Aggregation::AreaMean;
        CHECK(aggregate(m, p) == doctest::Approx(1.75).epsilon(1e-14));
    }
    SUBCASE("constant map, paper sum") {
        LocalWDMap m{centers, std::vector<double>(12, 1.75), 2.0};
        p.aggregation = Aggregation::PaperSum;
        CHECK(aggregate(m, p) == doctest::Approx(1.75 * std::sqrt(12.0)).epsilon(1e-14));
    }
    SUBCASE("missing centers are excluded") {
        std::vector<double> v(12, 2.0);
        v[3] = kNaN;
        v[7] = kNaN;
        LocalWDMap m{centers, v, 2.0};
        p.aggregation = Aggregation::PaperSum;
        CHECK(aggregate(m, p) == doctest::Approx(2.0 * std::sqrt(10.0)).epsilon(1e-14));
    }
    SUBCASE("all-missing map rejected") {
        LocalWDMap m{centers, std::vector<double>(12, kNaN), 2.0};
        CHECK_THROWS_AS(aggregate(m, p), NumericError);
    }
}

TEST_CASE("scwd pipeline") {
    const auto p = small_params();
    SUBCASE("self distance is zero") {
        const auto a = dyadic_stack(p.work, 10, 1);
        CHECK(scwd::scwd(a, a, p).scwd == 0.0);
    }
    SUBCASE("constant shift in area-mean mode") {
        ScwdParams pm = p;
        pm.aggregation = Aggregation::AreaMean;
        const auto a = dyadic_stack(p.work, 12, 2);
        const auto b = shift_stack(a, 0.5);  // dyadic: exact in float
        const auto res = scwd::scwd(a, b, pm);
        CHECK(res.scwd == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("symmetry") {
        const auto a = dyadic_stack(p.work, 9, 3);
        const auto b = dyadic_stack(p.work, 11, 4);
        const double ab = scwd::scwd(a, b, p).scwd;
        const double ba = scwd::scwd(b, a, p).scwd;
        CHECK(std::abs(ab - ba) <= 1e-12);
    }
    SUBCASE("positive homogeneity") {
        const auto a = dyadic_stack(p.work, 9, 5);
        const auto b = dyadic_stack(p.work, 9, 6);
        auto a2 = a, b2 = b;
        for (auto& v : a2.values) v *= 2.0f;  // power of two: exact
        for (auto& v : b2.values) v *= 2.0f;
        const double d = scwd::scwd(a, b, p).scwd;
        const double d2 = scwd::scwd(a2, b2, p).scwd;
        CHECK(d2 == doctest::Approx(2.0 * d).epsilon(1e-10));
    }
    SUBCASE("empty stack rejected") {
        const auto a = dyadic_stack(p.work, 3, 7);
        FieldStack empty;
        empty.grid = p.work;
        CHECK_THROWS_AS(scwd::scwd(a, empty, p), NumericError);
    }
    SUBCASE("flat kernel equals gmwd") {
        ScwdParams pf = p;
        pf.flat_kernel = true;
        pf.aggregation = Aggregation::AreaMean;
        const auto a = dyadic_stack(p.work, 15, 8);
        const auto b = dyadic_stack(p.work, 13, 9);
        const double flat = scwd::scwd(a, b, pf).scwd;
        const double base = gmwd(a, b, pf.r, pf.quantiles);
        CHECK(flat == doctest::Approx(base).epsilon(1e-12));
    }
    SUBCASE("result aggregates its own map") {
        const auto a = dyadic_stack(p.work, 6, 10);
        const auto b = dyadic_stack(p.work, 6, 11);
        const auto res = scwd::scwd(a, b, p);
        CHECK(res.scwd == doctest::Approx(aggregate(res.map, p)).epsilon(1e-12));
    }
}

TEST_CASE("gmwd") {
    const auto g = make_center_grid(6, 12);
    const auto q = QuantileGrid::midpoints();
    SUBCASE("identical stacks") {
        const auto a = dyadic_stack(g, 8, 20);
        CHECK(gmwd(a, a, 2.0, q) == 0.0);
    }
    SUBCASE("constant stacks") {
        FieldStack a, b;
        a.grid = b.grid = g;
        a.timestamps = b.timestamps = {"t0", "t1"};
        a.values.assign(2 * g.cell_count(), 0.0f);
        b.values.assign(2 * g.cell_count(), 4.5f);
        CHECK(gmwd(a, b, 2.0, q) == doctest::Approx(4.5).epsilon(1e-12));
    }
    SUBCASE("empty stack rejected") {
        FieldStack empty;
        empty.grid = g;
        const auto a = dyadic_stack(g, 2, 21);
        CHECK_THROWS_AS(gmwd(a, empty, 2.0, q), NumericError);
    }
}

TEST_CASE("dense oracle") {
    ScwdParams p = small_params(8, 16, 5000.0);
    SUBCASE("matches the sparse pipeline") {
        const auto a = dyadic_stack(p.work, 20, 30);
        const auto b = dyadic_stack(p.work, 18, 31);
        const double fast = scwd::scwd(a, b, p).scwd;
        const double slow = dense_oracle_scwd(a, b, p);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
    SUBCASE("identical inputs") {
        const auto a = dyadic_stack(p.work, 5, 32);
        CHECK(dense_oracle_scwd(a, a, p) == 0.0);
    }
    SUBCASE("flat mode matches gmwd") {
        ScwdParams pf = p;
        pf.flat_kernel = true;
        pf.aggregation = Aggregation::AreaMean;
        const auto a = dyadic_stack(p.work, 10, 33);
        const auto b = dyadic_stack(p.work, 10, 34);
        CHECK(dense_oracle_scwd(a, b, pf) ==
              doctest::Approx(gmwd(a, b, pf.r, pf.quantiles)).epsilon(1e-10));
    }
    SUBCASE("matches with missing data present") {
        auto a = dyadic_stack(p.work, 12, 35);
        auto b = dyadic_stack(p.work, 12, 36);
        for (std::size_t i = 0; i < a.values.size(); i += 7) a.values[i] = kMissing;
        for (std::size_t i = 3; i < b.values.size(); i += 11) b.values[i] = kMissing;
        const double fast = scwd::scwd(a, b, p).scwd;
        const double slow = dense_oracle_scwd(a, b, p);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
    SUBCASE("oversize work grid rejected") {
        ScwdParams big = p;
        big.work = make_center_grid(40, 80);
        const auto a = dyadic_stack(big.work, 2, 37);
        CHECK_THROWS_AS(dense_oracle_scwd(a, a, big), InvalidArgumentError);
    }
}

TEST_CASE("localization of cap differences") {
    ScwdParams p;
    p.centers = make_center_grid(10, 20);
    p.work = make_center_grid(30, 60);
    p.range_km = 1000.0;
    const auto a = dyadic_stack(p.work, 8, 40);
    auto b = a;
    const double cap_lat = 10.0, cap_lon = 120.0, cap_radius = 1500.0;
    add_cap_offset(b, cap_lat, cap_lon, cap_radius, 2.0);
    const auto res = scwd::scwd(a, b, p);
    for (std::size_t c = 0; c < p.centers.cell_count(); ++c) {
        const double d = chordal_distance_km(p.centers.lat[c / p.centers.n_lon()],
                                             p.centers.lon[c % p.centers.n_lon()],
                                             cap_lat, cap_lon);
        if (d > cap_radius + p.range_km) {
            CHECK(std::abs(res.map.values[c]) <= 1e-12);
        }
    }
}

TEST_CASE("ranking invariance across scaling modes and level counts") {
    ScwdParams p = small_params();
    p.aggregation = Aggregation::AreaMean;
    const auto ref = dyadic_stack(p.work, 40, 50);
    std::vector<FieldStack> cands = {dyadic_stack(p.work, 40, 51), shift_stack(ref, 0.5),
                                     shift_stack(ref, 1.0), shift_stack(ref, 2.0)};
    const auto ranking = [&](const ScwdParams& params) {
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            order.emplace_back(scwd::scwd(ref, cands[i], params).scwd, i);
        }
        std::sort(order.begin(), order.end());
        std::vector<std::size_t> idx;
        for (const auto& [d, i] : order) idx.push_back(i);
        return idx;
    };
    const auto base = ranking(p);
    ScwdParams strict = p;
    strict.strict_paper_scaling = true;
    CHECK(ranking(strict) == base);
    ScwdParams paper = p;
    paper.aggregation = Aggregation::PaperSum;
    CHECK(ranking(paper) == base);
    ScwdParams q400 = p;
    q400.quantiles = QuantileGrid::midpoints(400);
    CHECK(ranking(q400) == base);
}

TEST_CASE("parameter validation") {
    ScwdParams p = small_params();
    p.r = 0.5;
    CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
    p = small_params();
    p.range_km = -100.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
    p = small_params();
    p.range_km = 2.0 * kEarthRadiusKm;
    CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
    p.flat_kernel = true;  // flat sentinel bypasses the range check
    CHECK_NOTHROW(p.validate());
}
