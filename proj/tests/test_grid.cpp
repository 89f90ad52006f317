#include <doctest.h>

#include <cmath>
#include <cstring>

#include "scwd/errors.hpp"
#include "scwd/field.hpp"
#include "scwd/grid.hpp"
#include "scwd/rng.hpp"

using namespace scwd;

TEST_SUITE_BEGIN("grid");

TEST_CASE("chordal distance basics") {
    CHECK(chordal_distance_km(45, 30, 45, 30) == 0.0);
    CHECK(chordal_distance_km(90, 0, -90, 0) == doctest::Approx(12742.0).epsilon(1e-12));
    CHECK(chordal_distance_km(0, 0, 0, 90) ==
          doctest::Approx(6371.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(chordal_distance_km(10, 350, 20, 5) ==
          doctest::Approx(chordal_distance_km(20, 5, 10, 350)).epsilon(1e-15));
    CHECK_THROWS_AS(chordal_distance_km(91, 0, 0, 0), InvalidArgumentError);
    CHECK_THROWS_AS(chordal_distance_km(0, 0, -90.5, 0), InvalidArgumentError);
}

TEST_CASE("chordal distance is a metric on random points") {
    for (int k = 0; k < 200; ++k) {
        const auto pt = [&](int i) {
            const double lat = rng::uniform01(7, 0, 3 * k + i) * 180.0 - 90.0;
            const double lon = rng::uniform01(7, 1, 3 * k + i) * 360.0;
            return std::pair{lat, lon};
        };
        const auto [la, na] = pt(0);
        const auto [lb, nb] = pt(1);
        const auto [lc, nc] = pt(2);
        const double ab = chordal_distance_km(la, na, lb, nb);
        const double ba = chordal_distance_km(lb, nb, la, na);
        const double ac = chordal_distance_km(la, na, lc, nc);
        const double bc = chordal_distance_km(lb, nb, lc, nc);
        CHECK(ab >= 0.0);
        CHECK(ab == ba);
        CHECK(ab <= 2.0 * kEarthRadiusKm);
        CHECK(ac <= ab + bc + 1e-9);
    }
}

TEST_CASE("LatLonGrid validation") {
    CHECK_THROWS_AS(LatLonGrid::create({}, {0.0}), InvalidArgumentError);
    CHECK_THROWS_AS(LatLonGrid::create({0.0, 0.0}, {0.0}), InvalidArgumentError);
    CHECK_THROWS_AS(LatLonGrid::create({-95.0}, {0.0}), InvalidArgumentError);
    CHECK_THROWS_AS(LatLonGrid::create({0.0}, {360.0}), InvalidArgumentError);
    CHECK_THROWS_AS(LatLonGrid::create({0.0}, {10.0, 5.0}), InvalidArgumentError);
    const auto g = LatLonGrid::create({-45.0, 45.0}, {0.0, 90.0, 180.0, 270.0});
    CHECK(g.regular());
    CHECK(g.cell_count() == 8);
}

TEST_CASE("cell areas") {
    SUBCASE("2x2 symmetric grid") {
        const auto g = LatLonGrid::create({-45.0, 45.0}, {90.0, 270.0});
        const auto a = cell_areas(g);
        for (const double x : a) CHECK(x == doctest::Approx(0.25).epsilon(1e-14));
    }
    SUBCASE("pole rows have zero area") {
        const auto g = LatLonGrid::create({-90.0, 0.0, 90.0}, {0.0, 180.0});
        const auto a = cell_areas(g);
        CHECK(a[0] == 0.0);
        CHECK(a[1] == 0.0);
        CHECK(a[4] == 0.0);
        CHECK(a[5] == 0.0);
        CHECK(a[2] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("3x1 cos-latitude weights") {
        const auto g = LatLonGrid::create({-60.0, 0.0, 60.0}, {0.0});
        const auto a = cell_areas(g);
        CHECK(a[0] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(a[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(a[2] == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("sum is 1") {
        const auto a = cell_areas(make_center_grid(17, 33));
        double s = 0.0;
        for (const double x : a) s += x;
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    SUBCASE("non-regular grid rejected") {
        const auto g = LatLonGrid::create({-60.0, 0.0, 30.0}, {0.0});
        CHECK_THROWS_AS(cell_areas(g), InvalidArgumentError);
    }
    SUBCASE("invariant under longitude rotation") {
        const auto a = cell_areas(LatLonGrid::create({-30.0, 30.0}, {0.0, 90.0, 180.0, 270.0}));
        const auto b = cell_areas(LatLonGrid::create({-30.0, 30.0}, {45.0, 135.0, 225.0, 315.0}));
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
    }
}

TEST_CASE("center grid construction") {
    const auto g = make_center_grid(60, 120);
    CHECK(g.n_lat() == 60);
    CHECK(g.n_lon() == 120);
    CHECK(g.lat.front() == doctest::Approx(-88.5).epsilon(1e-12));
    CHECK(g.lat.back() == doctest::Approx(88.5).epsilon(1e-12));
    CHECK(g.lon.front() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(g.lon.back() == doctest::Approx(358.5).epsilon(1e-12));

    const auto single = make_center_grid(1, 1);
    CHECK(single.lat[0] == 0.0);
    CHECK(single.lon[0] == 180.0);

    const auto quad = make_center_grid(2, 2);
    CHECK(quad.lat[0] == -45.0);
    CHECK(quad.lat[1] == 45.0);
    CHECK(quad.lon[0] == 90.0);
    CHECK(quad.lon[1] == 270.0);

    CHECK_THROWS_AS(make_center_grid(0, 4), InvalidArgumentError);
}

TEST_CASE("work grid construction") {
    const auto g = make_work_grid();
    CHECK(g.n_lat() == 361);
    CHECK(g.n_lon() == 720);
    CHECK(g.lat.front() == -90.0);
    CHECK(g.lat.back() == 90.0);
    CHECK(g.lat[1] - g.lat[0] == 0.5);
    CHECK(g.lon[1] - g.lon[0] == 0.5);
    CHECK(g.regular());
}

namespace {
FieldStack random_stack(const LatLonGrid& grid, std::size_t T, std::uint64_t seed) {
    FieldStack s;
    s.grid = grid;
    for (std::size_t t = 0; t < T; ++t) s.timestamps.push_back("t" + std::to_string(t));
    s.values.resize(T * grid.cell_count());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        s.values[i] = static_cast<float>(rng::uniform01(seed, 0, i) * 10.0 - 5.0);
    }
    return s;
}
}  // namespace

TEST_CASE("nearest-neighbor regridding") {
    SUBCASE("identical grids are bit-identical") {
        const auto g = make_center_grid(4, 8);
        const auto s = random_stack(g, 3, 11);
        const auto r = regrid_nearest(s, g);
        CHECK(std::memcmp(r.values.data(), s.values.data(), s.values.size() * sizeof(float)) == 0);
    }
    SUBCASE("constant field stays constant") {
        const auto src = make_center_grid(3, 6);
        FieldStack s;
        s.grid = src;
        s.timestamps = {"t0"};
        s.values.assign(src.cell_count(), 4.25f);
        const auto r = regrid_nearest(s, make_center_grid(7, 13));
        for (const float v : r.values) CHECK(v == 4.25f);
    }
    SUBCASE("picks the chordally nearest source cell") {
        FieldStack s;
        s.grid = LatLonGrid::create({0.0}, {0.0, 180.0});
        s.timestamps = {"t0"};
        s.values = {1.0f, 2.0f};
        const auto r = regrid_nearest(s, LatLonGrid::create({0.0}, {10.0}));
        CHECK(r.values[0] == 1.0f);
    }
    SUBCASE("missing propagates") {
        const auto src = make_center_grid(2, 4);
        FieldStack s;
        s.grid = src;
        s.timestamps = {"t0"};
        s.values.assign(src.cell_count(), 1.0f);
        s.values[3] = kMissing;
        const auto r = regrid_nearest(s, make_center_grid(4, 8));
        std::size_t n_missing = 0;
        for (const float v : r.values) {
            if (is_missing(v)) ++n_missing;
        }
        CHECK(n_missing > 0);
    }
    SUBCASE("idempotent") {
        const auto src = make_center_grid(5, 9);
        const auto dst = make_center_grid(6, 11);
        const auto s = random_stack(src, 2, 23);
        const auto once = regrid_nearest(s, dst);
        const auto twice = regrid_nearest(once, dst);
        CHECK(std::memcmp(once.values.data(), twice.values.data(),
                          once.values.size() * sizeof(float)) == 0);
    }
    SUBCASE("refinement preserves per-timestep min and max") {
        const auto src = make_center_grid(4, 8);
        const auto dst = make_center_grid(8, 16);
        const auto s = random_stack(src, 3, 31);
        const auto r = regrid_nearest(s, dst);
        for (std::size_t t = 0; t < 3; ++t) {
            const auto mm = [&](const FieldStack& st) {
                float lo = st.frame(t)[0], hi = st.frame(t)[0];
                for (std::size_t c = 0; c < st.grid.cell_count(); ++c) {
                    lo = std::min(lo, st.frame(t)[c]);
                    hi = std::max(hi, st.frame(t)[c]);
                }
                return std::pair{lo, hi};
            };
            CHECK(mm(s) == mm(r));
        }
    }
}
