#include "scwd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "scwd/errors.hpp"

namespace scwd {

namespace {
constexpr double kDeg2Rad = std::numbers::pi / 180.0;
constexpr double kRegularTol = 1e-9;
}  // namespace

Vec3 unit_vector(double lat_deg, double lon_deg) {
    const double lat = lat_deg * kDeg2Rad;
    const double lon = lon_deg * kDeg2Rad;
    const double cl = std::cos(lat);
    return {cl * std::cos(lon), cl * std::sin(lon), std::sin(lat)};
}

double chordal_distance_km(double lat_a, double lon_a, double lat_b, double lon_b,
                           double radius_km) {
    if (lat_a < -90.0 || lat_a > 90.0 || lat_b < -90.0 || lat_b > 90.0 ||
        std::isnan(lat_a) || std::isnan(lat_b)) {
        throw InvalidArgumentError("chordal_distance: latitude outside [-90, 90]");
    }
    return radius_km * std::sqrt(chord2(unit_vector(lat_a, lon_a), unit_vector(lat_b, lon_b)));
}

LatLonGrid LatLonGrid::create(std::vector<double> lat, std::vector<double> lon,
                              double radius_km) {
    if (lat.empty() || lon.empty()) {
        throw InvalidArgumentError("LatLonGrid: empty coordinate axis");
    }
    if (!(radius_km > 0.0)) {
        throw InvalidArgumentError("LatLonGrid: nonpositive radius");
    }
    for (std::size_t i = 0; i < lat.size(); ++i) {
        if (std::isnan(lat[i]) || lat[i] < -90.0 || lat[i] > 90.0) {
            throw InvalidArgumentError("LatLonGrid: latitude outside [-90, 90]");
        }
        if (i > 0 && !(lat[i] > lat[i - 1])) {
            throw InvalidArgumentError("LatLonGrid: latitudes not strictly increasing");
        }
    }
    for (std::size_t j = 0; j < lon.size(); ++j) {
        if (std::isnan(lon[j]) || lon[j] < 0.0 || lon[j] >= 360.0) {
            throw InvalidArgumentError("LatLonGrid: longitude outside [0, 360)");
        }
        if (j > 0 && !(lon[j] > lon[j - 1])) {
            throw InvalidArgumentError("LatLonGrid: longitudes not strictly increasing");
        }
    }
    LatLonGrid g;
    g.lat = std::move(lat);
    g.lon = std::move(lon);
    g.radius_km = radius_km;
    return g;
}

namespace {
bool uniform_spacing(const std::vector<double>& x) {
    if (x.size() < 2) return true;
    const double step = x[1] - x[0];
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (std::abs((x[i + 1] - x[i]) - step) > kRegularTol) return false;
    }
    return true;
}
}  // namespace

bool LatLonGrid::regular() const {
    return uniform_spacing(lat) && uniform_spacing(lon);
}

std::vector<double> cell_areas(const LatLonGrid& grid) {
    if (!grid.regular()) {
        throw InvalidArgumentError("cell_areas: grid is not regular");
    }
    // cos(lat) * dlat * dlon, constant steps, so only cos(lat) varies.
    std::vector<double> row_weight(grid.n_lat());
    double total = 0.0;
    for (std::size_t i = 0; i < grid.n_lat(); ++i) {
        const double w = std::abs(grid.lat[i]) >= 90.0 ? 0.0 : std::cos(grid.lat[i] * kDeg2Rad);
        row_weight[i] = w;
        total += w * static_cast<double>(grid.n_lon());
    }
    if (total <= 0.0) {
        throw InvalidArgumentError("cell_areas: grid has zero total area");
    }
    std::vector<double> areas(grid.cell_count());
    for (std::size_t i = 0; i < grid.n_lat(); ++i) {
        const double a = row_weight[i] / total;
        for (std::size_t j = 0; j < grid.n_lon(); ++j) {
            areas[i * grid.n_lon() + j] = a;
        }
    }
    return areas;
}

LatLonGrid make_center_grid(std::size_t n_lat, std::size_t n_lon) {
    if (n_lat == 0 || n_lon == 0) {
        throw InvalidArgumentError("make_center_grid: zero cell count");
    }
    std::vector<double> lat(n_lat), lon(n_lon);
    const double dlat = 180.0 / static_cast<double>(n_lat);
    const double dlon = 360.0 / static_cast<double>(n_lon);
    for (std::size_t k = 0; k < n_lat; ++k) {
        lat[k] = -90.0 + (static_cast<double>(k) + 0.5) * dlat;
    }
    for (std::size_t j = 0; j < n_lon; ++j) {
        lon[j] = (static_cast<double>(j) + 0.5) * dlon;
    }
    return LatLonGrid::create(std::move(lat), std::move(lon));
}

LatLonGrid make_work_grid() {
    std::vector<double> lat(361), lon(720);
    for (std::size_t k = 0; k < 361; ++k) lat[k] = -90.0 + 0.5 * static_cast<double>(k);
    for (std::size_t j = 0; j < 720; ++j) lon[j] = 0.5 * static_cast<double>(j);
    return LatLonGrid::create(std::move(lat), std::move(lon));
}

std::vector<std::uint32_t> nearest_cell_map(const LatLonGrid& src, const LatLonGrid& dst) {
    const std::size_t sn_lon = src.n_lon();
    std::vector<Vec3> src_vec(src.cell_count());
    for (std::size_t i = 0; i < src.n_lat(); ++i) {
        for (std::size_t j = 0; j < sn_lon; ++j) {
            src_vec[i * sn_lon + j] = unit_vector(src.lat[i], src.lon[j]);
        }
    }
    std::vector<std::uint32_t> out(dst.cell_count());
    for (std::size_t di = 0; di < dst.n_lat(); ++di) {
        for (std::size_t dj = 0; dj < dst.n_lon(); ++dj) {
            const Vec3 p = unit_vector(dst.lat[di], dst.lon[dj]);
            const double dlon = dst.lon[dj];
            // Within one source row the chord shrinks as the circular
            // longitude gap shrinks, so only the two bracketing longitudes
            // can be the row minimum.
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t best_idx = 0;
            for (std::size_t si = 0; si < src.n_lat(); ++si) {
                std::size_t cand[2];
                std::size_t ncand;
                if (sn_lon == 1) {
                    cand[0] = 0;
                    ncand = 1;
                } else {
                    const auto it = std::upper_bound(src.lon.begin(), src.lon.end(), dlon);
                    const std::size_t hi = it == src.lon.end() ? 0 : static_cast<std::size_t>(it - src.lon.begin());
                    const std::size_t lo = (hi + sn_lon - 1) % sn_lon;
                    cand[0] = std::min(lo, hi);
                    cand[1] = std::max(lo, hi);
                    ncand = cand[0] == cand[1] ? 1 : 2;
                }
                for (std::size_t c = 0; c < ncand; ++c) {
                    const std::size_t idx = si * sn_lon + cand[c];
                    const double d2 = chord2(src_vec[idx], p);
                    if (d2 < best) {  // strict: ties keep the smaller index
                        best = d2;
                        best_idx = static_cast<std::uint32_t>(idx);
                    }
                }
            }
            out[di * dst.n_lon() + dj] = best_idx;
        }
    }
    return out;
}

}  // namespace scwd
