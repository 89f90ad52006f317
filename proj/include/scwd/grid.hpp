#ifndef SCWD_GRID_HPP
#define SCWD_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace scwd {

inline constexpr double kEarthRadiusKm = 6371.0;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Unit vector on the sphere for a (lat, lon) pair in degrees.
Vec3 unit_vector(double lat_deg, double lon_deg);

// Squared Euclidean distance between two unit vectors (chord^2 on the unit
// sphere). Shared by every nearest-neighbor and kernel computation so that
// independent code paths agree bitwise.
inline double chord2(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

// Chordal (straight-line) distance in km between two points given in
// degrees. Latitudes must lie in [-90, 90]; longitudes are taken mod 360
// through the 3-D embedding, so the date line needs no special casing.
double chordal_distance_km(double lat_a, double lon_a, double lat_b, double lon_b,
                           double radius_km = kEarthRadiusKm);

/** A regular or irregular latitude-longitude grid of cell centers on a
    sphere of fixed radius. Cells are indexed row-major: lat index * n_lon +
    lon index, latitudes ascending. */
struct LatLonGrid {
    std::vector<double> lat;  // degrees, strictly increasing, in [-90, 90]
    std::vector<double> lon;  // degrees, strictly increasing, in [0, 360)
    double radius_km = kEarthRadiusKm;

    // Validating factory; throws InvalidArgumentError on out-of-range or
    // non-increasing coordinates.
    static LatLonGrid create(std::vector<double> lat, std::vector<double> lon,
                             double radius_km = kEarthRadiusKm);

    std::size_t n_lat() const { return lat.size(); }
    std::size_t n_lon() const { return lon.size(); }
    std::size_t cell_count() const { return lat.size() * lon.size(); }

    // True when both coordinate axes have uniform spacing (within 1e-9 deg).
    bool regular() const;

    bool operator==(const LatLonGrid&) const = default;
};

// Normalized cos-latitude cell areas, row-major, summing to 1. Rows centered
// at +-90 degrees get area exactly 0. Requires a regular grid.
std::vector<double> cell_areas(const LatLonGrid& grid);

// Cell-center grid: lat_k = -90 + (k+0.5)*180/n_lat, lon_j = (j+0.5)*360/n_lon.
// The default (60, 120) is the strided-convolution center grid.
LatLonGrid make_center_grid(std::size_t n_lat, std::size_t n_lon);

// The 361x720 half-degree approximation grid, poles included.
LatLonGrid make_work_grid();

// For each destination cell, the row-major index of the chordally nearest
// source cell. Ties go to the smallest source index.
std::vector<std::uint32_t> nearest_cell_map(const LatLonGrid& src, const LatLonGrid& dst);

}  // namespace scwd

#endif
