#ifndef SCWD_FIELD_HPP
#define SCWD_FIELD_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "scwd/grid.hpp"

namespace scwd {

// Missing values are NaN, in memory and on disk.
inline constexpr float kMissing = std::numeric_limits<float>::quiet_NaN();

inline bool is_missing(float v) { return std::isnan(v); }
inline bool is_missing(double v) { return std::isnan(v); }

/** A time-indexed sample of fields on one grid. Values are stored as
    32-bit floats in (time, lat, lon) row-major order; all computation on
    them is carried out in double. */
struct FieldStack {
    LatLonGrid grid;
    std::vector<std::string> timestamps;  // opaque labels, one per timestep
    std::vector<float> values;            // timesteps * cell_count
    std::string variable;
    std::string units;

    std::size_t timesteps() const { return timestamps.size(); }

    float at(std::size_t t, std::size_t cell) const {
        return values[t * grid.cell_count() + cell];
    }
    const float* frame(std::size_t t) const { return values.data() + t * grid.cell_count(); }
    float* frame(std::size_t t) { return values.data() + t * grid.cell_count(); }

    // Shape/invariant check; throws InvalidArgumentError when violated.
    void validate() const;
};

// Nearest-neighbor regridding: every destination cell takes the value of the
// chordally nearest source cell at every timestep. Missing values propagate.
// When the grids are equal the stack is returned unchanged.
FieldStack regrid_nearest(const FieldStack& stack, const LatLonGrid& dst);

}  // namespace scwd

#endif
