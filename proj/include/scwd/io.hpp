#ifndef SCWD_IO_HPP
#define SCWD_IO_HPP

#include <cstdint>
#include <string>

#include "scwd/core.hpp"
#include "scwd/field.hpp"
#include "scwd/kernel.hpp"

namespace scwd::io {

// All formats share one discipline: 8-byte magic, 4-byte version, little
// endian throughout, 64-bit counts, 64-bit IEEE-754 coordinates,
// length-prefixed UTF-8 labels. Field payloads are 32-bit IEEE-754 with NaN
// as the missing value. Readers reject rather than repair.

inline constexpr std::uint32_t kFormatVersion = 1;

// --- canonical binary stack format ---------------------------------------
void write_stack(const FieldStack& stack, const std::string& path);
FieldStack read_stack(const std::string& path);

// --- CSV import/export (time_label,lat_index,lon_index,value) -------------
FieldStack read_csv_fields(const std::string& path, const LatLonGrid& grid);
void write_csv_fields(const FieldStack& stack, const std::string& path);

// --- weight cache (keyed by centers, work, range) --------------------------
std::uint64_t weight_digest(const LatLonGrid& centers, const LatLonGrid& work,
                            double range_km, bool flat);
void write_weights(const SparseWeightSet& w, const std::string& path);
SparseWeightSet read_weights(const std::string& path);

// --- sliced-quantile cache (keyed by centers, work, range, r, levels) ------
std::uint64_t quantile_digest(const LatLonGrid& centers, const LatLonGrid& work,
                              double range_km, bool flat, double r,
                              const QuantileGrid& grid);
void write_quantile_cache(const SlicedQuantiles& q, const std::string& path);
SlicedQuantiles read_quantile_cache(const std::string& path);

// --- local WD map grid file ------------------------------------------------
void write_map(const LocalWDMap& map, const std::string& path);
LocalWDMap read_map(const std::string& path);

// Binary P6 pixmap, one pixel per center, row-major north to south. Linear
// color ramp over [low, high] (values clamped); missing centers gray.
void write_map_image(const LocalWDMap& map, const std::string& path,
                     double low, double high);

}  // namespace scwd::io

#endif
