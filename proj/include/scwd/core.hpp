#ifndef SCWD_CORE_HPP
#define SCWD_CORE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "scwd/field.hpp"
#include "scwd/kernel.hpp"
#include "scwd/quantile.hpp"

namespace scwd {

enum class Aggregation {
    PaperSum,  // (sum_s d(s)^r)^(1/r) over present centers
    AreaMean,  // (sum_s a(s) d(s)^r / sum_s a(s))^(1/r), cos-latitude areas
};

struct ScwdParams {
    double r = 2.0;
    double range_km = 1000.0;
    bool flat_kernel = false;
    LatLonGrid centers = make_center_grid(60, 120);
    LatLonGrid work = make_work_grid();
    QuantileGrid quantiles = QuantileGrid::midpoints(200);
    Aggregation aggregation = Aggregation::PaperSum;
    bool strict_paper_scaling = false;
    unsigned threads = 0;  // 0 = hardware concurrency

    double effective_range() const { return flat_kernel ? kFlatRange : range_km; }
    void validate() const;  // throws InvalidArgumentError
};

/** Per-center local Wasserstein distances d(s); NaN where either side had no
    usable slice values. */
struct LocalWDMap {
    LatLonGrid centers;
    std::vector<double> values;
    double r = 2.0;
};

/** Per-center empirical quantiles of the slice values of one dataset,
    together with the parameters they were computed under (the cache key). */
struct SlicedQuantiles {
    LatLonGrid centers;
    LatLonGrid work;
    double range_km = 0.0;
    bool flat = false;
    double r = 2.0;
    QuantileGrid quantiles;
    std::string dataset;

    std::vector<double> values;             // center-major, |Q| per center, NaN rows = missing
    std::vector<std::uint64_t> sample_size; // per center; 0 = no usable slices
    std::uint64_t missing_slices = 0;       // NaN entries in the slice matrix
    std::uint64_t total_slices = 0;

    std::size_t level_count() const { return quantiles.size(); }
    bool compatible_with(const SlicedQuantiles& other) const;
};

struct DistanceResult {
    double scwd = 0.0;
    LocalWDMap map;
    std::string name_a, name_b;
};

// Per-center quantiles of a slice matrix (missing slice values dropped).
SlicedQuantiles sliced_quantiles(const SliceMatrix& slices, const QuantileGrid& grid,
                                 double range_km, bool flat, double r,
                                 const LatLonGrid& work, std::string dataset = {});

// Step 3 of the pipeline: per-center quantile WD between two slice matrices
// (or two cached quantile sets) on the same center grid.
LocalWDMap local_wd_map(const SliceMatrix& a, const SliceMatrix& b,
                        const QuantileGrid& grid, double r, bool strict_paper_scaling = false);
LocalWDMap local_wd_map(const SlicedQuantiles& a, const SlicedQuantiles& b);

// Global aggregation of a local map. Missing centers are excluded; an
// all-missing map throws NumericError.
double aggregate(const LocalWDMap& map, const ScwdParams& params);

// The full pipeline: regrid both stacks to the work grid, precompute (or
// reuse) weights, slice, local map, aggregate.
DistanceResult scwd(const FieldStack& a, const FieldStack& b, const ScwdParams& params);
DistanceResult scwd_with_weights(const FieldStack& a, const FieldStack& b,
                                 const ScwdParams& params, const SparseWeightSet& weights);
DistanceResult scwd_from_quantiles(const SlicedQuantiles& a, const SlicedQuantiles& b,
                                   const ScwdParams& params);

// Global-mean-based WD baseline: the quantile WD between the two time series
// of area-weighted global means (the flat-kernel limit of scwd in area-mean
// aggregation).
double gmwd(const FieldStack& a, const FieldStack& b, double r, const QuantileGrid& grid,
            bool strict_paper_scaling = false);

// Brute-force recomputation with dense weight vectors, per-level full sorts,
// and sequential execution. Only for small work grids (<= 32x64).
double dense_oracle_scwd(const FieldStack& a, const FieldStack& b, const ScwdParams& params);

}  // namespace scwd

#endif
