#ifndef SCWD_KERNEL_HPP
#define SCWD_KERNEL_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "scwd/field.hpp"
#include "scwd/grid.hpp"

namespace scwd {

// Sentinel requesting the flat kernel (the l -> infinity limit, where every
// slice is the area-weighted global mean).
inline constexpr double kFlatRange = std::numeric_limits<double>::infinity();

// Wendland kernel evaluated on the normalized argument d/l: compactly
// supported on [0, l], 1 at the origin, continuous at d = l.
double wendland(double d_km, double range_km);

/** Per-center normalized area-weighted kernel weights, stored sparse in CSR
    form with work-cell indices ascending (fixed reduction order). In flat
    mode a single shared weight vector (the work-grid cell areas) backs every
    center. */
struct SparseWeightSet {
    LatLonGrid centers;
    LatLonGrid work;
    double range_km = 0.0;  // kFlatRange in flat mode
    bool flat = false;

    std::vector<std::uint64_t> offsets;    // center_count()+1; flat: {0, n}
    std::vector<std::uint32_t> cell_index;
    std::vector<double> weight;

    struct View {
        const std::uint32_t* idx;
        const double* w;
        std::size_t n;
    };

    std::size_t center_count() const { return centers.cell_count(); }

    View at(std::size_t center) const {
        if (flat) return {cell_index.data(), weight.data(), weight.size()};
        const auto b = offsets[center], e = offsets[center + 1];
        return {cell_index.data() + b, weight.data() + b, static_cast<std::size_t>(e - b)};
    }

    std::size_t total_entries() const { return weight.size(); }
    double mean_entries_per_center() const;
};

// Step 1 of the pipeline: per center, wendland(chordal distance) * cell area,
// normalized to sum 1, zeros dropped. range_km = kFlatRange yields the flat
// weight set. Throws NumericError when a center has no support.
SparseWeightSet precompute_weights(const LatLonGrid& centers, const LatLonGrid& work,
                                   double range_km, unsigned threads = 0);

// One slice value: weighted mean over present cells. If the weights of the
// missing cells exceed 0.5 the slice itself is missing (NaN); otherwise the
// present-cell weights are renormalized so constant fields stay exact.
template <typename T>
double slice_field(std::span<const T> field, SparseWeightSet::View w) {
    double acc = 0.0;
    double missing_weight = 0.0;
    for (std::size_t k = 0; k < w.n; ++k) {
        const double v = field[w.idx[k]];
        if (is_missing(v)) {
            missing_weight += w.w[k];
        } else {
            acc += w.w[k] * v;
        }
    }
    if (missing_weight > 0.5) return std::numeric_limits<double>::quiet_NaN();
    return acc / (1.0 - missing_weight);
}

/** centers x timesteps matrix of slice values, center-major, NaN = missing. */
struct SliceMatrix {
    LatLonGrid centers;
    std::vector<std::string> timestamps;
    std::vector<double> values;  // center * timesteps + t

    std::size_t timesteps() const { return timestamps.size(); }
    const double* row(std::size_t center) const { return values.data() + center * timesteps(); }
    std::uint64_t missing_count() const;
};

// Step 2 of the pipeline. Throws GridMismatchError when the stack's grid is
// not the weight set's work grid.
SliceMatrix slice_stack(const FieldStack& stack, const SparseWeightSet& weights,
                        unsigned threads = 0);

}  // namespace scwd

#endif
