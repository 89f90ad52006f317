#include "scwd/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scwd/errors.hpp"
#include "scwd/parallel.hpp"

namespace scwd {

double wendland(double d_km, double range_km) {
    if (std::isnan(d_km) || d_km < 0.0) {
        throw InvalidArgumentError("wendland: negative distance");
    }
    if (!(range_km > 0.0)) {
        throw InvalidArgumentError("wendland: nonpositive range");
    }
    if (range_km == kFlatRange) return 1.0;
    const double t = d_km / range_km;
    if (t > 1.0) return 0.0;
    const double omt = 1.0 - t;
    const double omt2 = omt * omt;
    const double omt6 = omt2 * omt2 * omt2;
    return omt6 * (35.0 * t * t + 18.0 * t + 3.0) / 3.0;
}

double SparseWeightSet::mean_entries_per_center() const {
    if (center_count() == 0) return 0.0;
    if (flat) return static_cast<double>(weight.size());
    return static_cast<double>(weight.size()) / static_cast<double>(center_count());
}

SparseWeightSet precompute_weights(const LatLonGrid& centers, const LatLonGrid& work,
                                   double range_km, unsigned threads) {
    const bool flat = range_km == kFlatRange;
    if (!flat && !(range_km > 0.0 && range_km < 2.0 * work.radius_km)) {
        throw InvalidArgumentError(
            "precompute_weights: range must lie in (0, diameter) or be the flat sentinel");
    }

    SparseWeightSet out;
    out.centers = centers;
    out.work = work;
    out.range_km = range_km;
    out.flat = flat;

    const auto areas = cell_areas(work);
    const std::size_t n_work = work.cell_count();

    if (flat) {
        // One shared weight vector: the normalized cell areas, zeros dropped.
        out.offsets = {0, 0};
        for (std::size_t u = 0; u < n_work; ++u) {
            if (areas[u] > 0.0) {
                out.cell_index.push_back(static_cast<std::uint32_t>(u));
                out.weight.push_back(areas[u]);
            }
        }
        out.offsets[1] = out.weight.size();
        return out;
    }

    std::vector<Vec3> work_vec(n_work);
    for (std::size_t i = 0; i < work.n_lat(); ++i) {
        for (std::size_t j = 0; j < work.n_lon(); ++j) {
            work_vec[i * work.n_lon() + j] = unit_vector(work.lat[i], work.lon[j]);
        }
    }

    // Latitude band that can contain the compact support.
    const double half_angle_rad =
        2.0 * std::asin(std::min(1.0, range_km / (2.0 * work.radius_km)));
    const double band_deg = half_angle_rad * 180.0 / std::numbers::pi + 1e-9;

    const std::size_t n_centers = centers.cell_count();
    std::vector<std::vector<std::uint32_t>> idx_per_center(n_centers);
    std::vector<std::vector<double>> w_per_center(n_centers);
    std::vector<std::string> failures(n_centers);

    parallel_for(n_centers, threads, [&](std::size_t c) {
        const double clat = centers.lat[c / centers.n_lon()];
        const double clon = centers.lon[c % centers.n_lon()];
        const Vec3 cv = unit_vector(clat, clon);
        const auto lo = std::lower_bound(work.lat.begin(), work.lat.end(), clat - band_deg);
        const auto hi = std::upper_bound(work.lat.begin(), work.lat.end(), clat + band_deg);
        auto& idx = idx_per_center[c];
        auto& w = w_per_center[c];
        double total = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const std::size_t i = static_cast<std::size_t>(it - work.lat.begin());
            for (std::size_t j = 0; j < work.n_lon(); ++j) {
                const std::size_t u = i * work.n_lon() + j;
                const double d = work.radius_km * std::sqrt(chord2(cv, work_vec[u]));
                const double raw = wendland(d, range_km) * areas[u];
                if (raw > 0.0) {
                    idx.push_back(static_cast<std::uint32_t>(u));
                    w.push_back(raw);
                    total += raw;
                }
            }
        }
        if (total <= 0.0) {
            failures[c] = "precompute_weights: empty kernel at center (" +
                          std::to_string(clat) + ", " + std::to_string(clon) + ")";
            return;
        }
        for (auto& x : w) x /= total;
    });

    for (const auto& f : failures) {
        if (!f.empty()) throw NumericError(f);
    }

    out.offsets.resize(n_centers + 1);
    out.offsets[0] = 0;
    std::size_t total_entries = 0;
    for (std::size_t c = 0; c < n_centers; ++c) {
        total_entries += w_per_center[c].size();
        out.offsets[c + 1] = total_entries;
    }
    out.cell_index.reserve(total_entries);
    out.weight.reserve(total_entries);
    for (std::size_t c = 0; c < n_centers; ++c) {
        out.cell_index.insert(out.cell_index.end(), idx_per_center[c].begin(),
                              idx_per_center[c].end());
        out.weight.insert(out.weight.end(), w_per_center[c].begin(), w_per_center[c].end());
    }
    return out;
}

std::uint64_t SliceMatrix::missing_count() const {
    std::uint64_t n = 0;
    for (const double v : values) {
        if (is_missing(v)) ++n;
    }
    return n;
}

SliceMatrix slice_stack(const FieldStack& stack, const SparseWeightSet& weights,
                        unsigned threads) {
    if (stack.grid != weights.work) {
        throw GridMismatchError("slice_stack: stack grid differs from the weight work grid");
    }
    const std::size_t n_centers = weights.center_count();
    const std::size_t T = stack.timesteps();
    SliceMatrix out;
    out.centers = weights.centers;
    out.timestamps = stack.timestamps;
    out.values.resize(n_centers * T);
    parallel_for(n_centers, threads, [&](std::size_t c) {
        const auto view = weights.at(c);
        double* row = out.values.data() + c * T;
        for (std::size_t t = 0; t < T; ++t) {
            row[t] = slice_field(std::span<const float>(stack.frame(t), stack.grid.cell_count()),
                                 view);
        }
    });
    return out;
}

}  // namespace scwd
