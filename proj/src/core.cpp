#include "scwd/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scwd/errors.hpp"
#include "scwd/parallel.hpp"

namespace scwd {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double root_r(double x, double r) {
    if (r == 2.0) return std::sqrt(x);
    if (r == 1.0) return x;
    return std::pow(x, 1.0 / r);
}

double pow_r(double x, double r) {
    if (r == 2.0) return x * x;
    if (r == 1.0) return x;
    return std::pow(x, r);
}
}  // namespace

void ScwdParams::validate() const {
    if (!(r >= 1.0)) {
        throw InvalidArgumentError("ScwdParams: Wasserstein order must be >= 1");
    }
    if (!flat_kernel && !(range_km > 0.0 && range_km < 2.0 * work.radius_km)) {
        throw InvalidArgumentError("ScwdParams: range must lie in (0, diameter)");
    }
    if (quantiles.size() == 0) {
        throw InvalidArgumentError("ScwdParams: empty quantile grid");
    }
}

bool SlicedQuantiles::compatible_with(const SlicedQuantiles& other) const {
    return centers == other.centers && work == other.work && flat == other.flat &&
           (flat || range_km == other.range_km) && r == other.r && quantiles == other.quantiles;
}

SlicedQuantiles sliced_quantiles(const SliceMatrix& slices, const QuantileGrid& grid,
                                 double range_km, bool flat, double r,
                                 const LatLonGrid& work, std::string dataset) {
    SlicedQuantiles out;
    out.centers = slices.centers;
    out.work = work;
    out.range_km = range_km;
    out.flat = flat;
    out.r = r;
    out.quantiles = grid;
    out.dataset = std::move(dataset);

    const std::size_t n_centers = slices.centers.cell_count();
    const std::size_t T = slices.timesteps();
    const std::size_t nq = grid.size();
    out.values.assign(n_centers * nq, kNaN);
    out.sample_size.assign(n_centers, 0);
    out.total_slices = static_cast<std::uint64_t>(n_centers) * T;
    out.missing_slices = slices.missing_count();
    for (std::size_t c = 0; c < n_centers; ++c) {
        const std::span<const double> row(slices.row(c), T);
        bool any = false;
        for (const double v : row) {
            if (!is_missing(v)) {
                any = true;
                break;
            }
        }
        if (!any) continue;  // center stays missing
        auto qv = empirical_quantiles(row, grid);
        out.sample_size[c] = qv.sample_size;
        std::copy(qv.values.begin(), qv.values.end(), out.values.begin() + c * nq);
    }
    return out;
}

LocalWDMap local_wd_map(const SliceMatrix& a, const SliceMatrix& b, const QuantileGrid& grid,
                        double r, bool strict_paper_scaling) {
    if (a.centers != b.centers) {
        throw GridMismatchError("local_wd_map: center grids differ");
    }
    LocalWDMap map;
    map.centers = a.centers;
    map.r = r;
    const std::size_t n_centers = a.centers.cell_count();
    map.values.assign(n_centers, kNaN);
    for (std::size_t c = 0; c < n_centers; ++c) {
        const std::span<const double> row_a(a.row(c), a.timesteps());
        const std::span<const double> row_b(b.row(c), b.timesteps());
        const auto present = [](std::span<const double> row) {
            return std::any_of(row.begin(), row.end(), [](double v) { return !is_missing(v); });
        };
        if (!present(row_a) || !present(row_b)) continue;
        map.values[c] = quantile_wd(empirical_quantiles(row_a, grid),
                                    empirical_quantiles(row_b, grid), r, strict_paper_scaling);
    }
    return map;
}

LocalWDMap local_wd_map(const SlicedQuantiles& a, const SlicedQuantiles& b) {
    if (a.centers != b.centers) {
        throw GridMismatchError("local_wd_map: center grids differ");
    }
    if (!a.compatible_with(b)) {
        throw CacheMismatchError("local_wd_map: sliced quantiles built under different parameters");
    }
    LocalWDMap map;
    map.centers = a.centers;
    map.r = a.r;
    const std::size_t n_centers = a.centers.cell_count();
    const std::size_t nq = a.level_count();
    map.values.assign(n_centers, kNaN);
    for (std::size_t c = 0; c < n_centers; ++c) {
        if (a.sample_size[c] == 0 || b.sample_size[c] == 0) continue;
        QuantileVector qa{{a.values.begin() + c * nq, a.values.begin() + (c + 1) * nq},
                          a.sample_size[c]};
        QuantileVector qb{{b.values.begin() + c * nq, b.values.begin() + (c + 1) * nq},
                          b.sample_size[c]};
        map.values[c] = quantile_wd(qa, qb, a.r, false);
    }
    return map;
}

double aggregate(const LocalWDMap& map, const ScwdParams& params) {
    double acc = 0.0;
    double area_acc = 0.0;
    std::size_t present = 0;
    std::vector<double> areas;
    if (params.aggregation == Aggregation::AreaMean) {
        areas = cell_areas(map.centers);
    }
    for (std::size_t c = 0; c < map.values.size(); ++c) {
        const double d = map.values[c];
        if (is_missing(d)) continue;
        ++present;
        if (params.aggregation == Aggregation::PaperSum) {
            acc += pow_r(d, params.r);
        } else {
            acc += areas[c] * pow_r(d, params.r);
            area_acc += areas[c];
        }
    }
    if (present == 0) {
        throw NumericError("aggregate: all centers missing");
    }
    if (params.aggregation == Aggregation::AreaMean) {
        if (area_acc <= 0.0) throw NumericError("aggregate: zero total area over present centers");
        return root_r(acc / area_acc, params.r);
    }
    return root_r(acc, params.r);
}

DistanceResult scwd_with_weights(const FieldStack& a, const FieldStack& b,
                                 const ScwdParams& params, const SparseWeightSet& weights) {
    params.validate();
    if (a.timestamps.empty() || b.timestamps.empty()) {
        throw NumericError("scwd: empty field stack");
    }
    const FieldStack wa = regrid_nearest(a, params.work);
    const FieldStack wb = regrid_nearest(b, params.work);
    const SliceMatrix sa = slice_stack(wa, weights, params.threads);
    const SliceMatrix sb = slice_stack(wb, weights, params.threads);
    DistanceResult res;
    res.name_a = a.variable;
    res.name_b = b.variable;
    res.map = local_wd_map(sa, sb, params.quantiles, params.r, params.strict_paper_scaling);
    res.scwd = aggregate(res.map, params);
    return res;
}

DistanceResult scwd(const FieldStack& a, const FieldStack& b, const ScwdParams& params) {
    params.validate();
    const auto weights =
        precompute_weights(params.centers, params.work, params.effective_range(), params.threads);
    return scwd_with_weights(a, b, params, weights);
}

DistanceResult scwd_from_quantiles(const SlicedQuantiles& a, const SlicedQuantiles& b,
                                   const ScwdParams& params) {
    DistanceResult res;
    res.name_a = a.dataset;
    res.name_b = b.dataset;
    res.map = local_wd_map(a, b);
    if (params.strict_paper_scaling) {
        const double scale =
            root_r(static_cast<double>(params.quantiles.size()), params.r);
        for (auto& v : res.map.values) {
            if (!is_missing(v)) v *= scale;
        }
    }
    res.scwd = aggregate(res.map, params);
    return res;
}

double gmwd(const FieldStack& a, const FieldStack& b, double r, const QuantileGrid& grid,
            bool strict_paper_scaling) {
    if (a.timestamps.empty() || b.timestamps.empty()) {
        throw NumericError("gmwd: empty field stack");
    }
    const auto series = [](const FieldStack& s) {
        // Flat weight vector on the stack's own grid: normalized areas with
        // zero-area cells dropped, the same arithmetic as a flat-kernel slice.
        const auto areas = cell_areas(s.grid);
        std::vector<std::uint32_t> idx;
        std::vector<double> w;
        for (std::size_t u = 0; u < areas.size(); ++u) {
            if (areas[u] > 0.0) {
                idx.push_back(static_cast<std::uint32_t>(u));
                w.push_back(areas[u]);
            }
        }
        const SparseWeightSet::View view{idx.data(), w.data(), w.size()};
        std::vector<double> means(s.timesteps());
        for (std::size_t t = 0; t < s.timesteps(); ++t) {
            means[t] =
                slice_field(std::span<const float>(s.frame(t), s.grid.cell_count()), view);
        }
        return means;
    };
    const auto ma = series(a);
    const auto mb = series(b);
    return quantile_wd(empirical_quantiles(ma, grid), empirical_quantiles(mb, grid), r,
                       strict_paper_scaling);
}

// --- dense brute-force oracle ---------------------------------------------

namespace {

// Nearest-rank quantile by a full copy-and-sort per level.
double naive_quantile(const std::vector<double>& present, double q) {
    std::vector<double> x = present;
    std::sort(x.begin(), x.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(x.size())));
    rank = std::clamp<std::size_t>(rank, 1, x.size());
    return x[rank - 1];
}

std::vector<std::uint32_t> naive_nearest(const LatLonGrid& src, const LatLonGrid& dst) {
    std::vector<std::uint32_t> out(dst.cell_count());
    for (std::size_t di = 0; di < dst.n_lat(); ++di) {
        for (std::size_t dj = 0; dj < dst.n_lon(); ++dj) {
            const Vec3 p = unit_vector(dst.lat[di], dst.lon[dj]);
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t best_idx = 0;
            for (std::size_t si = 0; si < src.n_lat(); ++si) {
                for (std::size_t sj = 0; sj < src.n_lon(); ++sj) {
                    const double d2 = chord2(unit_vector(src.lat[si], src.lon[sj]), p);
                    if (d2 < best) {
                        best = d2;
                        best_idx = static_cast<std::uint32_t>(si * src.n_lon() + sj);
                    }
                }
            }
            out[di * dst.n_lon() + dj] = best_idx;
        }
    }
    return out;
}

}  // namespace

double dense_oracle_scwd(const FieldStack& a, const FieldStack& b, const ScwdParams& params) {
    params.validate();
    if (params.work.n_lat() > 32 || params.work.n_lon() > 64) {
        throw InvalidArgumentError("dense_oracle_scwd: work grid larger than 32x64");
    }
    if (a.timestamps.empty() || b.timestamps.empty()) {
        throw NumericError("dense_oracle_scwd: empty field stack");
    }

    const auto regrid = [&](const FieldStack& s) {
        if (s.grid == params.work) return s;
        const auto src_of = naive_nearest(s.grid, params.work);
        FieldStack out;
        out.grid = params.work;
        out.timestamps = s.timestamps;
        out.values.resize(s.timesteps() * params.work.cell_count());
        for (std::size_t t = 0; t < s.timesteps(); ++t) {
            for (std::size_t c = 0; c < params.work.cell_count(); ++c) {
                out.frame(t)[c] = s.frame(t)[src_of[c]];
            }
        }
        return out;
    };
    const FieldStack wa = regrid(a);
    const FieldStack wb = regrid(b);

    const std::size_t n_work = params.work.cell_count();
    const std::size_t n_centers = params.centers.cell_count();
    const auto areas = cell_areas(params.work);

    // Dense per-center weight vector over every work cell, zeros included.
    const auto dense_weights = [&](std::size_t c) {
        const double clat = params.centers.lat[c / params.centers.n_lon()];
        const double clon = params.centers.lon[c % params.centers.n_lon()];
        std::vector<double> w(n_work);
        double total = 0.0;
        for (std::size_t i = 0; i < params.work.n_lat(); ++i) {
            for (std::size_t j = 0; j < params.work.n_lon(); ++j) {
                const std::size_t u = i * params.work.n_lon() + j;
                const double d =
                    chordal_distance_km(clat, clon, params.work.lat[i], params.work.lon[j],
                                        params.work.radius_km);
                const double k = params.flat_kernel ? 1.0 : wendland(d, params.range_km);
                w[u] = k * areas[u];
                total += w[u];
            }
        }
        if (total <= 0.0) throw NumericError("dense_oracle_scwd: empty kernel");
        for (auto& x : w) x /= total;
        return w;
    };

    const auto slice_dense = [&](const FieldStack& s, const std::vector<double>& w,
                                 std::size_t t) {
        double acc = 0.0;
        double missing_weight = 0.0;
        for (std::size_t u = 0; u < n_work; ++u) {
            const double v = s.frame(t)[u];
            if (is_missing(v)) {
                missing_weight += w[u];
            } else {
                acc += w[u] * v;
            }
        }
        if (missing_weight > 0.5) return kNaN;
        return acc / (1.0 - missing_weight);
    };

    std::vector<double> local(n_centers, kNaN);
    for (std::size_t c = 0; c < n_centers; ++c) {
        const auto w = dense_weights(c);
        std::vector<double> pa, pb;
        for (std::size_t t = 0; t < wa.timesteps(); ++t) {
            const double v = slice_dense(wa, w, t);
            if (!is_missing(v)) pa.push_back(v);
        }
        for (std::size_t t = 0; t < wb.timesteps(); ++t) {
            const double v = slice_dense(wb, w, t);
            if (!is_missing(v)) pb.push_back(v);
        }
        if (pa.empty() || pb.empty()) continue;
        double sum = 0.0;
        for (const double q : params.quantiles.levels) {
            sum += pow_r(std::abs(naive_quantile(pa, q) - naive_quantile(pb, q)), params.r);
        }
        const double base = params.strict_paper_scaling
                                ? sum
                                : sum / static_cast<double>(params.quantiles.size());
        local[c] = root_r(base, params.r);
    }

    LocalWDMap map{params.centers, std::move(local), params.r};
    return aggregate(map, params);
}

}  // namespace scwd
