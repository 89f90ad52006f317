#include "scwd/quantile.hpp"

#include <algorithm>
#include <cmath>

#include "scwd/errors.hpp"
#include "scwd/field.hpp"

namespace scwd {

QuantileGrid QuantileGrid::midpoints(std::size_t n) {
    if (n == 0) throw InvalidArgumentError("QuantileGrid: zero levels");
    QuantileGrid g;
    g.levels.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        g.levels[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    }
    return g;
}

QuantileVector empirical_quantiles(std::span<const double> sample, const QuantileGrid& grid) {
    std::vector<double> x;
    x.reserve(sample.size());
    for (const double v : sample) {
        if (!is_missing(v)) x.push_back(v);
    }
    if (x.empty()) {
        throw NumericError("empirical_quantiles: no non-missing observations");
    }
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    QuantileVector out;
    out.sample_size = x.size();
    out.values.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        // nearest-rank: x_(ceil(q*n)), 1-indexed
        auto rank = static_cast<std::size_t>(std::ceil(grid.levels[k] * n));
        rank = std::clamp<std::size_t>(rank, 1, x.size());
        out.values[k] = x[rank - 1];
    }
    return out;
}

double quantile_wd(const QuantileVector& a, const QuantileVector& b, double r,
                   bool strict_paper_scaling) {
    if (a.values.size() != b.values.size()) {
        throw GridMismatchError("quantile_wd: quantile grids differ");
    }
    if (!(r >= 1.0)) {
        throw InvalidArgumentError("quantile_wd: order must be >= 1");
    }
    const std::size_t n = a.values.size();
    double sum = 0.0;
    if (r == 2.0) {
        for (std::size_t k = 0; k < n; ++k) {
            const double d = a.values[k] - b.values[k];
            sum += d * d;
        }
    } else if (r == 1.0) {
        for (std::size_t k = 0; k < n; ++k) {
            sum += std::abs(a.values[k] - b.values[k]);
        }
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            sum += std::pow(std::abs(a.values[k] - b.values[k]), r);
        }
    }
    const double base = strict_paper_scaling ? sum : sum / static_cast<double>(n);
    if (r == 2.0) return std::sqrt(base);
    if (r == 1.0) return base;
    return std::pow(base, 1.0 / r);
}

double gaussian_w2(double mu1, double sigma1, double mu2, double sigma2) {
    if (sigma1 < 0.0 || sigma2 < 0.0) {
        throw InvalidArgumentError("gaussian_w2: negative sigma");
    }
    const double dm = mu1 - mu2;
    const double ds = sigma1 - sigma2;
    return std::sqrt(dm * dm + ds * ds);
}

}  // namespace scwd
