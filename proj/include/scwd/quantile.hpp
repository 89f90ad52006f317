#ifndef SCWD_QUANTILE_HPP
#define SCWD_QUANTILE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace scwd {

/** Ordered quantile levels in (0, 1). The default is the 200-level midpoint
    grid q_k = (k - 0.5)/200, the midpoint Riemann rule for the integral over
    (0, 1). */
struct QuantileGrid {
    std::vector<double> levels;

    static QuantileGrid midpoints(std::size_t n = 200);

    std::size_t size() const { return levels.size(); }
    bool operator==(const QuantileGrid&) const = default;
};

/** Empirical quantile values on a fixed level grid, nondecreasing. */
struct QuantileVector {
    std::vector<double> values;
    std::size_t sample_size = 0;  // non-missing observations used
};

// Nearest-rank empirical quantiles: drop missing, sort ascending, take
// x_(ceil(q*n)), 1-indexed. Throws NumericError when no observation remains.
QuantileVector empirical_quantiles(std::span<const double> sample, const QuantileGrid& grid);

// r-th order 1-D Wasserstein distance on a shared quantile grid:
// ((1/|Q|) sum_q |a(q)-b(q)|^r)^(1/r). With strict_paper_scaling the bare sum
// is used instead, which scales every distance by |Q|^(1/r) and preserves all
// rankings. Throws GridMismatchError when the level counts differ.
double quantile_wd(const QuantileVector& a, const QuantileVector& b, double r,
                   bool strict_paper_scaling = false);

// Closed-form W2 between univariate Gaussians: sqrt((mu1-mu2)^2 + (s1-s2)^2).
// Test oracle; throws InvalidArgumentError on negative sigma.
double gaussian_w2(double mu1, double sigma1, double mu2, double sigma2);

}  // namespace scwd

#endif
