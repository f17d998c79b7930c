#include "devskit/conformance/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace devskit::conformance {

double log_binomial_pmf(std::int64_t n, std::int64_t k, double p) {
    if (k < 0 || k > n) {
        return -std::numeric_limits<double>::infinity();
    }
    if (p <= 0.0) {
        return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    if (p >= 1.0) {
        return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    const double log_choose =
        std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
    return log_choose + dk * std::log(p) + (dn - dk) * std::log1p(-p);
}

double binomial_two_sided_pvalue(std::int64_t n, std::int64_t k, double p) {
    if (n < 0 || k < 0 || k > n) {
        throw std::invalid_argument("binomial test requires 0 <= k <= n");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("binomial test requires p in [0, 1]");
    }
    if (n == 0) {
        return 1.0;
    }
    if (p <= 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    if (p >= 1.0) {
        return k == n ? 1.0 : 0.0;
    }

    // Sum P(j) over every j whose point mass is at most P(k), with a touch of
    // slack so ties are included despite rounding.
    const double log_pk = log_binomial_pmf(n, k, p);
    const double threshold = log_pk + 1e-7;
    double total = 0.0;
    for (std::int64_t j = 0; j <= n; ++j) {
        const double log_pj = log_binomial_pmf(n, j, p);
        if (log_pj <= threshold) {
            total += std::exp(log_pj);
        }
    }
    return std::min(total, 1.0);
}

} // namespace devskit::conformance
