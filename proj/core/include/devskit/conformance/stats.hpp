#pragma once

#include <cstdint>

namespace devskit::conformance {

// Exact two-sided binomial test: the probability, under Bin(n, p), of drawing
// an outcome whose point probability does not exceed that of the observed k
// (the minimum-likelihood method). Returns a value in [0, 1]; n = 0 yields 1.
double binomial_two_sided_pvalue(std::int64_t n, std::int64_t k, double p);

// Log of the Bin(n, p) point mass at k, computed via lgamma so that large n
// stay finite. k outside [0, n] yields -infinity.
double log_binomial_pmf(std::int64_t n, std::int64_t k, double p);

} // namespace devskit::conformance
