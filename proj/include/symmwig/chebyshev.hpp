#pragma once

#include <cstdint>
#include <vector>

#include "symmwig/ensemble.hpp"

namespace symmwig {

/// Rescaled Chebyshev polynomial of the first kind, normalized so that
/// T_m(2 sigma cos t, sigma) = 2 sigma^m cos(m t).
/// T_m(x, sigma) = sum_k coeffs[k] * sigma^(m-k) * x^k.
struct ChebSpec {
  int degree = 0;
  double sigma = 1.0;
  std::vector<std::int64_t> coeffs;

  double operator()(double x) const;
};

/// From the recurrence T_{m+1} = x T_m - sigma^2 T_{m-1}, T_0 = 2, T_1 = x.
ChebSpec cheb_coefficients(int m, double sigma);

/// Tr T_m(X, sigma) for m = 1..max_degree (index 0 holds m = 1).
///
/// Only the first ceil(M/2) polynomial matrices are formed by the three-term recurrence; the
/// remaining traces use T_a T_b = T_{a+b} + sigma^{2b} T_{a-b} (a >= b), so each costs one
/// Frobenius product. Tr T_1 is exactly zero for block samples. Throws ValidationError if an
/// imaginary part exceeds 1e-9 * dim, BudgetError if the workspace would exceed 2 GiB.
std::vector<double> trace_cheb_vector(const MatrixSample& sample, int max_degree, double sigma);

}  // namespace symmwig
