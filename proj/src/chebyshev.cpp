#include "symmwig/chebyshev.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "symmwig/errors.hpp"

namespace symmwig {

double ChebSpec::operator()(double x) const {
  // Horner in x with sigma powers folded in: sum_k c_k sigma^(m-k) x^k.
  double acc = 0.0;
  for (int k = degree; k >= 0; --k) acc = acc * x + static_cast<double>(coeffs[k]) * std::pow(sigma, degree - k);
  return acc;
}

ChebSpec cheb_coefficients(int m, double sigma) {
  if (m < 0) throw ValidationError("Chebyshev degree must be nonnegative");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  // Integer coefficient vectors; the sigma^2 factor is implicit in the grading.
  std::vector<std::int64_t> prev{2};
  std::vector<std::int64_t> cur{0, 1};
  if (m == 0) return {0, sigma, prev};
  for (int k = 1; k < m; ++k) {
    std::vector<std::int64_t> next(k + 2, 0);
    for (int j = 0; j <= k; ++j) next[j + 1] += cur[j];
    for (int j = 0; j < static_cast<int>(prev.size()); ++j) {
      if (std::abs(prev[j]) > std::numeric_limits<std::int64_t>::max() / 4)
        throw ValidationError("Chebyshev coefficients overflow 64-bit integers");
      next[j] -= prev[j];
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {m, sigma, cur};
}

namespace {

double block_trace(const Eigen::MatrixXd& s) {
  const Eigen::Index half = s.rows() / 2;
  double t = 0.0;
  for (Eigen::Index a = 0; a < half; ++a) t += s(a, a) + s(half + a, half + a);
  return t;
}

// Tr(A B) for square matrices.
double trace_of_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.transpose().array()).sum();
}

}  // namespace

std::vector<double> trace_cheb_vector(const MatrixSample& sample, int max_degree, double sigma) {
  if (max_degree < 1) throw ValidationError("max degree must be at least 1");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  const Eigen::Index dim = sample.dim();
  const int half = (max_degree + 1) / 2;
  const double workspace = static_cast<double>(half + 1) * static_cast<double>(dim) * dim * sizeof(double);
  if (workspace > 2.0 * 1024 * 1024 * 1024) {
    std::ostringstream os;
    os << "Chebyshev workspace for dim " << dim << ", degree " << max_degree << " exceeds 2 GiB";
    throw BudgetError(os.str());
  }

  // X = phase * R with phase^2 = eps. With T_k(X) = phase^k S_k the recurrence stays real:
  // S_{k+1} = R S_k - eps sigma^2 S_{k-1}.
  const bool imaginary = sample.phase() == EntryPhase::Imaginary;
  const double eps = imaginary ? -1.0 : 1.0;
  const double shift = eps * sigma * sigma;
  const Eigen::MatrixXd& r = sample.coefficients();

  std::vector<Eigen::MatrixXd> s;
  s.reserve(half + 1);
  s.push_back(2.0 * Eigen::MatrixXd::Identity(dim, dim));
  s.push_back(r);
  for (int k = 1; k < half; ++k) {
    Eigen::MatrixXd next(dim, dim);
    next.noalias() = r * s[k];
    next -= shift * s[k - 1];
    s.push_back(std::move(next));
  }

  // Raw traces t_k = Tr S_k, k = 0..max_degree.
  std::vector<double> t(max_degree + 1, 0.0);
  for (int k = 0; k <= half; ++k) t[k] = block_trace(s[k]);
  for (int k = half + 1; k <= max_degree; ++k) {
    const int b = k - half;
    t[k] = trace_of_product(s[half], s[b]) - std::pow(shift, b) * t[half - b];
  }

  std::vector<double> out(max_degree);
  const double tolerance = 1e-9 * static_cast<double>(dim);
  for (int k = 1; k <= max_degree; ++k) {
    double re = t[k], im = 0.0;
    if (imaginary) {
      switch (k % 4) {
        case 0: re = t[k]; break;
        case 1: re = 0.0; im = t[k]; break;
        case 2: re = -t[k]; break;
        case 3: re = 0.0; im = -t[k]; break;
      }
    }
    if (std::abs(im) > tolerance) {
      std::ostringstream os;
      os << "Tr T_" << k << " has imaginary part " << im << " above tolerance " << tolerance
         << "; input is not Hermitian";
      throw ValidationError(os.str());
    }
    out[k - 1] = re;
  }
  return out;
}

}  // namespace symmwig
