#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "symmwig/ensemble.hpp"
#include "symmwig/patterns.hpp"

namespace symmwig {

/// Two rows of index pairs; each row is cyclically consistent (q_l = p_{l+1}, q_k = p_1).
struct MultiIndex {
  std::vector<IndexPair> row1;
  std::vector<IndexPair> row2;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

bool is_consistent_row(std::span<const IndexPair> row);

/// Visits all dim^k1 * dim^k2 consistent multi-indices (a consistent row is fixed by its
/// p-sequence). BudgetError if that count exceeds `budget`.
void for_each_consistent_multiindex(int dim, int k1, int k2, const std::function<void(const MultiIndex&)>& visit,
                                    std::uint64_t budget = 100'000'000ULL);

/// Partition of {(i, l)} induced by the entry equivalence. Blocks are labelled 0, 1, ... in order
/// of first appearance scanning row 1 then row 2, so equal partitions compare equal.
struct InducedPartition {
  std::vector<int> row1_block;
  std::vector<int> row2_block;
  int block_count = 0;

  /// True iff this is exactly pi_g: row-1 positions pairwise in distinct blocks and
  /// (1, l) together with (2, g(l)) only.
  bool equals(const PairPartition& pi) const;
  friend bool operator==(const InducedPartition&, const InducedPartition&) = default;
};

/// Throws ValidationError("meets zero entry") if any pair is a forced-zero position.
InducedPartition induced_partition(const MultiIndex& index, const EquivalenceStructure& structure);

/// Which multi-indices count as good for pi_g.
/// Exact: induced partition equals pi_g. Coarsening: only (1,l) ~ (2,g(l)) is required, so
/// partitions coarser than pi_g are admitted (sensitivity check).
enum class GoodSetReading { Exact, Coarsening };

/// Multi-indices of S^good(pi_g): consistent, avoiding forced zeros, inducing pi_g.
std::vector<MultiIndex> good_multiindices(const DihedralElement& g, const EquivalenceStructure& structure,
                                          GoodSetReading reading = GoodSetReading::Exact,
                                          std::uint64_t budget = 100'000'000ULL);

struct VarianceOptions {
  GoodSetReading reading = GoodSetReading::Exact;
  int threads = 1;
  std::uint64_t budget = 2'000'000'000ULL;  // row-one sequences, (2n)^m
};

struct FiniteVariance {
  double value = 0.0;
  std::vector<DihedralElement> group;  // empty for m = 1, 2
  std::vector<double> per_g;           // normalized contribution of each group element
};

/// Finite-n covariance formula with 2n in the role of the matrix size:
///   m = 1: (1/2n) sum_{(p,p)~(q,q)} E a(p,p) a(q,q)
///   m = 2: (1/2n)^2 sum_{(p,q)~(r,s), p!=q, r!=s} Cov(|a(p,q)|^2, |a(r,s)|^2)
///   m >= 3: (1/2n)^m sum_g sum_{P in S^good(pi_g)} prod_l E a(P_{1,l}) a(P_{2,g(l)})
/// Expectations are exact from the model moments and class signs.
FiniteVariance finite_variance_breakdown(SymmetryClass cls, int n, int m, const EntryModel& model,
                                         const VarianceOptions& options = {});
double finite_variance(SymmetryClass cls, int n, int m, const EntryModel& model, const VarianceOptions& options = {});

enum class TheoryFlag { Theorem, Derived };

struct AsymptoticVariance {
  double value = 0.0;
  TheoryFlag flag = TheoryFlag::Theorem;
};

/// 0 for m = 1 and odd m >= 3, 4 m sigma^{2m} for even m >= 4. For m = 2 the limit of the
/// finite-n formula, 4 Var(r^2), flagged Derived. `sigma` must match the model's scale.
AsymptoticVariance asymptotic_variance(SymmetryClass cls, int m, double sigma, const EntryModel& model);

/// Exact Cov(Tr T_m(X, sigma), Tr T_mu(X, sigma)) by enumerating every joint assignment of the
/// class variables over a finite-support model. BudgetError if #atoms^#classes > budget.
double cov_traces_config_oracle(SymmetryClass cls, int n, int m, int mu, double sigma, const EntryModel& model,
                                std::uint64_t budget = 10'000'000ULL);

/// Exact Cov(Tr X^j, Tr X^k) for 0 <= j, k <= max_power, summing covariances of entry products
/// over consistent multi-index pairs with expectations factorized over classes.
/// BudgetError if (2n)^max_power > budget.
Eigen::MatrixXd power_trace_covariance(SymmetryClass cls, int n, int max_power, const EntryModel& model,
                                       std::uint64_t budget = 10'000'000ULL);

/// Cov(Tr X^k1, Tr X^k2) through power_trace_covariance.
double cov_traces_moment_oracle(SymmetryClass cls, int n, int k1, int k2, const EntryModel& model,
                                std::uint64_t budget = 10'000'000ULL);

/// Chebyshev covariance matrix (m, mu = 1..max_degree) assembled bilinearly from power covariances.
Eigen::MatrixXd cheb_covariance_moment_oracle(SymmetryClass cls, int n, int max_degree, double sigma,
                                              const EntryModel& model, std::uint64_t budget = 10'000'000ULL);

struct CovReportRow {
  int m = 0;
  double finite = 0.0;  // finite_variance
  AsymptoticVariance asymptotic;
  double gap = 0.0;     // |finite - asymptotic|
  std::vector<std::string> group_labels;
  std::vector<double> per_g;                // normalized per-g contributions at this n
  std::vector<double> per_g_fixed_scalar;   // Delta-summed weight at a fixed scalar sequence
  double per_g_normalized_limit = 0.0;      // 2 sigma^{2m} (even m), 0 (odd m)
};

struct CovReport {
  SymmetryClass cls = SymmetryClass::DIII;
  int n = 0;
  std::vector<CovReportRow> rows;
};

CovReport covariance_report(SymmetryClass cls, int n, int max_m, const EntryModel& model,
                            const VarianceOptions& options = {});

}  // namespace symmwig
