#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "symmwig/covariance.hpp"
#include "symmwig/ensemble.hpp"

namespace symmwig {

struct SimulationConfig {
  SymmetryClass cls = SymmetryClass::DIII;
  int n = 64;
  EntryModel model = EntryModel::gaussian(1.0);  // sigma^2 is the model variance
  int max_degree = 6;
  std::uint64_t samples = 10'000;
  std::uint64_t seed = 1;
  int threads = 1;

  double sigma() const { return model.sigma(); }
  /// Throws ValidationError on N < 2, M < 1, or an invalid n for the class.
  void validate() const;
};

/// Raw power sums (orders 1..4) and pairwise cross sums of shifted observations x - shift.
/// Accumulators built with the same shift merge exactly like concatenated streams.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::vector<double> shift);

  void add(std::span<const double> x);
  std::size_t dim() const { return shift_.size(); }
  std::uint64_t count() const { return count_; }
  const std::vector<double>& shift() const { return shift_; }

  /// Sum of (x_i - shift_i)^k for k = 1..4.
  double power_sum(std::size_t i, int k) const;
  /// Sum of (x_i - shift_i)(x_j - shift_j).
  double cross_sum(std::size_t i, std::size_t j) const { return cross_(i, j); }

  /// Throws ValidationError on shape or shift mismatch.
  static MomentAccumulator merge(const MomentAccumulator& a, const MomentAccumulator& b);

 private:
  std::vector<double> shift_;
  std::uint64_t count_ = 0;
  Eigen::MatrixXd power_;  // dim x 4
  Eigen::MatrixXd cross_;  // dim x dim, symmetric
};

struct CumulantEstimate {
  std::uint64_t count = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;       // unbiased
  Eigen::MatrixXd cov_se;    // jackknife standard errors; NaN without blocks
  std::vector<bool> degenerate;
  std::vector<std::optional<double>> k3, k4;        // standardized; nullopt for degenerate coordinates
  std::vector<std::optional<double>> k3_se, k4_se;  // jackknife
};

/// Point estimates from one accumulator (standard errors NaN). Requires count >= 2.
CumulantEstimate estimate_cumulants(const MomentAccumulator& acc);
/// Estimates from the merged blocks, with leave-one-block-out jackknife standard errors.
CumulantEstimate estimate_cumulants(std::span<const MomentAccumulator> blocks);

struct SimulationResult {
  SimulationConfig config;
  CumulantEstimate estimate;
  std::size_t blocks = 0;
  double wall_seconds = 0.0;
};

/// Samples (Tr T_1, ..., Tr T_M) for N matrices. Sample i uses seed derive_seed(seed, i); the
/// samples are cut into up to 100 contiguous blocks, each accumulated in index order and merged
/// in block order, so the result is bit-identical for any thread count.
SimulationResult run_simulation(const SimulationConfig& config);

/// Shift used by run_simulation: the trace vector of sample 0.
std::vector<double> simulation_shift(const SimulationConfig& config);

struct CltThresholds {
  double z_max = 3.0;             // off-diagonal covariances and the derived m = 2 value
  double odd_ceiling = 0.5;       // odd degrees >= 3, absolute
  double band_m4 = 0.10;          // relative band around 4 m sigma^{2m} for m = 4
  double band_higher = 0.15;      // relative band for even m >= 6
  double degenerate_ceiling = 1e-9;  // |cov| allowed where a coordinate is constant
};

struct CltDegreeRow {
  int m = 0;
  double var = 0.0;
  double var_se = 0.0;
  AsymptoticVariance theory;
  double reference = 0.0;  // value graded against: theory, or the finite-n formula for m = 2
  double z = 0.0;          // (var - reference) / se; 0 for degenerate degrees
  std::optional<double> k3, k4;
  bool pass = false;
};

struct CltOffDiagonal {
  int m = 0, mu = 0;
  double cov = 0.0;
  double se = 0.0;
  std::optional<double> z;  // nullopt where a coordinate is degenerate (absolute ceiling used)
  bool pass = false;
};

struct CltReport {
  std::vector<CltDegreeRow> degrees;
  std::vector<CltOffDiagonal> off_diagonal;
  bool pass = false;
};

/// Grades a simulation against the theory: m = 1 exactly zero; odd m >= 3 below the ceiling;
/// even m >= 4 within the relative band; m = 2 within z_max SE of the finite-n value (its
/// derived asymptotic value is shown, not graded); off-diagonal |z| <= z_max.
CltReport clt_report(const SimulationResult& result, const CltThresholds& thresholds = {});

}  // namespace symmwig
