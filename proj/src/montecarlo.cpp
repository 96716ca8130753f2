#include "symmwig/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "symmwig/chebyshev.hpp"
#include "symmwig/errors.hpp"

namespace symmwig {

void SimulationConfig::validate() const {
  if (samples < 2) throw ValidationError("simulation needs at least 2 samples");
  if (max_degree < 1) throw ValidationError("max degree must be at least 1");
  if (threads < 1) throw ValidationError("thread count must be positive");
  if (n < 1 || (cls == SymmetryClass::DIII && n < 2))
    throw ValidationError(cls == SymmetryClass::DIII ? "degenerate space: DIII needs n >= 2" : "n must be positive");
}

// ---------------------------------------------------------------------------
// MomentAccumulator

MomentAccumulator::MomentAccumulator(std::vector<double> shift)
    : shift_(std::move(shift)),
      power_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(shift_.size()), 4)),
      cross_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(shift_.size()),
                                   static_cast<Eigen::Index>(shift_.size()))) {}

void MomentAccumulator::add(std::span<const double> x) {
  if (x.size() != shift_.size()) throw ValidationError("observation has the wrong dimension");
  const auto d = static_cast<Eigen::Index>(shift_.size());
  Eigen::VectorXd y(d);
  for (Eigen::Index i = 0; i < d; ++i) y[i] = x[i] - shift_[i];
  for (Eigen::Index i = 0; i < d; ++i) {
    const double y2 = y[i] * y[i];
    power_(i, 0) += y[i];
    power_(i, 1) += y2;
    power_(i, 2) += y2 * y[i];
    power_(i, 3) += y2 * y2;
    for (Eigen::Index j = i; j < d; ++j) cross_(i, j) += y[i] * y[j];
  }
  ++count_;
}

double MomentAccumulator::power_sum(std::size_t i, int k) const {
  if (k < 1 || k > 4) throw ValidationError("power sums are kept for orders 1..4");
  return power_(static_cast<Eigen::Index>(i), k - 1);
}

MomentAccumulator MomentAccumulator::merge(const MomentAccumulator& a, const MomentAccumulator& b) {
  if (a.shift_ != b.shift_) throw ValidationError("cannot merge accumulators with different shapes or shifts");
  MomentAccumulator out(a.shift_);
  out.count_ = a.count_ + b.count_;
  out.power_ = a.power_ + b.power_;
  out.cross_ = a.cross_ + b.cross_;
  return out;
}

// ---------------------------------------------------------------------------
// Estimation

namespace {

struct PointEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::vector<bool> degenerate;
  std::vector<std::optional<double>> k3, k4;
};

PointEstimate point_estimate(const MomentAccumulator& acc) {
  if (acc.count() < 2) throw ValidationError("cumulant estimation needs at least 2 observations");
  const auto d = static_cast<Eigen::Index>(acc.dim());
  const double n = static_cast<double>(acc.count());
  PointEstimate e;
  e.mean.resize(d);
  e.cov.resize(d, d);
  Eigen::VectorXd mu(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    mu[i] = acc.power_sum(i, 1) / n;
    e.mean[i] = acc.shift()[i] + mu[i];
  }
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j)
      e.cov(i, j) = e.cov(j, i) = (acc.cross_sum(i, j) - n * mu[i] * mu[j]) / (n - 1.0);

  for (Eigen::Index i = 0; i < d; ++i) {
    const double u = mu[i];
    const double s2 = acc.power_sum(i, 2) / n, s3 = acc.power_sum(i, 3) / n, s4 = acc.power_sum(i, 4) / n;
    const double m2 = s2 - u * u;
    const double m3 = s3 - 3.0 * u * s2 + 2.0 * u * u * u;
    const double m4 = s4 - 4.0 * u * s3 + 6.0 * u * u * s2 - 3.0 * u * u * u * u;
    // Constant up to rounding: Tr T_1 is exactly 0, odd traces of these ensembles are ~1e-13.
    const bool flat = !(m2 > 1e-18 * std::max(1.0, e.mean[i] * e.mean[i]));
    e.degenerate.push_back(flat);
    if (flat) {
      e.k3.emplace_back();
      e.k4.emplace_back();
    } else {
      e.k3.emplace_back(m3 / std::pow(m2, 1.5));
      e.k4.emplace_back(m4 / (m2 * m2) - 3.0);
    }
  }
  return e;
}

double jackknife_se(const std::vector<double>& loo) {
  const double b = static_cast<double>(loo.size());
  double mean = 0.0;
  for (double v : loo) mean += v;
  mean /= b;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  return std::sqrt((b - 1.0) / b * ss);
}

}  // namespace

CumulantEstimate estimate_cumulants(const MomentAccumulator& acc) {
  auto p = point_estimate(acc);
  const auto d = static_cast<Eigen::Index>(acc.dim());
  CumulantEstimate out;
  out.count = acc.count();
  out.mean = std::move(p.mean);
  out.cov = std::move(p.cov);
  out.cov_se = Eigen::MatrixXd::Constant(d, d, std::numeric_limits<double>::quiet_NaN());
  out.degenerate = std::move(p.degenerate);
  out.k3 = std::move(p.k3);
  out.k4 = std::move(p.k4);
  out.k3_se.assign(d, std::nullopt);
  out.k4_se.assign(d, std::nullopt);
  return out;
}

CumulantEstimate estimate_cumulants(std::span<const MomentAccumulator> blocks) {
  if (blocks.empty()) throw ValidationError("no accumulator blocks");
  const std::size_t b = blocks.size();
  // prefix[i] = blocks[0..i), suffix[i] = blocks[i..b), merged left to right.
  std::vector<MomentAccumulator> prefix{MomentAccumulator(blocks[0].shift())};
  for (std::size_t i = 0; i < b; ++i) prefix.push_back(MomentAccumulator::merge(prefix.back(), blocks[i]));
  std::vector<MomentAccumulator> suffix(b + 1, MomentAccumulator(blocks[0].shift()));
  for (std::size_t i = b; i-- > 0;) suffix[i] = MomentAccumulator::merge(blocks[i], suffix[i + 1]);

  auto out = estimate_cumulants(prefix.back());
  if (b < 2) return out;

  const auto d = static_cast<Eigen::Index>(blocks[0].dim());
  std::vector<PointEstimate> loo;
  loo.reserve(b);
  for (std::size_t i = 0; i < b; ++i) loo.push_back(point_estimate(MomentAccumulator::merge(prefix[i], suffix[i + 1])));

  std::vector<double> values(b);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      for (std::size_t k = 0; k < b; ++k) values[k] = loo[k].cov(i, j);
      out.cov_se(i, j) = out.cov_se(j, i) = jackknife_se(values);
    }
    if (out.degenerate[i]) continue;
    bool complete = true;
    for (const auto& e : loo) complete = complete && e.k3[i].has_value();
    if (!complete) continue;
    for (std::size_t k = 0; k < b; ++k) values[k] = *loo[k].k3[i];
    out.k3_se[i] = jackknife_se(values);
    for (std::size_t k = 0; k < b; ++k) values[k] = *loo[k].k4[i];
    out.k4_se[i] = jackknife_se(values);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

std::vector<double> simulation_shift(const SimulationConfig& config) {
  const auto sample = sample_matrix(config.cls, config.n, config.model, derive_seed(config.seed, 0));
  return trace_cheb_vector(sample, config.max_degree, config.sigma());
}

SimulationResult run_simulation(const SimulationConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const EquivalenceStructure structure(config.cls, config.n);
  const auto shift = simulation_shift(config);

  const std::uint64_t n_samples = config.samples;
  const std::size_t n_blocks = static_cast<std::size_t>(std::min<std::uint64_t>(100, n_samples));
  std::vector<MomentAccumulator> blocks(n_blocks, MomentAccumulator(shift));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto worker = [&] {
    try {
      for (std::size_t b = next++; b < n_blocks; b = next++) {
        const std::uint64_t begin = b * n_samples / n_blocks;
        const std::uint64_t end = (b + 1) * n_samples / n_blocks;
        for (std::uint64_t i = begin; i < end; ++i) {
          const auto sample = sample_matrix(structure, config.model, derive_seed(config.seed, i));
          blocks[b].add(trace_cheb_vector(sample, config.max_degree, config.sigma()));
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_lock);
      if (!failure) failure = std::current_exception();
      next = n_blocks;
    }
  };

  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(n_blocks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SimulationResult result;
  result.config = config;
  result.estimate = estimate_cumulants(blocks);
  result.blocks = n_blocks;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// CLT report

CltReport clt_report(const SimulationResult& result, const CltThresholds& thresholds) {
  const auto& cfg = result.config;
  const auto& est = result.estimate;
  const int max_m = cfg.max_degree;
  if (est.cov.rows() != max_m) throw ValidationError("simulation result does not match its configuration");
  CltReport report;
  report.pass = true;

  for (int m = 1; m <= max_m; ++m) {
    const int i = m - 1;
    CltDegreeRow row;
    row.m = m;
    row.var = est.cov(i, i);
    row.var_se = est.cov_se(i, i);
    row.theory = asymptotic_variance(cfg.cls, m, cfg.sigma(), cfg.model);
    row.k3 = est.k3[i];
    row.k4 = est.k4[i];
    row.reference = row.theory.value;
    if (m == 2) row.reference = finite_variance(cfg.cls, cfg.n, 2, cfg.model);
    row.z = (row.var_se > 0.0 && !est.degenerate[i]) ? (row.var - row.reference) / row.var_se : 0.0;
    if (m == 1) {
      row.pass = row.var == 0.0;
    } else if (m % 2) {
      row.pass = row.var <= thresholds.odd_ceiling;
    } else if (m == 2) {
      row.pass = std::abs(row.z) <= thresholds.z_max;
    } else {
      const double band = m == 4 ? thresholds.band_m4 : thresholds.band_higher;
      row.pass = std::abs(row.var - row.reference) <= band * row.reference;
    }
    report.pass = report.pass && row.pass;
    report.degrees.push_back(row);
  }

  for (int m = 1; m <= max_m; ++m) {
    for (int mu = m + 1; mu <= max_m; ++mu) {
      CltOffDiagonal off;
      off.m = m;
      off.mu = mu;
      off.cov = est.cov(m - 1, mu - 1);
      off.se = est.cov_se(m - 1, mu - 1);
      if (est.degenerate[m - 1] || est.degenerate[mu - 1]) {
        off.pass = std::abs(off.cov) <= thresholds.degenerate_ceiling;
      } else {
        off.z = off.se > 0.0 ? off.cov / off.se : 0.0;
        off.pass = std::abs(*off.z) <= thresholds.z_max;
      }
      report.pass = report.pass && off.pass;
      report.off_diagonal.push_back(off);
    }
  }
  return report;
}

}  // namespace symmwig
