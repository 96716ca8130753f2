#include <doctest.h>

#include <cmath>
#include <random>

#include "symmwig/covariance.hpp"
#include "symmwig/errors.hpp"
#include "symmwig/montecarlo.hpp"

using namespace symmwig;

namespace {

MomentAccumulator filled(std::uint64_t seed, int count, std::vector<double> shift = {0.5, -1.0, 0.0}) {
  MomentAccumulator acc(std::move(shift));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  for (int i = 0; i < count; ++i) {
    const double a = z(rng), b = z(rng);
    const std::vector<double> x{a, a + 0.5 * b, 0.0};
    acc.add(x);
  }
  return acc;
}

void check_close(const MomentAccumulator& x, const MomentAccumulator& y, double tol) {
  REQUIRE(x.dim() == y.dim());
  CHECK(x.count() == y.count());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    for (int k = 1; k <= 4; ++k) {
      if (tol == 0.0)
        CHECK(x.power_sum(i, k) == y.power_sum(i, k));
      else
        CHECK(x.power_sum(i, k) == doctest::Approx(y.power_sum(i, k)).epsilon(tol).scale(1.0));
    }
    for (std::size_t j = i; j < x.dim(); ++j) {
      if (tol == 0.0)
        CHECK(x.cross_sum(i, j) == y.cross_sum(i, j));
      else
        CHECK(x.cross_sum(i, j) == doctest::Approx(y.cross_sum(i, j)).epsilon(tol).scale(1.0));
    }
  }
}

// Splits a stream into blocks of equal length.
template <typename Gen>
std::vector<MomentAccumulator> blocks_of(Gen&& gen, int blocks, int per_block) {
  std::vector<MomentAccumulator> out(blocks, MomentAccumulator({0.0}));
  for (auto& b : out)
    for (int i = 0; i < per_block; ++i) {
      const std::vector<double> x{gen()};
      b.add(x);
    }
  return out;
}

}  // namespace

TEST_CASE("merge laws") {
  const auto a = filled(1, 300), b = filled(2, 170), c = filled(3, 55);
  const MomentAccumulator empty({0.5, -1.0, 0.0});
  check_close(MomentAccumulator::merge(a, empty), a, 0.0);
  check_close(MomentAccumulator::merge(a, b), MomentAccumulator::merge(b, a), 0.0);
  check_close(MomentAccumulator::merge(MomentAccumulator::merge(a, b), c),
              MomentAccumulator::merge(a, MomentAccumulator::merge(b, c)), 1e-12);

  // Merging equals accumulating one concatenated stream.
  MomentAccumulator whole({0.5, -1.0, 0.0});
  for (std::uint64_t s : {1, 2}) {
    std::mt19937_64 rng(s);
    std::normal_distribution<double> z;
    for (int i = 0; i < (s == 1 ? 300 : 170); ++i) {
      const double u = z(rng), v = z(rng);
      const std::vector<double> x{u, u + 0.5 * v, 0.0};
      whole.add(x);
    }
  }
  check_close(MomentAccumulator::merge(a, b), whole, 1e-12);

  CHECK_THROWS_AS(MomentAccumulator::merge(a, MomentAccumulator({0.0, 0.0, 0.0})), ValidationError);
  CHECK_THROWS_AS(MomentAccumulator::merge(a, MomentAccumulator({0.5, -1.0})), ValidationError);
  MomentAccumulator small({0.0});
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(small.add(two), ValidationError);
}

TEST_CASE("point estimates") {
  const auto acc = filled(4, 5000);
  const auto e = estimate_cumulants(acc);
  CHECK(e.count == 5000);
  // Two-pass reference for the covariance.
  std::vector<std::vector<double>> xs;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  for (int i = 0; i < 5000; ++i) {
    const double a = z(rng), b = z(rng);
    xs.push_back({a, a + 0.5 * b});
  }
  double m0 = 0, m1 = 0;
  for (auto& x : xs) {
    m0 += x[0];
    m1 += x[1];
  }
  m0 /= 5000;
  m1 /= 5000;
  double c00 = 0, c01 = 0;
  for (auto& x : xs) {
    c00 += (x[0] - m0) * (x[0] - m0);
    c01 += (x[0] - m0) * (x[1] - m1);
  }
  CHECK(e.mean[0] == doctest::Approx(m0).epsilon(1e-10).scale(1.0));
  CHECK(e.cov(0, 0) == doctest::Approx(c00 / 4999).epsilon(1e-10));
  CHECK(e.cov(0, 1) == doctest::Approx(c01 / 4999).epsilon(1e-10));
  CHECK(e.cov(1, 0) == e.cov(0, 1));
  // Constant coordinate.
  CHECK(e.degenerate[2]);
  CHECK_FALSE(e.degenerate[0]);
  for (int i = 0; i < 3; ++i) {
    CHECK(e.cov(2, i) == 0.0);
    CHECK(e.cov(i, 2) == 0.0);
  }
  CHECK_FALSE(e.k3[2].has_value());
  CHECK_FALSE(e.k4[2].has_value());
  CHECK(std::isnan(e.cov_se(0, 0)));
  CHECK_THROWS_AS(estimate_cumulants(filled(5, 1)), ValidationError);
}

TEST_CASE("synthetic streams: normal and exponential cumulants") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  const auto normal = blocks_of([&] { return 3.0 + 2.0 * z(rng); }, 100, 1000);
  const auto en = estimate_cumulants(normal);
  CHECK(std::abs(*en.k3[0]) <= 3.0 * *en.k3_se[0]);
  CHECK(std::abs(*en.k4[0]) <= 3.0 * *en.k4_se[0]);
  CHECK(std::abs(en.cov(0, 0) - 4.0) <= 3.0 * en.cov_se(0, 0));

  std::exponential_distribution<double> ex(1.0);
  const auto expo = blocks_of([&] { return 5.0 + ex(rng); }, 100, 1000);
  const auto ee = estimate_cumulants(expo);
  CHECK(std::abs(*ee.k3[0] - 2.0) <= 3.0 * *ee.k3_se[0]);
  CHECK(std::abs(ee.cov(0, 0) - 1.0) <= 3.0 * ee.cov_se(0, 0));
  CHECK(*ee.k3_se[0] > 0.0);
}

TEST_CASE("simulation basics and determinism") {
  SimulationConfig c;
  c.cls = SymmetryClass::DIII;
  c.n = 6;
  c.max_degree = 6;
  c.samples = 2000;
  c.seed = 99;
  const auto r1 = run_simulation(c);
  c.threads = 8;
  const auto r8 = run_simulation(c);
  CHECK(r1.estimate.cov == r8.estimate.cov);
  CHECK(r1.estimate.mean == r8.estimate.mean);
  CHECK(r1.estimate.cov_se == r8.estimate.cov_se);
  CHECK(r1.blocks == 100);
  for (int i = 0; i < 6; ++i) CHECK(r1.estimate.cov(0, i) == 0.0);
  CHECK(r1.estimate.degenerate[0]);
  CHECK(r1.estimate.cov(2, 2) <= 1e-20);

  c.samples = 37;  // fewer samples than blocks
  const auto small = run_simulation(c);
  CHECK(small.blocks == 37);
  CHECK(small.estimate.count == 37);

  SimulationConfig bad;
  bad.samples = 1;
  CHECK_THROWS_AS(run_simulation(bad), ValidationError);
  bad = SimulationConfig{};
  bad.cls = SymmetryClass::DIII;
  bad.n = 1;
  CHECK_THROWS_AS(run_simulation(bad), ValidationError);
  bad = SimulationConfig{};
  bad.max_degree = 0;
  CHECK_THROWS_AS(run_simulation(bad), ValidationError);
}

TEST_CASE("simulation agrees with the exact oracle at small n") {
  for (auto cls : {SymmetryClass::DIII, SymmetryClass::CI}) {
    SimulationConfig c;
    c.cls = cls;
    c.n = 3;
    c.max_degree = 4;
    c.samples = 40000;
    c.seed = 5;
    const auto r = run_simulation(c);
    const auto C = cheb_covariance_moment_oracle(cls, 3, 4, 1.0, EntryModel::gaussian());
    for (int m : {2, 4})
      for (int mu : {2, 4}) {
        const double se = r.estimate.cov_se(m - 1, mu - 1);
        CHECK(std::abs(r.estimate.cov(m - 1, mu - 1) - C(m - 1, mu - 1)) <= 4.0 * se + 1e-12);
      }
  }
  // Rademacher entries as well.
  SimulationConfig c;
  c.cls = SymmetryClass::CI;
  c.n = 2;
  c.model = EntryModel::rademacher();
  c.max_degree = 4;
  c.samples = 20000;
  const auto r = run_simulation(c);
  const double exact = cov_traces_config_oracle(SymmetryClass::CI, 2, 4, 4, 1.0, c.model);
  CHECK(std::abs(r.estimate.cov(3, 3) - exact) <= 4.0 * r.estimate.cov_se(3, 3));
}

TEST_CASE("clt report") {
  SimulationConfig c;
  c.cls = SymmetryClass::CI;
  c.n = 8;
  c.max_degree = 5;
  c.samples = 1000;
  const auto r = run_simulation(c);
  const auto rep = clt_report(r);
  REQUIRE(rep.degrees.size() == 5);
  CHECK(rep.off_diagonal.size() == 10);
  CHECK(rep.degrees[0].pass);
  CHECK(rep.degrees[0].var == 0.0);
  CHECK(rep.degrees[2].pass);  // odd degree below the ceiling
  CHECK(rep.degrees[2].theory.value == 0.0);
  CHECK(rep.degrees[1].theory.flag == TheoryFlag::Derived);
  CHECK(rep.degrees[1].reference == doctest::Approx(finite_variance(SymmetryClass::CI, 8, 2, c.model)));
  CHECK(rep.degrees[3].theory.value == 16.0);
  for (const auto& o : rep.off_diagonal) {
    if (o.m % 2 || o.mu % 2) {
      CHECK_FALSE(o.z.has_value());
      CHECK(o.pass);
    } else {
      CHECK(o.z.has_value());
    }
  }
  // Thresholds are applied as declared.
  CltThresholds strict;
  strict.band_m4 = 0.0;
  CHECK_FALSE(clt_report(r, strict).degrees[3].pass);
  CHECK_FALSE(clt_report(r, strict).pass);
  CltThresholds loose;
  loose.band_m4 = 10.0;
  loose.z_max = 1e9;
  CHECK(clt_report(r, loose).pass);
}
