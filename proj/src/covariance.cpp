#include "symmwig/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "compensated_sum.hpp"
#include "symmwig/chebyshev.hpp"
#include "symmwig/errors.hpp"

namespace symmwig {

bool is_consistent_row(std::span<const IndexPair> row) {
  for (std::size_t l = 0; l < row.size(); ++l)
    if (row[l].q != row[(l + 1) % row.size()].p) return false;
  return true;
}

namespace {

void check_budget(int dim, int length, std::uint64_t budget, const char* what) {
  const double count = std::pow(static_cast<double>(dim), length);
  if (count > static_cast<double>(budget)) {
    std::ostringstream os;
    os << what << ": " << dim << "^" << length << " exceeds the enumeration budget " << budget;
    throw BudgetError(os.str());
  }
}

// Advances a base-`dim` odometer; false once it wraps around.
bool advance(std::vector<int>& digits, int dim) {
  for (auto& d : digits) {
    if (++d < dim) return true;
    d = 0;
  }
  return false;
}

void fill_row(const std::vector<int>& p, std::vector<IndexPair>& row) {
  const std::size_t k = p.size();
  row.resize(k);
  for (std::size_t l = 0; l < k; ++l) row[l] = {p[l] + 1, p[(l + 1) % k] + 1};
}

}  // namespace

void for_each_consistent_multiindex(int dim, int k1, int k2, const std::function<void(const MultiIndex&)>& visit,
                                    std::uint64_t budget) {
  if (dim < 1 || k1 < 1 || k2 < 1) throw ValidationError("multi-index enumeration needs dim, k1, k2 >= 1");
  check_budget(dim, k1 + k2, budget, "multi-index enumeration");
  std::vector<int> p1(k1, 0);
  MultiIndex index;
  do {
    fill_row(p1, index.row1);
    std::vector<int> p2(k2, 0);
    do {
      fill_row(p2, index.row2);
      visit(index);
    } while (advance(p2, dim));
  } while (advance(p1, dim));
}

InducedPartition induced_partition(const MultiIndex& index, const EquivalenceStructure& structure) {
  InducedPartition out;
  std::map<int, int> label;
  auto block_of = [&](IndexPair pair) {
    const auto slot = structure.at(pair);
    if (slot.id < 0) throw ValidationError("meets zero entry");
    auto [it, inserted] = label.emplace(slot.id, out.block_count);
    if (inserted) ++out.block_count;
    return it->second;
  };
  for (const auto& pair : index.row1) out.row1_block.push_back(block_of(pair));
  for (const auto& pair : index.row2) out.row2_block.push_back(block_of(pair));
  return out;
}

bool InducedPartition::equals(const PairPartition& pi) const {
  const auto m = static_cast<std::size_t>(pi.m);
  if (row1_block.size() != m || row2_block.size() != m || block_count != pi.m) return false;
  for (std::size_t l = 0; l < m; ++l) {
    if (row1_block[l] != static_cast<int>(l)) return false;
    if (row2_block[pi.partner[l] - 1] != row1_block[l]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Good multi-index enumeration: choose row one, then complete row two class by class.

namespace {

struct Member0 {
  int p, q, sign;
};

class GoodEnumerator {
 public:
  GoodEnumerator(const EquivalenceStructure& s, int m, GoodSetReading reading,
                 std::span<const DihedralElement> group)
      : s_(s), m_(m), distinct_(reading == GoodSetReading::Exact) {
    members_.resize(s.class_count());
    for (std::size_t id = 0; id < s.class_count(); ++id)
      for (const auto& mem : s.classes()[id].members)
        members_[id].push_back({mem.pair.p - 1, mem.pair.q - 1, mem.sign});
    // source_[g][j]: the row-one position paired with row-two position j.
    for (const auto& g : group) {
      std::vector<int> src(m);
      for (int l = 1; l <= m; ++l) src[g(l) - 1] = l - 1;
      source_.push_back(std::move(src));
    }
    p_.resize(m);
    ids_.resize(m);
    row2_.resize(m);
  }

  // visit(g_index, row-one p sequence, row-two members, sign product)
  template <class Visit>
  void run_from(int p0, Visit&& visit) {
    p_[0] = p0;
    row_one(1, 1, visit);
  }

 private:
  template <class Visit>
  void row_one(int l, int sign, Visit& visit) {
    const int dim = s_.dim();
    if (l == m_) {
      const auto slot = s_.slot0(p_[m_ - 1], p_[0]);
      if (slot.id < 0 || !fresh(slot.id, m_ - 1)) return;
      ids_[m_ - 1] = slot.id;
      const int total = sign * slot.sign;
      for (std::size_t g = 0; g < source_.size(); ++g) row_two(g, 0, total, visit);
      return;
    }
    for (int p = 0; p < dim; ++p) {
      const auto slot = s_.slot0(p_[l - 1], p);
      if (slot.id < 0 || !fresh(slot.id, l - 1)) continue;
      p_[l] = p;
      ids_[l - 1] = slot.id;
      row_one(l + 1, sign * slot.sign, visit);
    }
  }

  bool fresh(int id, int upto) const {
    if (!distinct_) return true;
    for (int j = 0; j < upto; ++j)
      if (ids_[j] == id) return false;
    return true;
  }

  template <class Visit>
  void row_two(std::size_t g, int j, int sign, Visit& visit) {
    if (j == m_) {
      if (row2_[m_ - 1]->q == row2_[0]->p) visit(g, p_, row2_, sign);
      return;
    }
    for (const auto& mem : members_[ids_[source_[g][j]]]) {
      if (j > 0 && mem.p != row2_[j - 1]->q) continue;
      row2_[j] = &mem;
      row_two(g, j + 1, sign * mem.sign, visit);
    }
  }

  const EquivalenceStructure& s_;
  int m_;
  bool distinct_;
  std::vector<std::vector<Member0>> members_;
  std::vector<std::vector<int>> source_;
  std::vector<int> p_;
  std::vector<int> ids_;
  std::vector<const Member0*> row2_;
};

double entry_square_moment(SymmetryClass cls, const EntryModel& model) {
  // E[a^2] for a representative a = phase * r.
  return (cls == SymmetryClass::DIII ? -1.0 : 1.0) * model.moment(2);
}

}  // namespace

std::vector<MultiIndex> good_multiindices(const DihedralElement& g, const EquivalenceStructure& structure,
                                          GoodSetReading reading, std::uint64_t budget) {
  const int m = g.m();
  check_budget(structure.dim(), m, budget, "good multi-index enumeration");
  std::vector<DihedralElement> group{g};
  GoodEnumerator e(structure, m, reading, group);
  std::vector<MultiIndex> out;
  auto collect = [&](std::size_t, const std::vector<int>& p, const std::vector<const Member0*>& row2, int) {
    MultiIndex index;
    fill_row(p, index.row1);
    for (const auto* mem : row2) index.row2.push_back({mem->p + 1, mem->q + 1});
    out.push_back(std::move(index));
  };
  for (int p0 = 0; p0 < structure.dim(); ++p0) e.run_from(p0, collect);
  return out;
}

FiniteVariance finite_variance_breakdown(SymmetryClass cls, int n, int m, const EntryModel& model,
                                         const VarianceOptions& options) {
  if (m < 1) throw ValidationError("degree must be positive");
  const EquivalenceStructure s(cls, n);
  const double dim = s.dim();
  const double square = entry_square_moment(cls, model);
  FiniteVariance out;

  if (m == 1) {
    detail::CompensatedSum acc;
    for (int p = 0; p < s.dim(); ++p) {
      const auto sp = s.slot0(p, p);
      if (sp.id < 0) continue;
      for (int q = 0; q < s.dim(); ++q) {
        const auto sq = s.slot0(q, q);
        if (sq.id == sp.id) acc += sp.sign * sq.sign * square;
      }
    }
    out.value = acc.value() / dim;
    return out;
  }

  if (m == 2) {
    // |a(p,q)|^2 = r^2 for every member of a class, so each same-class pair contributes Var(r^2).
    const double var_r2 = model.moment(4) - model.moment(2) * model.moment(2);
    double pairs = 0.0;
    for (const auto& c : s.classes()) {
      const auto off = std::count_if(c.members.begin(), c.members.end(),
                                     [](const ClassMember& x) { return x.pair.p != x.pair.q; });
      pairs += static_cast<double>(off * off);
    }
    out.value = pairs * var_r2 / (dim * dim);
    return out;
  }

  check_budget(s.dim(), m, options.budget, "finite-n variance");
  out.group = dihedral_group(m);
  const std::size_t group_size = out.group.size();
  const int threads = std::max(1, std::min(options.threads, s.dim()));

  // Signed counts are integers; accumulate them exactly and scale once.
  std::vector<std::vector<long long>> counts(threads, std::vector<long long>(group_size, 0));
  auto work = [&](int t) {
    GoodEnumerator e(s, m, options.reading, out.group);
    auto tally = [&](std::size_t g, const std::vector<int>&, const std::vector<const Member0*>&, int sign) {
      counts[t][g] += sign;
    };
    for (int p0 = t; p0 < s.dim(); p0 += threads) e.run_from(p0, tally);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  const double scale = std::pow(square, m) / std::pow(dim, m);
  out.per_g.assign(group_size, 0.0);
  for (std::size_t g = 0; g < group_size; ++g) {
    long long total = 0;
    for (const auto& c : counts) total += c[g];
    out.per_g[g] = static_cast<double>(total) * scale;
  }
  detail::CompensatedSum acc;
  for (double v : out.per_g) acc += v;
  out.value = acc.value();
  return out;
}

double finite_variance(SymmetryClass cls, int n, int m, const EntryModel& model, const VarianceOptions& options) {
  return finite_variance_breakdown(cls, n, m, model, options).value;
}

AsymptoticVariance asymptotic_variance(SymmetryClass, int m, double sigma, const EntryModel& model) {
  if (m < 1) throw ValidationError("degree must be positive");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (std::abs(sigma * sigma - model.sigma2()) > 1e-12 * std::max(1.0, model.sigma2()))
    throw ValidationError("sigma does not match the entry model variance");
  if (m == 2) return {4.0 * (model.moment(4) - model.moment(2) * model.moment(2)), TheoryFlag::Derived};
  if (m % 2) return {0.0, TheoryFlag::Theorem};
  return {4.0 * m * std::pow(sigma, 2 * m), TheoryFlag::Theorem};
}

// ---------------------------------------------------------------------------
// Oracles

double cov_traces_config_oracle(SymmetryClass cls, int n, int m, int mu, double sigma, const EntryModel& model,
                                std::uint64_t budget) {
  if (m < 1 || mu < 1) throw ValidationError("degrees must be positive");
  const EquivalenceStructure s(cls, n);
  const auto atoms = model.support();
  const auto classes = static_cast<int>(s.class_count());
  if (std::pow(static_cast<double>(atoms.size()), classes) > static_cast<double>(budget)) {
    std::ostringstream os;
    os << "configuration oracle: " << atoms.size() << "^" << classes << " assignments exceed budget " << budget;
    throw BudgetError(os.str());
  }
  const int dim = s.dim();
  const int top = std::max(m, mu);
  const auto cm = cheb_coefficients(m, sigma);
  const auto cmu = cheb_coefficients(mu, sigma);
  const bool imaginary = cls == SymmetryClass::DIII;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));

  // Re(phase^k) for X = phase * R.
  auto real_phase = [&](int k) {
    if (!imaginary) return 1.0;
    switch (k % 4) {
      case 0: return 1.0;
      case 2: return -1.0;
      default: return 0.0;
    }
  };
  auto cheb_trace = [&](const ChebSpec& spec, const std::vector<double>& power) {
    double t = 0.0;
    for (int k = 0; k <= spec.degree; ++k)
      t += static_cast<double>(spec.coeffs[k]) * std::pow(sigma, spec.degree - k) * real_phase(k) * power[k];
    return t;
  };

  std::vector<int> digits(classes, 0);
  Eigen::MatrixXd r(dim, dim), power(dim, dim), next(dim, dim);
  std::vector<double> traces(top + 1);
  detail::CompensatedSum e1, e2, e12;
  bool first = true;
  double shift1 = 0.0, shift2 = 0.0;
  do {
    double prob = 1.0;
    r.setZero();
    for (int c = 0; c < classes; ++c) {
      const auto& atom = atoms[digits[c]];
      prob *= atom.prob;
      for (const auto& mem : s.classes()[c].members) r(mem.pair.p - 1, mem.pair.q - 1) = mem.sign * scale * atom.value;
    }
    traces[0] = dim;
    power = r;
    for (int k = 1; k <= top; ++k) {
      traces[k] = power.trace();
      if (k < top) {
        next.noalias() = power * r;
        power.swap(next);
      }
    }
    const double t1 = cheb_trace(cm, traces);
    const double t2 = cheb_trace(cmu, traces);
    if (first) {
      shift1 = t1;
      shift2 = t2;
      first = false;
    }
    e1 += prob * (t1 - shift1);
    e2 += prob * (t2 - shift2);
    e12 += prob * (t1 - shift1) * (t2 - shift2);
  } while (advance(digits, static_cast<int>(atoms.size())));
  return e12.value() - e1.value() * e2.value();
}

namespace {

// Sorted class ids of one row, keyed to the summed sign of all rows sharing them.
using RowKey = std::vector<int>;

std::map<RowKey, long long> aggregate_rows(const EquivalenceStructure& s, int k) {
  std::map<RowKey, long long> rows;
  const int dim = s.dim();
  std::vector<int> p(k, 0);
  RowKey key(k);
  do {
    int sign = 1;
    bool zero = false;
    for (int l = 0; l < k; ++l) {
      const auto slot = s.slot0(p[l], p[(l + 1) % k]);
      if (slot.id < 0) {
        zero = true;
        break;
      }
      key[l] = slot.id;
      sign *= slot.sign;
    }
    if (zero) continue;
    RowKey sorted = key;
    std::sort(sorted.begin(), sorted.end());
    rows[sorted] += sign;
  } while (advance(p, dim));
  return rows;
}

// prod_c E[r^{mult_c}] over the multiset `ids` (sorted).
double monomial_moment(const std::vector<int>& ids, const std::vector<double>& moments) {
  double out = 1.0;
  std::size_t i = 0;
  while (i < ids.size()) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    out *= moments[j - i];
    if (out == 0.0) return 0.0;
    i = j;
  }
  return out;
}

bool share_an_id(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) ++i;
    else ++j;
  }
  return false;
}

}  // namespace

Eigen::MatrixXd power_trace_covariance(SymmetryClass cls, int n, int max_power, const EntryModel& model,
                                       std::uint64_t budget) {
  if (max_power < 1) throw ValidationError("max power must be positive");
  const EquivalenceStructure s(cls, n);
  check_budget(s.dim(), max_power, budget, "moment oracle");
  std::vector<double> moments(2 * max_power + 1);
  for (int k = 0; k <= 2 * max_power; ++k) moments[k] = model.moment(k);

  struct Row {
    RowKey ids;
    double sign;
    double moment;
  };
  std::vector<std::vector<Row>> rows(max_power + 1);
  for (int k = 1; k <= max_power; ++k)
    for (auto& [ids, sign] : aggregate_rows(s, k))
      if (sign != 0) rows[k].push_back({ids, static_cast<double>(sign), monomial_moment(ids, moments)});

  const bool imaginary = cls == SymmetryClass::DIII;
  const double dim = s.dim();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(max_power + 1, max_power + 1);
  RowKey merged;
  for (int j = 1; j <= max_power; ++j) {
    for (int k = j; k <= max_power; ++k) {
      detail::CompensatedSum acc;
      for (const auto& a : rows[j]) {
        for (const auto& b : rows[k]) {
          // Independent classes: E(prod1 prod2) = E prod1 E prod2, no covariance.
          if (!share_an_id(a.ids, b.ids)) continue;
          merged.resize(a.ids.size() + b.ids.size());
          std::merge(a.ids.begin(), a.ids.end(), b.ids.begin(), b.ids.end(), merged.begin());
          acc += a.sign * b.sign * (monomial_moment(merged, moments) - a.moment * b.moment);
        }
      }
      // Every entry carries one phase factor: phase^(j+k) overall.
      double phase = 1.0;
      const int total = j + k;
      if (imaginary) {
        if (total % 2) {
          if (std::abs(acc.value()) > 1e-9)
            throw std::logic_error("moment oracle: nonzero covariance with odd total degree for DIII");
          phase = 0.0;
        } else {
          phase = (total / 2) % 2 ? -1.0 : 1.0;
        }
      }
      cov(j, k) = cov(k, j) = phase * acc.value() / std::pow(dim, 0.5 * total);
    }
  }
  return cov;
}

double cov_traces_moment_oracle(SymmetryClass cls, int n, int k1, int k2, const EntryModel& model,
                                std::uint64_t budget) {
  if (k1 < 0 || k2 < 0) throw ValidationError("powers must be nonnegative");
  if (k1 == 0 || k2 == 0) return 0.0;
  return power_trace_covariance(cls, n, std::max(k1, k2), model, budget)(k1, k2);
}

Eigen::MatrixXd cheb_covariance_moment_oracle(SymmetryClass cls, int n, int max_degree, double sigma,
                                              const EntryModel& model, std::uint64_t budget) {
  const auto power = power_trace_covariance(cls, n, max_degree, model, budget);
  std::vector<ChebSpec> specs;
  for (int m = 1; m <= max_degree; ++m) specs.push_back(cheb_coefficients(m, sigma));
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(max_degree, max_degree);
  for (int a = 0; a < max_degree; ++a) {
    for (int b = 0; b < max_degree; ++b) {
      detail::CompensatedSum acc;
      const auto& sa = specs[a];
      const auto& sb = specs[b];
      for (int j = 1; j <= sa.degree; ++j) {
        if (sa.coeffs[j] == 0) continue;
        for (int k = 1; k <= sb.degree; ++k) {
          if (sb.coeffs[k] == 0) continue;
          acc += static_cast<double>(sa.coeffs[j] * sb.coeffs[k]) * std::pow(sigma, sa.degree - j) *
                 std::pow(sigma, sb.degree - k) * power(j, k);
        }
      }
      cov(a, b) = acc.value();
    }
  }
  return cov;
}

CovReport covariance_report(SymmetryClass cls, int n, int max_m, const EntryModel& model,
                            const VarianceOptions& options) {
  CovReport report{cls, n, {}};
  const double sigma = model.sigma();
  for (int m = 1; m <= max_m; ++m) {
    CovReportRow row;
    row.m = m;
    const auto fv = finite_variance_breakdown(cls, n, m, model, options);
    row.finite = fv.value;
    row.asymptotic = asymptotic_variance(cls, m, sigma, model);
    row.gap = std::abs(row.finite - row.asymptotic.value);
    row.per_g = fv.per_g;
    for (const auto& g : fv.group) {
      row.group_labels.push_back(g.label());
      row.per_g_fixed_scalar.push_back(per_g_leading_term(cls, g, sigma));
    }
    if (m >= 3) row.per_g_normalized_limit = (m % 2) ? 0.0 : 2.0 * std::pow(sigma, 2 * m);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace symmwig
