#include "symmwig/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "symmwig/errors.hpp"

namespace symmwig {

std::string_view to_string(SymmetryClass cls) {
  return cls == SymmetryClass::DIII ? "DIII" : "CI";
}

SymmetryClass parse_symmetry_class(std::string_view text) {
  if (text == "DIII" || text == "diii") return SymmetryClass::DIII;
  if (text == "CI" || text == "ci") return SymmetryClass::CI;
  throw ValidationError("unknown symmetry class '" + std::string(text) + "' (expected DIII or CI)");
}

namespace {

void check_size(SymmetryClass cls, int n) {
  if (cls == SymmetryClass::DIII && n == 1)
    throw ValidationError("degenerate space: DIII with n = 1 has only zero entries");
  if (n < 1) throw ValidationError("n must be positive");
}

}  // namespace

std::optional<Membership> class_of(SymmetryClass cls, int n, IndexPair pair) {
  if (n < 1) throw ValidationError("n must be positive");
  const int dim = 2 * n;
  if (pair.p < 1 || pair.p > dim || pair.q < 1 || pair.q > dim) {
    std::ostringstream os;
    os << "index pair (" << pair.p << "," << pair.q << ") outside [1," << dim << "]^2";
    throw ValidationError(os.str());
  }
  const bool lower_p = pair.p > n;
  const bool lower_q = pair.q > n;
  const int a = lower_p ? pair.p - n : pair.p;
  const int b = lower_q ? pair.q - n : pair.q;
  const bool skew = cls == SymmetryClass::DIII;
  if (skew && a == b) return std::nullopt;

  Membership out;
  out.key.a = std::min(a, b);
  out.key.b = std::max(a, b);
  // Entry of the block at (a, b) relative to the block entry at (min, max).
  const int transpose_sign = (a > b && skew) ? -1 : 1;
  if (lower_p == lower_q) {
    out.key.kind = ClassKind::C1;
    // X1 in the upper-left block, -X1 in the lower-right one.
    out.sign = transpose_sign * (lower_p ? -1 : 1);
  } else {
    out.key.kind = ClassKind::C2;
    // Both off-diagonal blocks hold X2(a, b) at (n + a, b) and (a, n + b).
    out.sign = transpose_sign;
  }
  return out;
}

std::vector<EquivClass> build_equivalence_classes(SymmetryClass cls, int n) {
  check_size(cls, n);
  const int lowest_gap = cls == SymmetryClass::DIII ? 1 : 0;
  std::vector<EquivClass> classes;
  std::map<ClassKey, std::size_t> index;
  for (ClassKind kind : {ClassKind::C1, ClassKind::C2}) {
    for (int a = 1; a <= n; ++a) {
      for (int b = a + lowest_gap; b <= n; ++b) {
        EquivClass c;
        c.key = {kind, a, b};
        c.representative = kind == ClassKind::C1 ? IndexPair{a, b} : IndexPair{n + a, b};
        index.emplace(c.key, classes.size());
        classes.push_back(std::move(c));
      }
    }
  }
  for (int p = 1; p <= 2 * n; ++p) {
    for (int q = 1; q <= 2 * n; ++q) {
      const auto m = class_of(cls, n, {p, q});
      if (!m) continue;
      auto& c = classes.at(index.at(m->key));
      c.members.push_back({{p, q}, m->sign});
    }
  }
  for (auto& c : classes) {
    auto rep = std::find_if(c.members.begin(), c.members.end(),
                            [&](const ClassMember& x) { return x.pair == c.representative; });
    std::rotate(c.members.begin(), rep, rep + 1);
  }
  return classes;
}

EquivalenceStructure::EquivalenceStructure(SymmetryClass cls, int n)
    : cls_(cls), n_(n), classes_(build_equivalence_classes(cls, n)) {
  table_.assign(static_cast<std::size_t>(dim()) * dim(), Slot{});
  for (std::size_t id = 0; id < classes_.size(); ++id) {
    for (const auto& member : classes_[id].members) {
      table_[static_cast<std::size_t>(member.pair.p - 1) * dim() + (member.pair.q - 1)] =
          Slot{static_cast<int>(id), member.sign};
    }
  }
}

EquivalenceStructure::Slot EquivalenceStructure::at(IndexPair pair) const {
  if (pair.p < 1 || pair.p > dim() || pair.q < 1 || pair.q > dim())
    throw ValidationError("index pair outside [1, 2n]^2");
  return slot0(pair.p - 1, pair.q - 1);
}

SymmetryStats symmetry_stats(SymmetryClass cls, int n) {
  const EquivalenceStructure s(cls, n);
  const int dim = s.dim();
  SymmetryStats stats;
  for (const auto& c : s.classes())
    stats.alpha2 = std::max(stats.alpha2, static_cast<int>(c.members.size()));
  if (stats.alpha2 == 0) stats.alpha2 = 1;
  for (int p = 0; p < dim; ++p) {
    for (int q = 0; q < dim; ++q) {
      const int id = s.slot0(p, q).id;
      if (id < 0) continue;
      for (int r = 0; r < dim; ++r) {
        if (r != p && s.slot0(q, r).id == id) ++stats.alpha0_hat;
      }
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// EntryModel

EntryModel::EntryModel(EntryFamily family, double sigma2, std::vector<Atom> atoms)
    : family_(family), sigma2_(sigma2), atoms_(std::move(atoms)) {
  double acc = 0.0;
  for (const auto& a : atoms_) {
    acc += a.prob;
    cdf_.push_back(acc);
  }
}

EntryModel EntryModel::gaussian(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("sigma2 must be positive");
  return EntryModel(EntryFamily::Gaussian, sigma2, {});
}

EntryModel EntryModel::rademacher(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("sigma2 must be positive");
  const double s = std::sqrt(sigma2);
  return EntryModel(EntryFamily::Rademacher, sigma2, {{-s, 0.5}, {s, 0.5}});
}

EntryModel EntryModel::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ValidationError("atom list is empty");
  double total = 0.0, mean = 0.0, second = 0.0;
  for (const auto& a : atoms) {
    if (!(a.prob > 0.0) || !std::isfinite(a.value))
      throw ValidationError("atoms need finite values and positive probabilities");
    total += a.prob;
    mean += a.prob * a.value;
    second += a.prob * a.value * a.value;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("atom probabilities must sum to 1");
  if (std::abs(mean) > 1e-12) throw ValidationError("atom law must be centered");
  if (!(second > 0.0)) throw ValidationError("atom law must have positive variance");
  return EntryModel(EntryFamily::Atoms, second, std::move(atoms));
}

namespace {

double parse_double(std::string_view s) {
  std::string buf(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + buf + "'");
  }
  if (used != buf.size()) throw ValidationError("not a number: '" + buf + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<Atom> parse_atoms(std::string_view list) {
  std::vector<Atom> out;
  list = trim(list);
  while (!list.empty()) {
    if (list.front() != '(') throw ValidationError("atoms: expected '(' in atom list");
    const auto close = list.find(')');
    if (close == std::string_view::npos) throw ValidationError("atoms: missing ')'");
    const auto body = list.substr(1, close - 1);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw ValidationError("atoms: expected (value,prob)");
    out.push_back({parse_double(trim(body.substr(0, comma))), parse_double(trim(body.substr(comma + 1)))});
    list = trim(list.substr(close + 1));
    if (!list.empty()) {
      if (list.front() != ',' && list.front() != ';')
        throw ValidationError("atoms: expected ',' between atoms");
      list = trim(list.substr(1));
    }
  }
  return out;
}

}  // namespace

EntryModel EntryModel::parse(std::string_view family, std::optional<double> sigma2) {
  family = trim(family);
  if (family == "gaussian") return gaussian(sigma2.value_or(1.0));
  if (family == "rademacher") return rademacher(sigma2.value_or(1.0));
  if (family.starts_with("atoms:")) {
    auto model = atoms(parse_atoms(family.substr(6)));
    if (sigma2 && std::abs(*sigma2 - model.sigma2()) > 1e-12 * std::max(1.0, *sigma2))
      throw ValidationError("sigma2 does not match the variance of the atom list");
    return model;
  }
  throw ValidationError("unknown entry family '" + std::string(family) + "'");
}

double EntryModel::sigma() const { return std::sqrt(sigma2_); }

std::span<const Atom> EntryModel::support() const {
  if (family_ == EntryFamily::Gaussian) throw ValidationError("Gaussian family has no finite support");
  return atoms_;
}

double EntryModel::moment(int k) const {
  if (k < 0) throw ValidationError("negative moment order");
  if (k == 0) return 1.0;
  if (family_ == EntryFamily::Gaussian) {
    if (k % 2) return 0.0;
    double dfact = 1.0;  // (k-1)!!
    for (int j = k - 1; j > 1; j -= 2) dfact *= j;
    return dfact * std::pow(sigma2_, k / 2);
  }
  if (family_ == EntryFamily::Rademacher) return k % 2 ? 0.0 : std::pow(sigma2_, k / 2);
  double acc = 0.0;
  for (const auto& a : atoms_) acc += a.prob * std::pow(a.value, k);
  return acc;
}

double EntryModel::draw(std::mt19937_64& rng) const {
  switch (family_) {
    case EntryFamily::Gaussian:
      return std::normal_distribution<double>(0.0, sigma())(rng);
    case EntryFamily::Rademacher:
      return (rng() >> 63) ? atoms_[1].value : atoms_[0].value;
    case EntryFamily::Atoms: {
      const double u = std::generate_canonical<double, 53>(rng) * cdf_.back();
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      return atoms_[std::min<std::size_t>(it - cdf_.begin(), atoms_.size() - 1)].value;
    }
  }
  return 0.0;
}

std::string EntryModel::family_string() const {
  switch (family_) {
    case EntryFamily::Gaussian:
      return "gaussian";
    case EntryFamily::Rademacher:
      return "rademacher";
    case EntryFamily::Atoms: {
      std::ostringstream os;
      os.precision(17);
      os << "atoms:";
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        os << (i ? "," : "") << '(' << atoms_[i].value << ',' << atoms_[i].prob << ')';
      return os.str();
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// MatrixSample

EntryPhase phase_of(SymmetryClass cls) {
  return cls == SymmetryClass::DIII ? EntryPhase::Imaginary : EntryPhase::Real;
}

MatrixSample::MatrixSample(EntryPhase phase, Eigen::MatrixXd coefficients, std::uint64_t seed)
    : phase_(phase), coeffs_(std::move(coefficients)), seed_(seed) {
  if (coeffs_.rows() != coeffs_.cols() || coeffs_.rows() % 2 != 0)
    throw ValidationError("matrix must be square with even dimension");
  const double parity = phase_ == EntryPhase::Real ? 1.0 : -1.0;
  for (Eigen::Index i = 0; i < coeffs_.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      if (coeffs_(j, i) != parity * coeffs_(i, j))
        throw ValidationError(phase_ == EntryPhase::Real ? "real-phase matrix must be symmetric"
                                                          : "imaginary-phase matrix must be antisymmetric");
}

std::complex<double> MatrixSample::entry(int p, int q) const {
  const double v = coeffs_(p - 1, q - 1);
  return phase_ == EntryPhase::Real ? std::complex<double>(v, 0.0) : std::complex<double>(0.0, v);
}

Eigen::MatrixXcd MatrixSample::to_complex() const {
  const std::complex<double> phase = phase_ == EntryPhase::Real ? 1.0 : std::complex<double>(0.0, 1.0);
  return phase * coeffs_.cast<std::complex<double>>();
}

std::complex<double> MatrixSample::trace() const {
  const int half = dim() / 2;
  double t = 0.0;
  for (int a = 0; a < half; ++a) t += coeffs_(a, a) + coeffs_(half + a, half + a);
  return phase_ == EntryPhase::Real ? std::complex<double>(t, 0.0) : std::complex<double>(0.0, t);
}

MatrixSample sample_matrix(const EquivalenceStructure& structure, const EntryModel& model,
                           std::uint64_t seed) {
  const int dim = structure.dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dim, dim);
  std::mt19937_64 rng(seed);
  // One distribution object for the whole matrix so paired normal draws are not discarded.
  std::normal_distribution<double> normal(0.0, model.sigma());
  const bool gaussian = model.family() == EntryFamily::Gaussian;
  for (const auto& c : structure.classes()) {
    const double value = scale * (gaussian ? normal(rng) : model.draw(rng));
    for (const auto& m : c.members) r(m.pair.p - 1, m.pair.q - 1) = m.sign * value;
  }
  return MatrixSample(phase_of(structure.symmetry()), std::move(r), seed);
}

MatrixSample sample_matrix(SymmetryClass cls, int n, const EntryModel& model, std::uint64_t seed) {
  return sample_matrix(EquivalenceStructure(cls, n), model, seed);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace symmwig
