#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace symmwig {

/// Cartan class of the block matrix space [[X1, X2], [X2, -X1]].
/// DIII: X1, X2 purely imaginary skew-symmetric. CI: X1, X2 real symmetric.
enum class SymmetryClass { DIII, CI };

std::string_view to_string(SymmetryClass cls);
SymmetryClass parse_symmetry_class(std::string_view text);

/// Matrix position, 1-based: 1 <= p, q <= 2n.
struct IndexPair {
  int p = 1;
  int q = 1;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

enum class ClassKind { C1, C2 };

/// Identifies C_kind(a, b) with a <= b. C1 lives in the X1 blocks, C2 in the X2 blocks.
struct ClassKey {
  ClassKind kind = ClassKind::C1;
  int a = 1;
  int b = 1;
  friend auto operator<=>(const ClassKey&, const ClassKey&) = default;
};

struct ClassMember {
  IndexPair pair;
  int sign = 1;  // entry(pair) == sign * entry(representative)
};

struct EquivClass {
  ClassKey key;
  IndexPair representative;
  std::vector<ClassMember> members;  // representative first
};

/// Result of looking up a position: the class it belongs to and its sign.
struct Membership {
  ClassKey key;
  int sign = 1;
};

/// Membership of `pair`, or nullopt for a position forced to zero
/// (diagonal of a skew block, DIII only). Throws ValidationError if out of range.
std::optional<Membership> class_of(SymmetryClass cls, int n, IndexPair pair);

/// All classes in canonical order: C1 keys first, then C2, each lexicographic in (a, b).
/// Representatives are (a, b) for C1 and (n + a, b) for C2.
/// Throws ValidationError for DIII with n < 2 (degenerate space) and n < 1 otherwise.
std::vector<EquivClass> build_equivalence_classes(SymmetryClass cls, int n);

/// Dense lookup table over [2n]^2 with integer class ids (positions in the canonical order).
class EquivalenceStructure {
 public:
  EquivalenceStructure(SymmetryClass cls, int n);

  struct Slot {
    int id = -1;  // -1: forced zero
    int sign = 0;
  };

  SymmetryClass symmetry() const { return cls_; }
  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  const std::vector<EquivClass>& classes() const { return classes_; }
  std::size_t class_count() const { return classes_.size(); }

  /// 1-based lookup, throws on out-of-range.
  Slot at(IndexPair pair) const;
  /// Unchecked lookup with 0-based indices, for inner loops.
  Slot slot0(int p0, int q0) const { return table_[static_cast<std::size_t>(p0) * dim() + q0]; }

 private:
  SymmetryClass cls_;
  int n_;
  std::vector<EquivClass> classes_;
  std::vector<Slot> table_;
};

struct SymmetryStats {
  int alpha2 = 0;
  long long alpha0_hat = 0;
};

/// alpha2: largest class size; alpha0_hat: #{(p,q,r) : (p,q) ~ (q,r), p != r}, both over [2n].
/// Forced-zero positions are outside the relation and count as singletons.
SymmetryStats symmetry_stats(SymmetryClass cls, int n);

enum class EntryFamily { Gaussian, Rademacher, Atoms };

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

/// Law of the real draw r behind each representative entry. The representative itself is
/// i*r for DIII and r for CI, so E|representative|^2 = E r^2 = sigma2.
class EntryModel {
 public:
  static EntryModel gaussian(double sigma2 = 1.0);
  static EntryModel rademacher(double sigma2 = 1.0);
  /// Centered finite-support law; sigma2 is its variance.
  static EntryModel atoms(std::vector<Atom> atoms);

  /// Parses "gaussian", "rademacher" or "atoms:(v,p),(v,p),...". For atoms the resulting
  /// variance must match sigma2 when sigma2 is given.
  static EntryModel parse(std::string_view family, std::optional<double> sigma2);

  EntryFamily family() const { return family_; }
  double sigma2() const { return sigma2_; }
  double sigma() const;
  bool has_finite_support() const { return family_ != EntryFamily::Gaussian; }
  /// Full atom list; throws ValidationError for the Gaussian family.
  std::span<const Atom> support() const;

  /// E[r^k].
  double moment(int k) const;
  double draw(std::mt19937_64& rng) const;

  /// Round-trips through parse().
  std::string family_string() const;

 private:
  EntryModel(EntryFamily family, double sigma2, std::vector<Atom> atoms);

  EntryFamily family_;
  double sigma2_;
  std::vector<Atom> atoms_;
  std::vector<double> cdf_;
};

/// Whether entries are real (CI) or purely imaginary (DIII).
enum class EntryPhase { Real, Imaginary };

EntryPhase phase_of(SymmetryClass cls);

/// A Hermitian matrix X = phase * R with R real; R symmetric for a real phase and
/// antisymmetric for an imaginary one. Sampled matrices carry the 1/sqrt(2n) scaling.
class MatrixSample {
 public:
  /// Throws ValidationError unless R is square of even size with the required symmetry.
  MatrixSample(EntryPhase phase, Eigen::MatrixXd coefficients, std::uint64_t seed = 0);

  int dim() const { return static_cast<int>(coeffs_.rows()); }
  EntryPhase phase() const { return phase_; }
  std::uint64_t seed() const { return seed_; }
  /// The real matrix R with X = phase * R.
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }

  /// 1-based entry of X.
  std::complex<double> entry(int p, int q) const;
  Eigen::MatrixXcd to_complex() const;

  /// Trace summed in block pairs (a, n + a); exactly zero for DIII/CI samples.
  std::complex<double> trace() const;

 private:
  EntryPhase phase_;
  Eigen::MatrixXd coeffs_;
  std::uint64_t seed_;
};

/// Draws one matrix: one independent r per class in canonical order, members filled with
/// sign copies, everything scaled by 1/sqrt(2n). Deterministic in `seed`.
MatrixSample sample_matrix(SymmetryClass cls, int n, const EntryModel& model, std::uint64_t seed);
MatrixSample sample_matrix(const EquivalenceStructure& structure, const EntryModel& model,
                           std::uint64_t seed);

/// Stable seed splitting: splitmix64 finalizer applied to base and stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace symmwig
