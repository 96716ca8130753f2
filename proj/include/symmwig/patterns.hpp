#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symmwig/ensemble.hpp"

namespace symmwig {

/// Block-offset matrix (alpha beta / gamma delta) of a pattern entry. The top row holds the
/// block bits of the first-row index pair, the bottom row those of its partner.
struct DeltaMatrix {
  std::uint8_t alpha = 0, beta = 0, gamma = 0, delta = 0;

  bool even() const { return (alpha + beta + gamma + delta) % 2 == 0; }
  /// 4-bit code alpha beta gamma delta, most significant first.
  int code() const { return (alpha << 3) | (beta << 2) | (gamma << 1) | delta; }
  static DeltaMatrix from_code(int code);
  /// Accepts "0101" or "01/01".
  static DeltaMatrix parse(std::string_view text);
  std::string to_string() const;  // "(0 1/0 1)"

  friend bool operator==(const DeltaMatrix&, const DeltaMatrix&) = default;
};

/// A(a, b) = (a b / a b), R(a, b) = (a b / b a).
enum class LambdaKind { A, R };

enum class DeltaShape { Step, Plateau };
enum class DominoMode { Forward, Reverse };

struct PatternEntry {
  DeltaMatrix delta;
  LambdaKind lambda = LambdaKind::A;
};

struct Pattern {
  std::vector<PatternEntry> seq;
  int length() const { return static_cast<int>(seq.size()); }
  std::vector<DeltaMatrix> deltas() const;
};

/// Realization n*Delta_l + Lambda_l(a_l, b_l) of a pattern for scalars with a_l != b_l.
struct Instance {
  Pattern pattern;
  std::vector<std::pair<int, int>> scalars;
  std::vector<std::array<IndexPair, 2>> realized;  // {top row pair, bottom row pair}
};

Instance make_instance(const Pattern& pattern, int n, std::vector<std::pair<int, int>> scalars);
/// Both rows cyclically consistent (q of entry l equals p of entry l+1, wrapping).
bool is_consistent(const Instance& instance);

/// The eight even-sum binary 2x2 matrices, in the order of the two displays:
/// equal rows (00/00) (11/11) (01/01) (10/10), then (00/11) (11/00) (10/01) (01/10).
const std::array<DeltaMatrix, 8>& delta_alphabet();

/// Steps: (01/01) (10/10) (10/01) (01/10). Throws ValidationError outside the alphabet.
DeltaShape classify_delta(DeltaMatrix d);

/// Forward: second column of Delta_l equals first column of Delta_{l+1}.
/// Reverse: alpha_{l+1} = beta_l and delta_{l+1} = gamma_l. Both wrap m+1 -> 1.
bool check_domino(std::span<const DeltaMatrix> seq, DominoMode mode);

/// gamma^nu (Shift) or tau gamma^nu (Reflection), gamma = (1 2 ... m), tau(l) = m + 1 - l.
class DihedralElement {
 public:
  enum class Kind { Shift, Reflection };

  static DihedralElement shift(int m, int nu);
  static DihedralElement reflection(int m, int nu);
  static DihedralElement identity(int m) { return shift(m, 0); }

  int m() const { return static_cast<int>(perm_.size()); }
  Kind kind() const { return kind_; }
  int nu() const { return nu_; }
  /// Image of l in [1, m].
  int operator()(int l) const { return perm_[l - 1]; }
  const std::vector<int>& images() const { return perm_; }

  /// (this * other)(l) = this(other(l)). The result is re-labelled as gamma^nu or tau gamma^nu.
  DihedralElement compose(const DihedralElement& other) const;
  DihedralElement inverse() const;
  std::string label() const;  // "gamma^2", "tau*gamma^1"

  friend bool operator==(const DihedralElement& x, const DihedralElement& y) { return x.perm_ == y.perm_; }

 private:
  DihedralElement(Kind kind, int nu, std::vector<int> perm) : kind_(kind), nu_(nu), perm_(std::move(perm)) {}
  static DihedralElement from_images(std::vector<int> perm);

  Kind kind_;
  int nu_;
  std::vector<int> perm_;
};

/// All 2m elements: shifts nu = 0..m-1, then reflections nu = 0..m-1. Requires m >= 3.
std::vector<DihedralElement> dihedral_group(int m);

/// pi_g = { {(1,l), (2,g(l))} : l in [m] }, stored as partner[l-1] = g(l).
struct PairPartition {
  int m = 0;
  std::vector<int> partner;
  std::size_t block_count() const { return partner.size(); }
  friend bool operator==(const PairPartition&, const PairPartition&) = default;
};

PairPartition pair_partition(const DihedralElement& g);

/// For a Forward-domino Delta sequence: all Lambda must be A. For Reverse: all must be R.
/// Throws ValidationError if the Delta sequence satisfies neither condition.
bool is_substantial(const Pattern& pattern);

/// Number of scalar choices (a_l, b_l) in [n]^2, a_l != b_l, giving a consistent instance.
/// Depth-first with consistency pruning; BudgetError once `budget` search nodes are visited.
std::uint64_t count_consistent_instances(const Pattern& pattern, int n, std::uint64_t budget = 1'000'000'000ULL);

struct DeltaFilter {
  bool identical_rows = false;                 // gamma = alpha and delta = beta throughout
  std::optional<int> first_alpha;              // alpha_1 fixed
  std::optional<DeltaMatrix> first_delta;      // Delta_1 fixed
  bool tau_realizable = false;                 // reproduced by complete_reflection_sequence
};

struct DeltaEnumeration {
  std::vector<std::vector<DeltaMatrix>> sequences;
  std::uint64_t count = 0;
};

/// Cyclic domino (or reverse domino) sequences of length m over the alphabet, filtered.
/// Requires 1 <= m <= 16.
DeltaEnumeration enumerate_delta_sequences(int m, DominoMode mode, const DeltaFilter& filter = {});

/// Closed-form count for the filters used in the tables; nullopt if none is known.
std::optional<std::uint64_t> delta_count_closed_form(int m, DominoMode mode, const DeltaFilter& filter);

/// Reflection case: fixes Delta_1, takes the free top-row bits beta_2..beta_{m-1} (the other
/// top entries follow from alpha_{l+1} = beta_l and the wrap beta_m = alpha_1) and fills the
/// bottom row by the parity rule. The result is a Reverse-domino sequence; the filling
/// is unique (asserted). Requires m >= 3 and upper_bits.size() == m - 2.
std::vector<DeltaMatrix> complete_reflection_sequence(DeltaMatrix first, std::span<const int> upper_bits, int m);

enum class SignMode { ForwardAligned, ReverseReversed };

/// Sign s with E(a(top) a(bottom)) = s * sigma^2 for a pattern entry with this Delta.
int delta_sign(SymmetryClass cls, SignMode mode, DeltaMatrix d);

/// Delta-summed signed weight for one fixed scalar sequence and group element g:
/// sum over contributing Delta sequences of prod_l delta_sign(...) * sigma^{2m}.
/// Computed by enumeration and checked against 0 (m odd) / 2^{m+1} sigma^{2m} (m even);
/// a mismatch throws std::logic_error. Requires m >= 3.
double per_g_leading_term(SymmetryClass cls, const DihedralElement& g, double sigma);

}  // namespace symmwig
