#include "symmwig/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "symmwig/errors.hpp"

namespace symmwig {

DeltaMatrix DeltaMatrix::from_code(int code) {
  if (code < 0 || code > 15) throw ValidationError("Delta code out of range");
  return {static_cast<std::uint8_t>((code >> 3) & 1), static_cast<std::uint8_t>((code >> 2) & 1),
          static_cast<std::uint8_t>((code >> 1) & 1), static_cast<std::uint8_t>(code & 1)};
}

DeltaMatrix DeltaMatrix::parse(std::string_view text) {
  std::string bits;
  for (char c : text) {
    if (c == '0' || c == '1') bits.push_back(c);
    else if (c != '/' && c != ' ' && c != '(' && c != ')')
      throw ValidationError("Delta matrix: unexpected character in '" + std::string(text) + "'");
  }
  if (bits.size() != 4) throw ValidationError("Delta matrix needs four binary entries: '" + std::string(text) + "'");
  return from_code(std::stoi(bits, nullptr, 2));
}

std::string DeltaMatrix::to_string() const {
  std::ostringstream os;
  os << '(' << int(alpha) << ' ' << int(beta) << '/' << int(gamma) << ' ' << int(delta) << ')';
  return os.str();
}

std::vector<DeltaMatrix> Pattern::deltas() const {
  std::vector<DeltaMatrix> out;
  out.reserve(seq.size());
  for (const auto& e : seq) out.push_back(e.delta);
  return out;
}

namespace {

std::array<IndexPair, 2> realize(const PatternEntry& e, int n, int a, int b) {
  const IndexPair top{n * e.delta.alpha + a, n * e.delta.beta + b};
  const IndexPair bottom = e.lambda == LambdaKind::A ? IndexPair{n * e.delta.gamma + a, n * e.delta.delta + b}
                                                     : IndexPair{n * e.delta.gamma + b, n * e.delta.delta + a};
  return {top, bottom};
}

bool chains(const std::array<IndexPair, 2>& prev, const std::array<IndexPair, 2>& next) {
  return prev[0].q == next[0].p && prev[1].q == next[1].p;
}

void require_alphabet(DeltaMatrix d) {
  if (!d.even()) throw ValidationError("Delta " + d.to_string() + " is not in the alphabet (odd entry sum)");
}

}  // namespace

Instance make_instance(const Pattern& pattern, int n, std::vector<std::pair<int, int>> scalars) {
  if (scalars.size() != pattern.seq.size()) throw ValidationError("one scalar pair per pattern entry");
  Instance inst{pattern, std::move(scalars), {}};
  for (std::size_t l = 0; l < inst.scalars.size(); ++l) {
    const auto [a, b] = inst.scalars[l];
    if (a < 1 || a > n || b < 1 || b > n || a == b) throw ValidationError("instance scalars need a != b in [n]");
    inst.realized.push_back(realize(pattern.seq[l], n, a, b));
  }
  return inst;
}

bool is_consistent(const Instance& instance) {
  const std::size_t m = instance.realized.size();
  for (std::size_t l = 0; l < m; ++l)
    if (!chains(instance.realized[l], instance.realized[(l + 1) % m])) return false;
  return true;
}

const std::array<DeltaMatrix, 8>& delta_alphabet() {
  static const std::array<DeltaMatrix, 8> alphabet{{
      {0, 0, 0, 0}, {1, 1, 1, 1}, {0, 1, 0, 1}, {1, 0, 1, 0},
      {0, 0, 1, 1}, {1, 1, 0, 0}, {1, 0, 0, 1}, {0, 1, 1, 0},
  }};
  return alphabet;
}

DeltaShape classify_delta(DeltaMatrix d) {
  require_alphabet(d);
  // The steps are exactly the alphabet members whose two columns differ.
  return (d.alpha != d.beta) ? DeltaShape::Step : DeltaShape::Plateau;
}

namespace {

bool links(DeltaMatrix cur, DeltaMatrix next, DominoMode mode) {
  if (mode == DominoMode::Forward) return cur.beta == next.alpha && cur.delta == next.gamma;
  return next.alpha == cur.beta && next.delta == cur.gamma;
}

}  // namespace

bool check_domino(std::span<const DeltaMatrix> seq, DominoMode mode) {
  for (std::size_t l = 0; l < seq.size(); ++l)
    if (!links(seq[l], seq[(l + 1) % seq.size()], mode)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Dihedral group

DihedralElement DihedralElement::shift(int m, int nu) {
  if (m < 1) throw ValidationError("dihedral element needs m >= 1");
  nu = ((nu % m) + m) % m;
  std::vector<int> perm(m);
  for (int l = 1; l <= m; ++l) perm[l - 1] = (l - 1 + nu) % m + 1;
  return DihedralElement(Kind::Shift, nu, std::move(perm));
}

DihedralElement DihedralElement::reflection(int m, int nu) {
  auto s = shift(m, nu);
  for (auto& x : s.perm_) x = m + 1 - x;
  s.kind_ = Kind::Reflection;
  return s;
}

DihedralElement DihedralElement::from_images(std::vector<int> perm) {
  const int m = static_cast<int>(perm.size());
  auto as_shift = shift(m, perm[0] - 1);
  if (as_shift.perm_ == perm) return as_shift;
  auto as_reflection = reflection(m, m - perm[0]);
  if (as_reflection.perm_ == perm) return as_reflection;
  throw std::logic_error("permutation is not in the dihedral group");
}

DihedralElement DihedralElement::compose(const DihedralElement& other) const {
  if (other.m() != m()) throw ValidationError("composing dihedral elements of different degree");
  std::vector<int> perm(m());
  for (int l = 1; l <= m(); ++l) perm[l - 1] = (*this)(other(l));
  return from_images(std::move(perm));
}

DihedralElement DihedralElement::inverse() const {
  std::vector<int> perm(m());
  for (int l = 1; l <= m(); ++l) perm[(*this)(l) - 1] = l;
  return from_images(std::move(perm));
}

std::string DihedralElement::label() const {
  return (kind_ == Kind::Shift ? "gamma^" : "tau*gamma^") + std::to_string(nu_);
}

std::vector<DihedralElement> dihedral_group(int m) {
  if (m < 3) throw ValidationError("dihedral group needs m >= 3");
  std::vector<DihedralElement> out;
  for (int nu = 0; nu < m; ++nu) out.push_back(DihedralElement::shift(m, nu));
  for (int nu = 0; nu < m; ++nu) out.push_back(DihedralElement::reflection(m, nu));
  return out;
}

PairPartition pair_partition(const DihedralElement& g) { return {g.m(), g.images()}; }

// ---------------------------------------------------------------------------
// Patterns

bool is_substantial(const Pattern& pattern) {
  const auto deltas = pattern.deltas();
  if (deltas.empty()) throw ValidationError("empty pattern");
  for (const auto& d : deltas) require_alphabet(d);
  LambdaKind required;
  if (check_domino(deltas, DominoMode::Forward)) required = LambdaKind::A;
  else if (check_domino(deltas, DominoMode::Reverse)) required = LambdaKind::R;
  else throw ValidationError("lemma inapplicable: Delta sequence satisfies neither domino condition");
  return std::all_of(pattern.seq.begin(), pattern.seq.end(),
                     [&](const PatternEntry& e) { return e.lambda == required; });
}

namespace {

struct InstanceSearch {
  const Pattern& pattern;
  int n;
  std::uint64_t budget;
  std::uint64_t visited = 0;
  std::uint64_t count = 0;
  std::vector<std::array<IndexPair, 2>> stack;

  void run(std::size_t l) {
    const std::size_t m = pattern.seq.size();
    if (l == m) {
      if (chains(stack.back(), stack.front())) ++count;
      return;
    }
    for (int a = 1; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        if (a == b) continue;
        if (++visited > budget) throw BudgetError("instance enumeration budget exceeded");
        const auto r = realize(pattern.seq[l], n, a, b);
        if (l > 0 && !chains(stack.back(), r)) continue;
        stack.push_back(r);
        run(l + 1);
        stack.pop_back();
      }
    }
  }
};

}  // namespace

std::uint64_t count_consistent_instances(const Pattern& pattern, int n, std::uint64_t budget) {
  if (pattern.seq.empty()) throw ValidationError("empty pattern");
  if (n < 2) return 0;
  for (const auto& e : pattern.seq) require_alphabet(e.delta);
  InstanceSearch search{pattern, n, budget, 0, 0, {}};
  search.run(0);
  return search.count;
}

// ---------------------------------------------------------------------------
// Delta sequences

namespace {

std::vector<int> free_top_bits(std::span<const DeltaMatrix> seq) {
  std::vector<int> bits;
  for (std::size_t l = 1; l + 1 < seq.size(); ++l) bits.push_back(seq[l].beta);
  return bits;
}

bool passes(std::span<const DeltaMatrix> seq, const DeltaFilter& filter) {
  if (filter.identical_rows)
    for (const auto& d : seq)
      if (d.alpha != d.gamma || d.beta != d.delta) return false;
  if (filter.first_alpha && seq.front().alpha != *filter.first_alpha) return false;
  if (filter.first_delta && !(seq.front() == *filter.first_delta)) return false;
  if (filter.tau_realizable) {
    if (seq.size() < 3) return false;
    const auto bits = free_top_bits(seq);
    const auto completed = complete_reflection_sequence(seq.front(), bits, static_cast<int>(seq.size()));
    if (!std::equal(completed.begin(), completed.end(), seq.begin())) return false;
  }
  return true;
}

void extend(std::vector<DeltaMatrix>& seq, std::size_t m, DominoMode mode, const DeltaFilter& filter,
            DeltaEnumeration& out) {
  if (seq.size() == m) {
    if (links(seq.back(), seq.front(), mode) && passes(seq, filter)) {
      out.sequences.push_back(seq);
      ++out.count;
    }
    return;
  }
  for (const auto& d : delta_alphabet()) {
    if (!links(seq.back(), d, mode)) continue;
    seq.push_back(d);
    extend(seq, m, mode, filter, out);
    seq.pop_back();
  }
}

}  // namespace

DeltaEnumeration enumerate_delta_sequences(int m, DominoMode mode, const DeltaFilter& filter) {
  if (m < 1) throw ValidationError("sequence length must be positive");
  if (m > 16) throw BudgetError("Delta sequence enumeration is limited to m <= 16");
  if (filter.first_delta) require_alphabet(*filter.first_delta);
  DeltaEnumeration out;
  std::vector<DeltaMatrix> seq;
  seq.reserve(m);
  for (const auto& d : delta_alphabet()) {
    if (filter.first_delta && !(d == *filter.first_delta)) continue;
    if (filter.first_alpha && d.alpha != *filter.first_alpha) continue;
    seq.push_back(d);
    extend(seq, static_cast<std::size_t>(m), mode, filter, out);
    seq.pop_back();
  }
  return out;
}

std::optional<std::uint64_t> delta_count_closed_form(int m, DominoMode mode, const DeltaFilter& filter) {
  if (m < 1 || m > 62) return std::nullopt;
  const auto pow2 = [](int k) { return std::uint64_t{1} << k; };
  if (filter.tau_realizable && mode == DominoMode::Forward) return std::nullopt;
  if (filter.tau_realizable && m < 3) return std::nullopt;
  if (filter.identical_rows) {
    if (mode != DominoMode::Forward || filter.first_delta || filter.tau_realizable) return std::nullopt;
    // Both rows are the same closed binary walk; fixing alpha_1 halves the count.
    return filter.first_alpha ? pow2(m - 1) : pow2(m);
  }
  // Top row: closed binary walk (2^m); bottom row: top row XOR a constant (2 choices).
  if (filter.first_delta) {
    if (m < 2) return std::nullopt;
    return pow2(m - 2);
  }
  if (filter.first_alpha) return pow2(m);
  return pow2(m + 1);
}

std::vector<DeltaMatrix> complete_reflection_sequence(DeltaMatrix first, std::span<const int> upper_bits, int m) {
  if (m < 3) throw ValidationError("reflection completion needs m >= 3");
  require_alphabet(first);
  if (static_cast<int>(upper_bits.size()) != m - 2) throw ValidationError("need m - 2 free top-row bits");
  for (int b : upper_bits)
    if (b != 0 && b != 1) throw ValidationError("top-row bits must be 0 or 1");

  std::vector<DeltaMatrix> seq(m);
  seq[0] = first;
  // Top row: alpha_{l+1} = beta_l; free beta_2..beta_{m-1}; beta_m closes onto alpha_1.
  for (int l = 1; l < m; ++l) {
    seq[l].alpha = seq[l - 1].beta;
    seq[l].beta = (l == m - 1) ? first.alpha : static_cast<std::uint8_t>(upper_bits[l - 1]);
  }
  // Bottom row: delta_{l+1} = gamma_l, and gamma_l is the unique bit making Delta_l even.
  for (int l = 1; l < m; ++l) {
    seq[l].delta = seq[l - 1].gamma;
    seq[l].gamma = static_cast<std::uint8_t>((seq[l].alpha + seq[l].beta + seq[l].delta) % 2);
  }
  if (seq[m - 1].gamma != first.delta)
    throw std::logic_error("reflection completion failed to close the bottom row");
  return seq;
}

int delta_sign(SymmetryClass cls, SignMode mode, DeltaMatrix d) {
  require_alphabet(d);
  // Bottom pair is the top pair shifted into the other diagonal block: (00/11) and (11/00).
  const bool cross_diagonal = d.alpha == d.beta && d.gamma == d.delta && d.alpha != d.gamma;
  if (cls == SymmetryClass::CI) return cross_diagonal ? -1 : 1;
  const int forward = cross_diagonal ? 1 : -1;
  return mode == SignMode::ForwardAligned ? forward : -forward;
}

double per_g_leading_term(SymmetryClass cls, const DihedralElement& g, double sigma) {
  const int m = g.m();
  if (m < 3) throw ValidationError("per-g leading term needs m >= 3");
  long long total = 0;
  if (g.kind() == DihedralElement::Kind::Shift) {
    for (const auto& seq : enumerate_delta_sequences(m, DominoMode::Forward).sequences) {
      int sign = 1;
      for (const auto& d : seq) sign *= delta_sign(cls, SignMode::ForwardAligned, d);
      total += sign;
    }
  } else {
    std::vector<int> bits(m - 2);
    for (const auto& first : delta_alphabet()) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (m - 2)); ++mask) {
        for (int j = 0; j < m - 2; ++j) bits[j] = static_cast<int>((mask >> j) & 1);
        int sign = 1;
        for (const auto& d : complete_reflection_sequence(first, bits, m))
          sign *= delta_sign(cls, SignMode::ReverseReversed, d);
        total += sign;
      }
    }
  }
  const long long expected = (m % 2) ? 0 : (1LL << (m + 1));
  if (total != expected) {
    std::ostringstream os;
    os << "per-g leading term for " << g.label() << ", m = " << m << ": enumeration gives " << total
       << ", closed form " << expected;
    throw std::logic_error(os.str());
  }
  return static_cast<double>(total) * std::pow(sigma, 2 * m);
}

}  // namespace symmwig
