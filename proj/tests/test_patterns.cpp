#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "symmwig/errors.hpp"
#include "symmwig/patterns.hpp"

using namespace symmwig;

namespace {

DeltaMatrix D(const char* bits) { return DeltaMatrix::parse(bits); }

bool chains_forward(DeltaMatrix x, DeltaMatrix y) { return x.beta == y.alpha && x.delta == y.gamma; }
bool chains_reverse(DeltaMatrix x, DeltaMatrix y) { return y.alpha == x.beta && y.delta == x.gamma; }

bool domino(const std::vector<DeltaMatrix>& s, DominoMode mode) {
  for (std::size_t l = 0; l < s.size(); ++l) {
    const auto& x = s[l];
    const auto& y = s[(l + 1) % s.size()];
    if (!(mode == DominoMode::Forward ? chains_forward(x, y) : chains_reverse(x, y))) return false;
  }
  return true;
}

// Every length-m word over the alphabet, by brute force.
template <typename F>
void for_each_word(int m, F&& f) {
  const auto& alpha = delta_alphabet();
  std::vector<int> idx(m, 0);
  std::vector<DeltaMatrix> w(m, alpha[0]);
  while (true) {
    for (int l = 0; l < m; ++l) w[l] = alpha[idx[l]];
    f(w);
    int l = 0;
    while (l < m && ++idx[l] == 8) idx[l++] = 0;
    if (l == m) return;
  }
}

bool identical_rows(const std::vector<DeltaMatrix>& w) {
  return std::all_of(w.begin(), w.end(), [](DeltaMatrix d) { return d.alpha == d.gamma && d.beta == d.delta; });
}

// Scalar assignments giving consistent rows, by brute force over [n]^{2m}.
std::uint64_t brute_instances(const Pattern& pat, int n) {
  const int m = pat.length();
  std::vector<int> a(m, 1), b(m, 1);
  std::uint64_t count = 0;
  while (true) {
    bool ok = true;
    for (int l = 0; l < m && ok; ++l) ok = a[l] != b[l];
    if (ok) {
      std::vector<IndexPair> top(m), bot(m);
      for (int l = 0; l < m; ++l) {
        const auto d = pat.seq[l].delta;
        top[l] = {n * d.alpha + a[l], n * d.beta + b[l]};
        bot[l] = pat.seq[l].lambda == LambdaKind::A ? IndexPair{n * d.gamma + a[l], n * d.delta + b[l]}
                                                    : IndexPair{n * d.gamma + b[l], n * d.delta + a[l]};
      }
      for (int l = 0; l < m && ok; ++l)
        ok = top[l].q == top[(l + 1) % m].p && bot[l].q == bot[(l + 1) % m].p;
      if (ok) ++count;
    }
    int l = 0;
    while (l < 2 * m) {
      int& v = l < m ? a[l] : b[l - m];
      if (++v <= n) break;
      v = 1;
      ++l;
    }
    if (l == 2 * m) return count;
  }
}

Pattern uniform(int m, DeltaMatrix d, LambdaKind k) { return Pattern{std::vector<PatternEntry>(m, PatternEntry{d, k})}; }

}  // namespace

TEST_CASE("alphabet and shapes") {
  const auto& a = delta_alphabet();
  CHECK(a.size() == 8);
  CHECK(std::find(a.begin(), a.end(), D("01/10")) != a.end());
  CHECK(std::find(a.begin(), a.end(), D("10/00")) == a.end());
  std::set<int> codes;
  for (auto d : a) {
    CHECK(d.even());
    codes.insert(d.code());
  }
  CHECK(codes.size() == 8);
  CHECK(classify_delta(D("01/01")) == DeltaShape::Step);
  CHECK(classify_delta(D("00/00")) == DeltaShape::Plateau);
  CHECK(classify_delta(D("10/01")) == DeltaShape::Step);
  CHECK(classify_delta(D("00/11")) == DeltaShape::Plateau);
  CHECK_THROWS_AS(classify_delta(D("1000")), ValidationError);
  CHECK(D("0110").to_string() == "(0 1/1 0)");
  CHECK(DeltaMatrix::from_code(D("1001").code()) == D("1001"));
  CHECK_THROWS_AS(DeltaMatrix::parse("012"), ValidationError);
}

TEST_CASE("domino conditions") {
  for (int m : {1, 3, 6}) CHECK(check_domino(std::vector<DeltaMatrix>(m, D("00/00")), DominoMode::Forward));
  const std::vector<DeltaMatrix> fw{D("01/01"), D("10/10")};
  CHECK(check_domino(fw, DominoMode::Forward));
  const std::vector<DeltaMatrix> rv{D("00/11"), D("00/11")};
  CHECK(check_domino(rv, DominoMode::Reverse));
  for (int m = 1; m <= 4; ++m)
    for_each_word(m, [&](const std::vector<DeltaMatrix>& w) {
      CHECK(check_domino(w, DominoMode::Forward) == domino(w, DominoMode::Forward));
      CHECK(check_domino(w, DominoMode::Reverse) == domino(w, DominoMode::Reverse));
    });
  // Every matrix has exactly two successors in either mode.
  for (auto x : delta_alphabet()) {
    int f = 0, r = 0;
    for (auto y : delta_alphabet()) {
      f += chains_forward(x, y);
      r += chains_reverse(x, y);
    }
    CHECK(f == 2);
    CHECK(r == 2);
  }
}

TEST_CASE("dihedral group") {
  CHECK(dihedral_group(3).size() == 6);
  for (int m = 3; m <= 8; ++m) {
    const auto G = dihedral_group(m);
    CHECK(G.size() == std::size_t(2 * m));
    const auto gamma = DihedralElement::shift(m, 1), tau = DihedralElement::reflection(m, 0);
    CHECK(tau.compose(gamma).compose(tau) == gamma.inverse());
    CHECK(tau.compose(tau) == DihedralElement::identity(m));
    std::set<std::vector<int>> distinct;
    for (const auto& g : G) {
      distinct.insert(g.images());
      std::vector<int> sorted = g.images();
      std::sort(sorted.begin(), sorted.end());
      for (int l = 1; l <= m; ++l) CHECK(sorted[l - 1] == l);
      // closed under composition
      for (const auto& h : G) CHECK(std::find(G.begin(), G.end(), g.compose(h)) != G.end());
    }
    CHECK(distinct.size() == std::size_t(2 * m));
  }
  CHECK(DihedralElement::reflection(4, 0).images() == std::vector<int>{4, 3, 2, 1});
  CHECK(DihedralElement::shift(4, 1).label() == "gamma^1");
  CHECK(DihedralElement::reflection(4, 2).label() == "tau*gamma^2");
  CHECK_THROWS_AS(dihedral_group(2), ValidationError);
}

TEST_CASE("pair partitions") {
  const auto id = pair_partition(DihedralElement::identity(3));
  CHECK(id.partner == std::vector<int>{1, 2, 3});
  const auto g = pair_partition(DihedralElement::shift(3, 1));
  for (int l = 1; l <= 3; ++l) CHECK(g.partner[l - 1] == l % 3 + 1);
  for (int m = 3; m <= 8; ++m)
    for (const auto& e : dihedral_group(m)) CHECK(pair_partition(e).block_count() == std::size_t(m));
}

TEST_CASE("substantial patterns") {
  const std::vector<DeltaMatrix> fw{D("01/01"), D("10/10"), D("00/00"), D("00/00")};
  Pattern p;
  for (auto d : fw) p.seq.push_back({d, LambdaKind::A});
  CHECK(is_substantial(p));
  p.seq[1].lambda = LambdaKind::R;
  CHECK_FALSE(is_substantial(p));
  Pattern rv{{{D("00/11"), LambdaKind::R}, {D("01/01"), LambdaKind::R}, {D("10/10"), LambdaKind::R}}};
  CHECK(is_substantial(rv));
  rv.seq[2].lambda = LambdaKind::A;
  CHECK_FALSE(is_substantial(rv));
  Pattern bad{{{D("01/01"), LambdaKind::A}, {D("00/00"), LambdaKind::A}, {D("00/00"), LambdaKind::A}}};
  CHECK_THROWS_AS(is_substantial(bad), ValidationError);
}

TEST_CASE("consistent instance counts") {
  const auto flat3 = uniform(3, D("00/00"), LambdaKind::A);
  CHECK(count_consistent_instances(flat3, 3) == 6);
  CHECK(count_consistent_instances(uniform(4, D("00/00"), LambdaKind::A), 3) == 18);
  for (int m = 3; m <= 5; ++m)
    for (int n = 2; n <= 5; ++n) {
      const long long want = static_cast<long long>(std::pow(n - 1, m)) + (m % 2 ? -1 : 1) * (n - 1);
      CHECK(count_consistent_instances(uniform(m, D("00/00"), LambdaKind::A), n) == std::uint64_t(want));
    }
  // Brute force over all scalar assignments for assorted patterns.
  const std::vector<Pattern> pats = {
      Pattern{{{D("01/01"), LambdaKind::A}, {D("10/10"), LambdaKind::A}, {D("00/00"), LambdaKind::A}}},
      Pattern{{{D("01/10"), LambdaKind::A}, {D("10/01"), LambdaKind::R}, {D("11/00"), LambdaKind::A}}},
      Pattern{{{D("00/11"), LambdaKind::R}, {D("00/11"), LambdaKind::R}, {D("01/01"), LambdaKind::A}}},
      Pattern{{{D("11/11"), LambdaKind::R}, {D("10/01"), LambdaKind::R}, {D("01/10"), LambdaKind::R}}},
  };
  for (const auto& pat : pats)
    for (int n = 2; n <= 4; ++n) CHECK(count_consistent_instances(pat, n) == brute_instances(pat, n));

  // A single reversed entry in a forward-domino pattern costs a power of n.
  for (int m : {3, 4}) {
    Pattern pat = uniform(m, D("00/00"), LambdaKind::A);
    pat.seq[0].lambda = LambdaKind::R;
    for (int n = 3; n <= 8; ++n)
      CHECK(double(count_consistent_instances(pat, n)) / std::pow(n, m - 1) <= 1.0);
  }
  CHECK_THROWS_AS(count_consistent_instances(uniform(6, D("00/00"), LambdaKind::A), 9, 100), BudgetError);
}

TEST_CASE("instances") {
  const auto pat = uniform(3, D("00/00"), LambdaKind::A);
  CHECK(is_consistent(make_instance(pat, 3, {{1, 2}, {2, 3}, {3, 1}})));
  CHECK_FALSE(is_consistent(make_instance(pat, 3, {{1, 2}, {2, 3}, {3, 2}})));
  CHECK_THROWS_AS(make_instance(pat, 3, {{1, 1}, {1, 2}, {2, 1}}), ValidationError);
}

TEST_CASE("sequence counts against brute force, m <= 6") {
  for (int m = 1; m <= 6; ++m) {
    for (auto mode : {DominoMode::Forward, DominoMode::Reverse}) {
      std::uint64_t total = 0, ident = 0, ident_a1 = 0;
      std::map<int, std::uint64_t> per_first;
      for_each_word(m, [&](const std::vector<DeltaMatrix>& w) {
        if (!domino(w, mode)) return;
        ++total;
        ++per_first[w[0].code()];
        if (identical_rows(w)) {
          ++ident;
          if (w[0].alpha == 1) ++ident_a1;
        }
      });
      CHECK(enumerate_delta_sequences(m, mode).count == total);
      CHECK(enumerate_delta_sequences(m, mode, {.identical_rows = true}).count == ident);
      CHECK(enumerate_delta_sequences(m, mode, {.identical_rows = true, .first_alpha = 1}).count == ident_a1);
      for (auto d : delta_alphabet())
        CHECK(enumerate_delta_sequences(m, mode, {.first_delta = d}).count == per_first[d.code()]);
      CHECK(total == (std::uint64_t{1} << (m + 1)));
    }
  }
}

TEST_CASE("closed-form counts") {
  for (int m = 2; m <= 14; ++m) {
    const auto e = enumerate_delta_sequences(m, DominoMode::Forward, {.identical_rows = true, .first_alpha = 1});
    std::uint64_t binom_sum = 0;  // sum_j C(m, 2j)
    for (int j = 0; 2 * j <= m; ++j) {
      std::uint64_t c = 1;
      for (int i = 0; i < 2 * j; ++i) c = c * (m - i) / (i + 1);
      binom_sum += c;
    }
    CHECK(e.count == binom_sum);
    CHECK(e.count == (std::uint64_t{1} << (m - 1)));
    CHECK(delta_count_closed_form(m, DominoMode::Forward, {.identical_rows = true, .first_alpha = 1}) == e.count);
  }
  for (int m : {4, 6, 8, 10}) {
    for (auto mode : {DominoMode::Forward, DominoMode::Reverse})
      CHECK(enumerate_delta_sequences(m, mode).count == (std::uint64_t{1} << (m + 1)));
  }
  for (int m = 3; m <= 10; ++m)
    for (auto d : delta_alphabet()) {
      const DeltaFilter f{.first_delta = d, .tau_realizable = true};
      CHECK(enumerate_delta_sequences(m, DominoMode::Reverse, f).count == (std::uint64_t{1} << (m - 2)));
      CHECK(delta_count_closed_form(m, DominoMode::Reverse, f) == (std::uint64_t{1} << (m - 2)));
    }
  CHECK_FALSE(delta_count_closed_form(4, DominoMode::Forward, {.tau_realizable = true}).has_value());
  CHECK_THROWS_AS(enumerate_delta_sequences(17, DominoMode::Forward), BudgetError);
}

TEST_CASE("step parity and sign products") {
  for (int m = 1; m <= 8; ++m) {
    for (auto mode : {DominoMode::Forward, DominoMode::Reverse}) {
      for (const auto& s : enumerate_delta_sequences(m, mode).sequences) {
        const auto steps = std::count_if(s.begin(), s.end(), [](DeltaMatrix d) { return classify_delta(d) == DeltaShape::Step; });
        CHECK(steps % 2 == 0);
      }
    }
    for (const auto& s : enumerate_delta_sequences(m, DominoMode::Forward).sequences) {
      int prod = 1;
      for (auto d : s) prod *= delta_sign(SymmetryClass::DIII, SignMode::ForwardAligned, d);
      CHECK(prod == (identical_rows(s) ? (m % 2 ? -1 : 1) : 1));
    }
  }
}

TEST_CASE("reflection completions") {
  const std::set<int> set16{D("11/11").code(), D("10/01").code(), D("00/00").code(), D("01/10").code()};
  const std::set<int> set17{D("00/11").code(), D("11/00").code(), D("01/01").code(), D("10/10").code()};
  for (int m = 3; m <= 8; ++m) {
    std::uint64_t total = 0;
    std::set<std::vector<int>> seen;
    for (auto first : delta_alphabet()) {
      const bool in16 = set16.count(first.code()) > 0;
      for (int mask = 0; mask < (1 << (m - 2)); ++mask) {
        std::vector<int> bits(m - 2);
        for (int i = 0; i < m - 2; ++i) bits[i] = (mask >> i) & 1;
        const auto s = complete_reflection_sequence(first, bits, m);
        REQUIRE(s.size() == std::size_t(m));
        CHECK(s[0] == first);
        CHECK(domino(s, DominoMode::Reverse));
        int prod = 1;
        std::vector<int> codes;
        for (auto d : s) {
          CHECK((in16 ? set16 : set17).count(d.code()) == 1);
          prod *= delta_sign(SymmetryClass::DIII, SignMode::ReverseReversed, d);
          codes.push_back(d.code());
        }
        CHECK(prod == (in16 ? 1 : (m % 2 ? -1 : 1)));
        seen.insert(codes);
        ++total;
      }
    }
    CHECK(total == (std::uint64_t{1} << (m + 1)));
    CHECK(seen.size() == total);  // completions are distinct
    CHECK(seen.size() == enumerate_delta_sequences(m, DominoMode::Reverse).count);
  }
  const std::vector<int> wrong(2, 0);
  CHECK_THROWS_AS(complete_reflection_sequence(D("00/00"), wrong, 5), ValidationError);
}

TEST_CASE("delta signs") {
  CHECK(delta_sign(SymmetryClass::DIII, SignMode::ForwardAligned, D("00/11")) == 1);
  CHECK(delta_sign(SymmetryClass::DIII, SignMode::ForwardAligned, D("00/00")) == -1);
  CHECK(delta_sign(SymmetryClass::CI, SignMode::ForwardAligned, D("00/00")) == 1);
  for (auto d : delta_alphabet()) {
    CHECK(delta_sign(SymmetryClass::DIII, SignMode::ReverseReversed, d) ==
          -delta_sign(SymmetryClass::DIII, SignMode::ForwardAligned, d));
    CHECK(delta_sign(SymmetryClass::CI, SignMode::ForwardAligned, d) ==
          -delta_sign(SymmetryClass::DIII, SignMode::ForwardAligned, d));
  }
}

TEST_CASE("per-element leading terms") {
  for (int nu = 0; nu < 5; ++nu)
    CHECK(per_g_leading_term(SymmetryClass::DIII, DihedralElement::shift(5, nu), 1.0) == 0.0);
  CHECK(per_g_leading_term(SymmetryClass::DIII, DihedralElement::reflection(4, 0), 1.0) == 32.0);
  CHECK(per_g_leading_term(SymmetryClass::CI, DihedralElement::shift(6, 2), 1.0) == 128.0);
  for (auto cls : {SymmetryClass::DIII, SymmetryClass::CI})
    for (int m = 3; m <= 8; ++m)
      for (const auto& g : dihedral_group(m)) {
        const double want = m % 2 ? 0.0 : std::pow(2.0, m + 1) * std::pow(1.5, 2 * m);
        CHECK(per_g_leading_term(cls, g, 1.5) == doctest::Approx(want));
      }
}
