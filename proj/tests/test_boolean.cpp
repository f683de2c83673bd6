#include <doctest.h>

#include <cmath>
#include <random>

#include "egc/boolean.hpp"
#include "egc/cipher.hpp"

using namespace egc;
using namespace egc::boolean;

namespace {

// Nonlinearity as the distance to the nearest affine function.
int nl_by_distance(std::uint16_t f) {
  int best = 16;
  for (int a = 0; a < 16; ++a) {
    std::uint16_t lin = 0;
    for (int x = 0; x < 16; ++x) lin |= static_cast<std::uint16_t>((std::popcount(static_cast<unsigned>(a & x)) & 1) << x);
    const int d = std::popcount(static_cast<std::uint16_t>(f ^ lin));
    best = std::min({best, d, 16 - d});
  }
  return best;
}

// ANF degree via explicit subset sums: a_u = XOR of f(x) over x subset of u.
int degree_by_subsets(std::uint16_t f) {
  int deg = -1;
  for (unsigned u = 0; u < 16; ++u) {
    int c = 0;
    for (unsigned x = 0; x < 16; ++x) {
      if ((x & u) == x) c ^= (f >> x) & 1;
    }
    if (c) deg = std::max(deg, std::popcount(u));
  }
  return deg;
}

}  // namespace

TEST_CASE("moebius transform") {
  CHECK(moebius_transform(TruthTable16{0}).degree() == -1);
  CHECK(moebius_transform(TruthTable16{0}).monomials().empty());
  CHECK(moebius_transform(TruthTable16{0x036F}).monomials() == std::vector<unsigned>{0, 4, 5, 6, 10, 13});

  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::uint8_t> table(64);
    for (auto& b : table) b = static_cast<std::uint8_t>(rng() & 1);
    const auto once = moebius_transform(table);
    const auto twice = moebius_transform(once.coeffs);
    CHECK(twice.coeffs == table);
  }
  const std::vector<std::uint8_t> bad(12, 0);
  CHECK_THROWS_AS(moebius_transform(bad), ParameterError);
}

TEST_CASE("packed transform agrees with the byte transform") {
  std::mt19937_64 rng(2);
  for (int vars : {6, 8, 10}) {
    const std::size_t len = std::size_t{1} << vars;
    std::vector<std::uint8_t> table(len);
    std::vector<std::uint64_t> packed(len / 64);
    for (std::size_t x = 0; x < len; ++x) {
      table[x] = static_cast<std::uint8_t>(rng() & 1);
      packed[x / 64] |= std::uint64_t{table[x]} << (x % 64);
    }
    const auto anf = moebius_transform(table);
    moebius_transform_packed(packed, vars);
    for (std::size_t x = 0; x < len; ++x) CHECK(((packed[x / 64] >> (x % 64)) & 1) == anf.coeffs[x]);
    CHECK(packed_anf_degree(packed) == anf.degree());
  }
}

TEST_CASE("walsh spectrum and nonlinearity") {
  const TruthTable16 rule{0x036F};
  const auto w = walsh_spectrum(rule);
  CHECK(max_walsh_magnitude(w) == 8);
  CHECK(nonlinearity(rule) == 4);

  const auto zero = walsh_spectrum(TruthTable16{0});
  CHECK(zero[0] == 16);
  CHECK(nonlinearity(TruthTable16{0}) == 0);

  for (int a = 0; a < 16; ++a) {
    std::uint16_t lin = 0;
    for (int x = 0; x < 16; ++x) lin |= static_cast<std::uint16_t>((std::popcount(static_cast<unsigned>(a & x)) & 1) << x);
    const auto s = walsh_spectrum(TruthTable16{lin});
    for (int b = 0; b < 16; ++b) CHECK(std::abs(s[static_cast<std::size_t>(b)]) == (a == b ? 16 : 0));
  }

  // Parseval, and nonlinearity against the distance oracle
  for (std::uint32_t f = 0; f < 65536; f += 97) {
    const auto s = walsh_spectrum(TruthTable16{static_cast<std::uint16_t>(f)});
    int sum = 0;
    for (int v : s) sum += v * v;
    CHECK(sum == 256);
    CHECK(nonlinearity(TruthTable16{static_cast<std::uint16_t>(f)}) == nl_by_distance(static_cast<std::uint16_t>(f)));
  }
}

TEST_CASE("difference distribution table") {
  const auto ddt = difference_table(TruthTable16{0x036F});
  CHECK(ddt.entries[0][0] == 16);
  CHECK(ddt.entries[0][1] == 0);
  for (const auto& row : ddt.entries) CHECK(row[0] + row[1] == 16);
  CHECK(differential_uniformity(ddt) == 12);
  CHECK(std::abs(-std::log2(12.0 / 16.0) - 0.415) < 0.001);
  CHECK(differential_uniformity(TruthTable16{0}) == 16);
  CHECK(differential_uniformity(TruthTable16{0xFFFF}) == 16);
}

TEST_CASE("rule-a properties") {
  const TruthTable16 rule{kRuleATruthTable};
  CHECK(rule.balanced());
  CHECK(algebraic_degree(rule) == 3);
  CHECK(degree_by_subsets(0x036F) == 3);
}

TEST_CASE("candidate search against a brute-force oracle") {
  int oracle = 0;
  int max_nl = 0;
  for (std::uint32_t f = 0; f < 65536; ++f) {
    const auto t = static_cast<std::uint16_t>(f);
    if (std::popcount(t) != 8) continue;
    const int nl = nl_by_distance(t);
    max_nl = std::max(max_nl, nl);
    if (nl == 4 && degree_by_subsets(t) == 3) ++oracle;
  }
  CHECK(oracle == 10080);
  CHECK(max_nl == 4);

  const auto rep = search_rule_candidates(1);
  CHECK(rep.functions_examined == 65536);
  CHECK(rep.count_satisfying == oracle);
  CHECK(rep.max_balanced_nonlinearity == 4);
  CHECK(rep.min_uniformity == 12);
  CHECK(std::binary_search(rep.minimizers.begin(), rep.minimizers.end(), std::uint16_t{0x036F}));

  const auto rep4 = search_rule_candidates(4);
  CHECK(rep4.count_satisfying == rep.count_satisfying);
  CHECK(rep4.minimizers == rep.minimizers);
}

TEST_CASE("iterated layer degree") {
  CHECK(iterated_fcore_degrees(16, 4, {-1, +1, +4}) == std::vector<int>{3, 7, 13, 15});
  CHECK(iterated_fcore_degree(8, 1, degree_offsets(8)) == 3);
  CHECK(iterated_fcore_degrees(12, 5, degree_offsets(12)) == std::vector<int>{3, 7, 10, 11, 11});
  for (int w : {6, 10, 14}) CHECK(iterated_fcore_degree(w, 1, degree_offsets(w)) == 3);

  for (int w : {8, 12, 16}) {
    const auto d = iterated_fcore_degrees(w, 4, degree_offsets(w));
    for (int x : d) CHECK(x <= w);
  }
  const auto d16 = iterated_fcore_degrees(16, 4, {-1, +1, +4});
  CHECK(std::is_sorted(d16.begin(), d16.end()));
  CHECK_THROWS_AS(iterated_fcore_degrees(24, 1, {-1, 1, 6}), ParameterError);
}

TEST_CASE("layer degree against a direct per-coordinate transform") {
  constexpr int w = 8;
  const auto layer = reduced_cipher(w, degree_offsets(w), 1);
  std::vector<Word> state(1u << w);
  for (std::size_t x = 0; x < state.size(); ++x) state[x] = x;
  for (int r = 1; r <= 3; ++r) {
    for (auto& s : state) s = layer.f_core(s);
    int deg = -1;
    for (int bit = 0; bit < w; ++bit) {
      std::vector<std::uint8_t> table(state.size());
      for (std::size_t x = 0; x < state.size(); ++x) table[x] = static_cast<std::uint8_t>((state[x] >> bit) & 1);
      deg = std::max(deg, moebius_transform(table).degree());
    }
    CHECK(iterated_fcore_degree(w, r, degree_offsets(w)) == deg);
  }
}
