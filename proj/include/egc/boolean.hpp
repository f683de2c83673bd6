#pragma once

// Analysis of 4-input Boolean functions and of the algebraic degree of the
// iterated nonlinear layer.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "egc/cipher.hpp"

namespace egc::boolean {

/// Bit k is f(k) with k = x0 + 2*x1 + 4*x2 + 8*x3.
struct TruthTable16 {
  std::uint16_t bits = 0;

  int value(int input) const noexcept { return (bits >> input) & 1; }
  int weight() const noexcept { return std::popcount(bits); }
  bool balanced() const noexcept { return weight() == 8; }
};

/// ANF coefficients; coeffs[m] is the coefficient of the monomial whose
/// variables are the set bits of m.
struct AnfPolynomial {
  std::vector<std::uint8_t> coeffs;

  int degree() const noexcept;
  std::vector<unsigned> monomials() const;
};

using WalshSpectrum = std::array<int, 16>;

/// entries[a][b] = #{x : f(x) ^ f(x ^ a) = b}.
struct Ddt {
  std::array<std::array<int, 2>, 16> entries{};
};

/// Binary Moebius transform over a 0/1 table whose length is a power of two.
/// Throws ParameterError otherwise. The transform is its own inverse.
AnfPolynomial moebius_transform(std::span<const std::uint8_t> table);
AnfPolynomial moebius_transform(TruthTable16 t);

/// In-place Moebius transform of a bit-packed table of 2^vars entries
/// (entry k is bit k%64 of word k/64). Requires vars >= 6.
void moebius_transform_packed(std::vector<std::uint64_t>& words, int vars);
/// Max popcount of an index carrying a nonzero ANF coefficient, -1 if zero.
int packed_anf_degree(const std::vector<std::uint64_t>& anf);

int algebraic_degree(TruthTable16 t);

WalshSpectrum walsh_spectrum(TruthTable16 t);
int max_walsh_magnitude(const WalshSpectrum& w) noexcept;
/// 8 - max|W|/2 for 4-variable functions.
int nonlinearity(TruthTable16 t);

Ddt difference_table(TruthTable16 t);
/// Max over a != 0 and b of entries[a][b].
int differential_uniformity(const Ddt& ddt) noexcept;
inline int differential_uniformity(TruthTable16 t) { return differential_uniformity(difference_table(t)); }

struct RuleSearchReport {
  int functions_examined = 0;
  int count_satisfying = 0;  // balanced, NL = 4, degree 3
  int min_uniformity = 0;
  std::vector<std::uint16_t> minimizers;  // ascending
  int max_balanced_nonlinearity = 0;
};

/// Enumerates all 2^16 functions. `threads` partitions the table space; the
/// result does not depend on it.
RuleSearchReport search_rule_candidates(int threads = 1);

/// Exact degrees of F_core^r for r = 1..rounds on a `width`-bit state
/// (width <= 20; exhaustive over 2^width inputs).
std::vector<int> iterated_fcore_degrees(int width, int rounds, Offsets offsets);
int iterated_fcore_degree(int width, int rounds, Offsets offsets);

/// Offsets used for degree tables: {-1,+1,+round(width/4)}.
inline Offsets degree_offsets(int width) { return scaled_offsets(width); }

}  // namespace egc::boolean
