#include "egc/boolean.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace egc::boolean {

int AnfPolynomial::degree() const noexcept {
  int d = -1;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    if (coeffs[m]) d = std::max(d, std::popcount(static_cast<unsigned>(m)));
  }
  return d;
}

std::vector<unsigned> AnfPolynomial::monomials() const {
  std::vector<unsigned> out;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    if (coeffs[m]) out.push_back(static_cast<unsigned>(m));
  }
  return out;
}

AnfPolynomial moebius_transform(std::span<const std::uint8_t> table) {
  const std::size_t n = table.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ParameterError("Moebius transform needs a power-of-two table length");
  }
  AnfPolynomial p;
  p.coeffs.assign(table.begin(), table.end());
  for (auto& c : p.coeffs) c &= 1;
  for (std::size_t step = 1; step < n; step <<= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i & step) p.coeffs[i] ^= p.coeffs[i ^ step];
    }
  }
  return p;
}

AnfPolynomial moebius_transform(TruthTable16 t) {
  std::array<std::uint8_t, 16> table{};
  for (int k = 0; k < 16; ++k) table[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(t.value(k));
  return moebius_transform(std::span<const std::uint8_t>(table));
}

void moebius_transform_packed(std::vector<std::uint64_t>& words, int vars) {
  if (vars < 6 || words.size() != (std::size_t{1} << (vars - 6))) {
    throw ParameterError("packed Moebius transform needs 2^(vars-6) words, vars >= 6");
  }
  // Within-word butterflies: the low variables live inside a word.
  static constexpr std::array<std::uint64_t, 6> kLowMask{
      0x5555555555555555ULL, 0x3333333333333333ULL, 0x0F0F0F0F0F0F0F0FULL,
      0x00FF00FF00FF00FFULL, 0x0000FFFF0000FFFFULL, 0x00000000FFFFFFFFULL};
  for (auto& w : words) {
    for (int v = 0; v < 6; ++v) {
      const int shift = 1 << v;
      w ^= (w & kLowMask[static_cast<std::size_t>(v)]) << shift;
    }
  }
  for (std::size_t step = 1; step < words.size(); step <<= 1) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i & step) words[i] ^= words[i ^ step];
    }
  }
}

int packed_anf_degree(const std::vector<std::uint64_t>& anf) {
  int d = -1;
  for (std::size_t wi = 0; wi < anf.size(); ++wi) {
    std::uint64_t w = anf[wi];
    const int high = std::popcount(wi);
    while (w) {
      const int b = std::countr_zero(w);
      w &= w - 1;
      d = std::max(d, high + std::popcount(static_cast<unsigned>(b)));
    }
  }
  return d;
}

int algebraic_degree(TruthTable16 t) { return moebius_transform(t).degree(); }

WalshSpectrum walsh_spectrum(TruthTable16 t) {
  WalshSpectrum w{};
  for (int a = 0; a < 16; ++a) {
    int sum = 0;
    for (int x = 0; x < 16; ++x) {
      const int e = t.value(x) ^ (std::popcount(static_cast<unsigned>(a & x)) & 1);
      sum += e ? -1 : 1;
    }
    w[static_cast<std::size_t>(a)] = sum;
  }
  return w;
}

int max_walsh_magnitude(const WalshSpectrum& w) noexcept {
  int m = 0;
  for (int c : w) m = std::max(m, std::abs(c));
  return m;
}

int nonlinearity(TruthTable16 t) { return 8 - max_walsh_magnitude(walsh_spectrum(t)) / 2; }

Ddt difference_table(TruthTable16 t) {
  Ddt d;
  for (int a = 0; a < 16; ++a) {
    for (int x = 0; x < 16; ++x) {
      ++d.entries[static_cast<std::size_t>(a)][static_cast<std::size_t>(t.value(x) ^ t.value(x ^ a))];
    }
  }
  return d;
}

int differential_uniformity(const Ddt& ddt) noexcept {
  int du = 0;
  for (std::size_t a = 1; a < 16; ++a) du = std::max({du, ddt.entries[a][0], ddt.entries[a][1]});
  return du;
}

namespace {

struct PartialSearch {
  int examined = 0;
  int satisfying = 0;
  int max_balanced_nl = 0;
  std::vector<std::pair<int, std::uint16_t>> candidates;  // (DU, table)
};

PartialSearch search_range(std::uint32_t begin, std::uint32_t end) {
  PartialSearch out;
  for (std::uint32_t bits = begin; bits < end; ++bits) {
    const TruthTable16 t{static_cast<std::uint16_t>(bits)};
    ++out.examined;
    if (!t.balanced()) continue;
    const int nl = nonlinearity(t);
    out.max_balanced_nl = std::max(out.max_balanced_nl, nl);
    if (nl != 4 || algebraic_degree(t) != 3) continue;
    ++out.satisfying;
    out.candidates.emplace_back(differential_uniformity(t), t.bits);
  }
  return out;
}

}  // namespace

RuleSearchReport search_rule_candidates(int threads) {
  constexpr std::uint32_t kSpace = 1u << 16;
  const int workers = std::clamp(threads, 1, 64);
  std::vector<PartialSearch> parts(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      const std::uint32_t begin = kSpace / static_cast<std::uint32_t>(workers) * static_cast<std::uint32_t>(w);
      const std::uint32_t end =
          w + 1 == workers ? kSpace : kSpace / static_cast<std::uint32_t>(workers) * static_cast<std::uint32_t>(w + 1);
      pool.emplace_back([&parts, w, begin, end] { parts[static_cast<std::size_t>(w)] = search_range(begin, end); });
    }
  }
  RuleSearchReport report;
  std::vector<std::pair<int, std::uint16_t>> all;
  for (auto& p : parts) {
    report.functions_examined += p.examined;
    report.count_satisfying += p.satisfying;
    report.max_balanced_nonlinearity = std::max(report.max_balanced_nonlinearity, p.max_balanced_nl);
    all.insert(all.end(), p.candidates.begin(), p.candidates.end());
  }
  if (!all.empty()) {
    report.min_uniformity = std::min_element(all.begin(), all.end())->first;
    for (const auto& [du, bits] : all) {
      if (du == report.min_uniformity) report.minimizers.push_back(bits);
    }
    std::sort(report.minimizers.begin(), report.minimizers.end());
  }
  return report;
}

std::vector<int> iterated_fcore_degrees(int width, int rounds, Offsets offsets) {
  if (width < 6 || width > 20) throw ParameterError("exhaustive degree needs 6 <= width <= 20");
  if (rounds < 1) throw ParameterError("rounds must be >= 1");
  const FeistelCipher layer(CipherParams::reduced(width, offsets, 1));
  const std::size_t inputs = std::size_t{1} << width;
  std::vector<Word> state(inputs);
  for (std::size_t x = 0; x < inputs; ++x) state[x] = x;

  std::vector<int> degrees;
  std::vector<std::uint64_t> packed(inputs / 64);
  for (int r = 1; r <= rounds; ++r) {
    for (auto& s : state) s = layer.f_core(s);
    int deg = -1;
    for (int bit = 0; bit < width; ++bit) {
      std::fill(packed.begin(), packed.end(), 0);
      for (std::size_t x = 0; x < inputs; ++x) {
        packed[x >> 6] |= ((state[x] >> bit) & 1) << (x & 63);
      }
      moebius_transform_packed(packed, width);
      deg = std::max(deg, packed_anf_degree(packed));
    }
    degrees.push_back(deg);
  }
  return degrees;
}

int iterated_fcore_degree(int width, int rounds, Offsets offsets) {
  return iterated_fcore_degrees(width, rounds, offsets).back();
}

}  // namespace egc::boolean
