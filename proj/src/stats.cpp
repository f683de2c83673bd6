#include "egc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace egc::stats {

namespace {

// Stream tags, one per analysis.
constexpr std::uint64_t kTagAvalanche = 0xA7A1;
constexpr std::uint64_t kTagSac = 0x5AC0;
constexpr std::uint64_t kTagBic = 0xB1C0;
constexpr std::uint64_t kTagDp = 0xD900;
constexpr std::uint64_t kTagRelatedKey = 0x4B45;
constexpr std::uint64_t kTagSubspace = 0x5B5B;
constexpr std::uint64_t kTagZeroScan = 0x2E40;
constexpr std::uint64_t kTagCoverage = 0xC0FE;
constexpr std::uint64_t kTagNist = 0x2157;

const FeistelCipher& full_cipher() {
  static const FeistelCipher cipher(CipherParams::full());
  return cipher;
}

struct BlockHash {
  std::size_t operator()(const Block& b) const noexcept {
    return static_cast<std::size_t>(splitmix64(b.left ^ splitmix64(b.right)));
  }
};

Block flip(const Block& b, int bit) { return b ^ block_bit(bit); }

bool test_bit(const Block& b, int bit) {
  return bit < 64 ? ((b.right >> bit) & 1) != 0 : ((b.left >> (bit - 64)) & 1) != 0;
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

Block random_block(std::mt19937_64& rng, Word mask) {
  const Word l = rng() & mask;
  const Word r = rng() & mask;
  return {l, r};
}

MasterKey random_key(std::mt19937_64& rng, Word mask) {
  const Word h = rng() & mask;
  const Word l = rng() & mask;
  return {h, l};
}

// ---------------------------------------------------------------- avalanche

AvalancheReport avalanche_profile(int pairs, int rounds, const RngConfig& cfg) {
  if (pairs < 1) throw ParameterError("avalanche needs pairs >= 1");
  if (rounds < 0 || rounds > kFullRounds) throw ParameterError("avalanche rounds must lie in [0, 20]");
  const auto& cipher = full_cipher();
  const std::size_t nr = static_cast<std::size_t>(rounds) + 1;
  std::vector<std::vector<double>> sum(static_cast<std::size_t>(pairs), std::vector<double>(nr));
  std::vector<std::vector<double>> sum_sq(static_cast<std::size_t>(pairs), std::vector<double>(nr));

  parallel_chunks(static_cast<std::size_t>(pairs), cfg.threads, [&](std::size_t c) {
    auto rng = cfg.stream(kTagAvalanche, c);
    const MasterKey key = random_key(rng);
    const Block pt = random_block(rng);
    const auto rk = cipher.derive_round_keys(key);
    std::vector<Block> base(nr);
    base[0] = pt;
    for (std::size_t r = 1; r < nr; ++r) base[r] = cipher.round(base[r - 1], rk.keys[r - 1]);
    for (int bit = 0; bit < 128; ++bit) {
      Block s = flip(pt, bit);
      for (std::size_t r = 0; r < nr; ++r) {
        if (r > 0) s = cipher.round(s, rk.keys[r - 1]);
        const double hd = hamming_weight(s ^ base[r]);
        sum[c][r] += hd;
        sum_sq[c][r] += hd * hd;
      }
    }
  });

  AvalancheReport rep;
  rep.pairs = pairs;
  rep.samples_per_round = static_cast<std::uint64_t>(pairs) * 128;
  const double n = static_cast<double>(rep.samples_per_round);
  for (std::size_t r = 0; r < nr; ++r) {
    double s = 0;
    double s2 = 0;
    for (std::size_t c = 0; c < sum.size(); ++c) {
      s += sum[c][r];
      s2 += sum_sq[c][r];
    }
    const double mean = s / n;
    rep.mean_hd.push_back(mean);
    rep.fraction.push_back(mean / 128.0);
    rep.stddev_hd.push_back(std::sqrt(std::max(0.0, s2 / n - mean * mean)));
  }
  return rep;
}

// ---------------------------------------------------------------------- SAC

SacMatrix sac_matrix(int samples_per_bit, const RngConfig& cfg) {
  if (samples_per_bit < 100) throw ParameterError("SAC needs >= 100 samples per bit");
  const auto& cipher = full_cipher();
  std::vector<std::array<int, 128>> flips(128);
  parallel_chunks(128, cfg.threads, [&](std::size_t in) {
    auto rng = cfg.stream(kTagSac, in);
    auto& row = flips[in];
    row.fill(0);
    for (int s = 0; s < samples_per_bit; ++s) {
      const MasterKey key = random_key(rng);
      const Block pt = random_block(rng);
      const auto rk = cipher.derive_round_keys(key);
      const Block d = cipher.encrypt(rk, pt) ^ cipher.encrypt(rk, flip(pt, static_cast<int>(in)));
      Word w = d.right;
      while (w) {
        ++row[static_cast<std::size_t>(std::countr_zero(w))];
        w &= w - 1;
      }
      w = d.left;
      while (w) {
        ++row[64 + static_cast<std::size_t>(std::countr_zero(w))];
        w &= w - 1;
      }
    }
  });

  SacMatrix m;
  m.samples_per_bit = samples_per_bit;
  m.p.resize(128 * 128);
  m.min = 1.0;
  m.max = 0.0;
  double sum = 0;
  double sum_sq = 0;
  int within05 = 0;
  int within10 = 0;
  for (int i = 0; i < 128; ++i) {
    double row_sum = 0;
    for (int j = 0; j < 128; ++j) {
      const double p = static_cast<double>(flips[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                       samples_per_bit;
      m.p[static_cast<std::size_t>(i) * 128 + static_cast<std::size_t>(j)] = p;
      sum += p;
      sum_sq += p * p;
      row_sum += p;
      m.min = std::min(m.min, p);
      m.max = std::max(m.max, p);
      if (p >= 0.45 && p <= 0.55) ++within05;
      if (p >= 0.40 && p <= 0.60) ++within10;
    }
    m.input_bit_mean.push_back(row_sum / 128.0);
  }
  const double n = 128.0 * 128.0;
  m.mean = sum / n;
  m.stddev = std::sqrt(std::max(0.0, sum_sq / n - m.mean * m.mean));
  m.frac_within_05 = within05 / n;
  m.frac_within_10 = within10 / n;
  double mm = 0;
  double mm2 = 0;
  for (double v : m.input_bit_mean) {
    mm += v;
    mm2 += v * v;
  }
  mm /= 128.0;
  m.input_bit_mean_stddev = std::sqrt(std::max(0.0, mm2 / 128.0 - mm * mm));
  return m;
}

// ---------------------------------------------------------------------- BIC

BicReport bic_correlations(int samples, const RngConfig& cfg) {
  if (samples < 1000) throw ParameterError("BIC needs >= 1000 samples");
  constexpr int kChunk = 500;
  const std::size_t chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  const auto& cipher = full_cipher();
  struct Counts {
    std::vector<std::uint32_t> single = std::vector<std::uint32_t>(128);
    std::vector<std::uint32_t> pair = std::vector<std::uint32_t>(128 * 128);
  };
  std::vector<Counts> parts(chunks);
  parallel_chunks(chunks, cfg.threads, [&](std::size_t c) {
    auto rng = cfg.stream(kTagBic, c);
    const int begin = static_cast<int>(c) * kChunk;
    const int end = std::min(samples, begin + kChunk);
    auto& cnt = parts[c];
    std::vector<int> ones;
    ones.reserve(128);
    for (int s = begin; s < end; ++s) {
      const MasterKey key = random_key(rng);
      const Block pt = random_block(rng);
      const int bit = static_cast<int>(uniform_below(rng, 128));
      const auto rk = cipher.derive_round_keys(key);
      const Block d = cipher.encrypt(rk, pt) ^ cipher.encrypt(rk, flip(pt, bit));
      ones.clear();
      for (int j = 0; j < 128; ++j) {
        if (test_bit(d, j)) ones.push_back(j);
      }
      for (std::size_t a = 0; a < ones.size(); ++a) {
        ++cnt.single[static_cast<std::size_t>(ones[a])];
        for (std::size_t b = a + 1; b < ones.size(); ++b) {
          ++cnt.pair[static_cast<std::size_t>(ones[a]) * 128 + static_cast<std::size_t>(ones[b])];
        }
      }
    }
  });
  Counts total;
  for (const auto& p : parts) {
    for (std::size_t k = 0; k < total.single.size(); ++k) total.single[k] += p.single[k];
    for (std::size_t k = 0; k < total.pair.size(); ++k) total.pair[k] += p.pair[k];
  }

  BicReport rep;
  rep.samples = samples;
  rep.correlation.assign(128 * 128, 0.0);
  const double n = samples;
  double abs_sum = 0;
  int above = 0;
  int pairs = 0;
  for (int i = 0; i < 128; ++i) {
    rep.correlation[static_cast<std::size_t>(i) * 129] = 1.0;
    for (int j = i + 1; j < 128; ++j) {
      const double ni = total.single[static_cast<std::size_t>(i)];
      const double nj = total.single[static_cast<std::size_t>(j)];
      const double nij = total.pair[static_cast<std::size_t>(i) * 128 + static_cast<std::size_t>(j)];
      const double denom = std::sqrt(ni * (n - ni) * nj * (n - nj));
      const double r = denom > 0 ? (n * nij - ni * nj) / denom : 0.0;
      rep.correlation[static_cast<std::size_t>(i) * 128 + static_cast<std::size_t>(j)] = r;
      rep.correlation[static_cast<std::size_t>(j) * 128 + static_cast<std::size_t>(i)] = r;
      const double a = std::abs(r);
      abs_sum += a;
      ++pairs;
      if (a > 0.05) ++above;
      if (a > rep.max_abs) {
        rep.max_abs = a;
        rep.max_pair_i = i;
        rep.max_pair_j = j;
      }
    }
  }
  rep.mean_abs = abs_sum / pairs;
  rep.frac_above_005 = static_cast<double>(above) / pairs;
  return rep;
}

// --------------------------------------------------------------- empirical DP

DpReport empirical_max_dp(const Block& delta, int rounds, int samples, const RngConfig& cfg) {
  if (delta == Block{}) throw ParameterError("input difference must be nonzero");
  if (rounds < 0 || rounds > kFullRounds) throw ParameterError("rounds must lie in [0, 20]");
  if (samples < 1) throw ParameterError("samples must be >= 1");
  constexpr int kChunk = 1000;
  const std::size_t chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  const auto& cipher = full_cipher();
  std::vector<std::vector<Block>> outs(chunks);
  // Tag mixes in the difference so distinct rows of a table use distinct streams.
  const std::uint64_t tag = kTagDp ^ splitmix64(delta.left * 31 + delta.right) ^ static_cast<std::uint64_t>(rounds);
  parallel_chunks(chunks, cfg.threads, [&](std::size_t c) {
    auto rng = cfg.stream(tag, c);
    const int begin = static_cast<int>(c) * kChunk;
    const int end = std::min(samples, begin + kChunk);
    for (int s = begin; s < end; ++s) {
      const MasterKey key = random_key(rng);
      const Block pt = random_block(rng);
      const auto rk = cipher.derive_round_keys(key);
      outs[c].push_back(cipher.encrypt(rk, pt, rounds) ^ cipher.encrypt(rk, pt ^ delta, rounds));
    }
  });
  std::unordered_map<Block, int, BlockHash> freq;
  DpReport rep;
  rep.delta = delta;
  rep.rounds = rounds;
  rep.samples = samples;
  for (const auto& chunk : outs) {
    for (const Block& d : chunk) {
      const int f = ++freq[d];
      if (f > rep.max_count) {
        rep.max_count = f;
        rep.best_output = d;
      }
    }
  }
  rep.distinct_outputs = freq.size();
  rep.max_dp = static_cast<double>(rep.max_count) / samples;
  rep.weight = -std::log2(rep.max_dp);
  return rep;
}

// -------------------------------------------------------------- related key

Word round_key_difference(const MasterKey& delta, int round) {
  return delta.low ^ lfsr_advance(delta.high, round);
}

MasterKey free_round_difference(Word delta_high, int round) {
  if (delta_high == 0) throw ParameterError("delta_high must be nonzero");
  return {delta_high, lfsr_advance(delta_high, round)};
}

RelatedKeyReport related_key_scan(int n_diffs, const RngConfig& cfg) {
  if (n_diffs < 1) throw ParameterError("n_diffs must be >= 1");
  constexpr int kChunk = 500;
  const std::size_t chunks = static_cast<std::size_t>((n_diffs + kChunk - 1) / kChunk);
  const auto& cipher = full_cipher();
  struct Part {
    std::vector<std::vector<int>> hw = std::vector<std::vector<int>>(kFullRounds);
    int mismatches = 0;
    int weak = 0;
    int high_nonzero = 0;
    int high_zero = 0;
  };
  std::vector<Part> parts(chunks);
  parallel_chunks(chunks, cfg.threads, [&](std::size_t c) {
    auto rng = cfg.stream(kTagRelatedKey, c);
    auto& part = parts[c];
    const int begin = static_cast<int>(c) * kChunk;
    const int end = std::min(n_diffs, begin + kChunk);
    for (int s = begin; s < end; ++s) {
      MasterKey delta;
      do {
        delta = random_key(rng);
      } while (delta.high == 0 && delta.low == 0);
      const MasterKey k1 = random_key(rng);
      const MasterKey k2{k1.high ^ delta.high, k1.low ^ delta.low};
      (delta.high != 0 ? part.high_nonzero : part.high_zero)++;
      const auto rk1 = cipher.derive_round_keys(k1);
      const auto rk2 = cipher.derive_round_keys(k2);
      const bool weak = k1.high == 0 || k2.high == 0;
      if (weak) ++part.weak;
      for (int r = 0; r < kFullRounds; ++r) {
        const Word direct = rk1.keys[static_cast<std::size_t>(r)] ^ rk2.keys[static_cast<std::size_t>(r)];
        if (!weak && direct != round_key_difference(delta, r)) ++part.mismatches;
        part.hw[static_cast<std::size_t>(r)].push_back(std::popcount(direct));
      }
    }
  });

  RelatedKeyReport rep;
  rep.n_diffs = n_diffs;
  double all_sum = 0;
  std::size_t all_n = 0;
  for (int r = 0; r < kFullRounds; ++r) {
    RelatedKeyRound rr;
    rr.min = 64;
    rr.max = 0;
    double s = 0;
    double s2 = 0;
    std::size_t n = 0;
    for (const auto& part : parts) {
      for (int hw : part.hw[static_cast<std::size_t>(r)]) {
        s += hw;
        s2 += static_cast<double>(hw) * hw;
        ++n;
        rr.min = std::min(rr.min, hw);
        rr.max = std::max(rr.max, hw);
        if (hw == 0) ++rr.zero_count;
      }
    }
    rr.mean = s / static_cast<double>(n);
    // Sample standard deviation.
    rr.stddev = n > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / static_cast<double>(n)) / static_cast<double>(n - 1))) : 0.0;
    rep.total_zero += rr.zero_count;
    all_sum += s;
    all_n += n;
    rep.rounds.push_back(rr);
  }
  rep.overall_mean = all_sum / static_cast<double>(all_n);
  for (const auto& part : parts) {
    rep.formula_mismatches += part.mismatches;
    rep.weak_key_draws += part.weak;
    rep.case_high_nonzero += part.high_nonzero;
    rep.case_high_zero += part.high_zero;
  }
  return rep;
}

// ------------------------------------------------------ invariant subspaces

AffineSubspace::AffineSubspace(std::vector<Word> basis, Word offset) : raw_(std::move(basis)), offset_(offset) {
  for (Word v : raw_) {
    const Word r = reduce(v);
    if (r == 0) throw ParameterError("basis vectors are linearly dependent");
    basis_.push_back(r);
    std::sort(basis_.begin(), basis_.end(), [](Word a, Word b) { return std::countl_zero(a) < std::countl_zero(b); });
  }
}

Word AffineSubspace::reduce(Word v) const noexcept {
  for (Word b : basis_) {
    const int lead = 63 - std::countl_zero(b);
    if ((v >> lead) & 1) v ^= b;
  }
  return v;
}

Word AffineSubspace::point(std::uint64_t coeffs) const noexcept {
  Word x = offset_;
  for (std::size_t k = 0; k < raw_.size(); ++k) {
    if ((coeffs >> k) & 1) x ^= raw_[k];
  }
  return x;
}

AffineSubspace AffineSubspace::random(int dim, std::mt19937_64& rng) {
  if (dim < 0 || dim > 64) throw ParameterError("subspace dimension must lie in [0, 64]");
  std::vector<Word> basis;
  std::vector<Word> echelon;
  while (static_cast<int>(basis.size()) < dim) {
    const Word v = rng();
    Word r = v;
    for (Word b : echelon) {
      const int lead = 63 - std::countl_zero(b);
      if ((r >> lead) & 1) r ^= b;
    }
    if (r == 0) continue;
    basis.push_back(v);
    echelon.push_back(r);
    std::sort(echelon.begin(), echelon.end(), [](Word a, Word b) { return std::countl_zero(a) < std::countl_zero(b); });
  }
  const Word offset = rng();
  return AffineSubspace(std::move(basis), offset);
}

bool is_invariant(const AffineSubspace& v, const std::function<Word(Word)>& map, std::mt19937_64& rng, int max_points,
                  std::uint64_t* evaluations) {
  const int k = v.dimension();
  const bool enumerate = k < 63 && (std::uint64_t{1} << k) <= static_cast<std::uint64_t>(max_points);
  const std::uint64_t points = enumerate ? (std::uint64_t{1} << k) : static_cast<std::uint64_t>(max_points);
  const std::uint64_t coeff_mask = k >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << k) - 1);
  std::uint64_t evals = 1;
  const Word y0 = map(v.point(0));
  bool invariant = true;
  for (std::uint64_t t = 1; t < points; ++t) {
    const std::uint64_t coeffs = enumerate ? t : (rng() & coeff_mask);
    ++evals;
    if (!v.contains_direction(map(v.point(coeffs)) ^ y0)) {
      invariant = false;
      break;
    }
  }
  if (evaluations) *evaluations += evals;
  return invariant;
}

int SubspaceTestReport::total_trials() const {
  int t = 0;
  for (int x : trials) t += x;
  return t;
}

int SubspaceTestReport::total_invariants() const {
  int t = 0;
  for (int x : invariants_found) t += x;
  return t;
}

SubspaceTestReport invariant_subspace_search(const std::vector<int>& dims, int trials_per_dim, const RngConfig& cfg,
                                             int max_points) {
  for (int d : dims) {
    if (d < 1 || d > 16) throw ParameterError("subspace dimensions must lie in [1, 16]");
  }
  if (trials_per_dim < 1) throw ParameterError("trials per dimension must be >= 1");
  const auto& cipher = full_cipher();
  const std::function<Word(Word)> fcore = [&cipher](Word x) { return cipher.f_core(x); };
  const std::size_t total = dims.size() * static_cast<std::size_t>(trials_per_dim);
  std::vector<std::uint8_t> found(total, 0);
  std::vector<std::uint64_t> evals(total, 0);
  parallel_chunks(total, cfg.threads, [&](std::size_t idx) {
    auto rng = cfg.stream(kTagSubspace, idx);
    const int dim = dims[idx / static_cast<std::size_t>(trials_per_dim)];
    const auto v = AffineSubspace::random(dim, rng);
    found[idx] = is_invariant(v, fcore, rng, max_points, &evals[idx]) ? 1 : 0;
  });

  SubspaceTestReport rep;
  rep.dims = dims;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    int hits = 0;
    for (int t = 0; t < trials_per_dim; ++t) hits += found[d * static_cast<std::size_t>(trials_per_dim) + static_cast<std::size_t>(t)];
    rep.trials.push_back(trials_per_dim);
    rep.invariants_found.push_back(hits);
  }
  for (auto e : evals) rep.evaluations += e;

  // Positive control: the identity map preserves every coset.
  auto rng = cfg.stream(kTagSubspace, ~std::uint64_t{0});
  const auto control = AffineSubspace::random(2, rng);
  rep.identity_control_detected = is_invariant(control, [](Word x) { return x; }, rng, max_points);
  return rep;
}

// ------------------------------------------------------ zero-difference scan

std::vector<Block> default_zero_scan_differences() {
  std::vector<Block> out;
  for (int b : {0, 8, 15, 16, 24, 31}) out.push_back(block_bit(b, 16));
  for (int b : {0, 7, 15, 16, 23, 30}) out.push_back(block_bit(b, 16) ^ block_bit(b + 1, 16));
  return out;
}

ZeroScanReport reduced_zero_diff_scan(const Block& delta, int rounds, std::uint64_t samples, bool exhaustive,
                                      const RngConfig& cfg) {
  constexpr int kWidth = 16;
  if (rounds < 0 || rounds > 16) throw ParameterError("zero scan rounds must lie in [0, 16]");
  if ((delta.left | delta.right) >> kWidth) throw ParameterError("difference exceeds the 32-bit reduced block");
  if (delta == Block{}) throw ParameterError("input difference must be nonzero");
  const FeistelCipher cipher = reduced_cipher(kWidth, {-1, +1, +4}, std::max(rounds, 1));

  ZeroScanReport rep;
  rep.delta = delta;
  rep.rounds = rounds;
  rep.exhaustive = exhaustive;
  rep.single_bit_checked = rounds == 2 || rounds == 3;
  auto key_rng = cfg.stream(kTagZeroScan, ~std::uint64_t{0});
  rep.key = random_key(key_rng, cipher.mask());
  const auto rk = cipher.derive_round_keys(rep.key);

  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t total = exhaustive ? (std::uint64_t{1} << 32) : samples;
  rep.plaintexts = total;
  const std::size_t chunks = static_cast<std::size_t>((total + kChunk - 1) / kChunk);
  struct Part {
    std::uint64_t zero = 0;
    std::uint64_t single = 0;
    bool has_example = false;
    Block example;
  };
  std::vector<Part> parts(chunks);
  parallel_chunks(chunks, cfg.threads, [&](std::size_t c) {
    auto rng = cfg.stream(kTagZeroScan ^ (static_cast<std::uint64_t>(rounds) << 40) ^ (delta.left << 16) ^ delta.right, c);
    auto& part = parts[c];
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(total, begin + kChunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::uint64_t p = exhaustive ? i : (rng() & 0xFFFFFFFFULL);
      const Block pt{p >> kWidth, p & 0xFFFF};
      const Block d = cipher.encrypt(rk, pt, rounds) ^ cipher.encrypt(rk, pt ^ delta, rounds);
      const int hw = hamming_weight(d);
      if (hw == 0) ++part.zero;
      if (hw == 1) {
        if (!part.has_example) {
          part.has_example = true;
          part.example = pt;
        }
        ++part.single;
      }
    }
  });
  bool have_example = false;
  for (const auto& part : parts) {
    rep.zero_output_hits += part.zero;
    rep.single_bit_output_hits += part.single;
    if (!have_example && part.has_example) {
      have_example = true;
      rep.example_single_bit_plaintext = part.example;
    }
  }
  return rep;
}

// --------------------------------------------------------- coverage scan

CoverageReport truncated_coverage_scan(int pairs, const std::vector<int>& checkpoints, const RngConfig& cfg) {
  if (pairs < 100) throw ParameterError("coverage scan needs >= 100 pairs");
  if (checkpoints.empty()) throw ParameterError("coverage scan needs at least one checkpoint round");
  for (int r : checkpoints) {
    if (r < 1 || r > kFullRounds) throw ParameterError("checkpoint rounds must lie in [1, 20]");
  }
  const int max_round = *std::max_element(checkpoints.begin(), checkpoints.end());
  const auto& cipher = full_cipher();
  constexpr int kChunk = 500;
  const std::size_t chunks = static_cast<std::size_t>((pairs + kChunk - 1) / kChunk);
  const std::size_t ncp = checkpoints.size();
  // diffs[pair * ncp + checkpoint]
  std::vector<Block> diffs(static_cast<std::size_t>(pairs) * ncp);
  parallel_chunks(chunks, cfg.threads, [&](std::size_t c) {
    auto rng = cfg.stream(kTagCoverage, c);
    const int begin = static_cast<int>(c) * kChunk;
    const int end = std::min(pairs, begin + kChunk);
    for (int s = begin; s < end; ++s) {
      const MasterKey key = random_key(rng);
      Block a = random_block(rng);
      Block b = flip(a, static_cast<int>(uniform_below(rng, 128)));
      const auto rk = cipher.derive_round_keys(key);
      for (int r = 1; r <= max_round; ++r) {
        a = cipher.round(a, rk.keys[static_cast<std::size_t>(r - 1)]);
        b = cipher.round(b, rk.keys[static_cast<std::size_t>(r - 1)]);
        for (std::size_t k = 0; k < ncp; ++k) {
          if (checkpoints[k] == r) diffs[static_cast<std::size_t>(s) * ncp + k] = a ^ b;
        }
      }
    }
  });
  CoverageReport rep;
  rep.pairs = pairs;
  for (std::size_t k = 0; k < ncp; ++k) {
    CoverageCheckpoint cp;
    cp.round = checkpoints[k];
    Block seen{};
    for (int s = 0; s < pairs; ++s) {
      const Block& d = diffs[static_cast<std::size_t>(s) * ncp + k];
      seen = {seen.left | d.left, seen.right | d.right};
      if (cp.trials_to_full < 0 && seen.left == ~Word{0} && seen.right == ~Word{0}) cp.trials_to_full = s + 1;
    }
    cp.never_active = 128 - hamming_weight(seen);
    rep.checkpoints.push_back(cp);
  }
  return rep;
}

// ------------------------------------------------------------ NIST streams

NistMode parse_nist_mode(const std::string& s) {
  if (s == "random_pt" || s == "random") return NistMode::random_pt;
  if (s == "counter") return NistMode::counter;
  if (s == "nonce_counter") return NistMode::nonce_counter;
  throw ParameterError("unknown NIST mode '" + s + "'");
}

std::string to_string(NistMode m) {
  switch (m) {
    case NistMode::random_pt: return "random_pt";
    case NistMode::counter: return "counter";
    case NistMode::nonce_counter: return "nonce_counter";
  }
  return "random_pt";
}

NistReport generate_nist_bitstream(NistMode mode, std::uint64_t n_bits, const MasterKey& key, const std::string& path,
                                   const RngConfig& cfg, NistFormat format, std::uint64_t counter_start) {
  if (n_bits == 0 || n_bits % 128 != 0) throw ParameterError("n_bits must be a positive multiple of 128");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const auto& cipher = full_cipher();
  const auto rk = cipher.derive_round_keys(key);

  NistReport rep;
  rep.bits = n_bits;
  rep.blocks = n_bits / 128;
  if (mode == NistMode::nonce_counter) {
    auto nonce_rng = cfg.stream(kTagNist, ~std::uint64_t{0});
    rep.nonce = nonce_rng();
  }
  constexpr std::uint64_t kChunk = 4096;  // blocks
  const std::uint64_t chunks = (rep.blocks + kChunk - 1) / kChunk;
  const std::size_t batch = static_cast<std::size_t>(std::max(cfg.threads, 1)) * 4;
  const std::size_t bytes_per_block = format == NistFormat::ascii ? 128 : 16;
  std::vector<std::string> buffers(batch);
  std::vector<std::uint64_t> ones(batch);

  for (std::uint64_t first = 0; first < chunks; first += batch) {
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, chunks - first));
    parallel_chunks(count, cfg.threads, [&](std::size_t slot) {
      const std::uint64_t c = first + slot;
      auto rng = cfg.stream(kTagNist, c);
      const std::uint64_t begin = c * kChunk;
      const std::uint64_t end = std::min(rep.blocks, begin + kChunk);
      std::string& buf = buffers[slot];
      buf.assign(static_cast<std::size_t>(end - begin) * bytes_per_block, '\0');
      std::uint64_t ones_here = 0;
      char* p = buf.data();
      for (std::uint64_t i = begin; i < end; ++i) {
        Block pt;
        switch (mode) {
          case NistMode::random_pt: pt = random_block(rng); break;
          case NistMode::counter: pt = {0, counter_start + i}; break;
          case NistMode::nonce_counter: pt = {rep.nonce, counter_start + i}; break;
        }
        const Block ct = cipher.encrypt(rk, pt);
        ones_here += static_cast<std::uint64_t>(hamming_weight(ct));
        for (Word half : {ct.left, ct.right}) {
          if (format == NistFormat::ascii) {
            for (int b = 63; b >= 0; --b) *p++ = ((half >> b) & 1) ? '1' : '0';
          } else {
            for (int b = 56; b >= 0; b -= 8) *p++ = static_cast<char>((half >> b) & 0xFF);
          }
        }
      }
      ones[slot] = ones_here;
    });
    for (std::size_t slot = 0; slot < count; ++slot) {
      out.write(buffers[slot].data(), static_cast<std::streamsize>(buffers[slot].size()));
      rep.ones += ones[slot];
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
  }
  const double n = static_cast<double>(n_bits);
  rep.monobit_z = (static_cast<double>(rep.ones) - n / 2.0) / (std::sqrt(n) / 2.0);
  return rep;
}

}  // namespace egc::stats
