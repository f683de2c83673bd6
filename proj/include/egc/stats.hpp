#pragma once

// Randomized empirical analyses of the cipher. Every report is a pure
// function of (RngConfig::master_seed, parameters); worker count only
// affects speed.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "egc/cipher.hpp"
#include "egc/rng.hpp"

namespace egc::stats {

std::mt19937_64 make_rng(std::uint64_t seed);
Block random_block(std::mt19937_64& rng, Word mask = ~Word{0});
MasterKey random_key(std::mt19937_64& rng, Word mask = ~Word{0});

struct AvalancheReport {
  int pairs = 0;
  std::uint64_t samples_per_round = 0;
  std::vector<double> mean_hd;   // rounds 0..R
  std::vector<double> fraction;  // mean_hd / 128
  std::vector<double> stddev_hd;
};

/// Flips each of the 128 plaintext bits of `pairs` random (key, pt) and
/// records the state Hamming distance after every round.
AvalancheReport avalanche_profile(int pairs, int rounds, const RngConfig& cfg);

struct SacMatrix {
  int samples_per_bit = 0;
  std::vector<double> p;  // row-major [input][output], 128 x 128
  double mean = 0, stddev = 0, min = 0, max = 0;
  double frac_within_05 = 0;  // in [0.45, 0.55]
  double frac_within_10 = 0;  // in [0.40, 0.60]
  std::vector<double> input_bit_mean;
  double input_bit_mean_stddev = 0;

  double at(int in, int out) const { return p[static_cast<std::size_t>(in) * 128 + static_cast<std::size_t>(out)]; }
};

SacMatrix sac_matrix(int samples_per_bit, const RngConfig& cfg);

struct BicReport {
  int samples = 0;
  double max_abs = 0;
  double mean_abs = 0;
  double frac_above_005 = 0;
  int max_pair_i = 0, max_pair_j = 0;
  std::vector<double> correlation;  // 128 x 128, diagonal = 1

  double at(int i, int j) const {
    return correlation[static_cast<std::size_t>(i) * 128 + static_cast<std::size_t>(j)];
  }
};

BicReport bic_correlations(int samples, const RngConfig& cfg);

struct DpReport {
  Block delta;
  int rounds = 0;
  int samples = 0;
  int max_count = 0;
  Block best_output;
  double max_dp = 0;
  double weight = 0;  // -log2(max_dp)
  std::size_t distinct_outputs = 0;
};

/// Random (P, P ^ delta) under a fresh random key per sample.
DpReport empirical_max_dp(const Block& delta, int rounds, int samples, const RngConfig& cfg);

struct RelatedKeyRound {
  double mean = 0, stddev = 0;
  int min = 0, max = 0;
  int zero_count = 0;
};

struct RelatedKeyReport {
  int n_diffs = 0;
  std::vector<RelatedKeyRound> rounds;  // 20 entries
  double overall_mean = 0;
  int total_zero = 0;
  int formula_mismatches = 0;  // dK_low ^ LFSR^r(dK_high) against two real schedules
  int weak_key_draws = 0;      // base or related key with K_high = 0 (schedule non-linear there)
  int case_high_nonzero = 0;
  int case_high_zero = 0;
};

RelatedKeyReport related_key_scan(int n_diffs, const RngConfig& cfg);

/// Round-key difference for a master-key difference, linear part of the
/// schedule: dK_low ^ LFSR^r(dK_high).
Word round_key_difference(const MasterKey& delta, int round);

/// A nonzero master-key difference whose round-key difference vanishes at
/// `round` (dK_low = LFSR^round(dK_high)).
MasterKey free_round_difference(Word delta_high, int round);

/// Affine subspace V + c of GF(2)^64 given by a reduced-echelon basis.
class AffineSubspace {
 public:
  AffineSubspace(std::vector<Word> basis, Word offset);

  int dimension() const noexcept { return static_cast<int>(basis_.size()); }
  Word offset() const noexcept { return offset_; }
  const std::vector<Word>& basis() const noexcept { return basis_; }
  /// Reduces v modulo V; zero iff v is in V.
  Word reduce(Word v) const noexcept;
  bool contains_direction(Word v) const noexcept { return reduce(v) == 0; }
  /// offset ^ (combination of basis vectors selected by `coeffs`).
  Word point(std::uint64_t coeffs) const noexcept;

  static AffineSubspace random(int dim, std::mt19937_64& rng);

 private:
  std::vector<Word> basis_;  // echelon: distinct leading bits, fully reduced
  std::vector<Word> raw_;
  Word offset_;
};

/// Samples min(2^k, max_points) coset points (all of them when 2^k fits),
/// maps them, and checks every image lies in one coset of V.
bool is_invariant(const AffineSubspace& v, const std::function<Word(Word)>& map, std::mt19937_64& rng,
                  int max_points = 4096, std::uint64_t* evaluations = nullptr);

struct SubspaceTestReport {
  std::vector<int> dims;
  std::vector<int> trials;
  std::vector<int> invariants_found;
  std::uint64_t evaluations = 0;
  bool identity_control_detected = false;
  int total_trials() const;
  int total_invariants() const;
};

SubspaceTestReport invariant_subspace_search(const std::vector<int>& dims, int trials_per_dim, const RngConfig& cfg,
                                             int max_points = 4096);

struct ZeroScanReport {
  Block delta;
  int rounds = 0;
  bool exhaustive = false;
  std::uint64_t plaintexts = 0;
  std::uint64_t zero_output_hits = 0;
  std::uint64_t single_bit_output_hits = 0;
  bool single_bit_checked = false;  // rounds in {2, 3}
  MasterKey key;
  Block example_single_bit_plaintext;  // first hit, if any
};

/// Reduced 32-bit cipher (16-bit branches, offsets {-1,+1,+4}). `samples`
/// random plaintexts under one random key, or all 2^32 when exhaustive.
ZeroScanReport reduced_zero_diff_scan(const Block& delta, int rounds, std::uint64_t samples, bool exhaustive,
                                      const RngConfig& cfg);

/// The 12 low-weight differences scanned by default (6 single bits, 6
/// adjacent pairs) of the 32-bit block.
std::vector<Block> default_zero_scan_differences();

struct CoverageCheckpoint {
  int round = 0;
  int never_active = 0;
  int trials_to_full = -1;  // -1 when never reached
};

struct CoverageReport {
  int pairs = 0;
  std::vector<CoverageCheckpoint> checkpoints;
};

CoverageReport truncated_coverage_scan(int pairs, const std::vector<int>& checkpoints, const RngConfig& cfg);

enum class NistMode { random_pt, counter, nonce_counter };
enum class NistFormat { ascii, binary };

NistMode parse_nist_mode(const std::string& s);
std::string to_string(NistMode m);

struct NistReport {
  std::uint64_t bits = 0;
  std::uint64_t ones = 0;
  std::uint64_t blocks = 0;
  double monobit_z = 0;  // (ones - n/2) / (sqrt(n)/2)
  Word nonce = 0;
};

/// Writes n_bits (multiple of 128) of ciphertext, MSB of each block first.
NistReport generate_nist_bitstream(NistMode mode, std::uint64_t n_bits, const MasterKey& key, const std::string& path,
                                   const RngConfig& cfg, NistFormat format = NistFormat::ascii,
                                   std::uint64_t counter_start = 0);

}  // namespace egc::stats
