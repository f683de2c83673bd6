#pragma once

// ExpanderGraph-128 block cipher and its width-parametric reduced family.
//
// Bit convention: bit 0 is the least significant bit of a branch word. A
// block is written as a big-endian hex string whose high half is the left
// branch L and whose low half is the right branch R.

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace egc {

using Word = std::uint64_t;

inline constexpr int kFullBranchWidth = 64;
inline constexpr int kFullRounds = 20;
inline constexpr std::uint16_t kRuleATruthTable = 0x036F;

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Round constants RC_0..RC_19: consecutive 64-bit groups of the hexadecimal
/// expansion of pi's fractional part.
extern const std::array<Word, kFullRounds> kRoundConstants;

/// Neighbour offsets (n1, n2, n3) of the interaction graph, relative to the
/// vertex index. Vertex i reads x_i, x_{i+n1}, x_{i+n2}, x_{i+n3}.
using Offsets = std::array<int, 3>;

inline constexpr Offsets kFullOffsets{-1, +1, +16};

struct CipherParams {
  int branch_width = kFullBranchWidth;
  Offsets offsets = kFullOffsets;
  int rounds = kFullRounds;
  std::vector<Word> round_constants;

  /// The full 64-bit-branch, 20-round cipher.
  static CipherParams full();
  /// Reduced instance: round constants are RC_r truncated to `branch_width`
  /// bits (cycled if `rounds` exceeds the table).
  static CipherParams reduced(int branch_width, Offsets offsets, int rounds);

  /// Throws ParameterError when an invariant does not hold.
  void validate() const;

  Word mask() const noexcept {
    return branch_width >= 64 ? ~Word{0} : ((Word{1} << branch_width) - 1);
  }
};

/// {-1, +1, +round(width/4)}; reproduces {-1,+1,+16} at 64 and {-1,+1,+4} at 16.
Offsets scaled_offsets(int branch_width);

struct Block {
  Word left = 0;
  Word right = 0;

  friend bool operator==(const Block&, const Block&) = default;
  Block operator^(const Block& o) const noexcept { return {left ^ o.left, right ^ o.right}; }
};

struct MasterKey {
  Word high = 0;
  Word low = 0;

  friend bool operator==(const MasterKey&, const MasterKey&) = default;
};

struct RoundKeySchedule {
  std::vector<Word> keys;

  friend bool operator==(const RoundKeySchedule&, const RoundKeySchedule&) = default;
};

/// Rule-A evaluated from its algebraic normal form.
constexpr int rule_a_eval(int x0, int x1, int x2, int x3) noexcept {
  return 1 ^ x2 ^ (x0 & x2) ^ (x1 & x2) ^ (x1 & x3) ^ (x0 & x2 & x3);
}

/// Bitsliced Rule-A: lane i of the result is f(self_i, n1_i, n2_i, n3_i).
constexpr Word rule_a_sliced(Word self, Word n1, Word n2, Word n3) noexcept {
  return ~(n2 ^ (self & n2) ^ (n1 & n2) ^ (n1 & n3) ^ (self & n2 & n3));
}

/// Index convention: x0 + 2*x1 + 4*x2 + 8*x3.
std::uint16_t rule_a_truth_table() noexcept;

/// Rotate right within a `width`-bit word: bit i of the result is bit
/// (i + amount) mod width of x.
constexpr Word rotr_width(Word x, int amount, int width) noexcept {
  const Word mask = width >= 64 ? ~Word{0} : ((Word{1} << width) - 1);
  amount %= width;
  if (amount < 0) amount += width;
  if (amount == 0) return x & mask;
  return ((x >> amount) | (x << (width - amount))) & mask;
}

// Key-schedule LFSR. The full cipher uses taps {0,1,3,4} with feedback into
// bit 63. A `width`-bit variant keeps the taps below `width` and feeds bit
// width-1; it stays invertible because tap 0 is always present.
Word lfsr_init(Word k_high) noexcept;
Word lfsr_step(Word s, int width = kFullBranchWidth) noexcept;
Word lfsr_inverse_step(Word s, int width = kFullBranchWidth) noexcept;
/// Applies lfsr_step `steps` times.
Word lfsr_advance(Word s, int steps, int width = kFullBranchWidth) noexcept;

/// One Feistel cipher instance. Immutable after construction.
class FeistelCipher {
 public:
  explicit FeistelCipher(CipherParams params);

  const CipherParams& params() const noexcept { return params_; }
  int branch_width() const noexcept { return params_.branch_width; }
  int block_width() const noexcept { return 2 * params_.branch_width; }
  Word mask() const noexcept { return mask_; }

  /// The nonlinear layer; every output bit reads the unmodified input.
  Word f_core(Word branch) const noexcept {
    const Word x = branch & mask_;
    return rule_a_sliced(x, rotr_width(x, shifts_[0], width_), rotr_width(x, shifts_[1], width_),
                         rotr_width(x, shifts_[2], width_)) &
           mask_;
  }

  RoundKeySchedule derive_round_keys(const MasterKey& key) const;

  /// One forward round: (L, R) -> (R, L ^ F(R) ^ rk).
  Block round(const Block& state, Word round_key) const noexcept {
    return {state.right, (state.left ^ f_core(state.right) ^ round_key) & mask_};
  }
  Block inverse_round(const Block& state, Word round_key) const noexcept {
    return {(state.right ^ f_core(state.left) ^ round_key) & mask_, state.left};
  }

  /// Encrypts with the first `rounds` keys of the schedule (all when -1).
  Block encrypt(const RoundKeySchedule& schedule, Block pt, int rounds = -1) const;
  Block decrypt(const RoundKeySchedule& schedule, Block ct, int rounds = -1) const;

  Block encrypt(const MasterKey& key, const Block& pt) const {
    return encrypt(derive_round_keys(key), pt);
  }
  Block decrypt(const MasterKey& key, const Block& ct) const {
    return decrypt(derive_round_keys(key), ct);
  }

 private:
  CipherParams params_;
  int width_;
  Word mask_;
  std::array<int, 3> shifts_;
};

/// Builds a reduced instance; equivalent to FeistelCipher(CipherParams::reduced(...)).
FeistelCipher reduced_cipher(int branch_width, Offsets offsets, int rounds);

// Free-function API for the full cipher.
Word f_core(Word branch, const CipherParams& params);
RoundKeySchedule derive_round_keys(const MasterKey& key, const CipherParams& params);
Block encrypt_block(const MasterKey& key, const Block& pt);
Block decrypt_block(const MasterKey& key, const Block& ct);

// Hex helpers. Parsing accepts an optional 0x prefix and either case;
// formatting is lowercase without prefix. Throws ParameterError on bad input.
Block parse_block(std::string_view hex, int branch_width = kFullBranchWidth);
MasterKey parse_key(std::string_view hex, int branch_width = kFullBranchWidth);
std::string to_hex(const Block& block, int branch_width = kFullBranchWidth);
std::string to_hex(const MasterKey& key, int branch_width = kFullBranchWidth);
std::string word_hex(Word w, int width = 64);

/// Bit `index` of a block: 0..w-1 address R, w..2w-1 address L.
inline Block block_bit(int index, int branch_width = kFullBranchWidth) {
  if (index < branch_width) return {0, Word{1} << index};
  return {Word{1} << (index - branch_width), 0};
}

inline int hamming_weight(const Block& b) noexcept {
  return std::popcount(b.left) + std::popcount(b.right);
}

}  // namespace egc
