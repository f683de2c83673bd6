#include "egc/cipher.hpp"

#include <cctype>
#include <cmath>

namespace egc {

// The first 320 bits of pi's hexadecimal fraction, 16 digits per round.
const std::array<Word, kFullRounds> kRoundConstants{
    0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL,
    0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL, 0xc0ac29b7c97c50ddULL, 0x3f84d5b5b5470917ULL,
    0x9216d5d98979fb1bULL, 0xd1310ba698dfb5acULL, 0x2ffd72dbd01adfb7ULL, 0xb8e1afed6a267e96ULL,
    0xba7c9045f12c7f99ULL, 0x24a19947b3916cf7ULL, 0x0801f2e2858efc16ULL, 0x636920d871574e69ULL,
    0xa458fea3f4933d7eULL, 0x0d95748f728eb658ULL, 0x718bcd5882154aeeULL, 0x7b54a41dc25a59b5ULL,
};

CipherParams CipherParams::full() {
  CipherParams p;
  p.round_constants.assign(kRoundConstants.begin(), kRoundConstants.end());
  return p;
}

CipherParams CipherParams::reduced(int branch_width, Offsets offsets, int rounds) {
  CipherParams p;
  p.branch_width = branch_width;
  p.offsets = offsets;
  p.rounds = rounds;
  if (rounds >= 0) {
    const Word m = p.mask();
    p.round_constants.reserve(static_cast<std::size_t>(rounds));
    for (int r = 0; r < rounds; ++r) {
      p.round_constants.push_back(kRoundConstants[static_cast<std::size_t>(r) % kRoundConstants.size()] & m);
    }
  }
  p.validate();
  return p;
}

void CipherParams::validate() const {
  if (branch_width < 4 || branch_width > 64) {
    throw ParameterError("branch width must lie in [4, 64], got " + std::to_string(branch_width));
  }
  if (rounds < 1) throw ParameterError("rounds must be >= 1");
  if (round_constants.size() != static_cast<std::size_t>(rounds)) {
    throw ParameterError("round constant count must equal rounds");
  }
  std::array<int, 3> residues{};
  for (std::size_t k = 0; k < 3; ++k) {
    residues[k] = ((offsets[k] % branch_width) + branch_width) % branch_width;
    if (residues[k] == 0) throw ParameterError("neighbour offsets must be nonzero modulo the width");
  }
  if (residues[0] == residues[1] || residues[0] == residues[2] || residues[1] == residues[2]) {
    throw ParameterError("neighbour offsets must be distinct modulo the width");
  }
}

Offsets scaled_offsets(int branch_width) {
  return {-1, +1, static_cast<int>(std::lround(branch_width / 4.0))};
}

std::uint16_t rule_a_truth_table() noexcept {
  std::uint16_t t = 0;
  for (int k = 0; k < 16; ++k) {
    const int bit = rule_a_eval(k & 1, (k >> 1) & 1, (k >> 2) & 1, (k >> 3) & 1);
    t = static_cast<std::uint16_t>(t | (bit << k));
  }
  return t;
}

namespace {

constexpr std::array<int, 4> kLfsrTaps{0, 1, 3, 4};

Word lfsr_feedback(Word s, int width) noexcept {
  Word fb = 0;
  for (int t : kLfsrTaps) {
    if (t < width) fb ^= (s >> t) & 1;
  }
  return fb;
}

Word width_mask(int width) noexcept {
  return width >= 64 ? ~Word{0} : ((Word{1} << width) - 1);
}

}  // namespace

Word lfsr_init(Word k_high) noexcept { return k_high != 0 ? k_high : 1; }

Word lfsr_step(Word s, int width) noexcept {
  s &= width_mask(width);
  return (s >> 1) | (lfsr_feedback(s, width) << (width - 1));
}

Word lfsr_inverse_step(Word s, int width) noexcept {
  s &= width_mask(width);
  // Bits 1..width-1 of the predecessor are bits 0..width-2 of s; bit 0 is
  // recovered from the feedback equation.
  const Word fb = (s >> (width - 1)) & 1;
  const Word upper = (s << 1) & width_mask(width);
  Word s0 = fb;
  for (int t : kLfsrTaps) {
    if (t != 0 && t < width) s0 ^= (upper >> t) & 1;
  }
  return upper | s0;
}

Word lfsr_advance(Word s, int steps, int width) noexcept {
  for (int i = 0; i < steps; ++i) s = lfsr_step(s, width);
  return s;
}

FeistelCipher::FeistelCipher(CipherParams params)
    : params_(std::move(params)), width_(params_.branch_width), mask_(0), shifts_{} {
  params_.validate();
  mask_ = params_.mask();
  for (std::size_t k = 0; k < 3; ++k) {
    shifts_[k] = ((params_.offsets[k] % width_) + width_) % width_;
  }
}

RoundKeySchedule FeistelCipher::derive_round_keys(const MasterKey& key) const {
  RoundKeySchedule out;
  out.keys.reserve(static_cast<std::size_t>(params_.rounds));
  Word s = lfsr_init(key.high & mask_);
  for (int r = 0; r < params_.rounds; ++r) {
    out.keys.push_back((key.low ^ s ^ params_.round_constants[static_cast<std::size_t>(r)]) & mask_);
    s = lfsr_step(s, width_);
  }
  return out;
}

Block FeistelCipher::encrypt(const RoundKeySchedule& schedule, Block pt, int rounds) const {
  const int n = rounds < 0 ? static_cast<int>(schedule.keys.size()) : rounds;
  if (n > static_cast<int>(schedule.keys.size())) throw ParameterError("not enough round keys");
  Block s{pt.left & mask_, pt.right & mask_};
  for (int r = 0; r < n; ++r) s = round(s, schedule.keys[static_cast<std::size_t>(r)]);
  return s;
}

Block FeistelCipher::decrypt(const RoundKeySchedule& schedule, Block ct, int rounds) const {
  const int n = rounds < 0 ? static_cast<int>(schedule.keys.size()) : rounds;
  if (n > static_cast<int>(schedule.keys.size())) throw ParameterError("not enough round keys");
  Block s{ct.left & mask_, ct.right & mask_};
  for (int r = n - 1; r >= 0; --r) s = inverse_round(s, schedule.keys[static_cast<std::size_t>(r)]);
  return s;
}

FeistelCipher reduced_cipher(int branch_width, Offsets offsets, int rounds) {
  return FeistelCipher(CipherParams::reduced(branch_width, offsets, rounds));
}

Word f_core(Word branch, const CipherParams& params) {
  return FeistelCipher(params).f_core(branch);
}

RoundKeySchedule derive_round_keys(const MasterKey& key, const CipherParams& params) {
  return FeistelCipher(params).derive_round_keys(key);
}

namespace {

const FeistelCipher& full_cipher() {
  static const FeistelCipher cipher(CipherParams::full());
  return cipher;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Parses exactly 2*width bits of hex into (high, low) words.
std::pair<Word, Word> parse_halves(std::string_view hex, int branch_width) {
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
  if (branch_width % 4 != 0) throw ParameterError("hex I/O needs a branch width divisible by 4");
  const std::size_t half = static_cast<std::size_t>(branch_width / 4);
  if (hex.size() != 2 * half) {
    throw ParameterError("expected " + std::to_string(2 * half) + " hex digits, got " +
                         std::to_string(hex.size()));
  }
  std::pair<Word, Word> out{0, 0};
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const int d = hex_digit(hex[i]);
    if (d < 0) throw ParameterError("malformed hex digit '" + std::string(1, hex[i]) + "'");
    Word& w = i < half ? out.first : out.second;
    w = (w << 4) | static_cast<Word>(d);
  }
  return out;
}

}  // namespace

Block encrypt_block(const MasterKey& key, const Block& pt) { return full_cipher().encrypt(key, pt); }

Block decrypt_block(const MasterKey& key, const Block& ct) { return full_cipher().decrypt(key, ct); }

Block parse_block(std::string_view hex, int branch_width) {
  const auto [hi, lo] = parse_halves(hex, branch_width);
  return {hi, lo};
}

MasterKey parse_key(std::string_view hex, int branch_width) {
  const auto [hi, lo] = parse_halves(hex, branch_width);
  return {hi, lo};
}

std::string word_hex(Word w, int width) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const int digits = (width + 3) / 4;
  std::string s(static_cast<std::size_t>(digits), '0');
  for (int i = digits - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[w & 0xF];
    w >>= 4;
  }
  return s;
}

std::string to_hex(const Block& block, int branch_width) {
  return word_hex(block.left, branch_width) + word_hex(block.right, branch_width);
}

std::string to_hex(const MasterKey& key, int branch_width) {
  return word_hex(key.high, branch_width) + word_hex(key.low, branch_width);
}

}  // namespace egc
