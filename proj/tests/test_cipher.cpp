#include <doctest.h>

#include <random>
#include <set>

#include "egc/cipher.hpp"

using namespace egc;

namespace {

// Direct evaluation of the Rule-A polynomial, independent of the truth-table constant.
int anf_reference(int x0, int x1, int x2, int x3) {
  return 1 ^ x2 ^ (x0 & x2) ^ (x1 & x2) ^ (x1 & x3) ^ (x0 & x2 & x3);
}

// Bit-by-bit layer: output i reads (i, i+o0, i+o1, i+o2) mod width.
Word fcore_reference(Word x, int width, Offsets o) {
  const auto bit = [&](int i) { return static_cast<int>((x >> (((i % width) + width) % width)) & 1); };
  Word y = 0;
  for (int i = 0; i < width; ++i) {
    y |= static_cast<Word>(anf_reference(bit(i), bit(i + o[0]), bit(i + o[1]), bit(i + o[2]))) << i;
  }
  return y;
}

Word width_mask(int w) { return w == 64 ? ~Word{0} : (Word{1} << w) - 1; }

}  // namespace

TEST_CASE("rule-a agrees with its polynomial and the packed constant") {
  std::uint16_t tt = 0;
  for (int x = 0; x < 16; ++x) {
    const int v = anf_reference(x & 1, (x >> 1) & 1, (x >> 2) & 1, (x >> 3) & 1);
    CHECK(rule_a_eval(x & 1, (x >> 1) & 1, (x >> 2) & 1, (x >> 3) & 1) == v);
    tt |= static_cast<std::uint16_t>(v << x);
  }
  CHECK(tt == 0x036F);
  CHECK(rule_a_truth_table() == 0x036F);
  CHECK(std::popcount(tt) == 8);
  CHECK(rule_a_eval(0, 0, 0, 0) == 1);
  CHECK(rule_a_eval(0, 0, 1, 0) == 0);
}

TEST_CASE("f_core matches the per-bit reference") {
  std::mt19937_64 rng(11);
  const FeistelCipher full(CipherParams::full());
  const auto small = reduced_cipher(16, {-1, +1, +4}, 1);
  for (int t = 0; t < 2000; ++t) {
    const Word x = rng();
    CHECK(full.f_core(x) == fcore_reference(x, 64, kFullOffsets));
    CHECK(small.f_core(x & 0xFFFF) == fcore_reference(x & 0xFFFF, 16, {-1, +1, +4}));
  }
  CHECK(full.f_core(0) == ~Word{0});
  // f(1,1,1,1) = 0 at every vertex
  CHECK(full.f_core(~Word{0}) == 0);
  CHECK(small.f_core(0) == 0xFFFF);
}

TEST_CASE("f_core output bit depends only on its read-set") {
  constexpr int n = 16;
  const Offsets o{-1, +1, +4};
  const auto c = reduced_cipher(n, o, 1);
  std::mt19937_64 rng(5);
  for (int i = 0; i < n; ++i) {
    std::set<int> reads{i};
    for (int k : o) reads.insert(((i + k) % n + n) % n);
    for (int j = 0; j < n; ++j) {
      bool changed = false;
      for (int t = 0; t < 64; ++t) {
        const Word x = rng() & 0xFFFF;
        const Word d = c.f_core(x) ^ c.f_core(x ^ (Word{1} << j));
        changed = changed || ((d >> i) & 1);
      }
      if (!reads.count(j)) CHECK_MESSAGE(!changed, "bit ", i, " changed by ", j);
    }
  }
}

TEST_CASE("single-bit input difference fans out to the four readers") {
  const FeistelCipher full(CipherParams::full());
  std::mt19937_64 rng(7);
  for (int j = 0; j < 64; ++j) {
    Word allowed = 0;
    for (int k : {0, 1, -1, -16}) allowed |= Word{1} << (((j + k) % 64 + 64) % 64);
    Word seen = 0;
    for (int t = 0; t < 200; ++t) {
      const Word x = rng();
      seen |= full.f_core(x) ^ full.f_core(x ^ (Word{1} << j));
    }
    CHECK((seen & ~allowed) == 0);
    CHECK(seen == allowed);
  }
}

TEST_CASE("f_core commutes with rotation") {
  const FeistelCipher full(CipherParams::full());
  std::mt19937_64 rng(9);
  for (int t = 0; t < 500; ++t) {
    const Word x = rng();
    const int k = static_cast<int>(rng() % 64);
    CHECK(full.f_core(std::rotl(x, k)) == std::rotl(full.f_core(x), k));
  }
}

TEST_CASE("lfsr initialisation and stepping") {
  CHECK(lfsr_init(0) == 1);
  CHECK(lfsr_init(1) == 1);
  CHECK(lfsr_init(0x243f6a8885a308d3ULL) == 0x243f6a8885a308d3ULL);
  CHECK(lfsr_step(0x0000000000000001ULL) == 0x8000000000000000ULL);
  CHECK(lfsr_step(0x8000000000000000ULL) == 0x4000000000000000ULL);
  CHECK(lfsr_inverse_step(0x8000000000000000ULL) == 0x0000000000000001ULL);
  CHECK(lfsr_inverse_step(0x4000000000000000ULL) == 0x8000000000000000ULL);

  // feedback is the parity of taps 0, 1, 3, 4
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10000; ++t) {
    const Word s = rng() | 1;
    const Word fb = (s ^ (s >> 1) ^ (s >> 3) ^ (s >> 4)) & 1;
    CHECK(lfsr_step(s) == ((s >> 1) | (fb << 63)));
    CHECK(lfsr_inverse_step(lfsr_step(s)) == s);
    CHECK(lfsr_step(lfsr_inverse_step(s)) == s);
  }
}

TEST_CASE("lfsr never reaches zero from a nonzero seed") {
  Word s = 0x243f6a8885a308d3ULL;
  bool hit_zero = false;
  for (int t = 0; t < 1000000; ++t) {
    s = lfsr_step(s);
    hit_zero = hit_zero || s == 0;
  }
  CHECK_FALSE(hit_zero);
  CHECK(lfsr_advance(0x243f6a8885a308d3ULL, 1000000) == s);
}

TEST_CASE("reduced lfsr stays invertible") {
  std::mt19937_64 rng(4);
  for (int w : {4, 8, 16, 32}) {
    for (int t = 0; t < 1000; ++t) {
      const Word s = (rng() & width_mask(w)) | 1;
      CHECK(lfsr_step(s, w) <= width_mask(w));
      CHECK(lfsr_inverse_step(lfsr_step(s, w), w) == s);
    }
  }
}

TEST_CASE("round keys") {
  const FeistelCipher full(CipherParams::full());
  const auto zero = full.derive_round_keys({0, 0});
  REQUIRE(zero.keys.size() == 20);
  CHECK(zero.keys[0] == 0x243f6a8885a308d2ULL);
  CHECK(zero.keys[0] == (kRoundConstants[0] ^ 1));

  // keys[r] = k_low ^ S_r ^ RC_r
  const MasterKey k{0x0123456789abcdefULL, 0x0f1e2d3c4b5a6978ULL};
  const auto sched = full.derive_round_keys(k);
  Word s = k.high;
  for (int r = 0; r < 20; ++r) {
    CHECK(sched.keys[static_cast<std::size_t>(r)] == (k.low ^ s ^ kRoundConstants[static_cast<std::size_t>(r)]));
    s = lfsr_step(s);
  }

  // A zero first round key is reachable, the schedule is total regardless.
  const MasterKey z{5, kRoundConstants[0] ^ 5};
  CHECK(full.derive_round_keys(z).keys[0] == 0);

  std::mt19937_64 rng(21);
  for (int t = 0; t < 1000; ++t) {
    const auto keys = full.derive_round_keys({rng(), rng()}).keys;
    CHECK(std::set<Word>(keys.begin(), keys.end()).size() == 20);
  }
}

TEST_CASE("reference vectors") {
  struct V {
    const char* key;
    const char* pt;
    const char* ct;
  };
  const V vs[] = {
      {"00000000000000000000000000000000", "00000000000000000000000000000000", "054e2db44cd3907d7c814c56070da703"},
      {"ffffffffffffffffffffffffffffffff", "ffffffffffffffffffffffffffffffff", "797644AEE6B69C4C28AC59BDCCE7FF19"},
      {"3C4F1A279BD80256E1F0C3A5D4976B8E", "9A7C3E2B10F4D8C6B5E1A2938476D0F1", "0C578E13690158046726B86187D850DA"},
  };
  for (const auto& v : vs) {
    const auto key = parse_key(v.key);
    CHECK(encrypt_block(key, parse_block(v.pt)) == parse_block(v.ct));
    CHECK(decrypt_block(key, parse_block(v.ct)) == parse_block(v.pt));
  }
  const FeistelCipher generic(CipherParams::reduced(64, {-1, +1, +16}, 20));
  CHECK(generic.encrypt(MasterKey{}, Block{}) == parse_block("054e2db44cd3907d7c814c56070da703"));
}

TEST_CASE("encryption round-trips") {
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 100; ++t) {
    const MasterKey k{rng(), rng()};
    const Block p{rng(), rng()};
    CHECK(decrypt_block(k, encrypt_block(k, p)) == p);
  }
  const auto c16 = reduced_cipher(16, {-1, +1, +4}, 20);
  const MasterKey k16{0x1234, 0xabcd};
  for (int t = 0; t < 10000; ++t) {
    const Block p{rng() & 0xFFFF, rng() & 0xFFFF};
    CHECK(c16.decrypt(k16, c16.encrypt(k16, p)) == p);
  }
  const auto one = reduced_cipher(16, {-1, +1, +4}, 1);
  const Block p{0x1111, 0x2222};
  CHECK(one.decrypt(k16, one.encrypt(k16, p)) == p);
}

TEST_CASE("4-bit branches give a permutation of all 256 blocks") {
  const auto c4 = reduced_cipher(4, {-1, +1, +2}, 20);
  for (const MasterKey k : {MasterKey{0, 0}, MasterKey{0x9, 0x6}}) {
    std::set<std::pair<Word, Word>> images;
    for (Word l = 0; l < 16; ++l) {
      for (Word r = 0; r < 16; ++r) {
        const Block c = c4.encrypt(k, {l, r});
        CHECK(c.left < 16);
        CHECK(c.right < 16);
        images.insert({c.left, c.right});
      }
    }
    CHECK(images.size() == 256);
  }
}

TEST_CASE("hex mapping puts the high half in the left branch") {
  const Block b = parse_block("0x0123456789ABCDEFfedcba9876543210");
  CHECK(b.left == 0x0123456789abcdefULL);
  CHECK(b.right == 0xfedcba9876543210ULL);
  CHECK(to_hex(b) == "0123456789abcdeffedcba9876543210");
  CHECK(block_bit(0) == Block{0, 1});
  CHECK(block_bit(127) == Block{Word{1} << 63, 0});
  CHECK(parse_block("0001ffff", 16) == Block{0x0001, 0xffff});
  const MasterKey k = parse_key("80000000000000000000000000000001");
  CHECK(k.high == Word{1} << 63);
  CHECK(k.low == 1);
}

TEST_CASE("invalid parameters and malformed hex are rejected") {
  CHECK_THROWS_AS(CipherParams::reduced(3, {-1, 1, 2}, 1), ParameterError);
  CHECK_THROWS_AS(CipherParams::reduced(65, {-1, 1, 2}, 1), ParameterError);
  CHECK_THROWS_AS(CipherParams::reduced(16, {-1, 1, 1}, 1), ParameterError);
  CHECK_THROWS_AS(CipherParams::reduced(16, {-1, 1, 16}, 1), ParameterError);
  CHECK_THROWS_AS(CipherParams::reduced(16, {-1, 15, 4}, 1), ParameterError);
  CHECK_THROWS_AS(CipherParams::reduced(16, {-1, 1, 4}, 0), ParameterError);
  CHECK_THROWS_AS(parse_block("00"), ParameterError);
  CHECK_THROWS_AS(parse_block("g0000000000000000000000000000000"), ParameterError);
  CHECK_THROWS_AS(parse_key(""), ParameterError);
  const FeistelCipher full(CipherParams::full());
  CHECK_THROWS_AS(full.encrypt(full.derive_round_keys({}), Block{}, 21), ParameterError);
}

TEST_CASE("reduced constants are truncated full constants") {
  const auto p = CipherParams::reduced(16, {-1, 1, 4}, 20);
  for (std::size_t r = 0; r < 20; ++r) CHECK(p.round_constants[r] == (kRoundConstants[r] & 0xFFFF));
}
