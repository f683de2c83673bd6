#pragma once

#include <string>
#include <vector>

#include "egc/cipher.hpp"

namespace egc {

struct TestVector {
  std::string name;
  MasterKey key;
  Block plaintext;
  Block ciphertext;
};

struct VectorCheck {
  TestVector vector;
  Block encrypted;
  Block decrypted;
  bool encrypt_ok = false;
  bool decrypt_ok = false;
  bool ok() const noexcept { return encrypt_ok && decrypt_ok; }
};

/// Reads `name,key_hex,pt_hex,ct_hex` rows (header line required).
/// Throws std::runtime_error when the file is missing, ParameterError on bad rows.
std::vector<TestVector> load_vectors(const std::string& path);

VectorCheck check_vector(const TestVector& tv);

}  // namespace egc
