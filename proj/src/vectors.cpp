#include "egc/vectors.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace egc {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<TestVector> load_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file '" + path + "'");
  std::vector<TestVector> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line.rfind("name", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 4) {
      throw ParameterError("line " + std::to_string(line_no) + ": expected 4 comma-separated fields");
    }
    out.push_back({fields[0], parse_key(fields[1]), parse_block(fields[2]), parse_block(fields[3])});
  }
  return out;
}

VectorCheck check_vector(const TestVector& tv) {
  VectorCheck c;
  c.vector = tv;
  c.encrypted = encrypt_block(tv.key, tv.plaintext);
  c.decrypted = decrypt_block(tv.key, tv.ciphertext);
  c.encrypt_ok = c.encrypted == tv.ciphertext;
  c.decrypt_ok = c.decrypted == tv.plaintext;
  return c;
}

}  // namespace egc
