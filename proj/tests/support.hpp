#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "qac/ingest.hpp"

namespace qac::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(QAC_TEST_DATA_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("qac_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Normalized-looking text over a small alphabet so prefixes collide often:
/// no leading/trailing or doubled spaces.
inline std::string random_text(std::mt19937_64& rng, std::size_t max_len = 8,
                               std::string_view alphabet = "abcd") {
  std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  std::bernoulli_distribution space(0.15);
  const auto len = len_dist(rng);
  std::string s;
  while (s.size() < len) {
    if (!s.empty() && s.back() != ' ' && s.size() + 1 < len && space(rng)) {
      s.push_back(' ');
    } else {
      s.push_back(alphabet[ch(rng)]);
    }
  }
  return s;
}

/// Unique random entries with counts drawn from a small range, so count ties
/// are frequent and the text tie-break is exercised.
inline CountedSuggestions random_counted(std::mt19937_64& rng, std::size_t n,
                                         std::size_t max_len = 10,
                                         std::uint64_t max_count = 50) {
  CountedSuggestions out;
  std::uniform_int_distribution<std::uint64_t> count(1, max_count);
  while (out.size() < n) out.entries.emplace(random_text(rng, max_len), count(rng));
  return out;
}

/// Prefix of a random entry or a random string over the same alphabet.
inline std::string random_prefix(std::mt19937_64& rng, const std::vector<std::string>& texts) {
  std::bernoulli_distribution from_entry(0.7);
  if (from_entry(rng)) {
    const auto& t = texts[std::uniform_int_distribution<std::size_t>(0, texts.size() - 1)(rng)];
    return t.substr(0, std::uniform_int_distribution<std::size_t>(0, t.size())(rng));
  }
  return random_text(rng, 4);
}

}  // namespace qac::testing
