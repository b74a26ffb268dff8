#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "semprobe/embedding.hpp"

namespace testing_support {

// Matrix from literal rows; tokens default to t0, t1, ...
inline semprobe::EmbeddingMatrix matrix_of(const std::vector<std::vector<float>>& rows,
                                           std::vector<std::string> vocab = {}) {
  const std::size_t dim = rows.front().size();
  if (vocab.empty()) {
    for (std::size_t i = 0; i < rows.size(); ++i) vocab.push_back("t" + std::to_string(i));
  }
  std::vector<float> data;
  for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
  return semprobe::EmbeddingMatrix(std::move(vocab), dim, std::move(data));
}

inline semprobe::EmbeddingMatrix random_matrix(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<std::string> vocab;
  std::vector<float> data(n * dim);
  for (std::size_t i = 0; i < n; ++i) vocab.push_back("w" + std::to_string(i));
  for (auto& v : data) v = g(rng);
  return semprobe::EmbeddingMatrix(std::move(vocab), dim, std::move(data));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("semprobe_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
