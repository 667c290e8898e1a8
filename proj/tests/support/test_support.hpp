// SPDX-License-Identifier: Apache-2.0
// Seeded generators and fixtures shared by the unit and acceptance tests.
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "cxrt/grid.hpp"

namespace cxrt::testing {

/// Thin wrapper over mt19937_64 for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mu = 0.0, double sigma = 1.0) { return std::normal_distribution<double>(mu, sigma)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(integer(0, static_cast<int>(items.size()) - 1))];
  }
  std::string ascii(int max_len, std::string_view alphabet) {
    const int n = integer(0, max_len);
    std::string s;
    for (int i = 0; i < n; ++i) s += alphabet[static_cast<std::size_t>(integer(0, static_cast<int>(alphabet.size()) - 1))];
    return s;
  }
  std::mt19937_64& engine() noexcept { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Image random_image(Gen& g, int rows, int cols) {
  Image im(rows, cols);
  for (double& v : im.values()) v = g.uniform();
  return im;
}

inline Mask random_mask(Gen& g, int rows, int cols, double density) {
  Mask m(rows, cols);
  for (auto& v : m.values()) v = g.coin(density) ? 1 : 0;
  return m;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "cxrt-test") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cxrt::testing
