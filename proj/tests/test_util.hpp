#pragma once

#include <filesystem>
#include <random>

#include "lriid/speccube.hpp"

namespace lriid::testutil {

inline SpectralCube random_cube(int h, int w, int k, uint64_t seed,
                                double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> data(size_t(h) * w * k);
  for (double& v : data) v = dist(rng);
  return SpectralCube(h, w, k, std::move(data));
}

inline std::vector<double> random_vector(size_t n, uint64_t seed,
                                         double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("lriid_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace lriid::testutil
