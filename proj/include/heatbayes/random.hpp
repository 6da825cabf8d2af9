#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace heatbayes {

// Child seed for an independent stream (SplitMix64 finaliser over the pair).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Standard normal variates by Box-Muller over mt19937_64. Both engine and
// transform are fully specified, so draws are identical across platforms.
class NormalGenerator {
 public:
  explicit NormalGenerator(std::uint64_t seed) : engine_(seed) {}

  double operator()();
  Eigen::VectorXd vector(Eigen::Index n);

 private:
  double uniform_open();  // in (0, 1]

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace heatbayes
