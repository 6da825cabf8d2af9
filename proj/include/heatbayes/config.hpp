#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heatbayes/geometry.hpp"

namespace heatbayes {

// Declarative experiment settings. Parsed from flat "key = value" text with
// '#' comments; analytic functions are referenced by registered ids.
struct ExperimentConfig {
  DomainSpec domain = DomainSpec::paper_ellipse();
  std::string truth = "f0_paper";
  std::string conductivity = "s_paper";
  double T = 0.01;
  double sigma = 0.05;
  double alpha = 0.5;
  std::optional<int> J;  // empty = default_truncation(n)
  std::vector<std::size_t> n_list{100, 250, 500, 1000};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double mesh_h = 0.03;
  std::optional<int> heat_steps;  // empty = default_heat_steps(T, h)
  double gamma = 0.1;
  std::string psi = "bump_psi";
  std::string output_dir = ".";
  int data_refinement = 2;  // data mesh spacing is mesh_h / data_refinement
  int replicates = 200;
  int interval_draws = 2000;
  int cross_section_samples = 1000;
};

// Throws ConfigError naming the offending key or line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Canonical "key = value" rendering; parse_config(canonical_config(c)) == c.
std::string canonical_config(const ExperimentConfig& config);
// FNV-1a 64 of the canonical rendering without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace heatbayes
