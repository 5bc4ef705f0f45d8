#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tei/measures.hpp"
#include "tei/metric.hpp"

namespace tei {

using Json = nlohmann::ordered_json;

struct Instance {
  std::string name;
  FiniteMetricSpace space;
  bool grid = false;
  ProbVector mu;
  std::optional<ProbVector> nu;
  CostProfile profile;
  std::optional<double> truncate;
};

// {"name", "space": {"grid": {a, b, n}} | {"dist", "points"?},
//  "mu"/"nu": {"gaussian": {mean, sigma}} | {"mixture": [{weight, mean, sigma}]} | {"log_polynomial": [c0, c1, ...]}
//             | {"weights", "normalize"?} | {"uniform": true},
//  "cost": {"profile": "square" | "power" | "linear_plus_square", "p"?, "truncate"?}}
Instance parse_instance(const Json& j);
Instance load_instance(const std::filesystem::path& path);
Json instance_summary(const Instance& inst);

struct RunConfig {
  std::string command;
  std::string instance;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  double a = 1.0;
  std::string alpha = "sqrt";
  std::string beta = "sqrt";
  double alpha_q = 1.0;
  double beta_q = 1.0;
  std::optional<double> slack;  // absent: default slack for constants, 0 for minimization
  std::string method = "mirror";
  std::size_t multistarts = 32;
  std::size_t max_iter = 5000;
  std::vector<double> levels;
  std::string slope = "graph";
  double slope_radius = 0.0;  // 0: smallest nonzero distance
  double margin = 0.1;
  double bracket_tol = 0.01;
  std::size_t probes = 64;
  double lambda_o = 1.0;
  std::size_t semiconcave_samples = 16;
  std::optional<double> concentration_a;
  std::optional<double> concentration_b;
  double dual_tol = 1e-4;
  std::size_t ma_stencil = 0;
};

Json to_json(const RunConfig& cfg);
// Strict: unknown keys and wrongly typed values raise InputParse.
RunConfig config_from_json(const Json& j, RunConfig base = {});

Json read_json(const std::filesystem::path& path);
// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

}  // namespace tei
