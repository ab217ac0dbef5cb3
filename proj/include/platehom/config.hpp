#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "platehom/chart.hpp"
#include "platehom/material.hpp"
#include "platehom/quadrature.hpp"

namespace platehom {

struct MaterialConfig {
  std::string type;  // "laminate" | "grid" | "random_grid"
  std::vector<double> coeffs;  // laminate
  int axis = 1;                // laminate
  int n = 1;                   // grid / random_grid
  std::vector<Mat3> cells;     // grid
  std::uint64_t seed = 0;      // random_grid
  std::optional<double> alpha_ell;

  PeriodicQuadraticForm build() const;
};

struct RunSection {
  std::string command;  // cell | classify | energy | recover | twoscale
  std::vector<double> eps{0.125, 0.0625, 0.03125, 0.015625};
  Eigen::Vector2i k{1, 0};
  QuadratureSpec quad;
  std::string out_dir = ".";
  int threads = 1;
  std::uint64_t seed = 0;
  bool mesh = false;
  std::optional<Direction> direction;  // for the `cell` command
};

struct RunConfig {
  MaterialConfig material;
  std::optional<ChartSpec> chart;
  RunSection run;

  bool operator==(const RunConfig& o) const;
};

/// Parse and validate a JSON-shaped config; builds the chart once to run the
/// full validation set. Throws Error with kind ParseError or ValidationError
/// carrying the offending path.
RunConfig parse_config(const std::string& text);

/// Full round-trippable JSON text with every default filled in.
std::string serialize_config(const RunConfig& config);

/// FNV-1a hash (hex) of a serialized config section, for output metadata.
std::string section_hash(const std::string& serialized);

struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<int> quad_nodes;
  std::optional<double> richardson_tol;
  bool mesh = false;
};

/// Execute the configured command, writing CSV (and optional mesh) outputs
/// into the output directory. Returns the paths written.
std::vector<std::string> run(const RunConfig& config, const CliOverrides& overrides = {});

}  // namespace platehom
