#pragma once

#include "psar/channel.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace psar::harness {

/// Inclusive arithmetic grid, parsed from "start:step:end".
struct Grid {
  double start = 0.0;
  double step = 0.1;
  double end = 1.0;

  static Grid parse(const std::string& spec);
  std::vector<double> points() const;
};

/// One number, 12 significant digits, '.' decimal separator.
std::string format_number(double value);

/// Success-probability curves (Fig. 3 data): one depolarizing and one
/// dephasing column per n. Depolarizing closed-form values are
/// cross-checked against full retrieval for n <= 4; a mismatch throws.
std::string figure_success_csv(const std::vector<int>& n_list,
                               const Grid& q_grid);

/// Noise map q -> q' (Fig. 4 data).
std::string figure_noise_map_csv(const Grid& q_grid);

struct SimulateOptions {
  std::string scheme;  // psar | vmc | vq
  NoiseKind noise = NoiseKind::Depolarizing;
  double q = 1.0;
  double phi = 0.0;  // radians
  int n = 0;         // psar / vq
  int k = 0;         // vmc
  std::string format = "json";  // json | csv
};

/// Runs one simulation and renders the report. Throws
/// std::invalid_argument on invalid parameter combinations.
std::string simulate_report(const SimulateOptions& opts);

struct SelftestOptions {
  /// Test hook: perturb one entry of the retrieval operator before the
  /// closed-form agreement check, to demonstrate that the check bites.
  bool corrupt_retrieval = false;
};

/// Runs the full invariant sweep and prints one line per check with the
/// maximum observed deviation. Returns 0 when all checks pass, 2 otherwise.
int run_selftest(std::ostream& out, const SelftestOptions& opts = {});

}  // namespace psar::harness
