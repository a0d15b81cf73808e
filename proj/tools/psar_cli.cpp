// Command-line front end: figure data emission, single-point simulation
// and the numerical selftest.

#include "psar/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

int write_output(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return kExitUsage;
  }
  out << content;
  if (!out) {
    std::cerr << "error: failed writing to '" << path << "'\n";
    return kExitUsage;
  }
  return 0;
}

psar::NoiseKind parse_noise(const std::string& name) {
  if (name == "depolarizing") return psar::NoiseKind::Depolarizing;
  if (name == "dephasing") return psar::NoiseKind::Dephasing;
  throw CLI::ValidationError("--noise", "expected depolarizing or dephasing");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy phase-gate storage-and-retrieval simulator"};
  app.require_subcommand(1);

  std::string out_path;
  std::string grid_spec = "0:0.1:1";

  // figure success / figure noise-map
  auto* figure = app.add_subcommand("figure", "Emit figure data as CSV");
  figure->require_subcommand(1);

  std::vector<int> n_list{1, 3, 7, 15};
  auto* fig_success =
      figure->add_subcommand("success", "Success probability vs q");
  fig_success->add_option("--n", n_list, "Numbers of gate uses")
      ->capture_default_str();
  fig_success->add_option("--grid-q", grid_spec, "q grid start:step:end")
      ->capture_default_str();
  fig_success->add_option("--out", out_path, "Output file (default stdout)");

  auto* fig_noise =
      figure->add_subcommand("noise-map", "Noise parameter q' vs q");
  fig_noise->add_option("--grid-q", grid_spec, "q grid start:step:end")
      ->capture_default_str();
  fig_noise->add_option("--out", out_path, "Output file (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run one simulation point");
  psar::harness::SimulateOptions sim;
  std::string noise_name = "depolarizing";
  double phi_degrees = 0.0;
  bool has_phi_degrees = false;
  simulate->add_option("scheme", sim.scheme, "psar | vmc | vq")->required();
  simulate->add_option("--noise", noise_name, "depolarizing | dephasing")
      ->capture_default_str();
  simulate->add_option("--q", sim.q, "Noise parameter in [0,1]")
      ->capture_default_str();
  auto* phi_opt =
      simulate->add_option("--phi", sim.phi, "Phase angle in radians");
  simulate->add_option("--phi-degrees", phi_degrees, "Phase angle in degrees")
      ->excludes(phi_opt)
      ->each([&](const std::string&) { has_phi_degrees = true; });
  simulate->add_option("--n", sim.n, "Number of gate uses (psar, vq)");
  simulate->add_option("--k", sim.k, "Number of correction rounds (vmc)");
  simulate->add_option("--format", sim.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  simulate->add_option("--out", out_path, "Output file (default stdout)");

  // selftest
  auto* selftest =
      app.add_subcommand("selftest", "Run the full invariant sweep");
  bool corrupt = false;
  selftest
      ->add_flag("--corrupt-retrieval", corrupt,
                 "Test hook: perturb the retrieval operator so the "
                 "closed-form check must fail")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  try {
    if (fig_success->parsed())
      return write_output(psar::harness::figure_success_csv(
                              n_list, psar::harness::Grid::parse(grid_spec)),
                          out_path);
    if (fig_noise->parsed())
      return write_output(psar::harness::figure_noise_map_csv(
                              psar::harness::Grid::parse(grid_spec)),
                          out_path);
    if (simulate->parsed()) {
      sim.noise = parse_noise(noise_name);
      if (has_phi_degrees) sim.phi = phi_degrees * std::numbers::pi / 180.0;
      return write_output(psar::harness::simulate_report(sim), out_path);
    }
    if (selftest->parsed())
      return psar::harness::run_selftest(std::cout, {corrupt});
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical check failed: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
