// hyperlab: run the orbit / growth / density / shadow / hausdorff pipeline
// from a JSON config. Exit status: 0 ok, 2 invalid config, 3 missing upstream
// artifact, 4 failed acceptance check, 1 anything else.

#include <iostream>

#include "CLI11.hpp"

#include "hyperlab/pipeline.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDependency = 3;
constexpr int kExitAcceptance = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbit growth, Patterson-Sullivan densities and limit-set dimension for products of two "
               "hyperbolic planes"};
  app.set_version_flag("--version", std::string(hyperlab::tool_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--threads", threads, "Worker threads for orbit enumeration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  const std::vector<std::pair<const char*, const char*>> commands{
      {"certify", "Check the ping-pong certificate of both factors"},
      {"orbit", "Enumerate the orbit ball and write orbit.csv"},
      {"growth", "Growth exponents, the Psi grid and the product identity (growth.json, psi_grid.json)"},
      {"density", "Region of convergence and finite densities along the s schedule"},
      {"shadow", "Shadow lemma statistic over sampled orbit points"},
      {"hausdorff", "Covering-number dimension of the radial limit set at the target slope"},
      {"report", "Aggregate all stage outputs; fails when any embedded check failed"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    hyperlab::RunConfig cfg = hyperlab::RunConfig::load(config_path);
    if (seed) cfg.seed = *seed;
    hyperlab::Pipeline pipe(cfg, out_dir, threads);

    if (command == "certify") {
      const auto doc = pipe.certify();
      if (!doc["passed"].get<bool>()) {
        std::cerr << "hyperlab: group failed the ping-pong certificate (see certificate.json)\n";
        return kExitValidation;
      }
    } else if (command == "orbit") {
      const auto doc = pipe.orbit();
      std::cout << "orbit: " << doc["atoms"] << " atoms within radius " << doc["radius"] << "\n";
      return 0;
    } else if (command == "growth") {
      pipe.growth();
    } else if (command == "density") {
      pipe.density();
    } else if (command == "shadow") {
      pipe.shadow();
    } else if (command == "hausdorff") {
      pipe.hausdorff();
    } else {
      const auto doc = pipe.report();
      for (const auto& c : doc["checks"]) {
        std::cout << (c["passed"].get<bool>() ? "pass  " : "FAIL  ") << c["stage"].get<std::string>() << "/"
                  << c["name"].get<std::string>() << "\n";
      }
      if (!doc["all_passed"].get<bool>()) return kExitAcceptance;
      return 0;
    }
    std::cout << command << ": wrote " << pipe.out().string() << "\n";
    return 0;
  } catch (const hyperlab::ConfigError& e) {
    std::cerr << "hyperlab: " << e.what() << "\n";
    return kExitValidation;
  } catch (const hyperlab::DependencyError& e) {
    std::cerr << "hyperlab: " << e.what() << "\n";
    return kExitDependency;
  } catch (const std::exception& e) {
    std::cerr << "hyperlab " << command << ": " << e.what() << "\n";
    return kExitError;
  }
}
