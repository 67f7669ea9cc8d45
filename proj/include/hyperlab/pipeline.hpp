#pragma once

// Run configuration and the command pipeline behind the hyperlab tool:
// certify -> orbit -> growth -> {density, shadow, hausdorff} -> report.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperlab/density.hpp"

namespace hyperlab {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

/// An upstream artifact is missing or was produced under a different config.
class DependencyError : public std::runtime_error {
 public:
  DependencyError(const std::string& artifact, const std::string& command, const std::string& why);
  std::string command;
};

struct FactorSpec {
  std::string kind = "thin";  // thin, reference, cyclic, trivial, explicit
  double dilation_length = 2.5;
  double length = 3.0;
  std::vector<Moebius> generators;
  std::vector<PairingDisks> disks;

  SchottkyFactor build() const;
};

struct RunConfig {
  FactorSpec factor1;
  FactorSpec factor2;
  Coupling coupling = Coupling::FullProduct;
  PPoint basepoint = base_point();
  std::uint64_t seed = 0;

  double radius = 20.0;
  std::size_t max_atoms = kDefaultMaxAtoms;

  int theta_count = 9;
  std::vector<double> check_thetas{kHalfPi / 3.0, kHalfPi / 2.0, 2.0 * kHalfPi / 3.0};
  std::vector<double> eps_schedule = kDefaultEpsSchedule;
  double factor_radius = 30.0;

  double target_theta = kHalfPi / 2.0;
  std::vector<double> s_schedule = kDefaultSSchedule;
  double tau = kDefaultTau;
  std::vector<double> tau_list{12.0, 24.0, 48.0};
  double rn_offset = 0.5;
  int rn_arcs = 12;
  double off_slope_eps = 0.2;
  int region_probes = 7;
  double region_lo = 0.7;
  double region_hi = 1.3;
  double region_tol = 0.05;
  double density_min_mass = 1e-12;

  double shadow_c = 3.0;
  double shadow_depth_lo = 4.0;
  double shadow_depth_hi = 7.0;
  int shadow_samples = 100;
  double shadow_s = 1.02;

  double cball_c = 1.0;
  double proxy_eps = 0.2;
  double proxy_depth_min = 6.0;
  double scale_k_min = 2.0;
  double scale_k_max = 10.0;
  double scale_k_step = 0.5;
  int cocompact_rays = 50;
  std::optional<double> cocompact_depth;  // R/2 when absent

  // Regression bounds frozen from the first passing run of the default group.
  std::optional<double> rn_bound;
  std::optional<double> shadow_d_hat;

  std::vector<double> thetas() const;
  std::vector<double> scales() const;
  ProductGroup group() const;

  /// Every field with defaults filled in; the basis of the config hash.
  Json to_json() const;
  static RunConfig from_json(const Json& doc);
  static RunConfig load(const std::filesystem::path& path);
};

/// Hex SHA-256 of the canonical serialization of the effective config.
std::string config_hash(const RunConfig& cfg);
const char* tool_version();

/// One artifact per command, written under `out`. Downstream commands read
/// upstream artifacts from disk unless this object produced them itself.
class Pipeline {
 public:
  Pipeline(RunConfig cfg, std::filesystem::path out, int threads = 1);
  ~Pipeline();

  Json certify();
  Json orbit();
  Json growth();
  Json density();
  Json shadow();
  Json hausdorff();
  /// Aggregates the upstream JSON; all_passed is false when any embedded check failed.
  Json report();

  const RunConfig& config() const { return cfg_; }
  const std::filesystem::path& out() const { return out_; }

 private:
  struct State;
  Json header(const char* command) const;
  void write_json(const std::string& name, const Json& doc) const;
  Json read_artifact(const std::string& name, const std::string& command) const;
  const AtomList& atoms();
  const PsiGrid& grid();

  RunConfig cfg_;
  std::filesystem::path out_;
  int threads_;
  std::string hash_;
  std::unique_ptr<State> state_;
};

}  // namespace hyperlab
