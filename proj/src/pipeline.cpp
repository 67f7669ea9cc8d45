#include "hyperlab/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "hyperlab/hausdorff.hpp"
#include "hyperlab/shadows.hpp"

#ifndef HYPERLAB_VERSION
#define HYPERLAB_VERSION "0.0.0"
#endif

namespace hyperlab {

namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += "\n  " + p;
  return out;
}

std::string num(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

// Shortest round-trip form, for file names.
std::string short_num(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------- config parsing

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  // Returns the sub-object `key` of `obj` (null when absent) and flags keys not in `allowed`.
  const Json* section(const Json& obj, const std::string& path,
                      std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      problems_.push_back(path + ": expected an object");
      return nullptr;
    }
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
        problems_.push_back(path + "." + k + ": unknown field");
      }
    }
    return &obj;
  }

  void real(const Json& obj, const std::string& path, const char* key, double& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj[key];
    if (!v.is_number()) {
      problems_.push_back(path + "." + key + ": expected a number");
      return;
    }
    out = v.get<double>();
  }

  void real(const Json& obj, const std::string& path, const char* key, std::optional<double>& out) {
    if (!obj.contains(key) || obj[key].is_null()) return;
    double v = 0.0;
    const std::size_t before = problems_.size();
    real(obj, path, key, v);
    if (problems_.size() == before) out = v;
  }

  template <class Int>
  void integer(const Json& obj, const std::string& path, const char* key, Int& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj[key];
    if (!v.is_number_integer() || (std::is_unsigned_v<Int> && v.is_number_integer() &&
                                   !v.is_number_unsigned() && v.get<long long>() < 0)) {
      problems_.push_back(path + "." + key + ": expected " +
                          (std::is_unsigned_v<Int> ? "a non-negative integer" : "an integer"));
      return;
    }
    out = v.get<Int>();
  }

  void reals(const Json& obj, const std::string& path, const char* key, std::vector<double>& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj[key];
    if (!v.is_array() || std::any_of(v.begin(), v.end(), [](const Json& e) { return !e.is_number(); })) {
      problems_.push_back(path + "." + key + ": expected a list of numbers");
      return;
    }
    out.clear();
    for (const auto& e : v) out.push_back(e.get<double>());
  }

  void pair(const Json& obj, const std::string& path, const char* key, double& lo, double& hi) {
    if (!obj.contains(key)) return;
    std::vector<double> v;
    const std::size_t before = problems_.size();
    reals(obj, path, key, v);
    if (problems_.size() != before) return;
    if (v.size() != 2) {
      problems_.push_back(path + "." + key + ": expected two numbers");
      return;
    }
    lo = v[0];
    hi = v[1];
  }

  void require(bool ok, const std::string& message) {
    if (!ok) problems_.push_back(message);
  }

 private:
  std::vector<std::string>& problems_;
};

Disk read_disk(Reader& rd, const Json& j, const std::string& path) {
  Disk d;
  if (!rd.section(j, path, {"center", "radius", "exterior"})) return d;
  rd.real(j, path, "center", d.center);
  rd.real(j, path, "radius", d.radius);
  if (j.contains("exterior")) {
    if (j["exterior"].is_boolean()) {
      d.exterior = j["exterior"].get<bool>();
    } else {
      rd.require(false, path + ".exterior: expected true or false");
    }
  }
  rd.require(d.radius > 0.0, path + ".radius: must be positive");
  return d;
}

FactorSpec read_factor(Reader& rd, const Json& j, const std::string& path) {
  FactorSpec f;
  if (!rd.section(j, path, {"kind", "dilation_length", "length", "generators", "disks"})) return f;
  if (j.contains("kind")) {
    if (j["kind"].is_string()) {
      f.kind = j["kind"].get<std::string>();
    } else {
      rd.require(false, path + ".kind: expected a string");
    }
  }
  static const std::vector<std::string> kinds{"thin", "reference", "cyclic", "trivial", "explicit"};
  if (std::find(kinds.begin(), kinds.end(), f.kind) == kinds.end()) {
    rd.require(false, path + ".kind: must be one of thin, reference, cyclic, trivial, explicit");
    return f;
  }
  if (f.kind == "thin") {
    rd.real(j, path, "dilation_length", f.dilation_length);
    rd.real(j, path, "length", f.length);
    rd.require(f.dilation_length > 0.0, path + ".dilation_length: must be positive");
    rd.require(f.length > 0.0, path + ".length: must be positive");
  }
  if (f.kind != "explicit") return f;

  const Json gens = j.value("generators", Json::array());
  const Json disks = j.value("disks", Json::array());
  rd.require(gens.is_array() && !gens.empty(), path + ".generators: expected a non-empty list");
  rd.require(disks.is_array(), path + ".disks: expected a list");
  if (!gens.is_array() || !disks.is_array()) return f;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string gp = path + ".generators[" + std::to_string(i) + "]";
    const Json& g = gens[i];
    if (!g.is_array() || g.size() != 4 ||
        std::any_of(g.begin(), g.end(), [](const Json& e) { return !e.is_number(); })) {
      rd.require(false, gp + ": expected [a, b, c, d]");
      continue;
    }
    const double a = g[0], b = g[1], c = g[2], d = g[3];
    if (!(a * d - b * c > 0.0)) {
      rd.require(false, gp + ": determinant must be positive");
      continue;
    }
    f.generators.emplace_back(a, b, c, d);
  }
  rd.require(disks.size() == gens.size(), path + ".disks: need one pair per generator");
  for (std::size_t i = 0; i < disks.size(); ++i) {
    const std::string dp = path + ".disks[" + std::to_string(i) + "]";
    if (!rd.section(disks[i], dp, {"attracting", "repelling"})) continue;
    PairingDisks pd;
    if (disks[i].contains("attracting")) pd.attracting = read_disk(rd, disks[i]["attracting"], dp + ".attracting");
    else rd.require(false, dp + ".attracting: missing");
    if (disks[i].contains("repelling")) pd.repelling = read_disk(rd, disks[i]["repelling"], dp + ".repelling");
    else rd.require(false, dp + ".repelling: missing");
    f.disks.push_back(pd);
  }
  return f;
}

Json factor_json(const FactorSpec& f) {
  Json j;
  j["kind"] = f.kind;
  if (f.kind == "thin") {
    j["dilation_length"] = f.dilation_length;
    j["length"] = f.length;
  }
  if (f.kind == "explicit") {
    j["generators"] = Json::array();
    for (const auto& m : f.generators) j["generators"].push_back({m.a(), m.b(), m.c(), m.d()});
    j["disks"] = Json::array();
    const auto disk = [](const Disk& d) {
      return Json{{"center", d.center}, {"radius", d.radius}, {"exterior", d.exterior}};
    };
    for (const auto& p : f.disks) {
      j["disks"].push_back({{"attracting", disk(p.attracting)}, {"repelling", disk(p.repelling)}});
    }
  }
  return j;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

// ---------------------------------------------------------------- serialization helpers

Json estimate_json(const GrowthEstimate& e) {
  Json counts = Json::array();
  for (std::size_t n = 0; n < e.counts.size(); ++n) counts.push_back({n + 1, e.counts[n]});
  Json trace = Json::array();
  for (const auto& t : e.eps_trace) trace.push_back({{"eps", t[0]}, {"value", t[1]}, {"stderr", t[2]}});
  return {{"theta", e.theta},
          {"eps", e.eps},
          {"window", {{"n_min", e.window.n_min}, {"n_max", e.window.n_max}}},
          {"value", e.value},
          {"stderr", e.stderr_},
          {"counts", counts},
          {"eps_trace", trace},
          {"flags", e.flags},
          {"low_confidence", e.low_confidence}};
}

Json check(const std::string& name, double value, double bound, bool passed) {
  return {{"name", name}, {"passed", passed}, {"value", value}, {"bound", bound}};
}

// value <= bound
Json check_le(const std::string& name, double value, double bound) {
  return check(name, value, bound, value <= bound);
}

int degrees(double theta) { return static_cast<int>(std::lround(theta * 180.0 / std::numbers::pi)); }

PPoint offset_point(const PPoint& o, double t) {
  const double k = std::exp(t);
  return {HPoint{o.p1.re(), o.p1.im() * k}, HPoint{o.p2.re(), o.p2.im() * k}};
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (n > count) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng() % (n - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
  }
  return pool;
}

}  // namespace

// ---------------------------------------------------------------- errors

ConfigError::ConfigError(std::vector<std::string> p)
    : std::runtime_error("invalid config:" + join(p)), problems(std::move(p)) {}

DependencyError::DependencyError(const std::string& artifact, const std::string& cmd,
                                 const std::string& why)
    : std::runtime_error(artifact + " " + why + "; run `hyperlab " + cmd + "` first"), command(cmd) {}

// ---------------------------------------------------------------- config

SchottkyFactor FactorSpec::build() const {
  if (kind == "thin") return thin_factor(dilation_length, length);
  if (kind == "reference") return reference_factor();
  if (kind == "cyclic") return cyclic_factor();
  if (kind == "trivial") return trivial_factor();
  return SchottkyFactor{generators, disks};
}

std::vector<double> RunConfig::thetas() const { return interior_thetas(theta_count); }

std::vector<double> RunConfig::scales() const {
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double k = scale_k_min + i * scale_k_step;
    if (k > scale_k_max + 1e-9) break;
    out.push_back(std::exp(-k));
  }
  return out;
}

ProductGroup RunConfig::group() const { return {factor1.build(), factor2.build(), coupling}; }

RunConfig RunConfig::from_json(const Json& doc) {
  std::vector<std::string> problems;
  Reader rd(problems);
  RunConfig c;
  if (!rd.section(doc, "config", {"seed", "group", "basepoint", "orbit", "growth", "density", "shadow",
                                  "hausdorff", "regression"})) {
    throw ConfigError(problems);
  }

  if (!doc.contains("seed")) problems.push_back("seed: required");
  rd.integer(doc, "config", "seed", c.seed);

  if (!doc.contains("group")) {
    problems.push_back("group: required");
  } else if (const Json* g = rd.section(doc["group"], "group", {"coupling", "factor1", "factor2"})) {
    if (g->contains("coupling")) {
      const Json& cp = (*g)["coupling"];
      if (cp == "full_product") c.coupling = Coupling::FullProduct;
      else if (cp == "diagonal") c.coupling = Coupling::Diagonal;
      else problems.push_back("group.coupling: must be full_product or diagonal");
    }
    for (const char* key : {"factor1", "factor2"}) {
      if (!g->contains(key)) {
        problems.push_back(std::string("group.") + key + ": required");
        continue;
      }
      FactorSpec f = read_factor(rd, (*g)[key], std::string("group.") + key);
      (std::string(key) == "factor1" ? c.factor1 : c.factor2) = f;
    }
    if (c.coupling == Coupling::Diagonal) {
      try {
        rd.require(c.factor1.build().rank() == c.factor2.build().rank(),
                   "group.coupling: diagonal coupling needs factors of equal rank");
      } catch (const std::exception&) {
      }
    }
  }

  if (doc.contains("basepoint")) {
    if (const Json* b = rd.section(doc["basepoint"], "basepoint", {"p1", "p2"})) {
      double r1 = 0.0, i1 = 1.0, r2 = 0.0, i2 = 1.0;
      rd.pair(*b, "basepoint", "p1", r1, i1);
      rd.pair(*b, "basepoint", "p2", r2, i2);
      if (i1 > 0.0 && i2 > 0.0) {
        c.basepoint = {HPoint{r1, i1}, HPoint{r2, i2}};
      } else {
        problems.push_back("basepoint: imaginary parts must be positive");
      }
    }
  }

  if (doc.contains("orbit")) {
    if (const Json* s = rd.section(doc["orbit"], "orbit", {"radius", "max_atoms"})) {
      rd.real(*s, "orbit", "radius", c.radius);
      rd.integer(*s, "orbit", "max_atoms", c.max_atoms);
    }
  }
  rd.require(c.radius > 0.0, "orbit.radius: must be positive");
  rd.require(c.max_atoms > 0, "orbit.max_atoms: must be positive");

  if (doc.contains("growth")) {
    if (const Json* s = rd.section(doc["growth"], "growth",
                                   {"theta_count", "check_thetas", "eps_schedule", "factor_radius"})) {
      rd.integer(*s, "growth", "theta_count", c.theta_count);
      rd.reals(*s, "growth", "check_thetas", c.check_thetas);
      rd.reals(*s, "growth", "eps_schedule", c.eps_schedule);
      rd.real(*s, "growth", "factor_radius", c.factor_radius);
    }
  }
  rd.require(c.theta_count >= 3, "growth.theta_count: need at least 3 slopes");
  rd.require(std::all_of(c.check_thetas.begin(), c.check_thetas.end(),
                         [](double t) { return t > 0.0 && t < kHalfPi; }),
             "growth.check_thetas: slopes must lie in (0, pi/2)");
  rd.require(!c.eps_schedule.empty() && strictly_decreasing(c.eps_schedule) &&
                 c.eps_schedule.back() > 0.0,
             "growth.eps_schedule: need positive, strictly decreasing values");
  rd.require(c.factor_radius > 0.0, "growth.factor_radius: must be positive");

  if (doc.contains("density")) {
    if (const Json* s = rd.section(
            doc["density"], "density",
            {"target_theta", "s_schedule", "tau", "tau_list", "rn_offset", "rn_arcs", "off_slope_eps",
             "region_probes", "region_range", "region_tol", "min_mass"})) {
      rd.real(*s, "density", "target_theta", c.target_theta);
      rd.reals(*s, "density", "s_schedule", c.s_schedule);
      rd.real(*s, "density", "tau", c.tau);
      rd.reals(*s, "density", "tau_list", c.tau_list);
      rd.real(*s, "density", "rn_offset", c.rn_offset);
      rd.integer(*s, "density", "rn_arcs", c.rn_arcs);
      rd.real(*s, "density", "off_slope_eps", c.off_slope_eps);
      rd.integer(*s, "density", "region_probes", c.region_probes);
      rd.pair(*s, "density", "region_range", c.region_lo, c.region_hi);
      rd.real(*s, "density", "region_tol", c.region_tol);
      rd.real(*s, "density", "min_mass", c.density_min_mass);
    }
  }
  rd.require(c.target_theta > 0.0 && c.target_theta < kHalfPi,
             "density.target_theta: must lie in (0, pi/2)");
  rd.require(!c.s_schedule.empty() && strictly_decreasing(c.s_schedule) && c.s_schedule.back() > 1.0,
             "density.s_schedule: need strictly decreasing values above 1");
  rd.require(c.tau >= 0.0, "density.tau: must be non-negative");
  rd.require(!c.tau_list.empty() && c.tau_list.front() >= 0.0 &&
                 std::is_sorted(c.tau_list.begin(), c.tau_list.end()) &&
                 std::adjacent_find(c.tau_list.begin(), c.tau_list.end()) == c.tau_list.end(),
             "density.tau_list: need non-negative, strictly increasing values");
  rd.require(c.rn_offset >= 0.0, "density.rn_offset: must be non-negative");
  rd.require(c.rn_arcs >= 2, "density.rn_arcs: need at least 2 arcs");
  rd.require(c.off_slope_eps > 0.0, "density.off_slope_eps: must be positive");
  rd.require(c.region_probes >= 2, "density.region_probes: need at least 2 probes per axis");
  rd.require(c.region_lo > 0.0 && c.region_lo < c.region_hi,
             "density.region_range: need 0 < low < high");
  rd.require(c.region_tol > 0.0, "density.region_tol: must be positive");
  rd.require(c.density_min_mass >= 0.0, "density.min_mass: must be non-negative");

  if (doc.contains("shadow")) {
    if (const Json* s = rd.section(doc["shadow"], "shadow", {"c", "depths", "samples", "s"})) {
      rd.real(*s, "shadow", "c", c.shadow_c);
      rd.pair(*s, "shadow", "depths", c.shadow_depth_lo, c.shadow_depth_hi);
      rd.integer(*s, "shadow", "samples", c.shadow_samples);
      rd.real(*s, "shadow", "s", c.shadow_s);
    }
  }
  rd.require(c.shadow_c > 0.0, "shadow.c: must be positive");
  rd.require(c.shadow_depth_lo > c.shadow_c && c.shadow_depth_lo < c.shadow_depth_hi,
             "shadow.depths: need c < low < high");
  rd.require(c.shadow_samples >= 1, "shadow.samples: must be positive");
  rd.require(c.shadow_s > 1.0, "shadow.s: must exceed 1");

  if (doc.contains("hausdorff")) {
    if (const Json* s = rd.section(doc["hausdorff"], "hausdorff",
                                   {"c", "eps", "depth_min", "scales", "cocompact_rays",
                                    "cocompact_depth"})) {
      rd.real(*s, "hausdorff", "c", c.cball_c);
      rd.real(*s, "hausdorff", "eps", c.proxy_eps);
      rd.real(*s, "hausdorff", "depth_min", c.proxy_depth_min);
      if (s->contains("scales")) {
        if (const Json* k = rd.section((*s)["scales"], "hausdorff.scales", {"k_min", "k_max", "k_step"})) {
          rd.real(*k, "hausdorff.scales", "k_min", c.scale_k_min);
          rd.real(*k, "hausdorff.scales", "k_max", c.scale_k_max);
          rd.real(*k, "hausdorff.scales", "k_step", c.scale_k_step);
        }
      }
      rd.integer(*s, "hausdorff", "cocompact_rays", c.cocompact_rays);
      rd.real(*s, "hausdorff", "cocompact_depth", c.cocompact_depth);
    }
  }
  rd.require(c.cball_c > 0.0, "hausdorff.c: must be positive");
  rd.require(c.proxy_eps > 0.0, "hausdorff.eps: must be positive");
  rd.require(c.proxy_depth_min >= 0.0, "hausdorff.depth_min: must be non-negative");
  rd.require(c.scale_k_step > 0.0, "hausdorff.scales.k_step: must be positive");
  rd.require(c.scale_k_min > c.cball_c, "hausdorff.scales.k_min: must exceed c (r < e^-c)");
  rd.require(c.scale_k_step > 0.0 && c.scale_k_max >= c.scale_k_min + 3.0 * c.scale_k_step - 1e-9,
             "hausdorff.scales: need at least 4 scales");
  rd.require(c.cocompact_rays >= 1, "hausdorff.cocompact_rays: must be positive");
  rd.require(!c.cocompact_depth || *c.cocompact_depth > 0.0,
             "hausdorff.cocompact_depth: must be positive");

  if (doc.contains("regression")) {
    if (const Json* s = rd.section(doc["regression"], "regression", {"rn_bound", "shadow_d_hat"})) {
      rd.real(*s, "regression", "rn_bound", c.rn_bound);
      rd.real(*s, "regression", "shadow_d_hat", c.shadow_d_hat);
    }
  }
  rd.require(!c.rn_bound || *c.rn_bound > 0.0, "regression.rn_bound: must be positive");
  rd.require(!c.shadow_d_hat || *c.shadow_d_hat >= 1.0, "regression.shadow_d_hat: must be at least 1");

  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open"});
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return from_json(doc);
}

Json RunConfig::to_json() const {
  const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return {
      {"seed", seed},
      {"group",
       {{"coupling", coupling == Coupling::FullProduct ? "full_product" : "diagonal"},
        {"factor1", factor_json(factor1)},
        {"factor2", factor_json(factor2)}}},
      {"basepoint",
       {{"p1", {basepoint.p1.re(), basepoint.p1.im()}}, {"p2", {basepoint.p2.re(), basepoint.p2.im()}}}},
      {"orbit", {{"radius", radius}, {"max_atoms", max_atoms}}},
      {"growth",
       {{"theta_count", theta_count},
        {"check_thetas", check_thetas},
        {"eps_schedule", eps_schedule},
        {"factor_radius", factor_radius}}},
      {"density",
       {{"target_theta", target_theta},
        {"s_schedule", s_schedule},
        {"tau", tau},
        {"tau_list", tau_list},
        {"rn_offset", rn_offset},
        {"rn_arcs", rn_arcs},
        {"off_slope_eps", off_slope_eps},
        {"region_probes", region_probes},
        {"region_range", {region_lo, region_hi}},
        {"region_tol", region_tol},
        {"min_mass", density_min_mass}}},
      {"shadow",
       {{"c", shadow_c},
        {"depths", {shadow_depth_lo, shadow_depth_hi}},
        {"samples", shadow_samples},
        {"s", shadow_s}}},
      {"hausdorff",
       {{"c", cball_c},
        {"eps", proxy_eps},
        {"depth_min", proxy_depth_min},
        {"scales", {{"k_min", scale_k_min}, {"k_max", scale_k_max}, {"k_step", scale_k_step}}},
        {"cocompact_rays", cocompact_rays},
        {"cocompact_depth", opt(cocompact_depth)}}},
      {"regression", {{"rn_bound", opt(rn_bound)}, {"shadow_d_hat", opt(shadow_d_hat)}}},
  };
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = cfg.to_json().dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

const char* tool_version() { return HYPERLAB_VERSION; }

// ---------------------------------------------------------------- pipeline

struct Pipeline::State {
  AtomList atoms;
  std::optional<PsiGrid> grid;
};

Pipeline::Pipeline(RunConfig cfg, fs::path out, int threads)
    : cfg_(std::move(cfg)),
      out_(std::move(out)),
      threads_(std::max(1, threads)),
      hash_(config_hash(cfg_)),
      state_(std::make_unique<State>()) {
  fs::create_directories(out_);
}

Pipeline::~Pipeline() = default;

Json Pipeline::header(const char* command) const {
  return {{"tool", "hyperlab"}, {"version", tool_version()}, {"command", command}, {"config_hash", hash_}};
}

void Pipeline::write_json(const std::string& name, const Json& doc) const {
  std::ofstream f(out_ / name);
  f << doc.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write " + (out_ / name).string());
}

Json Pipeline::read_artifact(const std::string& name, const std::string& command) const {
  const fs::path p = out_ / name;
  if (!fs::exists(p)) throw DependencyError(name, command, "is missing");
  std::ifstream in(p);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error&) {
    throw DependencyError(name, command, "is unreadable");
  }
  if (doc.value("config_hash", "") != hash_) {
    throw DependencyError(name, command, "was produced under a different config");
  }
  return doc;
}

const AtomList& Pipeline::atoms() {
  if (!state_->atoms) {
    read_artifact("orbit.json", "orbit");
    const fs::path p = out_ / "orbit.csv";
    if (!fs::exists(p)) throw DependencyError("orbit.csv", "orbit", "is missing");
    state_->atoms = std::make_shared<const std::vector<OrbitAtom>>(load_orbit(p));
  }
  return state_->atoms;
}

const PsiGrid& Pipeline::grid() {
  if (!state_->grid) {
    const Json doc = read_artifact("psi_grid.json", "growth");
    state_->grid = make_grid(doc["thetas"].get<std::vector<double>>(),
                             doc["deltas"].get<std::vector<double>>(),
                             doc["stderrs"].get<std::vector<double>>());
  }
  return *state_->grid;
}

Json Pipeline::certify() {
  const CertificateReport rep = hyperlab::certify(cfg_.group());
  Json doc = header("certify");
  doc["passed"] = rep.passed();
  doc["checks"] = Json::array();
  for (const auto& c : rep.checks) {
    doc["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"witness", c.witness}});
  }
  write_json("certificate.json", doc);
  return doc;
}

Json Pipeline::orbit() {
  const ProductGroup group = cfg_.group();
  const CertificateReport cert = hyperlab::certify(group);
  if (!cert.passed()) {
    std::vector<std::string> failed;
    for (const auto& c : cert.checks) {
      if (!c.passed) failed.push_back("group: ping-pong check failed: " + c.name + " (" + c.witness + ")");
    }
    throw ConfigError(failed);
  }
  std::vector<OrbitAtom> list;
  try {
    list = orbit_ball(group, cfg_.basepoint, cfg_.radius, cfg_.max_atoms, threads_);
  } catch (const AtomBudgetExceeded& e) {
    throw ConfigError({std::string("orbit.max_atoms: ") + e.what()});
  }
  save_orbit(list, out_ / "orbit.csv");
  Json doc = header("orbit");
  doc["file"] = "orbit.csv";
  doc["radius"] = cfg_.radius;
  doc["atoms"] = list.size();
  doc["max_dist"] = list.empty() ? 0.0 : list.back().dist;
  state_->atoms = std::make_shared<const std::vector<OrbitAtom>>(std::move(list));
  write_json("orbit.json", doc);
  return doc;
}

Json Pipeline::growth() {
  const auto& list = *atoms();
  const double R = cfg_.radius;
  const Window window = default_window(R);

  const PsiGrid g = psi_grid(list, R, cfg_.thetas(), cfg_.eps_schedule, window);
  state_->grid = g;
  Json gdoc = header("growth");
  gdoc["thetas"] = g.thetas;
  gdoc["deltas"] = g.deltas;
  gdoc["stderrs"] = g.stderrs;
  gdoc["theta_star"] = g.theta_star;
  gdoc["delta_gamma"] = g.delta_gamma;
  gdoc["estimates"] = Json::array();
  for (const auto& e : g.estimates) gdoc["estimates"].push_back(estimate_json(e));
  write_json("psi_grid.json", gdoc);

  Json doc = header("growth");
  doc["radius"] = R;
  doc["window"] = {{"n_min", window.n_min}, {"n_max", window.n_max}};
  const GrowthEstimate crit = estimate_critical_exponent(list, R, window);
  doc["critical_exponent"] = estimate_json(crit);

  Json checks = Json::array();
  const double step = kHalfPi / (cfg_.theta_count + 1);
  std::vector<std::string> concavity;
  for (const auto& v : concavity_check(g)) {
    concavity.push_back("index " + std::to_string(v.index) + " excess " + num(v.excess) +
                        " allowance " + num(v.allowance));
  }
  doc["concavity_violations"] = concavity;
  checks.push_back(check_le("psi_concavity", static_cast<double>(concavity.size()), 0.0));

  // Factor-only counting gives independent estimates of the factor exponents.
  std::optional<GrowthEstimate> fe[2];
  const PPoint& o = cfg_.basepoint;
  Json factors = Json::array();
  const SchottkyFactor f1 = cfg_.factor1.build(), f2 = cfg_.factor2.build();
  for (int i = 0; i < 2; ++i) {
    const auto ball = factor_ball(i == 0 ? f1 : f2, i == 0 ? o.p1 : o.p2, cfg_.factor_radius,
                                  cfg_.max_atoms);
    Json fj{{"factor", i + 1}, {"radius", cfg_.factor_radius}, {"atoms", ball.size()}};
    try {
      fe[i] = estimate_factor_exponent(ball, cfg_.factor_radius, default_window(cfg_.factor_radius));
      fj["estimate"] = estimate_json(*fe[i]);
    } catch (const InsufficientData& e) {
      fj["estimate"] = nullptr;
      fj["error"] = e.what();
    }
    factors.push_back(fj);
  }
  doc["factors"] = factors;

  Json slopes = Json::array();
  Json identity = Json::array();
  const bool product_form = cfg_.coupling == Coupling::FullProduct && fe[0] && fe[1];
  for (double theta : cfg_.check_thetas) {
    const GrowthEstimate e = estimate_delta_theta(list, R, Slope{theta}, cfg_.eps_schedule, window);
    slopes.push_back(estimate_json(e));
    if (!product_form) continue;
    const double d1 = fe[0]->value, d2 = fe[1]->value;
    const double predicted = d1 * std::cos(theta) + d2 * std::sin(theta);
    const double combined = std::sqrt(e.stderr_ * e.stderr_ +
                                      std::pow(std::cos(theta) * fe[0]->stderr_, 2) +
                                      std::pow(std::sin(theta) * fe[1]->stderr_, 2));
    const double tol = std::max(0.08, 3.0 * combined);
    const double diff = std::abs(e.value - predicted);
    identity.push_back({{"theta", theta},
                        {"measured", e.value},
                        {"predicted", predicted},
                        {"diff", diff},
                        {"combined_stderr", combined},
                        {"tolerance", tol}});
    checks.push_back(check_le("product_growth_identity_" + std::to_string(degrees(theta)) + "deg",
                              diff, tol));
  }
  doc["check_slopes"] = slopes;

  if (product_form) {
    const double d1 = fe[0]->value, d2 = fe[1]->value;
    const double predicted = std::hypot(d1, d2);
    const double theta_pred = std::atan2(d2, d1);
    doc["product_identity"] = {
        {"delta1", d1},
        {"delta1_stderr", fe[0]->stderr_},
        {"delta2", d2},
        {"delta2_stderr", fe[1]->stderr_},
        {"slopes", identity},
        {"critical_measured", crit.value},
        {"critical_predicted", predicted},
        {"critical_diff", std::abs(crit.value - predicted)},
        {"theta_star_measured", g.theta_star},
        {"theta_star_predicted", theta_pred},
        {"theta_star_diff", std::abs(g.theta_star - theta_pred)},
        {"grid_step", step},
    };
    checks.push_back(check_le("critical_exponent_identity", std::abs(crit.value - predicted), 0.08));
    checks.push_back(check_le("theta_star_identity", std::abs(g.theta_star - theta_pred), step + 1e-9));
  }
  doc["checks"] = checks;
  write_json("growth.json", doc);
  return doc;
}

namespace {

struct TargetSlope {
  GrowthEstimate estimate;
  SupportingLine line;
};

TargetSlope target_slope(const std::vector<OrbitAtom>& list, const PsiGrid& grid, const RunConfig& cfg) {
  const Slope theta{cfg.target_theta};
  return {estimate_delta_theta(list, cfg.radius, theta, cfg.eps_schedule, default_window(cfg.radius)),
          supporting_line(grid, theta)};
}

Json line_json(const TargetSlope& t) {
  return {{"b", {t.line.b.b1, t.line.b.b2}},
          {"envelope_delta", t.line.envelope_delta},
          {"grid_delta", t.line.grid_delta},
          {"slack", t.line.slack},
          {"delta_theta", t.estimate.value},
          {"delta_theta_stderr", t.estimate.stderr_}};
}

void write_density_csv(const FiniteDensity& mu, double min_mass, const fs::path& path,
                       std::size_t& written, double& omitted_mass) {
  std::ofstream f(path);
  f << "word1,word2,dist,theta,weight,mass\n";
  written = 0;
  omitted_mass = 0.0;
  const auto& list = *mu.atoms;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const double m = mu.mass(i);
    if (m == 0.0) continue;
    if (m < min_mass) {
      omitted_mass += m;
      continue;
    }
    f << list[i].word1.to_string() << ',' << list[i].word2.to_string() << ',' << num(list[i].dist) << ','
      << num(list[i].slope.value()) << ',' << num(mu.weights[i]) << ',' << num(m) << '\n';
    ++written;
  }
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

Json Pipeline::density() {
  const AtomList list = atoms();
  const PsiGrid& g = grid();
  const RunConfig& c = cfg_;
  const double R = c.radius;
  const Slope theta{c.target_theta};
  const TargetSlope t = target_slope(*list, g, c);
  const BVector bhat = t.line.b;

  Json doc = header("density");
  doc["theta"] = c.target_theta;
  doc["supporting_line"] = line_json(t);
  Json checks = Json::array();

  const double tol_cd = std::max(0.08, 3.0 * t.estimate.stderr_);
  const double cd_diff = std::abs(bhat.along(theta) - t.estimate.value);
  checks.push_back(check_le("supporting_line_matches_growth", cd_diff, tol_cd));
  const double max_err = *std::max_element(g.stderrs.begin(), g.stderrs.end());
  checks.push_back(check_le("supporting_line_above_grid",
                            std::max(0.0, t.line.grid_delta - t.line.envelope_delta), 2.0 * max_err));

  // Region of convergence on a grid of b around the supporting-line parameter.
  const int n = c.region_probes;
  std::vector<double> factors(n);
  for (int i = 0; i < n; ++i) factors[i] = c.region_lo + (c.region_hi - c.region_lo) * i / (n - 1);
  const std::size_t nt = c.tau_list.size();
  std::vector<RegionVerdict> verdicts(nt * n * n);
  const auto at = [&](std::size_t k, int i, int j) -> RegionVerdict& { return verdicts[(k * n + i) * n + j]; };
  Json probes = Json::array();
  const Window window = default_window(R);
  for (std::size_t k = 0; k < nt; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const BVector b{bhat.b1 * factors[i], bhat.b2 * factors[j]};
        at(k, i, j) = region_membership(*list, window, theta, b, c.tau_list[k], c.region_tol);
        const auto& v = at(k, i, j);
        probes.push_back({{"tau", c.tau_list[k]},
                          {"b", {b.b1, b.b2}},
                          {"region", to_string(v.region)},
                          {"critical_s", v.critical_s},
                          {"low_confidence", v.low_confidence}});
      }
    }
  }
  int tau_violations = 0, convexity_violations = 0, bound_violations = 0, convexity_pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < nt; ++k) {
        for (std::size_t k2 = k + 1; k2 < nt; ++k2) {
          if (at(k, i, j).region == Region::Inside && at(k2, i, j).region == Region::Outside) ++tau_violations;
        }
        const BVector b{bhat.b1 * factors[i], bhat.b2 * factors[j]};
        if (at(k, i, j).region == Region::Boundary && b.along(theta) < t.estimate.value - 0.1) {
          ++bound_violations;
        }
      }
    }
  }
  // Midpoints of probe pairs whose midpoint is itself a probe.
  for (std::size_t k = 0; k < nt; ++k) {
    for (int p = 0; p < n * n; ++p) {
      for (int q = p + 1; q < n * n; ++q) {
        const int i1 = p / n, j1 = p % n, i2 = q / n, j2 = q % n;
        if ((i1 + i2) % 2 || (j1 + j2) % 2) continue;
        if (at(k, i1, j1).region != Region::Inside || at(k, i2, j2).region != Region::Inside) continue;
        ++convexity_pairs;
        if (at(k, (i1 + i2) / 2, (j1 + j2) / 2).region == Region::Outside) ++convexity_violations;
      }
    }
  }
  doc["region"] = {{"factors", factors},
                   {"tau_list", c.tau_list},
                   {"tol", c.region_tol},
                   {"probes", probes},
                   {"tau_monotonicity_violations", tau_violations},
                   {"convexity_pairs", convexity_pairs},
                   {"convexity_violations", convexity_violations},
                   {"lower_bound_violations", bound_violations}};
  checks.push_back(check_le("region_tau_monotone", tau_violations, 0));
  checks.push_back(check_le("region_convex", convexity_violations, 0));
  checks.push_back(check_le("region_lower_bound", bound_violations, 0));

  // Finite densities along the s schedule.
  const PPoint& o = c.basepoint;
  const PPoint x = offset_point(o, c.rn_offset);
  Json schedule = Json::array();
  std::vector<double> rn, off, top, classical_off;
  Json classical = Json::array();
  for (double s : c.s_schedule) {
    DensityParams p;
    p.theta = theta;
    p.tau = c.tau;
    p.b = bhat;
    p.s = s;
    const FiniteDensity mu_o = build_density(list, o, p, o, R);
    const FiniteDensity mu_x = build_density(list, o, p, x, R);
    const RadonNikodymReport r = radon_nikodym_check(mu_o, mu_x, c.rn_arcs);

    const std::string stem = "density_" + short_num(s);
    std::size_t written = 0;
    double omitted = 0.0;
    write_density_csv(mu_o, c.density_min_mass, out_ / (stem + ".csv"), written, omitted);
    Json side = header("density");
    side["params"] = {{"theta", c.target_theta},
                      {"tau", c.tau},
                      {"b", {bhat.b1, bhat.b2}},
                      {"s", s},
                      {"h_mode", "constant_one"}};
    side["basepoint"] = {{"p1", {o.p1.re(), o.p1.im()}}, {"p2", {o.p2.re(), o.p2.im()}}};
    side["x"] = side["basepoint"];
    side["normalization"] = mu_o.normalization;
    side["truncation_radius"] = mu_o.truncation_radius;
    side["total_mass"] = mu_o.total_mass();
    side["rows"] = written;
    side["min_mass"] = c.density_min_mass;
    side["omitted_mass"] = omitted;
    side["flags"] = mu_o.flags;
    write_json(stem + ".json", side);

    Json cells = Json::array();
    for (const auto& row : r.rows) {
      cells.push_back({{"cell", {row.cell.i1, row.cell.i2}},
                       {"center", {row.cell.u1_center, row.cell.u2_center}},
                       {"atoms", row.atoms},
                       {"mass_o", row.mass_o},
                       {"mass_x", row.mass_x},
                       {"ratio", row.ratio},
                       {"expected", row.expected},
                       {"deviation", row.deviation}});
    }
    rn.push_back(r.max_deviation);
    off.push_back(off_slope_mass(mu_o, c.off_slope_eps));
    top.push_back(max_atom_mass(mu_o));
    schedule.push_back({{"s", s},
                        {"file", stem + ".csv"},
                        {"normalization", mu_o.normalization},
                        {"mass_at_x", mu_x.total_mass()},
                        {"off_slope_mass", off.back()},
                        {"max_atom_mass", top.back()},
                        {"rn", {{"x", {{"p1", {x.p1.re(), x.p1.im()}}, {"p2", {x.p2.re(), x.p2.im()}}}},
                                {"arcs", r.arcs},
                                {"skipped", r.skipped},
                                {"max_deviation", r.max_deviation},
                                {"cells", cells}}}});

    const ClassicalDensity cl = classical_density(list, o, g, o, s, R);
    double outside = 0.0;
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (std::abs((*list)[i].slope.value() - g.theta_star) > c.off_slope_eps) outside += cl.density.mass(i);
    }
    classical_off.push_back(outside);
    classical.push_back({{"s", s},
                         {"histogram_edges", cl.histogram.edges},
                         {"histogram_mass", cl.histogram.mass},
                         {"mass_off_theta_star", outside},
                         {"flags", cl.density.flags}});
  }
  doc["schedule"] = schedule;
  doc["classical"] = {{"theta_star", g.theta_star}, {"delta_gamma", g.delta_gamma}, {"by_s", classical}};

  const auto increases = [](const std::vector<double>& v) {
    int bad = 0;
    for (std::size_t i = 1; i < v.size(); ++i) bad += v[i] > v[i - 1];
    return bad;
  };
  checks.push_back(check_le("rn_deviation_decreasing", increases(rn), 0));
  checks.push_back(check_le("off_slope_mass_decreasing", increases(off), 0));
  checks.push_back(check_le("classical_concentration_decreasing", increases(classical_off), 0));
  doc["max_atom_trend"] = {{"values", top},
                           {"decreasing", increases(top) == 0},
                           {"note", "finite-scale diagnostic only; says nothing about atoms of a limit measure"}};

  // Regression bound at the s value nearest to the shadow density parameter.
  std::size_t ref = 0;
  for (std::size_t i = 1; i < c.s_schedule.size(); ++i) {
    if (std::abs(c.s_schedule[i] - c.shadow_s) < std::abs(c.s_schedule[ref] - c.shadow_s)) ref = i;
  }
  doc["rn_reference"] = {{"s", c.s_schedule[ref]}, {"max_deviation", rn[ref]},
                         {"bound", c.rn_bound ? Json(*c.rn_bound) : Json(nullptr)}};
  if (c.rn_bound) checks.push_back(check_le("rn_deviation_regression", rn[ref], *c.rn_bound));

  // Sensitivity to tau at the reference s.
  Json taus = Json::array();
  for (double tau : c.tau_list) {
    DensityParams p;
    p.theta = theta;
    p.tau = tau;
    p.b = bhat;
    p.s = c.s_schedule[ref];
    const FiniteDensity mu_o = build_density(list, o, p, o, R);
    const FiniteDensity mu_x = build_density(list, o, p, x, R);
    taus.push_back({{"tau", tau},
                    {"off_slope_mass", off_slope_mass(mu_o, c.off_slope_eps)},
                    {"rn_max_deviation", radon_nikodym_check(mu_o, mu_x, c.rn_arcs).max_deviation}});
  }
  doc["tau_sensitivity"] = taus;
  doc["checks"] = checks;
  write_json("density.json", doc);
  return doc;
}

Json Pipeline::shadow() {
  const AtomList list = atoms();
  const RunConfig& c = cfg_;
  const TargetSlope t = target_slope(*list, grid(), c);
  DensityParams p;
  p.theta = Slope{c.target_theta};
  p.tau = c.tau;
  p.b = t.line.b;
  p.s = c.shadow_s;
  const FiniteDensity mu = build_density(list, c.basepoint, p, c.basepoint, c.radius);
  const auto sample = sample_atoms(*list, c.shadow_depth_lo, c.shadow_depth_hi,
                                   static_cast<std::size_t>(c.shadow_samples), c.seed);
  const ShadowReport rep = shadow_lemma_statistic(mu, c.shadow_c, sample);

  Json doc = header("shadow");
  doc["c"] = c.shadow_c;
  doc["depths"] = {c.shadow_depth_lo, c.shadow_depth_hi};
  doc["density"] = {{"theta", c.target_theta}, {"tau", c.tau}, {"b", {p.b.b1, p.b.b2}}, {"s", c.shadow_s}};
  doc["seed"] = c.seed;
  Json rows = Json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"word1", r.word1.to_string()},
                    {"word2", r.word2.to_string()},
                    {"dist", r.dist},
                    {"atoms", r.atoms},
                    {"mass", r.mass},
                    {"ratio", r.ratio},
                    {"excluded", r.excluded}});
  }
  doc["rows"] = rows;
  doc["summary"] = {{"sampled", sample.size()},
                    {"used", rep.used},
                    {"min_atoms", kMinShadowAtoms},
                    {"min_ratio", rep.min_ratio},
                    {"max_ratio", rep.max_ratio},
                    {"d_hat", rep.d_hat},
                    {"max_abs_log_ratio", rep.max_abs_log_ratio},
                    {"depth_slope", rep.depth_slope},
                    {"depth_slope_stderr", rep.depth_slope_stderr},
                    {"frozen_d_hat", c.shadow_d_hat ? Json(*c.shadow_d_hat) : Json(nullptr)}};
  Json checks = Json::array();
  checks.push_back(check_le("shadow_rows_used", static_cast<double>(c.shadow_samples - rep.used), 0.0));
  checks.push_back(check("shadow_depth_trend", rep.depth_slope, 0.1,
                         std::isfinite(rep.depth_slope) && std::abs(rep.depth_slope) <= 0.1));
  if (c.shadow_d_hat) {
    checks.push_back(check_le("shadow_ratio_bound", rep.max_abs_log_ratio, std::log(*c.shadow_d_hat)));
  }
  doc["checks"] = checks;
  write_json("shadow_report.json", doc);
  return doc;
}

Json Pipeline::hausdorff() {
  const AtomList list = atoms();
  const RunConfig& c = cfg_;
  const TargetSlope t = target_slope(*list, grid(), c);
  const Slope theta{c.target_theta};
  const std::vector<double> scales = c.scales();

  const auto proxy = radial_proxy(*list, theta, c.proxy_eps, c.proxy_depth_min, scales.back(), c.cball_c);
  const DimensionEstimate est = estimate_dimension(proxy, scales, c.cball_c, c.radius);

  constexpr int kCantorLevels = 12;
  const DimensionEstimate cantor = estimate_dimension(cantor_proxy(kCantorLevels), scales, c.cball_c);
  const double cantor_target = std::log(2.0) / std::log(3.0);

  std::vector<PBoundaryPoint> rays;
  for (std::size_t i : sample_indices(proxy.size(), c.cocompact_rays, c.seed)) rays.push_back(proxy[i]);
  const double depth = c.cocompact_depth.value_or(c.radius / 2.0);
  const CocompactCertificate cert = cocompact_certificate(*list, rays, depth);

  std::ofstream csv(out_ / "dimension.csv");
  csv << "k,r,count,used\n";
  for (std::size_t i = 0; i < est.scales.size(); ++i) {
    csv << num(-std::log(est.scales[i])) << ',' << num(est.scales[i]) << ',' << est.counts[i] << ','
        << (est.used[i] ? 1 : 0) << '\n';
  }
  if (!csv) throw std::runtime_error("cannot write dimension.csv");

  Json doc = header("hausdorff");
  doc["theta"] = c.target_theta;
  doc["c"] = c.cball_c;
  doc["proxy"] = {{"eps", c.proxy_eps}, {"depth_min", c.proxy_depth_min}, {"points", proxy.size()}};
  doc["scales"] = est.scales;
  doc["counts"] = est.counts;
  doc["used"] = est.used;
  doc["value"] = est.value;
  doc["stderr"] = est.stderr_;
  doc["flags"] = est.flags;
  doc["delta_theta"] = t.estimate.value;
  doc["delta_theta_stderr"] = t.estimate.stderr_;
  doc["bias"] = est.value < t.estimate.value ? "under" : "over";
  doc["cantor_control"] = {{"levels", kCantorLevels},
                           {"points", std::size_t{1} << kCantorLevels},
                           {"counts", cantor.counts},
                           {"value", cantor.value},
                           {"stderr", cantor.stderr_},
                           {"target", cantor_target}};
  doc["cocompact"] = {{"c_gamma", cert.c_gamma}, {"depth", cert.depth}, {"rays", cert.rays},
                      {"points", cert.points},   {"bound", cert.bound}, {"passed", cert.passed}};

  Json checks = Json::array();
  checks.push_back(check_le("dimension_upper_bound", est.value, t.estimate.value + 0.1));
  checks.push_back(check("cocompact_certificate", cert.c_gamma, cert.bound, cert.passed));
  const double gap = std::abs(est.value - t.estimate.value);
  checks.push_back(check("dimension_equality", gap, 0.15, cert.passed && gap <= 0.15));
  checks.push_back(check_le("cantor_control", std::abs(cantor.value - cantor_target), 0.05));
  doc["checks"] = checks;
  write_json("dimension.json", doc);
  return doc;
}

Json Pipeline::report() {
  static const std::vector<std::pair<std::string, std::string>> stages{
      {"certificate.json", "certify"}, {"growth.json", "growth"},         {"density.json", "density"},
      {"shadow_report.json", "shadow"}, {"dimension.json", "hausdorff"}};
  Json doc = header("report");
  Json checks = Json::array();
  bool all = true;
  std::map<std::string, Json> docs;
  for (const auto& [file, command] : stages) docs[command] = read_artifact(file, command);

  const Json& cert = docs["certify"];
  checks.push_back({{"stage", "certify"}, {"name", "ping_pong_certificate"}, {"passed", cert["passed"]}});
  all = all && cert["passed"].get<bool>();
  for (const auto& [file, command] : stages) {
    if (command == "certify") continue;
    for (const auto& ch : docs[command]["checks"]) {
      Json entry = ch;
      entry["stage"] = command;
      checks.push_back(entry);
      all = all && ch["passed"].get<bool>();
    }
  }
  const Json& growth = docs["growth"];
  if (growth.contains("product_identity")) doc["product_identity"] = growth["product_identity"];
  doc["critical_exponent"] = growth["critical_exponent"]["value"];
  doc["supporting_line"] = docs["density"]["supporting_line"];
  doc["shadow"] = docs["shadow"]["summary"];
  doc["dimension"] = {{"value", docs["hausdorff"]["value"]},
                      {"stderr", docs["hausdorff"]["stderr"]},
                      {"delta_theta", docs["hausdorff"]["delta_theta"]},
                      {"c_gamma", docs["hausdorff"]["cocompact"]["c_gamma"]}};
  doc["checks"] = checks;
  doc["all_passed"] = all;
  write_json("report.json", doc);
  return doc;
}

}  // namespace hyperlab
