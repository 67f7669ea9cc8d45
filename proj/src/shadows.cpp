#include "hyperlab/shadows.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace hyperlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Coordinates in which o sits at i.
std::complex<double> recentred(const HPoint& o, const HPoint& z) {
  return {(z.re() - o.re()) / o.im(), z.im() / o.im()};
}

}  // namespace

void ShadowSpec::validate() const {
  if (!(c > 0.0)) throw std::invalid_argument("shadow radius c must be positive");
}

bool shadow_contains(const ShadowSpec& spec, const PBoundaryPoint& xi) {
  spec.validate();
  return dist_to_chamber(spec.center, spec.apex, xi) < spec.c;
}

std::pair<double, double> esti_check(const ShadowSpec& spec, const PBoundaryPoint& xi) {
  if (!shadow_contains(spec, xi)) throw DomainError("esti_check: point is not in the shadow");
  if (!(p_distance(spec.apex, spec.center) > spec.c)) {
    throw DomainError("esti_check: the ball must not contain the apex");
  }
  const auto gap = [](const HPoint& o, const HPoint& z, const HBoundaryPoint& eta) {
    return h_distance(o, z) - busemann(eta, o, z);
  };
  double g1 = 0.0, g2 = 0.0;
  if (xi.kind() != PBoundaryPoint::Kind::Sing2) g1 = gap(spec.apex.p1, spec.center.p1, xi.xi1());
  if (xi.kind() != PBoundaryPoint::Kind::Sing1) g2 = gap(spec.apex.p2, spec.center.p2, xi.xi2());
  return {g1, g2};
}

Polar polar_at(const HPoint& o, const HPoint& z) {
  const std::complex<double> f = recentred(o, z);
  const std::complex<double> i{0.0, 1.0};
  return {h_distance(o, z), std::arg((f - i) / (f + i))};
}

double boundary_angle(const HPoint& o, const HBoundaryPoint& xi) {
  if (xi.is_infinite()) return 0.0;
  const double f = (xi.value() - o.re()) / o.im();
  return std::remainder(2.0 * std::atan2(1.0, -f), kTwoPi);
}

HBoundaryPoint boundary_from_angle(const HPoint& o, double angle) {
  const double u = std::remainder(angle, kTwoPi);
  if (u == 0.0) return HBoundaryPoint::infinity();
  return HBoundaryPoint::finite(o.re() - o.im() / std::tan(0.5 * u));
}

double polar_dist_to_ray(const Polar& z, double xi_angle) {
  const double alpha = std::abs(std::remainder(z.angle - xi_angle, kTwoPi));
  if (alpha >= 0.5 * std::numbers::pi) return z.radius;
  return std::asinh(std::sinh(z.radius) * std::sin(alpha));
}

ShadowReport shadow_lemma_statistic(const FiniteDensity& mu, double c,
                                    const std::vector<std::size_t>& sample) {
  if (sample.empty()) throw std::invalid_argument("shadow statistic needs a non-empty sample");
  if (!(mu.x == mu.base)) throw std::invalid_argument("shadow statistic needs the density at o");
  if (!(c > 0.0)) throw std::invalid_argument("shadow radius c must be positive");
  const auto& atoms = *mu.atoms;
  const PPoint& o = mu.base;
  for (std::size_t k : sample) {
    if (!(atoms.at(k).dist > c)) throw DomainError("shadow statistic needs d(o, gamma o) > c");
  }

  struct Dir {
    double u1, u2, mass;
  };
  std::vector<Dir> dirs;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (mu.weights[i] == 0.0 || !atoms[i].bnd1 || !atoms[i].bnd2) continue;
    dirs.push_back({boundary_angle(o.p1, *atoms[i].bnd1), boundary_angle(o.p2, *atoms[i].bnd2),
                    mu.mass(i)});
  }

  ShadowReport rep;
  rep.c = c;
  const double c2 = c * c;
  const BVector& b = mu.params.b;
  std::vector<double> xs, ys;
  for (std::size_t k : sample) {
    const OrbitAtom& g = atoms[k];
    const Polar z1 = polar_at(o.p1, g.point.p1);
    const Polar z2 = polar_at(o.p2, g.point.p2);
    ShadowRow row{g.word1, g.word2, g.dist};
    for (const Dir& d : dirs) {
      const double d1 = polar_dist_to_ray(z1, d.u1);
      if (d1 >= c) continue;
      const double d2 = polar_dist_to_ray(z2, d.u2);
      if (d1 * d1 + d2 * d2 < c2) {
        ++row.atoms;
        row.mass += d.mass;
      }
    }
    row.ratio = row.mass * std::exp(b.dot(g.hvec.h1, g.hvec.h2));
    row.excluded = row.atoms < kMinShadowAtoms;
    if (!row.excluded) {
      xs.push_back(g.dist);
      ys.push_back(std::log(row.ratio));
    }
    rep.rows.push_back(row);
  }
  rep.used = static_cast<int>(xs.size());
  if (rep.used == 0) return rep;
  rep.min_ratio = std::exp(*std::min_element(ys.begin(), ys.end()));
  rep.max_ratio = std::exp(*std::max_element(ys.begin(), ys.end()));
  rep.d_hat = std::max(rep.max_ratio, 1.0 / rep.min_ratio);
  for (double y : ys) rep.max_abs_log_ratio = std::max(rep.max_abs_log_ratio, std::abs(y));
  try {
    const LineFit f = fit_line(xs, ys);
    rep.depth_slope = f.slope;
    rep.depth_slope_stderr = f.stderr_slope;
  } catch (const InsufficientData&) {
    rep.depth_slope = NAN;
  }
  return rep;
}

std::vector<std::size_t> sample_atoms(const std::vector<OrbitAtom>& atoms, double depth_lo,
                                      double depth_hi, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].dist >= depth_lo && atoms[i].dist <= depth_hi) pool.push_back(i);
  }
  if (pool.size() > count) {
    // Partial Fisher-Yates with an explicit index draw, so the sample does not
    // depend on the standard library's distribution implementation.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng() % (pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace hyperlab
