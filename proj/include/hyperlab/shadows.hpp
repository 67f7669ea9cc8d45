#pragma once

// Weyl-chamber shadows of balls, the Busemann gap estimate and the
// finite-scale shadow lemma statistic.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hyperlab/density.hpp"

namespace hyperlab {

struct ShadowSpec {
  PPoint apex{base_point()};
  PPoint center{base_point()};
  double c = 1.0;

  void validate() const;
};

/// xi in Sh(apex : B_center(c)), i.e. dist_to_chamber(center, apex, xi) < c.
bool shadow_contains(const ShadowSpec& spec, const PBoundaryPoint& xi);

/// (d1(o1, z1) - B_xi1(o1, z1), d2(o2, z2) - B_xi2(o2, z2)) with o the apex and z the
/// center. A coordinate a singular point does not have reports 0.
/// DomainError unless xi is in the shadow and d(apex, center) > c.
std::pair<double, double> esti_check(const ShadowSpec& spec, const PBoundaryPoint& xi);

/// Geodesic polar coordinates around o. Angles are measured in a fixed frame
/// at o, so the angle between two directions at o is the difference of angles.
struct Polar {
  double radius;
  double angle;
};

Polar polar_at(const HPoint& o, const HPoint& z);
double boundary_angle(const HPoint& o, const HBoundaryPoint& xi);
HBoundaryPoint boundary_from_angle(const HPoint& o, double angle);
/// dist_to_ray(z, o, xi) from the polar data of z and the angle of xi.
double polar_dist_to_ray(const Polar& z, double xi_angle);

inline constexpr int kMinShadowAtoms = 20;

struct ShadowRow {
  Word word1;
  Word word2;
  double dist = 0.0;
  long long atoms = 0;
  double mass = 0.0;
  double ratio = 0.0;
  bool excluded = false;
};

struct ShadowReport {
  double c = 0.0;
  std::vector<ShadowRow> rows;
  int used = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double d_hat = 0.0;           // max(max r, 1 / min r)
  double max_abs_log_ratio = 0.0;
  double depth_slope = 0.0;     // regression slope of log r against d(o, gamma o)
  double depth_slope_stderr = 0.0;
};

/// r(gamma) = mu_o(Sh(o : B_{gamma o}(c))) e^{<b, H(o, gamma o)>} for each sampled atom.
/// The density must sit at its base point.
ShadowReport shadow_lemma_statistic(const FiniteDensity& mu, double c,
                                    const std::vector<std::size_t>& sample);

/// Up to `count` atom indices with depth_lo <= dist <= depth_hi, drawn without
/// replacement; all of them when fewer exist. Sorted.
std::vector<std::size_t> sample_atoms(const std::vector<OrbitAtom>& atoms, double depth_lo,
                                      double depth_hi, std::size_t count, std::uint64_t seed);

}  // namespace hyperlab
