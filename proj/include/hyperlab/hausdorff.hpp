#pragma once

// Knieper c-balls on the product boundary, greedy covers and a box-counting
// estimate of the dimension of the slope-theta radial limit set.

#include <string>
#include <vector>

#include "hyperlab/growth.hpp"

namespace hyperlab {

/// B_r^c(center): directions whose rays from o are within c of the ray toward
/// center at time -log r. Requires 0 < r < e^{-c}.
struct CBall {
  PBoundaryPoint center;
  double r;
  double c;

  void validate() const;
};

bool cball_contains(const CBall& ball, const PBoundaryPoint& eta, const PPoint& o = base_point());

/// Boundary triples of atoms with dist >= depth_min and |slope - theta| < eps.
/// theta = 0 or pi/2 gives singular points over the surviving factor. Points
/// closer than c/4 at scale r_dedup are merged, keeping the first in atom order.
/// InsufficientData when nothing survives.
std::vector<PBoundaryPoint> radial_proxy(const std::vector<OrbitAtom>& atoms, const Slope& theta,
                                         double eps, double depth_min, double r_dedup, double c);

/// Size of the greedy cover of `proxy` by c-balls of radius r centred at proxy
/// points: each step takes the uncovered point whose ball holds the most
/// uncovered points, ties to the lowest index. All points must share a kind and slope.
int covering_count(const std::vector<PBoundaryPoint>& proxy, double r, double c,
                   const PPoint& o = base_point());

/// Neighbour lists of the c-ball relation at scale r (each list includes the point itself).
std::vector<std::vector<int>> cball_neighbours(const std::vector<PBoundaryPoint>& proxy, double r,
                                               double c, const PPoint& o = base_point());

struct DimensionEstimate {
  double theta = 0.0;
  std::vector<double> scales;
  std::vector<int> counts;
  std::vector<bool> used;
  double value = 0.0;
  double stderr_ = 0.0;
  std::vector<std::string> flags;
};

/// r_k = e^{-k}, k = 2 .. min(6, depth - 2).
std::vector<double> default_scales(double depth);

/// Slope of log N(r) against -log r. Scales finer than the proxy resolution
/// (-log r > resolution_depth) are left out of the fit.
DimensionEstimate estimate_dimension(const std::vector<PBoundaryPoint>& proxy,
                                     const std::vector<double>& scales, double c,
                                     double resolution_depth = INFINITY);

/// Radial cocompactness measured on sample rays: c_gamma is the largest
/// distance from a sampled ray point sigma_{o, xi}(t), t <= depth, to the orbit.
struct CocompactCertificate {
  double c_gamma = 0.0;
  double depth = 0.0;
  int rays = 0;
  int points = 0;
  double bound = 0.0;
  bool passed = false;
};

inline constexpr double kCocompactBound = 4.0;

CocompactCertificate cocompact_certificate(const std::vector<OrbitAtom>& atoms,
                                           const std::vector<PBoundaryPoint>& rays, double depth,
                                           double step = 0.5, double bound = kCocompactBound);

/// Middle-thirds Cantor set of 2^levels points laid on the factor-1 boundary
/// angles [1, 2] around i, as slope-0 points. Box dimension log 2 / log 3.
std::vector<PBoundaryPoint> cantor_proxy(int levels);

}  // namespace hyperlab
