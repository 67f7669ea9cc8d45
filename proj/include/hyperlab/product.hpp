#pragma once

// X = X1 x X2 with the l2 product metric: distance vectors, slopes,
// directional distance, product Busemann cocycles and Weyl chambers.

#include <numbers>

#include "hyperlab/hyperbolic.hpp"

namespace hyperlab {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

struct PPoint {
  HPoint p1;
  HPoint p2;
  friend bool operator==(const PPoint&, const PPoint&) = default;
};

/// The default base point (i, i).
inline PPoint base_point() { return {HPoint{0.0, 1.0}, HPoint{0.0, 1.0}}; }

struct PIsometry {
  Moebius m1;
  Moebius m2;
  PIsometry inverse() const { return {m1.inverse(), m2.inverse()}; }
};

PIsometry operator*(const PIsometry& lhs, const PIsometry& rhs);
PPoint apply(const PIsometry& g, const PPoint& x);

struct DistanceVector {
  double h1 = 0.0;
  double h2 = 0.0;
  double norm() const;
};

/// Angle in [0, pi/2]; the range is enforced at construction.
class Slope {
 public:
  explicit Slope(double theta);
  double value() const { return theta_; }
  double cos() const;
  double sin() const;
  bool is_regular() const { return theta_ > 0.0 && theta_ < kHalfPi; }

 private:
  double theta_;
};

struct BVector {
  double b1 = 0.0;
  double b2 = 0.0;
  double dot(double h1, double h2) const { return b1 * h1 + b2 * h2; }
  /// <b, H_theta>
  double along(const Slope& theta) const { return b1 * theta.cos() + b2 * theta.sin(); }
};

/// Boundary point of the product: a regular triple (xi1, xi2, theta) with
/// 0 < theta < pi/2, or a singular point living over one factor.
class PBoundaryPoint {
 public:
  enum class Kind { Regular, Sing1, Sing2 };

  static PBoundaryPoint regular(HBoundaryPoint xi1, HBoundaryPoint xi2, Slope theta);
  static PBoundaryPoint sing1(HBoundaryPoint xi1);
  static PBoundaryPoint sing2(HBoundaryPoint xi2);

  Kind kind() const { return kind_; }
  const Slope& slope() const { return theta_; }
  /// DomainError when the coordinate does not exist for this kind.
  const HBoundaryPoint& xi1() const;
  const HBoundaryPoint& xi2() const;

 private:
  PBoundaryPoint(Kind kind, HBoundaryPoint xi1, HBoundaryPoint xi2, Slope theta)
      : kind_(kind), xi1_(xi1), xi2_(xi2), theta_(theta) {}
  Kind kind_;
  HBoundaryPoint xi1_;
  HBoundaryPoint xi2_;
  Slope theta_;
};

DistanceVector distance_vector(const PPoint& x, const PPoint& z);
double p_distance(const PPoint& x, const PPoint& z);
Slope slope_of(const DistanceVector& h);
Slope slope_of(const PPoint& x, const PPoint& z);

double directional_distance(const Slope& theta, const DistanceVector& h);
double directional_distance(const Slope& theta, const PPoint& x, const PPoint& y);

double product_busemann(const PBoundaryPoint& xi, const PPoint& x, const PPoint& y);
double b_busemann(const BVector& b, const PBoundaryPoint& xi, const PPoint& x, const PPoint& y);

/// (sigma_{x1,xi1}(t1), sigma_{x2,xi2}(t2)); the free coordinate of a
/// singular point stays at the apex.
PPoint chamber_point(const PPoint& x, const PBoundaryPoint& xi, double t1, double t2);
/// Unit-speed ray from x toward xi: (sigma1(t cos theta), sigma2(t sin theta)).
PPoint p_ray_point(const PPoint& x, const PBoundaryPoint& xi, double t);

/// Distance from y to the Weyl chamber C_{apex, xi}, split coordinate-wise.
double dist_to_chamber(const PPoint& y, const PPoint& apex, const PBoundaryPoint& xi);
bool in_chamber(const PPoint& x, const PBoundaryPoint& xi, const PPoint& y, double tol = 1e-9);

}  // namespace hyperlab
