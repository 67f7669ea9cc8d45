#include "hyperlab/product.hpp"

#include <cmath>

namespace hyperlab {

PIsometry operator*(const PIsometry& lhs, const PIsometry& rhs) {
  return {lhs.m1 * rhs.m1, lhs.m2 * rhs.m2};
}

PPoint apply(const PIsometry& g, const PPoint& x) { return {apply(g.m1, x.p1), apply(g.m2, x.p2)}; }

double DistanceVector::norm() const { return std::hypot(h1, h2); }

Slope::Slope(double theta) : theta_(theta) {
  if (!(theta >= 0.0 && theta <= kHalfPi)) {
    throw std::invalid_argument("slope must lie in [0, pi/2]");
  }
}

// Exact values at the endpoints keep singular formulas free of 6e-17 residue.
double Slope::cos() const { return theta_ == kHalfPi ? 0.0 : std::cos(theta_); }
double Slope::sin() const { return theta_ == 0.0 ? 0.0 : std::sin(theta_); }

PBoundaryPoint PBoundaryPoint::regular(HBoundaryPoint xi1, HBoundaryPoint xi2, Slope theta) {
  if (!theta.is_regular()) throw std::invalid_argument("regular boundary point needs 0 < theta < pi/2");
  return {Kind::Regular, xi1, xi2, theta};
}

PBoundaryPoint PBoundaryPoint::sing1(HBoundaryPoint xi1) {
  return {Kind::Sing1, xi1, HBoundaryPoint::infinity(), Slope{0.0}};
}

PBoundaryPoint PBoundaryPoint::sing2(HBoundaryPoint xi2) {
  return {Kind::Sing2, HBoundaryPoint::infinity(), xi2, Slope{kHalfPi}};
}

const HBoundaryPoint& PBoundaryPoint::xi1() const {
  if (kind_ == Kind::Sing2) throw DomainError("singular point over factor 2 has no xi1");
  return xi1_;
}

const HBoundaryPoint& PBoundaryPoint::xi2() const {
  if (kind_ == Kind::Sing1) throw DomainError("singular point over factor 1 has no xi2");
  return xi2_;
}

DistanceVector distance_vector(const PPoint& x, const PPoint& z) {
  return {h_distance(x.p1, z.p1), h_distance(x.p2, z.p2)};
}

double p_distance(const PPoint& x, const PPoint& z) { return distance_vector(x, z).norm(); }

Slope slope_of(const DistanceVector& h) {
  if (h.h1 == 0.0) return Slope{h.h2 > 0.0 ? kHalfPi : 0.0};
  return Slope{std::atan(h.h2 / h.h1)};
}

Slope slope_of(const PPoint& x, const PPoint& z) { return slope_of(distance_vector(x, z)); }

double directional_distance(const Slope& theta, const DistanceVector& h) {
  return theta.cos() * h.h1 + theta.sin() * h.h2;
}

double directional_distance(const Slope& theta, const PPoint& x, const PPoint& y) {
  return directional_distance(theta, distance_vector(x, y));
}

double product_busemann(const PBoundaryPoint& xi, const PPoint& x, const PPoint& y) {
  switch (xi.kind()) {
    case PBoundaryPoint::Kind::Sing1: return busemann(xi.xi1(), x.p1, y.p1);
    case PBoundaryPoint::Kind::Sing2: return busemann(xi.xi2(), x.p2, y.p2);
    case PBoundaryPoint::Kind::Regular: break;
  }
  return xi.slope().cos() * busemann(xi.xi1(), x.p1, y.p1) +
         xi.slope().sin() * busemann(xi.xi2(), x.p2, y.p2);
}

double b_busemann(const BVector& b, const PBoundaryPoint& xi, const PPoint& x, const PPoint& y) {
  switch (xi.kind()) {
    case PBoundaryPoint::Kind::Sing1: return b.b1 * busemann(xi.xi1(), x.p1, y.p1);
    case PBoundaryPoint::Kind::Sing2: return b.b2 * busemann(xi.xi2(), x.p2, y.p2);
    case PBoundaryPoint::Kind::Regular: break;
  }
  return b.b1 * busemann(xi.xi1(), x.p1, y.p1) + b.b2 * busemann(xi.xi2(), x.p2, y.p2);
}

PPoint chamber_point(const PPoint& x, const PBoundaryPoint& xi, double t1, double t2) {
  switch (xi.kind()) {
    case PBoundaryPoint::Kind::Sing1: return {ray_point(x.p1, xi.xi1(), t1), x.p2};
    case PBoundaryPoint::Kind::Sing2: return {x.p1, ray_point(x.p2, xi.xi2(), t2)};
    case PBoundaryPoint::Kind::Regular: break;
  }
  return {ray_point(x.p1, xi.xi1(), t1), ray_point(x.p2, xi.xi2(), t2)};
}

PPoint p_ray_point(const PPoint& x, const PBoundaryPoint& xi, double t) {
  const Slope& th = xi.slope();
  return chamber_point(x, xi, t * th.cos(), t * th.sin());
}

double dist_to_chamber(const PPoint& y, const PPoint& apex, const PBoundaryPoint& xi) {
  switch (xi.kind()) {
    case PBoundaryPoint::Kind::Sing1: return dist_to_ray(y.p1, apex.p1, xi.xi1());
    case PBoundaryPoint::Kind::Sing2: return dist_to_ray(y.p2, apex.p2, xi.xi2());
    case PBoundaryPoint::Kind::Regular: break;
  }
  return std::hypot(dist_to_ray(y.p1, apex.p1, xi.xi1()), dist_to_ray(y.p2, apex.p2, xi.xi2()));
}

bool in_chamber(const PPoint& x, const PBoundaryPoint& xi, const PPoint& y, double tol) {
  return dist_to_chamber(y, x, xi) <= tol;
}

}  // namespace hyperlab
