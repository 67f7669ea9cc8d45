#pragma once

// Geometry of a single factor: the upper half-plane model of the hyperbolic
// plane, its orientation-preserving isometries, geodesic rays, boundary
// points and Busemann functions.

#include <complex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace hyperlab {

/// Raised when an operation is evaluated outside its domain
/// (non-hyperbolic input to translation_length, z == x in ray_endpoint, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Point of the upper half-plane; im > 0 is enforced at construction.
class HPoint {
 public:
  HPoint(double re, double im);
  explicit HPoint(std::complex<double> z) : HPoint(z.real(), z.imag()) {}

  double re() const { return re_; }
  double im() const { return im_; }
  std::complex<double> z() const { return {re_, im_}; }

  friend bool operator==(const HPoint&, const HPoint&) = default;

 private:
  double re_;
  double im_;
};

/// Boundary point of the hyperbolic plane: a real number or the point at infinity.
class HBoundaryPoint {
 public:
  static HBoundaryPoint finite(double value);
  static HBoundaryPoint infinity() { return HBoundaryPoint{}; }

  bool is_infinite() const { return !value_.has_value(); }
  bool is_finite() const { return value_.has_value(); }
  /// Throws DomainError for the point at infinity.
  double value() const;

  friend bool operator==(const HBoundaryPoint&, const HBoundaryPoint&) = default;

 private:
  HBoundaryPoint() = default;
  std::optional<double> value_;
};

std::ostream& operator<<(std::ostream& os, const HPoint& p);
std::ostream& operator<<(std::ostream& os, const HBoundaryPoint& p);

/// Element of PSL(2,R). Entries are rescaled at construction so that
/// ad - bc = 1; matrices with non-positive determinant are rejected.
class Moebius {
 public:
  Moebius(double a, double b, double c, double d);

  static Moebius identity() { return {1.0, 0.0, 0.0, 1.0}; }
  /// z -> lambda * z, lambda > 0.
  static Moebius dilation(double lambda);
  /// Hyperbolic element with attracting fixed point +p, repelling -p and
  /// translation length `length` (p > 0).
  static Moebius symmetric_hyperbolic(double p, double length);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

  double trace() const { return a_ + d_; }
  double det() const { return a_ * d_ - b_ * c_; }
  Moebius inverse() const { return Moebius{d_, -b_, -c_, a_, Unchecked{}}; }

  friend Moebius operator*(const Moebius& lhs, const Moebius& rhs);
  /// Equality in PSL(2,R): M and -M compare equal. Entry-wise tolerance `tol`.
  bool approx_equal(const Moebius& other, double tol = 1e-12) const;

 private:
  // Products and inverses of normalized matrices skip renormalization: for
  // long words ad - bc cancels catastrophically and is not worth recomputing.
  struct Unchecked {};
  Moebius(double a, double b, double c, double d, Unchecked) : a_(a), b_(b), c_(c), d_(d) {}

  double a_, b_, c_, d_;
};

std::ostream& operator<<(std::ostream& os, const Moebius& m);

enum class IsometryKind { Identity, Elliptic, Parabolic, Hyperbolic };

const char* to_string(IsometryKind kind);

inline constexpr double kTraceTolerance = 1e-9;

double h_distance(const HPoint& x, const HPoint& z);

HPoint apply(const Moebius& m, const HPoint& x);
HBoundaryPoint apply_boundary(const Moebius& m, const HBoundaryPoint& xi);

IsometryKind classify(const Moebius& m);
/// 2 arccosh(|tr|/2); DomainError unless hyperbolic.
double translation_length(const Moebius& m);
/// (attracting, repelling); DomainError unless hyperbolic.
std::pair<HBoundaryPoint, HBoundaryPoint> fixed_points(const Moebius& m);

/// B_xi(x, y) = lim_{s->inf} d(x, sigma(s)) - d(y, sigma(s)), closed form.
double busemann(const HBoundaryPoint& xi, const HPoint& x, const HPoint& y);
/// The defining difference evaluated at the finite time s_max on the ray
/// from x toward xi. Used as an independent check of busemann().
double busemann_ray_limit(const HBoundaryPoint& xi, const HPoint& x, const HPoint& y,
                          double s_max);

/// Unit-speed geodesic ray from x toward xi, evaluated at t >= 0.
HPoint ray_point(const HPoint& x, const HBoundaryPoint& xi, double t);
/// Endpoint of the ray from x through z; DomainError when z == x.
HBoundaryPoint ray_endpoint(const HPoint& x, const HPoint& z);
/// inf_{t >= 0} d(z, ray_point(x, xi, t)).
double dist_to_ray(const HPoint& z, const HPoint& x, const HBoundaryPoint& xi);

/// Isometry sending x to i and xi to infinity, so that the ray from x
/// toward xi becomes the upward imaginary axis.
Moebius vertical_frame(const HPoint& x, const HBoundaryPoint& xi);

}  // namespace hyperlab
