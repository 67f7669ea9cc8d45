#include "hyperlab/hyperbolic.hpp"

#include <algorithm>
#include <cmath>

namespace hyperlab {

namespace {

constexpr double kVerticalTolerance = 1e-12;

double scale_of(double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

HPoint::HPoint(double re, double im) : re_(re), im_(im) {
  if (!std::isfinite(re) || !std::isfinite(im) || !(im > 0.0)) {
    throw std::invalid_argument("HPoint requires finite coordinates with im > 0");
  }
}

HBoundaryPoint HBoundaryPoint::finite(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("finite boundary point must be finite");
  HBoundaryPoint p;
  p.value_ = value;
  return p;
}

double HBoundaryPoint::value() const {
  if (!value_) throw DomainError("boundary point at infinity has no finite value");
  return *value_;
}

std::ostream& operator<<(std::ostream& os, const HPoint& p) {
  return os << "(" << p.re() << ", " << p.im() << ")";
}

std::ostream& operator<<(std::ostream& os, const HBoundaryPoint& p) {
  if (p.is_infinite()) return os << "inf";
  return os << p.value();
}

Moebius::Moebius(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!std::isfinite(det) || !(det > 0.0)) {
    throw std::invalid_argument("Moebius matrix needs a positive determinant");
  }
  const double s = std::sqrt(det);
  a_ = a / s;
  b_ = b / s;
  c_ = c / s;
  d_ = d / s;
}

Moebius Moebius::dilation(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilation factor must be positive");
  const double r = std::sqrt(lambda);
  return {r, 0.0, 0.0, 1.0 / r};
}

Moebius Moebius::symmetric_hyperbolic(double p, double length) {
  if (!(p > 0.0) || !(length > 0.0)) {
    throw std::invalid_argument("symmetric_hyperbolic needs p > 0 and length > 0");
  }
  const double ch = std::cosh(0.5 * length);
  const double sh = std::sinh(0.5 * length);
  return {ch, p * sh, sh / p, ch};
}

Moebius operator*(const Moebius& l, const Moebius& r) {
  return Moebius{l.a_ * r.a_ + l.b_ * r.c_, l.a_ * r.b_ + l.b_ * r.d_, l.c_ * r.a_ + l.d_ * r.c_,
                 l.c_ * r.b_ + l.d_ * r.d_, Moebius::Unchecked{}};
}

bool Moebius::approx_equal(const Moebius& o, double tol) const {
  const double scale = std::max({1.0, std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
  const double t = tol * scale;
  auto close = [t](double x, double y) { return std::abs(x - y) <= t; };
  const bool same = close(a_, o.a_) && close(b_, o.b_) && close(c_, o.c_) && close(d_, o.d_);
  const bool flipped =
      close(a_, -o.a_) && close(b_, -o.b_) && close(c_, -o.c_) && close(d_, -o.d_);
  return same || flipped;
}

std::ostream& operator<<(std::ostream& os, const Moebius& m) {
  return os << "[" << m.a() << ", " << m.b() << "; " << m.c() << ", " << m.d() << "]";
}

const char* to_string(IsometryKind kind) {
  switch (kind) {
    case IsometryKind::Identity: return "identity";
    case IsometryKind::Elliptic: return "elliptic";
    case IsometryKind::Parabolic: return "parabolic";
    case IsometryKind::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

double h_distance(const HPoint& x, const HPoint& z) {
  // cosh d = 1 + |x-z|^2 / (2 im x im z), written through asinh for accuracy at small d.
  const double chord = std::abs(x.z() - z.z());
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(x.im() * z.im())));
}

HPoint apply(const Moebius& m, const HPoint& x) {
  const std::complex<double> z = x.z();
  const std::complex<double> num = m.a() * z + m.b();
  const std::complex<double> den = m.c() * z + m.d();
  const double den2 = std::norm(den);
  const double re = (num * std::conj(den)).real() / den2;
  // det = 1, so Im(Mz) = Im z / |cz + d|^2 exactly.
  return {re, x.im() / den2};
}

HBoundaryPoint apply_boundary(const Moebius& m, const HBoundaryPoint& xi) {
  if (xi.is_infinite()) {
    if (m.c() == 0.0) return HBoundaryPoint::infinity();
    return HBoundaryPoint::finite(m.a() / m.c());
  }
  const double x = xi.value();
  const double den = m.c() * x + m.d();
  if (std::abs(den) <= 1e-15 * (std::abs(m.c() * x) + std::abs(m.d()))) {
    return HBoundaryPoint::infinity();
  }
  return HBoundaryPoint::finite((m.a() * x + m.b()) / den);
}

IsometryKind classify(const Moebius& m) {
  if (m.approx_equal(Moebius::identity(), 1e-12)) return IsometryKind::Identity;
  const double t = std::abs(m.trace());
  if (t > 2.0 + kTraceTolerance) return IsometryKind::Hyperbolic;
  if (t >= 2.0 - kTraceTolerance) return IsometryKind::Parabolic;
  return IsometryKind::Elliptic;
}

double translation_length(const Moebius& m) {
  if (classify(m) != IsometryKind::Hyperbolic) {
    throw DomainError("translation_length: isometry is not hyperbolic");
  }
  return 2.0 * std::acosh(0.5 * std::abs(m.trace()));
}

std::pair<HBoundaryPoint, HBoundaryPoint> fixed_points(const Moebius& m) {
  if (classify(m) != IsometryKind::Hyperbolic) {
    throw DomainError("fixed_points: isometry is not hyperbolic");
  }
  const double a = m.a(), b = m.b(), c = m.c(), d = m.d();
  if (std::abs(c) <= 1e-15 * scale_of(a, d)) {
    // z -> (a/d) z + b/d: fixed points infinity and b / (d - a).
    const auto finite = HBoundaryPoint::finite(b / (d - a));
    if (std::abs(a) > std::abs(d)) return {HBoundaryPoint::infinity(), finite};
    return {finite, HBoundaryPoint::infinity()};
  }
  // Roots of c z^2 + (d - a) z - b = 0, computed without cancellation.
  const double disc = std::sqrt(m.trace() * m.trace() - 4.0);
  const double am = a - d;
  double z1, z2;
  if (am == 0.0) {
    z1 = disc / (2.0 * c);
    z2 = -z1;
  } else {
    const double q = am + std::copysign(disc, am);
    z1 = q / (2.0 * c);
    z2 = -2.0 * b / q;
  }
  // The derivative at a fixed point is (cz + d)^-2, so the attracting one has |cz + d| > 1.
  if (std::abs(c * z1 + d) > std::abs(c * z2 + d)) {
    return {HBoundaryPoint::finite(z1), HBoundaryPoint::finite(z2)};
  }
  return {HBoundaryPoint::finite(z2), HBoundaryPoint::finite(z1)};
}

double busemann(const HBoundaryPoint& xi, const HPoint& x, const HPoint& y) {
  if (xi.is_infinite()) return std::log(y.im() / x.im());
  const std::complex<double> p(xi.value(), 0.0);
  return 2.0 * (std::log(std::abs(x.z() - p)) - std::log(std::abs(y.z() - p))) +
         std::log(y.im()) - std::log(x.im());
}

double busemann_ray_limit(const HBoundaryPoint& xi, const HPoint& x, const HPoint& y,
                          double s_max) {
  const HPoint far = ray_point(x, xi, s_max);
  return h_distance(x, far) - h_distance(y, far);
}

Moebius vertical_frame(const HPoint& x, const HBoundaryPoint& xi) {
  if (xi.is_infinite()) return {1.0, -x.re(), 0.0, x.im()};
  const Moebius to_infinity{0.0, -1.0, 1.0, -xi.value()};  // z -> -1 / (z - xi)
  const HPoint xp = apply(to_infinity, x);
  return Moebius{1.0, -xp.re(), 0.0, xp.im()} * to_infinity;
}

HPoint ray_point(const HPoint& x, const HBoundaryPoint& xi, double t) {
  if (t < 0.0) throw DomainError("ray_point: t must be non-negative");
  const Moebius frame = vertical_frame(x, xi);
  return apply(frame.inverse(), HPoint{0.0, std::exp(t)});
}

HBoundaryPoint ray_endpoint(const HPoint& x, const HPoint& z) {
  if (x == z) throw DomainError("ray_endpoint: z coincides with the ray origin");
  // Normalize x to i, then intersect the geodesic circle through i and w with the real line.
  const double wr = (z.re() - x.re()) / x.im();
  const double wi = z.im() / x.im();
  const double n2 = wr * wr + wi * wi;
  double e;
  if (std::abs(z.re() - x.re()) <= kVerticalTolerance * scale_of(x.re(), z.re())) {
    if (wi > 1.0) return HBoundaryPoint::infinity();
    if (wi == 1.0) throw DomainError("ray_endpoint: z coincides with the ray origin");
    e = 0.0;
  } else {
    const double c = (n2 - 1.0) / (2.0 * wr);
    const double rho = std::hypot(1.0, c);
    if (wr > 0.0) {
      e = c >= 0.0 ? c + rho : 1.0 / (rho - c);
    } else {
      e = c <= 0.0 ? c - rho : -1.0 / (rho + c);
    }
  }
  return HBoundaryPoint::finite(x.re() + x.im() * e);
}

double dist_to_ray(const HPoint& z, const HPoint& x, const HBoundaryPoint& xi) {
  const HPoint w = apply(vertical_frame(x, xi), z);
  // The orthogonal projection of w onto the imaginary axis sits at height |w|.
  if (std::abs(w.z()) >= 1.0) return std::asinh(std::abs(w.re()) / w.im());
  return h_distance(w, HPoint{0.0, 1.0});
}

}  // namespace hyperlab
