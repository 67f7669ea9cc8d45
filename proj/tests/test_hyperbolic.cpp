#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace hyperlab;
using doctest::Approx;

namespace {
const HPoint kI{0.0, 1.0};
constexpr int kCases = 10000;
}  // namespace

TEST_SUITE("hyperbolic") {

TEST_CASE("points and boundary points") {
  CHECK_THROWS_AS(HPoint(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(HPoint(1.0, -2.0), std::invalid_argument);
  CHECK(HBoundaryPoint::infinity().is_infinite());
  CHECK(HBoundaryPoint::finite(2.0).value() == 2.0);
  CHECK_THROWS_AS(HBoundaryPoint::infinity().value(), DomainError);
}

TEST_CASE("distance examples") {
  CHECK(h_distance(kI, HPoint{0, 2}) == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(h_distance(kI, kI) == 0.0);
  CHECK(h_distance(kI, HPoint{1, 1}) == Approx(std::acosh(1.5)).epsilon(1e-14));
  CHECK(h_distance(kI, HPoint{1, 1}) == Approx(0.962424).epsilon(1e-6));
  // Second route: integrate the length element along the connecting arc.
  CHECK(oracle::integrated_distance(kI, HPoint{1, 1}) == Approx(h_distance(kI, HPoint{1, 1})).epsilon(1e-9));
}

TEST_CASE("distance agrees with arc-length integration") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const HPoint x = oracle::random_point(rng), z = oracle::random_point(rng);
    CHECK(oracle::integrated_distance(x, z) == Approx(h_distance(x, z)).epsilon(1e-7));
  }
}

TEST_CASE("moebius action examples") {
  const Moebius four{2.0, 0.0, 0.0, 0.5};
  const HPoint p = apply(Moebius::identity(), HPoint{0.3, 2.0});
  CHECK(p.re() == Approx(0.3));
  CHECK(p.im() == Approx(2.0));
  CHECK(apply(four, kI).im() == Approx(4.0));
  CHECK(apply_boundary(four, HBoundaryPoint::finite(1.0)).value() == Approx(4.0));
  CHECK(apply_boundary(four, HBoundaryPoint::infinity()).is_infinite());
  // c xi + d = 0 sends xi to infinity; infinity goes to a/c.
  const Moebius m{2.0, 3.0, 1.0, 2.0};
  CHECK(apply_boundary(m, HBoundaryPoint::finite(-2.0)).is_infinite());
  CHECK(apply_boundary(m, HBoundaryPoint::infinity()).value() == Approx(2.0));
  CHECK(Moebius(2, 0, 0, 2).det() == Approx(1.0));
  CHECK_THROWS(Moebius(1, 0, 0, -1));
  CHECK(Moebius(1, 2, 3, 7).approx_equal(Moebius(-1, -2, -3, -7)));
}

TEST_CASE("classification") {
  const Moebius four{2.0, 0.0, 0.0, 0.5};
  CHECK(classify(four) == IsometryKind::Hyperbolic);
  CHECK(translation_length(four) == Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(translation_length(four) == Approx(2.0 * std::acosh(1.25)).epsilon(1e-12));
  const auto [attr, rep] = fixed_points(four);
  CHECK(attr.is_infinite());
  CHECK(rep.value() == Approx(0.0));
  CHECK(classify(Moebius{1, 1, 0, 1}) == IsometryKind::Parabolic);
  CHECK(classify(Moebius::identity()) == IsometryKind::Identity);
  CHECK(classify(Moebius{0, 1, -1, 0}) == IsometryKind::Elliptic);
  CHECK_THROWS_AS(translation_length(Moebius{1, 1, 0, 1}), DomainError);
  CHECK_THROWS_AS(fixed_points(Moebius{0, 1, -1, 0}), DomainError);
  // The attracting point is where forward iterates go.
  const Moebius g{2.0, 3.0, 1.0, 2.0};
  const auto [a, r] = fixed_points(g);
  HPoint p{0.1, 0.7};
  for (int i = 0; i < 60; ++i) p = apply(g, p);
  CHECK(p.re() == Approx(a.value()).epsilon(1e-9));
  CHECK(r.value() == Approx(-std::sqrt(3.0)));
}

TEST_CASE("busemann examples") {
  const auto inf = HBoundaryPoint::infinity();
  CHECK(busemann(inf, kI, HPoint{0, 2}) == Approx(std::log(2.0)));
  CHECK(busemann(HBoundaryPoint::finite(0), kI, HPoint{0, 0.5}) == Approx(std::log(2.0)));
  const auto one = HBoundaryPoint::finite(1.0);
  CHECK(busemann(one, kI, HPoint{1, 2}) ==
        Approx(busemann_ray_limit(one, kI, HPoint{1, 2}, 30.0)).epsilon(1e-6));
  CHECK(busemann_ray_limit(inf, kI, HPoint{0, 2}, 30.0) == Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(busemann_ray_limit(HBoundaryPoint::finite(0), kI, kI, 7.0) == 0.0);
}

TEST_CASE("ray examples") {
  const auto inf = HBoundaryPoint::infinity();
  CHECK(ray_point(kI, inf, std::log(2.0)).im() == Approx(2.0));
  CHECK(ray_endpoint(kI, HPoint{0, 5}).is_infinite());
  CHECK_THROWS_AS(ray_endpoint(kI, kI), DomainError);
  CHECK(dist_to_ray(HPoint{0, 2}, kI, inf) == Approx(0.0).epsilon(1e-12));
  CHECK(dist_to_ray(HPoint{0, 0.5}, kI, inf) == Approx(std::log(2.0)));
}

TEST_CASE("metric axioms on random triples") {
  std::mt19937_64 rng(1);
  int failures = 0;
  for (int k = 0; k < kCases; ++k) {
    const HPoint x = oracle::random_point(rng), y = oracle::random_point(rng), z = oracle::random_point(rng);
    const double xy = h_distance(x, y), yx = h_distance(y, x), xz = h_distance(x, z), yz = h_distance(y, z);
    if (xy != yx) ++failures;
    if (xz > xy + yz + 1e-12) ++failures;
    if (h_distance(x, x) != 0.0 || !(xy > 0.0)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("isometry invariance") {
  std::mt19937_64 rng(2);
  int failures = 0;
  for (int k = 0; k < kCases; ++k) {
    const Moebius m = oracle::random_moebius(rng);
    const HPoint x = oracle::random_point(rng), z = oracle::random_point(rng);
    const double d = h_distance(x, z);
    // Relative tolerance: the matrices can push points very far out.
    if (std::abs(h_distance(apply(m, x), apply(m, z)) - d) > 1e-10 * std::max(1.0, d)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("busemann identities on random inputs") {
  std::mt19937_64 rng(3);
  int cocycle = 0, anti = 0, bound = 0, equi = 0, ray = 0;
  for (int k = 0; k < kCases; ++k) {
    const HBoundaryPoint xi = oracle::random_boundary(rng);
    const HPoint x = oracle::random_point(rng), y = oracle::random_point(rng), z = oracle::random_point(rng);
    const double bxy = busemann(xi, x, y), byz = busemann(xi, y, z), bxz = busemann(xi, x, z);
    if (std::abs(bxz - (bxy + byz)) > 1e-10) ++cocycle;
    if (std::abs(bxy + busemann(xi, y, x)) > 1e-10) ++anti;
    if (std::abs(bxy) > h_distance(x, y) + 1e-10) ++bound;
    const Moebius m = oracle::random_moebius(rng);
    if (std::abs(busemann(apply_boundary(m, xi), apply(m, x), apply(m, y)) - bxy) > 1e-8) ++equi;
    if (std::abs(busemann_ray_limit(xi, x, y, 30.0) - bxy) > 1e-6) ++ray;
  }
  CHECK(cocycle == 0);
  CHECK(anti == 0);
  CHECK(bound == 0);
  CHECK(equi == 0);
  CHECK(ray == 0);
}

TEST_CASE("busemann gap near a ray") {
  // 0 <= d(x, z) - B_xi(x, z) < 2c for z within c of the ray from x toward xi.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ut(0.0, 8.0), uc(0.05, 2.0), uu(0.0, 1.0);
  int failures = 0;
  for (int k = 0; k < kCases; ++k) {
    const HPoint x = oracle::random_point(rng);
    const HBoundaryPoint xi = oracle::random_boundary(rng);
    const double c = uc(rng);
    const HPoint p = ray_point(x, xi, ut(rng));
    // A point at distance < c from p, in a random direction.
    const double r = c * uu(rng) * 0.999, a = 2.0 * std::numbers::pi * uu(rng);
    const Moebius frame = vertical_frame(p, HBoundaryPoint::infinity()).inverse();
    const std::complex<double> w = std::tanh(r / 2.0) * std::polar(1.0, a);
    const std::complex<double> i{0.0, 1.0};
    const HPoint z = apply(frame, HPoint{i * (1.0 + w) / (1.0 - w)});
    const double gap = h_distance(x, z) - busemann(xi, x, z);
    if (!(gap >= 0.0 && gap < 2.0 * c)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("on-ray characterization") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 6.0);
  int failures = 0;
  for (int k = 0; k < kCases; ++k) {
    const HPoint x = oracle::random_point(rng);
    const HBoundaryPoint xi = oracle::random_boundary(rng);
    const HPoint y = ray_point(x, xi, ut(rng));
    if (std::abs(busemann(xi, x, y) - h_distance(x, y)) >= 1e-10 * std::max(1.0, h_distance(x, y))) ++failures;
    const HPoint off = oracle::random_point(rng);
    if (dist_to_ray(off, x, xi) > 1e-6 && std::abs(busemann(xi, x, off) - h_distance(x, off)) < 1e-10) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("dist_to_ray is the minimum over the ray") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 300; ++k) {
    const HPoint x = oracle::random_point(rng), z = oracle::random_point(rng);
    const HBoundaryPoint xi = oracle::random_boundary(rng);
    const auto f = [&](double t) { return h_distance(z, ray_point(x, xi, t)); };
    int jbest = 0;
    for (int j = 1; j <= 20000; ++j) {
      if (f(j * 0.001) < f(jbest * 0.001)) jbest = j;
    }
    // Convex along the geodesic: refine the grid minimum by ternary search.
    double lo = std::max(0, jbest - 1) * 0.001, hi = (jbest + 1) * 0.001;
    for (int it = 0; it < 100; ++it) {
      const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
      if (f(a) < f(b)) hi = b;
      else lo = a;
    }
    const double best = std::min(f(jbest * 0.001), f(0.5 * (lo + hi)));
    const double d = dist_to_ray(z, x, xi);
    CHECK(d <= best + 1e-12);
    CHECK(d == Approx(best).epsilon(1e-5));
  }
}

}  // TEST_SUITE
