#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace hyperlab;
using doctest::Approx;

namespace {

constexpr int kCases = 10000;
const PPoint kO = base_point();
const PPoint kY{HPoint{0, 2}, HPoint{0, 4}};
const auto kInf = HBoundaryPoint::infinity();

PIsometry random_isometry(std::mt19937_64& rng) {
  return {oracle::random_moebius(rng), oracle::random_moebius(rng)};
}

PBoundaryPoint random_regular(std::mt19937_64& rng, const Slope& theta) {
  return PBoundaryPoint::regular(oracle::random_boundary(rng), oracle::random_boundary(rng), theta);
}

}  // namespace

TEST_SUITE("product") {

TEST_CASE("distance vector examples") {
  const DistanceVector h = distance_vector(kO, kY);
  CHECK(h.h1 == Approx(std::log(2.0)));
  CHECK(h.h2 == Approx(std::log(4.0)));
  CHECK(slope_of(kO, kY).value() == Approx(std::atan(2.0)));
  CHECK(slope_of(kO, kY).value() == Approx(1.107149).epsilon(1e-6));
  CHECK(p_distance(kO, kY) == Approx(std::log(2.0) * std::sqrt(5.0)));
  CHECK(p_distance(kO, kY) == Approx(1.549924).epsilon(1e-6));
  CHECK(slope_of(kO, kO).value() == 0.0);
  CHECK(slope_of(kO, PPoint{HPoint{0, 2}, HPoint{0, 1}}).value() == 0.0);
  CHECK(slope_of(kO, PPoint{HPoint{0, 1}, HPoint{0, 3}}).value() == kHalfPi);
  CHECK_THROWS_AS(Slope(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(Slope(2.0), std::invalid_argument);
  CHECK_THROWS_AS(PBoundaryPoint::regular(kInf, kInf, Slope{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(PBoundaryPoint::regular(kInf, kInf, Slope{kHalfPi}), std::invalid_argument);
}

TEST_CASE("directional distance examples") {
  const double pi4 = kHalfPi / 2.0;
  CHECK(directional_distance(Slope{pi4}, kO, kY) == Approx(3.0 * std::log(2.0) / std::sqrt(2.0)));
  CHECK(directional_distance(Slope{pi4}, kO, kY) == Approx(1.470387).epsilon(1e-6));
  CHECK(directional_distance(Slope{0.0}, kO, kY) == Approx(std::log(2.0)));
  CHECK(directional_distance(Slope{0.3}, kY, kY) == 0.0);
}

TEST_CASE("product busemann examples") {
  const double pi4 = kHalfPi / 2.0;
  CHECK(product_busemann(PBoundaryPoint::regular(kInf, kInf, Slope{pi4}), kO, kY) == Approx(1.470387).epsilon(1e-6));
  CHECK(product_busemann(PBoundaryPoint::sing1(kInf), kO, kY) == Approx(std::log(2.0)));
  CHECK(product_busemann(PBoundaryPoint::sing2(kInf), kO, kY) == Approx(std::log(4.0)));
  const auto reg = PBoundaryPoint::regular(kInf, kInf, Slope{kHalfPi * 2.0 / 3.0});
  CHECK(b_busemann(BVector{1, 1}, reg, kO, kY) == Approx(std::log(8.0)));
  CHECK(b_busemann(BVector{1, 1}, reg, kO, kY) == Approx(2.079442).epsilon(1e-6));
  CHECK(b_busemann(BVector{0, 0}, reg, kO, kY) == 0.0);
  CHECK(b_busemann(BVector{2, 5}, PBoundaryPoint::sing1(kInf), kO, kY) == Approx(2.0 * std::log(2.0)));
  CHECK(b_busemann(BVector{2, 5}, PBoundaryPoint::sing2(kInf), kO, kY) == Approx(5.0 * std::log(4.0)));
}

TEST_CASE("product busemann split and ray limit") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 2000; ++k) {
    const Slope th = oracle::random_interior_slope(rng);
    const auto xi = random_regular(rng, th);
    const PPoint x = oracle::random_ppoint(rng), y = oracle::random_ppoint(rng);
    const double split = th.cos() * busemann(xi.xi1(), x.p1, y.p1) + th.sin() * busemann(xi.xi2(), x.p2, y.p2);
    CHECK(product_busemann(xi, x, y) == Approx(split).epsilon(1e-12));
    // Defining difference along the product ray. Each factor converges exponentially, the
    // Euclidean norm of the distance vector only like |v|^2 / T.
    const double m = std::min(th.cos(), th.sin());
    if (m >= 0.1) {
      const double t = 30.0 / m;
      const PPoint far = p_ray_point(x, xi, t);
      const double v1 = busemann(xi.xi1(), x.p1, y.p1), v2 = busemann(xi.xi2(), x.p2, y.p2);
      const double err = p_distance(x, far) - p_distance(y, far) - product_busemann(xi, x, y);
      CHECK(std::abs(err) <= (v1 * v1 + v2 * v2) / t + 1e-9);
    }
    const double d = 0.9;
    CHECK(b_busemann(BVector{d * th.cos(), d * th.sin()}, xi, x, y) ==
          Approx(d * product_busemann(xi, x, y)).epsilon(1e-12));
  }
}

TEST_CASE("chamber examples") {
  const auto reg = PBoundaryPoint::regular(kInf, kInf, Slope{kHalfPi / 2.0});
  CHECK(in_chamber(kO, reg, kY));
  CHECK_FALSE(in_chamber(kO, reg, PPoint{HPoint{0, 0.5}, HPoint{0, 4}}));
  CHECK(in_chamber(kO, PBoundaryPoint::sing1(kInf), PPoint{HPoint{0, 3}, HPoint{17, 5}}));
  const PPoint c = chamber_point(kO, reg, std::log(2.0), std::log(4.0));
  CHECK(c.p1.im() == Approx(2.0));
  CHECK(c.p2.im() == Approx(4.0));
  CHECK(dist_to_chamber(PPoint{HPoint{0, 0.5}, HPoint{0, 1}}, kO, reg) == Approx(std::log(2.0)));
}

TEST_CASE("invariance of distance vectors and slopes") {
  std::mt19937_64 rng(22);
  int failures = 0;
  for (int k = 0; k < kCases; ++k) {
    const PIsometry g = random_isometry(rng);
    const PPoint x = oracle::random_ppoint(rng), z = oracle::random_ppoint(rng);
    const DistanceVector a = distance_vector(x, z), b = distance_vector(apply(g, x), apply(g, z));
    const double scale = std::max(1.0, a.norm());
    if (std::abs(a.h1 - b.h1) > 1e-10 * scale || std::abs(a.h2 - b.h2) > 1e-10 * scale) ++failures;
    if (std::abs(slope_of(x, z).value() - slope_of(apply(g, x), apply(g, z)).value()) > 1e-10 * scale) ++failures;
    if (std::abs(a.norm() - p_distance(x, z)) > 1e-12 * scale) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("directional distance is a metric") {
  std::mt19937_64 rng(23);
  for (double t : {kHalfPi / 6.0, kHalfPi / 3.0, kHalfPi / 2.0, 2.0 * kHalfPi / 3.0, 5.0 * kHalfPi / 6.0}) {
    const Slope th{t};
    int failures = 0;
    for (int k = 0; k < kCases; ++k) {
      const PPoint x = oracle::random_ppoint(rng), y = oracle::random_ppoint(rng), z = oracle::random_ppoint(rng);
      const double xy = directional_distance(th, x, y), yz = directional_distance(th, y, z),
                   xz = directional_distance(th, x, z);
      if (xy != directional_distance(th, y, x)) ++failures;
      if (xz > xy + yz + 1e-12) ++failures;
      if (directional_distance(th, x, x) != 0.0 || !(xy > 0.0)) ++failures;
    }
    CAPTURE(t);
    CHECK(failures == 0);
  }
  // Endpoint slopes collapse to factor distances.
  const PPoint x = oracle::random_ppoint(rng), y = oracle::random_ppoint(rng);
  CHECK(directional_distance(Slope{0.0}, x, y) == Approx(h_distance(x.p1, y.p1)));
  CHECK(directional_distance(Slope{kHalfPi}, x, y) == Approx(h_distance(x.p2, y.p2)));
}

TEST_CASE("chamber characterization of the directional distance") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> ut(0.05, 6.0);
  int on = 0, off = 0, tested_off = 0;
  for (int k = 0; k < kCases; ++k) {
    const Slope th = oracle::random_interior_slope(rng);
    const auto xi = random_regular(rng, th);
    const PPoint x = oracle::random_ppoint(rng);
    const PPoint y = chamber_point(x, xi, ut(rng), ut(rng));
    if (std::abs(directional_distance(th, x, y) - product_busemann(xi, x, y)) >= 1e-9) ++on;
    const PPoint z = oracle::random_ppoint(rng);
    if (dist_to_chamber(z, x, xi) > 1e-3) {
      ++tested_off;
      if (!(product_busemann(xi, x, z) < directional_distance(th, x, z))) ++off;
    }
  }
  CHECK(on == 0);
  CHECK(off == 0);
  CHECK(tested_off > kCases / 2);
}

TEST_CASE("slope of a regular ray converges") {
  std::mt19937_64 rng(25);
  for (int k = 0; k < 200; ++k) {
    const Slope th = oracle::random_interior_slope(rng);
    const PPoint x = oracle::random_ppoint(rng);
    const auto xi = random_regular(rng, th);
    CHECK(std::abs(slope_of(x, p_ray_point(x, xi, 50.0)).value() - th.value()) < 1e-6);
  }
}

TEST_CASE("maximum of the product busemann over a slope stratum") {
  std::mt19937_64 rng(26);
  for (int k = 0; k < 50; ++k) {
    const Slope th = oracle::random_interior_slope(rng);
    const PPoint x = oracle::random_ppoint(rng), y = oracle::random_ppoint(rng);
    const double bound = directional_distance(th, x, y);
    double best = -INFINITY;
    for (int j = 0; j < 1000; ++j) best = std::max(best, product_busemann(random_regular(rng, th), x, y));
    CHECK(best <= bound + 1e-9);
    const auto through = PBoundaryPoint::regular(ray_endpoint(x.p1, y.p1), ray_endpoint(x.p2, y.p2), th);
    CHECK(product_busemann(through, x, y) == Approx(bound).epsilon(1e-9));
  }
}

TEST_CASE("dist_to_chamber against a parameter grid search") {
  std::mt19937_64 rng(27);
  for (int k = 0; k < 150; ++k) {
    const PPoint y = oracle::random_ppoint(rng), apex = oracle::random_ppoint(rng);
    const int kind = k % 3;
    const PBoundaryPoint xi = kind == 0   ? random_regular(rng, oracle::random_interior_slope(rng))
                              : kind == 1 ? PBoundaryPoint::sing1(oracle::random_boundary(rng))
                                          : PBoundaryPoint::sing2(oracle::random_boundary(rng));
    CHECK(dist_to_chamber(y, apex, xi) == Approx(oracle::chamber_grid_distance(y, apex, xi)).epsilon(1e-3));
  }
}

}  // TEST_SUITE
