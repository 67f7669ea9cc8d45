#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace hyperlab;
using doctest::Approx;

namespace {

ProductGroup default_group() { return {thin_factor(2.5, 3.0), thin_factor(2.5, 3.0), Coupling::FullProduct}; }

AtomList ball(double R) {
  return std::make_shared<const std::vector<OrbitAtom>>(orbit_ball(default_group(), base_point(), R));
}

const AtomList& ball14() {
  static const AtomList atoms = ball(14.0);
  return atoms;
}

PsiGrid grid_of(const std::vector<double>& thetas, double (*f)(double), double err = 0.0) {
  std::vector<double> d;
  for (double t : thetas) d.push_back(f(t));
  return make_grid(thetas, d, std::vector<double>(thetas.size(), err));
}

Word concat(const Word& a, const Word& b) {
  std::vector<int> l = a.letters();
  for (int x : b.letters()) {
    if (!l.empty() && l.back() == -x) {
      l.pop_back();
    } else {
      l.push_back(x);
    }
  }
  return Word(l);
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("weighted series collapses to a factor series") {
  const auto& atoms = *ball14();
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5; ++k) {
    const PPoint x = oracle::random_ppoint(rng);
    const Slope th = oracle::random_interior_slope(rng);
    double direct = 0.0;
    for (const auto& a : atoms) direct += std::exp(-1.3 * h_distance(x.p1, a.point.p1));
    CHECK(weighted_poincare(atoms, base_point(), th, 1.3, {1.0, 0.0}, 0.0, x) ==
          Approx(direct).epsilon(1e-10));
  }
  const std::vector<OrbitAtom> identity{atoms.front()};
  CHECK(weighted_poincare(identity, base_point(), Slope{0.4}, 1.1, {3.0, 2.0}, 24.0, base_point()) == 1.0);
}

TEST_CASE("density at the base point has unit mass") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 5; ++k) {
    DensityParams p;
    p.theta = oracle::random_interior_slope(rng);
    p.b = {0.5 + k * 0.2, 0.9 - k * 0.1};
    p.tau = 6.0 * k;
    p.s = 1.01 + 0.1 * k;
    const auto mu = build_density(ball14(), base_point(), p, base_point(), 14.0 - k);
    CHECK(mu.total_mass() == Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < mu.weights.size(); ++i) {
      if ((*mu.atoms)[i].dist <= 14.0 - k) {
        if (!(mu.weights[i] > 0.0)) FAIL("non-positive weight at " << i);
      } else if (mu.weights[i] != 0.0) {
        FAIL("weight beyond the truncation at " << i);
      }
    }
  }
}

TEST_CASE("single atom density") {
  const auto id = std::make_shared<const std::vector<OrbitAtom>>(std::vector<OrbitAtom>{ball14()->front()});
  const PPoint x{HPoint{0.3, 2.0}, HPoint{-1.0, 0.5}};
  DensityParams p;
  p.b = {1.0, 1.0};
  p.tau = 0.0;
  p.theta = Slope{0.9};
  p.s = 1.5;
  const auto mu = build_density(id, base_point(), p, x, 1.0);
  const double w = std::exp(-1.5 * (h_distance(x.p1, HPoint{0, 1}) + h_distance(x.p2, HPoint{0, 1})));
  CHECK(mu.normalization == 1.0);
  CHECK(mu.mass(0) == Approx(w).epsilon(1e-12));
}

TEST_CASE("density parameters are validated") {
  DensityParams p;
  p.s = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.s = 1.1;
  p.tau = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("supporting line of linear growth is its coefficient vector") {
  const auto thetas = interior_thetas(15);
  const auto g = grid_of(thetas, [](double t) { return std::cos(t) + std::sin(t); });
  for (double t : thetas) {
    const BVector b = supporting_line_b(g, Slope{t});
    CHECK(std::abs(b.b1 - 1.0) < 0.05);
    CHECK(std::abs(b.b2 - 1.0) < 0.05);
  }
  // Between grid slopes the interpolated grid sits slightly below the line.
  const auto noisy = grid_of(thetas, [](double t) { return std::cos(t) + std::sin(t); }, 0.01);
  for (double t = thetas.front(); t <= thetas.back(); t += 0.037) {
    const BVector b = supporting_line_b(noisy, Slope{t});
    CHECK(std::abs(b.b1 - 1.0) < 0.05);
    CHECK(std::abs(b.b2 - 1.0) < 0.05);
  }
  const auto g2 = grid_of(thetas, [](double t) { return 0.8 * std::cos(t) + 0.5 * std::sin(t); });
  for (double t : thetas) {
    const BVector b = supporting_line_b(g2, Slope{t});
    CHECK(std::abs(b.b1 - 0.8) < 0.05);
    CHECK(std::abs(b.b2 - 0.5) < 0.05);
  }
}

TEST_CASE("supporting line of a strictly concave grid") {
  const auto thetas = interior_thetas(17);
  const auto g = grid_of(thetas, [](double t) { return std::sqrt(std::sin(2.0 * t)); });
  for (double t : thetas) {
    const BVector b = supporting_line_b(g, Slope{t});
    CAPTURE(t);
    CHECK(b.along(Slope{t}) == Approx(grid_delta(g, t)).epsilon(1e-9));
    for (std::size_t j = 0; j < thetas.size(); ++j) CHECK(b.along(Slope{thetas[j]}) >= g.deltas[j] - 1e-9);
  }
}

TEST_CASE("supporting line errors") {
  const auto thetas = interior_thetas(9);
  const auto g = grid_of(thetas, [](double t) { return std::cos(t) + std::sin(t); });
  CHECK_THROWS_AS(supporting_line_b(g, Slope{0.05}), std::invalid_argument);
  std::vector<double> d = g.deltas;
  d[3] = -0.1;
  CHECK_THROWS_AS(supporting_line_b(make_grid(thetas, d), Slope{0.8}), EstimationError);
  d = g.deltas;
  d[4] -= 0.5;  // deep convex dent at pi/4
  CHECK_THROWS_AS(supporting_line_b(make_grid(thetas, d), Slope{thetas[4]}), EstimationError);
}

TEST_CASE("region extremes") {
  const auto& atoms = *ball14();
  const Window w = default_window(14.0);
  const Slope th{kHalfPi / 2.0};
  const double K = 10.0 * estimate_critical_exponent(atoms, 14.0, w).value;
  for (double tau : {0.0, 24.0}) CHECK(region_membership(atoms, w, th, {K, K}, tau, 0.05).region == Region::Inside);
  CHECK(region_membership(atoms, w, th, {0.0, 0.0}, 0.0, 0.05).region == Region::Outside);
}

TEST_CASE("region verdicts do not worsen with tau") {
  const auto& atoms = *ball14();
  const Window w = default_window(14.0);
  const Slope th{kHalfPi / 2.0};
  const int rank[] = {0, 1, 2};  // Inside, Boundary, Outside
  for (double lam : {0.6, 0.9, 1.0, 1.1, 1.5}) {
    int prev = 2;
    for (double tau : {0.0, 6.0, 12.0, 24.0, 48.0}) {
      const auto v = region_membership(atoms, w, th, {0.6 * lam, 0.6 * lam}, tau, 0.05);
      const int r = rank[static_cast<int>(v.region)];
      CAPTURE(lam);
      CAPTURE(tau);
      CHECK_FALSE((prev == 0 && r == 2));
      prev = r;
    }
  }
}

TEST_CASE("radon-nikodym at the base point") {
  DensityParams p;
  p.b = {0.6, 0.6};
  p.s = 1.05;
  const auto mu = build_density(ball14(), base_point(), p, base_point(), 14.0);
  const auto rep = radon_nikodym_check(mu, mu, 12);
  REQUIRE_FALSE(rep.rows.empty());
  for (const auto& r : rep.rows) {
    CHECK(r.ratio == 1.0);
    CHECK(r.expected == 1.0);
  }
  CHECK(rep.max_deviation == 0.0);
  const auto other = build_density(ball(10.0), base_point(), p, base_point(), 10.0);
  CHECK_THROWS_AS(radon_nikodym_check(mu, other), std::invalid_argument);
}

TEST_CASE("visual coordinate round trip") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 10000; ++k) {
    const HBoundaryPoint xi = oracle::random_boundary(rng);
    const HBoundaryPoint back = from_visual_coordinate(visual_coordinate(xi));
    if (xi.is_infinite()) {
      CHECK(back.is_infinite());
    } else {
      CHECK(back.value() == Approx(xi.value()).epsilon(1e-9));
    }
  }
}

TEST_CASE("densities are equivariant") {
  // mu_{gamma x}(gamma eta) = mu_x(eta): the truncated sums reindex exactly.
  const ProductGroup g = default_group();
  const auto& atoms = *ball14();
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (std::size_t i = 0; i < atoms.size(); ++i) index[{atoms[i].word1.to_string(), atoms[i].word2.to_string()}] = i;
  const Slope th{0.7};
  const BVector b{0.55, 0.62};
  std::mt19937_64 rng(14);
  for (const auto& [w1, w2] : {std::pair{Word({1}), Word({2})}, std::pair{Word({-2, 1}), Word()}}) {
    const OrbitAtom gamma = make_atom(w1, w2, base_point(), base_point());
    const PIsometry ge = element_of(g, gamma);
    const PPoint x = oracle::random_ppoint(rng);
    const PPoint gx = apply(ge, x);
    int compared = 0;
    for (std::size_t i = 0; i < atoms.size() && compared < 2000; ++i) {
      const auto it = index.find(std::pair{concat(w1, atoms[i].word1).to_string(), concat(w2, atoms[i].word2).to_string()});
      if (it == index.end()) continue;
      const double e = exponent_at(atoms[i], base_point(), x, th, b, 24.0);
      const double eg = exponent_at(atoms[it->second], base_point(), gx, th, b, 24.0);
      if (std::abs(e - eg) > 1e-8 * std::max(1.0, std::abs(e))) FAIL("reindexing mismatch " << e << " vs " << eg);
      ++compared;
    }
    CHECK(compared == 2000);
  }
}

TEST_CASE("classical density specializes the general one") {
  const auto thetas = interior_thetas(9);
  const auto g = grid_of(thetas, [](double t) { return 0.6 * std::cos(t) + 0.6 * std::sin(t); });
  const PPoint x{HPoint{0.5, 1.5}, HPoint{0.0, 2.0}};
  const auto c = classical_density(ball14(), base_point(), g, x, 1.05, 13.0);
  DensityParams p;
  p.theta = Slope{g.theta_star};
  p.tau = 0.0;
  p.b = {g.delta_gamma * std::cos(g.theta_star), g.delta_gamma * std::sin(g.theta_star)};
  p.s = 1.05;
  const auto mu = build_density(ball14(), base_point(), p, x, 13.0);
  CHECK(c.density.weights == mu.weights);
  CHECK(c.density.normalization == mu.normalization);
  double hist = 0.0;
  for (double m : c.histogram.mass) hist += m;
  CHECK(hist == Approx(1.0).epsilon(1e-12));

  const ProductGroup single{thin_factor(2.5, 3.0), trivial_factor(), Coupling::FullProduct};
  const auto sa = std::make_shared<const std::vector<OrbitAtom>>(orbit_ball(single, base_point(), 12.0));
  const PsiGrid edge = make_grid({0.0, 0.3, 0.6}, {0.5, 0.0, 0.0});
  const auto cs = classical_density(sa, base_point(), edge, base_point(), 1.1, 12.0);
  CHECK_FALSE(cs.density.flags.empty());
  CHECK(cs.histogram.mass.front() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weighted series stabilizes under radius doubling") {
  const auto big = ball(18.0);
  const auto thetas = interior_thetas(9);
  const auto g = psi_grid(*big, 18.0, thetas, kDefaultEpsSchedule, default_window(18.0));
  const Slope th{kHalfPi / 2.0};
  const BVector b = supporting_line_b(g, th);
  double half = 0.0, full = 0.0;
  for (const auto& a : *big) {
    const double t = std::exp(-1.2 * exponent_at(a, base_point(), base_point(), th, b, 24.0));
    full += t;
    if (a.dist <= 9.0) half += t;
  }
  CHECK(std::isfinite(full));
  CHECK((full - half) / full < 0.05);
}

}  // TEST_SUITE
