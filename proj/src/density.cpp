#include "hyperlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hyperlab {

void DensityParams::validate() const {
  if (!(s > 1.0)) throw std::invalid_argument("density parameter s must exceed 1");
  if (!(tau >= 0.0)) throw std::invalid_argument("density parameter tau must be non-negative");
}

double exponent_at(const OrbitAtom& atom, const PPoint& o, const PPoint& x, const Slope& theta,
                   const BVector& b, double tau) {
  const DistanceVector h = x == o ? atom.hvec : distance_vector(x, atom.point);
  const double d = x == o ? atom.dist : h.norm();
  return b.dot(h.h1, h.h2) + tau * (d - directional_distance(theta, h));
}

double weighted_poincare(const std::vector<OrbitAtom>& atoms, const PPoint& o, const Slope& theta,
                         double s, const BVector& b, double tau, const PPoint& x) {
  double sum = 0.0;
  for (const auto& a : atoms) sum += std::exp(-s * exponent_at(a, o, x, theta, b, tau));
  return sum;
}

const char* to_string(Region r) {
  switch (r) {
    case Region::Inside: return "inside";
    case Region::Boundary: return "boundary";
    case Region::Outside: return "outside";
  }
  return "?";
}

RegionVerdict region_membership(const std::vector<OrbitAtom>& atoms, Window window,
                                const Slope& theta, const BVector& b, double tau, double tol) {
  std::vector<SeriesTerm> terms;
  terms.reserve(atoms.size());
  for (const auto& a : atoms) {
    terms.push_back({a.dist, b.dot(a.hvec.h1, a.hvec.h2) +
                                 tau * (a.dist - directional_distance(theta, a.hvec))});
  }
  RegionVerdict v;
  try {
    const CriticalS c = shell_critical_s(terms, unit_shell_edges(window), tol / 4.0);
    v.critical_s = c.value;
    if (c.value < 1.0 - tol) {
      v.region = Region::Inside;
    } else if (c.value > 1.0 + tol) {
      v.region = Region::Outside;
    } else {
      v.region = Region::Boundary;
    }
  } catch (const InsufficientData&) {
    v.region = Region::Boundary;
    v.low_confidence = true;
  }
  return v;
}

SupportingLine supporting_line(const PsiGrid& grid, const Slope& theta) {
  const auto& t = grid.thetas;
  const double th = theta.value();
  if (t.size() < 2 || !(th >= t.front() && th <= t.back())) {
    throw std::invalid_argument("supporting line needs theta inside the grid range");
  }
  for (double d : grid.deltas) {
    if (!(d > 0.0)) throw EstimationError("supporting line needs positive growth on the grid");
  }
  // Q_j = H_{theta_j} / delta_j traces the boundary of the convex set {Psi >= 1}.
  // Its chain facing the origin is the concave envelope of the grid.
  struct Q {
    double x, y;
    std::size_t j;
  };
  std::vector<Q> hull;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const Q c{std::cos(t[j]) / grid.deltas[j], std::sin(t[j]) / grid.deltas[j], j};
    while (hull.size() >= 2) {
      const Q& a = hull[hull.size() - 2];
      const Q& bq = hull.back();
      const double cross = (c.x - a.x) * (bq.y - a.y) - (c.y - a.y) * (bq.x - a.x);
      const double scale = std::hypot(c.x - a.x, c.y - a.y) * std::hypot(bq.x - a.x, bq.y - a.y);
      if (cross < -1e-12 * scale) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(c);
  }
  // Normal of the edge (p, q) scaled so that <b, p> = <b, q> = 1.
  auto edge_b = [](const Q& p, const Q& q) {
    const double det = p.x * q.y - p.y * q.x;
    return BVector{(q.y - p.y) / det, (p.x - q.x) / det};
  };
  BVector b;
  std::size_t k = 0;
  while (k + 1 < hull.size() && t[hull[k + 1].j] < th) ++k;
  const bool at_vertex = t[hull[k].j] == th || (k + 1 < hull.size() && t[hull[k + 1].j] == th);
  if (hull.size() == 1) {
    throw EstimationError("supporting line needs at least two grid slopes");
  } else if (at_vertex) {
    const std::size_t v = t[hull[k].j] == th ? k : k + 1;
    if (v == 0) {
      b = edge_b(hull[0], hull[1]);
    } else if (v + 1 == hull.size()) {
      b = edge_b(hull[v - 1], hull[v]);
    } else {
      const BVector l = edge_b(hull[v - 1], hull[v]);
      const BVector r = edge_b(hull[v], hull[v + 1]);
      b = {0.5 * (l.b1 + r.b1), 0.5 * (l.b2 + r.b2)};
    }
  } else {
    b = edge_b(hull[k], hull[k + 1]);
  }
  SupportingLine out;
  out.b = b;
  out.envelope_delta = b.along(theta);
  out.grid_delta = grid_delta(grid, th);
  out.slack = out.envelope_delta - out.grid_delta;
  const double max_err = *std::max_element(grid.stderrs.begin(), grid.stderrs.end());
  if (out.slack > 2.0 * max_err + 1e-9) {
    throw EstimationError("grid is not concave near theta: envelope exceeds the grid by " +
                          std::to_string(out.slack));
  }
  return out;
}

BVector supporting_line_b(const PsiGrid& grid, const Slope& theta) {
  return supporting_line(grid, theta).b;
}

double FiniteDensity::total_mass() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum / normalization;
}

FiniteDensity build_density(AtomList atoms, const PPoint& o, const DensityParams& params,
                            const PPoint& x, double radius) {
  params.validate();
  FiniteDensity mu;
  mu.params = params;
  mu.base = o;
  mu.x = x;
  mu.truncation_radius = radius;
  mu.weights.assign(atoms->size(), 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < atoms->size(); ++i) {
    const OrbitAtom& a = (*atoms)[i];
    if (a.dist > radius) continue;
    const double eo = exponent_at(a, o, o, params.theta, params.b, params.tau);
    norm += std::exp(-params.s * eo);
    mu.weights[i] = x == o ? std::exp(-params.s * eo)
                           : std::exp(-params.s * exponent_at(a, o, x, params.theta, params.b,
                                                              params.tau));
  }
  mu.normalization = norm;
  mu.atoms = std::move(atoms);
  if (!params.theta.is_regular()) mu.flags.push_back("endpoint slope: no (b, theta)-density theory");
  return mu;
}

double off_slope_mass(const FiniteDensity& mu, double eps) {
  double off = 0.0;
  for (std::size_t i = 0; i < mu.weights.size(); ++i) {
    if (std::abs((*mu.atoms)[i].slope.value() - mu.params.theta.value()) > eps) off += mu.weights[i];
  }
  return off / mu.normalization / mu.total_mass();
}

double max_atom_mass(const FiniteDensity& mu) {
  const double top = *std::max_element(mu.weights.begin(), mu.weights.end());
  return top / mu.normalization / mu.total_mass();
}

SlopeHistogram slope_histogram(const FiniteDensity& mu, int bins) {
  SlopeHistogram h;
  for (int k = 0; k <= bins; ++k) h.edges.push_back(kHalfPi * k / bins);
  h.mass.assign(bins, 0.0);
  const double total = mu.total_mass();
  for (std::size_t i = 0; i < mu.weights.size(); ++i) {
    if (mu.weights[i] == 0.0) continue;
    int k = static_cast<int>((*mu.atoms)[i].slope.value() / kHalfPi * bins);
    k = std::clamp(k, 0, bins - 1);
    h.mass[k] += mu.mass(i) / total;
  }
  return h;
}

ClassicalDensity classical_density(AtomList atoms, const PPoint& o, const PsiGrid& grid,
                                   const PPoint& x, double s, double radius) {
  DensityParams p;
  p.theta = Slope{grid.theta_star};
  p.tau = 0.0;
  p.b = {grid.delta_gamma * std::cos(grid.theta_star), grid.delta_gamma * std::sin(grid.theta_star)};
  p.s = s;
  ClassicalDensity out{build_density(std::move(atoms), o, p, x, radius), {}};
  if (!p.theta.is_regular()) out.density.flags.push_back("theta* at an endpoint: low confidence");
  out.histogram = slope_histogram(out.density);
  return out;
}

double visual_coordinate(const HBoundaryPoint& xi) {
  if (xi.is_infinite()) return std::numbers::pi;
  return 2.0 * std::atan(xi.value());
}

HBoundaryPoint from_visual_coordinate(double u) {
  const double w = std::remainder(u, 2.0 * std::numbers::pi);
  if (std::abs(std::abs(w) - std::numbers::pi) < 1e-15) return HBoundaryPoint::infinity();
  return HBoundaryPoint::finite(std::tan(0.5 * w));
}

namespace {

int arc_index(double u, int arcs) {
  const double step = 2.0 * std::numbers::pi / arcs;
  const long k = std::lround(u / step);
  return static_cast<int>(((k % arcs) + arcs) % arcs);
}

}  // namespace

RadonNikodymReport radon_nikodym_check(const FiniteDensity& mu_o, const FiniteDensity& mu_x,
                                       int arcs) {
  if (mu_o.atoms != mu_x.atoms) throw std::invalid_argument("densities must share one atom list");
  if (!(mu_o.x == mu_o.base)) throw std::invalid_argument("first density must sit at the base point");
  RadonNikodymReport rep;
  rep.arcs = arcs;
  struct Acc {
    long long n = 0;
    double mo = 0.0, mx = 0.0;
  };
  std::map<std::pair<int, int>, Acc> cells;
  const auto& atoms = *mu_o.atoms;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (mu_o.weights[i] == 0.0 || !atoms[i].bnd1 || !atoms[i].bnd2) continue;
    const int i1 = arc_index(visual_coordinate(*atoms[i].bnd1), arcs);
    const int i2 = arc_index(visual_coordinate(*atoms[i].bnd2), arcs);
    Acc& a = cells[{i1, i2}];
    ++a.n;
    a.mo += mu_o.mass(i);
    a.mx += mu_x.mass(i);
  }
  const double step = 2.0 * std::numbers::pi / arcs;
  const BVector& b = mu_o.params.b;
  for (const auto& [key, acc] : cells) {
    if (acc.n < kMinCellAtoms || acc.mo < kMinCellMass) {
      ++rep.skipped;
      continue;
    }
    CellRow row;
    row.cell = {key.first, key.second, key.first * step, key.second * step};
    row.atoms = acc.n;
    row.mass_o = acc.mo;
    row.mass_x = acc.mx;
    row.ratio = acc.mx / acc.mo;
    const HBoundaryPoint eta1 = from_visual_coordinate(row.cell.u1_center);
    const HBoundaryPoint eta2 = from_visual_coordinate(row.cell.u2_center);
    row.expected = std::exp(b.b1 * busemann(eta1, mu_o.base.p1, mu_x.x.p1) +
                            b.b2 * busemann(eta2, mu_o.base.p2, mu_x.x.p2));
    row.deviation = std::abs(row.ratio / row.expected - 1.0);
    rep.max_deviation = std::max(rep.max_deviation, row.deviation);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace hyperlab
