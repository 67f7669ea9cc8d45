#include "hyperlab/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

#include "hyperlab/shadows.hpp"

namespace hyperlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// A proxy point reduced to its ray angles at o. Rays toward a common slope
// reach the spheres of radius T1 = t cos(theta), T2 = t sin(theta) at time t,
// where two points at angle alpha apart are 2 asinh(sinh(T) |sin(alpha/2)|) apart.
struct Angles {
  double u1;
  double u2;
};

struct Layout {
  PBoundaryPoint::Kind kind;
  double cos_t;
  double sin_t;
  std::vector<Angles> pts;
};

Layout layout_of(const std::vector<PBoundaryPoint>& proxy, const PPoint& o) {
  if (proxy.empty()) return {PBoundaryPoint::Kind::Regular, 1.0, 0.0, {}};
  const auto kind = proxy.front().kind();
  const Slope th = proxy.front().slope();
  Layout l{kind, th.cos(), th.sin(), {}};
  l.pts.reserve(proxy.size());
  for (const auto& p : proxy) {
    if (p.kind() != kind || p.slope().value() != th.value()) {
      throw std::invalid_argument("covering needs proxy points of one kind and slope");
    }
    const double u1 = kind == PBoundaryPoint::Kind::Sing2 ? 0.0 : boundary_angle(o.p1, p.xi1());
    const double u2 = kind == PBoundaryPoint::Kind::Sing1 ? 0.0 : boundary_angle(o.p2, p.xi2());
    l.pts.push_back({u1, u2});
  }
  return l;
}

double sphere_distance(double sinh_t, double a, double b) {
  return 2.0 * std::asinh(sinh_t * std::abs(std::sin(0.5 * std::remainder(a - b, kTwoPi))));
}

// Grid over the angle torus with cells no narrower than the angular reach of a c-ball.
class AngleGrid {
 public:
  AngleGrid(double t, double c, double cos_t, double sin_t) {
    sh1_ = std::sinh(t * cos_t);
    sh2_ = std::sinh(t * sin_t);
    n1_ = cells_for(sh1_, c);
    n2_ = cells_for(sh2_, c);
    c_ = c;
  }

  long long key(const Angles& a) const { return cell(a.u1, n1_) * n2_ + cell(a.u2, n2_); }

  bool close(const Angles& a, const Angles& b) const {
    return std::hypot(sphere_distance(sh1_, a.u1, b.u1), sphere_distance(sh2_, a.u2, b.u2)) < c_;
  }

  template <class F>
  void for_neighbour_keys(const Angles& a, F&& f) const {
    const long long i1 = cell(a.u1, n1_), i2 = cell(a.u2, n2_);
    long long seen1[3], seen2[3];
    int m1 = offsets(i1, n1_, seen1), m2 = offsets(i2, n2_, seen2);
    for (int x = 0; x < m1; ++x) {
      for (int y = 0; y < m2; ++y) f(seen1[x] * n2_ + seen2[y]);
    }
  }

 private:
  static long long cells_for(double sh, double c) {
    const double s = std::sinh(0.5 * c);
    if (sh <= s) return 1;
    const double reach = 2.0 * std::asin(s / sh);
    return std::max<long long>(1, static_cast<long long>(std::floor(kTwoPi / reach)));
  }
  static long long cell(double u, long long n) {
    const double v = (u + std::numbers::pi) / kTwoPi;  // u in [-pi, pi]
    return std::clamp<long long>(static_cast<long long>(std::floor(v * n)), 0, n - 1);
  }
  static int offsets(long long i, long long n, long long* out) {
    int m = 0;
    for (long long d = -1; d <= 1; ++d) {
      const long long j = ((i + d) % n + n) % n;
      if (std::find(out, out + m, j) == out + m) out[m++] = j;
    }
    return m;
  }

  double sh1_ = 0.0, sh2_ = 0.0, c_ = 0.0;
  long long n1_ = 1, n2_ = 1;
};

std::vector<std::vector<int>> neighbours(const Layout& l, double r, double c) {
  const AngleGrid grid(-std::log(r), c, l.cos_t, l.sin_t);
  std::unordered_map<long long, std::vector<int>> cells;
  for (int i = 0; i < static_cast<int>(l.pts.size()); ++i) cells[grid.key(l.pts[i])].push_back(i);
  std::vector<std::vector<int>> nb(l.pts.size());
  for (int i = 0; i < static_cast<int>(l.pts.size()); ++i) {
    grid.for_neighbour_keys(l.pts[i], [&](long long k) {
      const auto it = cells.find(k);
      if (it == cells.end()) return;
      for (int j : it->second) {
        if (grid.close(l.pts[i], l.pts[j])) nb[i].push_back(j);
      }
    });
    std::sort(nb[i].begin(), nb[i].end());
  }
  return nb;
}

void validate_scale(double r, double c) {
  if (!(c > 0.0) || !(r > 0.0) || !(r < std::exp(-c))) {
    throw std::invalid_argument("c-ball needs c > 0 and 0 < r < e^-c");
  }
}

}  // namespace

void CBall::validate() const { validate_scale(r, c); }

bool cball_contains(const CBall& ball, const PBoundaryPoint& eta, const PPoint& o) {
  ball.validate();
  const double t = -std::log(ball.r);
  return p_distance(p_ray_point(o, eta, t), p_ray_point(o, ball.center, t)) < ball.c;
}

std::vector<PBoundaryPoint> radial_proxy(const std::vector<OrbitAtom>& atoms, const Slope& theta,
                                         double eps, double depth_min, double r_dedup, double c) {
  validate_scale(r_dedup, c);
  const bool sing1 = theta.value() == 0.0, sing2 = theta.value() == kHalfPi;
  std::vector<PBoundaryPoint> raw;
  for (const auto& a : atoms) {
    if (a.dist < depth_min || !(std::abs(a.slope.value() - theta.value()) < eps)) continue;
    if (sing1) {
      if (a.bnd1) raw.push_back(PBoundaryPoint::sing1(*a.bnd1));
    } else if (sing2) {
      if (a.bnd2) raw.push_back(PBoundaryPoint::sing2(*a.bnd2));
    } else if (a.bnd1 && a.bnd2) {
      raw.push_back(PBoundaryPoint::regular(*a.bnd1, *a.bnd2, theta));
    }
  }
  if (raw.empty()) throw InsufficientData("radial proxy is empty");
  const Layout l = layout_of(raw, base_point());
  const AngleGrid grid(-std::log(r_dedup), 0.25 * c, l.cos_t, l.sin_t);
  std::unordered_map<long long, std::vector<int>> kept_cells;
  std::vector<PBoundaryPoint> out;
  std::vector<Angles> kept;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool dup = false;
    grid.for_neighbour_keys(l.pts[i], [&](long long k) {
      if (dup) return;
      const auto it = kept_cells.find(k);
      if (it == kept_cells.end()) return;
      for (int j : it->second) {
        if (grid.close(l.pts[i], kept[j])) {
          dup = true;
          return;
        }
      }
    });
    if (dup) continue;
    kept_cells[grid.key(l.pts[i])].push_back(static_cast<int>(kept.size()));
    kept.push_back(l.pts[i]);
    out.push_back(raw[i]);
  }
  return out;
}

std::vector<std::vector<int>> cball_neighbours(const std::vector<PBoundaryPoint>& proxy, double r,
                                               double c, const PPoint& o) {
  validate_scale(r, c);
  return neighbours(layout_of(proxy, o), r, c);
}

int covering_count(const std::vector<PBoundaryPoint>& proxy, double r, double c, const PPoint& o) {
  const auto nb = cball_neighbours(proxy, r, c, o);
  const int n = static_cast<int>(nb.size());
  std::vector<char> covered(n, 0);
  std::vector<int> gain(n);
  // Max-heap on (gain, -index); entries go stale as gains drop and are re-pushed.
  std::priority_queue<std::pair<int, int>> heap;
  for (int i = 0; i < n; ++i) {
    gain[i] = static_cast<int>(nb[i].size());
    heap.push({gain[i], -i});
  }
  int count = 0, left = n;
  while (left > 0) {
    const auto [g, neg] = heap.top();
    heap.pop();
    const int i = -neg;
    if (covered[i]) continue;
    if (g != gain[i]) {
      heap.push({gain[i], -i});
      continue;
    }
    ++count;
    for (int j : nb[i]) {
      if (covered[j]) continue;
      covered[j] = 1;
      --left;
      for (int k : nb[j]) --gain[k];
    }
  }
  return count;
}

std::vector<double> default_scales(double depth) {
  std::vector<double> s;
  const int kmax = std::min(6, static_cast<int>(std::floor(depth - 2.0)));
  for (int k = 2; k <= kmax; ++k) s.push_back(std::exp(-k));
  return s;
}

DimensionEstimate estimate_dimension(const std::vector<PBoundaryPoint>& proxy,
                                     const std::vector<double>& scales, double c,
                                     double resolution_depth) {
  if (proxy.empty()) throw InsufficientData("dimension estimate needs a non-empty proxy");
  for (std::size_t k = 1; k < scales.size(); ++k) {
    if (!(scales[k] < scales[k - 1])) throw std::invalid_argument("scales must decrease strictly");
  }
  DimensionEstimate e;
  e.theta = proxy.front().slope().value();
  e.scales = scales;
  std::vector<double> x, y;
  for (double r : scales) {
    const int n = covering_count(proxy, r, c);
    const bool use = -std::log(r) <= resolution_depth;
    e.counts.push_back(n);
    e.used.push_back(use);
    if (use) {
      x.push_back(-std::log(r));
      y.push_back(std::log(n));
    }
  }
  if (x.size() < 4) throw InsufficientData("dimension estimate needs four usable scales");
  for (std::size_t k = 1; k < e.counts.size(); ++k) {
    if (e.counts[k] < e.counts[k - 1]) {
      e.flags.push_back("covering counts not monotone in r");
      break;
    }
  }
  for (std::size_t k = e.counts.size(); k-- > 0;) {
    if (!e.used[k]) continue;
    if (e.counts[k] == static_cast<int>(proxy.size())) {
      e.flags.push_back("saturated: finest used scale separates every proxy point");
    }
    break;
  }
  const LineFit f = fit_line(x, y);
  e.value = f.slope;
  e.stderr_ = f.stderr_slope;
  return e;
}

CocompactCertificate cocompact_certificate(const std::vector<OrbitAtom>& atoms,
                                           const std::vector<PBoundaryPoint>& rays, double depth,
                                           double step, double bound) {
  if (atoms.empty() || rays.empty()) throw InsufficientData("certificate needs atoms and rays");
  std::vector<std::size_t> order(atoms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return atoms[a].dist < atoms[b].dist; });
  const PPoint o = base_point();
  CocompactCertificate cert;
  cert.depth = depth;
  cert.bound = bound;
  cert.rays = static_cast<int>(rays.size());
  for (const auto& xi : rays) {
    for (double t = 0.0; t <= depth + 1e-12; t += step) {
      const PPoint p = p_ray_point(o, xi, t);
      // |d(o, a) - t| <= d(p, a), so only atoms in a shrinking annulus need checking.
      const auto mid = std::lower_bound(order.begin(), order.end(), t, [&](std::size_t i, double v) {
        return atoms[i].dist < v;
      });
      double best = INFINITY;
      for (auto it = mid; it != order.end() && atoms[*it].dist - t < best; ++it) {
        best = std::min(best, p_distance(p, atoms[*it].point));
      }
      for (auto it = mid; it != order.begin() && t - atoms[*std::prev(it)].dist < best; --it) {
        best = std::min(best, p_distance(p, atoms[*std::prev(it)].point));
      }
      cert.c_gamma = std::max(cert.c_gamma, best);
      ++cert.points;
    }
  }
  const double reach = atoms[order.back()].dist;
  cert.passed = cert.c_gamma <= bound && depth + cert.c_gamma <= reach;
  return cert;
}

std::vector<PBoundaryPoint> cantor_proxy(int levels) {
  if (levels < 0 || levels > 24) throw std::invalid_argument("cantor_proxy: levels out of range");
  std::vector<double> left{0.0};
  double len = 1.0;
  for (int l = 0; l < levels; ++l) {
    len /= 3.0;
    std::vector<double> next;
    next.reserve(2 * left.size());
    for (double a : left) {
      next.push_back(a);
      next.push_back(a + 2.0 * len);
    }
    left = std::move(next);
  }
  std::vector<PBoundaryPoint> out;
  out.reserve(left.size());
  const HPoint o{0.0, 1.0};
  for (double a : left) out.push_back(PBoundaryPoint::sing1(boundary_from_angle(o, 1.0 + a)));
  return out;
}

}  // namespace hyperlab
