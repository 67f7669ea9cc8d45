#include "hyperlab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperlab {

Window default_window(double radius) {
  return {static_cast<int>(std::ceil(radius / 2.0)), static_cast<int>(std::floor(radius + 1e-9))};
}

AnnulusCounts count_distances(const std::vector<double>& dists, double radius, int n_max) {
  if (n_max > radius + 1e-9) {
    throw InsufficientData("annuli up to " + std::to_string(n_max) +
                           " need an orbit ball of at least that radius");
  }
  AnnulusCounts counts(std::max(0, n_max), 0);
  for (double d : dists) {
    if (d <= 0.0) continue;
    const double n = std::ceil(d);
    if (n <= n_max) ++counts[static_cast<std::size_t>(n) - 1];
  }
  return counts;
}

AnnulusCounts count_annuli(const std::vector<OrbitAtom>& atoms, double radius, const Slope& theta,
                           double eps, int n_max) {
  std::vector<double> dists;
  for (const auto& a : atoms) {
    if (std::abs(a.slope.value() - theta.value()) < eps) dists.push_back(a.dist);
  }
  return count_distances(dists, radius, n_max);
}

AnnulusCounts count_annuli_all(const std::vector<OrbitAtom>& atoms, double radius, int n_max) {
  std::vector<double> dists;
  dists.reserve(atoms.size());
  for (const auto& a : atoms) dists.push_back(a.dist);
  return count_distances(dists, radius, n_max);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) throw InsufficientData("line fit needs two points");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InsufficientData("line fit needs distinct abscissae");
  LineFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      ssr += r * r;
    }
    f.stderr_slope = std::sqrt(ssr / (n - 2) / sxx);
  }
  return f;
}

GrowthEstimate estimate_delta_theta_eps(const AnnulusCounts& counts, Window window) {
  if (window.n_min < 1 || window.n_min >= window.n_max) {
    throw std::invalid_argument("growth window needs 1 <= n_min < n_max");
  }
  if (window.n_max > static_cast<int>(counts.size())) {
    throw InsufficientData("growth window exceeds the counted annuli");
  }
  std::vector<double> x, y;
  for (int n = window.n_min; n <= window.n_max; ++n) {
    const long long c = counts[n - 1];
    if (c > 0) {
      x.push_back(n);
      y.push_back(std::log(static_cast<double>(c)));
    }
  }
  if (x.size() < 4) {
    throw InsufficientData("only " + std::to_string(x.size()) + " populated annuli in the window");
  }
  const LineFit f = fit_line(x, y);
  GrowthEstimate e;
  e.window = window;
  e.value = f.slope;
  e.stderr_ = f.stderr_slope;
  e.counts = counts;
  return e;
}

namespace {

bool is_endpoint(double theta) { return theta < 1e-12 || theta > kHalfPi - 1e-12; }

}  // namespace

GrowthEstimate estimate_delta_theta(const std::vector<OrbitAtom>& atoms, double radius,
                                    const Slope& theta, const std::vector<double>& eps_schedule,
                                    Window window) {
  if (eps_schedule.size() < 3) throw std::invalid_argument("eps schedule needs at least 3 entries");
  for (std::size_t i = 1; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] < eps_schedule[i - 1]) || !(eps_schedule[i] > 0.0)) {
      throw std::invalid_argument("eps schedule must be positive and strictly decreasing");
    }
  }
  std::optional<GrowthEstimate> best;
  std::vector<std::array<double, 3>> trace;
  for (double eps : eps_schedule) {
    const auto counts = count_annuli(atoms, radius, theta, eps, window.n_max);
    try {
      GrowthEstimate e = estimate_delta_theta_eps(counts, window);
      e.theta = theta.value();
      e.eps = eps;
      trace.push_back({eps, e.value, e.stderr_});
      best = std::move(e);
    } catch (const InsufficientData&) {
      break;
    }
  }
  if (!best) {
    throw InsufficientData("no populated slope window near theta = " +
                           std::to_string(theta.value()));
  }
  best->eps_trace = trace;
  // Shrinking eps removes atoms, so the estimates should not rise as eps decreases.
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double allowance = 2.0 * std::max(trace[i][2], trace[i - 1][2]);
    if (trace[i][1] > trace[i - 1][1] + allowance) {
      best->flags.push_back("eps trend violated between eps=" + std::to_string(trace[i - 1][0]) +
                            " and eps=" + std::to_string(trace[i][0]));
    }
  }
  if (is_endpoint(theta.value())) {
    best->low_confidence = true;
    best->flags.push_back("endpoint slope");
  }
  return *best;
}

GrowthEstimate estimate_critical_exponent(const std::vector<OrbitAtom>& atoms, double radius,
                                          Window window) {
  GrowthEstimate e = estimate_delta_theta_eps(count_annuli_all(atoms, radius, window.n_max), window);
  e.theta = std::numeric_limits<double>::quiet_NaN();
  e.eps = std::numeric_limits<double>::quiet_NaN();
  return e;
}

GrowthEstimate estimate_factor_exponent(const std::vector<FactorAtom>& ball, double radius,
                                        Window window) {
  std::vector<double> dists;
  dists.reserve(ball.size());
  for (const auto& a : ball) dists.push_back(a.dist);
  GrowthEstimate e = estimate_delta_theta_eps(count_distances(dists, radius, window.n_max), window);
  e.theta = std::numeric_limits<double>::quiet_NaN();
  e.eps = std::numeric_limits<double>::quiet_NaN();
  return e;
}

PsiGrid make_grid(std::vector<double> thetas, std::vector<double> deltas,
                  std::vector<double> stderrs) {
  if (thetas.size() != deltas.size() || thetas.empty()) {
    throw std::invalid_argument("grid needs matching, non-empty theta and delta lists");
  }
  if (stderrs.empty()) stderrs.assign(thetas.size(), 0.0);
  if (stderrs.size() != thetas.size()) throw std::invalid_argument("stderr list length mismatch");
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (!(thetas[i] > thetas[i - 1])) throw std::invalid_argument("grid thetas must increase");
  }
  PsiGrid g;
  g.thetas = std::move(thetas);
  g.deltas = std::move(deltas);
  g.stderrs = std::move(stderrs);
  g.delta_gamma = *std::max_element(g.deltas.begin(), g.deltas.end());
  // Among (near) maximal entries take the one closest to pi/4.
  double best_gap = INFINITY;
  for (std::size_t i = 0; i < g.thetas.size(); ++i) {
    if (g.deltas[i] < g.delta_gamma - 1e-12) continue;
    const double gap = std::abs(g.thetas[i] - kHalfPi / 2.0);
    if (gap < best_gap) {
      best_gap = gap;
      g.theta_star = g.thetas[i];
    }
  }
  return g;
}

PsiGrid psi_grid(const std::vector<OrbitAtom>& atoms, double radius,
                 const std::vector<double>& thetas, const std::vector<double>& eps_schedule,
                 Window window) {
  if (thetas.size() < 5) throw std::invalid_argument("psi grid needs at least 5 slopes");
  std::vector<double> deltas, errs;
  std::vector<GrowthEstimate> estimates;
  for (double t : thetas) {
    if (!(t > 0.0 && t < kHalfPi)) throw std::invalid_argument("grid slopes must be interior");
    estimates.push_back(estimate_delta_theta(atoms, radius, Slope{t}, eps_schedule, window));
    deltas.push_back(estimates.back().value);
    errs.push_back(estimates.back().stderr_);
  }
  PsiGrid g = make_grid(thetas, deltas, errs);
  g.estimates = std::move(estimates);
  return g;
}

std::vector<double> interior_thetas(int n) {
  std::vector<double> out;
  for (int k = 1; k <= n; ++k) out.push_back(kHalfPi * k / (n + 1));
  return out;
}

double grid_delta(const PsiGrid& g, double theta) {
  const auto& t = g.thetas;
  if (theta <= t.front()) return g.deltas.front();
  if (theta >= t.back()) return g.deltas.back();
  const auto it = std::upper_bound(t.begin(), t.end(), theta);
  const std::size_t j = it - t.begin();
  const double w = (theta - t[j - 1]) / (t[j] - t[j - 1]);
  return (1.0 - w) * g.deltas[j - 1] + w * g.deltas[j];
}

double psi(const PsiGrid& g, double x1, double x2) {
  if (x1 < 0.0 || x2 < 0.0) throw std::invalid_argument("psi is defined on the positive quadrant");
  const double r = std::hypot(x1, x2);
  if (r == 0.0) return 0.0;
  return r * grid_delta(g, slope_of(DistanceVector{x1, x2}).value());
}

std::vector<ConcavityViolation> concavity_check(const PsiGrid& g) {
  // For a concave, 1-homogeneous Psi and H_t = a H_{t-} + b H_{t+} with a, b >= 0,
  // superadditivity gives delta_t >= a delta_{t-} + b delta_{t+}.
  std::vector<ConcavityViolation> out;
  for (std::size_t i = 1; i + 1 < g.thetas.size(); ++i) {
    const double lo = g.thetas[i - 1], mid = g.thetas[i], hi = g.thetas[i + 1];
    const double den = std::sin(hi - lo);
    const double a = std::sin(hi - mid) / den;
    const double b = std::sin(mid - lo) / den;
    const double excess = a * g.deltas[i - 1] + b * g.deltas[i + 1] - g.deltas[i];
    const double allowance =
        2.0 * std::sqrt(a * a * g.stderrs[i - 1] * g.stderrs[i - 1] +
                        b * b * g.stderrs[i + 1] * g.stderrs[i + 1] + g.stderrs[i] * g.stderrs[i]);
    if (excess > allowance + 1e-12) out.push_back({static_cast<int>(i), excess, allowance});
  }
  return out;
}

double poincare_partial_sum(const std::vector<OrbitAtom>& atoms, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("poincare series needs s > 0");
  double sum = 0.0;
  for (const auto& a : atoms) sum += std::exp(-s * a.dist);
  return sum;
}

double poincare_partial_sum_restricted(const std::vector<OrbitAtom>& atoms, double s,
                                       const Slope& theta, double eps) {
  if (!(s > 0.0)) throw std::invalid_argument("poincare series needs s > 0");
  double sum = 0.0;
  for (const auto& a : atoms) {
    if (std::abs(a.slope.value() - theta.value()) < eps) sum += std::exp(-s * a.dist);
  }
  return sum;
}

std::vector<double> unit_shell_edges(Window w) {
  std::vector<double> edges;
  for (int n = w.n_min - 1; n <= w.n_max; ++n) edges.push_back(n);
  return edges;
}

double shell_trend(const std::vector<SeriesTerm>& terms, const std::vector<double>& edges, double s) {
  const std::size_t m = edges.size() - 1;
  // Per-shell log-sum-exp of -s * exponent.
  std::vector<double> peak(m, -INFINITY), acc(m, 0.0);
  auto shell_of = [&](double d) -> long {
    if (d <= edges.front() || d > edges.back()) return -1;
    return std::lower_bound(edges.begin(), edges.end(), d) - edges.begin() - 1;
  };
  for (const auto& t : terms) {
    const long j = shell_of(t.dist);
    if (j >= 0) peak[j] = std::max(peak[j], -s * t.exponent);
  }
  for (const auto& t : terms) {
    const long j = shell_of(t.dist);
    if (j >= 0) acc[j] += std::exp(-s * t.exponent - peak[j]);
  }
  std::vector<double> x, y;
  for (std::size_t j = 0; j < m; ++j) {
    if (acc[j] > 0.0) {
      x.push_back(edges[j + 1]);
      y.push_back(peak[j] + std::log(acc[j]));
    }
  }
  if (x.size() < 3) throw InsufficientData("shell classifier needs three populated shells");
  return fit_line(x, y).slope;
}

namespace {

// Terms of one shell grouped into runs of exponents no wider than kBinWidth.
// Replacing a run by its mean exponent changes its sum by a factor within
// exp(s^2 kBinWidth^2 / 8), far below the classifier's resolution for s of order 1.
constexpr double kBinWidth = 1e-3;

struct Bin {
  double mean;
  double count;
};

std::vector<std::vector<Bin>> compress_shells(const std::vector<SeriesTerm>& terms,
                                              const std::vector<double>& edges) {
  const std::size_t m = edges.size() - 1;
  std::vector<std::vector<double>> raw(m);
  for (const auto& t : terms) {
    if (t.dist <= edges.front() || t.dist > edges.back()) continue;
    raw[std::lower_bound(edges.begin(), edges.end(), t.dist) - edges.begin() - 1].push_back(
        t.exponent);
  }
  std::vector<std::vector<Bin>> shells(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto& v = raw[j];
    std::sort(v.begin(), v.end());
    for (std::size_t a = 0; a < v.size();) {
      std::size_t b = a;
      double sum = 0.0;
      while (b < v.size() && v[b] - v[a] <= kBinWidth) sum += v[b++];
      shells[j].push_back({sum / static_cast<double>(b - a), static_cast<double>(b - a)});
      a = b;
    }
  }
  return shells;
}

double compressed_trend(const std::vector<std::vector<Bin>>& shells,
                        const std::vector<double>& edges, double s) {
  std::vector<double> x, y;
  for (std::size_t j = 0; j < shells.size(); ++j) {
    if (shells[j].empty()) continue;
    double peak = -INFINITY;
    for (const auto& b : shells[j]) peak = std::max(peak, -s * b.mean);
    double acc = 0.0;
    for (const auto& b : shells[j]) acc += b.count * std::exp(-s * b.mean - peak);
    x.push_back(edges[j + 1]);
    y.push_back(peak + std::log(acc));
  }
  if (x.size() < 3) throw InsufficientData("shell classifier needs three populated shells");
  return fit_line(x, y).slope;
}

}  // namespace

CriticalS shell_critical_s(const std::vector<SeriesTerm>& terms, const std::vector<double>& edges,
                           double tol) {
  if (edges.size() < 4) throw InsufficientData("shell classifier needs at least three shells");
  const auto shells = compress_shells(terms, edges);
  auto trend = [&](double s) { return compressed_trend(shells, edges, s); };
  CriticalS out;
  if (trend(0.0) <= 0.0) return out;
  double lo = 0.0, hi = 1.0;
  while (trend(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1024.0) {
      out.value = INFINITY;
      out.divergent_everywhere = true;
      return out;
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (trend(mid) > 0.0 ? lo : hi) = mid;
  }
  out.value = 0.5 * (lo + hi);
  return out;
}

double critical_s_bisection(const std::vector<NestedBall>& balls, double tol) {
  if (balls.size() < 4) throw InsufficientData("critical_s_bisection needs at least four radii");
  auto dists_within = [](const NestedBall& b, double r) {
    std::vector<double> d;
    for (const auto& a : *b.atoms) {
      if (a.dist <= r) d.push_back(a.dist);
    }
    std::sort(d.begin(), d.end());
    return d;
  };
  std::vector<double> edges;
  for (std::size_t j = 0; j < balls.size(); ++j) {
    if (j > 0) {
      if (!(balls[j].radius > balls[j - 1].radius)) {
        throw std::invalid_argument("nested balls must have increasing radii");
      }
      if (dists_within(balls[j], balls[j - 1].radius) !=
          dists_within(balls[j - 1], balls[j - 1].radius)) {
        throw std::invalid_argument("orbit balls are not nested");
      }
    }
    edges.push_back(balls[j].radius);
  }
  std::vector<SeriesTerm> terms;
  for (const auto& a : *balls.back().atoms) {
    if (a.dist <= balls.back().radius) terms.push_back({a.dist, a.dist});
  }
  return shell_critical_s(terms, edges, tol).value;
}

}  // namespace hyperlab
