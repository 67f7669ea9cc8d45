#pragma once

// Slope-resolved orbit counting: annulus counts, log-linear growth fits,
// the Psi grid over slopes, and Poincare partial sums.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperlab/schottky.hpp"

namespace hyperlab {

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Window {
  int n_min = 0;
  int n_max = 0;
};

/// (ceil(R/2), floor(R)).
Window default_window(double radius);

inline const std::vector<double> kDefaultEpsSchedule{0.30, 0.20, 0.15, 0.10, 0.07};

/// Entry n-1 of the result is the number of distances in (n-1, n].
using AnnulusCounts = std::vector<long long>;

AnnulusCounts count_distances(const std::vector<double>& dists, double radius, int n_max);
AnnulusCounts count_annuli(const std::vector<OrbitAtom>& atoms, double radius, const Slope& theta,
                           double eps, int n_max);
AnnulusCounts count_annuli_all(const std::vector<OrbitAtom>& atoms, double radius, int n_max);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

/// Ordinary least squares y = intercept + slope x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct GrowthEstimate {
  double theta = 0.0;
  double eps = 0.0;
  Window window;
  double value = 0.0;
  double stderr_ = 0.0;
  AnnulusCounts counts;
  /// (eps, value, stderr) for every schedule entry with enough data, largest eps first.
  std::vector<std::array<double, 3>> eps_trace;
  std::vector<std::string> flags;
  bool low_confidence = false;
};

GrowthEstimate estimate_delta_theta_eps(const AnnulusCounts& counts, Window window);
GrowthEstimate estimate_delta_theta(const std::vector<OrbitAtom>& atoms, double radius,
                                    const Slope& theta, const std::vector<double>& eps_schedule,
                                    Window window);
GrowthEstimate estimate_critical_exponent(const std::vector<OrbitAtom>& atoms, double radius,
                                          Window window);
/// Growth of a single factor, counted on factor distances alone.
GrowthEstimate estimate_factor_exponent(const std::vector<FactorAtom>& ball, double radius,
                                        Window window);

struct PsiGrid {
  std::vector<double> thetas;
  std::vector<double> deltas;
  std::vector<double> stderrs;
  std::vector<GrowthEstimate> estimates;
  double theta_star = 0.0;
  double delta_gamma = 0.0;
};

/// Builds a grid from given values; theta_star and delta_gamma are derived.
PsiGrid make_grid(std::vector<double> thetas, std::vector<double> deltas,
                  std::vector<double> stderrs = {});
PsiGrid psi_grid(const std::vector<OrbitAtom>& atoms, double radius,
                 const std::vector<double>& thetas, const std::vector<double>& eps_schedule,
                 Window window);
/// Evenly spaced interior slopes pi/2 * k/(n+1), k = 1..n.
std::vector<double> interior_thetas(int n);

/// Linear interpolation of the grid in theta (clamped at the ends).
double grid_delta(const PsiGrid& grid, double theta);
/// Homogeneous extension Psi(x) = |x| delta_{theta(x)} for x in the closed positive quadrant.
double psi(const PsiGrid& grid, double x1, double x2);

struct ConcavityViolation {
  int index = 0;  // middle grid index of the offending triple
  double excess = 0.0;
  double allowance = 0.0;
};

std::vector<ConcavityViolation> concavity_check(const PsiGrid& grid);

double poincare_partial_sum(const std::vector<OrbitAtom>& atoms, double s);
double poincare_partial_sum_restricted(const std::vector<OrbitAtom>& atoms, double s,
                                       const Slope& theta, double eps);

/// Terms of a generalized Poincare series: term exp(-s * exponent) sits in the
/// shell of radius `dist`.
struct SeriesTerm {
  double dist;
  double exponent;
};

struct CriticalS {
  double value = 0.0;
  bool divergent_everywhere = false;
  bool low_confidence = false;
};

/// Shell edges n_min - 1, n_min, ..., n_max of the unit annuli in a window.
std::vector<double> unit_shell_edges(Window window);

/// Shell classifier: at parameter s the series counts as divergent when the
/// log of its shell sums grows with the radius (shell j is (edges[j-1], edges[j]]).
/// Bisects the change of verdict to `tol`.
CriticalS shell_critical_s(const std::vector<SeriesTerm>& terms, const std::vector<double>& edges,
                           double tol);
/// Regression slope of log shell sums at parameter s; positive means divergent.
double shell_trend(const std::vector<SeriesTerm>& terms, const std::vector<double>& edges, double s);

/// Nested balls at increasing radii; `atoms` may hold points beyond `radius`,
/// which are ignored.
struct NestedBall {
  double radius;
  const std::vector<OrbitAtom>* atoms;
};

double critical_s_bisection(const std::vector<NestedBall>& balls, double tol);

}  // namespace hyperlab
